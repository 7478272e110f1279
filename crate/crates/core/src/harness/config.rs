//! Scenario files.
//!
//! Grammar (one statement per line):
//!
//! ```text
//! # comment            ; comment
//! [section]
//! key = value
//! key = v1, v2, v3     lists are comma separated
//! ```
//!
//! Sections and keys are fixed; anything unknown is reported. `path` under
//! `[channel]` may repeat, one line per path: `gain_re, gain_im, delay,
//! doppler`. Every violation in a file is collected before loading fails.
//! [`ScenarioConfig::to_canonical_string`] writes every field in a fixed
//! order so that loading its output reproduces the same text.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::channel::{ChannelPath, ChannelSpec, Normalization};
use crate::error::{ConfigViolation, Error, Result};
use crate::receivers::EqualizerMode;
use crate::sensing::{RadarConfig, SPEED_OF_LIGHT};
use crate::waveform::Constellation;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Ber,
    Rate,
    Sensing,
    Equivalence,
}

/// Communication schemes the BER driver can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// N OFDM symbols, per-symbol prefix, Doppler-free channel.
    Ofdm,
    ScIfdm,
    /// OTFS through the mother lattice.
    Otfs,
    /// OTFS through the direct IDZT / DZT pair.
    OtfsDirect,
    /// OTFS with a per-block prefix.
    OtfsFcp,
    Ocdm,
    Afdm,
    OtfsOfdm,
    ScifdmAfdm,
    ScifdmChirp,
}

/// Radar schemes the sensing driver can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SensingScheme {
    ScifdmChirp,
    ScifdmAfdm,
    Fmcw,
}

macro_rules! named_enum {
    ($ty:ty { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn name(self) -> &'static str {
                match self {
                    $(Self::$variant => $name),+
                }
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(Self::$variant),)+
                    other => Err(Error::Parameter(format!(
                        "unknown value '{other}', expected one of: {}",
                        [$($name),+].join(", ")
                    ))),
                }
            }
        }
    };
}

named_enum!(Experiment {
    Ber => "ber",
    Rate => "rate",
    Sensing => "sensing",
    Equivalence => "equivalence",
});

named_enum!(Scheme {
    Ofdm => "ofdm",
    ScIfdm => "sc_ifdm",
    Otfs => "otfs",
    OtfsDirect => "otfs_direct",
    OtfsFcp => "otfs_fcp",
    Ocdm => "ocdm",
    Afdm => "afdm",
    OtfsOfdm => "otfs_ofdm",
    ScifdmAfdm => "scifdm_afdm",
    ScifdmChirp => "scifdm_chirp",
});

named_enum!(SensingScheme {
    ScifdmChirp => "scifdm_chirp",
    ScifdmAfdm => "scifdm_afdm",
    Fmcw => "fmcw",
});

/// Waveform and coexistence parameters shared by the drivers.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveformParams {
    pub schemes: Vec<Scheme>,
    pub c1_prime: i64,
    pub c2: f64,
    /// Chirp indices for the chirp-lattice schemes.
    pub chirps: Vec<usize>,
    pub alpha: usize,
    pub q1: usize,
    pub fcp_len: usize,
    pub rcp_len: usize,
    pub guard_doppler: usize,
    pub guard_delay: usize,
    pub power_ratio_db: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadarParams {
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub n_sym: usize,
    pub speed_of_light: f64,
    pub targets: usize,
    pub range_max: f64,
    pub velocity_max: f64,
    pub power_ratios_db: Vec<f64>,
    pub schemes: Vec<SensingScheme>,
    pub map_trial: usize,
    pub map_snr_db: f64,
}

/// Overheads of the rate expressions, in symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct RateParams {
    pub m: usize,
    pub n: usize,
    pub alpha: usize,
    pub fcp_len: usize,
    /// OFDM symbol length `T` in samples.
    pub t: usize,
    pub t_cp: usize,
    pub phi_otfs: f64,
    pub phi_ofdm: f64,
    pub theta_ofdm: f64,
    pub theta_otfs: f64,
    pub theta_ocdm: f64,
    pub theta_afdm: f64,
}

impl RateParams {
    /// Defaults for an `N x M` frame: one pilot column for coexistent OTFS,
    /// one pilot subcarrier for OFDM and OTFS symbols, one pilot column's
    /// worth of chirps for OCDM and AFDM.
    pub fn defaults(m: usize, n: usize, alpha: usize, fcp_len: usize) -> Self {
        Self {
            m,
            n,
            alpha,
            fcp_len,
            t: m,
            t_cp: fcp_len,
            phi_otfs: m as f64,
            phi_ofdm: 1.0,
            theta_ofdm: 1.0,
            theta_otfs: 1.0,
            theta_ocdm: m as f64,
            theta_afdm: m as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub experiment: Experiment,
    pub trials: usize,
    pub seed: u64,
    pub output: Option<String>,
    pub m: usize,
    pub n: usize,
    pub constellation: Constellation,
    pub equalizer: EqualizerMode,
    pub snr_db: Vec<f64>,
    pub waveform: WaveformParams,
    pub channel: ChannelSpec,
    pub radar: RadarParams,
    pub rate: RateParams,
}

impl Default for ScenarioConfig {
    /// The simulation parameters of the reference sensing scenario.
    fn default() -> Self {
        let (m, n, alpha, fcp_len) = (32, 32, 2, 4);
        Self {
            experiment: Experiment::Sensing,
            trials: 200,
            seed: 1,
            output: None,
            m,
            n,
            constellation: Constellation::Qpsk,
            equalizer: EqualizerMode::Mmse,
            snr_db: vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0],
            waveform: WaveformParams {
                schemes: vec![Scheme::Otfs],
                c1_prime: 2,
                c2: 0.0,
                chirps: vec![0],
                alpha,
                q1: 0,
                fcp_len,
                rcp_len: 4,
                guard_doppler: 1,
                guard_delay: 2,
                power_ratio_db: 20.0,
            },
            channel: ChannelSpec::new(
                vec![
                    ChannelPath::new(C64::new(0.8, 0.0), 0, 0),
                    ChannelPath::new(C64::new(0.4, 0.3), 1, 1),
                    ChannelPath::new(C64::new(0.2, -0.2), 2, -1),
                ],
                Normalization::UnitPower,
            )
            .expect("default channel"),
            radar: RadarParams {
                carrier_hz: 77e9,
                bandwidth_hz: 200e6,
                n_sym: 200,
                speed_of_light: SPEED_OF_LIGHT,
                targets: 3,
                range_max: 100.0,
                velocity_max: 80.0,
                power_ratios_db: vec![15.0, 20.0],
                schemes: vec![
                    SensingScheme::ScifdmChirp,
                    SensingScheme::ScifdmAfdm,
                    SensingScheme::Fmcw,
                ],
                map_trial: 0,
                map_snr_db: 15.0,
            },
            rate: RateParams::defaults(m, n, alpha, fcp_len),
        }
    }
}

impl ScenarioConfig {
    pub fn radar_config(&self) -> RadarConfig {
        RadarConfig {
            carrier_hz: self.radar.carrier_hz,
            bandwidth_hz: self.radar.bandwidth_hz,
            m: self.m,
            n: self.n,
            n_sym: self.radar.n_sym,
            speed_of_light: self.radar.speed_of_light,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config { violations, .. } => Error::Config {
                path: Some(path.to_path_buf()),
                violations,
            },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser::default();
        p.scan(text);
        let cfg = p.build();
        if !p.violations.is_empty() {
            return Err(Error::Config {
                path: None,
                violations: p.violations,
            });
        }
        Ok(cfg)
    }

    /// Constraint checks that span fields. Returns every violation found.
    pub fn check(&self) -> Vec<ConfigViolation> {
        let mut v = Vec::new();
        let mut bad = |field: &str, message: String| {
            v.push(ConfigViolation {
                line: None,
                field: Some(field.to_string()),
                message,
            })
        };
        if self.m == 0 || self.n == 0 {
            bad(
                "frame.m",
                format!("grid must be non-empty (M={}, N={})", self.m, self.n),
            );
        }
        if self.trials == 0 {
            bad("experiment.trials", "must be at least 1".into());
        }
        if self.snr_db.is_empty() {
            bad("snr.values", "need at least one SNR point".into());
        }
        if self.snr_db.iter().any(|s| s.is_nan()) {
            bad("snr.values", "NaN is not an SNR".into());
        }
        let w = &self.waveform;
        if w.schemes.is_empty() {
            bad("waveform.schemes", "need at least one scheme".into());
        }
        if w.alpha < 2 {
            bad(
                "waveform.alpha",
                format!("coexistence ratio must be at least 2, got {}", w.alpha),
            );
        } else if !self.n.is_multiple_of(w.alpha) {
            bad(
                "waveform.alpha",
                format!("alpha={} does not divide N={}", w.alpha, self.n),
            );
        }
        if w.q1 >= w.alpha.max(1) {
            bad("waveform.q1", format!("must be below alpha={}", w.alpha));
        }
        if w.c1_prime < 0 {
            bad("waveform.c1_prime", "must be non-negative".into());
        }
        if !w.c2.is_finite() {
            bad("waveform.c2", "must be finite".into());
        }
        if !w.power_ratio_db.is_finite() {
            bad("waveform.power_ratio_db", "must be finite".into());
        }
        if let Some(i) = w.chirps.iter().find(|i| **i >= self.m * self.n) {
            bad(
                "waveform.chirps",
                format!("index {i} outside [0, {})", self.m * self.n),
            );
        }
        let delay = self.channel.max_delay();
        if delay >= self.m * self.n {
            bad(
                "channel.path",
                format!(
                    "delay {delay} does not fit a frame of {} samples",
                    self.m * self.n
                ),
            );
        }
        let uses_fcp = w
            .schemes
            .iter()
            .any(|s| matches!(s, Scheme::Ofdm | Scheme::OtfsFcp | Scheme::OtfsOfdm));
        if uses_fcp && w.fcp_len < delay {
            bad(
                "waveform.fcp_len",
                format!(
                    "{} is shorter than the channel delay spread {delay}",
                    w.fcp_len
                ),
            );
        }
        let uses_rcp = w
            .schemes
            .iter()
            .any(|s| !matches!(s, Scheme::Ofdm | Scheme::OtfsFcp | Scheme::OtfsOfdm));
        if uses_rcp && w.rcp_len < delay {
            bad(
                "waveform.rcp_len",
                format!(
                    "{} is shorter than the channel delay spread {delay}",
                    w.rcp_len
                ),
            );
        }
        let r = &self.radar;
        for (field, x) in [
            ("radar.carrier_hz", r.carrier_hz),
            ("radar.bandwidth_hz", r.bandwidth_hz),
            ("radar.speed_of_light", r.speed_of_light),
        ] {
            if !(x.is_finite() && x > 0.0) {
                bad(field, "must be positive".into());
            }
        }
        if r.n_sym == 0 {
            bad("radar.n_sym", "must be at least 1".into());
        }
        if r.targets == 0 {
            bad("radar.targets", "must be at least 1".into());
        }
        if r.schemes.is_empty() {
            bad("radar.schemes", "need at least one scheme".into());
        }
        if r.power_ratios_db.iter().any(|x| !x.is_finite()) {
            bad("radar.power_ratios_db", "must be finite".into());
        }
        if r.map_snr_db.is_nan() {
            bad("radar.map_snr_db", "NaN is not an SNR".into());
        }
        if self.m > 0 && self.n > 0 && r.n_sym > 0 && r.bandwidth_hz > 0.0 && r.carrier_hz > 0.0 {
            let rc = self.radar_config();
            if !(r.range_max >= 0.0 && r.range_max < rc.max_range(1)) {
                bad(
                    "radar.range_max",
                    format!("must lie in [0, {:.3} m)", rc.max_range(1)),
                );
            }
            if !(r.velocity_max >= 0.0 && r.velocity_max < rc.max_velocity()) {
                bad(
                    "radar.velocity_max",
                    format!("must lie in [0, {:.3} m/s)", rc.max_velocity()),
                );
            }
            let bins_r = (r.range_max / rc.range_resolution()).floor() as usize + 1;
            let bins_v = 2 * (r.velocity_max / rc.velocity_resolution()).floor() as usize + 1;
            if r.targets > bins_r.div_ceil(2) * bins_v.div_ceil(2) {
                bad(
                    "radar.targets",
                    "too many targets for the range/velocity span".into(),
                );
            }
        }
        let rp = &self.rate;
        for (field, x) in [
            ("rate.phi_otfs", rp.phi_otfs),
            ("rate.phi_ofdm", rp.phi_ofdm),
            ("rate.theta_ofdm", rp.theta_ofdm),
            ("rate.theta_otfs", rp.theta_otfs),
            ("rate.theta_ocdm", rp.theta_ocdm),
            ("rate.theta_afdm", rp.theta_afdm),
        ] {
            if !(x.is_finite() && x >= 0.0) {
                bad(field, "overhead must be a non-negative number".into());
            }
        }
        if rp.t == 0 {
            bad("rate.t", "OFDM symbol length must be positive".into());
        }
        let (mn, alpha) = ((self.m * self.n) as f64, self.waveform.alpha.max(1) as f64);
        for (field, x, cap) in [
            ("rate.phi_otfs", rp.phi_otfs, mn / alpha),
            ("rate.phi_ofdm", rp.phi_ofdm, rp.t as f64 / alpha),
            ("rate.theta_ofdm", rp.theta_ofdm, rp.t as f64),
            ("rate.theta_otfs", rp.theta_otfs, self.m as f64),
            ("rate.theta_ocdm", rp.theta_ocdm, mn),
            ("rate.theta_afdm", rp.theta_afdm, mn),
        ] {
            if x > cap {
                bad(
                    field,
                    format!("overhead {x} exceeds the {cap} data symbols it is taken from"),
                );
            }
        }
        v
    }

    /// Every field, fixed order, one statement per line.
    pub fn to_canonical_string(&self) -> String {
        let mut s = String::new();
        let list_f = |v: &[f64]| v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(", ");
        let list_u = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let _ = writeln!(s, "[experiment]");
        let _ = writeln!(s, "kind = {}", self.experiment.name());
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "seed = {}", self.seed);
        if let Some(o) = &self.output {
            let _ = writeln!(s, "output = {o}");
        }
        let _ = writeln!(s, "\n[frame]");
        let _ = writeln!(s, "m = {}", self.m);
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "constellation = {}", self.constellation.name());
        let _ = writeln!(s, "equalizer = {}", self.equalizer.name());
        let _ = writeln!(s, "\n[snr]");
        let _ = writeln!(s, "values = {}", list_f(&self.snr_db));
        let w = &self.waveform;
        let _ = writeln!(s, "\n[waveform]");
        let names: Vec<&str> = w.schemes.iter().map(|x| x.name()).collect();
        let _ = writeln!(s, "schemes = {}", names.join(", "));
        let _ = writeln!(s, "c1_prime = {}", w.c1_prime);
        let _ = writeln!(s, "c2 = {}", fmt_f64(w.c2));
        let _ = writeln!(s, "chirps = {}", list_u(&w.chirps));
        let _ = writeln!(s, "alpha = {}", w.alpha);
        let _ = writeln!(s, "q1 = {}", w.q1);
        let _ = writeln!(s, "fcp_len = {}", w.fcp_len);
        let _ = writeln!(s, "rcp_len = {}", w.rcp_len);
        let _ = writeln!(s, "guard_doppler = {}", w.guard_doppler);
        let _ = writeln!(s, "guard_delay = {}", w.guard_delay);
        let _ = writeln!(s, "power_ratio_db = {}", fmt_f64(w.power_ratio_db));
        let _ = writeln!(s, "\n[channel]");
        let norm = match self.channel.normalization() {
            Normalization::UnitPower => "unit_power",
            Normalization::Raw => "raw",
        };
        let _ = writeln!(s, "normalization = {norm}");
        for p in self.channel.raw_paths() {
            let _ = writeln!(
                s,
                "path = {}, {}, {}, {}",
                fmt_f64(p.gain.re),
                fmt_f64(p.gain.im),
                p.delay,
                p.doppler
            );
        }
        let r = &self.radar;
        let _ = writeln!(s, "\n[radar]");
        let _ = writeln!(s, "carrier_hz = {}", fmt_f64(r.carrier_hz));
        let _ = writeln!(s, "bandwidth_hz = {}", fmt_f64(r.bandwidth_hz));
        let _ = writeln!(s, "n_sym = {}", r.n_sym);
        let _ = writeln!(s, "speed_of_light = {}", fmt_f64(r.speed_of_light));
        let _ = writeln!(s, "targets = {}", r.targets);
        let _ = writeln!(s, "range_max = {}", fmt_f64(r.range_max));
        let _ = writeln!(s, "velocity_max = {}", fmt_f64(r.velocity_max));
        let _ = writeln!(s, "power_ratios_db = {}", list_f(&r.power_ratios_db));
        let names: Vec<&str> = r.schemes.iter().map(|x| x.name()).collect();
        let _ = writeln!(s, "schemes = {}", names.join(", "));
        let _ = writeln!(s, "map_trial = {}", r.map_trial);
        let _ = writeln!(s, "map_snr_db = {}", fmt_f64(r.map_snr_db));
        let rp = &self.rate;
        let _ = writeln!(s, "\n[rate]");
        let _ = writeln!(s, "t = {}", rp.t);
        let _ = writeln!(s, "t_cp = {}", rp.t_cp);
        let _ = writeln!(s, "phi_otfs = {}", fmt_f64(rp.phi_otfs));
        let _ = writeln!(s, "phi_ofdm = {}", fmt_f64(rp.phi_ofdm));
        let _ = writeln!(s, "theta_ofdm = {}", fmt_f64(rp.theta_ofdm));
        let _ = writeln!(s, "theta_otfs = {}", fmt_f64(rp.theta_otfs));
        let _ = writeln!(s, "theta_ocdm = {}", fmt_f64(rp.theta_ocdm));
        let _ = writeln!(s, "theta_afdm = {}", fmt_f64(rp.theta_afdm));
        s
    }
}

/// Shortest text that parses back to the same `f64`.
fn fmt_f64(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:?}")
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    match s {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s
            .parse::<f64>()
            .map_err(|_| format!("'{s}' is not a number")),
    }
}

fn split_list(s: &str) -> Vec<&str> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .collect()
}

struct Entry {
    value: String,
    line: usize,
    used: bool,
}

const SECTIONS: [&str; 7] = [
    "experiment",
    "frame",
    "snr",
    "waveform",
    "channel",
    "radar",
    "rate",
];

#[derive(Default)]
struct Parser {
    /// `section.key` -> entries in file order.
    entries: BTreeMap<String, Vec<Entry>>,
    violations: Vec<ConfigViolation>,
}

impl Parser {
    fn violation(&mut self, line: Option<usize>, field: Option<&str>, message: impl Into<String>) {
        self.violations.push(ConfigViolation {
            line,
            field: field.map(str::to_string),
            message: message.into(),
        });
    }

    fn scan(&mut self, text: &str) {
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.split(['#', ';']).next().unwrap_or("").trim();
            if t.is_empty() {
                continue;
            }
            if let Some(rest) = t.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    self.violation(Some(line), None, format!("malformed section header '{t}'"));
                    continue;
                };
                let name = name.trim();
                if SECTIONS.contains(&name) {
                    section = Some(name.to_string());
                } else {
                    self.violation(Some(line), None, format!("unknown section [{name}]"));
                    section = None;
                }
                continue;
            }
            let Some((k, v)) = t.split_once('=') else {
                self.violation(
                    Some(line),
                    None,
                    format!("expected 'key = value', found '{t}'"),
                );
                continue;
            };
            let Some(sec) = &section else {
                self.violation(
                    Some(line),
                    Some(k.trim()),
                    "statement outside a known section",
                );
                continue;
            };
            let key = format!("{sec}.{}", k.trim());
            let list = self.entries.entry(key.clone()).or_default();
            if !list.is_empty() && key != "channel.path" {
                let first = list[0].line;
                self.violation(
                    Some(line),
                    Some(&key),
                    format!("duplicate key (first set on line {first})"),
                );
                continue;
            }
            list.push(Entry {
                value: v.trim().to_string(),
                line,
                used: false,
            });
        }
    }

    /// Parse the single value of `key`, or `None` if absent or invalid
    /// (invalid values are recorded).
    fn get<T>(
        &mut self,
        key: &str,
        parse: impl Fn(&str) -> std::result::Result<T, String>,
    ) -> Option<T> {
        let (value, line) = {
            let e = self.entries.get_mut(key)?.first_mut()?;
            e.used = true;
            (e.value.clone(), e.line)
        };
        match parse(&value) {
            Ok(v) => Some(v),
            Err(msg) => {
                self.violation(Some(line), Some(key), msg);
                None
            }
        }
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.entries
            .get(key)
            .and_then(|v| v.first())
            .map(|e| e.line)
    }

    fn build(&mut self) -> ScenarioConfig {
        let d = ScenarioConfig::default();
        let uint = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| format!("'{s}' is not a non-negative integer"))
        };
        let float = |s: &str| parse_f64(s);
        let named = |s: &str| -> std::result::Result<String, String> { Ok(s.to_string()) };
        fn parse_list<T>(
            s: &str,
            f: impl Fn(&str) -> std::result::Result<T, String>,
        ) -> std::result::Result<Vec<T>, String> {
            split_list(s).into_iter().map(f).collect()
        }
        fn parse_enum<T: FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
            s.parse::<T>().map_err(|e| match e {
                Error::Parameter(m) => m,
                other => other.to_string(),
            })
        }

        let experiment = self
            .get("experiment.kind", parse_enum::<Experiment>)
            .unwrap_or(d.experiment);
        let trials = self.get("experiment.trials", uint).unwrap_or(d.trials);
        let seed = self
            .get("experiment.seed", |s| {
                s.parse::<u64>()
                    .map_err(|_| format!("'{s}' is not a u64 seed"))
            })
            .unwrap_or(d.seed);
        let output = self.get("experiment.output", named);
        let m = self.get("frame.m", uint).unwrap_or(d.m);
        let n = self.get("frame.n", uint).unwrap_or(d.n);
        let constellation = self
            .get("frame.constellation", |s| {
                s.parse::<Constellation>().map_err(|e| e.to_string())
            })
            .unwrap_or(d.constellation);
        let equalizer = self
            .get("frame.equalizer", |s| {
                s.parse::<EqualizerMode>().map_err(|e| e.to_string())
            })
            .unwrap_or(d.equalizer);
        let snr_db = self
            .get("snr.values", |s| parse_list(s, parse_f64))
            .unwrap_or(d.snr_db.clone());

        let dw = &d.waveform;
        let waveform = WaveformParams {
            schemes: self
                .get("waveform.schemes", |s| parse_list(s, parse_enum::<Scheme>))
                .unwrap_or(dw.schemes.clone()),
            c1_prime: self
                .get("waveform.c1_prime", |s| {
                    s.parse::<i64>()
                        .map_err(|_| format!("'{s}' is not an integer"))
                })
                .unwrap_or(dw.c1_prime),
            c2: self.get("waveform.c2", float).unwrap_or(dw.c2),
            chirps: self
                .get("waveform.chirps", |s| parse_list(s, uint))
                .unwrap_or(dw.chirps.clone()),
            alpha: self.get("waveform.alpha", uint).unwrap_or(dw.alpha),
            q1: self.get("waveform.q1", uint).unwrap_or(dw.q1),
            fcp_len: self.get("waveform.fcp_len", uint).unwrap_or(dw.fcp_len),
            rcp_len: self.get("waveform.rcp_len", uint).unwrap_or(dw.rcp_len),
            guard_doppler: self
                .get("waveform.guard_doppler", uint)
                .unwrap_or(dw.guard_doppler),
            guard_delay: self
                .get("waveform.guard_delay", uint)
                .unwrap_or(dw.guard_delay),
            power_ratio_db: self
                .get("waveform.power_ratio_db", float)
                .unwrap_or(dw.power_ratio_db),
        };

        let normalization = self
            .get("channel.normalization", |s| match s {
                "unit_power" => Ok(Normalization::UnitPower),
                "raw" => Ok(Normalization::Raw),
                other => Err(format!(
                    "unknown normalization '{other}', expected unit_power or raw"
                )),
            })
            .unwrap_or(Normalization::UnitPower);
        let channel = match self.entries.get_mut("channel.path") {
            None => Some(d.channel.clone()),
            Some(list) => {
                let mut paths = Vec::new();
                let mut errs = Vec::new();
                for e in list.iter_mut() {
                    e.used = true;
                    match parse_path(&e.value) {
                        Ok(p) => paths.push(p),
                        Err(msg) => errs.push((e.line, msg)),
                    }
                }
                let first = list[0].line;
                let ok = errs.is_empty();
                for (line, msg) in errs {
                    self.violation(Some(line), Some("channel.path"), msg);
                }
                if ok {
                    match ChannelSpec::new(paths, normalization) {
                        Ok(c) => Some(c),
                        Err(e) => {
                            self.violation(Some(first), Some("channel.path"), e.to_string());
                            None
                        }
                    }
                } else {
                    None
                }
            }
        };
        let channel = channel.unwrap_or_else(|| d.channel.clone());
        let channel = if self.entries.contains_key("channel.path") {
            channel
        } else {
            ChannelSpec::new(channel.raw_paths().to_vec(), normalization).expect("default channel")
        };

        let dr = &d.radar;
        let radar = RadarParams {
            carrier_hz: self.get("radar.carrier_hz", float).unwrap_or(dr.carrier_hz),
            bandwidth_hz: self
                .get("radar.bandwidth_hz", float)
                .unwrap_or(dr.bandwidth_hz),
            n_sym: self.get("radar.n_sym", uint).unwrap_or(dr.n_sym),
            speed_of_light: self
                .get("radar.speed_of_light", float)
                .unwrap_or(dr.speed_of_light),
            targets: self.get("radar.targets", uint).unwrap_or(dr.targets),
            range_max: self.get("radar.range_max", float).unwrap_or(dr.range_max),
            velocity_max: self
                .get("radar.velocity_max", float)
                .unwrap_or(dr.velocity_max),
            power_ratios_db: self
                .get("radar.power_ratios_db", |s| parse_list(s, parse_f64))
                .unwrap_or(dr.power_ratios_db.clone()),
            schemes: self
                .get("radar.schemes", |s| {
                    parse_list(s, parse_enum::<SensingScheme>)
                })
                .unwrap_or(dr.schemes.clone()),
            map_trial: self.get("radar.map_trial", uint).unwrap_or(dr.map_trial),
            map_snr_db: self.get("radar.map_snr_db", float).unwrap_or(dr.map_snr_db),
        };

        let base = RateParams::defaults(m, n, waveform.alpha, waveform.fcp_len);
        let rate = RateParams {
            t: self.get("rate.t", uint).unwrap_or(base.t),
            t_cp: self.get("rate.t_cp", uint).unwrap_or(base.t_cp),
            phi_otfs: self.get("rate.phi_otfs", float).unwrap_or(base.phi_otfs),
            phi_ofdm: self.get("rate.phi_ofdm", float).unwrap_or(base.phi_ofdm),
            theta_ofdm: self
                .get("rate.theta_ofdm", float)
                .unwrap_or(base.theta_ofdm),
            theta_otfs: self
                .get("rate.theta_otfs", float)
                .unwrap_or(base.theta_otfs),
            theta_ocdm: self
                .get("rate.theta_ocdm", float)
                .unwrap_or(base.theta_ocdm),
            theta_afdm: self
                .get("rate.theta_afdm", float)
                .unwrap_or(base.theta_afdm),
            ..base
        };

        let unknown: Vec<(usize, String)> = self
            .entries
            .iter()
            .flat_map(|(k, v)| {
                v.iter()
                    .filter(|e| !e.used)
                    .map(move |e| (e.line, k.clone()))
            })
            .collect();
        for (line, key) in unknown {
            self.violation(Some(line), Some(&key), "unknown key");
        }

        let cfg = ScenarioConfig {
            experiment,
            trials,
            seed,
            output,
            m,
            n,
            constellation,
            equalizer,
            snr_db,
            waveform,
            channel,
            radar,
            rate,
        };
        if self.violations.is_empty() {
            for mut v in cfg.check() {
                let field = v.field.clone().unwrap_or_default();
                v.line = self.line_of(&field);
                self.violations.push(v);
            }
        }
        self.violations
            .sort_by_key(|v| v.line.unwrap_or(usize::MAX));
        cfg
    }
}

fn parse_path(s: &str) -> std::result::Result<ChannelPath, String> {
    let parts = split_list(s);
    if parts.len() != 4 {
        return Err(format!(
            "expected 'gain_re, gain_im, delay, doppler', found {} fields",
            parts.len()
        ));
    }
    let re = parse_f64(parts[0])?;
    let im = parse_f64(parts[1])?;
    let delay = parts[2].parse::<usize>().map_err(|_| {
        format!(
            "delay '{}' must be a non-negative integer number of samples",
            parts[2]
        )
    })?;
    let doppler = parts[3].parse::<i64>().map_err(|_| {
        format!(
            "doppler '{}' must be an integer bin (fractional Doppler is not supported)",
            parts[3]
        )
    })?;
    Ok(ChannelPath::new(C64::new(re, im), delay, doppler))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn violations(text: &str) -> Vec<ConfigViolation> {
        match ScenarioConfig::parse(text) {
            Err(Error::Config { violations, .. }) => violations,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn defaults_round_trip() {
        let text = ScenarioConfig::default().to_canonical_string();
        let cfg = ScenarioConfig::parse(&text).unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        assert_eq!(cfg.to_canonical_string(), text);
    }

    #[test]
    fn minimal_ber_config() {
        let cfg = ScenarioConfig::parse(
            "[experiment]\nkind = ber\ntrials = 1000\n[frame]\nm = 32\nn = 32\nconstellation = qpsk\n\
             [snr]\nvalues = 0, 5, 10, 15, 20\n[waveform]\nschemes = otfs\n",
        )
        .unwrap();
        assert_eq!(cfg.experiment, Experiment::Ber);
        assert_eq!(cfg.snr_db.len(), 5);
    }

    #[test]
    fn alpha_must_divide_n() {
        let v = violations("[frame]\nn = 32\n[waveform]\nalpha = 3\n");
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field.as_deref(), Some("waveform.alpha"));
        assert_eq!(v[0].line, Some(4));
    }

    #[test]
    fn all_violations_reported_with_lines() {
        let v =
            violations("[frame]\nm = x\nbogus = 1\n[nowhere]\n[channel]\npath = 1, 0, 0.5, 0\n");
        let lines: Vec<_> = v.iter().map(|x| x.line).collect();
        assert_eq!(lines, vec![Some(2), Some(3), Some(4), Some(6)]);
    }

    #[test]
    fn fractional_doppler_rejected() {
        let v = violations("[channel]\npath = 1, 0, 0, 0.5\n");
        assert!(v[0].message.contains("fractional"));
    }

    #[test]
    fn duplicate_key_rejected() {
        let v = violations("[frame]\nm = 8\nm = 16\n");
        assert_eq!(v[0].line, Some(3));
    }

    #[test]
    fn short_prefix_rejected() {
        let v = violations("[waveform]\nschemes = otfs_ofdm\nfcp_len = 1\n");
        assert_eq!(v[0].field.as_deref(), Some("waveform.fcp_len"));
    }
}
