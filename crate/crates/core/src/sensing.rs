//! Monostatic radar on chirp-bearing frames: echo simulation, dechirp
//! range-Doppler maps, peak picking and RMSE scoring.
//!
//! Delays are whole samples (`d = round(r/Δr)`, one sample per range bin
//! since `Δr = c/(2B)`) applied cyclically, which the whole-frame prefix
//! justifies. Doppler is a per-symbol phase `e^{j2π f_D m T_sym}` with
//! `f_D = 2 v f_c / c`; intra-symbol Doppler is ignored.

use num_complex::Complex64 as C64;
use rand::Rng;
use rustfft::num_traits::Zero;

use crate::channel::{add_noise, noise_variance};
use crate::error::{Error, Result};
use crate::transforms::dft::fft_raw;
use crate::transforms::TimeFrame;

pub const SPEED_OF_LIGHT: f64 = 2.998e8;

/// Peaks must exceed the map median by this factor (20 dB).
pub const PEAK_THRESHOLD: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadarConfig {
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub m: usize,
    pub n: usize,
    /// Symbols integrated coherently in slow time.
    pub n_sym: usize,
    pub speed_of_light: f64,
}

impl RadarConfig {
    /// 77 GHz, 200 MHz, `M = N = 32`, 200 symbols.
    pub fn automotive() -> Self {
        Self {
            carrier_hz: 77e9,
            bandwidth_hz: 200e6,
            m: 32,
            n: 32,
            n_sym: 200,
            speed_of_light: SPEED_OF_LIGHT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.carrier_hz, self.bandwidth_hz, self.speed_of_light];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Parameter(
                "carrier, bandwidth and propagation speed must be positive".into(),
            ));
        }
        if self.m == 0 || self.n == 0 || self.n_sym == 0 {
            return Err(Error::Parameter(
                "M, N and the symbol count must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn mn(&self) -> usize {
        self.m * self.n
    }

    pub fn range_resolution(&self) -> f64 {
        self.speed_of_light / (2.0 * self.bandwidth_hz)
    }

    pub fn symbol_duration(&self) -> f64 {
        self.mn() as f64 / self.bandwidth_hz
    }

    pub fn velocity_resolution(&self) -> f64 {
        self.speed_of_light / (2.0 * self.carrier_hz * self.n_sym as f64 * self.symbol_duration())
    }

    /// Exclusive bound on `|v|`.
    pub fn max_velocity(&self) -> f64 {
        self.n_sym as f64 / 2.0 * self.velocity_resolution()
    }

    /// Exclusive bound on range for a chirp of the given rate.
    pub fn max_range(&self, rate: i64) -> f64 {
        self.range_bins(rate) as f64 * self.range_resolution()
    }

    pub fn range_bins(&self, rate: i64) -> usize {
        self.mn() / rate.unsigned_abs().max(1) as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Target {
    pub range: f64,
    pub velocity: f64,
    pub reflectivity: C64,
}

impl Target {
    pub fn new(range: f64, velocity: f64, reflectivity: C64) -> Self {
        Self {
            range,
            velocity,
            reflectivity,
        }
    }

    /// Bin-centered target at `(range_bin, doppler_bin)`, Doppler bins signed.
    pub fn on_grid(
        cfg: &RadarConfig,
        range_bin: usize,
        doppler_bin: i64,
        reflectivity: C64,
    ) -> Self {
        Self::new(
            range_bin as f64 * cfg.range_resolution(),
            doppler_bin as f64 * cfg.velocity_resolution(),
            reflectivity,
        )
    }

    pub fn delay_samples(&self, cfg: &RadarConfig) -> usize {
        (self.range / cfg.range_resolution()).round() as usize
    }

    pub fn doppler_hz(&self, cfg: &RadarConfig) -> f64 {
        2.0 * self.velocity * cfg.carrier_hz / cfg.speed_of_light
    }
}

fn check_targets(targets: &[Target], cfg: &RadarConfig) -> Result<()> {
    for t in targets {
        if t.range.is_nan() || t.range < 0.0 || t.delay_samples(cfg) >= cfg.mn() {
            return Err(Error::Configuration(format!(
                "target range {} m outside [0, {} m)",
                t.range,
                cfg.max_range(1)
            )));
        }
        if t.velocity.is_nan() || t.velocity.abs() >= cfg.max_velocity() {
            return Err(Error::Configuration(format!(
                "target velocity {} m/s outside (-{v}, {v}) m/s",
                t.velocity,
                v = cfg.max_velocity()
            )));
        }
    }
    Ok(())
}

/// Sum of delayed, Doppler-rotated copies of each transmitted symbol plus
/// AWGN of variance `10^{-snr/10}`.
pub fn simulate_echo<R: Rng + ?Sized>(
    tx: &[TimeFrame],
    targets: &[Target],
    cfg: &RadarConfig,
    snr_db: f64,
    rng: &mut R,
) -> Result<Vec<TimeFrame>> {
    cfg.validate()?;
    check_targets(targets, cfg)?;
    if tx.len() != cfg.n_sym {
        return Err(Error::dim("radar symbol count", cfg.n_sym, tx.len()));
    }
    let mn = cfg.mn();
    let sigma2 = noise_variance(snr_db);
    let t_sym = cfg.symbol_duration();
    let mut out = Vec::with_capacity(tx.len());
    for (sym, frame) in tx.iter().enumerate() {
        if frame.len() != mn {
            return Err(Error::dim("radar symbol", mn, frame.len()));
        }
        let s = frame.samples();
        let mut y = vec![C64::zero(); mn];
        for t in targets {
            let d = t.delay_samples(cfg);
            let turns = (t.doppler_hz(cfg) * sym as f64 * t_sym).fract();
            let g = t.reflectivity * C64::from_polar(1.0, 2.0 * std::f64::consts::PI * turns);
            for (p, v) in y.iter_mut().enumerate() {
                *v += g * s[(p + mn - d) % mn];
            }
        }
        add_noise(&mut y, sigma2, rng);
        out.push(TimeFrame::new(frame.m(), frame.n(), y)?);
    }
    Ok(out)
}

/// Power map, `range_bins x doppler_bins`, range-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RangeDopplerMap {
    pub range_bins: usize,
    pub doppler_bins: usize,
    pub power: Vec<f64>,
}

impl RangeDopplerMap {
    pub fn get(&self, range_bin: usize, doppler_bin: usize) -> f64 {
        self.power[range_bin * self.doppler_bins + doppler_bin]
    }

    pub fn argmax(&self) -> (usize, usize) {
        let i = self
            .power
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &p)| {
                if p > best.1 {
                    (i, p)
                } else {
                    best
                }
            })
            .0;
        (i / self.doppler_bins, i % self.doppler_bins)
    }

    pub fn median(&self) -> f64 {
        let mut v = self.power.clone();
        let mid = v.len() / 2;
        *v.select_nth_unstable_by(mid, f64::total_cmp).1
    }
}

/// Mix every symbol with `conj(reference)`, FFT over fast time, keep the
/// bins of the `MN/|rate|` unambiguous delays, FFT over slow time.
pub fn dechirp_process(
    rx: &[TimeFrame],
    reference: &[C64],
    rate: i64,
    cfg: &RadarConfig,
) -> Result<RangeDopplerMap> {
    cfg.validate()?;
    let mn = cfg.mn();
    if reference.len() != mn {
        return Err(Error::dim("reference chirp", mn, reference.len()));
    }
    if rate == 0 || !mn.is_multiple_of(rate.unsigned_abs() as usize) {
        return Err(Error::Parameter(format!(
            "chirp rate {rate} cannot resolve range over {mn} samples"
        )));
    }
    if rx.len() != cfg.n_sym {
        return Err(Error::dim("radar symbol count", cfg.n_sym, rx.len()));
    }
    let bins = cfg.range_bins(rate);
    let fast_bin = |d: usize| (-(rate as i128) * d as i128).rem_euclid(mn as i128) as usize;
    let mut cube = vec![C64::zero(); bins * cfg.n_sym];
    let mut buf = vec![C64::zero(); mn];
    for (sym, frame) in rx.iter().enumerate() {
        if frame.len() != mn {
            return Err(Error::dim("radar symbol", mn, frame.len()));
        }
        for ((b, y), r) in buf.iter_mut().zip(frame.samples()).zip(reference) {
            *b = y * r.conj();
        }
        fft_raw(&mut buf);
        for d in 0..bins {
            cube[d * cfg.n_sym + sym] = buf[fast_bin(d)];
        }
    }
    let mut power = Vec::with_capacity(cube.len());
    for row in cube.chunks_mut(cfg.n_sym) {
        fft_raw(row);
        power.extend(row.iter().map(|v| v.norm_sqr()));
    }
    Ok(RangeDopplerMap {
        range_bins: bins,
        doppler_bins: cfg.n_sym,
        power,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub range_bin: usize,
    pub doppler_bin: usize,
    pub range: f64,
    pub velocity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Estimates {
    pub targets: Vec<Estimate>,
    /// Fewer than the requested number of peaks cleared the threshold.
    pub short: bool,
}

/// Greedy peak picking: take the strongest bin, blank its ±1 neighbourhood
/// (cyclically), repeat. Peaks must exceed `PEAK_THRESHOLD` times the map
/// median.
pub fn estimate_targets(map: &RangeDopplerMap, k: usize, cfg: &RadarConfig) -> Result<Estimates> {
    if k == 0 {
        return Err(Error::Parameter(
            "number of targets to estimate must be at least 1".into(),
        ));
    }
    let max = map.power.iter().copied().fold(0.0, f64::max);
    let threshold = (map.median() * PEAK_THRESHOLD).max(max * 1e-12);
    let mut order: Vec<usize> = (0..map.power.len())
        .filter(|&i| map.power[i] > threshold)
        .collect();
    order.sort_by(|&a, &b| map.power[b].total_cmp(&map.power[a]).then(a.cmp(&b)));
    let (rb, db) = (map.range_bins, map.doppler_bins);
    let mut blocked = vec![false; map.power.len()];
    let mut targets = Vec::new();
    for i in order {
        if targets.len() == k {
            break;
        }
        if blocked[i] {
            continue;
        }
        let (r, d) = (i / db, i % db);
        for dr in [rb - 1, 0, 1] {
            for dd in [db - 1, 0, 1] {
                blocked[((r + dr) % rb) * db + (d + dd) % db] = true;
            }
        }
        let signed = if d < db.div_ceil(2) {
            d as f64
        } else {
            d as f64 - db as f64
        };
        targets.push(Estimate {
            range_bin: r,
            doppler_bin: d,
            range: r as f64 * cfg.range_resolution(),
            velocity: signed * cfg.velocity_resolution(),
        });
    }
    let short = targets.len() < k;
    Ok(Estimates { targets, short })
}

/// Squared-error sums; combine across trials with [`SensingMetrics::merge`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SensingMetrics {
    pub range_sq: f64,
    pub velocity_sq: f64,
    pub count: usize,
    /// Truth targets left without an estimate (scored at maximum error).
    pub unmatched: usize,
}

impl SensingMetrics {
    pub fn merge(&mut self, other: &SensingMetrics) {
        self.range_sq += other.range_sq;
        self.velocity_sq += other.velocity_sq;
        self.count += other.count;
        self.unmatched += other.unmatched;
    }

    pub fn range_rmse(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.range_sq / self.count as f64).sqrt()
        }
    }

    pub fn velocity_rmse(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.velocity_sq / self.count as f64).sqrt()
        }
    }
}

/// Greedy nearest-neighbour matching in `(range/Δr, velocity/Δv)` space.
/// Unmatched truth targets contribute the maximum range and velocity error.
pub fn sensing_metrics(
    estimates: &[Estimate],
    truth: &[Target],
    cfg: &RadarConfig,
    rate: i64,
) -> SensingMetrics {
    let (dr, dv) = (cfg.range_resolution(), cfg.velocity_resolution());
    let mut pairs = Vec::new();
    for (ti, t) in truth.iter().enumerate() {
        for (ei, e) in estimates.iter().enumerate() {
            let d = ((t.range - e.range) / dr).hypot((t.velocity - e.velocity) / dv);
            pairs.push((d, ti, ei));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut t_used = vec![false; truth.len()];
    let mut e_used = vec![false; estimates.len()];
    let mut m = SensingMetrics {
        count: truth.len(),
        ..Default::default()
    };
    for (_, ti, ei) in pairs {
        if t_used[ti] || e_used[ei] {
            continue;
        }
        t_used[ti] = true;
        e_used[ei] = true;
        m.range_sq += (truth[ti].range - estimates[ei].range).powi(2);
        m.velocity_sq += (truth[ti].velocity - estimates[ei].velocity).powi(2);
    }
    for used in t_used {
        if !used {
            m.unmatched += 1;
            m.range_sq += cfg.max_range(rate).powi(2);
            m.velocity_sq += (2.0 * cfg.max_velocity()).powi(2);
        }
    }
    m
}
