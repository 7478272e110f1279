//! Bit-error-rate sweeps.
//!
//! The channel is fixed for the whole run. Trial `t` owns the ChaCha20
//! stream `t` of the base seed: payload bits are drawn first, then the noise
//! of each SNR point in order. Schemes with equal payload sizes therefore see
//! the same bits and the same noise, trial by trial. Trials run in parallel
//! and are merged in index order, so results do not depend on the thread
//! count.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use super::config::{ScenarioConfig, Scheme};
use super::records::ResultRecord;
use crate::channel::{noise_variance, observe, payload_channel, propagate, transmit, ChannelSpec};
use crate::coexistence::{
    compose_otfs_ofdm, compose_scifdm_afdm, ofdm_branch_response, receive_ofdm_branch,
    CoexOtfsOfdmConfig, CoexScifdmAfdmConfig, GuardRadius, OfdmResponse, OtfsBranchReceiver,
    ScifdmAfdmLayout, ScifdmAfdmReceiver,
};
use crate::error::{Error, Result};
use crate::receivers::{Equalizer, EqualizerConfig, EqualizerMode};
use crate::transforms::{dzt, idzt, AfdmParams, LatticeGrid, Prefix, PrefixKind, TimeFrame};
use crate::waveform::{demap_symbols, map_bits, ChirpSet, Constellation, Modem, WaveformKind};

/// Per-trial generator: stream `trial` of `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Sent and detected bits of one series in one trial at one SNR.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesBits {
    pub series: &'static str,
    pub sent: Vec<u8>,
    pub detected: Vec<u8>,
}

impl SeriesBits {
    pub fn errors(&self) -> usize {
        self.sent
            .iter()
            .zip(&self.detected)
            .filter(|(a, b)| a != b)
            .count()
    }
}

enum Kind {
    Modem {
        modem: Modem,
        spec: ChannelSpec,
        prefix: Prefix,
        h: DMatrix<C64>,
    },
    /// OTFS through the IDZT / DZT pair.
    Direct {
        spec: ChannelSpec,
        prefix: Prefix,
        h: DMatrix<C64>,
    },
    Coex {
        cfg: CoexOtfsOfdmConfig,
        spec: ChannelSpec,
        ofdm_spec: ChannelSpec,
        response: OfdmResponse,
    },
    Chirp {
        layout: ScifdmAfdmLayout,
        spec: ChannelSpec,
    },
}

/// Receiver state for one SNR point.
pub enum PreparedRx {
    Linear(Equalizer),
    Coex(Box<OtfsBranchReceiver>, EqualizerConfig),
    Chirp(Box<ScifdmAfdmReceiver>),
}

/// One scheme bound to a frame size, constellation and channel.
pub struct BerLink {
    scheme: Scheme,
    m: usize,
    n: usize,
    constellation: Constellation,
    equalizer: EqualizerMode,
    kind: Kind,
}

fn unit_channel(
    len: usize,
    mn: usize,
    mut column: impl FnMut(&[C64]) -> Result<Vec<C64>>,
) -> Result<DMatrix<C64>> {
    let mut h = DMatrix::zeros(mn, len);
    let mut unit = vec![C64::new(0.0, 0.0); len];
    for j in 0..len {
        unit[j] = C64::new(1.0, 0.0);
        h.set_column(j, &DVector::from_vec(column(&unit)?));
        unit[j] = C64::new(0.0, 0.0);
    }
    Ok(h)
}

impl BerLink {
    pub fn new(cfg: &ScenarioConfig, scheme: Scheme) -> Result<Self> {
        let (m, n) = (cfg.m, cfg.n);
        let w = &cfg.waveform;
        let spec = cfg.channel.clone();
        let rcp = Prefix::new(PrefixKind::Rcp, w.rcp_len);
        let fcp = Prefix::new(PrefixKind::Fcp, w.fcp_len);
        let modem = |kind: WaveformKind, spec: ChannelSpec, prefix: Prefix| -> Result<Kind> {
            let modem = Modem::new(&kind, m, n)?;
            let h = payload_channel(&modem, &spec, prefix)?;
            Ok(Kind::Modem {
                modem,
                spec,
                prefix,
                h,
            })
        };
        let kind = match scheme {
            Scheme::Ofdm => modem(WaveformKind::Ofdm, spec.without_doppler(), fcp)?,
            Scheme::ScIfdm => modem(WaveformKind::ScIfdm, spec, rcp)?,
            Scheme::Otfs => modem(WaveformKind::Otfs, spec, rcp)?,
            Scheme::OtfsFcp => modem(WaveformKind::Otfs, spec, fcp)?,
            Scheme::Ocdm => modem(WaveformKind::Ocdm(ChirpSet::All), spec, rcp)?,
            Scheme::Afdm => modem(
                WaveformKind::Afdm(AfdmParams::new(w.c1_prime, w.c2)?, ChirpSet::All),
                spec,
                rcp,
            )?,
            Scheme::OtfsDirect => {
                let h = unit_channel(m * n, m * n, |x| {
                    let tx = idzt(&LatticeGrid::from_vec(m, n, x.to_vec())?);
                    Ok(dzt(propagate(&tx, &spec, rcp)?.samples(), m, n)?.into_vec())
                })?;
                Kind::Direct {
                    spec,
                    prefix: rcp,
                    h,
                }
            }
            Scheme::OtfsOfdm => {
                let c = CoexOtfsOfdmConfig::with_offset(m, n, w.alpha, w.q1, w.fcp_len)?;
                let ofdm_spec = spec.without_doppler();
                let response = ofdm_branch_response(&c, &ofdm_spec)?;
                Kind::Coex {
                    cfg: c,
                    spec,
                    ofdm_spec,
                    response,
                }
            }
            Scheme::ScifdmAfdm | Scheme::ScifdmChirp => {
                let guard = GuardRadius::new(w.guard_doppler, w.guard_delay);
                let c = if scheme == Scheme::ScifdmAfdm {
                    CoexScifdmAfdmConfig::afdm(
                        m,
                        n,
                        w.c1_prime,
                        w.chirps.clone(),
                        guard,
                        w.power_ratio_db,
                        w.rcp_len,
                    )?
                } else {
                    CoexScifdmAfdmConfig::fmcw(m, n, guard, w.power_ratio_db, w.rcp_len)
                };
                let layout = ScifdmAfdmLayout::new(&c)?;
                if layout.data_len() == 0 {
                    return Err(Error::Configuration(
                        "chirps and guards leave no data bins".into(),
                    ));
                }
                Kind::Chirp { layout, spec }
            }
        };
        Ok(Self {
            scheme,
            m,
            n,
            constellation: cfg.constellation,
            equalizer: cfg.equalizer,
            kind,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Payload symbols per series, in the order the bits are drawn.
    fn symbol_counts(&self) -> Vec<(&'static str, usize)> {
        match &self.kind {
            Kind::Modem { modem, .. } => vec![("", modem.payload_len())],
            Kind::Direct { .. } => vec![("", self.m * self.n)],
            Kind::Coex { cfg, .. } => vec![("otfs", cfg.otfs_len()), ("ofdm", cfg.ofdm_len())],
            Kind::Chirp { layout, .. } => vec![("", layout.data_len())],
        }
    }

    /// Series names in output order.
    pub fn series(&self) -> Vec<&'static str> {
        match &self.kind {
            Kind::Coex { .. } => vec!["otfs", "ofdm", "combined"],
            _ => vec![""],
        }
    }

    fn eq_config(&self, snr_db: f64) -> EqualizerConfig {
        match self.equalizer {
            EqualizerMode::Zf => EqualizerConfig::zf(),
            EqualizerMode::Mmse => EqualizerConfig::mmse(noise_variance(snr_db)),
        }
    }

    pub fn prepare(&self, snr_db: f64) -> Result<PreparedRx> {
        let eq = self.eq_config(snr_db);
        Ok(match &self.kind {
            Kind::Modem { h, .. } | Kind::Direct { h, .. } => {
                PreparedRx::Linear(Equalizer::new(h, eq)?)
            }
            Kind::Coex { cfg, spec, .. } => {
                PreparedRx::Coex(Box::new(OtfsBranchReceiver::new(cfg, spec, eq)?), eq)
            }
            Kind::Chirp { layout, spec } => {
                PreparedRx::Chirp(Box::new(ScifdmAfdmReceiver::new(layout, spec, eq)?))
            }
        })
    }

    fn detect(&self, x: &[C64]) -> Vec<u8> {
        demap_symbols(x, self.constellation)
    }

    /// Bits of one trial at every prepared SNR point: `[snr][series]`.
    pub fn run_trial(
        &self,
        snr_db: &[f64],
        prepared: &[PreparedRx],
        seed: u64,
        trial: u64,
    ) -> Result<Vec<Vec<SeriesBits>>> {
        if snr_db.len() != prepared.len() {
            return Err(Error::dim(
                "prepared receivers",
                snr_db.len(),
                prepared.len(),
            ));
        }
        let mut rng = trial_rng(seed, trial);
        let bps = self.constellation.bits_per_symbol();
        let bits: Vec<Vec<u8>> = self
            .symbol_counts()
            .iter()
            .map(|&(_, count)| {
                (0..count * bps)
                    .map(|_| rng.random::<bool>() as u8)
                    .collect()
            })
            .collect();
        let symbols: Vec<Vec<C64>> = bits
            .iter()
            .map(|b| map_bits(b, self.constellation))
            .collect::<Result<_>>()?;
        let mut out = Vec::with_capacity(snr_db.len());
        for (&snr, rx) in snr_db.iter().zip(prepared) {
            out.push(self.one_snr(&bits, &symbols, snr, rx, &mut rng)?);
        }
        Ok(out)
    }

    fn one_snr(
        &self,
        bits: &[Vec<u8>],
        symbols: &[Vec<C64>],
        snr: f64,
        rx: &PreparedRx,
        rng: &mut ChaCha20Rng,
    ) -> Result<Vec<SeriesBits>> {
        let single = |detected: Vec<u8>| {
            vec![SeriesBits {
                series: "",
                sent: bits[0].clone(),
                detected,
            }]
        };
        match (&self.kind, rx) {
            (
                Kind::Modem {
                    modem,
                    spec,
                    prefix,
                    ..
                },
                PreparedRx::Linear(eq),
            ) => {
                let tx = modem.modulate(&symbols[0])?;
                let r = transmit(&tx, spec, snr, *prefix, rng)?;
                let x = eq.apply(&observe(modem, r.samples())?)?;
                Ok(single(self.detect(&x)))
            }
            (Kind::Direct { spec, prefix, .. }, PreparedRx::Linear(eq)) => {
                let tx = idzt(&LatticeGrid::from_vec(self.m, self.n, symbols[0].clone())?);
                let r = transmit(&tx, spec, snr, *prefix, rng)?;
                let x = eq.apply(dzt(r.samples(), self.m, self.n)?.as_slice())?;
                Ok(single(self.detect(&x)))
            }
            (
                Kind::Coex {
                    cfg,
                    spec,
                    ofdm_spec,
                    response,
                },
                PreparedRx::Coex(otfs_rx, eq),
            ) => {
                let zeros_otfs = vec![C64::new(0.0, 0.0); cfg.otfs_len()];
                let zeros_ofdm = vec![C64::new(0.0, 0.0); cfg.ofdm_len()];
                let a = propagate(
                    &compose_otfs_ofdm(&symbols[0], &zeros_ofdm, cfg)?,
                    spec,
                    cfg.prefix(),
                )?;
                let b = propagate(
                    &compose_otfs_ofdm(&zeros_otfs, &symbols[1], cfg)?,
                    ofdm_spec,
                    cfg.prefix(),
                )?;
                let mut sum: Vec<C64> = a
                    .samples()
                    .iter()
                    .zip(b.samples())
                    .map(|(x, y)| x + y)
                    .collect();
                crate::channel::add_noise(&mut sum, noise_variance(snr), rng);
                let r = TimeFrame::new(cfg.m, cfg.n, sum)?;
                let otfs = otfs_rx.receive(&r)?;
                let ofdm = receive_ofdm_branch(&r, cfg, response, *eq)?;
                let d_otfs = self.detect(&otfs.symbols);
                let d_ofdm = self.detect(&ofdm.symbols);
                let combined = SeriesBits {
                    series: "combined",
                    sent: [bits[0].as_slice(), &bits[1]].concat(),
                    detected: [d_otfs.as_slice(), &d_ofdm].concat(),
                };
                Ok(vec![
                    SeriesBits {
                        series: "otfs",
                        sent: bits[0].clone(),
                        detected: d_otfs,
                    },
                    SeriesBits {
                        series: "ofdm",
                        sent: bits[1].clone(),
                        detected: d_ofdm,
                    },
                    combined,
                ])
            }
            (Kind::Chirp { layout, spec }, PreparedRx::Chirp(recv)) => {
                let tx = compose_scifdm_afdm(&symbols[0], layout)?;
                let r = transmit(&tx, spec, snr, layout.cfg.prefix(), rng)?;
                Ok(single(self.detect(&recv.receive(&r)?.data)))
            }
            _ => Err(Error::Parameter(
                "receiver prepared for a different scheme".into(),
            )),
        }
    }
}

/// Error counts of one scheme: `[snr][series] -> (errors, bits)`.
pub type ErrorCounts = Vec<Vec<(u64, u64)>>;

/// Accumulated error counts for every trial of one scheme.
pub fn count_errors(
    link: &BerLink,
    snr_db: &[f64],
    trials: usize,
    seed: u64,
) -> Result<ErrorCounts> {
    let prepared: Vec<PreparedRx> = snr_db
        .par_iter()
        .map(|&s| link.prepare(s))
        .collect::<Result<_>>()?;
    let per_trial: Vec<Vec<Vec<(u64, u64)>>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let out = link.run_trial(snr_db, &prepared, seed, t)?;
            Ok(out
                .iter()
                .map(|series| {
                    series
                        .iter()
                        .map(|s| (s.errors() as u64, s.sent.len() as u64))
                        .collect()
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let width = link.series().len();
    let mut total = vec![vec![(0u64, 0u64); width]; snr_db.len()];
    for trial in per_trial {
        for (acc, snr) in total.iter_mut().zip(trial) {
            for (a, (e, b)) in acc.iter_mut().zip(snr) {
                a.0 += e;
                a.1 += b;
            }
        }
    }
    Ok(total)
}

/// Every configured scheme at every SNR point. Each (scheme, series, SNR)
/// yields `ber`, `bit_errors` and `bits` rows.
pub fn run_ber(cfg: &ScenarioConfig) -> Result<Vec<ResultRecord>> {
    let links: Vec<BerLink> = cfg
        .waveform
        .schemes
        .par_iter()
        .map(|&s| BerLink::new(cfg, s))
        .collect::<Result<_>>()?;
    let mut records = Vec::new();
    for link in &links {
        let counts = count_errors(link, &cfg.snr_db, cfg.trials, cfg.seed)?;
        for (snr, row) in cfg.snr_db.iter().zip(&counts) {
            for (series, &(errors, bits)) in link.series().iter().zip(row) {
                let rec = |metric: &str, value: f64| {
                    ResultRecord::new(
                        "ber",
                        link.scheme().name(),
                        series,
                        *snr,
                        metric,
                        value,
                        cfg.trials,
                        cfg.seed,
                    )
                };
                records.push(rec("ber", errors as f64 / bits.max(1) as f64));
                records.push(rec("bit_errors", errors as f64));
                records.push(rec("bits", bits as f64));
            }
        }
    }
    Ok(records)
}
