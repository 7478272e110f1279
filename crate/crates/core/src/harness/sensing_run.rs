//! Range / velocity RMSE sweeps over SNR.
//!
//! Every trial draws its targets first (bin-centered, unit magnitude, random
//! phase, at least two bins apart in range or Doppler) so all schemes and SNR
//! points of a trial look at the same scene. Each of the `N_sym` frames then
//! carries fresh QPSK data, and frames are scaled to unit mean sample power
//! so that the SNR means the same thing for every scheme.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use super::ber::trial_rng;
use super::config::{ScenarioConfig, SensingScheme};
use super::records::ResultRecord;
use crate::coexistence::{
    compose_scifdm_afdm, CoexScifdmAfdmConfig, GuardRadius, ScifdmAfdmLayout,
};
use crate::error::{Error, Result};
use crate::lattice::Chirp;
use crate::sensing::{
    dechirp_process, estimate_targets, sensing_metrics, simulate_echo, RadarConfig,
    RangeDopplerMap, SensingMetrics, Target,
};
use crate::transforms::{AfdmParams, TimeFrame};
use crate::waveform::{map_bits, Constellation};

/// One radar transmitter: a scheme at one chirp power ratio.
pub struct RadarLink {
    pub scheme: SensingScheme,
    /// Empty for pure FMCW, else `ratio_<dB>db`.
    pub series: String,
    layout: Option<ScifdmAfdmLayout>,
    reference: Vec<C64>,
    rate: i64,
    scale: f64,
}

impl RadarLink {
    pub fn new(cfg: &ScenarioConfig, scheme: SensingScheme, power_ratio_db: f64) -> Result<Self> {
        let (m, n) = (cfg.m, cfg.n);
        let mn = m * n;
        let w = &cfg.waveform;
        let guard = GuardRadius::new(w.guard_doppler, w.guard_delay);
        let (layout, chirp) = match scheme {
            SensingScheme::Fmcw => (None, Chirp::fmcw()),
            SensingScheme::ScifdmChirp => (
                Some(ScifdmAfdmLayout::new(&CoexScifdmAfdmConfig::fmcw(
                    m,
                    n,
                    guard,
                    power_ratio_db,
                    w.rcp_len,
                ))?),
                Chirp::fmcw(),
            ),
            SensingScheme::ScifdmAfdm => {
                let c = CoexScifdmAfdmConfig::afdm(
                    m,
                    n,
                    w.c1_prime,
                    w.chirps.clone(),
                    guard,
                    power_ratio_db,
                    w.rcp_len,
                )?;
                let first = *w.chirps.first().ok_or_else(|| {
                    Error::Configuration("SC-IFDM-AFDM sensing needs at least one chirp".into())
                })?;
                (
                    Some(ScifdmAfdmLayout::new(&c)?),
                    Chirp::afdm(AfdmParams::new(w.c1_prime, 0.0)?, first),
                )
            }
        };
        let rate = chirp.rate();
        if rate == 0 {
            return Err(Error::Configuration(
                "a chirp with c1' = 0 cannot measure range".into(),
            ));
        }
        let radar = cfg.radar_config();
        if cfg.radar.range_max >= radar.max_range(rate) {
            return Err(Error::Configuration(format!(
                "{}: range_max {} m is beyond the {:.3} m the chirp resolves",
                scheme.name(),
                cfg.radar.range_max,
                radar.max_range(rate)
            )));
        }
        let (series, scale) = match &layout {
            None => (String::new(), 1.0),
            Some(l) => {
                let amp = l.cfg.chirp_amplitude();
                let power = amp * amp * l.maps.len() as f64 + l.data_len() as f64 / mn as f64;
                (format!("ratio_{}db", power_ratio_db), 1.0 / power.sqrt())
            }
        };
        Ok(Self {
            scheme,
            series,
            layout,
            reference: chirp.samples(mn),
            rate,
            scale,
        })
    }

    pub fn rate(&self) -> i64 {
        self.rate
    }

    /// `N_sym` transmit frames, data drawn from `rng`.
    pub fn frames(&self, radar: &RadarConfig, rng: &mut ChaCha20Rng) -> Result<Vec<TimeFrame>> {
        (0..radar.n_sym)
            .map(|_| match &self.layout {
                None => TimeFrame::new(radar.m, radar.n, self.reference.clone()),
                Some(l) => {
                    let bits: Vec<u8> = (0..2 * l.data_len())
                        .map(|_| rng.random::<bool>() as u8)
                        .collect();
                    let mut f = compose_scifdm_afdm(&map_bits(&bits, Constellation::Qpsk)?, l)?;
                    f.samples_mut().iter_mut().for_each(|s| *s *= self.scale);
                    Ok(f)
                }
            })
            .collect()
    }

    /// Map and score of one trial at one SNR.
    pub fn observe(
        &self,
        radar: &RadarConfig,
        targets: &[Target],
        snr_db: f64,
        rng: &mut ChaCha20Rng,
    ) -> Result<(RangeDopplerMap, SensingMetrics)> {
        let tx = self.frames(radar, rng)?;
        let rx = simulate_echo(&tx, targets, radar, snr_db, rng)?;
        let map = dechirp_process(&rx, &self.reference, self.rate, radar)?;
        let est = estimate_targets(&map, targets.len(), radar)?;
        Ok((
            map,
            sensing_metrics(&est.targets, targets, radar, self.rate),
        ))
    }
}

/// Random scene of `count` targets within the configured span.
pub fn draw_targets(cfg: &ScenarioConfig, rng: &mut ChaCha20Rng) -> Result<Vec<Target>> {
    let radar = cfg.radar_config();
    let r_max = (cfg.radar.range_max / radar.range_resolution()).floor() as i64;
    let v_max = (cfg.radar.velocity_max / radar.velocity_resolution()).floor() as i64;
    let mut bins: Vec<(i64, i64)> = Vec::new();
    let mut attempts = 0;
    while bins.len() < cfg.radar.targets {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::Configuration(
                "cannot place the targets two bins apart".into(),
            ));
        }
        let cand = (
            rng.random_range(0..=r_max),
            rng.random_range(-v_max..=v_max),
        );
        if bins
            .iter()
            .all(|b| (b.0 - cand.0).abs().max((b.1 - cand.1).abs()) >= 2)
        {
            bins.push(cand);
        }
    }
    Ok(bins
        .into_iter()
        .map(|(r, v)| {
            let phase = rng.random::<f64>() * std::f64::consts::TAU;
            Target::on_grid(&radar, r as usize, v, C64::from_polar(1.0, phase))
        })
        .collect())
}

/// Range-Doppler map kept for inspection.
#[derive(Clone, Debug)]
pub struct MapDump {
    pub scheme: SensingScheme,
    pub series: String,
    pub snr_db: f64,
    pub trial: usize,
    pub map: RangeDopplerMap,
}

#[derive(Clone, Debug)]
pub struct SensingOutput {
    pub records: Vec<ResultRecord>,
    pub maps: Vec<MapDump>,
}

/// All links of the configuration: chirp-bearing schemes once per power
/// ratio, FMCW once.
pub fn radar_links(cfg: &ScenarioConfig) -> Result<Vec<RadarLink>> {
    let mut links = Vec::new();
    for &s in &cfg.radar.schemes {
        if s == SensingScheme::Fmcw {
            links.push(RadarLink::new(cfg, s, 0.0)?);
        } else {
            for &p in &cfg.radar.power_ratios_db {
                links.push(RadarLink::new(cfg, s, p)?);
            }
        }
    }
    Ok(links)
}

pub fn run_sensing(cfg: &ScenarioConfig) -> Result<SensingOutput> {
    let radar = cfg.radar_config();
    radar.validate()?;
    let links = radar_links(cfg)?;
    let mut records = Vec::new();
    let mut maps = Vec::new();
    for link in &links {
        let per_trial: Vec<Vec<SensingMetrics>> = (0..cfg.trials as u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(cfg.seed, t);
                let targets = draw_targets(cfg, &mut rng)?;
                cfg.snr_db
                    .iter()
                    .map(|&snr| Ok(link.observe(&radar, &targets, snr, &mut rng)?.1))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        for (i, &snr) in cfg.snr_db.iter().enumerate() {
            let mut total = SensingMetrics::default();
            for trial in &per_trial {
                total.merge(&trial[i]);
            }
            let rec = |metric: &str, value: f64| {
                ResultRecord::new(
                    "sensing",
                    link.scheme.name(),
                    &link.series,
                    snr,
                    metric,
                    value,
                    cfg.trials,
                    cfg.seed,
                )
            };
            records.push(rec("range_rmse", total.range_rmse()));
            records.push(rec("velocity_rmse", total.velocity_rmse()));
            records.push(rec("unmatched", total.unmatched as f64));
        }
        let mut rng = trial_rng(cfg.seed, cfg.radar.map_trial as u64);
        let targets = draw_targets(cfg, &mut rng)?;
        let (map, _) = link.observe(&radar, &targets, cfg.radar.map_snr_db, &mut rng)?;
        maps.push(MapDump {
            scheme: link.scheme,
            series: link.series.clone(),
            snr_db: cfg.radar.map_snr_db,
            trial: cfg.radar.map_trial,
            map,
        });
    }
    Ok(SensingOutput { records, maps })
}
