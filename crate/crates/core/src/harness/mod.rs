//! Scenario files, Monte-Carlo drivers and CSV output.

pub mod ber;
pub mod config;
pub mod export;
pub mod rate;
pub mod records;
pub mod sensing_run;
pub mod verify;

pub use ber::{count_errors, run_ber, trial_rng, BerLink, SeriesBits};
pub use config::{
    Experiment, RadarParams, RateParams, ScenarioConfig, Scheme, SensingScheme, WaveformParams,
};
pub use export::{occupancy_rows, write_maps, write_occupancy};
pub use rate::{rate_curves, RateScheme};
pub use records::{emit_csv, read_csv, to_csv_string, ResultRecord};
pub use sensing_run::{draw_targets, run_sensing, MapDump, RadarLink, SensingOutput};
pub use verify::{run_verify, CheckResult};

use crate::error::Result;

/// Linear SNR of each dB point.
pub fn gamma_grid(snr_db: &[f64]) -> Vec<f64> {
    snr_db.iter().map(|s| 10f64.powf(s / 10.0)).collect()
}

/// Rate curves as records, one per scheme and SNR point.
pub fn run_rate(cfg: &ScenarioConfig) -> Result<Vec<ResultRecord>> {
    let gamma = gamma_grid(&cfg.snr_db);
    let mut out = Vec::new();
    for (scheme, curve) in rate_curves(&cfg.rate, &gamma) {
        for (snr, v) in cfg.snr_db.iter().zip(curve) {
            out.push(ResultRecord::new(
                "rate",
                scheme.name(),
                "",
                *snr,
                "rate_bps_hz",
                v,
                0,
                cfg.seed,
            ));
        }
    }
    Ok(out)
}

/// Run `f` on a dedicated pool of `threads` workers, or on the global pool.
/// Results of the drivers do not depend on the choice.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| {
                    crate::Error::Parameter(format!("cannot start {t} worker threads: {e}"))
                })?;
            Ok(pool.install(f))
        }
    }
}
