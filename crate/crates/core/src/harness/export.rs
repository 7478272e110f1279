//! Plot-ready CSV dumps: resource ownership grids and range-Doppler maps.

use std::io::Write;
use std::path::Path;

use super::config::ScenarioConfig;
use super::records::format_float;
use super::sensing_run::MapDump;
use crate::coexistence::{
    CoexOtfsOfdmConfig, CoexScifdmAfdmConfig, GuardRadius, Owner, ScifdmAfdmLayout,
};
use crate::error::{Error, Result};
use crate::lattice::tf_occupancy;

/// `(grid, row, col, owner)` rows.
pub type OccupancyRow = (&'static str, usize, usize, String);

/// Ownership of every bin:
/// - `scifdm_lattice`: SC-IFDM-AFDM lattice, rows are Doppler bins, columns delay bins;
/// - `otfs_ofdm_blocks`: time samples of the OTFS-OFDM frame, rows are blocks;
/// - `precode_tf`: time-frequency bins reachable by the precoded OTFS user.
pub fn occupancy_rows(cfg: &ScenarioConfig) -> Result<Vec<OccupancyRow>> {
    let (m, n) = (cfg.m, cfg.n);
    let w = &cfg.waveform;
    let mut rows = Vec::new();
    let guard = GuardRadius::new(w.guard_doppler, w.guard_delay);
    let chirp = CoexScifdmAfdmConfig::afdm(
        m,
        n,
        w.c1_prime,
        w.chirps.clone(),
        guard,
        w.power_ratio_db,
        w.rcp_len,
    )?;
    let layout = ScifdmAfdmLayout::new(&chirp)?;
    for (b, owner) in layout.owners.iter().enumerate() {
        rows.push(("scifdm_lattice", b / m, b % m, owner.label()));
    }
    let coex = CoexOtfsOfdmConfig::with_offset(m, n, w.alpha, w.q1, w.fcp_len)?;
    for (block, owner) in coex.block_owners().into_iter().enumerate() {
        for sample in 0..m {
            rows.push(("otfs_ofdm_blocks", block, sample, owner.label()));
        }
    }
    let mask = tf_occupancy(&coex.precode(), m, n)?;
    for sym in 0..n {
        for sc in 0..m {
            let owner = if mask.get(sym, sc) {
                Owner::Otfs
            } else {
                Owner::Ofdm
            };
            rows.push(("precode_tf", sym, sc, owner.label()));
        }
    }
    Ok(rows)
}

fn create(path: &Path) -> Result<csv::Writer<std::io::BufWriter<std::fs::File>>> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    Ok(csv::Writer::from_writer(std::io::BufWriter::new(
        std::fs::File::create(path).map_err(io)?,
    )))
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| Error::Csv(e.into()))
}

pub fn write_occupancy(rows: &[OccupancyRow], path: &Path) -> Result<()> {
    let mut w = create(path)?;
    w.write_record(["grid", "row", "col", "owner"])?;
    for (grid, row, col, owner) in rows {
        w.write_record([
            grid.to_string(),
            row.to_string(),
            col.to_string(),
            owner.clone(),
        ])?;
    }
    finish(w)
}

/// One row per map bin; Doppler bins are written signed.
pub fn write_maps(maps: &[MapDump], cfg: &ScenarioConfig, path: &Path) -> Result<()> {
    let radar = cfg.radar_config();
    let mut w = create(path)?;
    w.write_record([
        "scheme",
        "series",
        "snr_db",
        "trial",
        "range_bin",
        "doppler_bin",
        "range_m",
        "velocity_mps",
        "power",
    ])?;
    for d in maps {
        let (rb, db) = (d.map.range_bins, d.map.doppler_bins);
        for r in 0..rb {
            for k in 0..db {
                let signed = if k < db.div_ceil(2) {
                    k as i64
                } else {
                    k as i64 - db as i64
                };
                w.write_record([
                    d.scheme.name(),
                    d.series.as_str(),
                    &format_float(d.snr_db),
                    &d.trial.to_string(),
                    &r.to_string(),
                    &signed.to_string(),
                    &format_float(r as f64 * radar.range_resolution()),
                    &format_float(signed as f64 * radar.velocity_resolution()),
                    &format_float(d.map.get(r, k)),
                ])?;
            }
        }
    }
    finish(w)
}
