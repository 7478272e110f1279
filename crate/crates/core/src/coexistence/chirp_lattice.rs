//! Sensing chirps embedded in an SC-IFDM data lattice.
//!
//! Each chirp occupies its sparse support (one bin per delay column). A
//! guard box around every support bin is left empty so that an integer
//! delay-Doppler path, which moves lattice content by `(k_r, l_r)`, cannot
//! push data onto chirp bins or chirp energy onto data bins. The frame
//! carries one whole-frame cyclic prefix.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::Owner;
use crate::channel::{propagate, ChannelSpec};
use crate::error::{Error, Result};
use crate::lattice::{accumulate_chirp, chirp_family_maps, ChirpIndexMap, ChirpKind};
use crate::receivers::{Equalizer, EqualizerConfig};
use crate::transforms::{
    sc_ifdm_demodulate, sc_ifdm_modulate, AfdmParams, LatticeGrid, Prefix, PrefixKind, TimeFrame,
};

/// Half-widths of the guard box in Doppler and delay bins.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GuardRadius {
    pub doppler: usize,
    pub delay: usize,
}

impl GuardRadius {
    pub fn new(doppler: usize, delay: usize) -> Self {
        Self { doppler, delay }
    }

    /// Smallest radius covering every path of `spec`.
    pub fn for_channel(spec: &ChannelSpec) -> Self {
        Self {
            doppler: spec
                .raw_paths()
                .iter()
                .map(|p| p.doppler.unsigned_abs() as usize)
                .max()
                .unwrap_or(0),
            delay: spec.max_delay(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoexScifdmAfdmConfig {
    pub m: usize,
    pub n: usize,
    /// `Fmcw` gives the SC-IFDM-Chirp scheme, `Afdm` the SC-IFDM-AFDM one.
    pub chirp: ChirpKind,
    /// Chirp indices (ignored beyond the first entry for FMCW).
    pub chirps: Vec<usize>,
    pub guard: GuardRadius,
    /// Chirp-bin to data-bin power ratio, in dB.
    pub power_ratio_db: f64,
    pub rcp_len: usize,
}

impl CoexScifdmAfdmConfig {
    pub fn afdm(
        m: usize,
        n: usize,
        c1_prime: i64,
        chirps: Vec<usize>,
        guard: GuardRadius,
        power_ratio_db: f64,
        rcp_len: usize,
    ) -> Result<Self> {
        Ok(Self {
            m,
            n,
            chirp: ChirpKind::Afdm(AfdmParams::new(c1_prime, 0.0)?),
            chirps,
            guard,
            power_ratio_db,
            rcp_len,
        })
    }

    pub fn fmcw(
        m: usize,
        n: usize,
        guard: GuardRadius,
        power_ratio_db: f64,
        rcp_len: usize,
    ) -> Self {
        Self {
            m,
            n,
            chirp: ChirpKind::Fmcw,
            chirps: vec![0],
            guard,
            power_ratio_db,
            rcp_len,
        }
    }

    pub fn prefix(&self) -> Prefix {
        Prefix::new(PrefixKind::Rcp, self.rcp_len)
    }

    /// Time-domain chirp amplitude: a support bin then has power
    /// `10^{ρ_dB/10}` against unit-power data bins.
    pub fn chirp_amplitude(&self) -> f64 {
        (10f64.powf(self.power_ratio_db / 10.0) / self.n as f64).sqrt()
    }
}

/// Bin ownership and the ordered data-bin list of one configuration.
#[derive(Clone, Debug)]
pub struct ScifdmAfdmLayout {
    pub cfg: CoexScifdmAfdmConfig,
    pub maps: Vec<ChirpIndexMap>,
    /// Delay-major owner of every lattice bin.
    pub owners: Vec<Owner>,
    pub data_bins: Vec<usize>,
    pub guard_bins: Vec<usize>,
}

impl ScifdmAfdmLayout {
    pub fn new(cfg: &CoexScifdmAfdmConfig) -> Result<Self> {
        let (m, n) = (cfg.m, cfg.n);
        if m == 0 || n == 0 {
            return Err(Error::Parameter(format!(
                "grid dimensions must be positive (M={m}, N={n})"
            )));
        }
        if !cfg.power_ratio_db.is_finite() {
            return Err(Error::Parameter("chirp power ratio must be finite".into()));
        }
        let indices: &[usize] = match cfg.chirp {
            ChirpKind::Fmcw => &cfg.chirps[..cfg.chirps.len().min(1)],
            _ => &cfg.chirps,
        };
        let maps = chirp_family_maps(cfg.chirp, indices, m, n)?;
        let mut owners = vec![Owner::Data; m * n];
        for (c, map) in maps.iter().enumerate() {
            for &(l, k) in &map.entries {
                if owners[l + m * k] != Owner::Data {
                    return Err(Error::Collision { k, l });
                }
                owners[l + m * k] = Owner::Chirp(c);
            }
        }
        let (gk, gl) = (cfg.guard.doppler as i64, cfg.guard.delay as i64);
        for map in &maps {
            for &(l, k) in &map.entries {
                for dk in -gk..=gk {
                    for dl in -gl..=gl {
                        let kk = (k as i64 + dk).rem_euclid(n as i64) as usize;
                        let ll = (l as i64 + dl).rem_euclid(m as i64) as usize;
                        if owners[ll + m * kk] == Owner::Data {
                            owners[ll + m * kk] = Owner::Guard;
                        }
                    }
                }
            }
        }
        let data_bins = (0..m * n).filter(|&b| owners[b] == Owner::Data).collect();
        let guard_bins = (0..m * n).filter(|&b| owners[b] == Owner::Guard).collect();
        Ok(Self {
            cfg: cfg.clone(),
            maps,
            owners,
            data_bins,
            guard_bins,
        })
    }

    pub fn data_len(&self) -> usize {
        self.data_bins.len()
    }

    /// Lattice holding only the chirps.
    pub fn chirp_grid(&self) -> LatticeGrid {
        let mut grid = LatticeGrid::zeros(self.cfg.m, self.cfg.n);
        let amp = C64::new(self.cfg.chirp_amplitude(), 0.0);
        for map in &self.maps {
            accumulate_chirp(&mut grid, map, amp);
        }
        grid
    }
}

/// Data on the data bins (in bin order), chirps on their supports, guards
/// empty, whole-frame prefix.
pub fn compose_scifdm_afdm(data: &[C64], layout: &ScifdmAfdmLayout) -> Result<TimeFrame> {
    if data.len() != layout.data_len() {
        return Err(Error::dim(
            "SC-IFDM data payload",
            layout.data_len(),
            data.len(),
        ));
    }
    let mut grid = layout.chirp_grid();
    let slots = grid.as_mut_slice();
    for (&b, x) in layout.data_bins.iter().zip(data) {
        slots[b] = *x;
    }
    Ok(sc_ifdm_modulate(&grid).with_prefix(layout.cfg.prefix()))
}

#[derive(Clone, Debug)]
pub struct ScifdmAfdmRx {
    /// Received SC-IFDM lattice before any processing.
    pub lattice: LatticeGrid,
    /// Equalized data symbols in data-bin order.
    pub data: Vec<C64>,
    /// Raw received values on each chirp's support, ordered by delay.
    pub chirp_bins: Vec<Vec<C64>>,
}

/// Receiver prepared for one channel and noise level. The known chirp
/// contribution is removed before the data bins are equalized; the
/// equalizer observes data and guard bins.
#[derive(Clone, Debug)]
pub struct ScifdmAfdmReceiver {
    layout: ScifdmAfdmLayout,
    chirp_rx: Vec<C64>,
    rows: Vec<usize>,
    equalizer: Option<Equalizer>,
}

impl ScifdmAfdmReceiver {
    pub fn new(layout: &ScifdmAfdmLayout, spec: &ChannelSpec, eq: EqualizerConfig) -> Result<Self> {
        let (m, n) = (layout.cfg.m, layout.cfg.n);
        let prefix = layout.cfg.prefix();
        let through = |grid: &LatticeGrid| -> Result<Vec<C64>> {
            let rx = propagate(&sc_ifdm_modulate(grid), spec, prefix)?;
            Ok(sc_ifdm_demodulate(rx.samples(), m, n)?.into_vec())
        };
        let chirp_rx = through(&layout.chirp_grid())?;
        let mut rows: Vec<usize> = layout
            .data_bins
            .iter()
            .chain(&layout.guard_bins)
            .copied()
            .collect();
        rows.sort_unstable();
        let equalizer = if layout.data_bins.is_empty() {
            None
        } else {
            let mut h = DMatrix::zeros(rows.len(), layout.data_len());
            let mut unit = LatticeGrid::zeros(m, n);
            for (j, &b) in layout.data_bins.iter().enumerate() {
                unit.as_mut_slice()[b] = C64::new(1.0, 0.0);
                let col = through(&unit)?;
                unit.as_mut_slice()[b] = C64::new(0.0, 0.0);
                for (i, &r) in rows.iter().enumerate() {
                    h[(i, j)] = col[r];
                }
            }
            Some(Equalizer::new(&h, eq)?)
        };
        Ok(Self {
            layout: layout.clone(),
            chirp_rx,
            rows,
            equalizer,
        })
    }

    pub fn layout(&self) -> &ScifdmAfdmLayout {
        &self.layout
    }

    pub fn receive(&self, rx: &TimeFrame) -> Result<ScifdmAfdmRx> {
        let (m, n) = (self.layout.cfg.m, self.layout.cfg.n);
        if rx.m() != m || rx.n() != n {
            return Err(Error::dim("SC-IFDM frame", m * n, rx.len()));
        }
        let lattice = sc_ifdm_demodulate(rx.samples(), m, n)?;
        let chirp_bins = self
            .layout
            .maps
            .iter()
            .map(|map| {
                map.entries
                    .iter()
                    .map(|&(l, k)| lattice.get(k, l))
                    .collect()
            })
            .collect();
        let data = match &self.equalizer {
            Some(eq) => {
                let y: Vec<C64> = self
                    .rows
                    .iter()
                    .map(|&r| lattice.as_slice()[r] - self.chirp_rx[r])
                    .collect();
                eq.apply(&y)?
            }
            None => Vec::new(),
        };
        Ok(ScifdmAfdmRx {
            lattice,
            data,
            chirp_bins,
        })
    }
}

/// One-shot form of [`ScifdmAfdmReceiver`].
pub fn receive_scifdm_afdm(
    rx: &TimeFrame,
    layout: &ScifdmAfdmLayout,
    spec: &ChannelSpec,
    eq: EqualizerConfig,
) -> Result<ScifdmAfdmRx> {
    ScifdmAfdmReceiver::new(layout, spec, eq)?.receive(rx)
}
