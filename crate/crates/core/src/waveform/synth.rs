//! Mother-path and reference-path generation for each waveform kind.
//!
//! Payload layout per kind:
//! - `ScIfdm`, `Otfs`: `MN` symbols in delay-major lattice order.
//! - `Ofdm`: `N` OFDM symbols of `M` subcarriers, symbol after symbol. Each
//!   symbol is the one-block mother frame (`M = 1`, `N = M`).
//! - `Fmcw`: one complex amplitude.
//! - `Ocdm`, `Afdm`: one symbol per active chirp, in chirp-index order.
//!   A chirp carrying `x` contributes `x / sqrt(MN)` per sample.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lattice::{
    accumulate_chirp, chirp_family_maps, otfs_phase_apply, project_chirp, Chirp, ChirpIndexMap,
    ChirpKind,
};
use crate::transforms::dft::cis_ratio;
use crate::transforms::{
    daft_apply, dfnt_apply, sc_ifdm_demodulate, sc_ifdm_modulate, AfdmParams, Direction,
    LatticeGrid, TimeFrame,
};

/// Active chirp indices of a multi-chirp frame.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum ChirpSet {
    #[default]
    All,
    Only(Vec<usize>),
}

impl ChirpSet {
    pub fn indices(&self, mn: usize) -> Vec<usize> {
        match self {
            ChirpSet::All => (0..mn).collect(),
            ChirpSet::Only(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum WaveformKind {
    Ofdm,
    ScIfdm,
    Otfs,
    Fmcw,
    Ocdm(ChirpSet),
    Afdm(AfdmParams, ChirpSet),
}

impl WaveformKind {
    pub fn name(&self) -> &'static str {
        match self {
            WaveformKind::Ofdm => "ofdm",
            WaveformKind::ScIfdm => "sc_ifdm",
            WaveformKind::Otfs => "otfs",
            WaveformKind::Fmcw => "fmcw",
            WaveformKind::Ocdm(_) => "ocdm",
            WaveformKind::Afdm(..) => "afdm",
        }
    }

    pub fn payload_len(&self, m: usize, n: usize) -> usize {
        match self {
            WaveformKind::Ofdm | WaveformKind::ScIfdm | WaveformKind::Otfs => m * n,
            WaveformKind::Fmcw => 1,
            WaveformKind::Ocdm(set) | WaveformKind::Afdm(_, set) => match set {
                ChirpSet::All => m * n,
                ChirpSet::Only(v) => v.len(),
            },
        }
    }

    pub fn chirp_kind(&self) -> Option<ChirpKind> {
        match self {
            WaveformKind::Fmcw => Some(ChirpKind::Fmcw),
            WaveformKind::Ocdm(_) => Some(ChirpKind::Ocdm),
            WaveformKind::Afdm(p, _) => Some(ChirpKind::Afdm(*p)),
            _ => None,
        }
    }

    fn chirp_set(&self) -> Option<&ChirpSet> {
        match self {
            WaveformKind::Ocdm(set) | WaveformKind::Afdm(_, set) => Some(set),
            _ => None,
        }
    }
}

fn check(kind: &WaveformKind, payload_len: usize, m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::Parameter(format!(
            "grid dimensions must be positive (M={m}, N={n})"
        )));
    }
    let want = kind.payload_len(m, n);
    if payload_len != want {
        return Err(Error::Parameter(format!(
            "{} payload needs {want} symbols, got {payload_len}",
            kind.name()
        )));
    }
    if let Some(ChirpSet::Only(v)) = kind.chirp_set() {
        let mut seen = vec![false; m * n];
        for &i in v {
            if i >= m * n {
                return Err(Error::Parameter(format!(
                    "chirp index {i} outside [0, {})",
                    m * n
                )));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::Parameter(format!("chirp index {i} listed twice")));
            }
        }
    }
    Ok(())
}

fn chirp_scale(kind: &WaveformKind, mn: usize) -> f64 {
    match kind {
        WaveformKind::Fmcw => 1.0,
        _ => 1.0 / (mn as f64).sqrt(),
    }
}

/// A validated (kind, M, N) triple with its chirp supports cached, so
/// repeated modulation skips support validation.
#[derive(Clone, Debug)]
pub struct Modem {
    kind: WaveformKind,
    m: usize,
    n: usize,
    maps: Vec<ChirpIndexMap>,
}

impl Modem {
    pub fn new(kind: &WaveformKind, m: usize, n: usize) -> Result<Self> {
        check(kind, kind.payload_len(m, n), m, n)?;
        let maps = match kind.chirp_kind() {
            Some(ck) => {
                let indices = kind
                    .chirp_set()
                    .map_or_else(|| vec![0], |s| s.indices(m * n));
                chirp_family_maps(ck, &indices, m, n)?
            }
            None => Vec::new(),
        };
        Ok(Self {
            kind: kind.clone(),
            m,
            n,
            maps,
        })
    }

    pub fn kind(&self) -> &WaveformKind {
        &self.kind
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn payload_len(&self) -> usize {
        self.kind.payload_len(self.m, self.n)
    }

    /// Chirp supports, one per payload entry (empty for non-chirp kinds).
    pub fn chirp_maps(&self) -> &[ChirpIndexMap] {
        &self.maps
    }

    /// Mother-path synthesis.
    pub fn modulate(&self, payload: &[C64]) -> Result<TimeFrame> {
        let (m, n) = (self.m, self.n);
        check(&self.kind, payload.len(), m, n)?;
        let grid = match &self.kind {
            WaveformKind::Ofdm => {
                let mut out = Vec::with_capacity(m * n);
                for block in payload.chunks(m) {
                    let one = LatticeGrid::from_vec(1, m, block.to_vec())?;
                    out.extend_from_slice(sc_ifdm_modulate(&one).samples());
                }
                return TimeFrame::new(m, n, out);
            }
            WaveformKind::ScIfdm => LatticeGrid::from_vec(m, n, payload.to_vec())?,
            WaveformKind::Otfs => otfs_phase_apply(
                &LatticeGrid::from_vec(m, n, payload.to_vec())?,
                Direction::Forward,
            ),
            kind => {
                let scale = chirp_scale(kind, m * n);
                let mut grid = LatticeGrid::zeros(m, n);
                for (map, x) in self.maps.iter().zip(payload) {
                    if *x != C64::new(0.0, 0.0) {
                        accumulate_chirp(&mut grid, map, x * scale);
                    }
                }
                grid
            }
        };
        Ok(sc_ifdm_modulate(&grid))
    }

    /// Inverse of [`Modem::modulate`] on a bare length-`MN` sample vector.
    pub fn demodulate(&self, samples: &[C64]) -> Result<Vec<C64>> {
        let (m, n) = (self.m, self.n);
        if samples.len() != m * n {
            return Err(Error::dim("demodulate samples", m * n, samples.len()));
        }
        Ok(match &self.kind {
            WaveformKind::Ofdm => {
                let mut out = Vec::with_capacity(m * n);
                for block in samples.chunks(m) {
                    out.extend(sc_ifdm_demodulate(block, 1, m)?.into_vec());
                }
                out
            }
            WaveformKind::ScIfdm => sc_ifdm_demodulate(samples, m, n)?.into_vec(),
            WaveformKind::Otfs => {
                otfs_phase_apply(&sc_ifdm_demodulate(samples, m, n)?, Direction::Inverse).into_vec()
            }
            kind => {
                let grid = sc_ifdm_demodulate(samples, m, n)?;
                let scale = chirp_scale(kind, m * n);
                self.maps
                    .iter()
                    .map(|map| project_chirp(&grid, map) / scale)
                    .collect()
            }
        })
    }
}

/// Build the frame through the SC-IFDM lattice.
pub fn synthesize_mother(
    kind: &WaveformKind,
    payload: &[C64],
    m: usize,
    n: usize,
) -> Result<TimeFrame> {
    check(kind, payload.len(), m, n)?;
    Modem::new(kind, m, n)?.modulate(payload)
}

/// Build the frame straight from the kind's defining equation.
pub fn synthesize_reference(
    kind: &WaveformKind,
    payload: &[C64],
    m: usize,
    n: usize,
) -> Result<TimeFrame> {
    check(kind, payload.len(), m, n)?;
    let mn = m * n;
    let samples: Vec<C64> = match kind {
        WaveformKind::Ofdm => {
            let norm = 1.0 / (m as f64).sqrt();
            payload
                .chunks(m)
                .flat_map(|x| {
                    (0..m).map(move |p| {
                        let s: C64 = (0..m)
                            .map(|i| x[i] * cis_ratio((i * p) as i128, m as i128))
                            .sum();
                        s * norm
                    })
                })
                .collect()
        }
        WaveformKind::ScIfdm | WaveformKind::Otfs => {
            let norm = 1.0 / (n as f64).sqrt();
            let otfs = matches!(kind, WaveformKind::Otfs);
            (0..mn)
                .map(|p| {
                    let (l, blk) = (p % m, p / m);
                    let s: C64 = (0..n)
                        .map(|k| {
                            let ph = if otfs {
                                cis_ratio((k * blk) as i128, n as i128)
                            } else {
                                cis_ratio((k * p) as i128, mn as i128)
                            };
                            payload[l + m * k] * ph
                        })
                        .sum();
                    s * norm
                })
                .collect()
        }
        WaveformKind::Fmcw => Chirp::fmcw()
            .samples(mn)
            .into_iter()
            .map(|c| c * payload[0])
            .collect(),
        WaveformKind::Ocdm(set) | WaveformKind::Afdm(_, set) => {
            let mut full = vec![C64::new(0.0, 0.0); mn];
            for (i, x) in set.indices(mn).into_iter().zip(payload) {
                full[i] = *x;
            }
            match kind {
                WaveformKind::Afdm(p, _) => daft_apply(&full, *p, mn, Direction::Inverse)?,
                _ => dfnt_apply(&full, mn, Direction::Inverse)?,
            }
        }
    };
    TimeFrame::new(m, n, samples)
}

/// Recover the payload from a noiseless (or equalized) frame.
pub fn demodulate(kind: &WaveformKind, frame: &TimeFrame, m: usize, n: usize) -> Result<Vec<C64>> {
    if frame.m() != m || frame.n() != n {
        return Err(Error::dim("demodulate frame", m * n, frame.m() * frame.n()));
    }
    Modem::new(kind, m, n)?.demodulate(frame.samples())
}

/// Least-squares fit `a ≈ scale * b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarFit {
    pub scale: C64,
    pub max_deviation: f64,
}

pub fn compare_up_to_scalar(a: &[C64], b: &[C64]) -> Result<ScalarFit> {
    if a.len() != b.len() {
        return Err(Error::dim("scalar fit", a.len(), b.len()));
    }
    let num: C64 = b.iter().zip(a).map(|(y, x)| y.conj() * x).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    let scale = if den > 0.0 {
        num / den
    } else {
        C64::new(1.0, 0.0)
    };
    let max_deviation = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - scale * y).norm())
        .fold(0.0, f64::max);
    Ok(ScalarFit {
        scale,
        max_deviation,
    })
}
