//! Closed-form supports of chirp waveforms inside the SC-IFDM lattice.
//!
//! A chirp sampled on `p = l + nM` factors into `s(l)` times a harmonic in
//! `n`, so its lattice image collapses onto one Doppler bin per delay bin.
//! The value there is `sqrt(N) s(l) ω(k,l)`. The collapse needs `N | M`
//! and an even `M`; every map is cross-checked against a numerical
//! projection when it is built.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64 as C64;

use super::phase::omega;
use crate::error::{Error, Result};
use crate::transforms::dft::cis_ratio;
use crate::transforms::{sc_ifdm_demodulate, AfdmParams, LatticeGrid};

/// Off-support energy fraction tolerated when validating a support.
pub const SUPPORT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChirpKind {
    /// `e^{jπ p²/MN}`, the critically sampled linear up-chirp.
    Fmcw,
    /// OCDM chirp `e^{jπ/4} e^{-jπ (p-i)²/MN}`.
    Ocdm,
    /// AFDM twisted chirp `e^{j2π (c1 p² + c2 i² + p i/MN)}`.
    Afdm(AfdmParams),
}

impl ChirpKind {
    pub fn name(&self) -> &'static str {
        match self {
            ChirpKind::Fmcw => "fmcw",
            ChirpKind::Ocdm => "ocdm",
            ChirpKind::Afdm(_) => "afdm",
        }
    }
}

/// One unnormalized, unit-modulus chirp sequence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Chirp {
    pub kind: ChirpKind,
    /// Chirp index `i` (ignored for FMCW).
    pub index: usize,
}

impl Chirp {
    pub fn fmcw() -> Self {
        Self {
            kind: ChirpKind::Fmcw,
            index: 0,
        }
    }

    pub fn ocdm(index: usize) -> Self {
        Self {
            kind: ChirpKind::Ocdm,
            index,
        }
    }

    pub fn afdm(params: AfdmParams, index: usize) -> Self {
        Self {
            kind: ChirpKind::Afdm(params),
            index,
        }
    }

    /// Sample `p` of the chirp for a frame of `mn` samples.
    pub fn sample(&self, p: usize, mn: usize) -> C64 {
        let den = 2 * mn as i128;
        let p = p as i128;
        match self.kind {
            ChirpKind::Fmcw => cis_ratio(p * p, den),
            ChirpKind::Ocdm => {
                let d = p - self.index as i128;
                C64::from_polar(1.0, FRAC_PI_4) * cis_ratio(-d * d, den)
            }
            ChirpKind::Afdm(params) => {
                params.c1_phase(p as usize, mn)
                    * params.c2_phase(self.index)
                    * cis_ratio(p * self.index as i128, mn as i128)
            }
        }
    }

    pub fn samples(&self, mn: usize) -> Vec<C64> {
        (0..mn).map(|p| self.sample(p, mn)).collect()
    }

    /// Signed quadratic rate in units of `π/MN`: the dechirped tone of a
    /// delay `d` sits at DFT bin `[-rate * d]_{MN}`.
    pub fn rate(&self) -> i64 {
        match self.kind {
            ChirpKind::Fmcw => 1,
            ChirpKind::Ocdm => -1,
            ChirpKind::Afdm(p) => p.c1_prime,
        }
    }
}

/// Which modular condition described the support.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupportForm {
    /// `[M/2 + l - k]_N = 0`
    Fmcw,
    /// `[-M/2 + i - l - k]_N = 0`
    Ocdm,
    /// `[c1' M/2 + c1' l + i - k]_N = 0`
    AfdmAdditive,
    /// `[-c1' M/2 - c1' l + i - k]_N = 0`
    AfdmSubtractive,
}

impl SupportForm {
    fn doppler_bin(self, chirp: &Chirp, l: usize, m: usize, n: usize) -> usize {
        let (l, m, n, i) = (l as i64, m as i64, n as i64, chirp.index as i64);
        let c1 = match chirp.kind {
            ChirpKind::Afdm(p) => p.c1_prime,
            _ => 1,
        };
        let k = match self {
            SupportForm::Fmcw => m / 2 + l,
            SupportForm::Ocdm => -m / 2 + i - l,
            SupportForm::AfdmAdditive => c1 * m / 2 + c1 * l + i,
            SupportForm::AfdmSubtractive => -c1 * m / 2 - c1 * l + i,
        };
        k.rem_euclid(n) as usize
    }
}

/// Support of one chirp in an `N x M` lattice: exactly one `(l, k)` per delay bin.
#[derive(Clone, Debug, PartialEq)]
pub struct ChirpIndexMap {
    pub chirp: Chirp,
    pub m: usize,
    pub n: usize,
    pub form: SupportForm,
    /// `(l, k)` pairs, ordered by `l`.
    pub entries: Vec<(usize, usize)>,
}

impl ChirpIndexMap {
    /// Lattice value at a support entry for a chirp whose time-domain samples
    /// are `amplitude * chirp(p)`.
    pub fn value(&self, l: usize, k: usize, amplitude: C64) -> C64 {
        let (m, n) = (self.m, self.n);
        amplitude * (n as f64).sqrt() * self.chirp.sample(l, m * n) * omega(k, l, m, n)
    }

    pub fn contains(&self, k: usize, l: usize) -> bool {
        self.entries.get(l).is_some_and(|&(_, kk)| kk == k)
    }

    /// Support as a delay-major boolean mask.
    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.m * self.n];
        for &(l, k) in &self.entries {
            mask[l + self.m * k] = true;
        }
        mask
    }
}

/// Closed-form support of `chirp`, validated against the numerical projection
/// of the chirp through the SC-IFDM demodulator.
pub fn chirp_index_map(chirp: Chirp, m: usize, n: usize) -> Result<ChirpIndexMap> {
    if m == 0 || n == 0 {
        return Err(Error::Parameter(format!(
            "grid dimensions must be positive (M={m}, N={n})"
        )));
    }
    if !m.is_multiple_of(2) {
        return Err(Error::UnsupportedSize(format!(
            "{} chirps need an even number of delay bins, got M={m}",
            chirp.kind.name()
        )));
    }
    let mn = m * n;
    if !matches!(chirp.kind, ChirpKind::Fmcw) && chirp.index >= mn {
        return Err(Error::Parameter(format!(
            "chirp index {} outside [0, {mn})",
            chirp.index
        )));
    }
    let candidates: &[SupportForm] = match chirp.kind {
        ChirpKind::Fmcw => &[SupportForm::Fmcw],
        ChirpKind::Ocdm => &[SupportForm::Ocdm],
        ChirpKind::Afdm(_) => &[SupportForm::AfdmAdditive, SupportForm::AfdmSubtractive],
    };
    let projection = sc_ifdm_demodulate(&chirp.samples(mn), m, n)?;
    let total = projection.energy();
    let mut best = f64::INFINITY;
    for &form in candidates {
        let entries: Vec<(usize, usize)> = (0..m)
            .map(|l| (l, form.doppler_bin(&chirp, l, m, n)))
            .collect();
        let on: f64 = entries
            .iter()
            .map(|&(l, k)| projection.get(k, l).norm_sqr())
            .sum();
        let fraction = ((total - on) / total).max(0.0);
        if fraction < SUPPORT_TOLERANCE {
            return Ok(ChirpIndexMap {
                chirp,
                m,
                n,
                form,
                entries,
            });
        }
        best = best.min(fraction);
    }
    Err(Error::NotSparse { fraction: best })
}

/// Maps for several chirps of one kind. The support form is validated
/// numerically on the first index and reused for the rest.
pub fn chirp_family_maps(
    kind: ChirpKind,
    indices: &[usize],
    m: usize,
    n: usize,
) -> Result<Vec<ChirpIndexMap>> {
    let Some(&first) = indices.first() else {
        return Ok(Vec::new());
    };
    let head = chirp_index_map(Chirp { kind, index: first }, m, n)?;
    let mn = m * n;
    let mut maps = Vec::with_capacity(indices.len());
    for &index in indices {
        if !matches!(kind, ChirpKind::Fmcw) && index >= mn {
            return Err(Error::Parameter(format!(
                "chirp index {index} outside [0, {mn})"
            )));
        }
        let chirp = Chirp { kind, index };
        let entries = (0..m)
            .map(|l| (l, head.form.doppler_bin(&chirp, l, m, n)))
            .collect();
        maps.push(ChirpIndexMap {
            chirp,
            m,
            n,
            form: head.form,
            entries,
        });
    }
    Ok(maps)
}

/// Least-squares amplitude of the chirp in `grid`, the inverse of
/// [`accumulate_chirp`] when the other chirps present are orthogonal to it.
pub fn project_chirp(grid: &LatticeGrid, map: &ChirpIndexMap) -> C64 {
    let mut num = C64::new(0.0, 0.0);
    let mut den = 0.0;
    for &(l, k) in &map.entries {
        let v = map.value(l, k, C64::new(1.0, 0.0));
        num += v.conj() * grid.get(k, l);
        den += v.norm_sqr();
    }
    num / den
}

/// Write the chirp into `grid` at its support with time-domain amplitude
/// `amplitude`. Occupied (nonzero) bins are an error unless `overwrite`.
pub fn embed_chirp(
    grid: &LatticeGrid,
    map: &ChirpIndexMap,
    amplitude: C64,
    overwrite: bool,
) -> Result<LatticeGrid> {
    if !grid.same_shape(map.m, map.n) {
        return Err(Error::dim(
            "embed_chirp grid",
            map.m * map.n,
            grid.m() * grid.n(),
        ));
    }
    let mut out = grid.clone();
    if amplitude == C64::new(0.0, 0.0) {
        return Ok(out);
    }
    for &(l, k) in &map.entries {
        if !overwrite && out.get(k, l) != C64::new(0.0, 0.0) {
            return Err(Error::Collision { k, l });
        }
        out.set(k, l, map.value(l, k, amplitude));
    }
    Ok(out)
}

/// Superpose a chirp onto `grid` (chirps sharing a support add up).
pub fn accumulate_chirp(grid: &mut LatticeGrid, map: &ChirpIndexMap, amplitude: C64) {
    for &(l, k) in &map.entries {
        *grid.get_mut(k, l) += map.value(l, k, amplitude);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmcw_support_wraps() {
        let map = chirp_index_map(Chirp::fmcw(), 32, 32).unwrap();
        assert_eq!(map.entries.len(), 32);
        assert_eq!(map.entries[0], (0, 16));
        assert_eq!(map.entries[1], (1, 17));
        assert_eq!(map.entries[16], (16, 0));
    }

    #[test]
    fn ocdm_zero_index_support() {
        let map = chirp_index_map(Chirp::ocdm(0), 32, 32).unwrap();
        assert_eq!(map.entries[0], (0, 16));
        assert_eq!(map.form, SupportForm::Ocdm);
    }

    #[test]
    fn ocdm_chirps_one_period_apart_share_support() {
        let a = chirp_index_map(Chirp::ocdm(5), 16, 16).unwrap();
        let b = chirp_index_map(Chirp::ocdm(5 + 16), 16, 16).unwrap();
        assert_eq!(a.entries, b.entries);
    }

    #[test]
    fn odd_delay_count_rejected() {
        assert!(matches!(
            chirp_index_map(Chirp::fmcw(), 7, 7),
            Err(Error::UnsupportedSize(_))
        ));
    }

    #[test]
    fn index_out_of_range_rejected() {
        assert!(matches!(
            chirp_index_map(Chirp::ocdm(64), 8, 8),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn non_dividing_lattice_is_not_sparse() {
        // N does not divide M: the quadratic term stops being harmonic in n
        assert!(matches!(
            chirp_index_map(Chirp::fmcw(), 4, 8),
            Err(Error::NotSparse { .. })
        ));
    }

    #[test]
    fn family_matches_individual_maps() {
        let p = AfdmParams::new(2, 0.25).unwrap();
        let idx = [0, 3, 17, 63];
        let fam = chirp_family_maps(ChirpKind::Afdm(p), &idx, 8, 8).unwrap();
        for (map, &i) in fam.iter().zip(&idx) {
            assert_eq!(*map, chirp_index_map(Chirp::afdm(p, i), 8, 8).unwrap());
        }
    }

    #[test]
    fn projection_inverts_accumulation() {
        let map = chirp_index_map(Chirp::ocdm(9), 8, 8).unwrap();
        let mut g = LatticeGrid::zeros(8, 8);
        let a = C64::new(0.3, -1.2);
        accumulate_chirp(&mut g, &map, a);
        assert!((project_chirp(&g, &map) - a).norm() < 1e-12);
    }

    #[test]
    fn zero_amplitude_leaves_grid_alone() {
        let map = chirp_index_map(Chirp::fmcw(), 8, 8).unwrap();
        let g = LatticeGrid::from_fn(8, 8, |k, l| C64::new(k as f64, l as f64));
        assert_eq!(embed_chirp(&g, &map, C64::new(0.0, 0.0), false).unwrap(), g);
    }

    #[test]
    fn collision_detected() {
        let map = chirp_index_map(Chirp::fmcw(), 8, 8).unwrap();
        let g = LatticeGrid::from_fn(8, 8, |_, _| C64::new(1.0, 0.0));
        assert!(matches!(
            embed_chirp(&g, &map, C64::new(1.0, 0.0), false),
            Err(Error::Collision { .. })
        ));
        assert!(embed_chirp(&g, &map, C64::new(1.0, 0.0), true).is_ok());
    }
}
