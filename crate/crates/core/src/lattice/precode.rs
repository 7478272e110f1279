//! Kronecker precoding of a small delay-Doppler grid.
//!
//! `X_pr(k,l) = (αβ)^{-1/2} X_s([k]_{N/α}, [l]_{M/β}) e^{j2π(-a q1/α + b q2/β)}`
//! with `a = ⌊kα/N⌋`, `b = ⌊lβ/M⌋`. After the ISFFT the frame only occupies
//! TF bins with `[n - q1]_α = 0` and `[m - q2]_β = 0`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::transforms::dft::cis_ratio;
use crate::transforms::LatticeGrid;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecodeParams {
    pub alpha: usize,
    pub beta: usize,
    pub q1: usize,
    pub q2: usize,
}

impl PrecodeParams {
    pub fn new(alpha: usize, beta: usize, q1: usize, q2: usize) -> Result<Self> {
        if alpha == 0 || beta == 0 {
            return Err(Error::Parameter("alpha and beta must be positive".into()));
        }
        if q1 >= alpha {
            return Err(Error::Parameter(format!(
                "q1={q1} must be below alpha={alpha}"
            )));
        }
        if q2 >= beta {
            return Err(Error::Parameter(format!(
                "q2={q2} must be below beta={beta}"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            q1,
            q2,
        })
    }

    /// Divisibility against a full `N x M` grid.
    pub fn check(&self, m: usize, n: usize) -> Result<()> {
        if !n.is_multiple_of(self.alpha) {
            return Err(Error::Parameter(format!(
                "alpha={} does not divide N={n}",
                self.alpha
            )));
        }
        if !m.is_multiple_of(self.beta) {
            return Err(Error::Parameter(format!(
                "beta={} does not divide M={m}",
                self.beta
            )));
        }
        Ok(())
    }

    /// Precoding coefficient for replica `(a, b)`, including `(αβ)^{-1/2}`.
    pub fn coefficient(&self, a: usize, b: usize) -> C64 {
        let (alpha, beta) = (self.alpha as i128, self.beta as i128);
        let phase = cis_ratio(
            -((a * self.q1) as i128) * beta + (b * self.q2) as i128 * alpha,
            alpha * beta,
        );
        phase / ((self.alpha * self.beta) as f64).sqrt()
    }
}

/// Spread an `(N/α) x (M/β)` grid over the full `N x M` lattice.
pub fn precode_allocate(small: &LatticeGrid, p: &PrecodeParams) -> Result<LatticeGrid> {
    let (ms, ns) = (small.m(), small.n());
    let (m, n) = (ms * p.beta, ns * p.alpha);
    p.check(m, n)?;
    Ok(LatticeGrid::from_fn(m, n, |k, l| {
        let (a, b) = (k / ns, l / ms);
        small.get(k % ns, l % ms) * p.coefficient(a, b)
    }))
}

/// Least-squares inverse of [`precode_allocate`]; exact on precoded grids.
pub fn precode_recover(full: &LatticeGrid, p: &PrecodeParams) -> Result<LatticeGrid> {
    let (m, n) = (full.m(), full.n());
    p.check(m, n)?;
    let (ms, ns) = (m / p.beta, n / p.alpha);
    Ok(LatticeGrid::from_fn(ms, ns, |kk, ll| {
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..p.alpha {
            for b in 0..p.beta {
                acc += full.get(kk + a * ns, ll + b * ms) * p.coefficient(a, b).conj();
            }
        }
        acc
    }))
}

/// Boolean `N x M` TF mask, `true` where the precoded frame may carry energy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccupancyMask {
    pub m: usize,
    pub n: usize,
    bits: Vec<bool>,
}

impl OccupancyMask {
    pub fn get(&self, n: usize, m: usize) -> bool {
        self.bits[m + self.m * n]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }
}

pub fn tf_occupancy(p: &PrecodeParams, m: usize, n: usize) -> Result<OccupancyMask> {
    p.check(m, n)?;
    let mut bits = Vec::with_capacity(m * n);
    for nn in 0..n {
        for mm in 0..m {
            let t = (nn + p.alpha - p.q1).is_multiple_of(p.alpha);
            let f = (mm + p.beta - p.q2).is_multiple_of(p.beta);
            bits.push(t && f);
        }
    }
    Ok(OccupancyMask { m, n, bits })
}
