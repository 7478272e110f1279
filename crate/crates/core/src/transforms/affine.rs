//! Discrete affine Fourier transform (the AFDM twisted-chirp basis).

use num_complex::Complex64 as C64;

use super::dft::{cis_ratio, cis_turns, fft_unitary, ifft_unitary};
use super::Direction;
use crate::error::{Error, Result};

/// Chirp parameters. The fast-time chirp rate is `c1 = c1_prime / (2 MN)`;
/// `c2` is the free phase parameter on the chirp index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AfdmParams {
    pub c1_prime: i64,
    pub c2: f64,
}

impl AfdmParams {
    pub fn new(c1_prime: i64, c2: f64) -> Result<Self> {
        if c1_prime < 0 {
            return Err(Error::Parameter(format!(
                "c1' must be non-negative, got {c1_prime}"
            )));
        }
        if !c2.is_finite() {
            return Err(Error::Parameter("c2 must be finite".into()));
        }
        Ok(Self { c1_prime, c2 })
    }

    /// `e^{j 2 pi c1 p^2}` for a frame of `mn` samples.
    #[inline]
    pub fn c1_phase(&self, p: usize, mn: usize) -> C64 {
        let p = p as i128;
        cis_ratio(self.c1_prime as i128 * p * p, 2 * mn as i128)
    }

    /// `e^{j 2 pi c2 i^2}`.
    #[inline]
    pub fn c2_phase(&self, i: usize) -> C64 {
        let i = i as f64;
        cis_turns(self.c2 * i * i)
    }
}

/// Inverse (modulation): `s(p) = (MN)^{-1/2} sum_i x(i) e^{j2 pi (c1 p^2 + c2 i^2 + pi/MN)}`,
/// i.e. `Λ_{c1}^H F^H Λ_{c2}^H x`. Forward applies `Λ_{c2} F Λ_{c1}`.
pub fn daft_apply(
    x: &[C64],
    params: AfdmParams,
    mn: usize,
    direction: Direction,
) -> Result<Vec<C64>> {
    if x.len() != mn {
        return Err(Error::dim("daft input", mn, x.len()));
    }
    let mut work = x.to_vec();
    match direction {
        Direction::Inverse => {
            for (i, v) in work.iter_mut().enumerate() {
                *v *= params.c2_phase(i);
            }
            ifft_unitary(&mut work);
            for (p, v) in work.iter_mut().enumerate() {
                *v *= params.c1_phase(p, mn);
            }
        }
        Direction::Forward => {
            for (p, v) in work.iter_mut().enumerate() {
                *v *= params.c1_phase(p, mn).conj();
            }
            fft_unitary(&mut work);
            for (i, v) in work.iter_mut().enumerate() {
                *v *= params.c2_phase(i).conj();
            }
        }
    }
    Ok(work)
}
