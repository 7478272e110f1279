//! Discrete Fresnel transform (the OCDM chirp basis).
//!
//! Synthesis follows the OCDM modulation equation
//! `s(p) = e^{j pi/4} n^{-1/2} sum_i x(i) e^{-j pi (p-i)^2 / n}`,
//! evaluated as `e^{j pi/4} D F^H D x` with `D = diag(e^{-j pi q^2/n})`.
//! Analysis is the adjoint. Only even `n` is supported: for odd `n` the
//! kernel is not periodic in `p - i` and the factorization changes.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64 as C64;

use super::dft::{cis_ratio, fft_unitary, ifft_unitary};
use super::Direction;
use crate::error::{Error, Result};

/// Apply the unitary DFnT (`Forward`) or its inverse (`Inverse`, which
/// generates OCDM chirps) to a length-`mn` vector.
pub fn dfnt_apply(x: &[C64], mn: usize, direction: Direction) -> Result<Vec<C64>> {
    if mn == 0 || !mn.is_multiple_of(2) {
        return Err(Error::UnsupportedSize(format!(
            "discrete Fresnel transform needs an even length, got {mn}"
        )));
    }
    if x.len() != mn {
        return Err(Error::dim("dfnt input", mn, x.len()));
    }
    let quad: Vec<C64> = (0..mn as i128)
        .map(|q| cis_ratio(-q * q, 2 * mn as i128))
        .collect();
    let mut work: Vec<C64> = match direction {
        Direction::Inverse => x.iter().zip(&quad).map(|(v, d)| v * d).collect(),
        Direction::Forward => x.iter().zip(&quad).map(|(v, d)| v * d.conj()).collect(),
    };
    let (global, conj) = match direction {
        Direction::Inverse => {
            ifft_unitary(&mut work);
            (C64::from_polar(1.0, FRAC_PI_4), false)
        }
        Direction::Forward => {
            fft_unitary(&mut work);
            (C64::from_polar(1.0, -FRAC_PI_4), true)
        }
    };
    for (v, d) in work.iter_mut().zip(&quad) {
        let d = if conj { d.conj() } else { *d };
        *v *= d * global;
    }
    Ok(work)
}
