//! Discrete Zak transform pair.

use num_complex::Complex64 as C64;

use super::dft::{fft_unitary, ifft_unitary};
use super::{check_dims, LatticeGrid, TimeFrame};
use crate::error::{Error, Result};

/// `X(k,l) = N^{-1/2} sum_n s(l + nM) e^{-j2 pi kn/N}`.
///
/// One N-point DFT per delay bin `l`. The transform is an isometry.
pub fn dzt(samples: &[C64], m: usize, n: usize) -> Result<LatticeGrid> {
    check_dims(m, n)?;
    if samples.len() != m * n {
        return Err(Error::dim("dzt input", m * n, samples.len()));
    }
    let mut grid = LatticeGrid::zeros(m, n);
    let mut col = vec![C64::new(0.0, 0.0); n];
    for l in 0..m {
        for (i, c) in col.iter_mut().enumerate() {
            *c = samples[l + i * m];
        }
        fft_unitary(&mut col);
        for (k, v) in col.iter().enumerate() {
            grid.set(k, l, *v);
        }
    }
    Ok(grid)
}

/// Convenience wrapper taking a [`TimeFrame`].
pub fn dzt_frame(frame: &TimeFrame) -> Result<LatticeGrid> {
    dzt(frame.samples(), frame.m(), frame.n())
}

/// `s(l + nM) = N^{-1/2} sum_k X(k,l) e^{+j2 pi kn/N}`.
pub fn idzt(grid: &LatticeGrid) -> TimeFrame {
    let (m, n) = (grid.m(), grid.n());
    let mut out = TimeFrame::zeros(m, n);
    let mut col = vec![C64::new(0.0, 0.0); n];
    let s = out.samples_mut();
    for l in 0..m {
        for (k, c) in col.iter_mut().enumerate() {
            *c = grid.get(k, l);
        }
        ifft_unitary(&mut col);
        for (i, v) in col.iter().enumerate() {
            s[l + i * m] = *v;
        }
    }
    out
}
