//! The SC-IFDM modulator: per-block M-point DFT spreading, interleaving, and
//! a final MN-point IDFT. This is the "mother" structure every other
//! waveform in the crate is generated through.

use num_complex::Complex64 as C64;

use super::dft::{fft_unitary, ifft_unitary};
use super::{check_dims, LatticeGrid, TimeFrame};
use crate::error::{Error, Result};

/// Interleaver as an index map: `perm[m + M*k] = k + m*N`.
///
/// Source index `m + M*k` is output `m` of the DFT block fed by lattice row
/// `k`; the destination is its subcarrier in the MN-point IDFT input.
pub fn interleave_perm(m: usize, n: usize) -> Vec<usize> {
    let mut perm = Vec::with_capacity(m * n);
    for k in 0..n {
        for mm in 0..m {
            perm.push(k + mm * n);
        }
    }
    perm
}

/// Inverse of an index permutation: `inv[perm[i]] = i`.
pub fn invert_perm(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// `s(p) = N^{-1/2} sum_k X(k, [p]_M) e^{j2 pi kp/(MN)}`, computed through the
/// DFT-spread / interleave / IDFT pipeline.
pub fn sc_ifdm_modulate(grid: &LatticeGrid) -> TimeFrame {
    let (m, n) = (grid.m(), grid.n());
    let mut spread = grid.as_slice().to_vec();
    for block in spread.chunks_mut(m) {
        fft_unitary(block);
    }
    let perm = interleave_perm(m, n);
    let mut carriers = vec![C64::new(0.0, 0.0); m * n];
    for (src, &dst) in perm.iter().enumerate() {
        carriers[dst] = spread[src];
    }
    ifft_unitary(&mut carriers);
    TimeFrame::new(m, n, carriers).expect("shape preserved")
}

/// Exact inverse of [`sc_ifdm_modulate`].
pub fn sc_ifdm_demodulate(samples: &[C64], m: usize, n: usize) -> Result<LatticeGrid> {
    check_dims(m, n)?;
    if samples.len() != m * n {
        return Err(Error::dim(
            "sc-ifdm demodulator input",
            m * n,
            samples.len(),
        ));
    }
    let mut carriers = samples.to_vec();
    fft_unitary(&mut carriers);
    let perm = interleave_perm(m, n);
    let mut spread = vec![C64::new(0.0, 0.0); m * n];
    for (dst, &src) in perm.iter().enumerate() {
        spread[dst] = carriers[src];
    }
    for block in spread.chunks_mut(m) {
        ifft_unitary(block);
    }
    LatticeGrid::from_vec(m, n, spread)
}
