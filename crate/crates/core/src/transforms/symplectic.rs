//! ISFFT/SFFT between delay-Doppler and time-frequency grids, and the
//! Heisenberg/Wigner pair between time-frequency grids and time frames.

use num_complex::Complex64 as C64;

use super::dft::{fft_unitary, ifft_unitary};
use super::{check_dims, LatticeGrid, TfGrid, TimeFrame};
use crate::error::{Error, Result};

/// `X_TF(n,m) = (MN)^{-1/2} sum_{k,l} X(k,l) e^{j2 pi (nk/N - ml/M)}`.
pub fn isfft(dd: &LatticeGrid) -> TfGrid {
    let (m, n) = (dd.m(), dd.n());
    let mut work = dd.as_slice().to_vec();
    // M-point forward DFT along delay (rows of the flat layout)
    for row in work.chunks_mut(m) {
        fft_unitary(row);
    }
    // N-point inverse DFT along Doppler
    column_transform(&mut work, m, n, true);
    TfGrid::from_vec(m, n, work).expect("shape preserved")
}

/// Inverse of [`isfft`].
pub fn sfft(tf: &TfGrid) -> LatticeGrid {
    let (m, n) = (tf.m(), tf.n());
    let mut work = tf.as_slice().to_vec();
    column_transform(&mut work, m, n, false);
    for row in work.chunks_mut(m) {
        ifft_unitary(row);
    }
    LatticeGrid::from_vec(m, n, work).expect("shape preserved")
}

/// Per-symbol M-point IDFT: `s(l + nM) = M^{-1/2} sum_m X_TF(n,m) e^{j2 pi ml/M}`.
pub fn heisenberg(tf: &TfGrid) -> TimeFrame {
    let mut samples = tf.as_slice().to_vec();
    for block in samples.chunks_mut(tf.m()) {
        ifft_unitary(block);
    }
    TimeFrame::new(tf.m(), tf.n(), samples).expect("shape preserved")
}

/// Per-symbol M-point DFT; inverse of [`heisenberg`].
pub fn wigner(samples: &[C64], m: usize, n: usize) -> Result<TfGrid> {
    check_dims(m, n)?;
    if samples.len() != m * n {
        return Err(Error::dim("wigner input", m * n, samples.len()));
    }
    let mut work = samples.to_vec();
    for block in work.chunks_mut(m) {
        fft_unitary(block);
    }
    TfGrid::from_vec(m, n, work)
}

fn column_transform(work: &mut [C64], m: usize, n: usize, inverse: bool) {
    let mut col = vec![C64::new(0.0, 0.0); n];
    for c in 0..m {
        for (r, v) in col.iter_mut().enumerate() {
            *v = work[c + m * r];
        }
        if inverse {
            ifft_unitary(&mut col);
        } else {
            fft_unitary(&mut col);
        }
        for (r, v) in col.iter().enumerate() {
            work[c + m * r] = *v;
        }
    }
}
