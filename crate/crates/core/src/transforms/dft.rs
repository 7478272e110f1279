//! Unitary DFT helpers on top of `rustfft`.
//!
//! rustfft computes unnormalized transforms; every entry point here scales by
//! `1/sqrt(n)` so that forward and inverse are adjoint and norm preserving.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place unitary DFT: `X(k) = n^{-1/2} sum_p x(p) e^{-j2 pi kp/n}`.
pub fn fft_unitary(buf: &mut [C64]) {
    transform(buf, false);
}

/// In-place unitary IDFT: `x(p) = n^{-1/2} sum_k X(k) e^{+j2 pi kp/n}`.
pub fn ifft_unitary(buf: &mut [C64]) {
    transform(buf, true);
}

fn transform(buf: &mut [C64], inverse: bool) {
    let n = buf.len();
    if n == 0 {
        return;
    }
    if n > 1 {
        let fft = PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            if inverse {
                p.plan_fft_inverse(n)
            } else {
                p.plan_fft_forward(n)
            }
        });
        fft.process(buf);
    }
    let scale = 1.0 / (n as f64).sqrt();
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Unnormalized forward DFT, used where raw correlation gain matters (radar maps).
pub fn fft_raw(buf: &mut [C64]) {
    if buf.len() > 1 {
        let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
        fft.process(buf);
    }
}

/// `e^{j 2 pi num / den}` with the numerator reduced modulo `den` first, so that
/// large quadratic phases keep full precision.
#[inline]
pub fn cis_ratio(num: i128, den: i128) -> C64 {
    debug_assert!(den > 0);
    let r = num.rem_euclid(den);
    C64::from_polar(1.0, 2.0 * PI * (r as f64) / (den as f64))
}

/// `e^{j 2 pi x}` keeping only the fractional part of `x`.
#[inline]
pub fn cis_turns(x: f64) -> C64 {
    let f = x - x.floor();
    C64::from_polar(1.0, 2.0 * PI * f)
}

/// Squared 2-norm.
pub fn energy(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}
