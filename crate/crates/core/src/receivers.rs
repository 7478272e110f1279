//! Linear ZF / MMSE equalization over dense effective channels.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Added to the MMSE diagonal so that `σ² = 0` stays well posed.
pub const MMSE_FLOOR: f64 = 1e-12;

/// Relative singular-value threshold below which ZF refuses to invert.
pub const ZF_RANK_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EqualizerMode {
    Zf,
    #[default]
    Mmse,
}

impl EqualizerMode {
    pub fn name(self) -> &'static str {
        match self {
            EqualizerMode::Zf => "zf",
            EqualizerMode::Mmse => "mmse",
        }
    }
}

impl std::str::FromStr for EqualizerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zf" => Ok(EqualizerMode::Zf),
            "mmse" => Ok(EqualizerMode::Mmse),
            other => Err(Error::Parameter(format!("unknown equalizer '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EqualizerConfig {
    pub mode: EqualizerMode,
    pub noise_variance: f64,
}

impl EqualizerConfig {
    pub fn zf() -> Self {
        Self {
            mode: EqualizerMode::Zf,
            noise_variance: 0.0,
        }
    }

    pub fn mmse(noise_variance: f64) -> Self {
        Self {
            mode: EqualizerMode::Mmse,
            noise_variance,
        }
    }
}

/// A precomputed linear filter `W` with `x̂ = W y`. Build once per
/// (channel, noise variance) and apply to every received vector.
#[derive(Clone, Debug)]
pub struct Equalizer {
    filter: DMatrix<C64>,
}

impl Equalizer {
    /// `H` may be tall (more observations than unknowns).
    pub fn new(h: &DMatrix<C64>, cfg: EqualizerConfig) -> Result<Self> {
        if h.nrows() < h.ncols() || h.ncols() == 0 {
            return Err(Error::Parameter(format!(
                "effective channel is {}x{}; need at least as many rows as columns",
                h.nrows(),
                h.ncols()
            )));
        }
        if !cfg.noise_variance.is_finite() || cfg.noise_variance < 0.0 {
            return Err(Error::Parameter(format!(
                "noise variance {} is invalid",
                cfg.noise_variance
            )));
        }
        let filter = match cfg.mode {
            EqualizerMode::Zf => zf_filter(h)?,
            EqualizerMode::Mmse => mmse_filter(h, cfg.noise_variance)?,
        };
        Ok(Self { filter })
    }

    pub fn filter(&self) -> &DMatrix<C64> {
        &self.filter
    }

    pub fn apply(&self, y: &[C64]) -> Result<Vec<C64>> {
        if y.len() != self.filter.ncols() {
            return Err(Error::dim("equalizer input", self.filter.ncols(), y.len()));
        }
        let x = &self.filter * DVector::from_column_slice(y);
        Ok(x.iter().copied().collect())
    }
}

fn zf_filter(h: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let svd = h.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smax.is_nan() || smax <= 0.0 || smin / smax < ZF_RANK_TOLERANCE {
        return Err(Error::Numerical(format!(
            "zero-forcing on a rank-deficient {}x{} channel: singular values span [{smin:.3e}, {smax:.3e}]",
            h.nrows(),
            h.ncols()
        )));
    }
    svd.pseudo_inverse(0.0)
        .map_err(|e| Error::Numerical(e.to_string()))
}

fn mmse_filter(h: &DMatrix<C64>, sigma2: f64) -> Result<DMatrix<C64>> {
    let hh = h.adjoint();
    let mut gram = &hh * h;
    let reg = C64::new(sigma2 + MMSE_FLOOR, 0.0);
    for i in 0..gram.nrows() {
        gram[(i, i)] += reg;
    }
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Numerical("MMSE Gram matrix is not positive definite".into()))?;
    Ok(chol.solve(&hh))
}

/// One-shot equalization; prefer [`Equalizer`] when `H` is reused.
pub fn equalize(h: &DMatrix<C64>, y: &[C64], cfg: EqualizerConfig) -> Result<Vec<C64>> {
    Equalizer::new(h, cfg)?.apply(y)
}
