//! Discrete transforms underlying every waveform in the crate.
//!
//! All transforms use unitary scaling. Grids are stored delay-major: the
//! entry `X(k, l)` lives at flat index `l + M*k`, which is the vectorization
//! under which `(F_N^H ⊗ I_M) vec(X)` reproduces the inverse Zak transform.

pub mod affine;
pub mod dft;
pub mod fresnel;
pub mod scifdm;
pub mod symplectic;
pub mod zak;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub use affine::{daft_apply, AfdmParams};
pub use fresnel::dfnt_apply;
pub use scifdm::{interleave_perm, invert_perm, sc_ifdm_demodulate, sc_ifdm_modulate};
pub use symplectic::{heisenberg, isfft, sfft, wigner};
pub use zak::{dzt, idzt};

/// Direction of a unitary transform pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Analysis (time domain to transform domain).
    Forward,
    /// Synthesis (transform domain to time domain).
    Inverse,
}

/// How a frame is protected against delay spread when transmitted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PrefixKind {
    #[default]
    None,
    /// Classical cyclic prefix over the whole frame.
    Cp,
    /// Full cyclic prefix: every length-M block carries its own prefix.
    Fcp,
    /// Reduced cyclic prefix: one prefix for the entire multi-symbol frame.
    Rcp,
}

impl PrefixKind {
    pub fn name(self) -> &'static str {
        match self {
            PrefixKind::None => "none",
            PrefixKind::Cp => "cp",
            PrefixKind::Fcp => "fcp",
            PrefixKind::Rcp => "rcp",
        }
    }
}

/// Prefix request: which kind and how many samples (per block for FCP).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Prefix {
    pub kind: PrefixKind,
    pub len: usize,
}

impl Prefix {
    pub const NONE: Prefix = Prefix {
        kind: PrefixKind::None,
        len: 0,
    };

    pub fn new(kind: PrefixKind, len: usize) -> Self {
        Self { kind, len }
    }
}

/// A length-`M*N` baseband frame.
///
/// `samples` always holds the `M*N` core samples; the prefix is described by
/// `prefix` and materialized only when the frame goes through a channel.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeFrame {
    m: usize,
    n: usize,
    samples: Vec<C64>,
    prefix: Prefix,
}

impl TimeFrame {
    pub fn new(m: usize, n: usize, samples: Vec<C64>) -> Result<Self> {
        check_dims(m, n)?;
        if samples.len() != m * n {
            return Err(Error::dim("time frame", m * n, samples.len()));
        }
        if samples
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Numerical(
                "time frame contains non-finite samples".into(),
            ));
        }
        Ok(Self {
            m,
            n,
            samples,
            prefix: Prefix::NONE,
        })
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            samples: vec![C64::new(0.0, 0.0); m * n],
            prefix: Prefix::NONE,
        }
    }

    pub fn with_prefix(mut self, prefix: Prefix) -> Self {
        self.prefix = prefix;
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn prefix(&self) -> Prefix {
        self.prefix
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [C64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<C64> {
        self.samples
    }

    pub fn energy(&self) -> f64 {
        dft::energy(&self.samples)
    }

    /// The transmitted sample stream including the prefix.
    ///
    /// CP/RCP copy the frame tail in front of the frame; FCP copies the tail
    /// of every length-M block in front of that block.
    pub fn materialize(&self) -> Vec<C64> {
        let Prefix { kind, len } = self.prefix;
        match kind {
            PrefixKind::None => self.samples.clone(),
            PrefixKind::Cp | PrefixKind::Rcp => {
                let total = self.samples.len();
                let mut out = Vec::with_capacity(total + len);
                for i in 0..len {
                    // prefixes longer than the frame wrap around it
                    let idx = (total * len.div_ceil(total.max(1)) + i - len) % total;
                    out.push(self.samples[idx]);
                }
                out.extend_from_slice(&self.samples);
                out
            }
            PrefixKind::Fcp => {
                let m = self.m;
                let mut out = Vec::with_capacity(self.n * (m + len));
                for block in self.samples.chunks(m) {
                    for i in 0..len {
                        let idx = (m * len.div_ceil(m) + i - len) % m;
                        out.push(block[idx]);
                    }
                    out.extend_from_slice(block);
                }
                out
            }
        }
    }

    /// Inverse of [`TimeFrame::materialize`]: drop prefix samples from a
    /// received stream of the same layout.
    pub fn strip(m: usize, n: usize, prefix: Prefix, stream: &[C64]) -> Result<Self> {
        let samples = match prefix.kind {
            PrefixKind::None => stream.to_vec(),
            PrefixKind::Cp | PrefixKind::Rcp => {
                if stream.len() != m * n + prefix.len {
                    return Err(Error::dim(
                        "prefixed stream",
                        m * n + prefix.len,
                        stream.len(),
                    ));
                }
                stream[prefix.len..].to_vec()
            }
            PrefixKind::Fcp => {
                let block = m + prefix.len;
                if stream.len() != n * block {
                    return Err(Error::dim("FCP stream", n * block, stream.len()));
                }
                stream
                    .chunks(block)
                    .flat_map(|b| b[prefix.len..].iter().copied())
                    .collect()
            }
        };
        Ok(TimeFrame::new(m, n, samples)?.with_prefix(prefix))
    }
}

macro_rules! grid_type {
    ($(#[$meta:meta])* $name:ident, $row:literal, $col:literal) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name {
            m: usize,
            n: usize,
            values: Vec<C64>,
        }

        impl $name {
            pub fn zeros(m: usize, n: usize) -> Self {
                Self {
                    m,
                    n,
                    values: vec![C64::new(0.0, 0.0); m * n],
                }
            }

            /// Build from a flat vector laid out as `values[col + M*row]`.
            pub fn from_vec(m: usize, n: usize, values: Vec<C64>) -> Result<Self> {
                check_dims(m, n)?;
                if values.len() != m * n {
                    return Err(Error::dim(stringify!($name), m * n, values.len()));
                }
                Ok(Self { m, n, values })
            }

            pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
                let mut values = Vec::with_capacity(m * n);
                for row in 0..n {
                    for col in 0..m {
                        values.push(f(row, col));
                    }
                }
                Self { m, n, values }
            }

            #[doc = concat!("Number of ", $col, " bins (columns).")]
            pub fn m(&self) -> usize {
                self.m
            }

            #[doc = concat!("Number of ", $row, " bins (rows).")]
            pub fn n(&self) -> usize {
                self.n
            }

            #[inline]
            pub fn get(&self, row: usize, col: usize) -> C64 {
                self.values[col + self.m * row]
            }

            #[inline]
            pub fn set(&mut self, row: usize, col: usize, v: C64) {
                let m = self.m;
                self.values[col + m * row] = v;
            }

            #[inline]
            pub fn get_mut(&mut self, row: usize, col: usize) -> &mut C64 {
                let m = self.m;
                &mut self.values[col + m * row]
            }

            pub fn as_slice(&self) -> &[C64] {
                &self.values
            }

            pub fn as_mut_slice(&mut self) -> &mut [C64] {
                &mut self.values
            }

            pub fn into_vec(self) -> Vec<C64> {
                self.values
            }

            pub fn row(&self, row: usize) -> &[C64] {
                &self.values[row * self.m..(row + 1) * self.m]
            }

            pub fn energy(&self) -> f64 {
                dft::energy(&self.values)
            }

            pub fn same_shape(&self, m: usize, n: usize) -> bool {
                self.m == m && self.n == n
            }
        }
    };
}

grid_type!(
    /// Delay-Doppler / SC-IFDM lattice `X(k, l)`, `k` in `[0, N)` (rows),
    /// `l` in `[0, M)` (columns).
    LatticeGrid,
    "Doppler",
    "delay"
);

grid_type!(
    /// Time-frequency grid `X_TF(n, m)`: `N` symbols (rows) by `M`
    /// subcarriers (columns).
    TfGrid,
    "symbol",
    "subcarrier"
);

pub(crate) fn check_dims(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::Parameter(format!(
            "grid dimensions must be positive (M={m}, N={n})"
        )));
    }
    Ok(())
}
