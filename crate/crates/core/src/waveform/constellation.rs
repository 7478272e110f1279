//! Gray-mapped QPSK and 16-QAM with unit average energy.
//!
//! QPSK: bit 0 drives the in-phase sign, bit 1 the quadrature sign, `0 -> +`,
//! so `00 -> (1+j)/√2`. 16-QAM: bits `(b0, b2)` pick the in-phase level and
//! `(b1, b3)` the quadrature level from `00 -> 1, 01 -> 3, 10 -> -1, 11 -> -3`,
//! scaled by `1/√10`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Constellation {
    #[default]
    Qpsk,
    Qam16,
}

impl Constellation {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Constellation::Qpsk => 2,
            Constellation::Qam16 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Constellation::Qpsk => "qpsk",
            Constellation::Qam16 => "qam16",
        }
    }

    /// Minimum distance between constellation points.
    pub fn min_distance(self) -> f64 {
        match self {
            Constellation::Qpsk => 2.0 / 2f64.sqrt(),
            Constellation::Qam16 => 2.0 / 10f64.sqrt(),
        }
    }

    fn scale(self) -> f64 {
        match self {
            Constellation::Qpsk => 1.0 / 2f64.sqrt(),
            Constellation::Qam16 => 1.0 / 10f64.sqrt(),
        }
    }
}

impl std::str::FromStr for Constellation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qpsk" => Ok(Constellation::Qpsk),
            "qam16" | "16qam" => Ok(Constellation::Qam16),
            other => Err(Error::Parameter(format!("unknown constellation '{other}'"))),
        }
    }
}

fn pam4_level(hi: u8, lo: u8) -> f64 {
    let sign = if hi == 0 { 1.0 } else { -1.0 };
    let mag = if lo == 0 { 1.0 } else { 3.0 };
    sign * mag
}

fn pam4_bits(x: f64) -> (u8, u8) {
    let hi = u8::from(x < 0.0);
    let lo = u8::from(x.abs() > 2.0);
    (hi, lo)
}

pub fn map_bits(bits: &[u8], c: Constellation) -> Result<Vec<C64>> {
    let bps = c.bits_per_symbol();
    if !bits.len().is_multiple_of(bps) {
        return Err(Error::Parameter(format!(
            "{} bits is not a multiple of {bps} bits per {} symbol",
            bits.len(),
            c.name()
        )));
    }
    if let Some(b) = bits.iter().find(|b| **b > 1) {
        return Err(Error::Parameter(format!("bit value {b} is not 0 or 1")));
    }
    let s = c.scale();
    Ok(bits
        .chunks(bps)
        .map(|b| match c {
            Constellation::Qpsk => {
                let i = if b[0] == 0 { 1.0 } else { -1.0 };
                let q = if b[1] == 0 { 1.0 } else { -1.0 };
                C64::new(i * s, q * s)
            }
            Constellation::Qam16 => {
                C64::new(pam4_level(b[0], b[2]) * s, pam4_level(b[1], b[3]) * s)
            }
        })
        .collect())
}

/// Hard nearest-neighbour decision followed by Gray demapping.
pub fn demap_symbols(symbols: &[C64], c: Constellation) -> Vec<u8> {
    let s = c.scale();
    let mut out = Vec::with_capacity(symbols.len() * c.bits_per_symbol());
    for z in symbols {
        match c {
            Constellation::Qpsk => {
                out.push(u8::from(z.re < 0.0));
                out.push(u8::from(z.im < 0.0));
            }
            Constellation::Qam16 => {
                let (i_hi, i_lo) = pam4_bits(z.re / s);
                let (q_hi, q_lo) = pam4_bits(z.im / s);
                out.extend_from_slice(&[i_hi, q_hi, i_lo, q_lo]);
            }
        }
    }
    out
}

/// Alias used by the receivers: symbol estimates to bits.
pub fn detect_bits(estimates: &[C64], c: Constellation) -> Vec<u8> {
    demap_symbols(estimates, c)
}
