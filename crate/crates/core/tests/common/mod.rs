//! Slow, literal implementations used as oracles by the integration tests.
//! Every function here is a direct double sum; none of them touch an FFT.

#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::PI;

use mwave::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub fn cis(turns: f64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * turns)
}

/// `e^{j2π num/den}` with the numerator reduced first, so large quadratic
/// phases keep full precision.
pub fn cis_frac(num: i64, den: i64) -> C64 {
    cis(num.rem_euclid(den) as f64 / den as f64)
}

pub fn random_vec(len: usize, rng: &mut ChaCha20Rng) -> Vec<C64> {
    (0..len)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect()
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn energy(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

/// `‖a − b‖ / ‖b‖`.
pub fn rel_err(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    (d / energy(b).max(f64::MIN_POSITIVE)).sqrt()
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Discrete Zak transform, delay-major output `X[l + M k]`.
pub fn dzt(s: &[C64], m: usize, n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); m * n];
    for k in 0..n {
        for l in 0..m {
            let mut acc = C64::new(0.0, 0.0);
            for b in 0..n {
                acc += s[l + b * m] * cis_frac(-((k * b) as i64), n as i64);
            }
            out[l + m * k] = acc / (n as f64).sqrt();
        }
    }
    out
}

/// Inverse Zak transform written as `(F_N^H ⊗ I_M)` applied to the stacked columns.
pub fn idzt_kron(x: &[C64], m: usize, n: usize) -> Vec<C64> {
    let mn = m * n;
    let mut out = vec![C64::new(0.0, 0.0); mn];
    for row in 0..mn {
        let (b, l) = (row / m, row % m);
        for col in 0..mn {
            let (k, l2) = (col / m, col % m);
            if l == l2 {
                out[row] += cis_frac((b * k) as i64, n as i64) / (n as f64).sqrt() * x[col];
            }
        }
    }
    out
}

/// `X_TF[m + M n] = (MN)^{-1/2} Σ_{k,l} X[l + M k] e^{j2π(nk/N − ml/M)}`.
pub fn isfft(x: &[C64], m: usize, n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); m * n];
    let norm = ((m * n) as f64).sqrt();
    for nn in 0..n {
        for mm in 0..m {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                for l in 0..m {
                    acc += x[l + m * k]
                        * cis(nn as f64 * k as f64 / n as f64 - mm as f64 * l as f64 / m as f64);
                }
            }
            out[mm + m * nn] = acc / norm;
        }
    }
    out
}

/// OFDM-style synthesis: `s(t + M n) = M^{-1/2} Σ_m X_TF[m + M n] e^{j2π m t/M}`.
pub fn heisenberg(tf: &[C64], m: usize, n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); m * n];
    for nn in 0..n {
        for t in 0..m {
            let mut acc = C64::new(0.0, 0.0);
            for mm in 0..m {
                acc += tf[mm + m * nn] * cis_frac((mm * t) as i64, m as i64);
            }
            out[t + m * nn] = acc / (m as f64).sqrt();
        }
    }
    out
}

/// `s(p) = N^{-1/2} Σ_k X[[p]_M + M k] e^{j2π kp/MN}`.
pub fn scifdm(x: &[C64], m: usize, n: usize) -> Vec<C64> {
    let mn = m * n;
    (0..mn)
        .map(|p| {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += x[p % m + m * k] * cis_frac((k * p) as i64, mn as i64);
            }
            acc / (n as f64).sqrt()
        })
        .collect()
}

/// The same SC-IFDM map built from explicit matrices: block DFTs, the
/// interleaving permutation matrix, then the large IDFT.
pub fn scifdm_pipeline(x: &[C64], m: usize, n: usize) -> Vec<C64> {
    let mn = m * n;
    let mut spread = vec![C64::new(0.0, 0.0); mn];
    for k in 0..n {
        for f in 0..m {
            let mut acc = C64::new(0.0, 0.0);
            for l in 0..m {
                acc += x[l + m * k] * cis_frac(-((f * l) as i64), m as i64);
            }
            spread[f + m * k] = acc / (m as f64).sqrt();
        }
    }
    // subcarrier k + f N receives output f of block k
    let mut carriers = vec![C64::new(0.0, 0.0); mn];
    for k in 0..n {
        for f in 0..m {
            carriers[k + f * n] = spread[f + m * k];
        }
    }
    (0..mn)
        .map(|p| {
            let acc: C64 = (0..mn)
                .map(|q| carriers[q] * cis_frac((p * q) as i64, mn as i64))
                .sum();
            acc / (mn as f64).sqrt()
        })
        .collect()
}

/// Inverse discrete Fresnel transform, written out.
pub fn idfnt(x: &[C64]) -> Vec<C64> {
    let mn = x.len() as i64;
    let lead = C64::from_polar(1.0, PI / 4.0) / (mn as f64).sqrt();
    (0..mn)
        .map(|p| {
            let acc: C64 = (0..mn)
                .map(|i| x[i as usize] * cis_frac(-(p - i) * (p - i), 2 * mn))
                .sum();
            acc * lead
        })
        .collect()
}

/// Inverse DAFT with `c1 = c1'/(2MN)` and a real `c2`.
pub fn idaft(x: &[C64], c1_prime: i64, c2: f64) -> Vec<C64> {
    let mn = x.len() as i64;
    (0..mn)
        .map(|p| {
            let acc: C64 = (0..mn)
                .map(|i| {
                    x[i as usize]
                        * cis_frac(c1_prime * p * p, 2 * mn)
                        * cis(c2 * (i * i) as f64)
                        * cis_frac(p * i, mn)
                })
                .sum();
            acc / (mn as f64).sqrt()
        })
        .collect()
}

pub fn fmcw_chirp(mn: usize) -> Vec<C64> {
    (0..mn as i64)
        .map(|p| cis_frac(p * p, 2 * mn as i64))
        .collect()
}

pub fn ocdm_chirp(i: usize, mn: usize) -> Vec<C64> {
    let lead = C64::from_polar(1.0, PI / 4.0);
    (0..mn as i64)
        .map(|p| lead * cis_frac(-(p - i as i64) * (p - i as i64), 2 * mn as i64))
        .collect()
}

pub fn afdm_chirp(i: usize, c1_prime: i64, mn: usize) -> Vec<C64> {
    let (i, mn) = (i as i64, mn as i64);
    (0..mn)
        .map(|p| cis_frac(c1_prime * p * p, 2 * mn) * cis_frac(p * i, mn))
        .collect()
}

/// Delay bins `k` at which a chirp projects, one per `l`, straight from the
/// modular support conditions.
pub fn fmcw_support(m: usize, n: usize) -> Vec<(usize, usize)> {
    (0..m)
        .map(|l| (l, (m as i64 / 2 + l as i64).rem_euclid(n as i64) as usize))
        .collect()
}

pub fn ocdm_support(i: usize, m: usize, n: usize) -> Vec<(usize, usize)> {
    (0..m)
        .map(|l| {
            (
                l,
                (-(m as i64) / 2 + i as i64 - l as i64).rem_euclid(n as i64) as usize,
            )
        })
        .collect()
}

pub fn afdm_support(i: usize, c1_prime: i64, m: usize, n: usize) -> Vec<(usize, usize)> {
    (0..m)
        .map(|l| {
            let k = c1_prime * m as i64 / 2 + c1_prime * l as i64 + i as i64;
            (l, k.rem_euclid(n as i64) as usize)
        })
        .collect()
}

/// One path `(gain, delay, doppler)` of a cyclic doubly dispersive channel.
pub type Path = (C64, usize, i64);

/// `y(p) = Σ_r h_r e^{j2π k_r (p − l_r)/MN} s([p − l_r]_{MN})`.
pub fn cyclic_channel(s: &[C64], paths: &[Path]) -> Vec<C64> {
    let mn = s.len() as i64;
    (0..mn)
        .map(|p| {
            paths
                .iter()
                .map(|&(h, l, k)| {
                    let q = (p - l as i64).rem_euclid(mn);
                    h * cis_frac(k * q, mn) * s[q as usize]
                })
                .sum()
        })
        .collect()
}

/// The three-path test channel, unit power after normalization.
pub fn three_paths() -> Vec<Path> {
    let raw = [
        (C64::new(0.8, 0.0), 0, 0),
        (C64::new(0.4, 0.3), 1, 1),
        (C64::new(0.2, -0.2), 2, -1),
    ];
    let p: f64 = raw.iter().map(|r| r.0.norm_sqr()).sum::<f64>().sqrt();
    raw.iter().map(|&(h, l, k)| (h / p, l, k)).collect()
}

pub fn spec_of(paths: &[Path]) -> mwave::channel::ChannelSpec {
    use mwave::channel::{ChannelPath, ChannelSpec, Normalization};
    ChannelSpec::new(
        paths
            .iter()
            .map(|&(h, l, k)| ChannelPath::new(h, l, k))
            .collect(),
        Normalization::Raw,
    )
    .unwrap()
}

/// `log2(1+γ)` scaled by each printed pre-log factor, recomputed from scratch.
pub struct RateOracle {
    pub m: f64,
    pub n: f64,
    pub alpha: f64,
    pub l_fcp: f64,
    pub t: f64,
    pub t_cp: f64,
    pub phi_otfs: f64,
    pub phi_ofdm: f64,
    pub th_ofdm: f64,
    pub th_otfs: f64,
    pub th_ocdm: f64,
    pub th_afdm: f64,
}

impl RateOracle {
    pub fn otfs_ofdm(&self, g: f64) -> f64 {
        let c = (1.0 + g).ln() / std::f64::consts::LN_2;
        (self.m * self.n / self.alpha - self.phi_otfs) / (self.m * self.n + self.n * self.l_fcp) * c
            + (self.t / self.alpha - self.phi_ofdm) / (self.t + self.t_cp) * c
    }
    pub fn ofdm(&self, g: f64) -> f64 {
        (self.t - self.th_ofdm) / (self.t + self.t_cp) * (1.0 + g).ln() / std::f64::consts::LN_2
    }
    pub fn otfs_fcp(&self, g: f64) -> f64 {
        (self.m - self.th_otfs) / (self.m + self.l_fcp) * (1.0 + g).ln() / std::f64::consts::LN_2
    }
    pub fn ocdm(&self, g: f64) -> f64 {
        (self.m * self.n - self.th_ocdm) / (self.m * self.n) * (1.0 + g).ln()
            / std::f64::consts::LN_2
    }
    pub fn afdm(&self, g: f64) -> f64 {
        (self.m * self.n - self.th_afdm) / (self.m * self.n) * (1.0 + g).ln()
            / std::f64::consts::LN_2
    }
}
