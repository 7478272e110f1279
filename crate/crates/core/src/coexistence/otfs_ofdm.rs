//! OTFS and OFDM interleaved in time.
//!
//! Precoded OTFS (`β = 1`) only occupies symbol blocks with `[n - q1]_α = 0`;
//! OFDM symbols fill the remaining blocks. Every block carries its own
//! cyclic prefix of `L` samples, so a channel with delay spread `≤ L` keeps
//! blocks apart and each receiver simply masks out the other's blocks.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::Owner;
use crate::channel::{propagate, ChannelSpec};
use crate::error::{Error, Result};
use crate::lattice::{otfs_phase_apply, precode_allocate, PrecodeParams};
use crate::receivers::{Equalizer, EqualizerConfig, EqualizerMode, MMSE_FLOOR};
use crate::transforms::dft::cis_ratio;
use crate::transforms::{
    dzt, sc_ifdm_demodulate, sc_ifdm_modulate, Direction, LatticeGrid, Prefix, PrefixKind, TfGrid,
    TimeFrame,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoexOtfsOfdmConfig {
    pub m: usize,
    pub n: usize,
    pub alpha: usize,
    pub q1: usize,
    pub fcp_len: usize,
}

impl CoexOtfsOfdmConfig {
    pub fn new(m: usize, n: usize, alpha: usize, fcp_len: usize) -> Result<Self> {
        Self::with_offset(m, n, alpha, 0, fcp_len)
    }

    pub fn with_offset(
        m: usize,
        n: usize,
        alpha: usize,
        q1: usize,
        fcp_len: usize,
    ) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Parameter(format!(
                "grid dimensions must be positive (M={m}, N={n})"
            )));
        }
        if alpha < 2 {
            return Err(Error::Parameter(format!(
                "coexistence ratio alpha must be at least 2, got {alpha}"
            )));
        }
        PrecodeParams::new(alpha, 1, q1, 0)?.check(m, n)?;
        Ok(Self {
            m,
            n,
            alpha,
            q1,
            fcp_len,
        })
    }

    pub fn precode(&self) -> PrecodeParams {
        PrecodeParams {
            alpha: self.alpha,
            beta: 1,
            q1: self.q1,
            q2: 0,
        }
    }

    pub fn otfs_len(&self) -> usize {
        self.m * self.n / self.alpha
    }

    pub fn ofdm_len(&self) -> usize {
        self.m * self.n - self.otfs_len()
    }

    pub fn prefix(&self) -> Prefix {
        Prefix::new(PrefixKind::Fcp, self.fcp_len)
    }

    pub fn is_otfs_block(&self, block: usize) -> bool {
        (block + self.alpha - self.q1).is_multiple_of(self.alpha)
    }

    /// Block ownership, one entry per symbol block.
    pub fn block_owners(&self) -> Vec<Owner> {
        (0..self.n)
            .map(|b| {
                if self.is_otfs_block(b) {
                    Owner::Otfs
                } else {
                    Owner::Ofdm
                }
            })
            .collect()
    }

    fn ofdm_blocks(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|b| !self.is_otfs_block(*b))
    }

    fn check_delay(&self, spec: &ChannelSpec) -> Result<()> {
        if spec.max_delay() > self.fcp_len {
            return Err(Error::Configuration(format!(
                "per-block prefix {} is shorter than the channel delay spread {}",
                self.fcp_len,
                spec.max_delay()
            )));
        }
        Ok(())
    }

    /// Zero every block not owned by `owner` (the `G1` / `G2` selectors).
    fn mask(&self, samples: &[C64], keep_otfs: bool) -> Vec<C64> {
        let mut out = samples.to_vec();
        for (b, block) in out.chunks_mut(self.m).enumerate() {
            if self.is_otfs_block(b) != keep_otfs {
                block.fill(C64::new(0.0, 0.0));
            }
        }
        out
    }
}

/// Composite frame. `otfs_payload` is the `(N/α) x M` small DD grid in
/// delay-major order; `ofdm_payload` holds the OFDM symbols of the
/// non-OTFS blocks in block order, `M` subcarriers each.
pub fn compose_otfs_ofdm(
    otfs_payload: &[C64],
    ofdm_payload: &[C64],
    cfg: &CoexOtfsOfdmConfig,
) -> Result<TimeFrame> {
    let (m, n) = (cfg.m, cfg.n);
    if otfs_payload.len() != cfg.otfs_len() {
        return Err(Error::dim(
            "OTFS payload",
            cfg.otfs_len(),
            otfs_payload.len(),
        ));
    }
    if ofdm_payload.len() != cfg.ofdm_len() {
        return Err(Error::dim(
            "OFDM payload",
            cfg.ofdm_len(),
            ofdm_payload.len(),
        ));
    }
    let small = LatticeGrid::from_vec(m, n / cfg.alpha, otfs_payload.to_vec())?;
    let dd = precode_allocate(&small, &cfg.precode())?;
    let otfs = sc_ifdm_modulate(&otfs_phase_apply(&dd, Direction::Forward));
    let mut samples = cfg.mask(otfs.samples(), true);
    for (block, x) in cfg.ofdm_blocks().zip(ofdm_payload.chunks(m)) {
        let one = LatticeGrid::from_vec(1, m, x.to_vec())?;
        samples[block * m..(block + 1) * m].copy_from_slice(sc_ifdm_modulate(&one).samples());
    }
    Ok(TimeFrame::new(m, n, samples)?.with_prefix(cfg.prefix()))
}

#[derive(Clone, Debug)]
pub struct OtfsBranch {
    /// Full `N x M` delay-Doppler grid after the `G1` mask.
    pub y_dd: LatticeGrid,
    /// Equalized small-grid symbols, delay-major.
    pub symbols: Vec<C64>,
}

/// Small-grid payload to masked DD observation, built by running unit
/// payloads through the composite transmitter and the channel.
pub fn otfs_branch_channel(cfg: &CoexOtfsOfdmConfig, spec: &ChannelSpec) -> Result<DMatrix<C64>> {
    cfg.check_delay(spec)?;
    let (m, n) = (cfg.m, cfg.n);
    let zeros = vec![C64::new(0.0, 0.0); cfg.ofdm_len()];
    let mut unit = vec![C64::new(0.0, 0.0); cfg.otfs_len()];
    let mut h = DMatrix::zeros(m * n, cfg.otfs_len());
    for j in 0..cfg.otfs_len() {
        unit[j] = C64::new(1.0, 0.0);
        let tx = compose_otfs_ofdm(&unit, &zeros, cfg)?;
        unit[j] = C64::new(0.0, 0.0);
        let rx = propagate(&tx, spec, cfg.prefix())?;
        let y = dzt(&cfg.mask(rx.samples(), true), m, n)?;
        h.set_column(j, &nalgebra::DVector::from_column_slice(y.as_slice()));
    }
    Ok(h)
}

/// OTFS receiver with its equalizer prepared for one channel and noise level.
#[derive(Clone, Debug)]
pub struct OtfsBranchReceiver {
    cfg: CoexOtfsOfdmConfig,
    equalizer: Equalizer,
}

impl OtfsBranchReceiver {
    pub fn new(cfg: &CoexOtfsOfdmConfig, spec: &ChannelSpec, eq: EqualizerConfig) -> Result<Self> {
        let h = otfs_branch_channel(cfg, spec)?;
        Ok(Self {
            cfg: *cfg,
            equalizer: Equalizer::new(&h, eq)?,
        })
    }

    pub fn receive(&self, rx: &TimeFrame) -> Result<OtfsBranch> {
        let cfg = &self.cfg;
        if rx.m() != cfg.m || rx.n() != cfg.n {
            return Err(Error::dim("OTFS branch frame", cfg.m * cfg.n, rx.len()));
        }
        let y_dd = dzt(&cfg.mask(rx.samples(), true), cfg.m, cfg.n)?;
        let symbols = self.equalizer.apply(y_dd.as_slice())?;
        Ok(OtfsBranch { y_dd, symbols })
    }
}

/// One-shot form of [`OtfsBranchReceiver`].
pub fn receive_otfs_branch(
    rx: &TimeFrame,
    cfg: &CoexOtfsOfdmConfig,
    spec: &ChannelSpec,
    eq: EqualizerConfig,
) -> Result<OtfsBranch> {
    OtfsBranchReceiver::new(cfg, spec, eq)?.receive(rx)
}

/// Per-block, per-subcarrier one-tap gains of the OFDM user.
#[derive(Clone, Debug, PartialEq)]
pub struct OfdmResponse {
    /// `N x M`, rows are symbol blocks.
    pub gains: TfGrid,
    /// Set when the channel has Doppler: one-tap equalization then ignores
    /// inter-carrier interference.
    pub out_of_model: bool,
}

/// `H_n(m) = Σ_r h_r e^{-j2π m l_r/M} e^{j2π k_r (n(M+L)+L)/((M+L)N)}`.
pub fn ofdm_branch_response(cfg: &CoexOtfsOfdmConfig, spec: &ChannelSpec) -> Result<OfdmResponse> {
    cfg.check_delay(spec)?;
    let (m, n, l) = (cfg.m, cfg.n, cfg.fcp_len);
    let period = ((m + l) * n) as i128;
    let paths = spec.paths();
    let gains = TfGrid::from_fn(m, n, |nb, sc| {
        paths
            .iter()
            .map(|p| {
                let freq = cis_ratio(-((sc * p.delay) as i128), m as i128);
                let start = (nb * (m + l) + l) as i128;
                p.gain * freq * cis_ratio(p.doppler as i128 * start, period)
            })
            .sum()
    });
    let out_of_model = !spec.is_static();
    if out_of_model {
        log::warn!("OFDM branch is running through a channel with Doppler; one-tap equalization ignores ICI");
    }
    Ok(OfdmResponse {
        gains,
        out_of_model,
    })
}

#[derive(Clone, Debug)]
pub struct OfdmBranch {
    /// `N x M` frequency grid after the `G2` mask (OTFS rows are zero).
    pub y_freq: TfGrid,
    /// Equalized OFDM symbols in payload order.
    pub symbols: Vec<C64>,
}

pub fn receive_ofdm_branch(
    rx: &TimeFrame,
    cfg: &CoexOtfsOfdmConfig,
    response: &OfdmResponse,
    eq: EqualizerConfig,
) -> Result<OfdmBranch> {
    let (m, n) = (cfg.m, cfg.n);
    if rx.m() != m || rx.n() != n {
        return Err(Error::dim("OFDM branch frame", m * n, rx.len()));
    }
    let masked = cfg.mask(rx.samples(), false);
    let mut y = Vec::with_capacity(m * n);
    for block in masked.chunks(m) {
        y.extend(sc_ifdm_demodulate(block, 1, m)?.into_vec());
    }
    let y_freq = TfGrid::from_vec(m, n, y)?;
    let mut symbols = Vec::with_capacity(cfg.ofdm_len());
    for block in cfg.ofdm_blocks() {
        for sc in 0..m {
            let (v, h) = (y_freq.get(block, sc), response.gains.get(block, sc));
            let x = match eq.mode {
                EqualizerMode::Zf => {
                    if h.norm_sqr() == 0.0 {
                        return Err(Error::Numerical(format!(
                            "zero-forcing on a spectral null at block {block}, subcarrier {sc}"
                        )));
                    }
                    v / h
                }
                EqualizerMode::Mmse => {
                    h.conj() * v / (h.norm_sqr() + eq.noise_variance + MMSE_FLOOR)
                }
            };
            symbols.push(x);
        }
    }
    Ok(OfdmBranch { y_freq, symbols })
}
