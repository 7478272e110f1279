//! Doubly-dispersive channel: integer delay/Doppler paths, prefixes, AWGN
//! and effective-channel matrices.
//!
//! Convention: `y(p) = Σ_r h_r z_r^{p-l_r} s([p-l_r]_{MN})` with
//! `z_r = e^{j2π k_r/MN}`, i.e. `H = Σ_r h_r Π^{l_r} Δ_r` where `Π` is the
//! cyclic down-shift and `Δ_r = diag(z_r^q)` acts first.
//!
//! Transmission with a prefix is simulated as a linear convolution over the
//! materialized stream. The Doppler clock starts at the first core sample
//! for whole-frame prefixes (so the cyclic model is reproduced exactly) and
//! at the first stream sample for per-block prefixes, where one Doppler bin
//! spans the extended frame of `(M+L)N` samples.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::transforms::dft::cis_ratio;
use crate::transforms::{Prefix, PrefixKind, TimeFrame};
use crate::waveform::Modem;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelPath {
    pub gain: C64,
    /// Delay in samples.
    pub delay: usize,
    /// Doppler in bins of `1/(MN)` cycles per sample; may be negative.
    pub doppler: i64,
}

impl ChannelPath {
    pub fn new(gain: C64, delay: usize, doppler: i64) -> Self {
        Self {
            gain,
            delay,
            doppler,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Normalization {
    /// Gains are rescaled so that `Σ|h_r|² = 1`.
    #[default]
    UnitPower,
    Raw,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    paths: Vec<ChannelPath>,
    normalization: Normalization,
}

impl ChannelSpec {
    pub fn new(paths: Vec<ChannelPath>, normalization: Normalization) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::Parameter("channel needs at least one path".into()));
        }
        if let Some(p) = paths
            .iter()
            .find(|p| !p.gain.re.is_finite() || !p.gain.im.is_finite())
        {
            return Err(Error::Parameter(format!(
                "path gain {} is not finite",
                p.gain
            )));
        }
        if normalization == Normalization::UnitPower
            && paths.iter().all(|p| p.gain.norm_sqr() == 0.0)
        {
            return Err(Error::Parameter(
                "cannot normalize an all-zero channel".into(),
            ));
        }
        Ok(Self {
            paths,
            normalization,
        })
    }

    /// `h = 1, l = 0, k = 0`.
    pub fn identity() -> Self {
        Self {
            paths: vec![ChannelPath::new(C64::new(1.0, 0.0), 0, 0)],
            normalization: Normalization::Raw,
        }
    }

    pub fn raw_paths(&self) -> &[ChannelPath] {
        &self.paths
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Paths with the normalization applied.
    pub fn paths(&self) -> Vec<ChannelPath> {
        let scale = match self.normalization {
            Normalization::Raw => 1.0,
            Normalization::UnitPower => {
                1.0 / self
                    .paths
                    .iter()
                    .map(|p| p.gain.norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            }
        };
        self.paths
            .iter()
            .map(|p| ChannelPath {
                gain: p.gain * scale,
                ..*p
            })
            .collect()
    }

    pub fn max_delay(&self) -> usize {
        self.paths.iter().map(|p| p.delay).max().unwrap_or(0)
    }

    pub fn is_static(&self) -> bool {
        self.paths.iter().all(|p| p.doppler == 0)
    }

    /// Same paths with every Doppler shift removed.
    pub fn without_doppler(&self) -> Self {
        Self {
            paths: self
                .paths
                .iter()
                .map(|p| ChannelPath { doppler: 0, ..*p })
                .collect(),
            normalization: self.normalization,
        }
    }

    fn check_taps(&self, mn: usize) -> Result<()> {
        match self.paths.iter().find(|p| p.delay >= mn) {
            Some(p) => Err(Error::Parameter(format!(
                "delay tap {} outside [0, {mn})",
                p.delay
            ))),
            None => Ok(()),
        }
    }
}

/// Dense `MN x MN` channel matrix.
pub fn build_channel_matrix(spec: &ChannelSpec, mn: usize) -> Result<DMatrix<C64>> {
    spec.check_taps(mn)?;
    let mut h = DMatrix::zeros(mn, mn);
    for path in spec.paths() {
        for q in 0..mn {
            let p = (q + path.delay) % mn;
            h[(p, q)] += path.gain * cis_ratio(path.doppler as i128 * q as i128, mn as i128);
        }
    }
    Ok(h)
}

/// `H s` evaluated path by path in `O(R MN)`.
pub fn apply_cyclic(spec: &ChannelSpec, samples: &[C64]) -> Result<Vec<C64>> {
    let mn = samples.len();
    spec.check_taps(mn)?;
    let mut y = vec![C64::new(0.0, 0.0); mn];
    for path in spec.paths() {
        for (q, s) in samples.iter().enumerate() {
            let z = cis_ratio(path.doppler as i128 * q as i128, mn as i128);
            y[(q + path.delay) % mn] += path.gain * z * s;
        }
    }
    Ok(y)
}

/// Linear time-varying convolution over a stream. Sample `t` sees the
/// Doppler phase `e^{j2π k (t - origin - l)/period}`.
fn apply_stream(paths: &[ChannelPath], stream: &[C64], origin: usize, period: usize) -> Vec<C64> {
    let mut y = vec![C64::new(0.0, 0.0); stream.len()];
    for path in paths {
        for t in path.delay..stream.len() {
            let e = t as i128 - origin as i128 - path.delay as i128;
            y[t] += path.gain
                * cis_ratio(path.doppler as i128 * e, period as i128)
                * stream[t - path.delay];
        }
    }
    y
}

/// Noise variance for a per-sample SNR in dB against unit signal power.
pub fn noise_variance(snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        0.0
    } else {
        10f64.powf(-snr_db / 10.0)
    }
}

/// Add circular complex Gaussian noise of variance `sigma2` in place.
pub fn add_noise<R: Rng + ?Sized>(samples: &mut [C64], sigma2: f64, rng: &mut R) {
    if sigma2 == 0.0 {
        return;
    }
    let sd = (sigma2 / 2.0).sqrt();
    for s in samples {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *s += C64::new(re * sd, im * sd);
    }
}

/// Noiseless channel output of a frame after prefix removal. A `None`
/// prefix means the ideal cyclic channel.
pub fn propagate(frame: &TimeFrame, spec: &ChannelSpec, prefix: Prefix) -> Result<TimeFrame> {
    let (m, n) = (frame.m(), frame.n());
    let mn = m * n;
    let paths = spec.paths();
    let frame = frame.clone().with_prefix(prefix);
    match prefix.kind {
        PrefixKind::None => TimeFrame::new(m, n, apply_cyclic(spec, frame.samples())?),
        kind => {
            if prefix.len < spec.max_delay() {
                return Err(Error::Configuration(format!(
                    "{} of length {} is shorter than the channel delay spread {}",
                    kind.name(),
                    prefix.len,
                    spec.max_delay()
                )));
            }
            let stream = frame.materialize();
            let y = match kind {
                PrefixKind::Fcp => apply_stream(&paths, &stream, 0, (m + prefix.len) * n),
                _ => apply_stream(&paths, &stream, prefix.len, mn),
            };
            TimeFrame::strip(m, n, prefix, &y)
        }
    }
}

/// Channel, AWGN at `snr_db` (per sample, unit signal power), prefix removal.
pub fn transmit<R: Rng + ?Sized>(
    frame: &TimeFrame,
    spec: &ChannelSpec,
    snr_db: f64,
    prefix: Prefix,
    rng: &mut R,
) -> Result<TimeFrame> {
    if snr_db.is_nan() {
        return Err(Error::Parameter("SNR is NaN".into()));
    }
    let mut out = propagate(frame, spec, prefix)?;
    add_noise(out.samples_mut(), noise_variance(snr_db), rng);
    Ok(out)
}

/// [`transmit`] with a fresh ChaCha20 stream for `seed`.
pub fn transmit_seeded(
    frame: &TimeFrame,
    spec: &ChannelSpec,
    snr_db: f64,
    prefix: Prefix,
    seed: u64,
) -> Result<TimeFrame> {
    transmit(
        frame,
        spec,
        snr_db,
        prefix,
        &mut ChaCha20Rng::seed_from_u64(seed),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    ScIfdm,
    Otfs,
    Ofdm,
}

fn domain_modem(domain: Domain, m: usize, n: usize) -> Result<Modem> {
    use crate::waveform::WaveformKind;
    let kind = match domain {
        Domain::ScIfdm => WaveformKind::ScIfdm,
        Domain::Otfs => WaveformKind::Otfs,
        Domain::Ofdm => WaveformKind::Ofdm,
    };
    Modem::new(&kind, m, n)
}

/// `A H A^H` for the domain's unitary analysis operator `A`.
pub fn effective_channel(
    h: &DMatrix<C64>,
    domain: Domain,
    m: usize,
    n: usize,
) -> Result<DMatrix<C64>> {
    let mn = m * n;
    if h.nrows() != mn || h.ncols() != mn {
        return Err(Error::dim("channel matrix", mn * mn, h.nrows() * h.ncols()));
    }
    let modem = domain_modem(domain, m, n)?;
    let mut left = DMatrix::zeros(mn, mn);
    for j in 0..mn {
        let col: Vec<C64> = h.column(j).iter().copied().collect();
        left.set_column(j, &nalgebra::DVector::from_vec(modem.demodulate(&col)?));
    }
    // row i of (A H) A^H is conj(A conj(row_i))
    let mut out = DMatrix::zeros(mn, mn);
    for i in 0..mn {
        let row: Vec<C64> = left.row(i).iter().map(|v| v.conj()).collect();
        for (j, v) in modem.demodulate(&row)?.into_iter().enumerate() {
            out[(i, j)] = v.conj();
        }
    }
    Ok(out)
}

/// Payload-to-observation channel of a modem: column `j` is the noiseless
/// observation of the `j`-th unit payload. Observations are the modem's
/// unitary analysis output ([`observe`]), so white noise stays white.
pub fn payload_channel(modem: &Modem, spec: &ChannelSpec, prefix: Prefix) -> Result<DMatrix<C64>> {
    let (m, n) = (modem.m(), modem.n());
    let cols = modem.payload_len();
    let mut out = DMatrix::zeros(m * n, cols);
    let mut unit = vec![C64::new(0.0, 0.0); cols];
    for j in 0..cols {
        unit[j] = C64::new(1.0, 0.0);
        let rx = propagate(&modem.modulate(&unit)?, spec, prefix)?;
        unit[j] = C64::new(0.0, 0.0);
        out.set_column(
            j,
            &nalgebra::DVector::from_vec(observe(modem, rx.samples())?),
        );
    }
    Ok(out)
}

/// Unitary length-`MN` analysis matching [`payload_channel`]'s rows: the
/// modem's own demodulator for full-grid kinds, the SC-IFDM lattice for
/// chirp kinds.
pub fn observe(modem: &Modem, samples: &[C64]) -> Result<Vec<C64>> {
    if modem.chirp_maps().is_empty() {
        modem.demodulate(samples)
    } else {
        Ok(crate::transforms::sc_ifdm_demodulate(samples, modem.m(), modem.n())?.into_vec())
    }
}
