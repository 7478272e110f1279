//! Self-check suite behind `mwave verify`: transform round trips, mother
//! versus reference synthesis, chirp sparsity, precoding occupancy and
//! noiseless coexistence isolation, on one frame size.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::channel::{propagate, ChannelSpec};
use crate::coexistence::{
    compose_otfs_ofdm, compose_scifdm_afdm, ofdm_branch_response, receive_ofdm_branch,
    CoexOtfsOfdmConfig, CoexScifdmAfdmConfig, GuardRadius, OtfsBranchReceiver, Owner,
    ScifdmAfdmLayout,
};
use crate::error::Result;
use crate::lattice::{
    chirp_index_map, precode_allocate, precode_recover, tf_occupancy, Chirp, PrecodeParams,
};
use crate::receivers::EqualizerConfig;
use crate::transforms::{
    daft_apply, dfnt_apply, dzt, heisenberg, idzt, isfft, sc_ifdm_demodulate, sc_ifdm_modulate,
    sfft, wigner, AfdmParams, Direction, LatticeGrid, TfGrid,
};
use crate::waveform::{
    compare_up_to_scalar, synthesize_mother, synthesize_reference, ChirpSet, WaveformKind,
};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, err: f64, tol: f64) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed: err < tol,
        detail: format!("error {err:.3e} (tolerance {tol:.0e})"),
    }
}

fn failed(name: impl Into<String>, e: crate::Error) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed: false,
        detail: e.to_string(),
    }
}

fn random_vec(len: usize, rng: &mut ChaCha20Rng) -> Vec<C64> {
    (0..len)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

fn rel_err(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den.max(f64::MIN_POSITIVE)).sqrt()
}

fn energy(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

fn transforms(m: usize, n: usize, rng: &mut ChaCha20Rng) -> Result<Vec<CheckResult>> {
    let mn = m * n;
    let x = random_vec(mn, rng);
    let grid = LatticeGrid::from_vec(m, n, x.clone())?;
    let tf = TfGrid::from_vec(m, n, x.clone())?;
    let afdm = AfdmParams::new(2, 0.25)?;
    Ok(vec![
        check(
            "transform: idzt then dzt",
            rel_err(dzt(idzt(&grid).samples(), m, n)?.as_slice(), &x),
            1e-12,
        ),
        check(
            "transform: isfft then sfft",
            rel_err(sfft(&isfft(&grid)).as_slice(), &x),
            1e-12,
        ),
        check(
            "transform: heisenberg then wigner",
            rel_err(wigner(heisenberg(&tf).samples(), m, n)?.as_slice(), &x),
            1e-12,
        ),
        check(
            "transform: sc-ifdm modulate then demodulate",
            rel_err(
                sc_ifdm_demodulate(sc_ifdm_modulate(&grid).samples(), m, n)?.as_slice(),
                &x,
            ),
            1e-12,
        ),
        check(
            "transform: fresnel inverse then forward",
            rel_err(
                &dfnt_apply(
                    &dfnt_apply(&x, mn, Direction::Inverse)?,
                    mn,
                    Direction::Forward,
                )?,
                &x,
            ),
            1e-12,
        ),
        check(
            "transform: affine inverse then forward",
            rel_err(
                &daft_apply(
                    &daft_apply(&x, afdm, mn, Direction::Inverse)?,
                    afdm,
                    mn,
                    Direction::Forward,
                )?,
                &x,
            ),
            1e-12,
        ),
    ])
}

fn equivalence(m: usize, n: usize, rng: &mut ChaCha20Rng) -> Vec<CheckResult> {
    let afdm = AfdmParams::new(2, 0.0).expect("c1' = 2");
    let kinds = [
        WaveformKind::Ofdm,
        WaveformKind::ScIfdm,
        WaveformKind::Otfs,
        WaveformKind::Fmcw,
        WaveformKind::Ocdm(ChirpSet::Only(vec![1])),
        WaveformKind::Afdm(afdm, ChirpSet::Only(vec![1])),
    ];
    kinds
        .iter()
        .map(|kind| {
            let name = format!("mother equals reference: {}", kind.name());
            let mut run = || -> Result<f64> {
                let x = random_vec(kind.payload_len(m, n), rng);
                let a = synthesize_mother(kind, &x, m, n)?;
                let b = synthesize_reference(kind, &x, m, n)?;
                let fit = compare_up_to_scalar(a.samples(), b.samples())?;
                Ok(fit.max_deviation.max((fit.scale.norm() - 1.0).abs()))
            };
            match run() {
                Ok(err) => check(name, err, 1e-10),
                Err(e) => failed(name, e),
            }
        })
        .collect()
}

fn sparsity(m: usize, n: usize) -> Vec<CheckResult> {
    let afdm = AfdmParams::new(2, 0.0).expect("c1' = 2");
    [Chirp::fmcw(), Chirp::ocdm(0), Chirp::afdm(afdm, 0)]
        .into_iter()
        .map(|chirp| {
            let name = format!("chirp support: {}", chirp.kind.name());
            let run = || -> Result<f64> {
                let map = chirp_index_map(chirp, m, n)?;
                let frame = crate::transforms::TimeFrame::new(m, n, chirp.samples(m * n))?;
                let grid = sc_ifdm_demodulate(frame.samples(), m, n)?;
                let mask = map.mask();
                let off: f64 = grid
                    .as_slice()
                    .iter()
                    .zip(&mask)
                    .filter(|(_, on)| !**on)
                    .map(|(v, _)| v.norm_sqr())
                    .sum();
                Ok(if map.entries.len() == m {
                    off / grid.energy()
                } else {
                    1.0
                })
            };
            match run() {
                Ok(err) => check(name, err, 1e-9),
                Err(e) => failed(name, e),
            }
        })
        .collect()
}

fn occupancy(m: usize, n: usize, rng: &mut ChaCha20Rng) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for alpha in [1, 2, 4].into_iter().filter(|a| n.is_multiple_of(*a)) {
        for beta in [1, 2, 4].into_iter().filter(|b| m.is_multiple_of(*b)) {
            let name = format!("precoding occupancy: alpha={alpha} beta={beta}");
            let mut run = || -> Result<(f64, f64)> {
                let p = PrecodeParams::new(alpha, beta, alpha - 1, 0)?;
                let small = LatticeGrid::from_vec(
                    m / beta,
                    n / alpha,
                    random_vec(m * n / (alpha * beta), rng),
                )?;
                let full = precode_allocate(&small, &p)?;
                let tf = isfft(&full);
                let mask = tf_occupancy(&p, m, n)?;
                let outside: f64 = tf
                    .as_slice()
                    .iter()
                    .zip(mask.as_slice())
                    .filter(|(_, on)| !**on)
                    .map(|(v, _)| v.norm_sqr())
                    .sum();
                let back = precode_recover(&full, &p)?;
                Ok((
                    outside / tf.energy(),
                    rel_err(back.as_slice(), small.as_slice()),
                ))
            };
            out.push(match run() {
                Ok((leak, rec)) => CheckResult {
                    name,
                    passed: leak < 1e-20 && rec < 1e-12,
                    detail: format!("energy outside mask {leak:.3e}, recovery error {rec:.3e}"),
                },
                Err(e) => failed(name, e),
            });
        }
    }
    out
}

fn coexistence(m: usize, n: usize, spec: &ChannelSpec, rng: &mut ChaCha20Rng) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let delay = spec.max_delay();
    let name = "coexistence isolation: otfs-ofdm";
    let mut run = || -> Result<f64> {
        let cfg = CoexOtfsOfdmConfig::new(m, n, 2, delay)?;
        let a = random_vec(cfg.otfs_len(), rng);
        let b = random_vec(cfg.ofdm_len(), rng);
        let za = vec![C64::new(0.0, 0.0); a.len()];
        let zb = vec![C64::new(0.0, 0.0); b.len()];
        let only_a = propagate(&compose_otfs_ofdm(&a, &zb, &cfg)?, spec, cfg.prefix())?;
        let only_b = propagate(&compose_otfs_ofdm(&za, &b, &cfg)?, spec, cfg.prefix())?;
        let otfs_rx = OtfsBranchReceiver::new(&cfg, spec, EqualizerConfig::zf())?;
        let resp = ofdm_branch_response(&cfg, &spec.without_doppler())?;
        let leak_to_otfs = energy(otfs_rx.receive(&only_b)?.y_dd.as_slice())
            / energy(otfs_rx.receive(&only_a)?.y_dd.as_slice());
        let eq = EqualizerConfig::zf();
        let leak_to_ofdm = energy(
            receive_ofdm_branch(&only_a, &cfg, &resp, eq)?
                .y_freq
                .as_slice(),
        ) / energy(
            receive_ofdm_branch(&only_b, &cfg, &resp, eq)?
                .y_freq
                .as_slice(),
        );
        Ok(leak_to_otfs.max(leak_to_ofdm))
    };
    out.push(match run() {
        Ok(err) => check(name, err, 1e-10),
        Err(e) => failed(name, e),
    });
    let name = "coexistence isolation: sc-ifdm-afdm";
    let mut run = || -> Result<f64> {
        let (gk, gl) = (
            spec.paths()
                .iter()
                .map(|p| p.doppler.unsigned_abs() as usize)
                .max()
                .unwrap_or(0),
            delay,
        );
        let cfg =
            CoexScifdmAfdmConfig::afdm(m, n, 2, vec![0], GuardRadius::new(gk, gl), 20.0, delay)?;
        let layout = ScifdmAfdmLayout::new(&cfg)?;
        let data = random_vec(layout.data_len(), rng);
        let prefix = cfg.prefix();
        let with_chirp = propagate(&compose_scifdm_afdm(&data, &layout)?, spec, prefix)?;
        let chirp_only = propagate(
            &compose_scifdm_afdm(&vec![C64::new(0.0, 0.0); data.len()], &layout)?,
            spec,
            prefix,
        )?;
        let lat = sc_ifdm_demodulate(with_chirp.samples(), m, n)?;
        let chirp_lat = sc_ifdm_demodulate(chirp_only.samples(), m, n)?;
        let data_lat: Vec<C64> = lat
            .as_slice()
            .iter()
            .zip(chirp_lat.as_slice())
            .map(|(a, b)| a - b)
            .collect();
        let share = |v: &[C64], owner: fn(&Owner) -> bool| -> f64 {
            let part: f64 = v
                .iter()
                .zip(&layout.owners)
                .filter(|(_, o)| owner(o))
                .map(|(x, _)| x.norm_sqr())
                .sum();
            part / energy(v).max(f64::MIN_POSITIVE)
        };
        let data_on_chirp = share(&data_lat, |o| matches!(o, Owner::Chirp(_)));
        let chirp_on_data = share(chirp_lat.as_slice(), |o| *o == Owner::Data);
        Ok(data_on_chirp.max(chirp_on_data))
    };
    out.push(match run() {
        Ok(err) => check(name, err, 1e-10),
        Err(e) => failed(name, e),
    });
    out
}

/// Run the suite on an `N x M` frame.
pub fn run_verify(m: usize, n: usize, spec: &ChannelSpec, seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = transforms(m, n, &mut rng)?;
    out.extend(equivalence(m, n, &mut rng));
    out.extend(sparsity(m, n));
    out.extend(occupancy(m, n, &mut rng));
    out.extend(coexistence(m, n, spec, &mut rng));
    Ok(out)
}
