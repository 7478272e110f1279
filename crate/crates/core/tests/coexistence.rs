mod common;

use common::*;
use mwave::channel::propagate;
use mwave::coexistence::{
    compose_otfs_ofdm, compose_scifdm_afdm, ofdm_branch_response, receive_ofdm_branch,
    receive_otfs_branch, receive_scifdm_afdm, CoexOtfsOfdmConfig, CoexScifdmAfdmConfig,
    GuardRadius, Owner, ScifdmAfdmLayout,
};
use mwave::lattice::{precode_allocate, Chirp};
use mwave::receivers::EqualizerConfig;
use mwave::transforms::{sc_ifdm_demodulate, AfdmParams, LatticeGrid};
use mwave::C64;
use proptest::prelude::*;

fn zeros(len: usize) -> Vec<C64> {
    vec![C64::new(0.0, 0.0); len]
}

#[test]
fn blocks_alternate_for_alpha_two() {
    let cfg = CoexOtfsOfdmConfig::new(8, 8, 2, 2).unwrap();
    let owners: Vec<Owner> = cfg.block_owners();
    for (b, o) in owners.iter().enumerate() {
        assert_eq!(*o, if b % 2 == 0 { Owner::Otfs } else { Owner::Ofdm });
    }
    let shifted = CoexOtfsOfdmConfig::with_offset(8, 8, 4, 3, 2).unwrap();
    assert_eq!(
        shifted
            .block_owners()
            .iter()
            .filter(|o| **o == Owner::Otfs)
            .count(),
        2
    );
    assert!(shifted.is_otfs_block(3) && shifted.is_otfs_block(7));
    assert!(CoexOtfsOfdmConfig::new(8, 8, 1, 2).is_err());
    assert!(CoexOtfsOfdmConfig::new(8, 6, 4, 2).is_err());
}

#[test]
fn otfs_symbols_only_occupy_their_blocks() {
    let cfg = CoexOtfsOfdmConfig::new(8, 8, 2, 2).unwrap();
    let a = random_vec(cfg.otfs_len(), &mut rng(61));
    let f = compose_otfs_ofdm(&a, &zeros(cfg.ofdm_len()), &cfg).unwrap();
    for (b, block) in f.samples().chunks(8).enumerate() {
        if b % 2 == 1 {
            assert!(energy(block) < 1e-28);
        }
    }
    assert!((f.energy() - energy(&a)).abs() < 1e-12 * energy(&a));
}

#[test]
fn otfs_branch_follows_the_closed_form() {
    let (m, n, l) = (8, 8, 2);
    let cfg = CoexOtfsOfdmConfig::new(m, n, 2, l).unwrap();
    let mut r = rng(62);
    let a = random_vec(cfg.otfs_len(), &mut r);
    let b = random_vec(cfg.ofdm_len(), &mut r);
    let paths = three_paths();
    let spec = spec_of(&paths);
    let rx = propagate(
        &compose_otfs_ofdm(&a, &b, &cfg).unwrap(),
        &spec,
        cfg.prefix(),
    )
    .unwrap();
    let got = receive_otfs_branch(&rx, &cfg, &spec, EqualizerConfig::zf()).unwrap();
    let dd = precode_allocate(
        &LatticeGrid::from_vec(m, n / 2, a.clone()).unwrap(),
        &cfg.precode(),
    )
    .unwrap();
    let period = ((m + l) * n) as i64;
    for k in 0..n {
        for ll in 0..m {
            let mut want = C64::new(0.0, 0.0);
            for &(h, lr, kr) in &paths {
                let ks = (k as i64 - kr).rem_euclid(n as i64) as usize;
                let ls = (ll + m - lr) % m;
                want +=
                    h * cis_frac(kr * (l as i64 + ll as i64 - lr as i64), period) * dd.get(ks, ls);
            }
            assert!((got.y_dd.get(k, ll) - want).norm() < 1e-12, "({k},{ll})");
        }
    }
    assert!(max_abs_diff(&got.symbols, &a) < 1e-10);
}

#[test]
fn ofdm_branch_sees_one_tap_per_subcarrier() {
    let (m, n, l) = (8, 8, 2);
    let cfg = CoexOtfsOfdmConfig::new(m, n, 2, l).unwrap();
    let mut r = rng(63);
    let a = random_vec(cfg.otfs_len(), &mut r);
    let b = random_vec(cfg.ofdm_len(), &mut r);
    let paths: Vec<Path> = three_paths()
        .into_iter()
        .map(|(h, d, _)| (h, d, 0))
        .collect();
    let spec = spec_of(&paths);
    let rx = propagate(
        &compose_otfs_ofdm(&a, &b, &cfg).unwrap(),
        &spec,
        cfg.prefix(),
    )
    .unwrap();
    let resp = ofdm_branch_response(&cfg, &spec).unwrap();
    assert!(!resp.out_of_model);
    let got = receive_ofdm_branch(&rx, &cfg, &resp, EqualizerConfig::zf()).unwrap();
    for (j, blk) in (1..n).step_by(2).enumerate() {
        for sc in 0..m {
            let hf: C64 = paths
                .iter()
                .map(|&(h, d, _)| h * cis_frac(-((sc * d) as i64), m as i64))
                .sum();
            assert!((got.y_freq.get(blk, sc) - hf * b[j * m + sc]).norm() < 1e-12);
        }
    }
    assert!(max_abs_diff(&got.symbols, &b) < 1e-10);
}

#[test]
fn short_block_prefix_is_refused() {
    let cfg = CoexOtfsOfdmConfig::new(8, 8, 2, 1).unwrap();
    assert!(ofdm_branch_response(&cfg, &spec_of(&three_paths())).is_err());
}

fn layout(m: usize, n: usize, c1: i64, chirps: Vec<usize>) -> ScifdmAfdmLayout {
    let cfg =
        CoexScifdmAfdmConfig::afdm(m, n, c1, chirps, GuardRadius::new(1, 2), 20.0, 2).unwrap();
    ScifdmAfdmLayout::new(&cfg).unwrap()
}

#[test]
fn lattice_ownership_partitions_the_grid() {
    let lay = layout(16, 16, 2, vec![0, 5]);
    let chirp_bins = lay
        .owners
        .iter()
        .filter(|o| matches!(o, Owner::Chirp(_)))
        .count();
    assert_eq!(chirp_bins, 32);
    assert_eq!(chirp_bins + lay.data_len() + lay.guard_bins.len(), 256);
    for &(l, k) in &afdm_support(5, 2, 16, 16) {
        assert_eq!(lay.owners[l + 16 * k], Owner::Chirp(1));
    }
}

#[test]
fn chirp_bins_carry_the_power_ratio() {
    let lay = layout(16, 16, 4, vec![3]);
    let g = lay.chirp_grid();
    for &(l, k) in &lay.maps[0].entries {
        assert!((g.get(k, l).norm_sqr() - 100.0).abs() < 1e-9);
    }
    let f = compose_scifdm_afdm(&zeros(lay.data_len()), &lay).unwrap();
    let amp = (100.0f64 / 16.0).sqrt();
    let want: Vec<C64> = afdm_chirp(3, 4, 256).into_iter().map(|c| c * amp).collect();
    assert!(rel_err(f.samples(), &want) < 1e-12);
}

#[test]
fn colliding_chirps_are_rejected() {
    // chirps N apart share a support
    let cfg =
        CoexScifdmAfdmConfig::afdm(8, 8, 2, vec![1, 9], GuardRadius::new(0, 0), 20.0, 0).unwrap();
    assert!(ScifdmAfdmLayout::new(&cfg).is_err());
}

#[test]
fn fmcw_layout_uses_the_fmcw_support() {
    let cfg = CoexScifdmAfdmConfig::fmcw(16, 16, GuardRadius::new(1, 2), 15.0, 2);
    let lay = ScifdmAfdmLayout::new(&cfg).unwrap();
    assert_eq!(lay.maps[0].entries, fmcw_support(16, 16));
    assert_eq!(lay.maps[0].chirp, Chirp::fmcw());
}

/// Cross-leakage in both directions after the channel, as energy fractions.
fn scifdm_afdm_leakage(c1: i64, seed: u64) -> (f64, f64) {
    let (m, n) = (16, 16);
    let lay = layout(m, n, c1, vec![0]);
    assert!(lay.data_len() > 0);
    let spec = spec_of(&three_paths());
    let data = random_vec(lay.data_len(), &mut rng(seed));
    let pre = lay.cfg.prefix();
    let run = |d: &[C64]| {
        let f = propagate(&compose_scifdm_afdm(d, &lay).unwrap(), &spec, pre).unwrap();
        sc_ifdm_demodulate(f.samples(), m, n).unwrap().into_vec()
    };
    let chirp_only = run(&zeros(data.len()));
    let both = run(&data);
    let data_only: Vec<C64> = both.iter().zip(&chirp_only).map(|(a, b)| a - b).collect();
    let part = |v: &[C64], f: &dyn Fn(Owner) -> bool| -> f64 {
        v.iter()
            .zip(&lay.owners)
            .filter(|(_, o)| f(**o))
            .map(|(x, _)| x.norm_sqr())
            .sum()
    };
    let is_chirp = |o: Owner| matches!(o, Owner::Chirp(_));
    let is_data = |o: Owner| o == Owner::Data;
    let to_chirp = part(&data_only, &is_chirp) / part(&chirp_only, &is_chirp);
    let to_data = part(&chirp_only, &is_data) / part(&data_only, &is_data);
    (to_chirp, to_data)
}

#[test]
fn data_and_chirps_do_not_leak_into_each_other() {
    for c1 in [2, 4] {
        let (a, b) = scifdm_afdm_leakage(c1, 64);
        assert!(a < 1e-10 && b < 1e-10, "c1'={c1}: {a:e} {b:e}");
    }
}

#[test]
fn data_is_recovered_beside_the_chirps() {
    let lay = layout(16, 16, 2, vec![0]);
    let spec = spec_of(&three_paths());
    let data = random_vec(lay.data_len(), &mut rng(65));
    let rx = propagate(
        &compose_scifdm_afdm(&data, &lay).unwrap(),
        &spec,
        lay.cfg.prefix(),
    )
    .unwrap();
    let got = receive_scifdm_afdm(&rx, &lay, &spec, EqualizerConfig::zf()).unwrap();
    assert!(max_abs_diff(&got.data, &data) < 1e-9);
    assert_eq!(got.chirp_bins[0].len(), 16);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn branches_stay_isolated_for_any_payload(seed in any::<u64>(), q1 in 0usize..2) {
        let cfg = CoexOtfsOfdmConfig::with_offset(8, 8, 2, q1, 2).unwrap();
        let spec = spec_of(&three_paths());
        let mut r = rng(seed);
        let a = random_vec(cfg.otfs_len(), &mut r);
        let b = random_vec(cfg.ofdm_len(), &mut r);
        let only_b = propagate(&compose_otfs_ofdm(&zeros(a.len()), &b, &cfg).unwrap(), &spec, cfg.prefix()).unwrap();
        let only_a = propagate(&compose_otfs_ofdm(&a, &zeros(b.len()), &cfg).unwrap(), &spec, cfg.prefix()).unwrap();
        let otfs = receive_otfs_branch(&only_b, &cfg, &spec, EqualizerConfig::zf()).unwrap();
        prop_assert!(otfs.y_dd.energy() < 1e-24 * energy(&b));
        let resp = ofdm_branch_response(&cfg, &spec.without_doppler()).unwrap();
        let ofdm = receive_ofdm_branch(&only_a, &cfg, &resp, EqualizerConfig::zf()).unwrap();
        prop_assert!(ofdm.y_freq.energy() < 1e-24 * energy(&a));
    }

    #[test]
    fn chirp_support_sits_where_the_layout_says(i in 0usize..256, c1 in 1i64..5) {
        let p = AfdmParams::new(c1, 0.0).unwrap();
        let cfg = CoexScifdmAfdmConfig::afdm(16, 16, c1, vec![i], GuardRadius::new(0, 0), 0.0, 0).unwrap();
        let lay = ScifdmAfdmLayout::new(&cfg).unwrap();
        prop_assert_eq!(&lay.maps[0].entries, &afdm_support(i, c1, 16, 16));
        prop_assert_eq!(lay.maps[0].chirp, Chirp::afdm(p, i));
    }
}
