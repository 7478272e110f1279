mod common;

use common::*;
use mwave::lattice::{
    chirp_index_map, embed_chirp, omega, otfs_phase_apply, precode_allocate, precode_recover,
    project_chirp, tf_occupancy, Chirp, PhaseMatrix, PrecodeParams, SupportForm,
};
use mwave::transforms::{
    idzt, isfft, sc_ifdm_demodulate, sc_ifdm_modulate, AfdmParams, Direction, LatticeGrid,
};
use mwave::C64;
use proptest::prelude::*;

fn support_of(lattice: &LatticeGrid, tol: f64) -> Vec<(usize, usize)> {
    let total = lattice.energy();
    let mut out = Vec::new();
    for l in 0..lattice.m() {
        for k in 0..lattice.n() {
            if lattice.get(k, l).norm_sqr() > tol * total {
                out.push((l, k));
            }
        }
    }
    out
}

#[test]
fn phase_matrix_values() {
    assert_eq!(omega(0, 5, 4, 4), C64::new(1.0, 0.0));
    assert!((omega(1, 4, 4, 4) - C64::new(0.0, -1.0)).norm() < 1e-15);
    assert!((omega(2, 2, 4, 4) - C64::new(0.0, -1.0)).norm() < 1e-15);
    let d = PhaseMatrix::new(4, 2).diagonal();
    assert_eq!(d.len(), 8);
    assert!((d[1 + 4] - cis_frac(-1, 8)).norm() < 1e-15);
}

#[test]
fn phase_correction_turns_the_lattice_into_otfs() {
    let mut r = rng(21);
    for (m, n) in [(8, 8), (16, 4), (4, 16)] {
        let x = random_vec(m * n, &mut r);
        let g = LatticeGrid::from_vec(m, n, x.clone()).unwrap();
        let s = sc_ifdm_modulate(&otfs_phase_apply(&g, Direction::Forward));
        assert!(rel_err(s.samples(), &idzt_kron(&x, m, n)) < 1e-12);
        assert!(rel_err(s.samples(), idzt(&g).samples()) < 1e-12);
        let back = otfs_phase_apply(
            &otfs_phase_apply(&g, Direction::Forward),
            Direction::Inverse,
        );
        assert!(rel_err(back.as_slice(), &x) < 1e-14);
    }
}

fn check_support(samples: &[C64], m: usize, n: usize, want: &[(usize, usize)]) {
    let lat = sc_ifdm_demodulate(samples, m, n).unwrap();
    let on: f64 = want.iter().map(|&(l, k)| lat.get(k, l).norm_sqr()).sum();
    let off = (lat.energy() - on) / lat.energy();
    assert!(off < 1e-9, "off-support fraction {off}");
    assert_eq!(want.len(), m);
}

#[test]
fn fmcw_support_follows_its_condition() {
    for (m, n) in [(32, 32), (16, 8), (8, 8)] {
        let map = chirp_index_map(Chirp::fmcw(), m, n).unwrap();
        assert_eq!(map.form, SupportForm::Fmcw);
        let want = fmcw_support(m, n);
        assert_eq!(map.entries, want);
        check_support(&fmcw_chirp(m * n), m, n, &want);
    }
    // M=N=32: the chirp starts at Doppler bin 16 on the first delay bin
    assert_eq!(fmcw_support(32, 32)[0], (0, 16));
}

#[test]
fn ocdm_support_follows_its_condition() {
    let (m, n) = (32, 32);
    for i in [0, 16, 32, 1000] {
        let map = chirp_index_map(Chirp::ocdm(i), m, n).unwrap();
        let want = ocdm_support(i, m, n);
        assert_eq!(map.entries, want, "i={i}");
        check_support(&ocdm_chirp(i, m * n), m, n, &want);
    }
}

#[test]
fn ocdm_chirps_n_apart_share_a_support() {
    let (m, n) = (16, 8);
    let a = chirp_index_map(Chirp::ocdm(3), m, n).unwrap();
    let b = chirp_index_map(Chirp::ocdm(3 + n), m, n).unwrap();
    assert_eq!(a.entries, b.entries);
    let ca = ocdm_chirp(3, m * n);
    let cb = ocdm_chirp(3 + n, m * n);
    let inner: C64 = ca.iter().zip(&cb).map(|(x, y)| x.conj() * y).sum();
    assert!(inner.norm() < 1e-9, "distinct chirps are orthogonal");
}

#[test]
fn afdm_support_follows_its_condition() {
    let (m, n) = (32, 32);
    for c1 in [1, 2, 4] {
        for i in [0, 5, 16] {
            let p = AfdmParams::new(c1, 0.0).unwrap();
            let map = chirp_index_map(Chirp::afdm(p, i), m, n).unwrap();
            let want = afdm_support(i, c1, m, n);
            assert_eq!(map.entries, want, "c1'={c1} i={i}");
            check_support(&afdm_chirp(i, c1, m * n), m, n, &want);
        }
    }
}

#[test]
fn support_values_are_scaled_chirp_samples() {
    let (m, n) = (16, 16);
    let chirp = Chirp::afdm(AfdmParams::new(2, 0.0).unwrap(), 7);
    let map = chirp_index_map(chirp, m, n).unwrap();
    let lat = sc_ifdm_demodulate(&afdm_chirp(7, 2, m * n), m, n).unwrap();
    for &(l, k) in &map.entries {
        let want = (n as f64).sqrt()
            * afdm_chirp(7, 2, m * n)[l]
            * cis_frac(-((k * l) as i64), (m * n) as i64);
        assert!((lat.get(k, l) - want).norm() < 1e-10);
    }
}

#[test]
fn embedded_chirp_synthesizes_the_chirp() {
    let (m, n) = (16, 8);
    let amp = C64::new(0.3, -0.4);
    let map = chirp_index_map(Chirp::ocdm(9), m, n).unwrap();
    let g = embed_chirp(&LatticeGrid::zeros(m, n), &map, amp, false).unwrap();
    let s = sc_ifdm_modulate(&g);
    let want: Vec<C64> = ocdm_chirp(9, m * n).into_iter().map(|c| c * amp).collect();
    assert!(rel_err(s.samples(), &want) < 1e-12);
    assert!((project_chirp(&g, &map) - amp).norm() < 1e-12);
    assert!(
        embed_chirp(&g, &map, amp, false).is_err(),
        "occupied bins are a collision"
    );
}

#[test]
fn odd_delay_count_is_rejected() {
    assert!(chirp_index_map(Chirp::fmcw(), 5, 5).is_err());
}

/// TF energy of a precoded grid outside the predicted mask, as a fraction.
fn leakage(small: &LatticeGrid, p: &PrecodeParams) -> f64 {
    let full = precode_allocate(small, p).unwrap();
    let (m, n) = (full.m(), full.n());
    let tf = isfft(&full);
    let mask = tf_occupancy(p, m, n).unwrap();
    let mut off = 0.0;
    for nn in 0..n {
        for mm in 0..m {
            let inside = (nn + p.alpha - p.q1).is_multiple_of(p.alpha)
                && (mm + p.beta - p.q2).is_multiple_of(p.beta);
            assert_eq!(inside, mask.get(nn, mm));
            if !inside {
                off += tf.get(nn, mm).norm_sqr();
            }
        }
    }
    off / tf.energy()
}

#[test]
fn occupancy_mask_example() {
    let p = PrecodeParams::new(2, 4, 1, 3).unwrap();
    let mask = tf_occupancy(&p, 8, 8).unwrap();
    assert_eq!(mask.count(), 8);
    assert!(mask.get(1, 3) && mask.get(7, 7) && !mask.get(0, 3) && !mask.get(1, 2));
}

#[test]
fn precoding_rejects_bad_offsets() {
    assert!(PrecodeParams::new(2, 1, 2, 0).is_err());
    assert!(PrecodeParams::new(0, 1, 0, 0).is_err());
    assert!(PrecodeParams::new(4, 1, 0, 0).unwrap().check(8, 6).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn precoded_energy_stays_on_its_mask(a in 0usize..3, b in 0usize..3, q1 in 0usize..4, q2 in 0usize..4, seed in any::<u64>()) {
        let (alpha, beta) = ([1, 2, 4][a], [1, 2, 4][b]);
        let p = PrecodeParams::new(alpha, beta, q1 % alpha, q2 % beta).unwrap();
        let small = LatticeGrid::from_vec(8 / beta, 8 / alpha, random_vec(64 / (alpha * beta), &mut rng(seed))).unwrap();
        prop_assert!(leakage(&small, &p) < 1e-20);
        let full = precode_allocate(&small, &p).unwrap();
        prop_assert!((full.energy() - small.energy()).abs() < 1e-12 * small.energy());
        prop_assert!(rel_err(precode_recover(&full, &p).unwrap().as_slice(), small.as_slice()) < 1e-13);
    }

    #[test]
    fn every_chirp_has_one_bin_per_delay(i in 0usize..256, c1 in 1i64..5) {
        let (m, n) = (16, 16);
        let p = AfdmParams::new(c1, 0.0).unwrap();
        let map = chirp_index_map(Chirp::afdm(p, i), m, n).unwrap();
        prop_assert_eq!(map.entries.len(), m);
        let lat = sc_ifdm_demodulate(&afdm_chirp(i, c1, m * n), m, n).unwrap();
        prop_assert_eq!(support_of(&lat, 1e-9), map.entries);
    }
}
