mod common;

use common::*;
use mwave::transforms::{
    daft_apply, dfnt_apply, dzt, heisenberg, idzt, interleave_perm, invert_perm, isfft,
    sc_ifdm_demodulate, sc_ifdm_modulate, sfft, wigner, AfdmParams, Direction, LatticeGrid, TfGrid,
};
use mwave::C64;
use proptest::prelude::*;

const SIZES: [usize; 5] = [2, 4, 8, 16, 32];

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn grid(m: usize, n: usize, v: Vec<C64>) -> LatticeGrid {
    LatticeGrid::from_vec(m, n, v).unwrap()
}

#[test]
fn dzt_of_delta_is_flat_in_doppler() {
    let (m, n) = (4, 4);
    let mut s = vec![C64::new(0.0, 0.0); 16];
    s[1] = one();
    let x = dzt(&s, m, n).unwrap();
    for k in 0..n {
        for l in 0..m {
            let want = if l == 1 { 0.5 } else { 0.0 };
            assert!((x.get(k, l) - C64::new(want, 0.0)).norm() < 1e-15);
        }
    }
}

#[test]
fn dzt_of_constant_sits_on_zero_doppler() {
    let (m, n) = (4, 4);
    let x = dzt(&vec![one(); 16], m, n).unwrap();
    for k in 0..n {
        for l in 0..m {
            let want = if k == 0 { 2.0 } else { 0.0 };
            assert!((x.get(k, l) - C64::new(want, 0.0)).norm() < 1e-14);
        }
    }
}

#[test]
fn idzt_of_unit_bin_is_a_comb() {
    let (m, n) = (4, 4);
    let mut v = vec![C64::new(0.0, 0.0); 16];
    v[0] = one();
    let s = idzt(&grid(m, n, v));
    for (p, x) in s.samples().iter().enumerate() {
        let want = if p % m == 0 { 0.5 } else { 0.0 };
        assert!((x - C64::new(want, 0.0)).norm() < 1e-15, "p={p}");
    }
}

#[test]
fn zak_pair_matches_double_sum_and_kronecker_form() {
    let mut r = rng(11);
    for (m, n) in [(16, 16), (8, 4), (2, 32)] {
        let s = random_vec(m * n, &mut r);
        assert!(rel_err(dzt(&s, m, n).unwrap().as_slice(), &common::dzt(&s, m, n)) < 1e-12);
        let x = random_vec(m * n, &mut r);
        assert!(rel_err(idzt(&grid(m, n, x.clone())).samples(), &idzt_kron(&x, m, n)) < 1e-12);
    }
}

#[test]
fn isfft_of_unit_bin_is_a_plane_wave() {
    let (m, n) = (4, 4);
    let mut v = vec![C64::new(0.0, 0.0); 16];
    v[0] = one();
    let tf = isfft(&grid(m, n, v));
    for x in tf.as_slice() {
        assert!((x - C64::new(0.25, 0.0)).norm() < 1e-15);
    }
}

#[test]
fn symplectic_and_heisenberg_match_their_sums() {
    let mut r = rng(12);
    for (m, n) in [(8, 8), (16, 4)] {
        let x = random_vec(m * n, &mut r);
        let tf = isfft(&grid(m, n, x.clone()));
        assert!(rel_err(tf.as_slice(), &common::isfft(&x, m, n)) < 1e-12);
        let s = heisenberg(&tf);
        assert!(rel_err(s.samples(), &common::heisenberg(tf.as_slice(), m, n)) < 1e-12);
    }
}

#[test]
fn heisenberg_of_isfft_is_the_inverse_zak_transform() {
    let mut r = rng(13);
    let (m, n) = (16, 8);
    let x = random_vec(m * n, &mut r);
    let g = grid(m, n, x);
    assert!(rel_err(heisenberg(&isfft(&g)).samples(), idzt(&g).samples()) < 1e-12);
}

#[test]
fn single_symbol_heisenberg_is_an_idft() {
    let m = 8;
    let x: Vec<C64> = (0..m).map(|i| C64::new(i as f64, -(i as f64))).collect();
    let s = heisenberg(&TfGrid::from_vec(m, 1, x.clone()).unwrap());
    for p in 0..m {
        let want: C64 = (0..m)
            .map(|i| x[i] * cis_frac((i * p) as i64, m as i64))
            .sum::<C64>()
            / (m as f64).sqrt();
        assert!((s.samples()[p] - want).norm() < 1e-12);
    }
}

#[test]
fn interleaver_small_cases() {
    assert_eq!(interleave_perm(2, 2), vec![0, 2, 1, 3]);
    assert_eq!(interleave_perm(4, 1), vec![0, 1, 2, 3]);
    assert_eq!(interleave_perm(1, 4), vec![0, 1, 2, 3]);
    let p = interleave_perm(8, 4);
    let inv = invert_perm(&p);
    for (i, &d) in p.iter().enumerate() {
        assert_eq!(inv[d], i);
    }
}

#[test]
fn scifdm_matches_formula_and_explicit_pipeline() {
    let mut r = rng(14);
    for (m, n) in [(8, 8), (4, 16), (16, 2)] {
        let x = random_vec(m * n, &mut r);
        let s = sc_ifdm_modulate(&grid(m, n, x.clone()));
        assert!(rel_err(s.samples(), &scifdm(&x, m, n)) < 1e-12);
        assert!(rel_err(s.samples(), &scifdm_pipeline(&x, m, n)) < 1e-12);
    }
}

#[test]
fn scifdm_unit_bin_is_a_comb_tone() {
    let (m, n) = (4, 4);
    let mut v = vec![C64::new(0.0, 0.0); 16];
    v[1 + m * 2] = one();
    let s = sc_ifdm_modulate(&grid(m, n, v));
    for (p, x) in s.samples().iter().enumerate() {
        let want = if p % m == 1 {
            cis_frac(2 * p as i64, 16) * 0.5
        } else {
            C64::new(0.0, 0.0)
        };
        assert!((x - want).norm() < 1e-14);
    }
}

#[test]
fn fresnel_matrix_is_unitary_and_matches_the_sum() {
    for mn in [4, 16, 64] {
        let mut cols = Vec::new();
        for j in 0..mn {
            let mut e = vec![C64::new(0.0, 0.0); mn];
            e[j] = one();
            let c = dfnt_apply(&e, mn, Direction::Inverse).unwrap();
            assert!(max_abs_diff(&c, &idfnt(&e)) < 1e-12);
            cols.push(c);
        }
        for a in 0..mn {
            for b in 0..mn {
                let g: C64 = cols[a]
                    .iter()
                    .zip(&cols[b])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!(
                    (g - C64::new(want, 0.0)).norm() < 1e-12,
                    "mn={mn} ({a},{b})"
                );
            }
        }
    }
}

#[test]
fn fresnel_rejects_odd_lengths() {
    assert!(dfnt_apply(&[one(); 9], 9, Direction::Inverse).is_err());
}

#[test]
fn affine_matches_the_sum() {
    let mut r = rng(15);
    for (c1, c2) in [(0, 0.0), (1, 0.0), (2, 0.25), (4, 0.1)] {
        let x = random_vec(64, &mut r);
        let p = AfdmParams::new(c1, c2).unwrap();
        let s = daft_apply(&x, p, 64, Direction::Inverse).unwrap();
        assert!(rel_err(&s, &idaft(&x, c1, c2)) < 1e-12, "c1'={c1}");
    }
}

#[test]
fn affine_without_chirping_is_the_idft() {
    let x: Vec<C64> = (0..16).map(|i| C64::new(1.0, i as f64)).collect();
    let s = daft_apply(&x, AfdmParams::new(0, 0.0).unwrap(), 16, Direction::Inverse).unwrap();
    for (p, got) in s.iter().enumerate() {
        let want: C64 = x
            .iter()
            .enumerate()
            .map(|(i, v)| v * cis_frac((i * p) as i64, 16))
            .sum::<C64>()
            / 4.0;
        assert!((got - want).norm() < 1e-12);
    }
}

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (0..SIZES.len(), 0..SIZES.len()).prop_map(|(a, b)| (SIZES[a], SIZES[b]))
}

fn payload(m: usize, n: usize, seed: u64) -> Vec<C64> {
    random_vec(m * n, &mut rng(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn zak_round_trip_and_energy((m, n) in dims(), seed in any::<u64>()) {
        let s = payload(m, n, seed);
        let x = dzt(&s, m, n).unwrap();
        prop_assert!((x.energy() - energy(&s)).abs() <= 1e-12 * energy(&s));
        prop_assert!(rel_err(idzt(&x).samples(), &s) < 1e-12);
    }

    #[test]
    fn symplectic_round_trip((m, n) in dims(), seed in any::<u64>()) {
        let x = grid(m, n, payload(m, n, seed));
        let tf = isfft(&x);
        prop_assert!((tf.energy() - x.energy()).abs() <= 1e-12 * x.energy());
        prop_assert!(rel_err(sfft(&tf).as_slice(), x.as_slice()) < 1e-12);
    }

    #[test]
    fn heisenberg_round_trip((m, n) in dims(), seed in any::<u64>()) {
        let tf = TfGrid::from_vec(m, n, payload(m, n, seed)).unwrap();
        let s = heisenberg(&tf);
        prop_assert!(rel_err(wigner(s.samples(), m, n).unwrap().as_slice(), tf.as_slice()) < 1e-12);
    }

    #[test]
    fn scifdm_round_trip((m, n) in dims(), seed in any::<u64>()) {
        let x = grid(m, n, payload(m, n, seed));
        let s = sc_ifdm_modulate(&x);
        prop_assert!((s.energy() - x.energy()).abs() <= 1e-12 * x.energy());
        prop_assert!(rel_err(sc_ifdm_demodulate(s.samples(), m, n).unwrap().as_slice(), x.as_slice()) < 1e-12);
    }

    #[test]
    fn fresnel_round_trip((m, n) in dims(), seed in any::<u64>()) {
        let x = payload(m, n, seed);
        let s = dfnt_apply(&x, m * n, Direction::Inverse).unwrap();
        prop_assert!(rel_err(&dfnt_apply(&s, m * n, Direction::Forward).unwrap(), &x) < 1e-12);
    }

    #[test]
    fn affine_round_trip((m, n) in dims(), seed in any::<u64>(), c1 in 0i64..8, c2 in 0.0f64..1.0) {
        let x = payload(m, n, seed);
        let p = AfdmParams::new(c1, c2).unwrap();
        let s = daft_apply(&x, p, m * n, Direction::Inverse).unwrap();
        prop_assert!((energy(&s) - energy(&x)).abs() <= 1e-12 * energy(&x));
        prop_assert!(rel_err(&daft_apply(&s, p, m * n, Direction::Forward).unwrap(), &x) < 1e-12);
    }
}
