use num_complex::Complex64 as C64;

use crate::transforms::dft::cis_ratio;
use crate::transforms::{Direction, LatticeGrid};

/// `ω(k,l) = e^{-j2π kl/(MN)}`.
#[inline]
pub fn omega(k: usize, l: usize, m: usize, n: usize) -> C64 {
    cis_ratio(-((k * l) as i128), (m * n) as i128)
}

/// The diagonal phase matrix `Ψ` that turns an SC-IFDM lattice into an OTFS
/// delay-Doppler grid. Entries are computed on demand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseMatrix {
    pub m: usize,
    pub n: usize,
}

impl PhaseMatrix {
    pub fn new(m: usize, n: usize) -> Self {
        Self { m, n }
    }

    pub fn get(&self, k: usize, l: usize) -> C64 {
        omega(k, l, self.m, self.n)
    }

    /// Diagonal of `Ψ` in delay-major order.
    pub fn diagonal(&self) -> Vec<C64> {
        let mut d = Vec::with_capacity(self.m * self.n);
        for k in 0..self.n {
            for l in 0..self.m {
                d.push(self.get(k, l));
            }
        }
        d
    }
}

/// Forward multiplies every bin by `ω(k,l)`; inverse by its conjugate.
///
/// `sc_ifdm_modulate(otfs_phase_apply(X, Forward)) == idzt(X)`.
pub fn otfs_phase_apply(grid: &LatticeGrid, direction: Direction) -> LatticeGrid {
    let (m, n) = (grid.m(), grid.n());
    LatticeGrid::from_fn(m, n, |k, l| {
        let w = omega(k, l, m, n);
        match direction {
            Direction::Forward => grid.get(k, l) * w,
            Direction::Inverse => grid.get(k, l) * w.conj(),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_row_and_column_are_unit() {
        let p = PhaseMatrix::new(8, 4);
        for k in 0..4 {
            assert_eq!(p.get(k, 0), C64::new(1.0, 0.0));
        }
        for l in 0..8 {
            assert_eq!(p.get(0, l), C64::new(1.0, 0.0));
        }
        for v in p.diagonal() {
            assert!((v.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn double_forward_is_omega_squared() {
        let (m, n) = (4, 4);
        let g = LatticeGrid::from_fn(m, n, |k, l| C64::new(1.0 + k as f64, l as f64));
        let twice = otfs_phase_apply(
            &otfs_phase_apply(&g, Direction::Forward),
            Direction::Forward,
        );
        for k in 0..n {
            for l in 0..m {
                let w = omega(k, l, m, n);
                assert!((twice.get(k, l) - g.get(k, l) * w * w).norm() < 1e-14);
            }
        }
        let back = otfs_phase_apply(
            &otfs_phase_apply(&g, Direction::Forward),
            Direction::Inverse,
        );
        for (a, b) in back.as_slice().iter().zip(g.as_slice()) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
