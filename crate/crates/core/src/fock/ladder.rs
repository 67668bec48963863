use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::{SpaceKind, TruncatedSpace};
use crate::error::Result;

/// Annihilation, creation and number operators of one truncated mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    pub a: ComplexMatrix,
    pub a_dagger: ComplexMatrix,
    pub number_op: ComplexMatrix,
}

/// The spin-K generators `K+`, `K-`, `K3`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinGenerators {
    pub k_plus: ComplexMatrix,
    pub k_minus: ComplexMatrix,
    pub k3: ComplexMatrix,
}

pub fn build_ladder(space: &TruncatedSpace) -> Result<Ladder> {
    space.expect_kind(SpaceKind::SingleMode)?;
    Ok(ladder_of_dim(space.cutoff()))
}

pub(crate) fn ladder_of_dim(n: usize) -> Ladder {
    let mut a = ComplexMatrix::zeros(n);
    for k in 1..n {
        a[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    let number_op = ComplexMatrix::from_diagonal(
        &(0..n)
            .map(|k| Complex64::new(k as f64, 0.0))
            .collect::<Vec<_>>(),
    );
    Ladder {
        a_dagger: a.adjoint(),
        a,
        number_op,
    }
}

pub fn build_spin_k(space: &TruncatedSpace) -> Result<SpinGenerators> {
    space.expect_kind(SpaceKind::SpinK)?;
    let two_k = space
        .spin()
        .expect("spin-K spaces always carry a weight")
        .two_k();
    Ok(spin_generators(space.cutoff(), two_k))
}

pub(crate) fn spin_generators(n: usize, two_k: f64) -> SpinGenerators {
    let mut k_plus = ComplexMatrix::zeros(n);
    for m in 0..n.saturating_sub(1) {
        let mf = m as f64;
        k_plus[(m + 1, m)] = Complex64::new(((mf + 1.0) * (two_k + mf)).sqrt(), 0.0);
    }
    let k3 = ComplexMatrix::from_diagonal(
        &(0..n)
            .map(|m| Complex64::new(two_k / 2.0 + m as f64, 0.0))
            .collect::<Vec<_>>(),
    );
    SpinGenerators {
        k_minus: k_plus.adjoint(),
        k_plus,
        k3,
    }
}

/// Kronecker product `A (x) B`; basis pair `(n1, n2)` maps to `n1 * dim(B) + n2`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{project_safe, SafeSector};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn ladder_entries() {
        let s = TruncatedSpace::single_mode(16).unwrap();
        let l = build_ladder(&s).unwrap();
        assert_eq!(l.a[(0, 1)], c(1.0));
        assert!(l.a.column(0).iter().all(|z| *z == c(0.0)));
        assert_eq!(l.a_dagger, l.a.adjoint());
        assert!((&l.number_op - &(&l.a_dagger * &l.a)).max_abs() < 1e-13);
        assert!(l.number_op.is_diagonal());
    }

    #[test]
    fn truncated_commutator_breaks_only_at_the_edge() {
        let n = 16;
        let s = TruncatedSpace::single_mode(n).unwrap();
        let l = build_ladder(&s).unwrap();
        let defect = &l.a.commutator(&l.a_dagger) - &ComplexMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                let expected = if i == n - 1 && j == n - 1 {
                    c(-(n as f64))
                } else {
                    c(0.0)
                };
                assert!((defect[(i, j)] - expected).norm() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn spin_k_entries_and_algebra() {
        let s = TruncatedSpace::spin_k(32, 2.0).unwrap();
        let g = build_spin_k(&s).unwrap();
        assert!(g.k_minus.column(0).iter().all(|z| *z == c(0.0)));
        assert!((g.k_plus[(1, 0)] - c(2.0_f64.sqrt())).norm() < 1e-15);
        let sector = SafeSector::default_for(&s);
        let lhs = &g.k_plus.commutator(&g.k_minus) + &g.k3.scale(c(2.0));
        assert!(project_safe(&lhs, sector).unwrap().max_abs() < 1e-12);
        let r1 = &g.k3.commutator(&g.k_plus) - &g.k_plus;
        let r2 = &g.k3.commutator(&g.k_minus) + &g.k_minus;
        assert!(project_safe(&r1, sector).unwrap().max_abs() < 1e-12);
        assert!(project_safe(&r2, sector).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let s = TruncatedSpace::single_mode(8).unwrap();
        assert!(build_spin_k(&s).is_err());
        let t = TruncatedSpace::spin_k(8, 1.0).unwrap();
        assert!(build_ladder(&t).is_err());
    }

    #[test]
    fn tensor_conventions() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor_product(&i2, &i2), ComplexMatrix::identity(4));
        let l = ladder_of_dim(4);
        let id = ComplexMatrix::identity(4);
        let a1 = tensor_product(&l.a, &id);
        let a2 = tensor_product(&id, &l.a);
        // |1,0> has index 4, |0,0> index 0
        assert_eq!(a1[(0, 4)], c(1.0));
        let a2d = a2.adjoint();
        assert_eq!(a1.commutator(&a2d).max_abs(), 0.0);
    }
}
