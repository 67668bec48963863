//! Boson realizations of su(1,1) and su(2): the single-mode squeezer and the
//! two-mode operators built from two ladders.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    block_op_norm, build_ladder, exp_antihermitian, ladder_of_dim, tensor_product, ComplexMatrix,
    SpaceKind, SpinGenerators, TruncatedSpace, UnitaryResult,
};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest truncation weight `tanh(|z|)^cutoff` accepted for squeezers and `V(z)`.
pub const SQUEEZE_TAIL_LIMIT: f64 = 1e-3;

/// Default total-quanta bound of the two-mode safe sector.
pub const DEFAULT_MAX_QUANTA: usize = 12;

fn check_envelope(z: Complex64, cutoff: usize) -> Result<()> {
    let tail = z.norm().tanh().powi(cutoff as i32);
    if tail > SQUEEZE_TAIL_LIMIT {
        return Err(Error::AmplitudeTooLarge {
            amplitude: z.norm(),
            cutoff,
            tail,
        });
    }
    Ok(())
}

/// `K+ = (a^dagger)^2 / 2`, `K- = a^2 / 2`, `K3 = (a^dagger a + 1/2) / 2`.
///
/// Even basis states carry `K = 1/4`, odd ones `K = 3/4`.
pub fn single_mode_su11(space: &TruncatedSpace) -> Result<SpinGenerators> {
    let l = build_ladder(space)?;
    let n = space.cutoff();
    let k3 = ComplexMatrix::from_diagonal(
        &(0..n)
            .map(|k| c((k as f64 + 0.5) / 2.0))
            .collect::<Vec<_>>(),
    );
    Ok(SpinGenerators {
        k_plus: (&l.a_dagger * &l.a_dagger).scale(c(0.5)),
        k_minus: (&l.a * &l.a).scale(c(0.5)),
        k3,
    })
}

/// `S(z) = exp((z (a^dagger)^2 - conj(z) a^2) / 2)`.
pub fn squeeze(space: &TruncatedSpace, z: Complex64) -> Result<UnitaryResult> {
    let g = single_mode_su11(space)?;
    check_envelope(z, space.cutoff())?;
    exp_antihermitian(&(&g.k_plus.scale(z) - &g.k_minus.scale(z.conj())))
}

/// Ladder, su(2) and su(1,1) operators on a two-mode space.
///
/// `J+ = a1^dagger a2`, `J3 = (N1 - N2)/2`, `K+ = a1^dagger a2^dagger`,
/// `K3 = (N1 + N2 + 1)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeOperators {
    pub a1: ComplexMatrix,
    pub a1_dagger: ComplexMatrix,
    pub a2: ComplexMatrix,
    pub a2_dagger: ComplexMatrix,
    pub j_plus: ComplexMatrix,
    pub j_minus: ComplexMatrix,
    pub j3: ComplexMatrix,
    pub k_plus: ComplexMatrix,
    pub k_minus: ComplexMatrix,
    pub k3: ComplexMatrix,
}

fn per_mode(space: &TruncatedSpace) -> Result<usize> {
    space.expect_kind(SpaceKind::TwoMode)?;
    Ok(space
        .per_mode_cutoff()
        .expect("two-mode spaces carry a per-mode cutoff"))
}

pub fn two_mode_operators(space: &TruncatedSpace) -> Result<TwoModeOperators> {
    let m = per_mode(space)?;
    let l = ladder_of_dim(m);
    let id = ComplexMatrix::identity(m);
    let n1 = tensor_product(&l.number_op, &id);
    let n2 = tensor_product(&id, &l.number_op);
    let half = c(0.5);
    Ok(TwoModeOperators {
        a1: tensor_product(&l.a, &id),
        a1_dagger: tensor_product(&l.a_dagger, &id),
        a2: tensor_product(&id, &l.a),
        a2_dagger: tensor_product(&id, &l.a_dagger),
        j_plus: tensor_product(&l.a_dagger, &l.a),
        j_minus: tensor_product(&l.a, &l.a_dagger),
        j3: (&n1 - &n2).scale(half),
        k_plus: tensor_product(&l.a_dagger, &l.a_dagger),
        k_minus: tensor_product(&l.a, &l.a),
        k3: (&(&n1 + &n2) + &ComplexMatrix::identity(m * m)).scale(half),
    })
}

/// `V(z) = exp(z K+ - conj(z) K-)` with `K+ = a1^dagger a2^dagger`.
pub fn two_mode_v(space: &TruncatedSpace, z: Complex64) -> Result<UnitaryResult> {
    let m = per_mode(space)?;
    check_envelope(z, m)?;
    let l = ladder_of_dim(m);
    let g = &tensor_product(&l.a_dagger, &l.a_dagger).scale(z)
        - &tensor_product(&l.a, &l.a).scale(z.conj());
    exp_antihermitian(&g)
}

/// `W(z) = exp(z J+ - conj(z) J-)` with `J+ = a1^dagger a2`.
pub fn two_mode_w(space: &TruncatedSpace, z: Complex64) -> Result<UnitaryResult> {
    let m = per_mode(space)?;
    let l = ladder_of_dim(m);
    let g = &tensor_product(&l.a_dagger, &l.a).scale(z)
        - &tensor_product(&l.a, &l.a_dagger).scale(z.conj());
    exp_antihermitian(&g)
}

/// Outcome of [`paris_residual`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParisResidual {
    /// Operator norm of the difference on the total-quanta sector.
    pub residual: f64,
    /// `<0,0| W(-pi/4) S1(z) S2(-z) W(-pi/4)^-1 |0,0>`.
    pub vacuum_lhs: Complex64,
    /// `<0,0| V(z) |0,0>`.
    pub vacuum_rhs: Complex64,
}

/// Single-mode cutoff used for the squeezers before truncating them to the
/// per-mode cutoff.
pub fn squeezer_cutoff(per_mode: usize) -> usize {
    (4 * per_mode).max(256)
}

/// Compares `W(-pi/4) (S(z) x S(-z)) W(-pi/4)^-1` with `V(z)` on the states
/// with `n1 + n2 <= max_quanta`.
///
/// The squeezers are exponentiated on a larger single-mode space and then
/// truncated, so their retained entries carry no boundary error.
pub fn paris_residual(
    space: &TruncatedSpace,
    z: Complex64,
    max_quanta: usize,
) -> Result<ParisResidual> {
    let m = per_mode(space)?;
    if max_quanta >= m {
        return Err(Error::SectorTooLarge {
            rank: max_quanta,
            limit: m - 1,
        });
    }
    let single = TruncatedSpace::single_mode(squeezer_cutoff(m))?;
    let s1 = squeeze(&single, z)?.matrix.leading_block(m);
    let s2 = squeeze(&single, -z)?.matrix.leading_block(m);
    let ss = tensor_product(&s1, &s2);
    drop((s1, s2));
    let w = two_mode_w(space, c(-std::f64::consts::FRAC_PI_4))?.matrix;
    let w_inv = w.adjoint();
    let idx = space.total_quanta_sector(max_quanta);
    let lhs = ComplexMatrix::restricted_product(&w, &ss, &w_inv, &idx, &idx);
    drop((w, w_inv, ss));
    let v = two_mode_v(space, z)?.matrix;
    let rhs = v.select(&idx, &idx);
    let diff = &lhs - &rhs;
    Ok(ParisResidual {
        residual: block_op_norm(&diff),
        vacuum_lhs: lhs[(0, 0)],
        vacuum_rhs: rhs[(0, 0)],
    })
}

/// `(A B)[idx, idx]` without forming the full product.
pub fn sector_product(a: &ComplexMatrix, b: &ComplexMatrix, idx: &[usize]) -> ComplexMatrix {
    let all: Vec<usize> = (0..a.dim()).collect();
    ComplexMatrix::new(a.select(idx, &all) * b.select(&all, idx)).expect("finite operands")
}

/// `[A, B][idx, idx]`.
pub fn sector_commutator(a: &ComplexMatrix, b: &ComplexMatrix, idx: &[usize]) -> ComplexMatrix {
    &sector_product(a, b, idx) - &sector_product(b, a, idx)
}
