//! Displacement operators `U(z) = exp(z a^dagger - conj(z) a)`, coherent
//! states, closed-form matrix elements and the plane integrals built on them.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{
    build_ladder, exp_antihermitian, ComplexMatrix, SafeSector, SpaceKind, TruncatedSpace,
    UnitaryResult,
};
use crate::quadrature::{integrate_plane, pairwise_reduce, PlaneGrid};
use crate::special::{
    assoc_laguerre, laguerre_generating_closed, laguerre_weighted_sum_fixed, ln_gamma,
};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn ln_fact(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// `U(z)` on a truncated single-mode space.
#[derive(Debug, Clone, PartialEq)]
pub struct Displacement {
    pub z: Complex64,
    pub space: TruncatedSpace,
    pub matrix: UnitaryResult,
}

/// Builds `U(z)` from the truncated ladder operators.
pub fn displacement(space: &TruncatedSpace, z: Complex64) -> Result<Displacement> {
    space.expect_kind(SpaceKind::SingleMode)?;
    let n = space.cutoff();
    if z.norm_sqr() > n as f64 {
        return Err(Error::AmplitudeTooLarge {
            amplitude: z.norm(),
            cutoff: n,
            tail: coherent_tail(z, n),
        });
    }
    let l = build_ladder(space)?;
    let g = &l.a_dagger.scale(z) - &l.a.scale(z.conj());
    Ok(Displacement {
        z,
        space: *space,
        matrix: exp_antihermitian(&g)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherentMethod {
    /// `e^(-|z|^2/2) z^n / sqrt(n!)`.
    Series,
    /// Column 0 of the exponentiated `U(z)`.
    DisplacedVacuum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherentState {
    pub z: Complex64,
    pub amplitudes: Vec<Complex64>,
    /// Probability weight beyond the cutoff, `sum_{n >= N} e^(-|z|^2) |z|^(2n) / n!`.
    pub tail_bound: f64,
}

impl CoherentState {
    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Upper bound on the Poisson tail `P(n >= cutoff)` for mean `|z|^2`.
pub fn coherent_tail(z: Complex64, cutoff: usize) -> f64 {
    let x = z.norm_sqr();
    if x == 0.0 {
        return 0.0;
    }
    let nf = cutoff as f64;
    let lead = (-x + nf * x.ln() - ln_fact(cutoff)).exp();
    let ratio = x / (nf + 1.0);
    if ratio < 1.0 {
        lead / (1.0 - ratio)
    } else {
        1.0
    }
}

/// Coefficient `<n|z> = e^(-|z|^2/2) z^n / sqrt(n!)`.
pub fn coherent_coefficient(z: Complex64, n: usize) -> Complex64 {
    if n == 0 {
        return c((-z.norm_sqr() / 2.0).exp());
    }
    if z == c(0.0) {
        return c(0.0);
    }
    let r = z.norm();
    let mag = (-r * r / 2.0 + n as f64 * r.ln() - 0.5 * ln_fact(n)).exp();
    Complex64::from_polar(mag, n as f64 * z.arg())
}

pub fn coherent_state(
    space: &TruncatedSpace,
    z: Complex64,
    method: CoherentMethod,
) -> Result<CoherentState> {
    space.expect_kind(SpaceKind::SingleMode)?;
    let n = space.cutoff();
    let tail = coherent_tail(z, n);
    if z.norm_sqr() > n as f64 / 4.0 {
        return Err(Error::AmplitudeTooLarge {
            amplitude: z.norm(),
            cutoff: n,
            tail,
        });
    }
    let amplitudes = match method {
        CoherentMethod::Series => (0..n).map(|k| coherent_coefficient(z, k)).collect(),
        CoherentMethod::DisplacedVacuum => displacement(space, z)?.matrix.matrix.column(0),
    };
    Ok(CoherentState {
        z,
        amplitudes,
        tail_bound: tail,
    })
}

/// `<n|U(z)|m>` from the associated Laguerre closed form.
pub fn u_element_closed(n: usize, m: usize, z: Complex64) -> Complex64 {
    let x = z.norm_sqr();
    if x == 0.0 {
        return if n == m { c(1.0) } else { c(0.0) };
    }
    let (lo, hi) = (n.min(m), n.max(m));
    let d = hi - lo;
    let r = z.norm();
    let log_mag = -x / 2.0 + 0.5 * (ln_fact(lo) - ln_fact(hi)) + d as f64 * r.ln();
    let lag = assoc_laguerre(lo, d as f64, x);
    // (-conj z)^d above the diagonal, z^d below it
    let angle = if n <= m {
        d as f64 * (std::f64::consts::PI - z.arg())
    } else {
        d as f64 * z.arg()
    };
    Complex64::from_polar(log_mag.exp() * lag, angle)
}

/// Leading `rows x rows` block of `U(z)` for real `z = r`, from closed forms.
/// For `z = r e^(i theta)` entry `(n, m)` picks up the phase `e^(i (n-m) theta)`.
pub fn u_radial_block(r: f64, rows: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, rows, |n, m| u_element_closed(n, m, c(r)).re)
}

/// `e^(-(z conj(w) - conj(z) w) / 2)`, so that `U(z + w) = phase * U(z) U(w)`.
pub fn composition_phase(z: Complex64, w: Complex64) -> Complex64 {
    (-(z * w.conj() - z.conj() * w) / 2.0).exp()
}

fn require_radius(space: &TruncatedSpace, grid: &PlaneGrid) -> Result<()> {
    let limit = space.cutoff() as f64 / 2.0;
    if grid.radius() * grid.radius() > limit {
        return Err(Error::GridMismatch(format!(
            "radius {} needs R^2 <= N/2 = {limit}",
            grid.radius()
        )));
    }
    Ok(())
}

/// `int |z><z| d^2z / pi` restricted to the safe sector.
pub fn resolution_identity_coherent(
    space: &TruncatedSpace,
    grid: &PlaneGrid,
    sector: SafeSector,
) -> Result<ComplexMatrix> {
    space.expect_kind(SpaceKind::SingleMode)?;
    require_radius(space, grid)?;
    let rows = sector.rank();
    let angles = grid.angles();
    let rings: Vec<DMatrix<Complex64>> = grid
        .radial_rule()
        .par_iter()
        .map(|&(r, w)| {
            let mut acc = DMatrix::<Complex64>::zeros(rows, rows);
            for &theta in &angles {
                let z = Complex64::from_polar(r, theta);
                let v: Vec<Complex64> = (0..rows).map(|k| coherent_coefficient(z, k)).collect();
                for j in 0..rows {
                    let vj = v[j].conj() * w;
                    for i in 0..rows {
                        acc[(i, j)] += v[i] * vj;
                    }
                }
            }
            acc
        })
        .collect();
    let total = pairwise_reduce(rings, DMatrix::zeros(rows, rows), &|a, b| a + b);
    ComplexMatrix::new(total)
}

/// Terms, value and tail bound of `sum_n t^n <n|U(z)|n>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizedTrace {
    pub numeric: Complex64,
    pub closed: Complex64,
    pub terms: usize,
    pub tail_bound: f64,
}

/// `sum_n t^n <n|U(z)|n>` next to its closed form
/// `e^(-|z|^2/2) e^(-|z|^2 t/(1-t)) / (1-t)`.
///
/// The diagonal elements are `e^(-|z|^2/2) L_n(|z|^2)`. Near `t -> 1` the
/// series cancels to many orders below its terms, so it is summed in fixed
/// point with enough bits to cover the cancellation.
pub fn regularized_trace_u(z: Complex64, t: f64) -> Result<RegularizedTrace> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            requirement: "0 <= t < 1",
        });
    }
    let x = z.norm_sqr();
    let pre = (-x / 2.0).exp();
    let closed = pre * laguerre_generating_closed(x, t, 0.0)?;
    // |<n|U|n>| <= 1, so the tail after n_max is at most t^(n_max+1) / (1-t)
    let target = 1e-14 * closed;
    let terms = if t == 0.0 {
        0
    } else {
        let n = ((target * (1.0 - t)).ln() / t.ln()).ceil();
        (n.max(0.0) as usize).min(2_000_000)
    };
    let tail_bound = if t == 0.0 {
        0.0
    } else {
        t.powf(terms as f64 + 1.0) / (1.0 - t)
    };
    // bits to absorb the ratio between term size and result, plus margin
    let cancel_bits = ((1.0 / (1.0 - t)) / closed).log2().max(0.0);
    let bits = 128 + cancel_bits.ceil() as u32 + 2 * (terms as f64).log2().ceil().max(0.0) as u32;
    let sum = laguerre_weighted_sum_fixed(x, t, 0.0, terms, bits);
    Ok(RegularizedTrace {
        numeric: c(pre * sum),
        closed: c(closed),
        terms: terms + 1,
        tail_bound,
    })
}

/// `int closed(z; t) d^2z / pi`, equal to `2 / (1 + t)`.
///
/// The integrand is a Gaussian of width `(1/2 + t/(1-t))^(-1/2)`; the grid
/// radius is shrunk to twelve widths when that is smaller.
pub fn regularized_trace_plane_integral(t: f64, grid: &PlaneGrid) -> Result<f64> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            requirement: "0 <= t < 1",
        });
    }
    let a = 0.5 + t / (1.0 - t);
    let radius = grid.radius().min(12.0 / a.sqrt());
    let g = PlaneGrid::new(radius, grid.radial_nodes(), grid.angular_nodes())?;
    let v = integrate_plane(|z| c((-a * z.norm_sqr()).exp() / (1.0 - t)), &g);
    Ok(v.re)
}

/// True when every entry of `a` outside the leading `rank` block is zero.
pub(crate) fn supported_in(a: &ComplexMatrix, rank: usize) -> bool {
    let n = a.dim();
    (0..n).all(|j| (0..n).all(|i| (i < rank && j < rank) || a[(i, j)] == c(0.0)))
}

/// `(1/pi) int Tr[A U(z)^dagger] U(z) d^2z` on the safe sector.
///
/// `A` must vanish outside the safe sector; then the full-space trace only
/// involves sector entries of `U(z)`.
pub fn glauber_reconstruct(
    a: &ComplexMatrix,
    space: &TruncatedSpace,
    grid: &PlaneGrid,
    sector: SafeSector,
) -> Result<ComplexMatrix> {
    space.expect_kind(SpaceKind::SingleMode)?;
    if a.dim() != space.cutoff() {
        return Err(Error::DimensionMismatch {
            expected: space.cutoff(),
            found: a.dim(),
        });
    }
    require_radius(space, grid)?;
    let rows = sector.rank();
    if !supported_in(a, rows) {
        return Err(Error::NotTraceClass(
            "A has entries outside the safe sector".into(),
        ));
    }
    let support: Vec<(usize, usize, Complex64)> = (0..rows)
        .flat_map(|j| (0..rows).map(move |i| (i, j)))
        .filter_map(|(i, j)| {
            let v = a[(i, j)];
            (v != c(0.0)).then_some((i, j, v))
        })
        .collect();
    let angles = grid.angles();
    let rings: Vec<DMatrix<Complex64>> = grid
        .radial_rule()
        .par_iter()
        .map(|&(r, w)| {
            let b = u_radial_block(r, rows);
            let mut acc = DMatrix::<Complex64>::zeros(rows, rows);
            for &theta in &angles {
                let e = Complex64::from_polar(1.0, theta);
                // Tr[A U^dagger] = sum A_ij conj(U_ij)
                let tr: Complex64 = support
                    .iter()
                    .map(|&(i, j, v)| v * e.powi(j as i32 - i as i32) * b[(i, j)])
                    .sum();
                let f = tr * w;
                for m in 0..rows {
                    for n in 0..rows {
                        acc[(n, m)] += f * e.powi(n as i32 - m as i32) * b[(n, m)];
                    }
                }
            }
            acc
        })
        .collect();
    let total = pairwise_reduce(rings, DMatrix::zeros(rows, rows), &|a, b| a + b);
    ComplexMatrix::new(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::project_safe;

    fn ci(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn closed_elements_small_cases() {
        assert_eq!(u_element_closed(3, 3, ci(0.0, 0.0)), c(1.0));
        assert_eq!(u_element_closed(2, 3, ci(0.0, 0.0)), c(0.0));
        let z = ci(0.3, -0.8);
        let g = (-z.norm_sqr() / 2.0).exp();
        assert!((u_element_closed(0, 0, z) - c(g)).norm() < 1e-15);
        assert!((u_element_closed(1, 0, z) - z * g).norm() < 1e-15);
        assert!((u_element_closed(0, 1, z) + z.conj() * g).norm() < 1e-15);
    }

    #[test]
    fn hermiticity_symmetry() {
        let z = ci(0.7, 1.1);
        for n in 0..8 {
            for m in 0..8 {
                let lhs = u_element_closed(n, m, z);
                let rhs = u_element_closed(m, n, -z).conj();
                assert!((lhs - rhs).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn displacement_matches_closed_form() {
        let s = TruncatedSpace::single_mode(128).unwrap();
        let z = ci(0.5, -0.4);
        let u = displacement(&s, z).unwrap();
        assert!(u.matrix.unitarity_defect < 1e-12);
        for n in 0..12 {
            for m in 0..12 {
                let d = u.matrix.matrix[(n, m)] - u_element_closed(n, m, z);
                assert!(d.norm() < 1e-12, "({n},{m})");
            }
        }
    }

    #[test]
    fn inverse_and_identity() {
        let s = TruncatedSpace::single_mode(64).unwrap();
        let u0 = displacement(&s, ci(0.0, 0.0)).unwrap();
        assert!((&u0.matrix.matrix - &ComplexMatrix::identity(64)).max_abs() < 1e-15);
        let z = ci(1.0, 0.2);
        let p = &displacement(&s, z).unwrap().matrix.matrix
            * &displacement(&s, -z).unwrap().matrix.matrix;
        let sec = SafeSector::default_for(&s);
        let d = &project_safe(&p, sec).unwrap() - &ComplexMatrix::identity(sec.rank());
        assert!(d.op_norm() < 1e-10);
    }

    #[test]
    fn coherent_state_methods_agree() {
        let s = TruncatedSpace::single_mode(128).unwrap();
        let z = ci(-1.2, 0.9);
        let a = coherent_state(&s, z, CoherentMethod::Series).unwrap();
        let b = coherent_state(&s, z, CoherentMethod::DisplacedVacuum).unwrap();
        let d = a
            .amplitudes
            .iter()
            .zip(&b.amplitudes)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(d < 1e-10);
        assert!((a.norm() - 1.0).abs() <= a.tail_bound + 1e-14);
        let vac = coherent_state(&s, ci(0.0, 0.0), CoherentMethod::Series).unwrap();
        assert_eq!(vac.amplitudes[0], c(1.0));
        assert!(vac.amplitudes[1..].iter().all(|x| *x == c(0.0)));
        assert!(coherent_state(&s, ci(6.0, 0.0), CoherentMethod::Series).is_err());
    }

    #[test]
    fn composition_phase_values() {
        assert_eq!(composition_phase(ci(0.4, 0.1), ci(0.0, 0.0)), c(1.0));
        assert!((composition_phase(c(0.4), c(-2.0)) - c(1.0)).norm() < 1e-15);
        let p = composition_phase(c(1.0), ci(0.0, 1.0));
        assert!((p - ci(1f64.cos(), 1f64.sin())).norm() < 1e-15);
    }

    #[test]
    fn regularized_trace_limits() {
        let r = regularized_trace_u(ci(0.0, 0.0), 0.5).unwrap();
        assert!((r.closed - c(2.0)).norm() < 1e-15);
        assert!((r.numeric / r.closed - 1.0).norm() < 1e-12);
        let r = regularized_trace_u(ci(1.0, 1.0), 0.0).unwrap();
        assert!((r.closed - c((-1.0f64).exp())).norm() < 1e-15);
        assert!((r.numeric - r.closed).norm() < 1e-15);
        assert!(regularized_trace_u(c(1.0), 1.0).is_err());
        let r = regularized_trace_u(ci(2.0, 0.0), 0.95).unwrap();
        assert!((r.numeric / r.closed - 1.0).norm() < 1e-8, "{r:?}");
    }
}
