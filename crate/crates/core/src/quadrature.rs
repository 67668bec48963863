//! Deterministic polar quadrature over the complex plane and over the unit disk
//! with the hyperbolic measure, plus the evaluator for the disk integral
//! `I(2K, chi)` whose closed form is `1 / (2|chi| (1+|chi|)^(2K-1))`.
//!
//! Node contributions may be evaluated in parallel; they are always combined by
//! [`pairwise_sum`], whose reduction tree depends only on the number of nodes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::special::gauss_legendre_interval;

const PAIRWISE_LEAF: usize = 8;
/// Largest radial cutoff `s` the conjecture evaluator will extend to.
pub const S_MAX_CAP: f64 = 60.0;

/// Sums in a fixed binary tree determined only by `values.len()`.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    if values.len() <= PAIRWISE_LEAF {
        return values.iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// [`pairwise_sum`] for arbitrary summable values.
pub fn pairwise_reduce<T, F>(values: Vec<T>, zero: T, add: &F) -> T
where
    T: Clone,
    F: Fn(T, T) -> T,
{
    fn go<T: Clone, F: Fn(T, T) -> T>(v: &[T], zero: &T, add: &F) -> T {
        if v.len() <= PAIRWISE_LEAF {
            return v.iter().cloned().fold(zero.clone(), add);
        }
        let mid = v.len() / 2;
        add(go(&v[..mid], zero, add), go(&v[mid..], zero, add))
    }
    go(&values, &zero, add)
}

fn check_nodes(radial: usize, angular: usize) -> Result<()> {
    if radial == 0 {
        return Err(Error::GridMismatch("radial_nodes must be positive".into()));
    }
    if angular == 0 || !angular.is_multiple_of(2) {
        return Err(Error::GridMismatch(format!(
            "angular_nodes must be positive and even, got {angular}"
        )));
    }
    Ok(())
}

fn uniform_angles(m: usize) -> Vec<f64> {
    (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect()
}

/// Polar grid on the disk `|z| <= R`: Gauss-Legendre in `r`, trapezoid in angle.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneGrid {
    radius: f64,
    radial_nodes: usize,
    angular_nodes: usize,
}

impl PlaneGrid {
    pub const DEFAULT_RADIUS: f64 = 6.0;
    pub const DEFAULT_NODES: usize = 200;

    pub fn new(radius: f64, radial_nodes: usize, angular_nodes: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::OutOfRange {
                name: "radius",
                value: radius,
                requirement: "radius > 0",
            });
        }
        check_nodes(radial_nodes, angular_nodes)?;
        Ok(Self {
            radius,
            radial_nodes,
            angular_nodes,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn radial_nodes(&self) -> usize {
        self.radial_nodes
    }

    pub fn angular_nodes(&self) -> usize {
        self.angular_nodes
    }

    /// Radii with weights for `int_0^R g(r) r dr`, times the angular factor
    /// `2 / M` so that a full ring sum gives `int g d^2z / pi`.
    pub fn radial_rule(&self) -> Vec<(f64, f64)> {
        let (r, w) = gauss_legendre_interval(self.radial_nodes, 0.0, self.radius);
        let ang = 2.0 / self.angular_nodes as f64;
        r.into_iter()
            .zip(w)
            .map(|(r, w)| (r, w * r * ang))
            .collect()
    }

    pub fn angles(&self) -> Vec<f64> {
        uniform_angles(self.angular_nodes)
    }

    /// All nodes `(z, weight)`, radius-major.
    pub fn nodes(&self) -> Vec<(Complex64, f64)> {
        let angles = self.angles();
        self.radial_rule()
            .into_iter()
            .flat_map(|(r, w)| {
                angles
                    .iter()
                    .map(move |&t| (Complex64::from_polar(r, t), w))
            })
            .collect()
    }
}

impl Default for PlaneGrid {
    fn default() -> Self {
        Self {
            radius: Self::DEFAULT_RADIUS,
            radial_nodes: Self::DEFAULT_NODES,
            angular_nodes: Self::DEFAULT_NODES,
        }
    }
}

/// `int f(z) d^2z / pi` over the grid's disk.
pub fn integrate_plane<F>(f: F, grid: &PlaneGrid) -> Complex64
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let values: Vec<Complex64> = grid.nodes().par_iter().map(|&(z, w)| f(z) * w).collect();
    pairwise_sum(&values)
}

/// One radial node of a [`DiskGrid`]: `zeta = tanh(s) e^(i theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskNode {
    pub s: f64,
    pub theta: f64,
    pub zeta: Complex64,
    /// `1 - |zeta|^2 = sech^2 s`, free of cancellation.
    pub one_minus_r2: f64,
    /// Weight of `d^2zeta / (pi (1 - |zeta|^2)^2)`.
    pub weight: f64,
}

/// Grid on the unit disk in the variable `s` with `|zeta| = tanh s`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskGrid {
    s_max: f64,
    radial_nodes: usize,
    angular_nodes: usize,
}

impl DiskGrid {
    pub const DEFAULT_S_MAX: f64 = 12.0;
    pub const DEFAULT_RADIAL_NODES: usize = 400;
    pub const DEFAULT_ANGULAR_NODES: usize = 256;

    pub fn new(s_max: f64, radial_nodes: usize, angular_nodes: usize) -> Result<Self> {
        if !(s_max > 0.0) || !s_max.is_finite() {
            return Err(Error::OutOfRange {
                name: "s_max",
                value: s_max,
                requirement: "s_max > 0",
            });
        }
        check_nodes(radial_nodes, angular_nodes)?;
        Ok(Self {
            s_max,
            radial_nodes,
            angular_nodes,
        })
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn radial_nodes(&self) -> usize {
        self.radial_nodes
    }

    pub fn angular_nodes(&self) -> usize {
        self.angular_nodes
    }

    /// Same node counts on `[0, s_max]`.
    pub fn with_s_max(&self, s_max: f64) -> Self {
        Self {
            s_max,
            ..self.clone()
        }
    }

    /// `(s, w)` with `w` the weight of `sinh(2s)/2 ds` times `2 / M`.
    pub fn radial_rule(&self) -> Vec<(f64, f64)> {
        let (s, w) = gauss_legendre_interval(self.radial_nodes, 0.0, self.s_max);
        let ang = 2.0 / self.angular_nodes as f64;
        s.into_iter()
            .zip(w)
            .map(|(s, w)| (s, w * 0.5 * (2.0 * s).sinh() * ang))
            .collect()
    }

    pub fn angles(&self) -> Vec<f64> {
        uniform_angles(self.angular_nodes)
    }

    pub fn nodes(&self) -> Vec<DiskNode> {
        let angles = self.angles();
        self.radial_rule()
            .into_iter()
            .flat_map(|(s, w)| {
                let sech = 1.0 / s.cosh();
                let r = s.tanh();
                angles.iter().map(move |&theta| DiskNode {
                    s,
                    theta,
                    zeta: Complex64::from_polar(r, theta),
                    one_minus_r2: sech * sech,
                    weight: w,
                })
            })
            .collect()
    }
}

impl Default for DiskGrid {
    fn default() -> Self {
        Self {
            s_max: Self::DEFAULT_S_MAX,
            radial_nodes: Self::DEFAULT_RADIAL_NODES,
            angular_nodes: Self::DEFAULT_ANGULAR_NODES,
        }
    }
}

pub(crate) fn require_two_k_above_one(two_k: f64) -> Result<()> {
    if !(two_k > 1.0) || !two_k.is_finite() {
        return Err(Error::SpinOutOfRange {
            two_k,
            requirement: "2K > 1",
        });
    }
    Ok(())
}

/// `((2K-1)/pi) int_D f(zeta) d^2zeta / (1-|zeta|^2)^2`.
pub fn integrate_disk_hyperbolic<F>(f: F, two_k: f64, grid: &DiskGrid) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    integrate_disk_nodes(|node| f(node.zeta), two_k, grid)
}

/// As [`integrate_disk_hyperbolic`], with the integrand given the whole node.
pub fn integrate_disk_nodes<F>(f: F, two_k: f64, grid: &DiskGrid) -> Result<Complex64>
where
    F: Fn(&DiskNode) -> Complex64 + Sync,
{
    require_two_k_above_one(two_k)?;
    let values: Vec<Complex64> = grid.nodes().par_iter().map(|n| f(n) * n.weight).collect();
    Ok(pairwise_sum(&values) * (two_k - 1.0))
}

/// Outcome of [`conjecture_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjectureValue {
    /// Real part of the quadrature.
    pub numeric: f64,
    /// Imaginary part of the quadrature; zero in exact arithmetic.
    pub imaginary: f64,
    /// `1 / (2|chi| (1+|chi|)^(2K-1))`.
    pub rhs: f64,
    /// Radial cutoff actually used.
    pub s_max_used: f64,
    /// Bound on the discarded radial tail `s > s_max_used`.
    pub tail_bound: f64,
}

/// `sum_k |(p/2)_k ((1-p)/2)_k| / k!^2`, bounding `|2F1(p/2, (1-p)/2; 1; x)|` on `[0, 1]`.
fn hypergeometric_bound(p: f64) -> f64 {
    let (a, b) = (p / 2.0, (1.0 - p) / 2.0);
    let mut term = 1.0_f64;
    let mut sum = 1.0;
    let terms = 100_000;
    for k in 0..terms {
        let kf = k as f64;
        term *= ((a + kf) * (b + kf)).abs() / ((kf + 1.0) * (kf + 1.0));
        sum += term;
    }
    // terms decay like k^(-3/2)
    sum + 2.0 * term * terms as f64
}

/// Bound on `(2K-1) int_S^inf sinh(2s) |ring average| ds`.
fn conjecture_tail(p: f64, chi: f64, s: f64, m_p: f64) -> f64 {
    let shape = ((1.0 - (-4.0 * s).exp()) / 2.0).powf(1.0 - p);
    m_p * chi.powf(-p) * shape * (2.0 * s * (1.0 - p)).exp() / 2.0
}

/// `((2K-1)/pi) int_D d^2zeta / (1-|zeta|^2)^2 * (1 - (conj(chi) zeta - chi conj(zeta)) / (1-|zeta|^2))^(-2K)`.
///
/// With `zeta = tanh(s) e^(i theta)` the integrand is
/// `(1 - i |chi| sinh(2s) sin psi)^(-2K)` against `sinh(2s)/2 ds dpsi`. Each
/// ring is integrated along the shifted contour `psi = phi + i cos(phi)`, on
/// which the base has real part at least 1, so the large-`s` rings are
/// evaluated without cancellation. The radial cutoff is extended beyond
/// `grid.s_max` until the tail bound drops below `tol * rhs`.
pub fn conjecture_integral(
    two_k: f64,
    chi: Complex64,
    grid: &DiskGrid,
    tol: f64,
) -> Result<ConjectureValue> {
    require_two_k_above_one(two_k)?;
    let c = chi.norm();
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::OutOfRange {
            name: "|chi|",
            value: c,
            requirement: "0 < |chi| < 1",
        });
    }
    let p = two_k;
    let rhs = 1.0 / (2.0 * c * (1.0 + c).powf(p - 1.0));
    let m_p = hypergeometric_bound(p);
    let target = 0.1 * tol * rhs;
    let mut s_max = grid.s_max();
    while conjecture_tail(p, c, s_max, m_p) > target && s_max < S_MAX_CAP {
        s_max = (s_max + 1.0).min(S_MAX_CAP);
    }
    let tail_bound = conjecture_tail(p, c, s_max, m_p);
    if tail_bound > target {
        return Err(Error::TailTooLarge {
            bound: tail_bound,
            tol: target,
        });
    }
    let grid = grid.with_s_max(s_max);
    let eta = 1.0;
    let contour: Vec<(Complex64, Complex64)> = grid
        .angles()
        .into_iter()
        .map(|phi| {
            let psi = Complex64::new(phi, eta * phi.cos());
            let jac = Complex64::new(1.0, -eta * phi.sin());
            (psi.sin(), jac)
        })
        .collect();
    let rings: Vec<Complex64> = grid
        .radial_rule()
        .par_iter()
        .map(|&(s, w)| {
            let a = c * (2.0 * s).sinh();
            let vals: Vec<Complex64> = contour
                .iter()
                .map(|&(sin_psi, jac)| {
                    let base = Complex64::new(1.0, 0.0) - Complex64::new(0.0, a) * sin_psi;
                    base.powf(-p) * jac
                })
                .collect();
            pairwise_sum(&vals) * w
        })
        .collect();
    // ring weights carry 2/M; the contour sum over M angles then integrates over
    // psi / pi, matching the d^2zeta / pi convention
    let total = pairwise_sum(&rings) * (two_k - 1.0);
    Ok(ConjectureValue {
        numeric: total.re,
        imaginary: total.im,
        rhs,
        s_max_used: s_max,
        tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pairwise_sum_is_exact_on_integers() {
        let v: Vec<Complex64> = (0..1000).map(|k| c(k as f64, -1.0)).collect();
        assert_eq!(pairwise_sum(&v), c(499500.0, -1000.0));
        assert_eq!(pairwise_sum(&[]), c(0.0, 0.0));
    }

    #[test]
    fn plane_integrals() {
        let g = PlaneGrid::default();
        let v = integrate_plane(|z| c((-z.norm_sqr()).exp(), 0.0), &g);
        assert!((v - c(1.0, 0.0)).norm() < 1e-12);
        let v = integrate_plane(|_| c(1.0, 0.0), &g);
        assert!((v.re - 36.0).abs() < 1e-10);
        let v = integrate_plane(|z| c(z.norm_sqr() * (-z.norm_sqr()).exp(), 0.0), &g);
        assert!((v - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn grid_validation() {
        assert!(PlaneGrid::new(6.0, 10, 7).is_err());
        assert!(PlaneGrid::new(0.0, 10, 8).is_err());
        assert!(DiskGrid::new(12.0, 0, 8).is_err());
        assert!(DiskGrid::new(-1.0, 10, 8).is_err());
    }

    #[test]
    fn disk_integrals() {
        for two_k in [1.5, 2.0, 3.0] {
            // the radial integrand decays like exp((2 - 4K) s)
            let g = DiskGrid::new(30.0, 400, 256).unwrap();
            let v =
                integrate_disk_nodes(|n| c(n.one_minus_r2.powf(two_k), 0.0), two_k, &g).unwrap();
            assert!((v.re - 1.0).abs() < 1e-9, "2K={two_k}: {v}");
            let odd =
                integrate_disk_nodes(|n| n.zeta * n.one_minus_r2.powf(two_k), two_k, &g).unwrap();
            assert!(odd.norm() < 1e-12, "{odd}");
            // (2K)_1 |zeta|^2 (1-|zeta|^2)^(2K) integrates to 1
            let v = integrate_disk_nodes(
                |n| c(two_k * n.zeta.norm_sqr() * n.one_minus_r2.powf(two_k), 0.0),
                two_k,
                &g,
            )
            .unwrap();
            assert!((v.re - 1.0).abs() < 1e-9);
        }
        let g = DiskGrid::default();
        let v =
            integrate_disk_hyperbolic(|z| c((1.0 - z.norm_sqr()).powi(2), 0.0), 2.0, &g).unwrap();
        assert!((v.re - 1.0).abs() < 1e-9);
        assert!(integrate_disk_hyperbolic(|_| c(1.0, 0.0), 1.0, &g).is_err());
    }

    #[test]
    fn conjecture_spot_values() {
        let g = DiskGrid::default();
        let v = conjecture_integral(2.0, c(0.5, 0.0), &g, 1e-4).unwrap();
        assert!((v.rhs - 2.0 / 3.0).abs() < 1e-15);
        assert!((v.numeric / v.rhs - 1.0).abs() < 1e-8);
        assert!(v.imaginary.abs() < 1e-12);
        let v = conjecture_integral(3.0, c(0.0, 0.5), &g, 1e-4).unwrap();
        assert!((v.rhs - 4.0 / 9.0).abs() < 1e-15);
        assert!((v.numeric / v.rhs - 1.0).abs() < 1e-8);
        assert!(conjecture_integral(1.0, c(0.5, 0.0), &g, 1e-4).is_err());
        assert!(conjecture_integral(2.0, c(1.0, 0.0), &g, 1e-4).is_err());
        assert!(conjecture_integral(2.0, c(0.0, 0.0), &g, 1e-4).is_err());
    }

    #[test]
    fn hypergeometric_bound_covers_special_case() {
        // p = 1: 2F1(1/2, 0; 1; x) = 1
        assert!((hypergeometric_bound(1.0) - 1.0).abs() < 1e-12);
        assert!(hypergeometric_bound(2.5) > 1.0);
    }
}
