use fockops_core::coherent::{composition_phase, u_element_closed};
use fockops_core::quadrature::{conjecture_integral, DiskGrid};
use fockops_core::schwinger::paris_residual;
use fockops_core::special::{assoc_laguerre, laguerre_recurrence};
use fockops_core::su11::{map_z, trace_v_closed, trace_v_geometric, v_element_closed};
use fockops_core::{SpinWeight, TruncatedSpace};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;
use std::f64::consts::PI;

fn polar(r: f64, theta: f64) -> Complex64 {
    Complex64::from_polar(r, theta)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn displacement_adjoint_is_reflection(r in 0.0..3.0f64, th in -PI..PI, n in 0usize..25, m in 0usize..25) {
        let z = polar(r, th);
        let lhs = u_element_closed(n, m, z).conj();
        let rhs = u_element_closed(m, n, -z);
        prop_assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn displacement_rows_are_unit(r in 0.0..2.0f64, th in -PI..PI, n in 0usize..12) {
        let z = polar(r, th);
        let s: f64 = (0..120).map(|m| u_element_closed(n, m, z).norm_sqr()).sum();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn composition_phase_is_unimodular(a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64, d in -2.0..2.0f64) {
        let p = composition_phase(Complex64::new(a, b), Complex64::new(c, d));
        prop_assert!((p.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn v_rows_are_unit(two_k in 1.0..4.0f64, r in 0.05..0.6f64, th in -PI..PI, n in 0usize..8) {
        let spin = SpinWeight::new(two_k).unwrap();
        let z = polar(r, th);
        let s: f64 = (0..260).map(|m| v_element_closed(spin, n, m, z).unwrap().norm_sqr()).sum();
        prop_assert!((s - 1.0).abs() < 1e-11);
    }

    #[test]
    fn v_angular_factorization(two_k in 1.0..4.0f64, r in 0.0..1.5f64, th in -PI..PI, n in 0usize..20, m in 0usize..20) {
        let spin = SpinWeight::new(two_k).unwrap();
        let rotated = v_element_closed(spin, n, m, polar(r, th)).unwrap();
        let radial = v_element_closed(spin, n, m, polar(r, 0.0)).unwrap();
        let phase = Complex64::from_polar(1.0, th * (n as f64 - m as f64));
        prop_assert!((rotated - phase * radial).norm() < 1e-12);
    }

    #[test]
    fn trace_forms_agree(two_k in 1.0..5.0f64, r in 0.05..3.0f64) {
        let spin = SpinWeight::new(two_k).unwrap();
        let z = Complex64::new(r, 0.0);
        let a = trace_v_closed(spin, z).unwrap();
        let b = trace_v_geometric(spin, z).unwrap();
        prop_assert!(((a - b) / a).abs() < 1e-12);
    }

    #[test]
    fn laguerre_matches_recurrence(n in 0usize..40, alpha in 0.0..3.0f64, x in 0.0..20.0f64) {
        let a = assoc_laguerre(n, alpha, x);
        let b = laguerre_recurrence(n, alpha, x);
        prop_assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
    }

    #[test]
    fn disk_map_is_tanh(r in 0.0..5.0f64, th in -PI..PI) {
        let (p, _, _) = map_z(polar(r, th));
        prop_assert!((p.zeta() - polar(r.tanh(), th)).norm() < 1e-14);
        prop_assert!((p.one_minus_r2() - 1.0 / r.cosh().powi(2)).abs() < 1e-14);
    }
}

#[test]
fn trace_spot_value() {
    let t = trace_v_closed(
        SpinWeight::new(2.0).unwrap(),
        Complex64::new(2f64.ln(), 0.0),
    )
    .unwrap();
    assert!((t - 1.0 / 3.0).abs() < 1e-14);
}

#[test]
fn conjecture_spot_value() {
    let v = conjecture_integral(2.0, Complex64::new(0.5, 0.0), &DiskGrid::default(), 1e-6).unwrap();
    assert!((v.rhs - 2.0 / 3.0).abs() < 1e-15);
    assert!(((v.numeric - v.rhs) / v.rhs).abs() < 1e-4);
    assert!(v.imaginary.abs() < 1e-12);
}

#[test]
fn paris_vacuum_element() {
    let s = TruncatedSpace::two_mode(32).unwrap();
    let r = paris_residual(&s, Complex64::new(0.5, 0.0), 12).unwrap();
    let want = 1.0 / 0.5f64.cosh();
    assert!((r.vacuum_lhs.re - want).abs() < 1e-10);
    assert!((r.vacuum_rhs.re - want).abs() < 1e-12);
    assert!(r.residual < 1e-6);
}

/// `L_n^(alpha)(x) = sum_j (-1)^j binom(n+alpha, n-j) x^j / j!` in exact rationals.
fn laguerre_exact(n: usize, alpha: &BigRational, x: &BigRational) -> BigRational {
    let one = BigRational::one();
    let mut total = BigRational::zero();
    for j in 0..=n {
        let mut binom = one.clone();
        for i in 1..=(n - j) {
            let i = BigRational::from_integer(BigInt::from(i));
            binom = binom * (alpha + BigRational::from_integer(BigInt::from(j)) + &i) / i;
        }
        let mut term = binom;
        for k in 1..=j {
            term = term * x / BigRational::from_integer(BigInt::from(k));
        }
        if j % 2 == 1 {
            term = -term;
        }
        total += term;
    }
    total
}

#[test]
fn laguerre_matches_exact_rationals() {
    let alphas = [(0, 1), (1, 1), (5, 2)];
    let xs = [(1, 10), (1, 2), (3, 1), (10, 1), (25, 1), (50, 1)];
    for (an, ad) in alphas {
        let alpha = BigRational::new(BigInt::from(an), BigInt::from(ad));
        let af = an as f64 / ad as f64;
        for (xn, xd) in xs {
            let x = BigRational::new(BigInt::from(xn), BigInt::from(xd));
            let xf = xn as f64 / xd as f64;
            for n in [0, 1, 5, 17, 30, 45, 60] {
                let exact = laguerre_exact(n, &alpha, &x).to_f64().unwrap();
                let got = assoc_laguerre(n, af, xf);
                let scale = exact.abs().max(1e-300);
                assert!(
                    (got - exact).abs() <= 1e-10 * scale,
                    "n={n} alpha={af} x={xf}: {got} vs {exact}"
                );
            }
        }
    }
}
