//! su(1,1) generalized coherent operators `V(z) = exp(z K+ - conj(z) K-)` in
//! the discrete-series representation of weight `2K`.
//!
//! Closed forms that are alternating sums with large terms are evaluated in
//! double-double arithmetic, anchored at their largest term.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use twofloat::TwoFloat;

use crate::coherent::supported_in;
use crate::error::{Error, Result};
use crate::fock::{
    block_op_norm, build_spin_k, exp_antihermitian, exp_general, ComplexMatrix, SafeSector,
    SpaceKind, SpinWeight, TruncatedSpace, UnitaryResult,
};
use crate::quadrature::{pairwise_reduce, DiskGrid};
use crate::special::{
    anchored_sum, dd_div, jacobi_sequence, ln_gamma, log_pochhammer_unchecked, Fixed,
};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn ln_fact(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

fn parity(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn delta(n: usize, m: usize) -> Complex64 {
    c(if n == m { 1.0 } else { 0.0 })
}

/// A point `zeta` of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    zeta: Complex64,
    one_minus_r2: f64,
}

impl DiskPoint {
    pub fn new(zeta: Complex64) -> Result<Self> {
        let r = zeta.norm();
        if !(r < 1.0) {
            return Err(Error::OutOfRange {
                name: "|zeta|",
                value: r,
                requirement: "|zeta| < 1",
            });
        }
        Ok(Self {
            zeta,
            one_minus_r2: (1.0 - r) * (1.0 + r),
        })
    }

    /// `zeta = tanh(|z|) z / |z|`, keeping `1 - |zeta|^2 = sech^2 |z|` exact
    /// for large `|z|`.
    pub fn from_z(z: Complex64) -> Self {
        let r = z.norm();
        if r == 0.0 {
            return Self {
                zeta: c(0.0),
                one_minus_r2: 1.0,
            };
        }
        let sech = 1.0 / r.cosh();
        Self {
            zeta: z * (r.tanh() / r),
            one_minus_r2: sech * sech,
        }
    }

    pub fn zeta(self) -> Complex64 {
        self.zeta
    }

    /// `1 - |zeta|^2`.
    pub fn one_minus_r2(self) -> f64 {
        self.one_minus_r2
    }
}

/// `kappa = sinh(|z|) z / |z| = cosh(|z|) zeta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kappa(pub Complex64);

/// `chi = tanh(|z|) z / |z|`, with `|chi| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chi(pub Complex64);

/// The disk point, `kappa` and `chi` generated by `z`; all vanish at `z = 0`.
pub fn map_z(z: Complex64) -> (DiskPoint, Kappa, Chi) {
    let r = z.norm();
    let p = DiskPoint::from_z(z);
    let kappa = if r == 0.0 { c(0.0) } else { z * (r.sinh() / r) };
    (p, Kappa(kappa), Chi(p.zeta))
}

/// The 2x2 matrices `k+`, `k-`, `k3` with `(k+)^dagger = -k-`.
#[derive(Debug, Clone, PartialEq)]
pub struct DefiningRep {
    pub k_plus: ComplexMatrix,
    pub k_minus: ComplexMatrix,
    pub k3: ComplexMatrix,
}

impl Default for DefiningRep {
    fn default() -> Self {
        Self::new()
    }
}

impl DefiningRep {
    pub fn new() -> Self {
        let k_plus = ComplexMatrix::from_fn(2, |i, j| c(if (i, j) == (0, 1) { 1.0 } else { 0.0 }));
        let k_minus =
            ComplexMatrix::from_fn(2, |i, j| c(if (i, j) == (1, 0) { -1.0 } else { 0.0 }));
        let k3 = ComplexMatrix::from_diagonal(&[c(0.5), c(-0.5)]);
        Self {
            k_plus,
            k_minus,
            k3,
        }
    }

    /// Largest entry of `[k3,k+] - k+`, `[k3,k-] + k-`, `[k+,k-] + 2 k3` and
    /// `(k+)^dagger + k-`.
    pub fn algebra_defect(&self) -> f64 {
        let r1 = &self.k3.commutator(&self.k_plus) - &self.k_plus;
        let r2 = &self.k3.commutator(&self.k_minus) + &self.k_minus;
        let r3 = &self.k_plus.commutator(&self.k_minus) + &self.k3.scale(c(2.0));
        let r4 = &self.k_plus.adjoint() + &self.k_minus;
        [r1, r2, r3, r4]
            .iter()
            .map(ComplexMatrix::max_abs)
            .fold(0.0, f64::max)
    }

    /// `exp(z k+ - conj(z) k-)` next to both ordered products
    /// `e^(zeta k+) e^(log(1-|zeta|^2) k3) e^(-conj(zeta) k-)` and
    /// `e^(-conj(zeta) k-) e^(-log(1-|zeta|^2) k3) e^(zeta k+)`.
    pub fn disentangled(&self, z: Complex64) -> Result<[ComplexMatrix; 3]> {
        let p = DiskPoint::from_z(z);
        let zeta = p.zeta();
        let l = c(p.one_minus_r2().ln());
        let tol = 1e-16;
        let g = &self.k_plus.scale(z) - &self.k_minus.scale(z.conj());
        let lhs = exp_general(&g, tol)?;
        let ep = exp_general(&self.k_plus.scale(zeta), tol)?;
        let em = exp_general(&self.k_minus.scale(-zeta.conj()), tol)?;
        let forward = &(&ep * &exp_general(&self.k3.scale(l), tol)?) * &em;
        let reversed = &(&em * &exp_general(&self.k3.scale(-l), tol)?) * &ep;
        Ok([lhs, forward, reversed])
    }
}

/// A state on a spin-K space with the norm lost to truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    pub amplitudes: Vec<Complex64>,
    pub tail_bound: f64,
}

impl SpinState {
    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// `<K,n|zeta> = (1-|zeta|^2)^K sqrt((2K)_n / n!) zeta^n`.
pub fn perelomov_coefficient(spin: SpinWeight, zeta: DiskPoint, n: usize) -> Complex64 {
    let k = spin.k();
    let base = k * zeta.one_minus_r2().ln();
    if n == 0 {
        return c(base.exp());
    }
    let r = zeta.zeta().norm();
    if r == 0.0 {
        return c(0.0);
    }
    let mag =
        base + 0.5 * (log_pochhammer_unchecked(spin.two_k(), n) - ln_fact(n)) + n as f64 * r.ln();
    Complex64::from_polar(mag.exp(), n as f64 * zeta.zeta().arg())
}

/// Bound on `sum_{n >= cutoff} |<K,n|zeta>|^2`.
pub fn perelomov_tail(spin: SpinWeight, zeta: DiskPoint, cutoff: usize) -> f64 {
    let r2 = zeta.zeta().norm_sqr();
    if r2 == 0.0 {
        return 0.0;
    }
    let nf = cutoff as f64;
    let ratio = (spin.two_k() + nf) / (nf + 1.0) * r2;
    if ratio >= 1.0 {
        return 1.0;
    }
    perelomov_coefficient(spin, zeta, cutoff).norm_sqr() / (1.0 - ratio)
}

const STATE_TAIL_LIMIT: f64 = 1e-10;

fn spin_of(space: &TruncatedSpace) -> Result<SpinWeight> {
    space.expect_kind(SpaceKind::SpinK)?;
    space.spin().ok_or(Error::MissingSpin)
}

fn checked_tail(spin: SpinWeight, p: DiskPoint, cutoff: usize) -> Result<f64> {
    let tail = perelomov_tail(spin, p, cutoff);
    if tail > STATE_TAIL_LIMIT {
        return Err(Error::AmplitudeTooLarge {
            amplitude: p.zeta().norm(),
            cutoff,
            tail,
        });
    }
    Ok(tail)
}

/// Perelomov state `|zeta>` from its series coefficients.
pub fn perelomov_state(space: &TruncatedSpace, zeta: DiskPoint) -> Result<SpinState> {
    let spin = spin_of(space)?;
    let n = space.cutoff();
    let tail_bound = checked_tail(spin, zeta, n)?;
    Ok(SpinState {
        amplitudes: (0..n)
            .map(|k| perelomov_coefficient(spin, zeta, k))
            .collect(),
        tail_bound,
    })
}

/// `V(z)` on a truncated spin-K space.
pub fn v_operator(space: &TruncatedSpace, z: Complex64) -> Result<UnitaryResult> {
    let g = build_spin_k(space)?;
    exp_antihermitian(&(&g.k_plus.scale(z) - &g.k_minus.scale(z.conj())))
}

/// `V(z)|K,0>` from the exponentiated matrix.
pub fn generalized_coherent_state(space: &TruncatedSpace, z: Complex64) -> Result<SpinState> {
    let spin = spin_of(space)?;
    let tail_bound = checked_tail(spin, DiskPoint::from_z(z), space.cutoff())?;
    Ok(SpinState {
        amplitudes: v_operator(space, z)?.matrix.column(0),
        tail_bound,
    })
}

/// `<K,n|V(r)|K,m>` for real `r >= 0`.
fn v_radial(two_k: f64, n: usize, m: usize, r: f64) -> f64 {
    if r == 0.0 {
        return delta(n, m).re;
    }
    let (lo, hi) = (n.min(m), n.max(m));
    let sh = r.sinh();
    let k2 = sh * sh;
    let ln_k2 = 2.0 * sh.ln();
    let ln_1p = 2.0 * r.cosh().ln();
    let lead = if n < m { parity(m - n) } else { 1.0 };
    let log_pref = 0.5
        * (ln_fact(n) + ln_fact(m)
            - log_pochhammer_unchecked(two_k, n)
            - log_pochhammer_unchecked(two_k, m))
        + (hi - lo) as f64 * 0.5 * ln_k2
        - (two_k / 2.0 + (n + m) as f64 / 2.0) * ln_1p;
    let lg = ln_gamma(two_k);
    let logs: Vec<f64> = (0..=lo)
        .map(|j| {
            ln_gamma(two_k + (hi + lo - j) as f64)
                - lg
                - ln_fact(hi - j)
                - ln_fact(lo - j)
                - ln_fact(j)
                + j as f64 * ln_1p
                + (lo - j) as f64 * ln_k2
        })
        .collect();
    let growth = TwoFloat::new_add(1.0, k2) / k2;
    let (a, sum) = anchored_sum(&logs, |j| {
        let num = ((hi - j + 1) * (lo - j + 1)) as f64;
        let den = TwoFloat::from(two_k + (hi + lo - j) as f64) * j as f64;
        -dd_div(growth * num, den)
    });
    lead * parity(lo - a) * (log_pref + logs[a]).exp() * sum
}

/// `<K,n|V(z)|K,m>` from the closed double sum in `kappa`.
///
/// `V_nm(r e^(i theta)) = e^(i theta (n-m)) V_nm(r)`.
pub fn v_element_closed(spin: SpinWeight, n: usize, m: usize, z: Complex64) -> Result<Complex64> {
    let two_k = spin.require_at_least_one()?.two_k();
    let r = z.norm();
    if r == 0.0 {
        return Ok(delta(n, m));
    }
    let phase = Complex64::from_polar(1.0, (n as f64 - m as f64) * z.arg());
    Ok(phase * v_radial(two_k, n, m, r))
}

/// Real matrix `V_nm(r)`, `n, m < rows`.
pub fn v_radial_block(spin: SpinWeight, r: f64, rows: usize) -> Result<DMatrix<f64>> {
    let two_k = spin.require_at_least_one()?.two_k();
    Ok(DMatrix::from_fn(rows, rows, |n, m| {
        v_radial(two_k, n, m, r)
    }))
}

/// Entry `(n, m)` of `e^(zeta K+) e^(log(1-|zeta|^2) K3) e^(-conj(zeta) K-)`.
///
/// The matrix product is a finite sum over intermediate indices
/// `l <= min(n, m)`, evaluated exactly up to double-double rounding.
pub fn disentangled_element(spin: SpinWeight, n: usize, m: usize, p: DiskPoint) -> Complex64 {
    let two_k = spin.two_k();
    let zeta = p.zeta();
    let t = zeta.norm();
    if t == 0.0 {
        return delta(n, m);
    }
    // 1 - t^2 formed in double-double from the same t that enters the ratios
    let t2 = TwoFloat::new_mul(t, t);
    let s2 = TwoFloat::from(1.0) - t2;
    let ln_s2 = s2.hi().ln();
    let ln_t = t.ln();
    let lo = n.min(m);
    let logs: Vec<f64> = (0..=lo)
        .map(|l| {
            (n + m - 2 * l) as f64 * ln_t + l as f64 * ln_s2
                - ln_fact(l)
                - log_pochhammer_unchecked(two_k, l)
                - ln_fact(n - l)
                - ln_fact(m - l)
        })
        .collect();
    let step = dd_div(s2, t2);
    let (a, sum) = anchored_sum(&logs, |l| {
        let num = ((n - l + 1) * (m - l + 1)) as f64;
        let den = TwoFloat::from(two_k + l as f64 - 1.0) * l as f64;
        -dd_div(step * num, den)
    });
    let log_pref = spin.k() * ln_s2
        + 0.5
            * (ln_fact(n)
                + log_pochhammer_unchecked(two_k, n)
                + ln_fact(m)
                + log_pochhammer_unchecked(two_k, m));
    let mag = parity(m - a) * (log_pref + logs[a]).exp() * sum;
    Complex64::from_polar(1.0, (n as f64 - m as f64) * zeta.arg()) * mag
}

/// Safe-sector residuals of the disentangling formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisentangleResidual {
    /// Operator norm of `V(z) - e^(zeta K+) e^(log(1-|zeta|^2) K3) e^(-conj(zeta) K-)`
    /// on the safe sector of the spin-K space.
    pub forward: f64,
    /// The same ordering in the defining representation.
    pub forward_defining: f64,
    /// The reversed ordering in the defining representation.
    pub reversed_defining: f64,
}

impl DisentangleResidual {
    pub fn max(&self) -> f64 {
        self.forward
            .max(self.forward_defining)
            .max(self.reversed_defining)
    }
}

pub fn disentangle_residual(
    space: &TruncatedSpace,
    z: Complex64,
    sector: SafeSector,
) -> Result<DisentangleResidual> {
    let spin = spin_of(space)?;
    let v = v_operator(space, z)?.matrix;
    let rows = sector.rank();
    let p = DiskPoint::from_z(z);
    let diff = DMatrix::from_fn(rows, rows, |n, m| {
        v[(n, m)] - disentangled_element(spin, n, m, p)
    });
    let [lhs, fwd, rev] = DefiningRep::new().disentangled(z)?;
    Ok(DisentangleResidual {
        forward: block_op_norm(&diff),
        forward_defining: (&lhs - &fwd).max_abs(),
        reversed_defining: (&lhs - &rev).max_abs(),
    })
}

/// `Tr V(z) = (1+|chi|)/(2|chi|) ((1-|chi|)/(1+|chi|))^K`.
pub fn trace_v_closed(spin: SpinWeight, z: Complex64) -> Result<f64> {
    let k = spin.require_at_least_one()?.k();
    let r = z.norm();
    if r == 0.0 {
        return Err(Error::TraceDiverges);
    }
    let chi = r.tanh();
    // 1 - tanh r without cancellation
    let one_minus = 2.0 / ((2.0 * r).exp() + 1.0);
    Ok((1.0 + chi) / (2.0 * chi) * (one_minus / (1.0 + chi)).powf(k))
}

/// `sum_n e^(-2|z|(K+n)) = e^(-2|z|K) / (1 - e^(-2|z|))`.
pub fn trace_v_geometric(spin: SpinWeight, z: Complex64) -> Result<f64> {
    let k = spin.k();
    let r = z.norm();
    if r == 0.0 {
        return Err(Error::TraceDiverges);
    }
    Ok((-2.0 * r * k).exp() / -(-2.0 * r).exp_m1())
}

/// Numerical trace of `V(z)` from its diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEstimate {
    /// `sum_{n <= n_max} <K,n|V(z)|K,n>`.
    pub partial_sum: f64,
    /// Abel limit `lim_{h -> 0+} sum_n (1-h)^n <K,n|V(z)|K,n>`.
    pub abel: f64,
    /// Difference between cubic and quadratic extrapolation in `h`.
    pub abel_error: f64,
}

const ABEL_STEPS: [f64; 4] = [0.02, 0.01, 0.005, 0.0025];

/// Diagonal elements `<K,n|V(z)|K,n> = (1-rho)^K P_n^(0, 2K-1)(1 - 2 rho)`
/// with `rho = tanh^2 |z|`, for `n = 0..=n_max`.
pub fn v_diagonal(spin: SpinWeight, r: f64, n_max: usize) -> Vec<f64> {
    let rho = r.tanh().powi(2);
    let pre = r.cosh().powf(-spin.two_k());
    jacobi_sequence(n_max, 0.0, spin.two_k() - 1.0, 1.0 - 2.0 * rho)
        .into_iter()
        .map(|p| pre * p)
        .collect()
}

/// Neville extrapolation of `(x_i, y_i)` to `x = 0`.
fn extrapolate_to_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let k = xs.len();
    for level in 1..k {
        for i in 0..k - level {
            let (xa, xb) = (xs[i], xs[i + level]);
            p[i] = (xb * p[i] - xa * p[i + 1]) / (xb - xa);
        }
    }
    p[0]
}

/// The diagonal of `V(z)` oscillates with slowly decaying amplitude, so the
/// trace is read off as an Abel limit; the plain partial sum is reported too.
pub fn trace_v_numeric(spin: SpinWeight, z: Complex64, n_max: usize) -> Result<TraceEstimate> {
    spin.require_at_least_one()?;
    let r = z.norm();
    if r == 0.0 {
        return Err(Error::TraceDiverges);
    }
    let h_min = ABEL_STEPS[ABEL_STEPS.len() - 1];
    let n_abel = ((40.0 / h_min).ceil() as usize).max(n_max);
    let d = v_diagonal(spin, r, n_abel);
    let partial_sum = d[..=n_max].iter().sum();
    let values: Vec<f64> = ABEL_STEPS
        .iter()
        .map(|&h| {
            let mut w = 1.0;
            let mut acc = 0.0;
            for &x in &d {
                acc += w * x;
                w *= 1.0 - h;
            }
            acc
        })
        .collect();
    let cubic = extrapolate_to_zero(&ABEL_STEPS, &values);
    let quadratic = extrapolate_to_zero(&ABEL_STEPS[1..], &values[1..]);
    Ok(TraceEstimate {
        partial_sum,
        abel: cubic,
        abel_error: (cubic - quadratic).abs(),
    })
}

/// Largest index handled by [`decomposition_block`].
pub const DECOMPOSITION_MAX_INDEX: usize = 60;

const DECOMPOSITION_BITS: u32 = 384;

/// Leading `rows x rows` block of `e^X e^(-2|z| K3) e^(-X)` with
/// `X = (pi/4)(e^(i theta) K+ + e^(-i theta) K-)`, the intermediate sum over
/// `K3` eigenstates cut at `terms`.
///
/// `e^(+-X)` is applied through `e^(+-e^(i theta) K+) 2^K3 e^(+-e^(-i theta) K-)`,
/// which turns every entry into a finite double sum over alternating series in
/// `q = e^(-2|z|)`. Those series cancel by many orders of magnitude and are
/// summed in fixed point.
pub fn decomposition_block(
    spin: SpinWeight,
    z: Complex64,
    rows: usize,
    terms: usize,
) -> Result<DMatrix<Complex64>> {
    let two_k = spin.require_at_least_one()?.two_k();
    let r = z.norm();
    if r == 0.0 {
        return Err(Error::OutOfRange {
            name: "|z|",
            value: r,
            requirement: "z != 0",
        });
    }
    if rows == 0 || rows > DECOMPOSITION_MAX_INDEX + 1 {
        return Err(Error::OutOfRange {
            name: "rows",
            value: rows as f64,
            requirement: "1 <= rows <= 61",
        });
    }
    let q = (-2.0 * r).exp();
    let one = Fixed::one(DECOMPOSITION_BITS);
    // s[l][l'] = sum_{j = max(l,l')}^{terms-1} (-q)^j j! (2K)_j / ((j-l)! (j-l')!)
    let s: Vec<Vec<Fixed>> = (0..rows)
        .into_par_iter()
        .map(|l| {
            (0..rows)
                .map(|lp| {
                    let j0 = l.max(lp);
                    let mut acc = Fixed::zero(DECOMPOSITION_BITS);
                    if j0 >= terms {
                        return acc;
                    }
                    let mut t = one.clone();
                    for i in 1..=j0 {
                        t = t
                            .mul_f64(-q)
                            .mul_int(i as i64)
                            .mul_f64(two_k + (i - 1) as f64);
                    }
                    for i in 1..=j0 - l {
                        t = t.div_int(i as u64);
                    }
                    for i in 1..=j0 - lp {
                        t = t.div_int(i as u64);
                    }
                    acc.add_assign(&t);
                    for j in j0..terms - 1 {
                        t = t
                            .mul_f64(-q)
                            .mul_int((j + 1) as i64)
                            .mul_f64(two_k + j as f64)
                            .div_int(((j + 1 - l) * (j + 1 - lp)) as u64);
                        acc.add_assign(&t);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    // w[n][l] = 2^l / (l! (2K)_l (n-l)!)
    let w: Vec<Vec<Fixed>> = (0..rows)
        .map(|n| {
            (0..=n)
                .map(|l| {
                    let mut x = one.mul_int(1 << l);
                    for i in 1..=l {
                        x = x.div_int(i as u64).div_f64(two_k + (i - 1) as f64);
                    }
                    for i in 1..=n - l {
                        x = x.div_int(i as u64);
                    }
                    x
                })
                .collect()
        })
        .collect();
    let theta = z.arg();
    let base = spin.k() * (4.0 * q).ln();
    let mut out = DMatrix::<Complex64>::zeros(rows, rows);
    for n in 0..rows {
        for m in 0..rows {
            let mut acc = Fixed::zero(DECOMPOSITION_BITS);
            for (l, wl) in w[n].iter().enumerate() {
                for (lp, wlp) in w[m].iter().enumerate() {
                    acc.add_assign(&wl.mul(wlp).mul(&s[l][lp]));
                }
            }
            let log_norm = base
                + 0.5
                    * (ln_fact(n)
                        + log_pochhammer_unchecked(two_k, n)
                        + ln_fact(m)
                        + log_pochhammer_unchecked(two_k, m));
            let mag = parity(m) * log_norm.exp() * acc.to_f64();
            out[(n, m)] = Complex64::from_polar(1.0, theta * (n as f64 - m as f64)) * mag;
        }
    }
    Ok(out)
}

/// Largest entry of `V(z) - e^X e^(-2|z| K3) e^(-X)` on indices below `rows`,
/// both sides truncated at the cutoff of `space`.
pub fn decomposition_residual(space: &TruncatedSpace, z: Complex64, rows: usize) -> Result<f64> {
    let spin = spin_of(space)?;
    if rows > space.cutoff() {
        return Err(Error::SectorTooLarge {
            rank: rows,
            limit: space.cutoff(),
        });
    }
    let p = decomposition_block(spin, z, rows, space.cutoff())?;
    let v = v_operator(space, z)?.matrix;
    let mut worst = 0.0_f64;
    for m in 0..rows {
        for n in 0..rows {
            worst = worst.max((v[(n, m)] - p[(n, m)]).norm());
        }
    }
    Ok(worst)
}

/// `((2K-1)/pi) int Tr[A V(z)^dagger] V(z) d mu(z)` on the safe sector, with
/// `d mu(z) = sinh|z| cosh|z| d|z| d theta`; the disk grid's `s` is `|z|`.
pub fn glauber_su11_reconstruct(
    a: &ComplexMatrix,
    space: &TruncatedSpace,
    grid: &DiskGrid,
    sector: SafeSector,
) -> Result<ComplexMatrix> {
    let spin = spin_of(space)?.require_above_one()?;
    if a.dim() != space.cutoff() {
        return Err(Error::DimensionMismatch {
            expected: space.cutoff(),
            found: a.dim(),
        });
    }
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
        .map(|&(s, w)| {
            let b = DMatrix::from_fn(rows, rows, |n, m| v_radial(spin.two_k(), n, m, s));
            let mut acc = DMatrix::<Complex64>::zeros(rows, rows);
            for &theta in &angles {
                let e = Complex64::from_polar(1.0, theta);
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
    ComplexMatrix::new(total * c(spin.two_k() - 1.0))
}

/// `((2K-1)/pi) int |zeta><zeta| d^2zeta / (1-|zeta|^2)^2` on the safe sector.
pub fn resolution_identity_su11(
    space: &TruncatedSpace,
    grid: &DiskGrid,
    sector: SafeSector,
) -> Result<ComplexMatrix> {
    let spin = spin_of(space)?.require_above_one()?;
    let rows = sector.rank();
    let angles = grid.angles();
    let rings: Vec<DMatrix<Complex64>> = grid
        .radial_rule()
        .par_iter()
        .map(|&(s, w)| {
            let sech = 1.0 / s.cosh();
            let mut acc = DMatrix::<Complex64>::zeros(rows, rows);
            for &theta in &angles {
                let p = DiskPoint {
                    zeta: Complex64::from_polar(s.tanh(), theta),
                    one_minus_r2: sech * sech,
                };
                let v: Vec<Complex64> = (0..rows)
                    .map(|k| perelomov_coefficient(spin, p, k))
                    .collect();
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
    ComplexMatrix::new(total * c(spin.two_k() - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn ci(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spin(two_k: f64) -> SpinWeight {
        SpinWeight::new(two_k).unwrap()
    }

    #[test]
    fn map_z_values() {
        let (p, k, x) = map_z(c(0.0));
        assert_eq!((p.zeta(), k.0, x.0), (c(0.0), c(0.0), c(0.0)));
        let (p, k, _) = map_z(c(1.0));
        assert!((p.zeta().re - 0.761_594_155_955_764_9).abs() < 1e-15);
        assert!((k.0.re - 1.175_201_193_643_801_4).abs() < 1e-15);
        let z = ci(0.5, 0.5);
        let (p, k, x) = map_z(z);
        let ratio = k.0 / p.zeta();
        assert!((ratio - c(z.norm().cosh())).norm() < 1e-14);
        assert!((x.0.norm() - z.norm().tanh()).abs() < 1e-15);
    }

    #[test]
    fn defining_rep_algebra_and_orderings() {
        let d = DefiningRep::new();
        assert_eq!(d.algebra_defect(), 0.0);
        for z in [ci(0.3, 0.0), ci(1.0, -0.7), ci(0.0, 2.0)] {
            let [lhs, f, r] = d.disentangled(z).unwrap();
            assert!((&lhs - &f).max_abs() < 1e-14 * lhs.max_abs());
            assert!((&lhs - &r).max_abs() < 1e-14 * lhs.max_abs());
            assert!((lhs[(0, 0)] - c(z.norm().cosh())).norm() < 1e-14);
        }
    }

    #[test]
    fn perelomov_coefficients_and_norm() {
        let s = TruncatedSpace::spin_k(256, 2.0).unwrap();
        let st = perelomov_state(&s, DiskPoint::new(c(0.0)).unwrap()).unwrap();
        assert_eq!(st.amplitudes[0], c(1.0));
        assert!(st.amplitudes[1..].iter().all(|a| *a == c(0.0)));
        let p = DiskPoint::new(ci(0.3, 0.4)).unwrap();
        let st = perelomov_state(&s, p).unwrap();
        assert!((st.norm() - 1.0).abs() < 1e-13);
        let expect = 0.75_f64 * 2.0_f64.sqrt() * ci(0.3, 0.4);
        assert!((st.amplitudes[1] - expect).norm() < 1e-15);
        assert!(perelomov_state(
            &TruncatedSpace::spin_k(16, 2.0).unwrap(),
            DiskPoint::new(c(0.95)).unwrap()
        )
        .is_err());
    }

    #[test]
    fn exponentiated_state_matches_perelomov() {
        for two_k in [0.5, 1.0, 2.5] {
            let s = TruncatedSpace::spin_k(256, two_k).unwrap();
            let z = ci(0.6, -0.4);
            let g = generalized_coherent_state(&s, z).unwrap();
            let p = perelomov_state(&s, DiskPoint::from_z(z)).unwrap();
            let worst = g
                .amplitudes
                .iter()
                .zip(&p.amplitudes)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(worst < 1e-9, "2K={two_k}: {worst}");
            assert!((g.amplitudes[0].re - z.norm().cosh().powf(-two_k)).abs() < 1e-12);
        }
    }

    #[test]
    fn v_elements_small_cases() {
        let z = ci(0.4, 0.3);
        let k2 = z.norm().sinh().powi(2);
        let v = |n, m| v_element_closed(spin(2.0), n, m, z).unwrap();
        assert!((v(0, 0) - c(1.0 / (1.0 + k2).powi(1))).norm() < 1e-15);
        assert!((v(1, 1) - c((1.0 - 2.0 * k2) / (1.0 + k2).powi(2))).norm() < 1e-15);
        assert_eq!(v_element_closed(spin(3.0), 4, 2, c(0.0)).unwrap(), c(0.0));
        assert!(v_element_closed(spin(0.5), 0, 0, z).is_err());
    }

    #[test]
    fn v_elements_match_matrix() {
        for two_k in [1.0, 2.5] {
            let s = TruncatedSpace::spin_k(256, two_k).unwrap();
            for z in [ci(0.5, 0.0), ci(-0.9, 1.2)] {
                let v = v_operator(&s, z).unwrap().matrix;
                for n in 0..=20 {
                    for m in 0..=20 {
                        let e = v_element_closed(spin(two_k), n, m, z).unwrap();
                        assert!((e - v[(n, m)]).norm() < 1e-10, "{two_k} {z} {n} {m}");
                    }
                }
            }
        }
    }

    #[test]
    fn v_unitarity_symmetry() {
        let z = ci(0.8, -0.2);
        for (n, m) in [(0, 3), (5, 2), (7, 7)] {
            let a = v_element_closed(spin(3.0), n, m, z).unwrap();
            let b = v_element_closed(spin(3.0), m, n, -z).unwrap().conj();
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn disentangled_elements_match_matrix() {
        let s = TruncatedSpace::spin_k(256, 2.0).unwrap();
        let r = disentangle_residual(&s, c(1.0), SafeSector::new(64, &s).unwrap()).unwrap();
        assert!(r.forward < 1e-8, "{r:?}");
        assert!(r.max() < 1e-8);
        let zero = disentangle_residual(&s, c(0.0), SafeSector::default_for(&s)).unwrap();
        assert!(zero.max() < 1e-15);
    }

    #[test]
    fn trace_closed_forms() {
        let t = trace_v_closed(spin(2.0), c(LN_2)).unwrap();
        assert!((t - 1.0 / 3.0).abs() < 1e-15);
        for two_k in [1.0, 2.5, 4.0] {
            for r in [0.1, 0.5, 3.0] {
                let a = trace_v_closed(spin(two_k), c(r)).unwrap();
                let b = trace_v_geometric(spin(two_k), c(r)).unwrap();
                assert!((a / b - 1.0).abs() < 1e-13);
            }
        }
        assert_eq!(trace_v_closed(spin(2.0), c(0.0)), Err(Error::TraceDiverges));
    }

    #[test]
    fn diagonal_recurrence_matches_closed_elements() {
        let d = v_diagonal(spin(2.5), 0.7, 30);
        for (n, x) in d.iter().enumerate() {
            let e = v_element_closed(spin(2.5), n, n, c(0.7)).unwrap();
            assert!((e.re - x).abs() < 1e-12, "{n}");
        }
    }

    #[test]
    fn abel_trace() {
        let e = trace_v_numeric(spin(2.0), c(LN_2), 0).unwrap();
        assert!((e.partial_sum - 0.8_f64.powi(2)).abs() < 1e-15);
        assert!((e.abel - 1.0 / 3.0).abs() < 1e-8, "{e:?}");
        assert!(e.abel_error < 1e-6);
    }

    #[test]
    fn decomposition_matches_v() {
        let s = TruncatedSpace::spin_k(256, 2.0).unwrap();
        let r = decomposition_residual(&s, ci(0.5, 0.5), 11).unwrap();
        assert!(r < 1e-8, "{r}");
    }

    #[test]
    fn glauber_failure_entries() {
        let s = TruncatedSpace::spin_k(64, 2.0).unwrap();
        let mut a = ComplexMatrix::zeros(64);
        a[(0, 0)] = c(1.0);
        let g = DiskGrid::new(12.0, 200, 8).unwrap();
        let rec = glauber_su11_reconstruct(&a, &s, &g, SafeSector::new(4, &s).unwrap()).unwrap();
        assert!((rec[(0, 0)] - c(1.0)).norm() < 1e-8);
        assert!((rec[(1, 1)] - c(-0.5)).norm() < 1e-8);
        assert!(rec[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn su11_resolution() {
        let s = TruncatedSpace::spin_k(64, 2.0).unwrap();
        let g = DiskGrid::new(12.0, 200, 32).unwrap();
        let res = resolution_identity_su11(&s, &g, SafeSector::new(8, &s).unwrap()).unwrap();
        assert!((&res - &ComplexMatrix::identity(8)).max_abs() < 1e-8);
    }
}
