//! Log-gamma and Pochhammer symbols, associated Laguerre polynomials, Jacobi
//! recurrences, and Gauss quadrature rules.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Above this conditioning the explicit Laguerre sum gives way to the recurrence.
const LAGUERRE_CONDITION_LIMIT: f64 = 500.0;
/// Degree above which the recurrence is always used.
const LAGUERRE_SUM_MAX_DEGREE: usize = 60;

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

/// Table of `ln n!` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogFactorialTable {
    values: Vec<f64>,
}

impl LogFactorialTable {
    pub fn new(n_max: usize) -> Self {
        let mut values = Vec::with_capacity(n_max + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for n in 1..=n_max {
            acc += (n as f64).ln();
            values.push(acc);
        }
        Self { values }
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// `ln n!`; falls back to log-gamma beyond the table.
    pub fn get(&self, n: usize) -> f64 {
        match self.values.get(n) {
            Some(v) => *v,
            None => ln_gamma(n as f64 + 1.0),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `ln (a)_n` for the rising factorial `(a)_n = a (a+1) ... (a+n-1)`.
pub fn log_pochhammer(a: f64, n: usize) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::OutOfRange {
            name: "a",
            value: a,
            requirement: "a > 0",
        });
    }
    Ok(log_pochhammer_unchecked(a, n))
}

pub(crate) fn log_pochhammer_unchecked(a: f64, n: usize) -> f64 {
    if n <= 64 {
        (0..n).map(|i| (a + i as f64).ln()).sum()
    } else {
        ln_gamma(a + n as f64) - ln_gamma(a)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
    abs: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
    }

    /// Adds `sign * exp(log_mag)`.
    pub(crate) fn add_log(&mut self, sign: f64, log_mag: f64) {
        self.add(sign * log_mag.exp());
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }

    /// `sum |terms| / |sum terms|`, infinite for an exact zero.
    pub(crate) fn condition(&self) -> f64 {
        let v = self.value().abs();
        if v == 0.0 {
            if self.abs == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            self.abs / v
        }
    }
}

/// `a / b` in double-double.
///
/// The quotient of two `TwoFloat`s in twofloat 0.8 loses the low word of the
/// divisor's reciprocal, so the reciprocal is refined with one Newton step.
pub(crate) fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let th = 1.0 / b.hi();
    let e = TwoFloat::from(1.0) - b * th;
    a * (e * th + th)
}

/// Sum of terms `u_0..u_len` given their log-magnitudes and the ratios
/// `ratio(j) = u_j / u_(j-1)`, evaluated in double-double.
///
/// The recursion starts from the largest term, scaled to one, so no partial
/// product over- or underflows. Returns the anchor index and the sum in units
/// of the anchor term.
pub(crate) fn anchored_sum<F>(logs: &[f64], ratio: F) -> (usize, f64)
where
    F: Fn(usize) -> TwoFloat,
{
    let anchor = logs
        .iter()
        .enumerate()
        .fold(0, |best, (j, &l)| if l > logs[best] { j } else { best });
    let one = TwoFloat::from(1.0);
    let mut total = one;
    let mut u = one;
    for j in anchor + 1..logs.len() {
        u *= ratio(j);
        total += u;
    }
    u = one;
    for j in (1..=anchor).rev() {
        u = dd_div(u, ratio(j));
        total += u;
    }
    (anchor, total.hi() + total.lo())
}

/// Finite alternating sum for `L_n^(alpha)(x)` with its condition number.
pub fn laguerre_sum(n: usize, alpha: f64, x: f64) -> (f64, f64) {
    let mut acc = CompensatedSum::default();
    let lead = ln_gamma(n as f64 + alpha + 1.0);
    let lx = x.ln();
    for j in 0..=n {
        if j > 0 && x == 0.0 {
            break;
        }
        let jf = j as f64;
        let log_mag =
            lead - ln_gamma((n - j) as f64 + 1.0) - ln_gamma(alpha + jf + 1.0) - ln_gamma(jf + 1.0)
                + if j == 0 { 0.0 } else { jf * lx };
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc.add_log(sign, log_mag);
    }
    (acc.value(), acc.condition())
}

/// Three-term recurrence `(k+1) L_{k+1} = (2k+1+alpha-x) L_k - (k+alpha) L_{k-1}`.
pub fn laguerre_recurrence(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Associated Laguerre polynomial `L_n^(alpha)(x)`.
///
/// The explicit sum is used while it is well conditioned; otherwise the
/// three-term recurrence.
pub fn assoc_laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    if n <= LAGUERRE_SUM_MAX_DEGREE {
        let (v, cond) = laguerre_sum(n, alpha, x);
        if cond <= LAGUERRE_CONDITION_LIMIT {
            return v;
        }
    }
    laguerre_recurrence(n, alpha, x)
}

/// `sum_n L_n^(alpha)(x) t^n = exp(-x t / (1-t)) / (1-t)^(alpha+1)`.
pub fn laguerre_generating_closed(x: f64, t: f64, alpha: f64) -> Result<f64> {
    if !(t.abs() < 1.0) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            requirement: "|t| < 1",
        });
    }
    Ok((-x * t / (1.0 - t)).exp() / (1.0 - t).powf(alpha + 1.0))
}

/// Binary fixed-point number `mantissa / 2^bits`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Fixed {
    mantissa: BigInt,
    bits: u32,
}

impl Fixed {
    pub(crate) fn one(bits: u32) -> Self {
        Self {
            mantissa: BigInt::from(1) << bits as usize,
            bits,
        }
    }

    pub(crate) fn zero(bits: u32) -> Self {
        Self {
            mantissa: BigInt::zero(),
            bits,
        }
    }

    /// Exact conversion of a finite `f64` (truncates below `2^-bits`).
    pub(crate) fn from_f64(x: f64, bits: u32) -> Self {
        Self::one(bits).mul_f64(x)
    }

    pub(crate) fn to_f64(&self) -> f64 {
        // keep 64 significant bits before converting
        let len = self.mantissa.bits() as i64;
        let drop = (len - 64).max(0);
        let head = (&self.mantissa >> drop as usize)
            .to_f64()
            .unwrap_or(f64::NAN);
        head * 2f64.powi((drop - self.bits as i64) as i32)
    }

    pub(crate) fn mul(&self, other: &Self) -> Self {
        Self {
            mantissa: (&self.mantissa * &other.mantissa) >> self.bits as usize,
            bits: self.bits,
        }
    }

    /// Exact product with an `f64` up to the final truncation.
    pub(crate) fn mul_f64(&self, x: f64) -> Self {
        let (m, e) = decompose(x);
        let p = &self.mantissa * BigInt::from(m);
        let mantissa = if e >= 0 {
            p << e as usize
        } else {
            p >> (-e) as usize
        };
        Self {
            mantissa,
            bits: self.bits,
        }
    }

    pub(crate) fn mul_int(&self, k: i64) -> Self {
        Self {
            mantissa: &self.mantissa * BigInt::from(k),
            bits: self.bits,
        }
    }

    pub(crate) fn div_int(&self, k: u64) -> Self {
        Self {
            mantissa: &self.mantissa / BigInt::from(k),
            bits: self.bits,
        }
    }

    pub(crate) fn div_f64(&self, x: f64) -> Self {
        let (m, e) = decompose(x);
        let q = (&self.mantissa << 64usize) / BigInt::from(m);
        let shift = 64 + e;
        let mantissa = if shift >= 0 {
            q >> shift as usize
        } else {
            q << (-shift) as usize
        };
        Self {
            mantissa,
            bits: self.bits,
        }
    }

    pub(crate) fn add_assign(&mut self, other: &Self) {
        self.mantissa += &other.mantissa;
    }
}

/// `x = m * 2^e` with integer `m`.
fn decompose(x: f64) -> (i64, i64) {
    if x == 0.0 {
        return (0, 0);
    }
    let b = x.to_bits();
    let sign = if b >> 63 == 1 { -1 } else { 1 };
    let exp = ((b >> 52) & 0x7ff) as i64;
    let frac = (b & ((1u64 << 52) - 1)) as i64;
    if exp == 0 {
        (sign * frac, -1074)
    } else {
        (sign * (frac | (1i64 << 52)), exp - 1075)
    }
}

/// `sum_{n <= n_max} t^n L_n^(alpha)(x)` in binary fixed point with `bits`
/// fractional bits.
///
/// The inputs are converted exactly, so for large `bits` the only error is one
/// truncation per step. Needed where the sum is many orders of magnitude below
/// its individual terms.
pub fn laguerre_weighted_sum_fixed(x: f64, t: f64, alpha: f64, n_max: usize, bits: u32) -> f64 {
    let xf = Fixed::from_f64(x, bits).mantissa;
    let tf = Fixed::from_f64(t, bits).mantissa;
    let af = Fixed::from_f64(alpha, bits).mantissa;
    let one = BigInt::from(1) << bits as usize;
    let mul = |a: &BigInt, b: &BigInt| -> BigInt { (a * b) >> bits as usize };

    let mut prev = one.clone();
    let mut sum = prev.clone();
    if n_max == 0 {
        return Fixed {
            mantissa: sum,
            bits,
        }
        .to_f64();
    }
    let mut cur = &one + &af - &xf;
    let mut tp = tf.clone();
    sum += mul(&tp, &cur);
    for k in 1..n_max {
        let kf = BigInt::from(k);
        let c1 = (BigInt::from(2 * k + 1) << bits as usize) + &af - &xf;
        let c2 = (&kf << bits as usize) + &af;
        let next = (mul(&c1, &cur) - mul(&c2, &prev)) / BigInt::from(k + 1);
        prev = cur;
        cur = next;
        tp = mul(&tp, &tf);
        if tp.is_zero() {
            break;
        }
        sum += mul(&tp, &cur);
    }
    Fixed {
        mantissa: sum,
        bits,
    }
    .to_f64()
}

/// Jacobi polynomials `P_k^(a,b)(x)` for `k = 0..=n_max` by forward recurrence.
pub fn jacobi_sequence(n_max: usize, a: f64, b: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max == 0 {
        return out;
    }
    out.push(0.5 * (a - b + (a + b + 2.0) * x));
    for k in 2..=n_max {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let c1 = 2.0 * kf * (kf + a + b) * (s - 2.0);
        let c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let c3 = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * s;
        let v = (c2 * out[k - 1] - c3 * out[k - 2]) / c1;
        out.push(v);
    }
    out
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_interval(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    (
        x.iter().map(|xi| mid + half * xi).collect(),
        w.iter().map(|wi| half * wi).collect(),
    )
}

/// Generalized Gauss-Laguerre rule for the weight `x^alpha e^(-x)` on `[0, inf)`.
///
/// Nodes come from the Golub-Welsch eigenproblem and are polished by Newton
/// steps; weights use `Gamma(n+alpha+1) x_i / (n! (n+1)^2 L_(n+1)(x_i)^2)`,
/// which keeps the tiny weights of the outer nodes relatively accurate.
pub fn gauss_laguerre(n: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let fi = i as f64;
        jac[(i, i)] = 2.0 * fi + alpha + 1.0;
        if i + 1 < n {
            let off = ((fi + 1.0) * (fi + 1.0 + alpha)).sqrt();
            jac[(i, i + 1)] = off;
            jac[(i + 1, i)] = off;
        }
    }
    let mut nodes: Vec<f64> = jac.symmetric_eigen().eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    let nf = n as f64;
    let log_scale = ln_gamma(nf + alpha + 1.0) - ln_gamma(nf + 1.0) - 2.0 * (nf + 1.0).ln();
    nodes
        .into_iter()
        .map(|mut x| {
            for _ in 0..3 {
                // x L_n' = n L_n - (n + alpha) L_(n-1)
                let l = laguerre_sequence(n, alpha, x);
                let deriv = (nf * l[n] - (nf + alpha) * l[n - 1]) / x;
                x -= l[n] / deriv;
            }
            let next = laguerre_sequence(n + 1, alpha, x)[n + 1];
            (x, (log_scale + x.ln() - 2.0 * next.abs().ln()).exp())
        })
        .unzip()
}

/// Values of `L_k^(alpha)(x)` for `k = 0..=n_max`.
pub fn laguerre_sequence(n_max: usize, alpha: f64, x: f64) -> DVector<f64> {
    let mut out = DVector::zeros(n_max + 1);
    out[0] = 1.0;
    if n_max >= 1 {
        out[1] = 1.0 + alpha - x;
    }
    for k in 1..n_max {
        let kf = k as f64;
        out[k + 1] =
            ((2.0 * kf + 1.0 + alpha - x) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
    }
    out
}
