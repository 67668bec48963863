//! Shared inputs for the benchmarks.

use num_complex::Complex64;

/// Amplitudes spanning the small, moderate and envelope-edge regimes.
pub const AMPLITUDES: [(f64, f64); 3] = [(0.3, 0.4), (1.0, -0.5), (0.0, 1.5)];

pub fn amplitudes() -> impl Iterator<Item = Complex64> {
    AMPLITUDES.iter().map(|&(re, im)| Complex64::new(re, im))
}

/// Label used in benchmark ids.
pub fn label(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}
