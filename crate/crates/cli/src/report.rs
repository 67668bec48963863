use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// How `abs_error` and `rel_error` are compared against the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PassMode {
    Absolute,
    Relative,
    Either,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub params: BTreeMap<String, Value>,
    pub computed: Vec<f64>,
    pub reference: Vec<f64>,
    pub abs_error: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub cutoff: usize,
    pub safe_sector: usize,
    pub runtime_ms: u64,
}

/// Parameter map builder.
#[derive(Debug, Clone, Default)]
pub struct Params(BTreeMap<String, Value>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num(mut self, key: &str, v: f64) -> Self {
        self.0.insert(key.into(), Value::from(v));
        self
    }

    pub fn int(mut self, key: &str, v: usize) -> Self {
        self.0.insert(key.into(), Value::from(v));
        self
    }

    pub fn z(self, key: &str, z: Complex64) -> Self {
        self.num(&format!("{key}_re"), z.re)
            .num(&format!("{key}_im"), z.im)
    }

    pub fn text(mut self, key: &str, v: &str) -> Self {
        self.0.insert(key.into(), Value::from(v));
        self
    }

    pub fn into_map(self) -> BTreeMap<String, Value> {
        self.0
    }
}

/// Outcome of one check before timing and bookkeeping are attached.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub computed: Vec<f64>,
    pub reference: Vec<f64>,
    pub abs_error: f64,
    pub rel_error: f64,
    pub mode: PassMode,
    /// Extra entries merged into the report's params.
    pub notes: BTreeMap<String, Value>,
}

impl Outcome {
    /// Errors from the Euclidean distance between the two vectors.
    pub fn compare(computed: Vec<f64>, reference: Vec<f64>, mode: PassMode) -> Self {
        let diff = computed
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        let scale = reference.iter().map(|b| b * b).sum::<f64>().sqrt();
        Self::with_errors(computed, reference, diff, mode, scale)
    }

    pub fn complex(computed: Complex64, reference: Complex64, mode: PassMode) -> Self {
        Self::compare(
            vec![computed.re, computed.im],
            vec![reference.re, reference.im],
            mode,
        )
    }

    pub fn real(computed: f64, reference: f64, mode: PassMode) -> Self {
        Self::compare(vec![computed], vec![reference], mode)
    }

    /// A residual that should vanish, reported against a zero reference.
    pub fn residual(value: f64) -> Self {
        Self::with_errors(vec![value], vec![0.0], value, PassMode::Absolute, 0.0)
    }

    /// `rel_error` is taken against `scale`, or against 1 when `scale` is zero.
    pub fn with_errors(
        computed: Vec<f64>,
        reference: Vec<f64>,
        abs_error: f64,
        mode: PassMode,
        scale: f64,
    ) -> Self {
        let rel_error = if scale > 0.0 {
            abs_error / scale
        } else {
            abs_error
        };
        Self {
            computed,
            reference,
            abs_error,
            rel_error,
            mode,
            notes: BTreeMap::new(),
        }
    }

    pub fn note(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.notes.insert(key.into(), v.into());
        self
    }

    pub fn passes(&self, tol: f64) -> bool {
        let abs = self.abs_error <= tol;
        let rel = self.rel_error <= tol;
        match self.mode {
            PassMode::Absolute => abs,
            PassMode::Relative => rel,
            PassMode::Either => abs || rel,
        }
    }
}

pub fn sort_reports(reports: &mut [CheckReport]) {
    reports.sort_by_cached_key(|r| {
        (
            r.check.clone(),
            serde_json::to_string(&r.params).expect("params serialize"),
        )
    });
}

pub fn write_ndjson<W: Write>(out: &mut W, reports: &[CheckReport]) -> std::io::Result<()> {
    for r in reports {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub const CSV_COLUMNS: [&str; 11] = [
    "check",
    "params",
    "computed",
    "reference",
    "abs_error",
    "rel_error",
    "tolerance",
    "pass",
    "cutoff",
    "safe_sector",
    "runtime_ms",
];

fn join(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

pub fn write_csv<W: Write>(out: W, reports: &[CheckReport]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in reports {
        w.write_record([
            r.check.clone(),
            serde_json::to_string(&r.params).expect("params serialize"),
            join(&r.computed),
            join(&r.reference),
            r.abs_error.to_string(),
            r.rel_error.to_string(),
            r.tolerance.to_string(),
            r.pass.to_string(),
            r.cutoff.to_string(),
            r.safe_sector.to_string(),
            r.runtime_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_modes() {
        let o = Outcome::real(1.0 + 1e-7, 1.0, PassMode::Relative);
        assert!(o.passes(1e-6));
        assert!(!o.passes(1e-8));
        let r = Outcome::residual(3e-9);
        assert!(r.passes(1e-8));
        assert_eq!(r.rel_error, 3e-9);
        let e = Outcome::real(1e-12, 0.0, PassMode::Either);
        assert!(e.passes(1e-10));
    }
}
