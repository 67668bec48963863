use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    UElements,
    UComposition,
    UTrace,
    Glauber,
    Laguerre,
    Su11Elements,
    Su11Trace,
    Disentangle,
    Decomposition,
    Resolution,
    Conjecture,
    Paris,
    GlauberFailure,
    All,
}

impl Suite {
    pub const MEMBERS: [Suite; 13] = [
        Suite::UElements,
        Suite::UComposition,
        Suite::UTrace,
        Suite::Glauber,
        Suite::Laguerre,
        Suite::Su11Elements,
        Suite::Su11Trace,
        Suite::Disentangle,
        Suite::Decomposition,
        Suite::Resolution,
        Suite::Conjecture,
        Suite::Paris,
        Suite::GlauberFailure,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Every field is optional; unset values fall back to the suite defaults.
#[derive(Debug, Clone, Default, PartialEq, Parser, Deserialize)]
#[command(
    name = "fockops",
    version,
    about = "Verification suites for coherent and su(1,1) operators"
)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Options {
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    #[arg(long)]
    pub two_k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub z_re: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub z_im: Option<f64>,
    /// Modulus of chi for the conjecture suite.
    #[arg(long)]
    pub chi: Option<f64>,
    /// Single-mode or spin-K cutoff N; per-mode cutoff for the paris suite.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Safe-sector rank; total-quanta bound for the paris suite.
    #[arg(long)]
    pub safe_sector: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub radial_nodes: Option<usize>,
    #[arg(long)]
    pub angular_nodes: Option<usize>,
    #[arg(long)]
    pub s_max: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Adds the 2K -> 1 sampling 1.5, 1.25, 1.125, 1.0625 to the conjecture suite.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub limit_study: Option<bool>,
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! prefer {
    ($a:ident, $b:ident, $($f:ident),*) => {
        Options { $($f: $a.$f.or($b.$f),)* config: $a.config }
    };
}

impl Options {
    /// Fields set in `self` win over those in `fallback`.
    pub fn or(self, fallback: Options) -> Options {
        prefer!(
            self,
            fallback,
            suite,
            two_k,
            z_re,
            z_im,
            chi,
            cutoff,
            safe_sector,
            tol,
            radius,
            radial_nodes,
            angular_nodes,
            s_max,
            out,
            format,
            jobs,
            limit_study
        )
    }

    pub fn z(&self) -> Option<Complex64> {
        match (self.z_re, self.z_im) {
            (None, None) => None,
            (re, im) => Some(Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0))),
        }
    }

    pub fn from_json(text: &str) -> serde_json::Result<Options> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_config() {
        let cfg = Options::from_json(r#"{"suite": "paris", "two-k": 3.0, "cutoff": 40}"#).unwrap();
        let flags = Options::parse_from(["fockops", "--two-k", "2", "--z-im", "-0.5"]);
        let o = flags.or(cfg);
        assert_eq!(o.suite, Some(Suite::Paris));
        assert_eq!(o.two_k, Some(2.0));
        assert_eq!(o.cutoff, Some(40));
        assert_eq!(o.z(), Some(Complex64::new(0.0, -0.5)));
        assert!(Options::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn limit_study_flag() {
        assert_eq!(
            Options::parse_from(["fockops", "--limit-study"]).limit_study,
            Some(true)
        );
        assert_eq!(Options::parse_from(["fockops"]).limit_study, None);
    }
}
