//! Flat `key = value` run configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Every setting a subcommand may read. Keys a command does not use are ignored by it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    /// Map family for render-julia and cycles.
    pub family: String,
    /// Circle-preserving family for rotnum.
    pub circle_family: String,
    /// Continued fraction `a0;d1,d2,[p1,p2]`.
    pub alpha: String,
    /// Decimal number for cf; empty means expand `alpha`.
    pub x: String,
    pub terms: usize,
    pub bits: usize,
    pub a: String,
    pub u: String,
    /// Real `a` of the Blaschke family.
    pub circle_a: f64,
    pub t: f64,
    pub q: String,
    pub degree: u32,
    pub iters: usize,
    pub estimator: String,
    pub tol: f64,
    pub modes: usize,
    pub center: String,
    pub width: f64,
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
    pub max_iter: u32,
    pub escape_out: f64,
    pub capture_in: f64,
    pub rho_frac: f64,
    pub ratio: String,
    pub tail: u64,
    pub ns: String,
    pub period: usize,
    pub window_min: String,
    pub window_max: String,
    pub seed_budget: usize,
    pub filter: String,
    /// Artifact path; empty means no artifact.
    pub out: String,
    /// Cache root; empty falls back to `RINGLAB_CACHE`.
    pub cache_dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: String::new(),
            family: "cubic-herman".into(),
            circle_family: "blaschke".into(),
            alpha: "0;[1]".into(),
            x: String::new(),
            terms: 400,
            bits: 256,
            a: "2+0.1i".into(),
            u: "-3.98404183+3.28819628i".into(),
            circle_a: 4.0,
            t: 0.0,
            q: "0.5".into(),
            degree: 2,
            iters: 200_000,
            estimator: "convergent_accelerated".into(),
            tol: 1e-8,
            modes: 512,
            center: "0".into(),
            width: 4.0,
            height: 4.0,
            nx: 512,
            ny: 512,
            max_iter: 500,
            escape_out: 1e6,
            capture_in: 1e-6,
            rho_frac: 0.5,
            ratio: "13/10".into(),
            tail: 1,
            ns: "4,6,8".into(),
            period: 4,
            window_min: "-3-3i".into(),
            window_max: "3+3i".into(),
            seed_budget: 3600,
            filter: "bounded".into(),
            out: String::new(),
            cache_dir: String::new(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Precondition(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Precondition(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Every key in declaration order, one `key = value` per line.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::parse(&c.canonical()).unwrap(), c);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c = RunConfig::parse("bits = 128\nalpha = \"0;2,[1]\"\n").unwrap();
        assert_eq!(c.bits, 128);
        assert_eq!(c.terms, RunConfig::default().terms);
        assert!(RunConfig::parse("nope = 1").is_err());
    }
}
