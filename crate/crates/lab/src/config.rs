//! Experiment configuration files.

use std::fmt;
use std::path::{Path, PathBuf};

use semiperiodic_core::domain::MAX_DIMENSION;
use serde::{Deserialize, Serialize};

use crate::error::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExperimentKind {
    #[serde(rename = "dispersion-torus")]
    DispersionTorus,
    #[serde(rename = "dispersion-euclid")]
    DispersionEuclid,
    #[serde(rename = "part-i-necessity")]
    PartINecessity,
    #[serde(rename = "part-ii-modulation")]
    PartIiModulation,
    #[serde(rename = "single-cap")]
    SingleCap,
    #[serde(rename = "strichartz-endpoint")]
    StrichartzEndpoint,
    #[serde(rename = "bernstein")]
    Bernstein,
    #[serde(rename = "decoupling-ratio")]
    DecouplingRatio,
    #[serde(rename = "rescaling-identity")]
    RescalingIdentity,
}

/// What the scale list measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleVariable {
    /// Semiclassical scale `h`.
    H,
    /// Frequency radius `R`.
    R,
    /// Cap size `delta`; slopes are fitted against `1/delta`.
    Delta,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        ExperimentKind::DispersionTorus,
        ExperimentKind::DispersionEuclid,
        ExperimentKind::PartINecessity,
        ExperimentKind::PartIiModulation,
        ExperimentKind::SingleCap,
        ExperimentKind::StrichartzEndpoint,
        ExperimentKind::Bernstein,
        ExperimentKind::DecouplingRatio,
        ExperimentKind::RescalingIdentity,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::DispersionTorus => "dispersion-torus",
            ExperimentKind::DispersionEuclid => "dispersion-euclid",
            ExperimentKind::PartINecessity => "part-i-necessity",
            ExperimentKind::PartIiModulation => "part-ii-modulation",
            ExperimentKind::SingleCap => "single-cap",
            ExperimentKind::StrichartzEndpoint => "strichartz-endpoint",
            ExperimentKind::Bernstein => "bernstein",
            ExperimentKind::DecouplingRatio => "decoupling-ratio",
            ExperimentKind::RescalingIdentity => "rescaling-identity",
        }
    }

    pub fn scale_variable(&self) -> ScaleVariable {
        match self {
            ExperimentKind::StrichartzEndpoint | ExperimentKind::Bernstein | ExperimentKind::RescalingIdentity => {
                ScaleVariable::R
            }
            ExperimentKind::DecouplingRatio => ScaleVariable::Delta,
            _ => ScaleVariable::H,
        }
    }

    /// Minimum number of scales and octaves spanned.
    fn sweep_requirement(&self) -> (usize, f64) {
        match self {
            ExperimentKind::RescalingIdentity => (1, 0.0),
            ExperimentKind::DecouplingRatio => (3, 2.0),
            _ => (4, 3.0),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Optional overrides of the discretization chosen per kind.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box_halfwidth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euclid_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus_points: Option<usize>,
    /// Time nodes on `[0, 1]` (uniform or Gauss–Legendre depending on kind).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_points: Option<usize>,
    /// Nodes on the short window of a stratified plan.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fine_points: Option<usize>,
    /// Graded nodes after the window of a stratified plan.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coarse_points: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    /// JSON report; printed to stdout when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    /// CSV of per-scale norms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    /// CSV of `(delta, p, ratio)` triples, decoupling only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triples: Option<PathBuf>,
    /// SVG plot of the fitted series.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Experiment id used in CSV rows; defaults to the kind name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub kind: ExperimentKind,
    pub m: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default)]
    pub alpha: f64,
    pub scales: Vec<f64>,
    #[serde(default)]
    pub domain: DomainParams,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputPaths,
    /// Overrides every series tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Fixed `eps0`; calibrated over the scale list when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps0: Option<f64>,
    /// Random data sets per scale.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory_cap_mb: Option<f64>,
    /// Directory for cached extremizer data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
}

pub const DEFAULT_MEMORY_CAP_MB: f64 = 4096.0;
pub const DEFAULT_TRIALS: usize = 4;

fn config_error(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

fn check_exponent(name: &str, v: Option<f64>) -> Result<f64, LabError> {
    let v = v.ok_or_else(|| config_error(format!("exponent {name} is required for this kind")))?;
    if v.is_nan() || v < 1.0 {
        return Err(config_error(format!("exponent {name} must be >= 1 or inf, got {v}")));
    }
    Ok(v)
}

impl ExperimentConfig {
    pub fn from_yaml(text: &str) -> Result<Self, LabError> {
        let cfg: ExperimentConfig = serde_yaml::from_str(text).map_err(|e| config_error(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        Self::from_yaml(&text).map_err(|e| match e {
            LabError::Config(msg) => config_error(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn experiment_id(&self) -> String {
        self.id.clone().unwrap_or_else(|| self.kind.name().to_string())
    }

    pub fn trials(&self) -> usize {
        self.trials.unwrap_or(DEFAULT_TRIALS)
    }

    pub fn memory_cap_bytes(&self) -> f64 {
        self.memory_cap_mb.unwrap_or(DEFAULT_MEMORY_CAP_MB) * 1024.0 * 1024.0
    }

    pub fn validate(&self) -> Result<(), LabError> {
        if self.m == 0 || self.n == 0 || self.m + self.n > MAX_DIMENSION {
            return Err(config_error(format!(
                "dimensions must satisfy m, n >= 1 and m + n <= {MAX_DIMENSION}, got ({}, {})",
                self.m, self.n
            )));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(config_error(format!("alpha must be finite and >= 0, got {}", self.alpha)));
        }
        self.validate_scales()?;
        self.validate_exponents()?;
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(config_error(format!("tolerance must be positive, got {t}")));
            }
        }
        if let Some(e) = self.eps0 {
            if !(e > 0.0 && e <= 0.25) {
                return Err(config_error(format!("eps0 must lie in (0, 1/4], got {e}")));
            }
        }
        if self.trials == Some(0) {
            return Err(config_error("trials must be positive"));
        }
        if let Some(c) = self.memory_cap_mb {
            if !(c > 0.0) {
                return Err(config_error("memory_cap_mb must be positive"));
            }
        }
        Ok(())
    }

    fn validate_scales(&self) -> Result<(), LabError> {
        let s = &self.scales;
        let (count, octaves) = self.kind.sweep_requirement();
        if s.len() < count {
            return Err(config_error(format!("{} needs at least {count} scales, got {}", self.kind, s.len())));
        }
        if s.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(config_error("scales must be positive and finite"));
        }
        let mut sorted = s.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(config_error("scales must be distinct"));
        }
        let span = (sorted[sorted.len() - 1] / sorted[0]).log2();
        if span < octaves - 1e-9 {
            return Err(config_error(format!("scales span {span:.2} octaves, {} needs {octaves}", self.kind)));
        }
        match self.kind.scale_variable() {
            ScaleVariable::H => {
                if s.iter().any(|h| *h >= 0.5) {
                    return Err(config_error("semiclassical scales must lie in (0, 1/2)"));
                }
            }
            ScaleVariable::R => {
                if s.iter().any(|r| *r < 1.0 || r.fract() != 0.0) {
                    return Err(config_error("frequency radii must be integers >= 1"));
                }
            }
            ScaleVariable::Delta => {
                if s.iter().any(|d| *d > 1.0 || d.log2().fract() != 0.0) {
                    return Err(config_error("cap sizes must be dyadic, 2^-j with j >= 0"));
                }
            }
        }
        Ok(())
    }

    fn validate_exponents(&self) -> Result<(), LabError> {
        use ExperimentKind::*;
        match self.kind {
            DispersionTorus | DispersionEuclid => {}
            PartINecessity => {
                check_exponent("p", self.p)?;
                let q = check_exponent("q", self.q)?;
                let r = check_exponent("r", self.r)?;
                if q != r {
                    return Err(config_error(format!(
                        "part-i-necessity evaluates factored space-time norms and needs q = r, got q={q}, r={r}"
                    )));
                }
            }
            PartIiModulation | SingleCap => {
                check_exponent("p", self.p)?;
                check_exponent("q", self.q)?;
                if self.r.is_some() {
                    check_exponent("r", self.r)?;
                }
            }
            StrichartzEndpoint | Bernstein | RescalingIdentity => {
                let p = check_exponent("p", self.p)?;
                if self.kind == RescalingIdentity && !p.is_finite() {
                    return Err(config_error("rescaling-identity needs finite p"));
                }
            }
            DecouplingRatio => {
                let p = check_exponent("p", self.p)?;
                if p < 2.0 {
                    return Err(config_error(format!("decoupling needs p >= 2, got {p}")));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "kind: dispersion-euclid\nm: 1\nn: 1\nscales: [0.125, 0.0625, 0.03125, 0.015625, 0.0078125]\n";

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::from_yaml(BASE).unwrap();
        assert_eq!(cfg.kind, ExperimentKind::DispersionEuclid);
        assert_eq!(cfg.experiment_id(), "dispersion-euclid");
        assert_eq!(cfg.scales.len(), 5);
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = format!("{BASE}bogus: 3\n");
        assert!(matches!(ExperimentConfig::from_yaml(&text), Err(LabError::Config(_))));
        let text = format!("{BASE}domain:\n  box_width: 3\n");
        assert!(ExperimentConfig::from_yaml(&text).is_err());
    }

    #[test]
    fn enforces_sweep_span() {
        let text = "kind: dispersion-euclid\nm: 1\nn: 1\nscales: [0.125, 0.0625, 0.03125, 0.02]\n";
        assert!(ExperimentConfig::from_yaml(text).is_err());
        let text = "kind: dispersion-euclid\nm: 1\nn: 1\nscales: [0.125, 0.0625, 0.03125]\n";
        assert!(ExperimentConfig::from_yaml(text).is_err());
    }

    #[test]
    fn exponents_checked_per_kind() {
        let text = "kind: part-i-necessity\nm: 1\nn: 1\np: 4\nq: 8\nr: 4\nscales: [0.125, 0.0625, 0.03125, 0.015625]\n";
        assert!(ExperimentConfig::from_yaml(text).is_err());
        let text = "kind: strichartz-endpoint\nm: 1\nn: 1\nscales: [4, 8, 16, 32]\n";
        assert!(ExperimentConfig::from_yaml(text).is_err());
        let text = "kind: strichartz-endpoint\nm: 1\nn: 1\np: .inf\nscales: [4, 8, 16, 32]\n";
        assert!(ExperimentConfig::from_yaml(text).is_ok());
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ExperimentKind::ALL {
            let v: ExperimentKind = serde_yaml::from_str(k.name()).unwrap();
            assert_eq!(v, k);
        }
    }
}
