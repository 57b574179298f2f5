//! Scaling reports: per-scale records, fitted slopes and verdicts.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use semiperiodic_core::fit_exponent;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, ExperimentKind, ScaleVariable};
use crate::error::LabError;

/// How a fitted slope is compared with its prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// `|fitted - predicted| <= tolerance`.
    Within,
    /// `fitted <= predicted + tolerance`; the prediction is a one-sided bound.
    AtMost,
    /// Not a slope: every per-scale value (a relative error) is `<= tolerance`.
    Identity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleRecord {
    pub scale: f64,
    pub norms: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// What to fit and how to judge it.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSpec {
    pub name: String,
    /// Key into [`ScaleRecord::norms`].
    pub norm: String,
    pub predicted: f64,
    /// Exact value of the prediction, e.g. `-1/2`.
    pub predicted_exact: String,
    /// Closed form the prediction was evaluated from.
    pub formula: String,
    pub criterion: Criterion,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub name: String,
    pub norm: String,
    pub fit_variable: String,
    pub criterion: Criterion,
    pub predicted: f64,
    pub predicted_exact: String,
    pub formula: String,
    pub tolerance: f64,
    pub points: usize,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub r_squared: Option<f64>,
    pub max_residual: Option<f64>,
    /// Largest per-scale value, for [`Criterion::Identity`].
    pub max_value: Option<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// A derived pass/fail check that is not a single slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub description: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdNote {
    pub name: String,
    pub formula: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub id: String,
    pub kind: ExperimentKind,
    pub m: usize,
    pub n: usize,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub alpha: f64,
    pub seed: u64,
    pub scale_variable: ScaleVariable,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps0: Option<f64>,
    pub records: Vec<ScaleRecord>,
    pub series: Vec<SeriesReport>,
    #[serde(default)]
    pub checks: Vec<CheckReport>,
    #[serde(default)]
    pub thresholds: Vec<ThresholdNote>,
    pub pass: bool,
}

fn fit_variable(v: ScaleVariable) -> &'static str {
    match v {
        ScaleVariable::H => "h",
        ScaleVariable::R => "R",
        ScaleVariable::Delta => "1/delta",
    }
}

/// The abscissa used in the fit for a recorded scale.
pub fn fit_abscissa(v: ScaleVariable, scale: f64) -> f64 {
    match v {
        ScaleVariable::Delta => 1.0 / scale,
        _ => scale,
    }
}

pub fn evaluate_series(spec: &SeriesSpec, records: &[ScaleRecord], variable: ScaleVariable) -> SeriesReport {
    let values: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.error.is_none())
        .filter_map(|r| r.norms.get(&spec.norm).map(|v| (fit_abscissa(variable, r.scale), *v)))
        .collect();
    let failed = records.iter().any(|r| r.error.is_some());
    let mut out = SeriesReport {
        name: spec.name.clone(),
        norm: spec.norm.clone(),
        fit_variable: fit_variable(variable).to_string(),
        criterion: spec.criterion,
        predicted: spec.predicted,
        predicted_exact: spec.predicted_exact.clone(),
        formula: spec.formula.clone(),
        tolerance: spec.tolerance,
        points: values.len(),
        slope: None,
        intercept: None,
        r_squared: None,
        max_residual: None,
        max_value: None,
        pass: false,
        note: None,
    };
    if spec.criterion == Criterion::Identity {
        let worst = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
        if !values.is_empty() && worst.is_finite() {
            out.max_value = Some(worst);
            out.pass = !failed && worst <= spec.tolerance;
        }
        if failed {
            out.note = Some("some scales failed".into());
        }
        return out;
    }
    match fit_exponent(&values) {
        Ok(fit) => {
            out.slope = Some(fit.slope);
            out.intercept = Some(fit.intercept);
            out.r_squared = Some(fit.r_squared);
            out.max_residual = Some(fit.max_residual);
            let ok = match spec.criterion {
                Criterion::Within => (fit.slope - spec.predicted).abs() <= spec.tolerance,
                Criterion::AtMost => fit.slope <= spec.predicted + spec.tolerance,
                Criterion::Identity => unreachable!(),
            };
            out.pass = ok && fit.slope.is_finite() && !failed;
            if failed {
                out.note = Some("some scales failed; fitted on the remaining ones".into());
            }
        }
        Err(e) => out.note = Some(e.to_string()),
    }
    out
}

impl ScalingReport {
    pub fn assemble(
        cfg: &ExperimentConfig,
        eps0: Option<f64>,
        records: Vec<ScaleRecord>,
        specs: &[SeriesSpec],
        checks: Vec<CheckReport>,
        thresholds: Vec<ThresholdNote>,
    ) -> Self {
        let variable = cfg.kind.scale_variable();
        let series: Vec<SeriesReport> = specs.iter().map(|s| evaluate_series(s, &records, variable)).collect();
        let pass = records.len() == cfg.scales.len()
            && records.iter().all(|r| r.error.is_none())
            && series.iter().all(|s| s.pass)
            && checks.iter().all(|c| c.pass);
        Self {
            id: cfg.experiment_id(),
            kind: cfg.kind,
            m: cfg.m,
            n: cfg.n,
            p: cfg.p,
            q: cfg.q,
            r: cfg.r,
            alpha: cfg.alpha,
            seed: cfg.seed,
            scale_variable: variable,
            eps0,
            records,
            series,
            checks,
            thresholds,
            pass,
        }
    }

    pub fn series(&self, name: &str) -> Option<&SeriesReport> {
        self.series.iter().find(|s| s.name == name)
    }

    pub fn to_json(&self) -> Result<String, LabError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, LabError> {
        Ok(serde_json::from_str(text)?)
    }

    /// One line per series, e.g. `PASS evolution slope -0.49 (<= -1/2 + 0.1)`.
    pub fn summary(&self) -> Vec<String> {
        let mut lines = Vec::new();
        for s in &self.series {
            let verdict = if s.pass { "PASS" } else { "FAIL" };
            let line = match (s.criterion, s.slope, s.max_value) {
                (Criterion::Identity, _, Some(v)) => {
                    format!("{verdict} {} {}: max relative error {v:.3e} (<= {:e})", self.id, s.name, s.tolerance)
                }
                (Criterion::Within, Some(k), _) => format!(
                    "{verdict} {} {}: slope {k:.4} vs {} = {} +- {} (r2 {:.4})",
                    self.id,
                    s.name,
                    s.formula,
                    s.predicted_exact,
                    s.tolerance,
                    s.r_squared.unwrap_or(f64::NAN)
                ),
                (Criterion::AtMost, Some(k), _) => format!(
                    "{verdict} {} {}: slope {k:.4} <= {} = {} + {} (r2 {:.4})",
                    self.id,
                    s.name,
                    s.formula,
                    s.predicted_exact,
                    s.tolerance,
                    s.r_squared.unwrap_or(f64::NAN)
                ),
                _ => format!("{verdict} {} {}: {}", self.id, s.name, s.note.as_deref().unwrap_or("no fit")),
            };
            lines.push(line);
        }
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            lines.push(format!("{verdict} {} {}: {:.4} >= {} ({})", self.id, c.name, c.value, c.bound, c.description));
        }
        for r in &self.records {
            if let Some(e) = &r.error {
                lines.push(format!("FAIL {} scale {}: {e}", self.id, r.scale));
            }
        }
        lines
    }

    /// Rows `experiment id, scale, norm name, p, q, r, alpha, value`.
    pub fn write_norms_csv<W: Write>(&self, out: W) -> Result<(), LabError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["experiment", "scale", "norm", "p", "q", "r", "alpha", "value"])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for rec in &self.records {
            for (name, v) in &rec.norms {
                w.write_record([
                    self.id.clone(),
                    rec.scale.to_string(),
                    name.clone(),
                    opt(self.p),
                    opt(self.q),
                    opt(self.r),
                    self.alpha.to_string(),
                    v.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Rows `delta, p, ratio` for decoupling reports.
    pub fn write_triples_csv<W: Write>(&self, out: W) -> Result<(), LabError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["delta", "p", "ratio"])?;
        let p = self.p.unwrap_or(f64::NAN);
        for rec in &self.records {
            if let Some(v) = rec.norms.get("ratio") {
                w.write_record([rec.scale.to_string(), p.to_string(), v.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), LabError> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}
