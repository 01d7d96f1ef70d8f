//! Run reports and the files written for them.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qfi_core::ScalingFit;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::svg::{Curve, CurveStyle, Plot};
use crate::CliError;

/// One curve: `x`, ensemble mean, its standard error and the analytic prediction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub prediction: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<ScalingFit>,
}

impl Series {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,mean,stderr,prediction\n");
        for i in 0..self.x.len() {
            writeln!(out, "{},{:e},{:e},{:e}", self.x[i], self.mean[i], self.stderr[i], self.prediction[i]).unwrap();
        }
        out
    }
}

/// Pass/fail against a recorded tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Verdict {
    /// `|observed - expected| <= tolerance`.
    pub fn within(name: impl Into<String>, observed: f64, expected: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: (observed - expected).abs() <= tolerance,
            observed,
            expected,
            tolerance,
            detail: detail.into(),
        }
    }

    /// `observed <= limit`.
    pub fn at_most(name: impl Into<String>, observed: f64, limit: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed: observed <= limit, observed, expected: limit, tolerance: 0.0, detail: detail.into() }
    }

    pub fn flag(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        let v = if passed { 1.0 } else { 0.0 };
        Self { name: name.into(), passed, observed: v, expected: 1.0, tolerance: 0.0, detail: detail.into() }
    }
}

/// Per-realization check of `F <= t^2 Δ^2`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct BoundCheck {
    pub checked: usize,
    pub violations: usize,
    /// Largest `F / (t^2 Δ^2)` seen.
    pub max_ratio: f64,
}

impl BoundCheck {
    pub const SLACK: f64 = 1e-9;

    pub fn record(&mut self, qfi: f64, bound: f64) {
        self.checked += 1;
        if qfi > bound + Self::SLACK {
            self.violations += 1;
        }
        if bound > 0.0 {
            self.max_ratio = self.max_ratio.max(qfi / bound);
        }
    }
}

/// Tail statistics of one QFI ensemble against the concentration bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationRecord {
    pub series: String,
    pub x: f64,
    pub dim_scale: f64,
    pub lipschitz: f64,
    pub relative_std: f64,
    pub violations: usize,
    /// Smallest grid `δ` at which the clamped bound drops below 1.
    pub first_informative_delta: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub series: Vec<Series>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_check: Option<BoundCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub concentration: Vec<ConcentrationRecord>,
    pub substitutions: Vec<String>,
    pub notes: Vec<String>,
    pub timings: Timings,
    /// Sidecar files `(name, contents)`.
    #[serde(skip)]
    pub extra_files: Vec<(String, String)>,
    #[serde(skip)]
    pub samples_csv: String,
    #[serde(skip)]
    pub plot: Option<Plot>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Timings {
    pub compute_seconds: f64,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn series(&self, label: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.label == label)
    }

    /// CSV file for each series: the first is `results.csv`, the rest `results-<label>.csv`.
    pub fn series_files(&self) -> Vec<(String, &Series)> {
        self.series
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let name = if i == 0 { "results.csv".to_string() } else { format!("results-{}.csv", s.label) };
                (name, s)
            })
            .collect()
    }

    pub fn summary_json(&self) -> serde_json::Value {
        let files: Vec<serde_json::Value> = self
            .series_files()
            .into_iter()
            .map(|(f, s)| serde_json::json!({"series": s.label, "file": f}))
            .collect();
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["seed"] = serde_json::json!(self.config.seed);
        v["series_files"] = serde_json::Value::Array(files);
        v["passed"] = serde_json::json!(self.passed());
        v
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let io = |p: &Path, e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", p.display()));
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let mut written = Vec::new();
        let mut put = |name: &str, contents: &str| -> Result<(), CliError> {
            let p = dir.join(name);
            std::fs::write(&p, contents).map_err(|e| io(&p, e))?;
            written.push(p);
            Ok(())
        };
        for (name, s) in self.series_files() {
            put(&name, &s.to_csv())?;
        }
        if !self.samples_csv.is_empty() {
            put("samples.csv", &self.samples_csv)?;
        }
        for (name, contents) in &self.extra_files {
            put(name, contents)?;
        }
        let summary = serde_json::to_string_pretty(&self.summary_json()).expect("summary serializes");
        put("summary.json", &(summary + "\n"))?;
        if let Some(plot) = &self.plot {
            let p = dir.join("plot.svg");
            plot.write(&p)?;
            written.push(p);
        }
        Ok(written)
    }
}

/// Standard plot: data with error bars, dashed predictions and dotted fits.
pub fn default_plot(config: &ExperimentConfig, series: &[Series], x_label: &str, y_label: &str) -> Plot {
    let mut curves = Vec::new();
    for s in series {
        let points: Vec<(f64, f64)> = s.x.iter().copied().zip(s.mean.iter().copied()).collect();
        curves.push(Curve {
            label: format!("{} mean", s.label),
            style: CurveStyle::Data,
            points,
            errors: Some(s.stderr.clone()),
        });
        curves.push(Curve {
            label: format!("{} prediction", s.label),
            style: CurveStyle::Prediction,
            points: s.x.iter().copied().zip(s.prediction.iter().copied()).collect(),
            errors: None,
        });
        if let Some(fit) = &s.fit {
            curves.push(Curve {
                label: format!("{} fit", s.label),
                style: CurveStyle::Fit,
                points: s.x.iter().map(|&x| (x, fit.predict(x))).collect(),
                errors: None,
            });
        }
    }
    Plot {
        title: config.name.clone(),
        x_label: x_label.into(),
        y_label: y_label.into(),
        log_x: config.plot.log_x,
        log_y: config.plot.log_y,
        curves,
    }
}
