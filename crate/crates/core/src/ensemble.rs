//! Deterministic parallel Monte Carlo ensembles and scaling fits.
//!
//! Sample `i` draws its randomness from `SeedPath { master_seed, prefix ++ [i] }`
//! and writes into slot `i`; reductions run afterwards in index order, so the
//! output does not depend on the number of worker threads.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QfiError, Result};
use crate::haar::SeedPath;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    /// Estimator id, echoed into the output.
    pub estimator: String,
    /// Free-form estimator parameters, echoed into the output.
    #[serde(default)]
    pub parameters: serde_json::Value,
    pub samples: usize,
    pub master_seed: u64,
    /// Seed-path indices placed before the sample index.
    #[serde(default)]
    pub seed_prefix: Vec<u64>,
    /// Worker hint; `None` uses the global pool.
    #[serde(default)]
    pub threads: Option<usize>,
}

impl EnsembleConfig {
    pub fn new(estimator: impl Into<String>, samples: usize, master_seed: u64) -> Self {
        Self {
            estimator: estimator.into(),
            parameters: serde_json::Value::Null,
            samples,
            master_seed,
            seed_prefix: Vec::new(),
            threads: None,
        }
    }

    pub fn with_parameters(mut self, parameters: serde_json::Value) -> Self {
        self.parameters = parameters;
        self
    }

    pub fn with_prefix(mut self, prefix: Vec<u64>) -> Self {
        self.seed_prefix = prefix;
        self
    }

    pub fn with_threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    pub fn seed_path(&self, index: usize) -> SeedPath {
        let mut indices = self.seed_prefix.clone();
        indices.push(index as u64);
        SeedPath { master_seed: self.master_seed, indices }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub mean: f64,
    pub std: f64,
    pub stderr: f64,
}

impl ColumnSummary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std, stderr: std / n.sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub config: EnsembleConfig,
    /// `samples[i]` holds the estimator output for sample `i`.
    pub samples: Vec<Vec<f64>>,
    pub summary: Vec<ColumnSummary>,
}

impl EnsembleResult {
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.samples.iter().map(|row| row[j]).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "config": self.config,
            "summary": self.summary,
        })
    }

    /// Per-sample sidecar; `columns` names the estimator outputs.
    pub fn to_csv(&self, columns: &[&str]) -> String {
        let mut out = String::from("sample,seed_path");
        let width = self.summary.len();
        for j in 0..width {
            match columns.get(j) {
                Some(name) => write!(out, ",{name}").unwrap(),
                None => write!(out, ",v{j}").unwrap(),
            }
        }
        out.push('\n');
        for (i, row) in self.samples.iter().enumerate() {
            write!(out, "{i},{}", self.config.seed_path(i)).unwrap();
            for v in row {
                write!(out, ",{v:e}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Runs `estimator(i, seed_path_i)` for every sample.
pub fn run_ensemble<F>(cfg: &EnsembleConfig, estimator: F) -> Result<EnsembleResult>
where
    F: Fn(usize, &SeedPath) -> Result<Vec<f64>> + Sync,
{
    if cfg.samples == 0 {
        return Err(QfiError::Config("ensemble needs at least one sample".into()));
    }
    let work = || -> Vec<Result<Vec<f64>>> {
        (0..cfg.samples)
            .into_par_iter()
            .map(|i| estimator(i, &cfg.seed_path(i)))
            .collect()
    };
    let slots = match cfg.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| QfiError::Config(format!("cannot build worker pool: {e}")))?
            .install(work),
        None => work(),
    };
    let mut samples = Vec::with_capacity(cfg.samples);
    for (i, slot) in slots.into_iter().enumerate() {
        match slot {
            Ok(row) => samples.push(row),
            Err(e) => {
                return Err(QfiError::Sample {
                    index: i,
                    seed_path: cfg.seed_path(i).to_string(),
                    source: Box::new(e),
                })
            }
        }
    }
    let width = samples[0].len();
    if let Some(i) = samples.iter().position(|r| r.len() != width) {
        return Err(QfiError::Sample {
            index: i,
            seed_path: cfg.seed_path(i).to_string(),
            source: Box::new(QfiError::Numerical(format!(
                "estimator returned {} values, sample 0 returned {width}",
                samples[i].len()
            ))),
        });
    }
    let summary = (0..width)
        .map(|j| ColumnSummary::of(&samples.iter().map(|r| r[j]).collect::<Vec<_>>()))
        .collect();
    Ok(EnsembleResult { config: cfg.clone(), samples, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitModel {
    /// `y = a x`.
    LinearThroughOrigin,
    /// `y = a x^2`.
    QuadraticThroughOrigin,
    /// `y = c0 + c1 x`.
    Affine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub model: FitModel,
    pub coefficients: Vec<f64>,
    /// Standard errors of the coefficients; `NaN` with no residual degrees of freedom.
    pub coefficient_stderr: Vec<f64>,
    pub residual_rms: f64,
}

impl ScalingFit {
    pub fn predict(&self, x: f64) -> f64 {
        match self.model {
            FitModel::LinearThroughOrigin => self.coefficients[0] * x,
            FitModel::QuadraticThroughOrigin => self.coefficients[0] * x * x,
            FitModel::Affine => self.coefficients[0] + self.coefficients[1] * x,
        }
    }
}

/// Ordinary least squares.
pub fn fit_scaling(xs: &[f64], ys: &[f64], model: FitModel) -> Result<ScalingFit> {
    if xs.len() != ys.len() {
        return Err(QfiError::Fit(format!("{} x values but {} y values", xs.len(), ys.len())));
    }
    let n = xs.len();
    let needed = if model == FitModel::Affine { 2 } else { 1 };
    if n < needed {
        return Err(QfiError::Fit(format!("{model:?} needs at least {needed} points, got {n}")));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(QfiError::Fit("non-finite data".into()));
    }
    let (coefficients, inv_diag, p) = match model {
        FitModel::LinearThroughOrigin | FitModel::QuadraticThroughOrigin => {
            let f = |x: f64| if model == FitModel::Affine || model == FitModel::LinearThroughOrigin { x } else { x * x };
            let sff: f64 = xs.iter().map(|&x| f(x) * f(x)).sum();
            if sff <= f64::MIN_POSITIVE {
                return Err(QfiError::Fit("degenerate design: all regressors vanish".into()));
            }
            let sfy: f64 = xs.iter().zip(ys).map(|(&x, &y)| f(x) * y).sum();
            (vec![sfy / sff], vec![1.0 / sff], 1)
        }
        FitModel::Affine => {
            let nf = n as f64;
            let mx = xs.iter().sum::<f64>() / nf;
            let my = ys.iter().sum::<f64>() / nf;
            let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
            if sxx <= 1e-300 || sxx <= 1e-24 * xs.iter().map(|x| x * x).sum::<f64>() {
                return Err(QfiError::Fit("degenerate design: x values are not distinct".into()));
            }
            let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let slope = sxy / sxx;
            let icept = my - slope * mx;
            (vec![icept, slope], vec![1.0 / nf + mx * mx / sxx, 1.0 / sxx], 2)
        }
    };
    let mut fit = ScalingFit { model, coefficients, coefficient_stderr: Vec::new(), residual_rms: 0.0 };
    let ssr: f64 = xs.iter().zip(ys).map(|(&x, &y)| (y - fit.predict(x)).powi(2)).sum();
    fit.residual_rms = (ssr / n as f64).sqrt();
    fit.coefficient_stderr = if n > p {
        let s2 = ssr / (n - p) as f64;
        inv_diag.iter().map(|d| (s2 * d).sqrt()).collect()
    } else {
        vec![f64::NAN; p]
    };
    Ok(fit)
}
