//! Experiment configuration: JSON schema, defaults and validation.

use std::path::{Path, PathBuf};

use qfi_core::geometry::MAX_STATE_DIM;
use qfi_core::linalg::HermitianDiagonal;
use qfi_core::weingarten::MAX_TABLE_DEGREE;
use qfi_core::{ChainGeometry, LayerSchedule, ProtocolKind, QfiError, StateKind};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Largest global-model dimension accepted by the dense sampler.
pub const MAX_RMM_DIM: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub plot: PlotOptions,
    /// Deviations from the reference parameters, echoed into the summary.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub substitutions: Vec<String>,
    pub experiment: Experiment,
}

fn default_seed() -> u64 {
    1
}

fn default_samples() -> usize {
    100
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotOptions {
    #[serde(default)]
    pub log_x: bool,
    #[serde(default)]
    pub log_y: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    RmmTime(RmmTime),
    RqcSites(RqcSites),
    RqcTime(RqcTime),
    Sff(Sff),
    T1Exact(T1Exact),
    WeingartenDump(WeingartenDump),
    Concentration(Concentration),
    CueEquivalence(CueEquivalence),
    SymmetricCheck(SymmetricCheck),
}

/// Internally tagged enums lose field paths; re-parse the payload as the named variant to recover them.
fn experiment_error(text: &str) -> Option<CliError> {
    fn probe<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> Option<CliError> {
        serde_path_to_error::deserialize::<_, T>(v).err().map(|e| CliError::Config {
            path: format!("experiment.{}", e.path()),
            message: e.into_inner().to_string(),
        })
    }
    let root: serde_json::Value = serde_json::from_str(text).ok()?;
    let mut payload = root.get("experiment")?.as_object()?.clone();
    let kind = payload.remove("kind")?.as_str()?.to_string();
    let v = serde_json::Value::Object(payload);
    match kind.as_str() {
        "rmm-time" => probe::<RmmTime>(v),
        "rqc-sites" => probe::<RqcSites>(v),
        "rqc-time" => probe::<RqcTime>(v),
        "sff" => probe::<Sff>(v),
        "t1-exact" => probe::<T1Exact>(v),
        "weingarten-dump" => probe::<WeingartenDump>(v),
        "concentration" => probe::<Concentration>(v),
        "cue-equivalence" => probe::<CueEquivalence>(v),
        "symmetric-check" => probe::<SymmetricCheck>(v),
        _ => None,
    }
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::RmmTime(_) => "rmm-time",
            Experiment::RqcSites(_) => "rqc-sites",
            Experiment::RqcTime(_) => "rqc-time",
            Experiment::Sff(_) => "sff",
            Experiment::T1Exact(_) => "t1-exact",
            Experiment::WeingartenDump(_) => "weingarten-dump",
            Experiment::Concentration(_) => "concentration",
            Experiment::CueEquivalence(_) => "cue-equivalence",
            Experiment::SymmetricCheck(_) => "symmetric-check",
        }
    }
}

/// Diagonal sensing Hamiltonian in its eigenbasis.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HamiltonianSpec {
    /// `diag(+1, .., -1, ..)`, recentred to be traceless for odd dimension.
    #[default]
    TracelessDefault,
    Diagonal(Vec<f64>),
}

impl HamiltonianSpec {
    pub fn build(&self, dim: usize) -> Result<HermitianDiagonal, QfiError> {
        match self {
            HamiltonianSpec::TracelessDefault => HermitianDiagonal::traceless_two_block(dim),
            HamiltonianSpec::Diagonal(v) => {
                if v.len() != dim {
                    return Err(QfiError::Input(format!("{} eigenvalues given, dimension is {dim}", v.len())));
                }
                HermitianDiagonal::new(v.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RmmState {
    /// First eigenvector of `H0`.
    #[default]
    Basis,
    /// Haar-random state drawn per sample.
    Random,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainState {
    #[default]
    Product,
    Ghz,
}

impl ChainState {
    pub fn kind(self) -> StateKind {
        match self {
            ChainState::Product => StateKind::Product,
            ChainState::Ghz => StateKind::Ghz,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleSpec {
    /// Brickwork for even `L`, the staircase `sigma = (+1, -1, .., -1)` for odd `L`.
    #[default]
    Auto,
    Brickwork,
    Sigma(Vec<i8>),
}

impl ScheduleSpec {
    pub fn resolve(&self, sites: usize) -> LayerSchedule {
        match self {
            ScheduleSpec::Auto if sites % 2 == 0 => LayerSchedule::Brickwork,
            ScheduleSpec::Auto => {
                let mut sigma = vec![-1; sites];
                sigma[0] = 1;
                LayerSchedule::Sigma(sigma)
            }
            ScheduleSpec::Brickwork => LayerSchedule::Brickwork,
            ScheduleSpec::Sigma(s) => LayerSchedule::Sigma(s.clone()),
        }
    }
}

fn default_theta() -> f64 {
    1.0
}

fn all_protocols() -> Vec<ProtocolKind> {
    ProtocolKind::ALL.to_vec()
}

fn three() -> f64 {
    3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RmmTime {
    pub dim: usize,
    #[serde(default = "default_theta")]
    pub theta: f64,
    pub t_max: usize,
    #[serde(default)]
    pub hamiltonian: HamiltonianSpec,
    #[serde(default)]
    pub initial_state: RmmState,
    #[serde(default = "all_protocols")]
    pub protocols: Vec<ProtocolKind>,
    /// Relative tolerance of the fitted coefficient against `4 Tr H0^2 / N`.
    #[serde(default = "default_fit_tolerance")]
    pub fit_tolerance: f64,
}

fn default_fit_tolerance() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RqcSites {
    pub local_dim: usize,
    pub sites: Vec<usize>,
    pub t: usize,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default)]
    pub hamiltonian: HamiltonianSpec,
    #[serde(default)]
    pub initial_state: ChainState,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    #[serde(default = "all_protocols")]
    pub protocols: Vec<ProtocolKind>,
    /// Relative tolerance of the fitted slope in `L`.
    #[serde(default = "default_slope_tolerance")]
    pub slope_tolerance: f64,
}

fn default_slope_tolerance() -> f64 {
    0.15
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeCheck {
    /// Control linear and state-preparation quadratic fits with small residuals.
    #[default]
    Fits,
    /// Control mean between the linear and quadratic envelopes.
    Envelope,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RqcTime {
    pub local_dim: usize,
    pub sites: usize,
    pub t_max: usize,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default)]
    pub hamiltonian: HamiltonianSpec,
    #[serde(default)]
    pub initial_state: ChainState,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    #[serde(default = "all_protocols")]
    pub protocols: Vec<ProtocolKind>,
    #[serde(default)]
    pub check: TimeCheck,
    /// Residual RMS relative to the curve maximum (fits), or relative slack of the envelopes.
    #[serde(default = "default_fit_tolerance")]
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sff {
    pub dim: usize,
    #[serde(default = "default_theta")]
    pub theta: f64,
    pub t_values: Vec<usize>,
    pub protocol: ProtocolKind,
    #[serde(default)]
    pub hamiltonian: HamiltonianSpec,
    #[serde(default = "three")]
    pub se_multiple: f64,
    /// Relative slack on top of the statistical one.
    #[serde(default)]
    pub relative_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct T1Exact {
    pub dim: usize,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default)]
    pub hamiltonian: HamiltonianSpec,
    #[serde(default = "three")]
    pub se_multiple: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeingartenDump {
    pub t: usize,
    pub dim: usize,
    #[serde(default = "three")]
    pub se_multiple: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Concentration {
    pub dims: Vec<usize>,
    pub t: usize,
    pub protocol: ProtocolKind,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_delta_points")]
    pub delta_points: usize,
}

fn default_delta_points() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CueEquivalence {
    pub sites: usize,
    pub local_dims: Vec<usize>,
    pub t: usize,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default)]
    pub initial_state: ChainState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetricCheck {
    pub sites: Vec<usize>,
    pub local_dims: Vec<usize>,
    #[serde(default = "default_exact_tolerance")]
    pub tolerance: f64,
}

fn default_exact_tolerance() -> f64 {
    1e-9
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            if path == "experiment" {
                if let Some(inner) = experiment_error(text) {
                    return inner;
                }
            }
            CliError::Config { path, message: e.into_inner().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Schema checks with field paths, then capability checks; no sampling happens here.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |path: &str, message: String| Err(CliError::Config { path: path.into(), message });
        if self.name.trim().is_empty() {
            return bad("name", "must not be empty".into());
        }
        let needs_samples = !matches!(self.experiment, Experiment::SymmetricCheck(_) | Experiment::WeingartenDump(_));
        if needs_samples && self.samples == 0 {
            return bad("samples", "must be at least 1".into());
        }
        if self.threads == Some(0) {
            return bad("threads", "must be at least 1".into());
        }
        let e = "experiment";
        let finite = |path: &str, v: f64| -> Result<(), CliError> {
            if v.is_finite() {
                Ok(())
            } else {
                bad(path, format!("must be finite, got {v}"))
            }
        };
        let positive = |path: &str, v: f64| -> Result<(), CliError> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                bad(path, format!("must be a non-negative number, got {v}"))
            }
        };
        let rmm_dim = |path: &str, n: usize| -> Result<(), CliError> {
            if n < 2 {
                return bad(path, format!("dimension must be at least 2, got {n}"));
            }
            if n > MAX_RMM_DIM {
                return Err(CliError::Capability(format!(
                    "{e}.{path}: dense Haar sampling is limited to N <= {MAX_RMM_DIM}, got {n}"
                )));
            }
            Ok(())
        };
        let protocols = |p: &[ProtocolKind]| -> Result<(), CliError> {
            if p.is_empty() {
                return bad("experiment.protocols", "must list at least one protocol".into());
            }
            Ok(())
        };
        let hamiltonian = |h: &HamiltonianSpec, dim: usize| -> Result<(), CliError> {
            h.build(dim).map(|_| ()).or_else(|err| bad("experiment.hamiltonian", err.to_string()))
        };
        let chain = |sites: usize, q: usize, schedule: &ScheduleSpec| -> Result<(), CliError> {
            let geom = ChainGeometry::new(sites, q).map_err(|err| match err {
                QfiError::Capability(m) => CliError::Capability(format!("{m} (state-vector limit {MAX_STATE_DIM})")),
                other => CliError::Config { path: "experiment.sites".into(), message: other.to_string() },
            })?;
            schedule
                .resolve(sites)
                .bond_order(&geom)
                .map(|_| ())
                .or_else(|err| bad("experiment.schedule", err.to_string()))
        };
        match &self.experiment {
            Experiment::RmmTime(c) => {
                rmm_dim("experiment.dim", c.dim)?;
                finite("experiment.theta", c.theta)?;
                if c.t_max == 0 {
                    return bad("experiment.t_max", "must be at least 1".into());
                }
                protocols(&c.protocols)?;
                hamiltonian(&c.hamiltonian, c.dim)?;
                positive("experiment.fit_tolerance", c.fit_tolerance)?;
            }
            Experiment::RqcSites(c) => {
                if c.sites.is_empty() {
                    return bad("experiment.sites", "must list at least one chain length".into());
                }
                for &l in &c.sites {
                    chain(l, c.local_dim, &c.schedule)?;
                }
                if c.t == 0 {
                    return bad("experiment.t", "must be at least 1".into());
                }
                finite("experiment.theta", c.theta)?;
                protocols(&c.protocols)?;
                hamiltonian(&c.hamiltonian, c.local_dim)?;
                positive("experiment.slope_tolerance", c.slope_tolerance)?;
            }
            Experiment::RqcTime(c) => {
                chain(c.sites, c.local_dim, &c.schedule)?;
                if c.t_max == 0 {
                    return bad("experiment.t_max", "must be at least 1".into());
                }
                finite("experiment.theta", c.theta)?;
                protocols(&c.protocols)?;
                hamiltonian(&c.hamiltonian, c.local_dim)?;
                positive("experiment.tolerance", c.tolerance)?;
            }
            Experiment::Sff(c) => {
                rmm_dim("experiment.dim", c.dim)?;
                finite("experiment.theta", c.theta)?;
                if c.t_values.is_empty() || c.t_values.contains(&0) {
                    return bad("experiment.t_values", "must be a non-empty list of positive integers".into());
                }
                hamiltonian(&c.hamiltonian, c.dim)?;
                positive("experiment.se_multiple", c.se_multiple)?;
                positive("experiment.relative_tolerance", c.relative_tolerance)?;
            }
            Experiment::T1Exact(c) => {
                rmm_dim("experiment.dim", c.dim)?;
                finite("experiment.theta", c.theta)?;
                hamiltonian(&c.hamiltonian, c.dim)?;
                positive("experiment.se_multiple", c.se_multiple)?;
            }
            Experiment::WeingartenDump(c) => {
                if c.t == 0 {
                    return bad("experiment.t", "must be at least 1".into());
                }
                if c.t > MAX_TABLE_DEGREE {
                    return Err(CliError::Capability(format!(
                        "experiment.t: Weingarten tables are limited to t <= {MAX_TABLE_DEGREE}, got {}",
                        c.t
                    )));
                }
                if c.dim == 0 {
                    return bad("experiment.dim", "must be at least 1".into());
                }
                if self.samples > 0 {
                    rmm_dim("experiment.dim", c.dim)?;
                }
                positive("experiment.se_multiple", c.se_multiple)?;
            }
            Experiment::Concentration(c) => {
                if c.dims.len() < 2 {
                    return bad("experiment.dims", "needs at least two dimensions".into());
                }
                for &n in &c.dims {
                    rmm_dim("experiment.dims", n)?;
                }
                if c.t == 0 {
                    return bad("experiment.t", "must be at least 1".into());
                }
                finite("experiment.theta", c.theta)?;
                if c.delta_points < 2 {
                    return bad("experiment.delta_points", "must be at least 2".into());
                }
                if self.samples < 2 {
                    return bad("samples", "fluctuation statistics need at least 2 samples".into());
                }
            }
            Experiment::CueEquivalence(c) => {
                if c.local_dims.len() < 2 {
                    return bad("experiment.local_dims", "needs at least two local dimensions".into());
                }
                for &q in &c.local_dims {
                    chain(c.sites, q, &ScheduleSpec::Brickwork)?;
                }
                if c.t == 0 {
                    return bad("experiment.t", "must be at least 1".into());
                }
                finite("experiment.theta", c.theta)?;
            }
            Experiment::SymmetricCheck(c) => {
                if c.sites.is_empty() || c.local_dims.is_empty() {
                    return bad("experiment.sites", "sites and local_dims must be non-empty".into());
                }
                for &l in &c.sites {
                    for &q in &c.local_dims {
                        let geom = ChainGeometry::new(l, q).map_err(|err| match err {
                            QfiError::Capability(m) => CliError::Capability(m),
                            other => CliError::Config { path: "experiment.sites".into(), message: other.to_string() },
                        })?;
                        geom.require_dense().map_err(|err| CliError::Capability(err.to_string()))?;
                    }
                }
                positive("experiment.tolerance", c.tolerance)?;
            }
        }
        Ok(())
    }
}
