//! Scenario files, report/trajectory outputs and the `verify`, `bounds`,
//! `simulate` and `sweep` subcommands.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! name = "example"
//! mode = "theorem1"            # or "lipschitz"
//!
//! [network]
//! d = [0.5, 1.0]
//! a = [[[1.2, 0.2], [0.8, 1.2]], [[1.0, 1.5], [0.4, 0.2]]]   # complex entries as [re, im]
//! b = [[[0.2, 1.2], [0.2, 0.8]], [[1.5, 1.0], [0.2, 0.4]]]
//! h = [[0.1, 0.1], [0.2, 0.2]]
//! f = [{ kind = "sigmoid-pair", mix = [1.0, 2.0, 2.0, 1.0] }, ...]
//! g = [{ kind = "saturating-linear", mix = [1.0, 1.0, 1.0, 1.0] }, ...]
//! delays = [[{ kind = "logistic-shifted", shift = 0.0 }, ...], ...]
//! phi_init = [[-1.0, -2.0], [1.5, -1.5]]
//! psi_init = [[5.0, 5.4], [-5.4, -3.5]]
//!
//! [weights]
//! xi = [0.4, 0.8]
//! phi = [0.5, 0.6]
//!
//! [gains]                      # omit for the uncontrolled pair
//! beta = 0.5
//! mu_bar = [18.0, 10.0]
//! ...
//!
//! [sim]                        # optional, see SimConfig
//! [monitor]                    # optional epsilon / rho / beta for the monitors
//! [reference]                  # optional published values to compare against
//! ```

mod commands;
mod csv;
mod report;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controller::{ControllerGains, GainsError};
use crate::criteria::{CriteriaError, Mode, NormWeights};
use crate::dde_sim::{SimConfig, SimError};
use crate::model::{ActivationSpec, DelayKind, ModelError, NetworkParts, NetworkSpec};
use crate::split_complex::SplitComplex;

pub use commands::{
    monitor_params, run_bounds, run_simulate, run_sweep, run_verify, SimulateSummary, SweepRow,
};
pub use csv::{format_value, write_sweep_csv, write_trajectory_csv};
pub use report::{CertificateSection, ReferenceRow, SuppliedConstants, VerifyReport};

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Inadmissible = 1,
    InputError = 2,
    Divergence = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: missing field `{field}`")]
    MissingField { line: usize, field: String },
    #[error("{field}: expected length {expected}, found {found}")]
    DimensionMismatch {
        field: String,
        expected: usize,
        found: usize,
    },
    #[error("{field}: exponent {value} must lie strictly between 0 and 1")]
    ExponentRange { field: String, value: f64 },
    #[error("{field}[{index}]: weight {value} must be strictly positive")]
    NonPositiveWeight {
        field: String,
        index: usize,
        value: f64,
    },
    #[error("{field}: {message}")]
    InvalidValue { field: String, message: String },
}

impl ConfigError {
    /// Stable diagnostic code.
    pub fn code(&self) -> &'static str {
        match self {
            ConfigError::Io { .. } => "E001",
            ConfigError::Syntax { .. } => "E002",
            ConfigError::MissingField { .. } => "E003",
            ConfigError::DimensionMismatch { .. } => "E004",
            ConfigError::ExponentRange { .. } => "E005",
            ConfigError::NonPositiveWeight { .. } => "E006",
            ConfigError::InvalidValue { .. } => "E007",
        }
    }
}

/// Errors surfaced by the subcommands, each mapped to an exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("[{code}] {err}", code = .0.code(), err = .0)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Criteria(#[from] CriteriaError),
    #[error("{0}")]
    Sim(#[from] SimError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            CliError::Sim(SimError::Divergence { .. } | SimError::OutOfWindow { .. }) => ExitStatus::Divergence,
            _ => ExitStatus::InputError,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub d: Vec<f64>,
    pub a: Vec<Vec<SplitComplex>>,
    pub b: Vec<Vec<SplitComplex>>,
    pub h: Vec<SplitComplex>,
    pub f: Vec<ActivationSpec>,
    pub g: Vec<ActivationSpec>,
    pub delays: Vec<Vec<DelayKind>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub phi_init: Vec<SplitComplex>,
    pub psi_init: Vec<SplitComplex>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsFile {
    pub xi: Vec<f64>,
    pub phi: Vec<f64>,
}

/// Constants for the trajectory monitors. Missing entries fall back to the
/// certificate (when the gains are admissible) and then to built-in defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

/// Published values to print next to the computed ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceValues {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default = "default_reference_tolerance")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_bar_min: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_tilde_min: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_bar_base: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_tilde_base: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_bar_min: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_tilde_min: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2: Option<f64>,
}

fn default_reference_tolerance() -> f64 {
    1e-3
}

/// On-disk layout of a scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    pub network: NetworkFile,
    pub weights: WeightsFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gains: Option<ControllerGains>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monitor: Option<MonitorFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceValues>,
}

/// A validated scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub mode: Mode,
    pub network: NetworkSpec,
    pub weights: NormWeights,
    pub gains: Option<ControllerGains>,
    pub sim: SimConfig,
    pub monitor: MonitorFile,
    pub reference: Option<ReferenceValues>,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (n = {}, tau = {}, {})",
            self.name,
            self.network.n(),
            self.network.tau(),
            if self.gains.is_some() { "controlled" } else { "uncontrolled" }
        )
    }
}

fn line_of(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

fn from_toml_error(source: &str, err: toml::de::Error) -> ConfigError {
    let line = err.span().map_or(0, |s| line_of(source, s.start));
    let message = err.message().to_string();
    if let Some(rest) = message.strip_prefix("missing field `") {
        let field = rest.split('`').next().unwrap_or_default().to_string();
        return ConfigError::MissingField { line, field };
    }
    ConfigError::Syntax { line, message }
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        field: field.into(),
        message: message.into(),
    }
}

fn from_model_error(err: ModelError) -> ConfigError {
    match err {
        ModelError::DimensionMismatch { what, expected, found } => ConfigError::DimensionMismatch {
            field: format!("network.{what}"),
            expected,
            found,
        },
        ModelError::NonPositiveDecay { index, value } => invalid(format!("network.d[{index}]"), format!("{value} must be > 0")),
        ModelError::InvalidDelay { row, col, reason } => invalid(format!("network.delays[{row}][{col}]"), reason),
        ModelError::TauTooSmall { tau, required } => {
            invalid("network.tau", format!("{tau} is below the largest delay bound {required}"))
        }
        ModelError::NonFinite(what) => invalid(format!("network.{what}"), "values must be finite"),
        ModelError::Empty => invalid("network.d", "at least one neuron is required"),
    }
}

fn check_weights(field: &str, values: &[f64], n: usize) -> Result<(), ConfigError> {
    if values.len() != n {
        return Err(ConfigError::DimensionMismatch {
            field: field.to_string(),
            expected: n,
            found: values.len(),
        });
    }
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
        return Err(ConfigError::NonPositiveWeight {
            field: field.to_string(),
            index,
            value,
        });
    }
    Ok(())
}

fn check_exponent(field: &str, value: f64) -> Result<(), ConfigError> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(ConfigError::ExponentRange {
            field: field.to_string(),
            value,
        })
    }
}

impl Scenario {
    pub fn from_file(file: ScenarioFile) -> Result<Self, ConfigError> {
        let net = file.network;
        let n = net.d.len();
        check_weights("weights.xi", &file.weights.xi, n)?;
        check_weights("weights.phi", &file.weights.phi, n)?;
        let weights = NormWeights::new(file.weights.xi, file.weights.phi).expect("checked above");

        if let Some(gains) = &file.gains {
            check_exponent("gains.beta", gains.beta)?;
            gains.validate(n).map_err(|e| match e {
                GainsError::BetaOutOfRange(value) => ConfigError::ExponentRange {
                    field: "gains.beta".into(),
                    value,
                },
                GainsError::Length { name, expected, found } => ConfigError::DimensionMismatch {
                    field: format!("gains.{name}"),
                    expected,
                    found,
                },
                GainsError::NegativeGain { name, index, value } => {
                    invalid(format!("gains.{name}[{index}]"), format!("{value} must be finite and >= 0"))
                }
            })?;
        }

        let monitor = file.monitor.unwrap_or_default();
        if let Some(beta) = monitor.beta {
            check_exponent("monitor.beta", beta)?;
        }
        for (field, v) in [("monitor.epsilon", monitor.epsilon), ("monitor.rho", monitor.rho)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(invalid(field, format!("{v} must be > 0")));
                }
            }
        }

        let network = NetworkSpec::new(NetworkParts {
            d: net.d,
            a: net.a,
            b: net.b,
            h: net.h,
            f: net.f,
            g: net.g,
            delays: net.delays,
            tau: net.tau,
            phi_init: net.phi_init,
            psi_init: net.psi_init,
        })
        .map_err(from_model_error)?;

        let sim = file.sim.unwrap_or_default();
        sim.validate(network.tau()).map_err(|e| invalid("sim", e.to_string()))?;

        if let Some(reference) = &file.reference {
            if !(reference.tolerance.is_finite() && reference.tolerance > 0.0) {
                return Err(invalid("reference.tolerance", "must be > 0"));
            }
        }

        Ok(Scenario {
            name: file.name.unwrap_or_else(|| "unnamed".into()),
            mode: file.mode.unwrap_or_default(),
            network,
            weights,
            gains: file.gains,
            sim,
            monitor,
            reference: file.reference,
        })
    }

    pub fn parse_str(source: &str) -> Result<Self, ConfigError> {
        let file: ScenarioFile = toml::from_str(source).map_err(|e| from_toml_error(source, e))?;
        Scenario::from_file(file)
    }

    pub fn to_file(&self) -> ScenarioFile {
        let parts = self.network.to_parts();
        ScenarioFile {
            name: Some(self.name.clone()),
            mode: Some(self.mode),
            network: NetworkFile {
                d: parts.d,
                a: parts.a,
                b: parts.b,
                h: parts.h,
                f: parts.f,
                g: parts.g,
                delays: parts.delays,
                tau: parts.tau,
                phi_init: parts.phi_init,
                psi_init: parts.psi_init,
            },
            weights: WeightsFile {
                xi: self.weights.xi().to_vec(),
                phi: self.weights.phi().to_vec(),
            },
            gains: self.gains.clone(),
            sim: Some(self.sim.clone()),
            monitor: Some(self.monitor.clone()),
            reference: self.reference.clone(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_file()).expect("scenario serializes")
    }
}

/// Reads and validates a scenario file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<Scenario, ConfigError> {
    let path = path.as_ref();
    let source = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut scenario = Scenario::parse_str(&source)?;
    if scenario.name == "unnamed" {
        if let Some(stem) = path.file_stem() {
            scenario.name = stem.to_string_lossy().into_owned();
        }
    }
    Ok(scenario)
}
