use std::path::Path;

use cgauge_core::classical::{GradientReading, ModelKind, QuadratureSettings};
use cgauge_core::dynamics::IntegratorConfig;
use cgauge_core::fock::{CouplingToggles, EigenOptions, DEFAULT_CAPACITY};
use cgauge_core::qed::HReading;
use cgauge_core::UnitSystem;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Classical,
    Quantum,
    Qed,
    Kernel,
}

/// One run: a mode, shared units and exactly the matching section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mode: Mode,
    /// Output subdirectory; defaults to the config file stem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub units: UnitSystem,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical: Option<ClassicalSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantum: Option<QuantumSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qed: Option<QedSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleSpec {
    pub m: f64,
    pub e: f64,
    pub r: [f64; 3],
    pub p: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalSection {
    pub particles: Vec<ParticleSpec>,
    /// Model for `run`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelKind>,
    /// Exactly two models for `compare`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub models: Option<Vec<ModelKind>>,
    #[serde(default)]
    pub reading: GradientReading,
    pub integrator: IntegratorConfig,
    /// Record on a uniform grid with this spacing instead of every step.
    /// `compare` always uses a grid (default `t_end/200`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_interval: Option<f64>,
    #[serde(default)]
    pub checks: ClassicalChecks,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalChecks {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_energy_drift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_momentum_drift: Option<f64>,
    /// `compare` only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_divergence: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumSection {
    #[serde(rename = "L")]
    pub edge: f64,
    pub n_max: u32,
    #[serde(rename = "N")]
    pub particles: usize,
    #[serde(rename = "P_total", default, skip_serializing_if = "Option::is_none")]
    pub momentum: Option<[i32; 3]>,
    /// Total spin projection, a multiple of 1/2.
    #[serde(rename = "Sz", default, skip_serializing_if = "Option::is_none")]
    pub sz: Option<f64>,
    #[serde(default)]
    pub toggles: CouplingToggles,
    /// Uniform external vector potential in the kinetic term.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<[f64; 3]>,
    #[serde(default = "default_capacity")]
    pub capacity: usize,
    #[serde(default)]
    pub eigen: EigenOptions,
}

fn default_capacity() -> usize {
    DEFAULT_CAPACITY
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QedSection {
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(rename = "L", default = "unit_edge")]
    pub edge: f64,
    #[serde(default = "unit")]
    pub charge: f64,
    #[serde(default = "unit")]
    pub mass: f64,
    #[serde(default)]
    pub h_reading: HReading,
    #[serde(default = "qed_tolerance")]
    pub tolerance: f64,
}

fn unit_edge() -> f64 {
    1.0
}

fn unit() -> f64 {
    1.0
}

fn qed_tolerance() -> f64 {
    1e-10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    #[serde(rename = "R")]
    pub separations: Vec<f64>,
    /// Normalized before use.
    pub directions: Vec<[f64; 3]>,
    #[serde(default = "both_readings")]
    pub readings: Vec<GradientReading>,
    /// The `reading` field inside is replaced per row.
    #[serde(default)]
    pub quadrature: QuadratureSettings,
    /// Largest accepted closed-form versus quadrature relative difference.
    #[serde(default = "kernel_tolerance")]
    pub tolerance: f64,
}

fn both_readings() -> Vec<GradientReading> {
    vec![GradientReading::IntegrationPoint, GradientReading::Source]
}

fn kernel_tolerance() -> f64 {
    1e-5
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| {
            CliError::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Exactly one section, and it must match `mode`.
    pub fn validate(&self) -> Result<(), CliError> {
        let present: Vec<Mode> = [
            (Mode::Classical, self.classical.is_some()),
            (Mode::Quantum, self.quantum.is_some()),
            (Mode::Qed, self.qed.is_some()),
            (Mode::Kernel, self.kernel.is_some()),
        ]
        .into_iter()
        .filter_map(|(m, there)| there.then_some(m))
        .collect();
        if present != [self.mode] {
            return Err(CliError::Config(format!(
                "mode {:?} needs exactly its own section, found {:?}",
                self.mode, present
            )));
        }
        self.units.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(name) = &self.name {
            if name.is_empty() || name.contains(['/', '\\']) || name == "." || name == ".." {
                return Err(CliError::Config(format!("invalid run name {name:?}")));
            }
        }
        Ok(())
    }
}
