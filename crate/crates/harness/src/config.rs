//! Experiment configurations as read from JSON.

use gausscq_bem2d::{BoundaryOperator, Geometry, QuadratureOptions};
use gausscq_core::kernels::{Datum, ScalarKernel};
use gausscq_core::tableau::Family;
use gausscq_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// Largest stage count accepted by the stability reports.
pub const MAX_REPORT_STAGES: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum ExperimentConfig {
    ScalarConvergence(ScalarConvergence),
    BemConvergence(BemConvergence),
    StabilityReport(StageRange),
    CancellationTable(StageRange),
}

/// Relative discrete l2 error of `K(d_t^h) g` for a scalar symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarConvergence {
    pub name: String,
    pub family: Family,
    pub m: usize,
    pub kernel: ScalarKernel,
    #[serde(default = "default_scalar_datum")]
    pub datum: Datum,
    #[serde(default = "default_scalar_time")]
    pub final_time: f64,
    pub steps: Vec<usize>,
    #[serde(default = "default_scalar_nref")]
    pub n_ref: usize,
}

/// Time-domain boundary-integral error against a Radau IIA reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BemConvergence {
    pub name: String,
    pub family: Family,
    pub m: usize,
    pub geometry: Geometry,
    pub operator: BoundaryOperator,
    pub datum: Datum,
    pub final_time: f64,
    pub steps: Vec<usize>,
    #[serde(default = "default_bem_nref")]
    pub n_ref: usize,
    #[serde(default = "default_panels")]
    pub n_panels: usize,
    #[serde(default)]
    pub quadrature: QuadratureOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageRange {
    pub name: String,
    pub m_min: usize,
    pub m_max: usize,
}

fn default_scalar_datum() -> Datum {
    Datum::SinPowExp
}

fn default_scalar_time() -> f64 {
    3.0
}

fn default_scalar_nref() -> usize {
    2048
}

fn default_bem_nref() -> usize {
    210
}

fn default_panels() -> usize {
    64
}

fn invalid(msg: String) -> Error {
    Error::InvalidArgument(msg)
}

fn check_name(name: &str) -> Result<()> {
    let ok = !name.is_empty()
        && name.len() <= 128
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        && !name.starts_with('.');
    if !ok {
        return Err(invalid(format!("name {name:?} must be a plain file stem")));
    }
    Ok(())
}

fn check_stages(family: Family, m: usize) -> Result<()> {
    if m == 0 || m > family.max_stages() {
        return Err(invalid(format!(
            "{family:?} supports 1..={} stages, got {m}",
            family.max_stages()
        )));
    }
    Ok(())
}

/// Step counts must increase and divide the reference count.
fn check_steps(steps: &[usize], n_ref: usize) -> Result<()> {
    if steps.is_empty() {
        return Err(invalid("at least one step count is required".into()));
    }
    if n_ref == 0 {
        return Err(invalid("reference step count must be positive".into()));
    }
    for w in steps.windows(2) {
        if w[0] >= w[1] {
            return Err(invalid(format!(
                "step counts must increase: {} then {}",
                w[0], w[1]
            )));
        }
    }
    for &n in steps {
        if n == 0 || n > n_ref || n_ref % n != 0 {
            return Err(invalid(format!(
                "step count {n} must divide the reference count {n_ref}"
            )));
        }
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("final time must be positive, got {t}")));
    }
    Ok(())
}

impl ScalarConvergence {
    pub fn validate(&self) -> Result<()> {
        check_name(&self.name)?;
        check_stages(self.family, self.m)?;
        check_time(self.final_time)?;
        check_steps(&self.steps, self.n_ref)?;
        if !self.kernel.mu().is_finite() {
            return Err(invalid("kernel exponent must be finite".into()));
        }
        if self.datum.is_spatial() {
            return Err(invalid(format!(
                "datum {} needs a boundary",
                self.datum.name()
            )));
        }
        Ok(())
    }
}

impl BemConvergence {
    pub fn validate(&self) -> Result<()> {
        check_name(&self.name)?;
        check_stages(self.family, self.m)?;
        check_time(self.final_time)?;
        check_steps(&self.steps, self.n_ref)?;
        if self.n_panels < self.geometry.min_panels() {
            return Err(invalid(format!(
                "{} needs at least {} panels, got {}",
                self.geometry.name(),
                self.geometry.min_panels(),
                self.n_panels
            )));
        }
        if !self.datum.is_spatial() {
            return Err(invalid(format!(
                "datum {} has no spatial dependence",
                self.datum.name()
            )));
        }
        if let Datum::TravelingGaussian { rho, alpha, shift } = self.datum {
            if !(rho > 0.0
                && rho.is_finite()
                && alpha.iter().all(|a| a.is_finite())
                && shift.is_finite())
            {
                return Err(invalid(
                    "traveling Gaussian parameters must be finite with rho > 0".into(),
                ));
            }
        }
        self.quadrature.validate()
    }
}

impl StageRange {
    pub fn validate(&self) -> Result<()> {
        check_name(&self.name)?;
        if self.m_min == 0 || self.m_min > self.m_max || self.m_max > MAX_REPORT_STAGES {
            return Err(invalid(format!(
                "stage range {}..={} must lie in 1..={MAX_REPORT_STAGES}",
                self.m_min, self.m_max
            )));
        }
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn name(&self) -> &str {
        match self {
            ExperimentConfig::ScalarConvergence(c) => &c.name,
            ExperimentConfig::BemConvergence(c) => &c.name,
            ExperimentConfig::StabilityReport(c) | ExperimentConfig::CancellationTable(c) => {
                &c.name
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ExperimentConfig::ScalarConvergence(c) => c.validate(),
            ExperimentConfig::BemConvergence(c) => c.validate(),
            ExperimentConfig::StabilityReport(c) | ExperimentConfig::CancellationTable(c) => {
                c.validate()
            }
        }
    }

    /// Applies command-line overrides; the result is validated again by the caller.
    pub fn with_overrides(mut self, overrides: &Overrides) -> Self {
        match &mut self {
            ExperimentConfig::ScalarConvergence(c) => {
                if let Some(n) = overrides.n_ref {
                    c.n_ref = n;
                }
            }
            ExperimentConfig::BemConvergence(c) => {
                if let Some(n) = overrides.n_ref {
                    c.n_ref = n;
                }
                if let Some(p) = overrides.n_panels {
                    c.n_panels = p;
                }
            }
            _ => {}
        }
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub n_ref: Option<usize>,
    pub n_panels: Option<usize>,
}

/// Parses one configuration or an array of them, validating each.
pub fn parse_configs(text: &str) -> Result<Vec<ExperimentConfig>> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Decode(format!("config: {e}")))?;
    let items = match value {
        serde_json::Value::Array(items) => items,
        other => vec![other],
    };
    if items.is_empty() {
        return Err(invalid("config array is empty".into()));
    }
    let configs = items
        .into_iter()
        .map(|v| {
            serde_json::from_value::<ExperimentConfig>(v)
                .map_err(|e| Error::Decode(format!("config: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut names = std::collections::HashSet::new();
    for c in &configs {
        c.validate()?;
        if !names.insert(c.name()) {
            return Err(invalid(format!("duplicate experiment name {:?}", c.name())));
        }
    }
    Ok(configs)
}
