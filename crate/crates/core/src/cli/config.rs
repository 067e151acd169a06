//! Experiment configuration: JSON schema, defaults and validation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bloch::{spectrum_min, BlochOptions};
use crate::error::{Error, Result};
use crate::media::{compose_interface, dislocate, FunctionDescriptor, InterfaceMedium, Medium, PeriodicMedium, ProblemParams};
use crate::variational::solver::default_half_width;
use crate::variational::SolverOptions;

/// Hard cap on grid size, to reject configurations that would not fit
/// comfortably in memory.
const MAX_NODES: f64 = 5.0e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Bloch,
    Groundstate,
    Interface,
    Criteria,
    Dislocation,
    Sweep,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub lambda: f64,
}

fn default_p() -> f64 {
    3.0
}

impl Default for ParamsSpec {
    fn default() -> Self {
        ParamsSpec { p: default_p(), lambda: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Half width of the truncated domain `[−L, L]`; filled from the decay
    /// exponent when absent.
    #[serde(rename = "L_dom", default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default = "default_h")]
    pub h: f64,
}

fn default_h() -> f64 {
    0.01
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { half_width: None, h: default_h() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Energy,
    Nonexistence,
    BlochIntegral,
    Boundary,
    ShiftedState,
    LargeJump,
    ScaledInterface,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleSpec {
    pub k: i64,
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CriteriaOptions {
    pub checks: Vec<Check>,
    pub t_list: Vec<u32>,
    /// Certification tolerance for strict inequalities.
    pub tol: f64,
    /// Relative slack when comparing energies.
    pub energy_tol: f64,
    pub sample_count: usize,
    /// Scaling for the `scaled_interface` check; side 2 is the base medium.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<ScaleSpec>,
}

impl Default for CriteriaOptions {
    fn default() -> Self {
        CriteriaOptions {
            checks: vec![Check::Nonexistence, Check::BlochIntegral, Check::Boundary],
            t_list: (2..=8).collect(),
            tol: 1e-12,
            energy_tol: 1e-6,
            sample_count: 1024,
            scale: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochSpec {
    /// Spectral parameters to evaluate; empty means `params.lambda` only.
    #[serde(default)]
    pub lambdas: Vec<f64>,
    #[serde(default)]
    pub options: BlochOptions,
}

impl Default for BlochSpec {
    fn default() -> Self {
        BlochSpec { lambdas: Vec::new(), options: BlochOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DislocationSpec {
    #[serde(rename = "V0")]
    pub v0: FunctionDescriptor,
    #[serde(rename = "Gamma0")]
    pub gamma0: FunctionDescriptor,
    pub tau: f64,
    #[serde(default)]
    pub sigma: f64,
    /// Also solve the interface and single-medium problems.
    #[serde(default)]
    pub solve: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Kind run for every row.
    pub base: Kind,
    /// One of `lambda`, `p`, `h`, `L_dom`, `tau`, `sigma`.
    pub parameter: String,
    pub values: Vec<f64>,
}

const SWEEPABLE: [&str; 6] = ["lambda", "p", "h", "L_dom", "tau", "sigma"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub medium: Option<PeriodicMedium>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interface: Option<InterfaceMedium>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dislocation: Option<DislocationSpec>,
    #[serde(default)]
    pub params: ParamsSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub criteria: CriteriaOptions,
    #[serde(default)]
    pub bloch: BlochSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

fn invalid(field: &str, message: impl Into<String>) -> Error {
    Error::Validation { field: field.to_string(), message: message.into() }
}

impl ExperimentSpec {
    /// Problem parameters, validated.
    pub fn problem(&self) -> Result<ProblemParams> {
        ProblemParams::new(self.params.p, self.params.lambda).map_err(|e| invalid("params", e.to_string()))
    }

    /// The medium solved by `groundstate`/`interface`/`dislocation` runs.
    pub fn solve_medium(&self) -> Result<Medium> {
        match self.kind {
            Kind::Bloch | Kind::Groundstate => self
                .medium
                .clone()
                .map(Medium::from)
                .ok_or_else(|| invalid("medium", "required for this kind")),
            Kind::Interface | Kind::Criteria => self
                .interface
                .clone()
                .map(Medium::from)
                .ok_or_else(|| invalid("interface", "required for this kind")),
            Kind::Dislocation => {
                let d = self.dislocation.as_ref().ok_or_else(|| invalid("dislocation", "required for this kind"))?;
                dislocate(&d.v0, &d.gamma0, d.tau, d.sigma)
                    .map(Medium::from)
                    .map_err(|e| invalid("dislocation", e.to_string()))
            }
            Kind::Sweep => Err(invalid("kind", "sweep has no medium of its own")),
        }
    }

    /// Expands a sweep into one spec per value; any other kind is one row.
    pub fn rows(&self) -> Result<Vec<(Option<f64>, ExperimentSpec)>> {
        let Some(sweep) = (self.kind == Kind::Sweep).then_some(()).and(self.sweep.as_ref()) else {
            return Ok(vec![(None, self.clone())]);
        };
        sweep
            .values
            .iter()
            .map(|&v| {
                let mut row = self.clone();
                row.kind = sweep.base;
                row.sweep = None;
                row.set_parameter(&sweep.parameter, v)?;
                Ok((Some(v), row))
            })
            .collect()
    }

    fn set_parameter(&mut self, name: &str, v: f64) -> Result<()> {
        match name {
            "lambda" => self.params.lambda = v,
            "p" => self.params.p = v,
            "h" => self.grid.h = v,
            "L_dom" => self.grid.half_width = Some(v),
            "tau" | "sigma" => {
                let d = self.dislocation.as_mut().ok_or_else(|| invalid("sweep.parameter", "needs a dislocation"))?;
                if name == "tau" {
                    d.tau = v
                } else {
                    d.sigma = v
                }
            }
            other => return Err(invalid("sweep.parameter", format!("`{other}` is not sweepable"))),
        }
        Ok(())
    }
}

fn check_medium(field: &str, m: &PeriodicMedium) -> Result<()> {
    m.check_h2(field).map_err(|e| invalid(&format!("{field}.Gamma"), e.to_string()))
}

fn check_spectrum(field: &str, v: &FunctionDescriptor, lambda: f64) -> Result<()> {
    let bottom = spectrum_min(v, &BlochOptions::default()).map_err(|e| invalid(field, e.to_string()))?;
    if lambda < bottom {
        Ok(())
    } else {
        Err(invalid(field, format!("lambda = {lambda} is not below the spectrum bottom {bottom:.10}")))
    }
}

/// Validates one non-sweep row and fills `L_dom` if needed.
pub fn validate_row(spec: &mut ExperimentSpec) -> Result<()> {
    let params = spec.problem()?;
    if let Some(m) = &spec.medium {
        check_medium("medium", m)?;
    }
    if let Some(m) = &spec.interface {
        check_medium("interface.side1", &m.side1)?;
        check_medium("interface.side2", &m.side2)?;
    }
    if let Some(d) = &spec.dislocation {
        if !d.tau.is_finite() || !d.sigma.is_finite() {
            return Err(invalid("dislocation", "tau and sigma must be finite"));
        }
        check_medium("dislocation", &PeriodicMedium { v: d.v0.clone(), gamma: d.gamma0.clone() })?;
    }
    if !(spec.solver.tol > 0.0) {
        return Err(invalid("solver.tol", "must be positive"));
    }
    if !(spec.criteria.tol >= 0.0) {
        return Err(invalid("criteria.tol", "must be nonnegative"));
    }
    if spec.criteria.t_list.contains(&0) {
        return Err(invalid("criteria.t_list", "shifts must be positive integers"));
    }
    if let Some(s) = &spec.criteria.scale {
        if s.k < 1 {
            return Err(invalid("criteria.scale.k", format!("k = {} is not a positive integer", s.k)));
        }
        if !(s.gamma > 0.0) {
            return Err(invalid("criteria.scale.gamma", "must be positive"));
        }
    }
    if spec.kind == Kind::Bloch {
        spec.solve_medium()?;
        return Ok(());
    }
    let medium = spec.solve_medium()?;
    let names = ["side1", "side2"];
    for (side, name) in medium.sides().into_iter().zip(names) {
        let field = match &medium {
            Medium::Periodic(_) => "medium.V".to_string(),
            Medium::Interface(_) => format!("{name}.V"),
        };
        check_spectrum(&field, &side.v, params.lambda)?;
    }
    if spec.grid.half_width.is_none() {
        let l = default_half_width(&medium, params.lambda).map_err(|e| invalid("grid.L_dom", e.to_string()))?;
        spec.grid.half_width = Some(l);
    }
    let l = spec.grid.half_width.unwrap_or_default();
    if !(l > 0.0 && spec.grid.h > 0.0 && spec.grid.h < l) {
        return Err(invalid("grid", format!("need 0 < h < L_dom (h = {}, L_dom = {l})", spec.grid.h)));
    }
    if 2.0 * l / spec.grid.h > MAX_NODES {
        return Err(invalid("grid", format!("{:.0} nodes exceeds the limit {MAX_NODES:.0}", 2.0 * l / spec.grid.h)));
    }
    if spec.criteria.checks.contains(&Check::ShiftedState) {
        if let Some(&t) = spec.criteria.t_list.iter().max() {
            if t as f64 >= l - 1.0 {
                return Err(invalid("criteria.t_list", format!("shift {t} does not fit in L_dom = {l}")));
            }
        }
    }
    if spec.criteria.checks.contains(&Check::ScaledInterface) && spec.criteria.scale.is_none() {
        return Err(invalid("criteria.scale", "required by the scaled_interface check"));
    }
    if let Some(m) = &spec.interface {
        compose_interface(m.side1.clone(), m.side2.clone()).map_err(|e| invalid("interface", e.to_string()))?;
    }
    Ok(())
}

/// Validates a parsed spec and fills defaults.
///
/// For a sweep only the structure and the row-independent media are
/// checked here; each row is validated when it runs, so that one bad value
/// does not prevent the others.
pub fn validate(mut spec: ExperimentSpec) -> Result<ExperimentSpec> {
    if spec.kind == Kind::Sweep {
        let sweep = spec.sweep.as_ref().ok_or_else(|| invalid("sweep", "required for kind sweep"))?;
        if sweep.base == Kind::Sweep {
            return Err(invalid("sweep.base", "nested sweeps are not supported"));
        }
        if !SWEEPABLE.contains(&sweep.parameter.as_str()) {
            return Err(invalid("sweep.parameter", format!("`{}` is not sweepable", sweep.parameter)));
        }
        if sweep.values.is_empty() {
            return Err(invalid("sweep.values", "empty"));
        }
        for m in spec.medium.iter() {
            check_medium("medium", m)?;
        }
        for m in spec.interface.iter() {
            check_medium("interface.side1", &m.side1)?;
            check_medium("interface.side2", &m.side2)?;
        }
        return Ok(spec);
    }
    validate_row(&mut spec)?;
    Ok(spec)
}

pub fn parse_str(text: &str) -> Result<ExperimentSpec> {
    let spec: ExperimentSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    validate(spec)
}

pub fn parse_config(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path)?;
    parse_str(&text)
}
