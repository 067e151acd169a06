//! Experiment dispatch.

use rayon::prelude::*;
use serde::Serialize;

use crate::bloch::{bloch_modes, monodromy, spectrum_min};
use crate::criteria::{
    bloch_integral_criterion, boundary_condition, check_energy_ordering, dislocation_report, energy_verdict,
    large_jump_report, mutually_consistent, nonexistence_check, scaled_interface_check, shifted_state_criterion,
    Branch, CriterionReport, Orientation,
};
use crate::error::{Error, Result};
use crate::media::{FunctionDescriptor, InterfaceMedium, Medium, PeriodicMedium, ProblemParams};
use crate::variational::{solve_ground_state, Grid, GroundStateResult};

use super::config::{validate_row, Check, ExperimentSpec, Kind};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub x: f64,
    pub u: f64,
    pub v: f64,
    pub gamma: f64,
}

/// Scalar summary of one ground-state solve; the profile goes to CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveSummary {
    pub label: String,
    pub energy_c: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub nehari_scale_s: f64,
    pub d_plus: Option<f64>,
    pub d_minus: Option<f64>,
    pub decay_rate_fit: Option<f64>,
    pub decay_rate_left: Option<f64>,
    pub decay_rate_right: Option<f64>,
    pub center_of_mass: f64,
    pub seed_center: f64,
    pub positive: bool,
    pub half_width: f64,
    pub h: f64,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub profile: Vec<ProfilePoint>,
}

impl SolveSummary {
    fn new(label: &str, r: &GroundStateResult, m: &Medium) -> Self {
        let g = r.state.grid;
        let profile = r
            .state
            .values
            .iter()
            .enumerate()
            .map(|(i, &u)| {
                let x = g.x(i);
                let (v, gamma) = m.node_values(x);
                ProfilePoint { x, u, v, gamma }
            })
            .collect();
        SolveSummary {
            label: label.to_string(),
            energy_c: r.energy_c,
            residual: r.residual,
            iterations: r.iterations,
            converged: r.converged,
            nehari_scale_s: r.nehari_scale_s,
            d_plus: r.d_plus,
            d_minus: r.d_minus,
            decay_rate_fit: r.decay_rate_fit,
            decay_rate_left: r.decay_rate_left,
            decay_rate_right: r.decay_rate_right,
            center_of_mass: r.center_of_mass,
            seed_center: r.seed_center,
            positive: r.is_positive(),
            half_width: g.half_width,
            h: g.h,
            warnings: r.warnings.clone(),
            profile,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BandRow {
    pub lambda: f64,
    pub discriminant: f64,
    /// `None` inside a band or where the modes are not positive.
    pub kappa: Option<f64>,
    pub omega: Option<f64>,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowError {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for RowError {
    fn from(e: &Error) -> Self {
        RowError { kind: error_kind(e).to_string(), message: e.to_string() }
    }
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidDescriptor(_) => "InvalidDescriptor",
        Error::H2Violation { .. } => "H2Violation",
        Error::InvalidScale(_) => "InvalidScale",
        Error::InvalidParams(_) => "InvalidParams",
        Error::InvalidGrid(_) => "InvalidGrid",
        Error::IntegrationFailure { .. } => "IntegrationFailure",
        Error::BracketFailure { .. } => "BracketFailure",
        Error::LambdaInSpectrum { .. } => "LambdaInSpectrum",
        Error::PositivityFailure { .. } => "PositivityFailure",
        Error::NonprojectableState { .. } => "NonprojectableState",
        Error::NoConvergence { .. } => "NoConvergence",
        Error::SpectralAssumptionViolated(_) => "SpectralAssumptionViolated",
        Error::TailNotResolved { .. } => "TailNotResolved",
        Error::ShiftOutOfDomain { .. } => "ShiftOutOfDomain",
        Error::NotDifferentiable { .. } => "NotDifferentiable",
        Error::InvalidEnergy(_) => "InvalidEnergy",
        Error::Parse(_) => "Parse",
        Error::Validation { .. } => "Validation",
        Error::Io(_) => "Io",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowReport {
    pub index: usize,
    pub sweep_value: Option<f64>,
    pub kind: Kind,
    pub p: f64,
    pub lambda: f64,
    pub half_width: Option<f64>,
    pub spectrum_min: Vec<f64>,
    pub solves: Vec<SolveSummary>,
    pub bands: Vec<BandRow>,
    pub criteria: Vec<CriterionReport>,
    pub warnings: Vec<String>,
    pub error: Option<RowError>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub version: String,
    pub timestamp: String,
    pub integrator: String,
    pub bloch_steps: usize,
    pub bloch_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub spec: ExperimentSpec,
    pub rows: Vec<RowReport>,
    pub provenance: Provenance,
}

impl Report {
    pub fn empty(spec: ExperimentSpec) -> Self {
        Report { provenance: provenance(&spec), spec, rows: Vec::new() }
    }

    /// True if any row failed because a solve did not converge.
    pub fn has_no_convergence(&self) -> bool {
        self.rows.iter().any(|r| r.error.as_ref().is_some_and(|e| e.kind == "NoConvergence"))
    }
}

fn provenance(spec: &ExperimentSpec) -> Provenance {
    Provenance {
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: chrono::Utc::now().to_rfc3339(),
        integrator: "rk4".into(),
        bloch_steps: spec.bloch.options.steps,
        bloch_samples: spec.bloch.options.samples,
    }
}

/// Runs every row (concurrently for sweeps); rows appear in input order
/// and a failing row does not stop the others.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Report> {
    let rows = spec.rows()?;
    let reports: Vec<RowReport> = rows
        .into_par_iter()
        .enumerate()
        .map(|(index, (value, row))| run_row(index, value, row))
        .collect();
    Ok(Report { spec: spec.clone(), rows: reports, provenance: provenance(spec) })
}

fn run_row(index: usize, sweep_value: Option<f64>, mut spec: ExperimentSpec) -> RowReport {
    let mut out = RowReport {
        index,
        sweep_value,
        kind: spec.kind,
        p: spec.params.p,
        lambda: spec.params.lambda,
        half_width: spec.grid.half_width,
        spectrum_min: Vec::new(),
        solves: Vec::new(),
        bands: Vec::new(),
        criteria: Vec::new(),
        warnings: Vec::new(),
        error: None,
    };
    let result = validate_row(&mut spec).and_then(|_| {
        out.half_width = spec.grid.half_width;
        Runner { spec: &spec, out: &mut out }.run()
    });
    if let Err(e) = result {
        out.error = Some(RowError::from(&e));
    }
    out
}

struct Runner<'a> {
    spec: &'a ExperimentSpec,
    out: &'a mut RowReport,
}

impl Runner<'_> {
    fn params(&self) -> Result<ProblemParams> {
        self.spec.problem()
    }

    fn grid(&self) -> Result<Grid> {
        let l = self.spec.grid.half_width.ok_or_else(|| Error::InvalidGrid("L_dom not set".into()))?;
        Grid::new(l, self.spec.grid.h)
    }

    fn solve(&mut self, label: &str, m: &Medium) -> Result<GroundStateResult> {
        let r = solve_ground_state(m, self.params()?, &self.grid()?, &self.spec.solver)?;
        self.out.solves.push(SolveSummary::new(label, &r, m));
        Ok(r)
    }

    fn interface(&self) -> Result<&InterfaceMedium> {
        self.spec.interface.as_ref().ok_or_else(|| Error::Validation {
            field: "interface".into(),
            message: "required for this kind".into(),
        })
    }

    fn run(mut self) -> Result<()> {
        match self.spec.kind {
            Kind::Bloch => self.bloch(),
            Kind::Groundstate => {
                let m = self.spec.solve_medium()?;
                self.solve("c", &m).map(|_| ())
            }
            Kind::Interface => self.interface_run(),
            Kind::Criteria => self.criteria_run(),
            Kind::Dislocation => self.dislocation_run(),
            Kind::Sweep => Err(Error::Validation { field: "kind".into(), message: "nested sweep".into() }),
        }
    }

    fn bloch(&mut self) -> Result<()> {
        let m = self.spec.medium.as_ref().ok_or_else(|| Error::Validation {
            field: "medium".into(),
            message: "required for this kind".into(),
        })?;
        let opts = &self.spec.bloch.options;
        self.out.spectrum_min.push(spectrum_min(&m.v, opts)?);
        let lambdas = if self.spec.bloch.lambdas.is_empty() {
            vec![self.spec.params.lambda]
        } else {
            self.spec.bloch.lambdas.clone()
        };
        for lambda in lambdas {
            let steps = opts.effective_steps(&m.v, lambda);
            let disc = monodromy(&m.v, lambda, steps)?.trace();
            let modes = if disc > 2.0 { bloch_modes(&m.v, lambda, opts).ok() } else { None };
            if disc > 2.0 && modes.is_none() {
                self.out.warnings.push(format!("lambda = {lambda}: Bloch modes not positive"));
            }
            self.out.bands.push(BandRow {
                lambda,
                discriminant: disc,
                kappa: modes.as_ref().map(|b| b.kappa),
                omega: modes.as_ref().map(|b| b.omega),
                steps,
            });
        }
        Ok(())
    }

    /// `(c₁, c₂)` from single-medium solves, with results.
    fn side_energies(&mut self, m: &InterfaceMedium) -> Result<(GroundStateResult, GroundStateResult)> {
        let w1 = self.solve("c1", &Medium::Periodic(m.side1.clone()))?;
        let w2 = self.solve("c2", &Medium::Periodic(m.side2.clone()))?;
        Ok((w1, w2))
    }

    fn energy_block(&mut self, m: &InterfaceMedium, c1: f64, c2: f64) -> Result<()> {
        let c = self.solve("c", &Medium::Interface(m.clone()))?.energy_c;
        let ev = energy_verdict(c, c1, c2, self.spec.criteria.energy_tol);
        let nc = nonexistence_check(m, self.spec.criteria.sample_count);
        if !mutually_consistent(&nc, &ev) {
            self.out.warnings.push("numerical inconsistency: both existence and nonexistence certified".into());
            self.out.error = Some(RowError {
                kind: "Inconsistency".into(),
                message: "nonexistence_check and energy_verdict both certify".into(),
            });
        }
        if !ev.all_assumptions_passed() {
            self.out.warnings.push(format!("energy bound violated: c = {c} > min(c1, c2)"));
        }
        self.out.criteria.push(ev);
        self.out.criteria.push(nc);
        Ok(())
    }

    fn interface_run(&mut self) -> Result<()> {
        let m = self.interface()?.clone();
        let (w1, w2) = self.side_energies(&m)?;
        self.energy_block(&m, w1.energy_c, w2.energy_c)
    }

    fn criteria_run(&mut self) -> Result<()> {
        let m = self.interface()?.clone();
        let checks = self.spec.criteria.checks.clone();
        let tol = self.spec.criteria.tol;
        let etol = self.spec.criteria.energy_tol;
        let params = self.params()?;
        let needs_energy = checks.iter().any(|c| {
            matches!(c, Check::Energy | Check::BlochIntegral | Check::Boundary | Check::ShiftedState | Check::LargeJump)
        });
        let sides = if needs_energy { Some(self.side_energies(&m)?) } else { None };
        let energies = sides.as_ref().map(|(a, b)| (a.energy_c, b.energy_c));

        for check in checks {
            match check {
                Check::Energy => {
                    let (c1, c2) = energies.unwrap_or_default();
                    self.energy_block(&m, c1, c2)?;
                }
                Check::Nonexistence => {
                    if !self.out.criteria.iter().any(|r| r.name == "nonexistence_check") {
                        self.out.criteria.push(nonexistence_check(&m, self.spec.criteria.sample_count));
                    }
                }
                Check::BlochIntegral => {
                    let (c1, c2) = energies.unwrap_or_default();
                    for o in [Orientation::Forward, Orientation::Reverse] {
                        let r = bloch_integral_criterion(&m.side1.v, &m.side2.v, params.lambda, o, tol)?;
                        self.out.criteria.push(check_energy_ordering(r, o, c1, c2, etol));
                    }
                }
                Check::Boundary => {
                    let (c1, c2) = energies.unwrap_or_default();
                    for o in [Orientation::Forward, Orientation::Reverse] {
                        let r = boundary_condition(&m.side1.v, &m.side2.v, o)?;
                        self.out.criteria.push(check_energy_ordering(r, o, c1, c2, etol));
                    }
                }
                Check::ShiftedState => {
                    let (w1, w2) = sides.as_ref().expect("energies solved");
                    let (c1, c2) = (w1.energy_c, w2.energy_c);
                    let (w, branch) = if c1 <= c2 { (w1, Branch::A) } else { (w2, Branch::B) };
                    let r = shifted_state_criterion(w, &m, params, &self.spec.criteria.t_list, branch, Some((c1, c2)), tol)?;
                    self.out.criteria.push(r);
                }
                Check::LargeJump => {
                    let c2 = energies.map(|e| e.1).unwrap_or_default();
                    let unit = PeriodicMedium { v: m.side1.v.clone(), gamma: FunctionDescriptor::constant(1.0) };
                    let c1_unit = self.solve("c1_unit", &Medium::Periodic(unit))?.energy_c;
                    self.out.criteria.push(large_jump_report(&m, c2, c1_unit, params, tol)?);
                }
                Check::ScaledInterface => {
                    let s = self.spec.criteria.scale.clone().ok_or_else(|| Error::Validation {
                        field: "criteria.scale".into(),
                        message: "required by the scaled_interface check".into(),
                    })?;
                    self.out.criteria.push(scaled_interface_check(&m.side2, s.k, s.gamma, params, 1)?);
                }
            }
        }
        Ok(())
    }

    fn dislocation_run(&mut self) -> Result<()> {
        let d = self.spec.dislocation.clone().ok_or_else(|| Error::Validation {
            field: "dislocation".into(),
            message: "required for this kind".into(),
        })?;
        let params = self.params()?;
        let r = dislocation_report(&d.v0, &d.gamma0, d.tau, params.lambda, self.spec.criteria.tol)?;
        self.out.criteria.push(r);
        if d.solve {
            let m = self.spec.solve_medium()?;
            let Medium::Interface(im) = &m else { unreachable!("dislocation builds an interface") };
            // both sides are translates of one medium and share the energy
            let c1 = self.solve("c1", &Medium::Periodic(im.side1.clone()))?.energy_c;
            let c = self.solve("c", &m)?.energy_c;
            self.out.criteria.push(energy_verdict(c, c1, c1, self.spec.criteria.energy_tol));
        }
        Ok(())
    }
}
