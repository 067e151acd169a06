//! Nehari-projected gradient descent for strong ground states.
//!
//! The descent direction is the `A`-Riesz representative of `J'(u)`,
//! `d = u − A⁻¹(Γ|u|^{p−1}u)`, where `A` is the discrete
//! `−d²/dx² + V − λ`. With unit step, `P(u − d)` is the Nehari-normalized
//! fixed-point map `u ↦ A⁻¹f(u)`; Barzilai–Borwein steps accelerate it and a
//! halving line search keeps the energy monotone. A damped Newton polish on
//! `Au = f(u)` finishes the solve, which matters when the energy landscape
//! is exponentially flat (a minimizer drifting away from the interface).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::{bloch_modes, spectrum_min, BlochOptions};
use crate::error::{Error, Result};
use crate::media::{FunctionDescriptor, Medium, ProblemParams};
use crate::tridiag::{solve_general, SpdTridiag};

use super::functional::Discretization;
use super::grid::{Grid, GridFunction};
use super::tails::d_coefficients;
use super::tails::fit_decay_rates;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Seed centers; `None` runs the default multi-start set.
    pub centers: Option<Vec<f64>>,
    pub polish: bool,
    /// Verify `λ < min σ` on every side with the Bloch solver first.
    pub check_spectrum: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-8, max_iter: 50_000, centers: None, polish: true, check_spectrum: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroundStateResult {
    pub state: GridFunction,
    pub energy_c: f64,
    /// Scale of the final Nehari projection.
    pub nehari_scale_s: f64,
    /// Projection scales of the accepted iterates of the winning run.
    pub scale_history: Vec<f64>,
    /// `‖u − A⁻¹f(u)‖_A / ‖u‖_A`.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub d_plus: Option<f64>,
    pub d_minus: Option<f64>,
    pub decay_rate_fit: Option<f64>,
    pub decay_rate_left: Option<f64>,
    pub decay_rate_right: Option<f64>,
    pub center_of_mass: f64,
    pub seed_center: f64,
    pub warnings: Vec<String>,
}

impl GroundStateResult {
    pub fn is_positive(&self) -> bool {
        let v = &self.state.values;
        v[1..v.len() - 1].iter().all(|&x| x > 0.0)
    }
}

const POLISH_SWITCH: f64 = 1e-5;
/// Descent gives up if the residual has not halved within this many
/// iterations. This happens on short domains, where the translation mode is
/// nearly flat.
const STALL_WINDOW: usize = 2000;

struct Run {
    u: Vec<f64>,
    energy: f64,
    residual: f64,
    scale: f64,
    history: Vec<f64>,
    iterations: usize,
}

struct Solver<'a> {
    disc: &'a Discretization,
    factor: SpdTridiag,
}

impl Solver<'_> {
    /// `(d, residual)` for a full-length state.
    fn direction(&self, u: &[f64]) -> (Vec<f64>, f64) {
        let n = u.len();
        let f = self.disc.nonlinearity(u);
        let w = self.factor.solve(&f);
        let au = self.disc.apply_linear(u);
        let mut d = vec![0.0; n];
        let mut dad = 0.0;
        let mut uau = 0.0;
        for i in 0..n - 2 {
            d[i + 1] = u[i + 1] - w[i];
            dad += d[i + 1] * (au[i] - f[i]);
            uau += u[i + 1] * au[i];
        }
        let res = if uau > 0.0 { (dad.max(0.0) / uau).sqrt() } else { f64::INFINITY };
        (d, res)
    }

    fn a_inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let ab = self.disc.apply_linear(b);
        a[1..a.len() - 1].iter().zip(&ab).map(|(x, y)| x * y).sum::<f64>() * self.disc.grid.h
    }

    fn start(&self, seed: &[f64]) -> Result<Run> {
        let (u, scale) = self.disc.project(seed)?;
        let energy = self.disc.energy(&u);
        let (_, residual) = self.direction(&u);
        Ok(Run { u, energy, residual, scale, history: vec![scale], iterations: 0 })
    }

    /// Descends until the residual drops below `tol` or `max_iter` total
    /// iterations have been spent.
    /// Full pipeline from one seed.
    fn run_from(&self, seed: &[f64], opts: &SolverOptions) -> Result<Run> {
        let mut run = self.start(seed)?;
        if opts.polish {
            // Newton converges from a moderately accurate state; fall back to
            // plain descent if it stalls.
            self.descend(&mut run, opts.tol.max(POLISH_SWITCH), opts.max_iter);
            for _ in 0..20 {
                if !self.translate(&mut run) {
                    break;
                }
                self.descend(&mut run, opts.tol.max(POLISH_SWITCH), opts.max_iter);
            }
            self.polish(&mut run);
        }
        self.descend(&mut run, opts.tol, opts.max_iter);
        if opts.polish {
            self.polish(&mut run);
        }
        Ok(run)
    }

    fn descend(&self, run: &mut Run, tol: f64, max_iter: usize) {
        let Run { u, energy, residual, scale, history, iterations } = run;
        let (mut d, _) = self.direction(u);
        let mut alpha = 1.0;
        let mut mark = (*iterations, *residual);
        while *residual >= tol && *iterations < max_iter {
            if *iterations - mark.0 >= STALL_WINDOW {
                if *residual > 0.5 * mark.1 {
                    break;
                }
                mark = (*iterations, *residual);
            }
            *iterations += 1;
            let mut step = alpha;
            let mut next = None;
            for _ in 0..40 {
                let cand: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a - step * b).collect();
                if let Ok((c, s)) = self.disc.project(&cand) {
                    let e = self.disc.energy(&c);
                    if e <= *energy + 1e-13 * energy.abs() {
                        next = Some((c, s, e));
                        break;
                    }
                }
                step *= 0.5;
            }
            let Some((c, s, e)) = next else { break };
            let (dn, rn) = self.direction(&c);
            let sv: Vec<f64> = c.iter().zip(u.iter()).map(|(a, b)| a - b).collect();
            let yv: Vec<f64> = dn.iter().zip(&d).map(|(a, b)| a - b).collect();
            let sas = self.a_inner(&sv, &sv);
            let say = self.a_inner(&sv, &yv);
            alpha = if say > 0.0 { (sas / say).clamp(1e-6, 1e2) } else { 1.0 };
            *u = c;
            *scale = s;
            *energy = e;
            d = dn;
            *residual = rn;
            history.push(s);
        }
    }

    /// Rigid translations by whole nodes, accepted while they lower the
    /// projected energy. Translation is the softest mode: where the
    /// landscape is exponentially flat, gradient and Newton steps would
    /// need thousands of iterations to cover the same distance.
    fn translate(&self, run: &mut Run) -> bool {
        let n = run.u.len() as isize;
        let shift = |u: &[f64], k: isize| -> Vec<f64> {
            let mut out = vec![0.0; u.len()];
            for i in 1..n - 1 {
                let j = i - k;
                if j > 0 && j < n - 1 {
                    out[i as usize] = u[j as usize];
                }
            }
            out
        };
        let mut moved = false;
        for _ in 0..200 {
            let mut best: Option<(Vec<f64>, f64, f64)> = None;
            let mut best_e = run.energy - 1e-13 * run.energy.abs();
            for dir in [1isize, -1] {
                let mut k = dir;
                while k.abs() < n / 4 {
                    let Ok((c, s)) = self.disc.project(&shift(&run.u, k)) else { break };
                    let e = self.disc.energy(&c);
                    if e < best_e {
                        best_e = e;
                        best = Some((c, s, e));
                        k *= 2;
                    } else {
                        break;
                    }
                }
            }
            let Some((c, s, e)) = best else { break };
            run.u = c;
            run.scale = s;
            run.energy = e;
            run.history.push(s);
            moved = true;
        }
        if moved {
            run.residual = self.direction(&run.u).1;
        }
        moved
    }

    fn polish(&self, run: &mut Run) {
        let p = self.disc.params.p;
        let n = run.u.len();
        let ih2 = 1.0 / (self.disc.grid.h * self.disc.grid.h);
        let off = vec![-ih2; n.saturating_sub(3)];
        for _ in 0..40 {
            if run.residual <= 1e-13 {
                break;
            }
            let u = &run.u;
            let au = self.disc.apply_linear(u);
            let f = self.disc.nonlinearity(u);
            let rhs: Vec<f64> = au.iter().zip(&f).map(|(a, b)| a - b).collect();
            let diag: Vec<f64> = (1..n - 1)
                .map(|i| 2.0 * ih2 + self.disc.q[i] - p * self.disc.gamma[i] * u[i].abs().powf(p - 1.0))
                .collect();
            let Some(delta) = solve_general(&off, &diag, &off, &rhs) else { break };
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..16 {
                let mut cand = u.clone();
                for i in 0..n - 2 {
                    cand[i + 1] -= t * delta[i];
                }
                if let Ok((c, s)) = self.disc.project(&cand) {
                    let e = self.disc.energy(&c);
                    let (_, r) = self.direction(&c);
                    if r < run.residual && e <= run.energy + 1e-12 * run.energy.abs() {
                        run.u = c;
                        run.energy = e;
                        run.residual = r;
                        run.scale = s;
                        run.history.push(s);
                        run.iterations += 1;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
    }
}

fn default_centers(m: &Medium) -> Vec<f64> {
    match m {
        Medium::Periodic(pm) => {
            let mut c: Vec<f64> = (-3..=4).map(|j| j as f64 / 8.0).collect();
            let n = 256;
            let (imin, _) = (0..n)
                .map(|i| (i, pm.v.eval(i as f64 / n as f64)))
                .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            let xmin = imin as f64 / n as f64;
            let xmin = if xmin >= 0.5 { xmin - 1.0 } else { xmin };
            if c.iter().all(|&x| (x - xmin).abs() > 1e-12) {
                c.push(xmin);
            }
            c
        }
        Medium::Interface(_) => (-8..=8).map(|j| j as f64 / 8.0).collect(),
    }
}

fn mean_potential(m: &Medium) -> f64 {
    let sides = m.sides();
    sides.iter().map(|s| s.v.mean()).sum::<f64>() / sides.len() as f64
}

/// Checks `λ < min σ(−d²/dx² + V)` for `v`; returns the spectrum bottom.
pub fn check_below_spectrum(v: &FunctionDescriptor, lambda: f64, side: &str) -> Result<f64> {
    let bottom = spectrum_min(v, &BlochOptions::default())?;
    if lambda < bottom {
        Ok(bottom)
    } else {
        Err(Error::SpectralAssumptionViolated(format!(
            "lambda = {lambda} is not below the spectrum of {side} (bottom {bottom})"
        )))
    }
}

/// Smallest decay exponent over the sides of `m` at `λ`.
pub fn min_decay_exponent(m: &Medium, lambda: f64) -> Result<f64> {
    let mut kmin = f64::INFINITY;
    for side in m.sides() {
        kmin = kmin.min(bloch_modes(&side.v, lambda, &BlochOptions::default())?.kappa);
    }
    Ok(kmin)
}

/// Default truncation half width `12/κ_min`.
pub fn default_half_width(m: &Medium, lambda: f64) -> Result<f64> {
    Ok(12.0 / min_decay_exponent(m, lambda)?)
}

pub fn solve_ground_state(
    m: &Medium,
    params: ProblemParams,
    grid: &Grid,
    opts: &SolverOptions,
) -> Result<GroundStateResult> {
    let mut warnings = Vec::new();
    if opts.check_spectrum {
        let names = ["side1", "side2"];
        for (side, name) in m.sides().into_iter().zip(names) {
            check_below_spectrum(&side.v, params.lambda, name)?;
        }
        let kappa = min_decay_exponent(m, params.lambda)?;
        let kmax = m
            .sides()
            .iter()
            .map(|s| bloch_modes(&s.v, params.lambda, &BlochOptions::default()).map(|b| b.kappa))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(kappa, f64::max);
        if grid.h * kmax > 0.2 {
            warnings.push(format!("h·κ = {:.3} exceeds 0.2; the tails are under-resolved", grid.h * kmax));
        }
        if kappa * grid.half_width < 8.0 {
            warnings.push(format!(
                "κ·L = {:.2} is small; truncation may bias the energy",
                kappa * grid.half_width
            ));
        }
    }

    let disc = Discretization::new(*grid, m, params);
    let factor = disc.factor_linear()?;
    let solver = Solver { disc: &disc, factor };

    let width = 1.0 / (mean_potential(m) - params.lambda).max(1e-12).sqrt();
    let centers = opts.centers.clone().unwrap_or_else(|| default_centers(m));
    let centers: Vec<f64> = centers
        .into_iter()
        .filter(|c| c.abs() + 3.0 * width < grid.half_width)
        .collect();
    if centers.is_empty() {
        return Err(Error::InvalidGrid("no seed center fits inside the domain".into()));
    }

    let runs: Vec<(f64, Result<Run>)> = centers
        .par_iter()
        .map(|&center| {
            let seed = GridFunction::from_fn(*grid, |x| (-((x - center) / width).powi(2) / 2.0).exp());
            (center, solver.run_from(&seed.values, opts))
        })
        .collect();

    let mut best: Option<(Run, f64)> = None;
    let mut first_err = None;
    for (center, run) in runs {
        let run = match run {
            Ok(r) => r,
            Err(e) => {
                first_err.get_or_insert(e);
                continue;
            }
        };
        let better = match &best {
            None => true,
            Some((b, _)) => {
                let (rc, bc) = (run.residual < opts.tol, b.residual < opts.tol);
                if rc != bc {
                    rc
                } else {
                    run.energy < b.energy - 1e-12 * b.energy.abs()
                }
            }
        };
        if better {
            best = Some((run, center));
        }
    }
    let Some((mut run, seed_center)) = best else {
        return Err(first_err.unwrap_or(Error::NoConvergence { residual: f64::INFINITY, iterations: 0 }));
    };
    if !(run.residual < opts.tol) {
        return Err(Error::NoConvergence { residual: run.residual, iterations: run.iterations });
    }

    let imax = run
        .u
        .iter()
        .enumerate()
        .fold((0, 0.0), |a, (i, &v)| if v.abs() > a.1 { (i, v.abs()) } else { a })
        .0;
    if run.u[imax] < 0.0 {
        run.u.iter_mut().for_each(|v| *v = -*v);
    }
    let state = GridFunction { grid: *grid, values: run.u };
    let (left, right) = fit_decay_rates(&state);
    let decay_rate_fit = match (left, right) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let result = GroundStateResult {
        center_of_mass: state.center_of_mass(),
        state,
        energy_c: run.energy,
        nehari_scale_s: run.scale,
        scale_history: run.history,
        residual: run.residual,
        iterations: run.iterations,
        converged: true,
        d_plus: None,
        d_minus: None,
        decay_rate_fit,
        decay_rate_left: left,
        decay_rate_right: right,
        seed_center,
        warnings,
    };
    let mut result = result;
    if let Medium::Periodic(pm) = m {
        let tails = bloch_modes(&pm.v, params.lambda, &BlochOptions::default())
            .and_then(|bd| d_coefficients(&result.state, &bd, &pm.gamma, params));
        if let Ok((dp, dm)) = tails {
            result.d_plus = Some(dp);
            result.d_minus = Some(dm);
        }
    }
    if !result.is_positive() {
        result.warnings.push("state is not strictly positive at all interior nodes".into());
    }
    Ok(result)
}
