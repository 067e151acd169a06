//! Criteria phrased in terms of ground-state energies and coefficient
//! orderings.

use crate::bloch::{spectrum_min, BlochOptions};
use crate::error::{Error, Result};
use crate::media::{scaled_pair, FunctionDescriptor, InterfaceMedium, PeriodicMedium, ProblemParams};

use super::report::{CriterionReport, Scope, Verdict};

/// Relative slack for the upper bound `c ≤ min{c₁, c₂}`.
pub const UPPER_BOUND_SLACK: f64 = 1e-6;

/// Existence from the strict energy gap `c < min{c₁, c₂}`.
pub fn energy_verdict(c: f64, c1: f64, c2: f64, tol: f64) -> CriterionReport {
    let mut r = CriterionReport::new("energy_verdict");
    let cmin = c1.min(c2);
    r.set("c", c).set("c1", c1).set("c2", c2).set("min_c1_c2", cmin).set("gap", cmin - c).set("tol", tol);
    let bound_ok = c <= cmin + UPPER_BOUND_SLACK * cmin.abs().max(1.0);
    r.assume("upper bound c <= min{c1,c2}", bound_ok);
    if !bound_ok {
        r.note("numerical inconsistency: c exceeds min{c1,c2}; check grids and convergence");
    }
    let strict = r.condition("c < min{c1,c2} - tol", c < cmin - tol, Scope::AtGivenLambda);
    let verdict = if strict { Verdict::ExistenceCertified } else { Verdict::Inconclusive };
    r.conclude(verdict, Scope::AtGivenLambda)
}

fn samples(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| j as f64 / n as f64)
}

/// Nonexistence from `V₁ ≤ V₂`, `Γ₁ ≥ Γ₂` with a strict part.
///
/// A strict inequality must hold on at least two consecutive samples,
/// so that it is witnessed on a subinterval and not at an isolated point.
pub fn nonexistence_check(m: &InterfaceMedium, sample_count: usize) -> CriterionReport {
    const TOL: f64 = 1e-12;
    let n = sample_count.max(2);
    let mut r = CriterionReport::new("nonexistence_check");
    let (mut order_ok, mut max_run, mut run) = (true, 0usize, 0usize);
    let mut min_dv = f64::INFINITY;
    let mut min_dg = f64::INFINITY;
    // wrap around so a strict run crossing x = 1 is counted
    for x in samples(n).chain(samples(n).take(1)) {
        let dv = m.side2.v.eval(x) - m.side1.v.eval(x);
        let dg = m.side1.gamma.eval(x) - m.side2.gamma.eval(x);
        min_dv = min_dv.min(dv);
        min_dg = min_dg.min(dg);
        if dv < -TOL || dg < -TOL {
            order_ok = false;
        }
        if dv > TOL || dg > TOL {
            run += 1;
            max_run = max_run.max(run);
        } else {
            run = 0;
        }
    }
    r.set("min(V2-V1)", min_dv).set("min(Gamma1-Gamma2)", min_dg).set("samples", n as f64);
    r.set("longest_strict_run", max_run as f64);
    let ordered = r.condition("V1 <= V2 and Gamma1 >= Gamma2 at every sample", order_ok, Scope::AtGivenLambda);
    let strict = r.condition("strict inequality on a sample subinterval", max_run >= 2, Scope::AtGivenLambda);
    let verdict = if ordered && strict { Verdict::NonexistenceCertified } else { Verdict::Inconclusive };
    r.conclude(verdict, Scope::AtGivenLambda)
}

/// `β₀ = (c₂ / c₁(Γ≡1))^{(1−p)/2}`.
pub fn large_jump_beta0(c2: f64, c1_unit: f64, params: ProblemParams) -> Result<f64> {
    if !(c2 > 0.0 && c2.is_finite()) {
        return Err(Error::InvalidEnergy(format!("c2 = {c2} must be positive")));
    }
    if !(c1_unit > 0.0 && c1_unit.is_finite()) {
        return Err(Error::InvalidEnergy(format!("c1_unit = {c1_unit} must be positive")));
    }
    Ok((c2 / c1_unit).powf((1.0 - params.p) / 2.0))
}

/// Rigorous upper bound on `esssup(a − b)`.
pub fn sup_of_difference(a: &FunctionDescriptor, b: &FunctionDescriptor) -> f64 {
    match a.difference(b) {
        Some(d) => d.sup_bound(),
        None => a.sup_bound() - b.inf_bound(),
    }
}

/// Large jump in `Γ`: existence if `inf Γ₁ ≥ β₀` and `esssup(V₂ − V₁) < 0`.
pub fn large_jump_report(
    m: &InterfaceMedium,
    c2: f64,
    c1_unit: f64,
    params: ProblemParams,
    tol: f64,
) -> Result<CriterionReport> {
    let beta0 = large_jump_beta0(c2, c1_unit, params)?;
    let mut r = CriterionReport::new("large_jump");
    let inf_g1 = m.side1.gamma.inf_bound();
    let sup_dv = sup_of_difference(&m.side2.v, &m.side1.v);
    r.set("beta0", beta0).set("c2", c2).set("c1_unit", c1_unit);
    r.set("inf_Gamma1", inf_g1).set("esssup(V2-V1)", sup_dv);
    r.assume("inf Gamma1 > 0", inf_g1 > 0.0);
    let g = r.condition("inf Gamma1 >= beta0", inf_g1 >= beta0, Scope::AtGivenLambda);
    let v = r.condition("esssup(V2-V1) < 0", sup_dv < -tol, Scope::AtGivenLambda);
    let verdict = if g && v { Verdict::ExistenceCertified } else { Verdict::Inconclusive };
    Ok(r.conclude(verdict, Scope::AtGivenLambda))
}

/// Predicted `c₁/c₂` for `V₁ = k²V₂(k·)`, `Γ₁ = γ²Γ₂(k·)` in dimension `n`.
pub fn scaled_energy_ratio(k: f64, gamma: f64, p: f64, n: u32) -> f64 {
    (k / gamma).powf(4.0 / (p - 1.0)) * k.powf(2.0 - n as f64)
}

/// Existence for the scaled pair built from `m2`.
pub fn scaled_interface_check(
    m2: &PeriodicMedium,
    k: i64,
    gamma: f64,
    params: ProblemParams,
    n: u32,
) -> Result<CriterionReport> {
    let m1 = scaled_pair(m2, k, gamma)?;
    let (kf, p, nf) = (k as f64, params.p, n as f64);
    let mut r = CriterionReport::new("scaled_interface");
    let sup_v2 = m2.v.sup_bound();
    let inf_v2 = m2.v.inf_bound();
    let lhs_k = kf.powf((nf + 2.0 - p * (nf - 2.0)) / (p - 1.0));
    let rhs_g = gamma.powf(4.0 / (p - 1.0));
    r.set("k", kf).set("gamma", gamma).set("sup_V2", sup_v2).set("k2_inf_V2", kf * kf * inf_v2);
    r.set("k_power", lhs_k).set("gamma_power", rhs_g);
    r.set("predicted_c1_over_c2", scaled_energy_ratio(kf, gamma, p, n));
    let opts = BlochOptions::default();
    let s2 = spectrum_min(&m2.v, &opts)?;
    let s1 = spectrum_min(&m1.v, &opts)?;
    r.set("spectrum_min_side1", s1).set("spectrum_min_side2", s2);
    r.assume("lambda below the spectrum of both sides", params.lambda < s1.min(s2));
    let a = r.condition("sup V2 < k^2 inf V2", sup_v2 < kf * kf * inf_v2, Scope::AtGivenLambda);
    let b = r.condition("k^((n+2-p(n-2))/(p-1)) <= gamma^(4/(p-1))", lhs_k <= rhs_g, Scope::AtGivenLambda);
    let verdict = if a && b { Verdict::ExistenceCertified } else { Verdict::Inconclusive };
    Ok(r.conclude(verdict, Scope::AtGivenLambda))
}

/// True unless both reports certify opposite conclusions.
pub fn mutually_consistent(nonexistence: &CriterionReport, existence: &CriterionReport) -> bool {
    !(nonexistence.verdict == Verdict::NonexistenceCertified
        && existence.verdict == Verdict::ExistenceCertified)
}
