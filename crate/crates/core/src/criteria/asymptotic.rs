//! Criteria built from Bloch-mode integrals and their `λ → −∞` limits.

use crate::bloch::{bloch_modes, BlochData, BlochOptions};
use crate::error::Result;
use crate::media::FunctionDescriptor;
use crate::quadrature::piecewise_gauss;

use super::report::{CriterionReport, Orientation, Scope, Verdict};

/// Tolerance for equality of potential values at the interface.
const VALUE_TOL: f64 = 1e-12;

fn breaks_of(a: &FunctionDescriptor, b: &FunctionDescriptor) -> Vec<f64> {
    let mut v = a.breakpoints();
    v.extend(b.breakpoints());
    v
}

pub(crate) fn panel_density_for(kappa: f64) -> f64 {
    32.0_f64.max(4.0 * kappa)
}

/// `∫₋₁⁰ (V₂−V₁) p₋² e^{2κx}` with the modes of `V₁` in `bd`.
pub fn forward_integral(v1: &FunctionDescriptor, v2: &FunctionDescriptor, bd: &BlochData) -> f64 {
    let k = bd.kappa;
    piecewise_gauss(-1.0, 0.0, &breaks_of(v1, v2), panel_density_for(k), |x| {
        let p = bd.p_minus_at(x);
        (v2.eval(x) - v1.eval(x)) * p * p * (2.0 * k * x).exp()
    })
}

/// `∫₀¹ (V₁−V₂) p₊² e^{−2κx}` with the modes of `V₂` in `bd`.
pub fn reverse_integral(v1: &FunctionDescriptor, v2: &FunctionDescriptor, bd: &BlochData) -> f64 {
    let k = bd.kappa;
    piecewise_gauss(0.0, 1.0, &breaks_of(v1, v2), panel_density_for(k), |x| {
        let p = bd.p_plus_at(x);
        (v1.eval(x) - v2.eval(x)) * p * p * (-2.0 * k * x).exp()
    })
}

/// Integral criterion at the given `λ`. The caller is responsible for the
/// energy ordering (`c₁ ≤ c₂` for forward, `c₂ ≤ c₁` for reverse); use
/// [`check_energy_ordering`] to record it.
pub fn bloch_integral_criterion(
    v1: &FunctionDescriptor,
    v2: &FunctionDescriptor,
    lambda: f64,
    orientation: Orientation,
    tol: f64,
) -> Result<CriterionReport> {
    let opts = BlochOptions::default();
    let (name, modes_of) = match orientation {
        Orientation::Forward => ("bloch_integral_forward", v1),
        Orientation::Reverse => ("bloch_integral_reverse", v2),
    };
    let bd = bloch_modes(modes_of, lambda, &opts)?;
    let integral = match orientation {
        Orientation::Forward => forward_integral(v1, v2, &bd),
        Orientation::Reverse => reverse_integral(v1, v2, &bd),
    };
    let mut r = CriterionReport::new(name);
    r.set("lambda", lambda).set("kappa", bd.kappa).set("integral", integral).set("tol", tol);
    let holds = r.condition("integral < -tol", integral < -tol, Scope::AtGivenLambda);
    let verdict = if holds { Verdict::ExistenceCertified } else { Verdict::Inconclusive };
    Ok(r.conclude(verdict, Scope::AtGivenLambda))
}

/// Records the energy ordering required by `orientation` as an assumption,
/// re-checked from computed energies with relative slack `tol`.
pub fn check_energy_ordering(
    report: CriterionReport,
    orientation: Orientation,
    c1: f64,
    c2: f64,
    tol: f64,
) -> CriterionReport {
    let mut r = report;
    let slack = tol * c1.abs().max(c2.abs()).max(1.0);
    let (label, ok) = match orientation {
        Orientation::Forward => ("c1 <= c2", c1 <= c2 + slack),
        Orientation::Reverse => ("c2 <= c1", c2 <= c1 + slack),
    };
    r.set("c1", c1).set("c2", c2);
    r.assume(label, ok);
    let (verdict, scope) = (r.verdict, r.scope);
    r.conclude(verdict, scope)
}

/// Interface-value test for `λ` sufficiently negative.
///
/// Forward compares left limits at `0` (the side `x < 0` carries the
/// weight), reverse compares right limits with the value inequality
/// swapped. The derivative tie-break `V₂'(0) > V₁'(0)` is the same in both.
pub fn boundary_condition(
    v1: &FunctionDescriptor,
    v2: &FunctionDescriptor,
    orientation: Orientation,
) -> Result<CriterionReport> {
    let pick = |f: &FunctionDescriptor| {
        let (l, r) = f.one_sided(0.0);
        match orientation {
            Orientation::Forward => l,
            Orientation::Reverse => r,
        }
    };
    let (a1, a2) = (pick(v1), pick(v2));
    let name = match orientation {
        Orientation::Forward => "boundary_condition_forward",
        Orientation::Reverse => "boundary_condition_reverse",
    };
    let mut r = CriterionReport::new(name);
    r.set("V1(0)", a1).set("V2(0)", a2);
    let (value_label, value_holds) = match orientation {
        Orientation::Forward => ("V2(0) < V1(0)", a2 < a1 - VALUE_TOL),
        Orientation::Reverse => ("V1(0) < V2(0)", a1 < a2 - VALUE_TOL),
    };
    r.condition(value_label, value_holds, Scope::Asymptotic);
    let mut fires = value_holds;
    if !value_holds && (a1 - a2).abs() <= VALUE_TOL {
        let d1 = v1.derivative(0.0)?;
        let d2 = v2.derivative(0.0)?;
        r.set("V1'(0)", d1).set("V2'(0)", d2);
        fires = r.condition("V2(0) = V1(0) and V2'(0) > V1'(0)", d2 > d1 + VALUE_TOL, Scope::Asymptotic);
    }
    if fires {
        r.note("asymptotic: requires lambda sufficiently negative");
        Ok(r.conclude(Verdict::ExistenceCertified, Scope::Asymptotic))
    } else {
        Ok(r.conclude(Verdict::Inconclusive, Scope::Asymptotic))
    }
}

/// Criteria for the dislocated interface `V₁ = V₀(·+τ)` on `x > 0`,
/// `V₂ = V₀(·−τ)` on `x < 0`. Both sides have the same energy, so either
/// orientation may be used.
pub fn dislocation_report(
    v0: &FunctionDescriptor,
    gamma0: &FunctionDescriptor,
    tau: f64,
    lambda: f64,
    tol: f64,
) -> Result<CriterionReport> {
    let v1 = v0.shifted(tau);
    let v2 = v0.shifted(-tau);
    let opts = BlochOptions::default();
    let bd1 = bloch_modes(&v1, lambda, &opts)?;
    let bd2 = bloch_modes(&v2, lambda, &opts)?;
    let cond1 = forward_integral(&v1, &v2, &bd1);
    let cond1_rev = reverse_integral(&v1, &v2, &bd2);

    let mut r = CriterionReport::new("dislocation");
    r.set("tau", tau).set("lambda", lambda).set("kappa", bd1.kappa);
    r.set("dis_cond1", cond1).set("dis_cond1_prime", cond1_rev).set("tol", tol);
    r.assume("sup Gamma0 > 0", gamma0.sup_bound() > 0.0);
    let at_lambda = r.condition("dis_cond1 < -tol", cond1 < -tol, Scope::AtGivenLambda)
        | r.condition("dis_cond1' < -tol", cond1_rev < -tol, Scope::AtGivenLambda);

    // interface values: V₁(0) = V₀(τ), V₂(0) = V₀(−τ)
    let vm = v0.eval(-tau);
    let vp = v0.eval(tau);
    r.set("V0(-tau)", vm).set("V0(tau)", vp);
    let c64 = if (vm - vp).abs() > VALUE_TOL {
        r.condition("V0(-tau) != V0(tau)", true, Scope::Asymptotic)
    } else {
        r.condition("V0(-tau) != V0(tau)", false, Scope::Asymptotic);
        match (v0.derivative(-tau), v0.derivative(tau)) {
            (Ok(dm), Ok(dp)) => {
                r.set("V0'(-tau)", dm).set("V0'(tau)", dp);
                r.condition("V0'(-tau) > V0'(tau)", dm > dp + VALUE_TOL, Scope::Asymptotic)
            }
            _ => {
                r.note("V0 not differentiable at +-tau; derivative branch skipped");
                false
            }
        }
    };

    let c65 = if tau == 0.0 {
        r.condition("small tau: V0'(0) != 0", false, Scope::Asymptotic);
        false
    } else {
        match v0.derivative(0.0) {
            Ok(d) if d.abs() > VALUE_TOL => {
                r.set("V0'(0)", d);
                r.condition("small tau: V0'(0) != 0", true, Scope::Asymptotic)
            }
            Ok(d) => {
                r.set("V0'(0)", d);
                r.condition("small tau: V0'(0) != 0", false, Scope::Asymptotic);
                match v0.second_derivative(0.0) {
                    Ok(d2) => {
                        r.set("V0''(0)", d2);
                        let s = tau.signum() * d2;
                        if s > VALUE_TOL {
                            r.note("sign(tau) V0''(0) > 0: nonexistence expected but not certified");
                        }
                        r.condition("V0'(0) = 0 and sign(tau) V0''(0) < 0", s < -VALUE_TOL, Scope::Asymptotic)
                    }
                    Err(_) => false,
                }
            }
            Err(_) => {
                r.note("V0 not differentiable at 0; small-tau test skipped");
                false
            }
        }
    };

    if at_lambda {
        Ok(r.conclude(Verdict::ExistenceCertified, Scope::AtGivenLambda))
    } else if c64 || c65 {
        r.note("asymptotic: requires lambda sufficiently negative");
        Ok(r.conclude(Verdict::ExistenceCertified, Scope::Asymptotic))
    } else {
        Ok(r.conclude(Verdict::Inconclusive, Scope::AtGivenLambda))
    }
}
