//! Floquet–Bloch analysis of the Hill operator `−d²/dx² + V(x) − λ` below
//! the bottom of its spectrum.
//!
//! The fundamental system of `−u'' + (V − λ)u = 0` is propagated over one
//! period with fixed-step classical RK4. Below the spectrum the monodromy
//! matrix has real multipliers `e^{±κ}` and the Bloch modes are
//! `u₊ = p₊ e^{−κx}` (decaying at `+∞`) and `u₋ = p₋ e^{κx}` (decaying at
//! `−∞`) with positive 1-periodic `p±`, normalized to `max p± = 1`.
//!
//! Each mode is integrated in the direction in which it grows: `u₋` forward
//! from `x = 0`, `u₊` backward from `x = 1`. This keeps the subdominant
//! solution from contaminating either mode when `κ` is large.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::media::FunctionDescriptor;
use crate::quadrature::{cumulative_fourth_order, periodic_hermite};

/// Integrator resolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct BlochOptions {
    /// RK4 steps per period (a floor; raised for large `|V − λ|`).
    pub steps: usize,
    /// Uniform closed sample grid on `[0, 1]` for `p±`.
    pub samples: usize,
}

impl Default for BlochOptions {
    fn default() -> Self {
        BlochOptions { steps: 4096, samples: 1025 }
    }
}

impl BlochOptions {
    /// Steps actually used for the mode integration: at least `steps`, at
    /// least `400·sqrt(‖V‖∞ + |λ|)`, and a multiple of the cell count.
    pub fn effective_steps(&self, v: &FunctionDescriptor, lambda: f64) -> usize {
        let cells = self.samples.max(2) - 1;
        let stiff = (400.0 * (v.abs_bound() + lambda.abs()).sqrt()).ceil() as usize;
        let want = self.steps.max(stiff).max(cells);
        want.div_ceil(cells) * cells
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonodromyMatrix {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
    pub lambda: f64,
}

impl MonodromyMatrix {
    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }
}

type State = [f64; 2];

/// Jumps closer than this to a step end are handled by the one-sided limits.
const JUMP_EPS: f64 = 1e-12;

/// One RK4 step for the pair of states sharing the coefficient evaluations.
#[inline]
fn rk4_step(states: &mut [State], q0: f64, qm: f64, q1: f64, h: f64) {
    for y in states.iter_mut() {
        let (u, w) = (y[0], y[1]);
        let k1 = [w, q0 * u];
        let k2 = [w + 0.5 * h * k1[1], qm * (u + 0.5 * h * k1[0])];
        let k3 = [w + 0.5 * h * k2[1], qm * (u + 0.5 * h * k2[0])];
        let k4 = [w + h * k3[1], q1 * (u + h * k3[0])];
        y[0] = u + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        y[1] = w + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    }
}

/// Propagates `states` from `x0` by `steps` steps of size `h` (negative for
/// backward integration), calling `record` every `stride` steps.
///
/// For piecewise media a step containing a jump is split there, and each
/// piece uses the one-sided limits at its ends, so the scheme keeps its
/// order instead of dropping to first order at the discontinuities.
fn propagate(
    v: &FunctionDescriptor,
    lambda: f64,
    x0: f64,
    h: f64,
    steps: usize,
    states: &mut [State],
    stride: usize,
    mut record: impl FnMut(usize, &[State]),
) {
    let q = |x: f64| v.eval(x) - lambda;
    record(0, states);
    if v.is_piecewise() {
        let breaks = v.breakpoints();
        let mut cuts = Vec::new();
        for s in 0..steps {
            let (a, b) = (x0 + s as f64 * h, x0 + (s + 1) as f64 * h);
            let (lo, hi) = if h > 0.0 { (a, b) } else { (b, a) };
            cuts.clear();
            cuts.push(a);
            for &c in &breaks {
                let k = c + (lo - c).floor() + 1.0;
                if k - lo > JUMP_EPS && hi - k > JUMP_EPS {
                    cuts.push(k);
                }
            }
            if h < 0.0 {
                cuts[1..].sort_by(|x, y| y.total_cmp(x));
            } else {
                cuts[1..].sort_by(f64::total_cmp);
            }
            cuts.push(b);
            for w in cuts.windows(2) {
                let (l0, r0) = v.one_sided(w[0]);
                let (l1, r1) = v.one_sided(w[1]);
                let (qa, qb) = if h > 0.0 { (r0, l1) } else { (l0, r1) };
                rk4_step(states, qa - lambda, q(0.5 * (w[0] + w[1])), qb - lambda, w[1] - w[0]);
            }
            if (s + 1) % stride == 0 {
                record((s + 1) / stride, states);
            }
        }
        return;
    }
    let mut q_start = q(x0);
    for s in 0..steps {
        let x = x0 + s as f64 * h;
        let qm = q(x + 0.5 * h);
        let q_end = q(x0 + (s + 1) as f64 * h);
        rk4_step(states, q_start, qm, q_end, h);
        q_start = q_end;
        if (s + 1) % stride == 0 {
            record((s + 1) / stride, states);
        }
    }
}

/// Fundamental matrix over one period, columns started from `(1,0)` and `(0,1)`.
pub fn monodromy(v: &FunctionDescriptor, lambda: f64, steps: usize) -> Result<MonodromyMatrix> {
    let steps = steps.max(1);
    let mut states = [[1.0, 0.0], [0.0, 1.0]];
    propagate(v, lambda, 0.0, 1.0 / steps as f64, steps, &mut states, steps, |_, _| {});
    let m = MonodromyMatrix {
        m11: states[0][0],
        m21: states[0][1],
        m12: states[1][0],
        m22: states[1][1],
        lambda,
    };
    if [m.m11, m.m12, m.m21, m.m22].iter().all(|x| x.is_finite()) {
        Ok(m)
    } else {
        Err(Error::IntegrationFailure { lambda })
    }
}

/// `Δ(λ)`, the trace of the monodromy matrix.
pub fn discriminant(v: &FunctionDescriptor, lambda: f64, steps: usize) -> Result<f64> {
    monodromy(v, lambda, steps).map(|m| m.trace())
}

/// Bottom of the spectrum: the smallest `λ` with `Δ(λ) = 2`.
pub fn spectrum_min(v: &FunctionDescriptor, opts: &BlochOptions) -> Result<f64> {
    const SCAN: usize = 400;
    let norm = v.abs_bound();
    let (lo, hi) = (-norm - 10.0, norm + 10.0);
    let g = |lam: f64| discriminant(v, lam, opts.steps).map(|d| d - 2.0);
    if g(lo)? <= 0.0 {
        return Err(Error::BracketFailure { lo, hi });
    }
    let dl = (hi - lo) / SCAN as f64;
    let mut a = lo;
    let mut b = None;
    for i in 1..=SCAN {
        let lam = lo + i as f64 * dl;
        if g(lam)? <= 0.0 {
            b = Some(lam);
            break;
        }
        a = lam;
    }
    let mut b = b.ok_or(Error::BracketFailure { lo, hi })?;
    while b - a > 1e-10 {
        let mid = 0.5 * (a + b);
        if g(mid)? > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Gap-spectral data of the Hill operator at one `λ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlochData {
    pub lambda: f64,
    /// Decay exponent per unit length (period 1).
    pub kappa: f64,
    pub discriminant: f64,
    /// Wronskian `u₊u₋' − u₊'u₋` of the normalized modes.
    pub omega: f64,
    /// `p₊` on the closed uniform grid over `[0, 1]`.
    pub p_plus: Vec<f64>,
    pub p_minus: Vec<f64>,
    #[serde(skip)]
    pub dp_plus: Vec<f64>,
    #[serde(skip)]
    pub dp_minus: Vec<f64>,
    /// `e^{−κ}`, the multiplier of `u₊`.
    pub multiplier_plus: f64,
    /// `e^{κ}`, the multiplier of `u₋`.
    pub multiplier_minus: f64,
    /// RK4 steps per period used for the modes.
    pub steps: usize,
}

impl BlochData {
    pub fn samples(&self) -> usize {
        self.p_plus.len()
    }

    /// Sample abscissae `j/(n−1)`.
    pub fn sample_points(&self) -> Vec<f64> {
        let n = self.samples();
        (0..n).map(|j| j as f64 / (n - 1) as f64).collect()
    }

    pub fn p_plus_at(&self, x: f64) -> f64 {
        periodic_hermite(&self.p_plus, &self.dp_plus, x)
    }

    pub fn p_minus_at(&self, x: f64) -> f64 {
        periodic_hermite(&self.p_minus, &self.dp_minus, x)
    }

    /// `u₊(x) = p₊(x) e^{−κx}`.
    pub fn u_plus(&self, x: f64) -> f64 {
        self.p_plus_at(x) * (-self.kappa * x).exp()
    }

    /// `u₋(x) = p₋(x) e^{κx}`.
    pub fn u_minus(&self, x: f64) -> f64 {
        self.p_minus_at(x) * (self.kappa * x).exp()
    }

    /// Wronskian at sample `j`, computed from the periodic parts (the
    /// exponentials cancel): `p₊p₋' + 2κp₊p₋ − p₊'p₋`.
    pub fn wronskian_at(&self, j: usize) -> f64 {
        let (pp, pm) = (self.p_plus[j], self.p_minus[j]);
        pp * self.dp_minus[j] + 2.0 * self.kappa * pp * pm - self.dp_plus[j] * pm
    }

    /// Ratio `sup p / inf p` over the samples, for `p₊` and `p₋`.
    pub fn envelope_ratios(&self) -> (f64, f64) {
        let ratio = |p: &[f64]| {
            let max = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = p.iter().copied().fold(f64::INFINITY, f64::min);
            max / min
        };
        (ratio(&self.p_plus), ratio(&self.p_minus))
    }
}

fn larger_multiplier(discriminant: f64) -> f64 {
    let half = 0.5 * discriminant;
    half + ((half - 1.0) * (half + 1.0)).sqrt()
}

/// Right eigenvector of `m` for eigenvalue `mu`, unit length.
fn eigenvector(m: &MonodromyMatrix, mu: f64) -> State {
    let a = [m.m12, mu - m.m11];
    let b = [mu - m.m22, m.m21];
    let na = a[0].hypot(a[1]);
    let nb = b[0].hypot(b[1]);
    let (v, n) = if na >= nb { (a, na) } else { (b, nb) };
    [v[0] / n, v[1] / n]
}

/// Bloch modes, `κ`, `Δ` and `ω` at `lambda`.
pub fn bloch_modes(v: &FunctionDescriptor, lambda: f64, opts: &BlochOptions) -> Result<BlochData> {
    let samples = opts.samples.max(3);
    let cells = samples - 1;
    let steps = opts.effective_steps(v, lambda);
    let stride = steps / cells;
    let h = 1.0 / steps as f64;

    let m = monodromy(v, lambda, steps)?;
    let disc = m.trace();
    if !(disc > 2.0) {
        return Err(Error::LambdaInSpectrum { lambda, discriminant: disc });
    }
    let rho = larger_multiplier(disc);
    let kappa = rho.ln();

    let mut minus = vec![[0.0; 2]; samples];
    let mut state = [eigenvector(&m, rho)];
    propagate(v, lambda, 0.0, h, steps, &mut state, stride, |j, s| minus[j] = s[0]);

    let mut plus = vec![[0.0; 2]; samples];
    let mut state = [eigenvector(&m, 1.0 / rho)];
    propagate(v, lambda, 1.0, -h, steps, &mut state, stride, |j, s| plus[cells - j] = s[0]);

    let xs: Vec<f64> = (0..samples).map(|j| j as f64 / cells as f64).collect();
    let periodic_part = |modes: &[State], sign: f64| -> (Vec<f64>, Vec<f64>, f64, f64) {
        // p = u·e^{−sign·κx}, p' = (u' − sign·κu)·e^{−sign·κx}
        let mut p = Vec::with_capacity(samples);
        let mut dp = Vec::with_capacity(samples);
        for (y, &x) in modes.iter().zip(&xs) {
            let e = (-sign * kappa * x).exp();
            p.push(y[0] * e);
            dp.push((y[1] - sign * kappa * y[0]) * e);
        }
        let max_abs = p.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
        let s = if p[0] >= 0.0 { 1.0 / max_abs } else { -1.0 / max_abs };
        p.iter_mut().for_each(|x| *x *= s);
        dp.iter_mut().for_each(|x| *x *= s);
        (p, dp, s * modes[0][0], s * modes[0][1])
    };
    let (p_minus, dp_minus, um0, dum0) = periodic_part(&minus, 1.0);
    let (p_plus, dp_plus, up0, dup0) = periodic_part(&plus, -1.0);

    let all: Vec<f64> = p_minus.iter().chain(&p_plus).chain(&dp_minus).chain(&dp_plus).copied().collect();
    if !all.iter().all(|x| x.is_finite()) {
        return Err(Error::IntegrationFailure { lambda });
    }
    if p_minus.iter().chain(&p_plus).any(|&x| !(x > 0.0)) {
        return Err(Error::PositivityFailure { lambda });
    }

    Ok(BlochData {
        lambda,
        kappa,
        discriminant: disc,
        omega: up0 * dum0 - dup0 * um0,
        p_plus,
        p_minus,
        dp_plus,
        dp_minus,
        multiplier_plus: 1.0 / rho,
        multiplier_minus: rho,
        steps,
    })
}

/// Quantities whose `λ → −∞` behaviour is controlled by the decay-rate
/// asymptotics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AsymptoticDiagnostics {
    /// `κ − √|λ|`.
    pub kappa_gap: f64,
    /// `√|λ|(κ − √|λ|) − ½∫₀¹V`.
    pub scaled_gap_error: f64,
    /// `sup |p₋ − 1|` over the samples.
    pub p_minus_deviation: f64,
}

pub fn asymptotic_diagnostics(
    v: &FunctionDescriptor,
    lambda: f64,
    opts: &BlochOptions,
) -> Result<AsymptoticDiagnostics> {
    let bd = bloch_modes(v, lambda, opts)?;
    Ok(diagnostics_from(&bd, v))
}

pub fn diagnostics_from(bd: &BlochData, v: &FunctionDescriptor) -> AsymptoticDiagnostics {
    let root = bd.lambda.abs().sqrt();
    let kappa_gap = bd.kappa - root;
    AsymptoticDiagnostics {
        kappa_gap,
        scaled_gap_error: root * kappa_gap - 0.5 * v.mean(),
        p_minus_deviation: bd.p_minus.iter().map(|p| (p - 1.0).abs()).fold(0.0, f64::max),
    }
}

/// Consistency check of `p₋` against its variation-of-constants
/// representation on `[−1, 0]`.
///
/// Writing `r = √|λ|`, `a = κ − r`, `b = κ + r` and `g = p₋V`,
///
/// ```text
/// p₋(x) = ( ∫₋₁⁰ e^{as} g / (2r(e^{a} − 1)) + (1/2r)∫₋₁ˣ e^{as} g ) e^{−ax}
///       + ( −∫₋₁⁰ e^{bs} g / (2r(e^{b} − 1)) − (1/2r)∫₋₁ˣ e^{bs} g ) e^{−bx}
/// ```
///
/// The sampled `p₋` is substituted on the right, the integrals are
/// evaluated with a fourth-order cumulative rule, and the sup-norm mismatch
/// is returned together with the normalization defect `|max p₋ − 1|`
/// (the representation is linear, so it cannot see a global rescaling).
pub fn verify_p_representation(bd: &BlochData, v: &FunctionDescriptor) -> Result<f64> {
    if !(bd.lambda < 0.0) {
        return Err(Error::InvalidParams(format!(
            "the p₋ representation needs lambda < 0, got {}",
            bd.lambda
        )));
    }
    let n = bd.samples();
    let cells = (n - 1) as f64;
    let h = 1.0 / cells;
    // p₋ is 1-periodic, so sample j also sits at s_j = −1 + j h.
    let s: Vec<f64> = (0..n).map(|j| -1.0 + j as f64 * h).collect();
    let r = bd.lambda.abs().sqrt();
    let a = bd.kappa - r;
    let b = bd.kappa + r;
    let g: Vec<f64> = s.iter().zip(&bd.p_minus).map(|(&x, &p)| p * v.eval(x)).collect();
    let ga: Vec<f64> = s.iter().zip(&g).map(|(&x, &gi)| (a * x).exp() * gi).collect();
    let gb: Vec<f64> = s.iter().zip(&g).map(|(&x, &gi)| (b * x).exp() * gi).collect();
    let ca = cumulative_fourth_order(&ga, h);
    let cb = cumulative_fourth_order(&gb, h);
    let (ia, ib) = (ca[n - 1], cb[n - 1]);
    let two_r = 2.0 * r;
    // (e^{a} − 1) without cancellation for small a
    let alpha = ia / (two_r * a.exp_m1());
    let beta = -ib / (two_r * b.exp_m1());
    let mut mismatch: f64 = 0.0;
    for j in 0..n {
        let x = s[j];
        let rhs = (alpha + ca[j] / two_r) * (-a * x).exp() + (beta - cb[j] / two_r) * (-b * x).exp();
        mismatch = mismatch.max((rhs - bd.p_minus[j]).abs());
    }
    let max_p = bd.p_minus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(mismatch.max((max_p - 1.0).abs()))
}
