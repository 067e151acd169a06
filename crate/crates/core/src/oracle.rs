//! Independent references: closed-form solitons, constant-coefficient
//! Bloch data and a brute-force upper bound on the ground-state energy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::BlochData;
use crate::error::{Error, Result};
use crate::media::{Medium, ProblemParams};
use crate::quadrature::trapezoid;
use crate::variational::{Discretization, Grid, GridFunction};

/// Refinement factor of the quadrature grid used for `c_exact`.
const FINE: usize = 10;

/// `w(x) = A sech^{2/(p−1)}(b x)` with `A = (m(p+1)/(2Γ₀))^{1/(p−1)}` and
/// `b = (p−1)√m/2`, the positive solution of `−w'' + m w = Γ₀ wᵖ`.
///
/// Returns the samples on `grid` and `c_exact = η ∫ w'² + m w²`, evaluated
/// with the analytic derivative on a ten times finer grid.
pub fn closed_form_soliton(m: f64, gamma0: f64, p: f64, grid: Grid) -> Result<(GridFunction, f64)> {
    if !(m > 0.0 && gamma0 > 0.0 && p > 1.0) {
        return Err(Error::InvalidParams(format!(
            "soliton needs m > 0, Gamma0 > 0, p > 1 (got {m}, {gamma0}, {p})"
        )));
    }
    let amp = (m * (p + 1.0) / (2.0 * gamma0)).powf(1.0 / (p - 1.0));
    let b = 0.5 * (p - 1.0) * m.sqrt();
    let e = 2.0 / (p - 1.0);
    let w = |x: f64| amp * (b * x).cosh().powf(-e);
    // w' = −A e b tanh(bx) sech^e(bx)
    let dw = |x: f64| -amp * e * b * (b * x).tanh() * (b * x).cosh().powf(-e);

    let state = GridFunction::from_fn(grid, w);
    let n = FINE * (grid.nodes() - 1) + 1;
    let hf = grid.h / FINE as f64;
    let l = grid.half_width;
    let dense: Vec<f64> = (0..n)
        .map(|i| {
            let x = -l + i as f64 * hf;
            let (a, d) = (w(x), dw(x));
            d * d + m * a * a
        })
        .collect();
    let eta = 0.5 - 1.0 / (p + 1.0);
    Ok((state, eta * trapezoid(&dense, hf)))
}

/// Bloch data of `−d²/dx² + v₀ − λ`: `κ = √(v₀−λ)`, `p± ≡ 1`, `ω = 2κ`,
/// `Δ = 2 cosh κ`.
pub fn constant_bloch_reference(v0: f64, lambda: f64, samples: usize) -> Result<BlochData> {
    let kappa2 = v0 - lambda;
    let kappa = kappa2.max(0.0).sqrt();
    let disc = 2.0 * kappa.cosh();
    if !(kappa2 > 0.0) {
        return Err(Error::LambdaInSpectrum { lambda, discriminant: disc });
    }
    let n = samples.max(3);
    Ok(BlochData {
        lambda,
        kappa,
        discriminant: disc,
        omega: 2.0 * kappa,
        p_plus: vec![1.0; n],
        p_minus: vec![1.0; n],
        dp_plus: vec![0.0; n],
        dp_minus: vec![0.0; n],
        multiplier_plus: (-kappa).exp(),
        multiplier_minus: kappa.exp(),
        steps: 0,
    })
}

/// Closed interval `[lo, hi]` sampled at `count ≥ 2` equispaced points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidParams(format!("empty range [{lo}, {hi}]")));
        }
        if count < 2 {
            return Err(Error::InvalidParams(format!("resolution {count} must be at least 2")));
        }
        Ok(Axis { lo, hi, count })
    }

    pub fn value(&self, i: usize) -> f64 {
        self.lo + (self.hi - self.lo) * i as f64 / (self.count - 1) as f64
    }

    /// Same range with `2(count−1)+1` points; contains every old point.
    pub fn refined(&self) -> Self {
        Axis { count: 2 * self.count - 1, ..*self }
    }
}

/// Trial functions `A sech^{2/(p−1)}(b(x − x₀))` over a product grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzFamily {
    pub amplitude: Axis,
    pub width: Axis,
    pub center: Axis,
}

impl AnsatzFamily {
    pub fn new(amplitude: Axis, width: Axis, center: Axis) -> Result<Self> {
        for a in [amplitude, width, center] {
            Axis::new(a.lo, a.hi, a.count)?;
        }
        if !(width.lo > 0.0) {
            return Err(Error::InvalidParams("ansatz widths must be positive".into()));
        }
        Ok(AnsatzFamily { amplitude, width, center })
    }

    pub fn len(&self) -> usize {
        self.amplitude.count * self.width.count * self.center.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(A, b, x₀)` of the `k`-th member, center varying fastest.
    pub fn member(&self, k: usize) -> (f64, f64, f64) {
        let ic = k % self.center.count;
        let iw = (k / self.center.count) % self.width.count;
        let ia = k / (self.center.count * self.width.count);
        (self.amplitude.value(ia), self.width.value(iw), self.center.value(ic))
    }

    pub fn refined(&self) -> Self {
        AnsatzFamily {
            amplitude: self.amplitude.refined(),
            width: self.width.refined(),
            center: self.center.refined(),
        }
    }
}

/// Minimum of `J` over the Nehari projections of the family members; an
/// upper bound on the discrete ground-state energy. Members that cannot be
/// projected are skipped. `None` if no member projects.
pub fn ansatz_upper_bound(
    m: &Medium,
    params: ProblemParams,
    fam: &AnsatzFamily,
    grid: Grid,
) -> Result<Option<f64>> {
    AnsatzFamily::new(fam.amplitude, fam.width, fam.center)?;
    let disc = Discretization::new(grid, m, params);
    let e = 2.0 / (params.p - 1.0);
    let best = (0..fam.len())
        .into_par_iter()
        .filter_map(|k| {
            let (a, b, x0) = fam.member(k);
            let u = GridFunction::from_fn(grid, |x| a * (b * (x - x0)).cosh().powf(-e));
            let (proj, _) = disc.project(&u.values).ok()?;
            Some((k, disc.energy(&proj)))
        })
        .min_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
    Ok(best.map(|(_, c)| c))
}
