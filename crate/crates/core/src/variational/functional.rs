//! Discrete energy `J`, Nehari functional `G` and the Nehari projection.
//!
//! With nodes `x_i = ih`, `q = V − λ` and homogeneous Dirichlet ends,
//!
//! ```text
//! |||u|||² = Σ (u_{i+1} − u_i)²/h + h Σ q_i u_i²
//! B(u)     = h Σ Γ_i |u_i|^{p+1}
//! J        = |||u|||²/2 − B/(p+1),   G = |||u|||² − B
//! ```
//!
//! The kinetic sum is the trapezoid rule applied to the central difference
//! quotient at cell midpoints; its Euler–Lagrange operator is the standard
//! three-point Laplacian. Coefficients at nodes use the mean of one-sided
//! limits, so a jump through a node (in particular the interface) is
//! weighted symmetrically.

use crate::error::{Error, Result};
use crate::media::{Medium, ProblemParams};
use crate::tridiag::SpdTridiag;

use super::grid::{Grid, GridFunction};

/// Coefficient samples for one `(medium, λ, p)` on one grid.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub grid: Grid,
    pub params: ProblemParams,
    /// `V − λ` at each node.
    pub q: Vec<f64>,
    pub gamma: Vec<f64>,
}

/// The pieces of the energy for one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyParts {
    pub kinetic: f64,
    pub potential: f64,
    pub nonlinear: f64,
}

impl EnergyParts {
    /// `|||u|||²`.
    pub fn norm_sq(&self) -> f64 {
        self.kinetic + self.potential
    }
}

impl Discretization {
    pub fn new(grid: Grid, medium: &Medium, params: ProblemParams) -> Self {
        let mut q = Vec::with_capacity(grid.nodes());
        let mut gamma = Vec::with_capacity(grid.nodes());
        for i in 0..grid.nodes() {
            let (v, g) = medium.node_values(grid.x(i));
            q.push(v - params.lambda);
            gamma.push(g);
        }
        Discretization { grid, params, q, gamma }
    }

    pub fn parts(&self, u: &[f64]) -> EnergyParts {
        let h = self.grid.h;
        let p1 = self.params.p + 1.0;
        let kinetic = u.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / h;
        let mut potential = 0.0;
        let mut nonlinear = 0.0;
        let n = u.len();
        for i in 0..n {
            let weight = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            potential += weight * self.q[i] * u[i] * u[i];
            nonlinear += weight * self.gamma[i] * u[i].abs().powf(p1);
        }
        EnergyParts { kinetic, potential: h * potential, nonlinear: h * nonlinear }
    }

    pub fn energy(&self, u: &[f64]) -> f64 {
        let e = self.parts(u);
        0.5 * e.norm_sq() - e.nonlinear / (self.params.p + 1.0)
    }

    pub fn nehari(&self, u: &[f64]) -> f64 {
        let e = self.parts(u);
        e.norm_sq() - e.nonlinear
    }

    /// Rescales `u` onto the Nehari manifold: `s^{p−1} = |||u|||² / B(u)`.
    pub fn project(&self, u: &[f64]) -> Result<(Vec<f64>, f64)> {
        let e = self.parts(u);
        if !(e.nonlinear > 0.0) {
            return Err(Error::NonprojectableState { mass: e.nonlinear });
        }
        let s = (e.norm_sq() / e.nonlinear).powf(1.0 / (self.params.p - 1.0));
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::NonprojectableState { mass: e.nonlinear });
        }
        Ok((u.iter().map(|v| s * v).collect(), s))
    }

    /// `Γ|u|^{p−1}u` at the interior nodes.
    pub fn nonlinearity(&self, u: &[f64]) -> Vec<f64> {
        let pm1 = self.params.p - 1.0;
        (1..u.len() - 1).map(|i| self.gamma[i] * u[i].abs().powf(pm1) * u[i]).collect()
    }

    /// Diagonal and off-diagonal of the interior matrix `A` with `h uᵀAu = |||u|||²`.
    pub fn linear_operator(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.grid.nodes();
        let ih2 = 1.0 / (self.grid.h * self.grid.h);
        let diag = (1..n - 1).map(|i| 2.0 * ih2 + self.q[i]).collect();
        let off = vec![-ih2; n.saturating_sub(3)];
        (diag, off)
    }

    pub fn factor_linear(&self) -> Result<SpdTridiag> {
        let (diag, off) = self.linear_operator();
        SpdTridiag::factor(&diag, &off).ok_or_else(|| {
            Error::SpectralAssumptionViolated(format!(
                "the discrete operator -d²/dx² + V - λ is not positive definite at λ = {}",
                self.params.lambda
            ))
        })
    }

    /// `A u` on the interior nodes of a full-length vector.
    pub fn apply_linear(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        let ih2 = 1.0 / (self.grid.h * self.grid.h);
        (1..n - 1)
            .map(|i| ih2 * (2.0 * u[i] - u[i - 1] - u[i + 1]) + self.q[i] * u[i])
            .collect()
    }

    /// Relative residual `‖u − A⁻¹f(u)‖_A / ‖u‖_A` of `Au = f(u)`, the
    /// quantity the solver drives below its tolerance.
    pub fn residual(&self, u: &[f64]) -> Result<f64> {
        let f = self.nonlinearity(u);
        let w = self.factor_linear()?.solve(&f);
        let au = self.apply_linear(u);
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..au.len() {
            num += (u[i + 1] - w[i]) * (au[i] - f[i]);
            den += u[i + 1] * au[i];
        }
        Ok(if den > 0.0 { (num.max(0.0) / den).sqrt() } else { f64::INFINITY })
    }

    /// `L²` representative of `J'(u)`: `dJ[φ] = h Σ g_i φ_i`. Zero at the ends.
    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let au = self.apply_linear(u);
        let f = self.nonlinearity(u);
        let mut g = vec![0.0; u.len()];
        for i in 0..au.len() {
            g[i + 1] = au[i] - f[i];
        }
        g
    }
}

/// Discrete `J[u] = ∫ ½(u'² + (V−λ)u²) − Γ|u|^{p+1}/(p+1)`.
pub fn j_eval(u: &GridFunction, m: &Medium, params: ProblemParams) -> f64 {
    Discretization::new(u.grid, m, params).energy(&u.values)
}

/// Discrete `G[u] = ∫ u'² + (V−λ)u² − Γ|u|^{p+1}`.
pub fn g_eval(u: &GridFunction, m: &Medium, params: ProblemParams) -> f64 {
    Discretization::new(u.grid, m, params).nehari(&u.values)
}

/// Discrete `|||u|||² = ∫ u'² + (V−λ)u²`.
pub fn norm_sq(u: &GridFunction, m: &Medium, params: ProblemParams) -> f64 {
    Discretization::new(u.grid, m, params).parts(&u.values).norm_sq()
}

/// Returns `(s·u, s)` with `G[s·u] = 0`.
pub fn nehari_project(
    u: &GridFunction,
    m: &Medium,
    params: ProblemParams,
) -> Result<(GridFunction, f64)> {
    let (values, s) = Discretization::new(u.grid, m, params).project(&u.values)?;
    Ok((GridFunction { grid: u.grid, values }, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::PeriodicMedium;

    fn unit() -> (Medium, ProblemParams, Grid) {
        (
            PeriodicMedium::constant(1.0, 1.0).unwrap().into(),
            ProblemParams::new(3.0, 0.0).unwrap(),
            Grid::new(20.0, 0.01).unwrap(),
        )
    }

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    #[test]
    fn zero_state_has_zero_energy() {
        let (m, p, g) = unit();
        let z = GridFunction::zeros(g);
        assert_eq!(j_eval(&z, &m, p), 0.0);
        assert_eq!(g_eval(&z, &m, p), 0.0);
    }

    #[test]
    fn sech_integrals() {
        let (m, p, g) = unit();
        let w = GridFunction::from_fn(g, |x| 2f64.sqrt() * sech(x));
        assert!((j_eval(&w, &m, p) - 4.0 / 3.0).abs() < 1e-4);
        let u = GridFunction::from_fn(g, sech);
        assert!((g_eval(&u, &m, p) - 4.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn doubling_gamma_rescales_energy() {
        let (_, p, g) = unit();
        let m2: Medium = PeriodicMedium::constant(1.0, 2.0).unwrap().into();
        let w = GridFunction::from_fn(g, |x| 2f64.sqrt() * sech(x) / 2f64.sqrt());
        assert!((j_eval(&w, &m2, p) - 2.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn projection_of_sech() {
        let (m, p, g) = unit();
        let u = GridFunction::from_fn(g, sech);
        let (w, s) = nehari_project(&u, &m, p).unwrap();
        assert!((s - 2f64.sqrt()).abs() < 1e-4);
        assert!(g_eval(&w, &m, p).abs() < 1e-10 * norm_sq(&w, &m, p));
        let (_, s2) = nehari_project(&w, &m, p).unwrap();
        assert!((s2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_gamma_is_not_projectable() {
        let (_, p, g) = unit();
        let m: Medium = PeriodicMedium {
            v: crate::media::FunctionDescriptor::constant(1.0),
            gamma: crate::media::FunctionDescriptor::constant(-1.0),
        }
        .into();
        let u = GridFunction::from_fn(g, sech);
        assert!(matches!(nehari_project(&u, &m, p), Err(Error::NonprojectableState { .. })));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (m, p, g) = unit();
        let g = Grid::new(g.half_width, 0.05).unwrap();
        let d = Discretization::new(g, &m, p);
        let u = GridFunction::from_fn(g, |x| 1.3 * sech(x - 0.2)).values;
        let grad = d.gradient(&u);
        for k in 1..=5 {
            let phi = GridFunction::from_fn(g, |x| (k as f64 * x).sin() * (-0.1 * x * x).exp()).values;
            let eps = 1e-5;
            let plus: Vec<f64> = u.iter().zip(&phi).map(|(a, b)| a + eps * b).collect();
            let minus: Vec<f64> = u.iter().zip(&phi).map(|(a, b)| a - eps * b).collect();
            let fd = (d.energy(&plus) - d.energy(&minus)) / (2.0 * eps);
            let an: f64 = g.h * grad.iter().zip(&phi).map(|(a, b)| a * b).sum::<f64>();
            assert!(((fd - an) / an).abs() < 1e-6, "direction {k}: {fd} vs {an}");
        }
    }
}
