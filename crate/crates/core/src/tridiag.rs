//! Symmetric tridiagonal systems.

/// `LDLᵀ` factorization of a symmetric tridiagonal matrix, stored as the
/// pivots `d` and multipliers `l`. Construction fails on a nonpositive
/// pivot, so success certifies positive definiteness.
#[derive(Clone, Debug)]
pub struct SpdTridiag {
    pivots: Vec<f64>,
    mult: Vec<f64>,
}

impl SpdTridiag {
    /// `diag` has length `n`, `off` length `n − 1`.
    pub fn factor(diag: &[f64], off: &[f64]) -> Option<Self> {
        let n = diag.len();
        let mut pivots = Vec::with_capacity(n);
        let mut mult = Vec::with_capacity(n.saturating_sub(1));
        let mut prev = 0.0;
        for i in 0..n {
            let d = if i == 0 { diag[0] } else { diag[i] - off[i - 1] * off[i - 1] / prev };
            if !(d > 0.0) {
                return None;
            }
            if i + 1 < n {
                mult.push(off[i] / d);
            }
            pivots.push(d);
            prev = d;
        }
        Some(SpdTridiag { pivots, mult })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.pivots.len();
        let mut y = rhs.to_vec();
        for i in 1..n {
            y[i] -= self.mult[i - 1] * y[i - 1];
        }
        for i in 0..n {
            y[i] /= self.pivots[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            y[i] -= self.mult[i] * y[i + 1];
        }
        y
    }
}

/// Solves a general tridiagonal system by Gaussian elimination with partial
/// pivoting. `sub`/`sup` have length `n − 1`. Returns `None` if singular.
pub fn solve_general(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let mut d = diag.to_vec();
    let mut du = sup.to_vec();
    du.push(0.0);
    let mut dl = sub.to_vec();
    let mut du2 = vec![0.0; n];
    let mut b = rhs.to_vec();
    for i in 0..n - 1 {
        if dl[i].abs() > d[i].abs() {
            // swap rows i and i+1
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - fact * tmp;
            dl[i] = fact;
            du2[i] = du[i + 1];
            du[i + 1] = -fact * du[i + 1];
            du[i] = tmp;
            b.swap(i, i + 1);
            b[i + 1] -= fact * b[i];
        } else {
            if d[i] == 0.0 {
                return None;
            }
            let fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
        }
    }
    if d[n - 1] == 0.0 {
        return None;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = b[n - 1] / d[n - 1];
    if n >= 2 {
        x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
