//! Quadrature and interpolation on uniform grids.

/// Composite trapezoid rule for samples spaced `h` apart.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (0.5 * (values[0] + values[n - 1]) + values[1..n - 1].iter().sum::<f64>()),
    }
}

/// Trapezoid rule of `f(x_i)` over `n` uniform nodes on `[a, b]`.
pub fn trapezoid_fn(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    assert!(n >= 2, "need at least two nodes");
    let h = (b - a) / (n - 1) as f64;
    let vals: Vec<f64> = (0..n).map(|i| f(a + i as f64 * h)).collect();
    trapezoid(&vals, h)
}

/// Running integral `F_i = ∫_{x_0}^{x_i} f` with fourth-order accuracy.
///
/// Interior intervals use the cubic through four neighbouring samples;
/// the two end intervals use the one-sided cubic.
pub fn cumulative_fourth_order(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        for i in 1..n {
            out[i] = out[i - 1] + 0.5 * h * (values[i - 1] + values[i]);
        }
        return out;
    }
    let f = values;
    for i in 0..n - 1 {
        let piece = if i == 0 {
            h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
        } else if i == n - 2 {
            h / 24.0 * (9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4])
        } else {
            h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2])
        };
        out[i + 1] = out[i] + piece;
    }
    out
}

/// Cubic Hermite interpolation of a 1-periodic function sampled on the
/// closed grid `j/(n−1)`, `j = 0..n−1`, with derivative samples.
pub fn periodic_hermite(values: &[f64], derivs: &[f64], x: f64) -> f64 {
    let n = values.len();
    debug_assert_eq!(n, derivs.len());
    let cells = n - 1;
    let h = 1.0 / cells as f64;
    let y = x.rem_euclid(1.0) * cells as f64;
    let j = (y.floor() as usize).min(cells - 1);
    let t = y - j as f64;
    let (t2, t3) = (t * t, t * t * t);
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * values[j] + h10 * h * derivs[j] + h01 * values[j + 1] + h11 * h * derivs[j + 1]
}

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Composite five-point Gauss-Legendre rule with `panels` equal panels.
pub fn gauss_legendre(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let panels = panels.max(1);
    let w = (b - a) / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * w;
        for (x, c) in GL5_NODES.iter().zip(GL5_WEIGHTS) {
            acc += c * f(mid + 0.5 * w * x);
        }
    }
    0.5 * w * acc
}

/// Gauss-Legendre over `[a, b]` split at `breaks + k` for every integer `k`,
/// so that the integrand is smooth on each piece. `density` is the number
/// of panels per unit length.
pub fn piecewise_gauss(a: f64, b: f64, breaks: &[f64], density: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut cuts = vec![a, b];
    for &s in breaks {
        let mut k = (a - s).ceil();
        while s + k < b {
            if s + k > a {
                cuts.push(s + k);
            }
            k += 1.0;
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
    cuts.windows(2)
        .map(|c| {
            let panels = ((c[1] - c[0]) * density).ceil().max(1.0) as usize;
            gauss_legendre(c[0], c[1], panels, &f)
        })
        .sum()
}
