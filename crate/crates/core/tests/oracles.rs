//! The solver and the Bloch code against independent references.

use sgslab::bloch::{bloch_modes, BlochOptions};
use sgslab::media::{compose_interface, Medium, PeriodicMedium, ProblemParams};
use sgslab::oracle::{ansatz_upper_bound, closed_form_soliton, constant_bloch_reference, AnsatzFamily, Axis};
use sgslab::variational::{solve_ground_state, Discretization, Grid, SolverOptions};

fn p3(lambda: f64) -> ProblemParams {
    ProblemParams::new(3.0, lambda).unwrap()
}

fn constant(v: f64, g: f64) -> Medium {
    PeriodicMedium::constant(v, g).unwrap().into()
}

#[test]
fn soliton_energy_scaling() {
    let g = Grid::new(20.0, 0.01).unwrap();
    let (_, c) = closed_form_soliton(1.0, 1.0, 3.0, g).unwrap();
    for beta in [0.5, 2.0, 4.0] {
        let (_, cb) = closed_form_soliton(1.0, beta, 3.0, g).unwrap();
        assert!((cb - c / beta).abs() < 1e-8);
    }
    // p = 5: c ∝ Γ₀^{-1/2}
    let (_, c5) = closed_form_soliton(1.0, 1.0, 5.0, g).unwrap();
    let (_, c5b) = closed_form_soliton(1.0, 4.0, 5.0, g).unwrap();
    assert!((c5b - c5 / 2.0).abs() < 1e-8);
}

#[test]
fn soliton_discrete_residual_is_second_order() {
    let params = p3(0.0);
    let res = |h: f64| {
        let g = Grid::new(20.0, h).unwrap();
        let (w, _) = closed_form_soliton(1.0, 1.0, 3.0, g).unwrap();
        Discretization::new(g, &constant(1.0, 1.0), params).residual(&w.values).unwrap()
    };
    let (r1, r2, r4) = (res(0.01), res(0.005), res(0.0025));
    assert!(r1 < 1e-5, "h = 0.01: {r1:e}");
    assert!(r4 < 1e-6, "h = 0.0025: {r4:e}");
    assert!((r1 / r2 - 4.0).abs() < 0.2 && (r2 / r4 - 4.0).abs() < 0.2, "{r1:e} {r2:e} {r4:e}");
}

#[test]
fn solver_matches_closed_form() {
    let g = Grid::new(20.0, 0.01).unwrap();
    for (m, gamma) in [(1.0, 1.0), (2.0, 1.0), (1.0, 3.0)] {
        let (w, c) = closed_form_soliton(m, gamma, 3.0, g).unwrap();
        let r = solve_ground_state(&constant(m, gamma), p3(0.0), &g, &SolverOptions::default()).unwrap();
        assert!((r.energy_c - c).abs() < 2e-4 * c, "m {m}, Gamma {gamma}: {} vs {c}", r.energy_c);
        let shift = g.index_of(r.center_of_mass) as isize - g.center() as isize;
        let peak = w.max_abs();
        let err = (0..g.nodes())
            .filter_map(|i| {
                let j = i as isize - shift;
                (0..g.nodes() as isize).contains(&j).then(|| (r.state.values[i] - w.values[j as usize]).abs())
            })
            .fold(0.0, f64::max);
        assert!(err < 0.01 * peak, "profile error {err}");
    }
}

#[test]
fn constant_reference_agrees_with_bloch_solver() {
    for (v0, lambda) in [(1.0, -1.0), (0.0, -1.0), (2.5, 0.3), (1.0, -400.0)] {
        let r = constant_bloch_reference(v0, lambda, 1025).unwrap();
        let b = bloch_modes(&sgslab::media::FunctionDescriptor::constant(v0), lambda, &BlochOptions::default()).unwrap();
        assert!((r.kappa - b.kappa).abs() < 1e-10 * r.kappa.max(1.0), "{v0} {lambda}");
        assert!((r.omega - b.omega).abs() < 1e-8 * r.omega.max(1.0));
        assert!((r.discriminant - b.discriminant).abs() < 1e-10 * r.discriminant);
        let dev = b.p_plus.iter().chain(&b.p_minus).map(|p| (p - 1.0).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-8);
    }
}

fn family(centers: (f64, f64, usize)) -> AnsatzFamily {
    AnsatzFamily::new(
        Axis::new(0.5, 2.0, 3).unwrap(),
        Axis::new(0.4, 1.6, 4).unwrap(),
        Axis::new(centers.0, centers.1, centers.2).unwrap(),
    )
    .unwrap()
}

#[test]
fn ansatz_bounds_solver_from_above() {
    let g = Grid::new(16.0, 0.02).unwrap();
    let m: Medium = compose_interface(
        PeriodicMedium::new(
            sgslab::media::FunctionDescriptor::cosine_series(1.0, &[(1, 0.3)]).unwrap(),
            sgslab::media::FunctionDescriptor::constant(1.5),
        )
        .unwrap(),
        PeriodicMedium::constant(1.2, 1.0).unwrap(),
    )
    .unwrap()
    .into();
    let c = solve_ground_state(&m, p3(0.0), &g, &SolverOptions::default()).unwrap().energy_c;
    let fam = family((-2.0, 4.0, 4));
    let b = ansatz_upper_bound(&m, p3(0.0), &fam, g).unwrap().unwrap();
    assert!(b >= c - 1e-8, "bound {b} < c {c}");
    let fine = ansatz_upper_bound(&m, p3(0.0), &fam.refined(), g).unwrap().unwrap();
    assert!(fine <= b, "refinement increased the bound: {fine} > {b}");
    assert!(fine >= c - 1e-8);
}

#[test]
fn ansatz_drifts_toward_the_favourable_side() {
    let m: Medium = compose_interface(
        PeriodicMedium::constant(1.0, 2.0).unwrap(),
        PeriodicMedium::constant(2.0, 1.0).unwrap(),
    )
    .unwrap()
    .into();
    let g = Grid::new(20.0, 0.02).unwrap();
    let at = |x0: f64| {
        let fam = AnsatzFamily::new(
            Axis::new(1.0, 1.0, 2).unwrap(),
            Axis::new(0.5, 1.5, 11).unwrap(),
            Axis::new(x0, x0, 2).unwrap(),
        )
        .unwrap();
        ansatz_upper_bound(&m, p3(0.0), &fam, g).unwrap().unwrap()
    };
    let vals: Vec<f64> = [-2.0, 0.0, 2.0, 4.0, 6.0].into_iter().map(at).collect();
    assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
    assert!(vals[4] < 0.67);
}
