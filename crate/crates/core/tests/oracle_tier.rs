//! Verification of the reference solutions before anything is measured
//! against them.

mod common;

use common::*;
use trotter_split::euclidean::exact_flow;
use trotter_split::oracles::{
    barenblatt_quantiles, fine_step_reference, ou_exact, ou_quantiles, BarenblattParams, OUParams,
};
use trotter_split::scheme::{flow_time, run_scheme, Discretisation};
use trotter_split::wass1d::{
    build_wasserstein_problem, quantile_of_gaussian, w2_distance, EntropyKind, Ordering,
    PotentialSpec,
};

#[test]
fn ou_matches_moment_odes() {
    let worst = ou_vs_rk4_worst();
    assert!(worst <= 1e-8, "ou_exact vs RK4: {worst:e}");
}

#[test]
fn ou_reference_example() {
    let p = OUParams::new(1.0, 1.0, 2.0).unwrap();
    let (m, s) = ou_exact(&p, 1.0);
    let (mr, sr) = ou_moments_rk4(1.0, 1.0, 2.0, 1.0, 1e-4);
    assert!((m - (-1.0f64).exp()).abs() < 1e-15);
    assert!((s * s - (1.0 + 3.0 * (-2.0f64).exp())).abs() < 1e-14);
    assert!((m - mr).abs() < 1e-10 && (s - sr).abs() < 1e-10);
}

#[test]
fn ou_stationary_limit() {
    let p = OUParams::new(4.0, -3.0, 0.1).unwrap();
    let (m, s) = ou_exact(&p, 40.0);
    assert!(m.abs() < 1e-30);
    assert!((s - 0.5).abs() < 1e-15);
}

#[test]
fn barenblatt_solves_the_pde() {
    let worst = barenblatt_residual_worst();
    assert!(worst <= 1e-6, "interior PDE residual {worst:e}");
}

#[test]
fn barenblatt_has_unit_mass_and_consistent_quantiles() {
    let worst = barenblatt_mass_worst();
    assert!(worst <= 1e-10, "mass / CDF error {worst:e}");
}

#[test]
fn barenblatt_support_scales_like_power_k() {
    for m in [1.5, 2.0, 3.0] {
        let p = BarenblattParams::new(m, 1.0).unwrap();
        let r1 = p.support_radius(1.0);
        let r8 = p.support_radius(8.0);
        assert!((r8 / r1 - 8f64.powf(p.k())).abs() < 1e-12);
        let q = barenblatt_quantiles(&p, 8.0, 128).unwrap();
        let x = q.values();
        assert!(x[0] > -r8 && x[127] < r8);
        for i in 0..64 {
            assert_eq!(x[i], -x[127 - i]);
        }
    }
}

#[test]
fn barenblatt_rejects_early_times() {
    let p = BarenblattParams::new(2.0, 1.0).unwrap();
    assert!(barenblatt_quantiles(&p, 0.5, 32).is_err());
}

#[test]
fn fine_reference_matches_matrix_exponential() {
    let f = trotter_split::euclidean::QuadraticFunctional::isotropic(1.0, &[0.0, 0.0]).unwrap();
    let g = trotter_split::euclidean::QuadraticFunctional::new(
        nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]),
        vec_of(&[0.3, -0.2]),
        0.0,
    )
    .unwrap();
    let problem = trotter_split::euclidean::build_euclidean_problem(f.clone(), g.clone()).unwrap();
    let x0 = vec_of(&[1.0, -1.0]);
    let path = fine_step_reference(&problem, &x0, 1.0, 4096, 64).unwrap();
    let mut worst: f64 = 0.0;
    for (t, p) in path.times.iter().zip(&path.points) {
        let exact = exact_flow(&f, &g, &x0, flow_time(*t)).unwrap();
        worst = worst.max((p - exact).norm());
    }
    assert!(worst <= 1e-3, "{worst:e}");
}

#[test]
fn fine_reference_matches_ou() {
    let pot = PotentialSpec::quadratic(1.0).unwrap();
    let problem =
        build_wasserstein_problem(pot, EntropyKind::Boltzmann, Ordering::EntropyFirst).unwrap();
    let params = OUParams::new(1.0, 1.0, 2.0).unwrap();
    let x0 = quantile_of_gaussian(1.0, 2.0, 512).unwrap();
    let path = fine_step_reference(&problem, &x0, 1.0, 2048, 64).unwrap();
    let mut worst: f64 = 0.0;
    for (t, p) in path.times.iter().zip(&path.points) {
        let exact = ou_quantiles(&params, flow_time(*t), 512).unwrap();
        worst = worst.max(w2_distance(p, &exact).unwrap());
    }
    assert!(worst <= 2e-2, "{worst:e}");
}

#[test]
fn barenblatt_matches_fine_step_porous_medium() {
    // Pure Rényi flow from the profile at t0 = 1 up to PDE time 2.
    let params = BarenblattParams::new(2.0, 1.0).unwrap();
    let x0 = barenblatt_quantiles(&params, 1.0, 256).unwrap();
    let problem = build_wasserstein_problem(
        PotentialSpec::zero(),
        EntropyKind::renyi(2.0).unwrap(),
        Ordering::EntropyFirst,
    )
    .unwrap();
    let traj = run_scheme(&problem, &x0, &Discretisation::uniform(2048, 2.0).unwrap()).unwrap();
    let exact = barenblatt_quantiles(&params, 2.0, 256).unwrap();
    let err = w2_distance(traj.final_point(), &exact).unwrap();
    assert!(err <= 2e-2, "{err:e}");
}

#[test]
fn ou_scheme_run_matches_fine_reference() {
    let pot = PotentialSpec::quadratic(1.0).unwrap();
    let problem =
        build_wasserstein_problem(pot, EntropyKind::Boltzmann, Ordering::EntropyFirst).unwrap();
    let x0 = quantile_of_gaussian(1.0, 2.0, 256).unwrap();
    let traj = run_scheme(&problem, &x0, &Discretisation::uniform(64, 1.0).unwrap()).unwrap();
    let path = fine_step_reference(&problem, &x0, 1.0, 4096, 64).unwrap();
    let mut worst: f64 = 0.0;
    for (k, p) in path.points.iter().enumerate() {
        worst = worst.max(w2_distance(traj.point(k), p).unwrap());
    }
    // Same threshold as the finest step of the convergence acceptance run.
    assert!(worst <= 2e-2, "{worst:e}");
}

#[test]
fn gronwall_oracle_examples() {
    assert_eq!(gronwall_forward(1.0, &[0.5]), vec![2.0]);
    let taus = [0.1; 10];
    let oracle = gronwall_forward(1.0, &taus);
    let bound = trotter_split::scheme::gronwall_bound(1.0, &taus).unwrap();
    for (o, b) in oracle.iter().zip(&bound) {
        assert!(o <= b, "{o} > {b}");
    }
}

#[test]
fn tanh_sinh_sanity() {
    let v = tanh_sinh(|x| (1.0 - x * x).sqrt(), -1.0, 1.0, 1e-15);
    assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
}
