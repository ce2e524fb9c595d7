mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

use trotter_split::oracles::fine_step_reference;
use trotter_split::scheme::{run_scheme, verify_devi, Component, Discretisation};
use trotter_split::wass1d::{
    build_wasserstein_problem, check_compatibility, check_optimality_tudorascu, entropy,
    potential_energy, quantile_of_gaussian, resolvent_entropy, resolvent_potential, w2_distance,
    EntropyKind, Ordering, PotentialSpec, QuantileDensity, SolverSettings,
};

fn uniform(a: f64, b: f64, n: usize) -> QuantileDensity {
    QuantileDensity::new(
        (0..n)
            .map(|i| a + (b - a) * (2 * i + 1) as f64 / (2 * n) as f64)
            .collect(),
    )
    .unwrap()
}

fn student(n: usize) -> QuantileDensity {
    let t = StudentsT::new(0.0, 1.0, 3.0).unwrap();
    QuantileDensity::new(
        (0..n)
            .map(|i| t.inverse_cdf((2 * i + 1) as f64 / (2 * n) as f64))
            .collect(),
    )
    .unwrap()
}

#[test]
fn w2_between_uniforms() {
    let d = w2_distance(&uniform(0.0, 1.0, 256), &uniform(0.0, 2.0, 256)).unwrap();
    assert!((d - 1.0 / 3f64.sqrt()).abs() <= 2.0 / 256.0);
}

#[test]
fn gaussian_moments_and_energies() {
    let g = quantile_of_gaussian(0.0, 1.0, 512).unwrap();
    assert!((g.second_moment() - 1.0).abs() <= 0.01);
    let v = potential_energy(&g, &PotentialSpec::quadratic(1.0).unwrap());
    assert!((v - 0.5).abs() <= 0.01);
    let h = entropy(
        &quantile_of_gaussian(0.0, 1.0, 1024).unwrap(),
        EntropyKind::Boltzmann,
    )
    .unwrap();
    let exact = -0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
    assert!((h - exact).abs() <= 0.02, "{h} vs {exact}");
    let u = entropy(&uniform(0.0, 2.0, 512), EntropyKind::Boltzmann).unwrap();
    assert!((u + 2f64.ln()).abs() < 1e-3);
}

#[test]
fn boltzmann_step_satisfies_optimality_relation() {
    let g = quantile_of_gaussian(0.0, 1.0, 256).unwrap();
    let out =
        resolvent_entropy(&g, EntropyKind::Boltzmann, 0.05, &SolverSettings::default()).unwrap();
    let r = check_optimality_tudorascu(&out.point, &g, EntropyKind::Boltzmann, 0.05).unwrap();
    assert!(r <= 1e-8, "{r:e}");
}

#[test]
fn compatibility_on_gaussian_and_heavy_tail() {
    let pot = PotentialSpec::quadratic(1.0).unwrap();
    let settings = SolverSettings::default();
    for mu in [quantile_of_gaussian(0.3, 1.2, 256).unwrap(), student(256)] {
        for m in [2.0, 3.0] {
            let r = check_compatibility(&mu, &pot, EntropyKind::renyi(m).unwrap(), 0.1, &settings)
                .unwrap();
            assert_eq!(r.verdicts.len(), 4);
            assert!(r.holds(), "{:?}", r.verdicts);
        }
    }
    // Strict slack on the Gaussian.
    let r = check_compatibility(
        &quantile_of_gaussian(0.0, 1.0, 256).unwrap(),
        &pot,
        EntropyKind::renyi(2.0).unwrap(),
        0.1,
        &settings,
    )
    .unwrap();
    assert!(
        r.verdicts.iter().all(|v| v.slack() > 0.0),
        "{:?}",
        r.verdicts
    );
}

#[test]
fn porous_medium_step_tracks_fine_reference() {
    let p = trotter_split::oracles::BarenblattParams::new(2.0, 1.0).unwrap();
    let x0 = trotter_split::oracles::barenblatt_quantiles(&p, 1.0, 128).unwrap();
    let problem = build_wasserstein_problem(
        PotentialSpec::zero(),
        EntropyKind::renyi(2.0).unwrap(),
        Ordering::EntropyFirst,
    )
    .unwrap();
    let coarse = run_scheme(&problem, &x0, &Discretisation::uniform(16, 0.5).unwrap()).unwrap();
    let fine = fine_step_reference(&problem, &x0, 0.5, 1024, 16).unwrap();
    for (k, q) in fine.points.iter().enumerate() {
        assert!(w2_distance(coarse.point(k), q).unwrap() < 1e-2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn resolvents_preserve_monotonicity(seed in any::<u64>(), h in 1e-3f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = random_mixture(&mut rng, 128);
        let settings = SolverSettings::default();
        for kind in [EntropyKind::Boltzmann, EntropyKind::renyi(2.0).unwrap(), EntropyKind::renyi(3.5).unwrap()] {
            let out = resolvent_entropy(&mu, kind, h, &settings).unwrap();
            prop_assert!(out.point.min_gap() > 0.0);
            prop_assert!(out.gradient_norm <= settings.tolerance);
        }
        for pot in [PotentialSpec::quadratic(2.0).unwrap(), PotentialSpec::log_cosh(1.5).unwrap()] {
            let (out, _) = resolvent_potential(&mu, &pot, h, &settings).unwrap();
            prop_assert!(out.min_gap() > 0.0);
        }
    }

    #[test]
    fn w2_triangle_inequality(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(4..300);
        let (a, b, c) = (random_mixture(&mut rng, n), random_mixture(&mut rng, n), random_mixture(&mut rng, n));
        let ab = w2_distance(&a, &b).unwrap();
        let bc = w2_distance(&b, &c).unwrap();
        let ac = w2_distance(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12);
        prop_assert_eq!(w2_distance(&a, &a).unwrap(), 0.0);
        prop_assert_eq!(ab, w2_distance(&b, &a).unwrap());
    }

    #[test]
    fn entropy_resolvent_devi(seed in any::<u64>(), h in 0.01f64..0.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = random_mixture(&mut rng, 128);
        let kind = if rng.random_bool(0.5) { EntropyKind::Boltzmann } else { EntropyKind::renyi(2.0).unwrap() };
        let problem = build_wasserstein_problem(PotentialSpec::zero(), kind, Ordering::EntropyFirst).unwrap();
        let settings = SolverSettings::default();
        let y = resolvent_entropy(&mu, kind, h, &settings).unwrap().point;
        let probes: Vec<QuantileDensity> = (0..20)
            .map(|_| {
                let w = random_mixture(&mut rng, 128);
                let s: f64 = 10f64.powf(rng.random_range(-3.0..0.0));
                let z = y.values().iter().zip(w.values()).map(|(a, b)| (1.0 - s) * a + s * b).collect();
                QuantileDensity::new(z).unwrap()
            })
            .collect();
        let spread = probes.iter().map(|z| w2_distance(&y, z).unwrap()).fold(0.0, f64::max);
        let r = verify_devi(&problem, Component::First, h, &mu, &y, &probes).unwrap();
        prop_assert!(r.worst_violation <= 10.0 * settings.tolerance * (1.0 + spread), "{:e}", r.worst_violation);
    }

    #[test]
    fn compatibility_on_mixtures(
        seed in any::<u64>(),
        lambda in prop::sample::select(vec![0.5, 1.0, 2.0]),
        h in prop::sample::select(vec![0.01, 0.1, 0.5]),
        m in prop::sample::select(vec![2.0, 3.0]),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = random_mixture(&mut rng, 128);
        let pot = PotentialSpec::quadratic(lambda).unwrap();
        let r = check_compatibility(&mu, &pot, EntropyKind::renyi(m).unwrap(), h, &SolverSettings::default()).unwrap();
        prop_assert!(r.holds(), "{:?}", r.verdicts);
    }
}

#[test]
fn fine_step_reference_is_deterministic() {
    let pot = PotentialSpec::log_cosh(1.0).unwrap();
    let problem =
        build_wasserstein_problem(pot, EntropyKind::Boltzmann, Ordering::PotentialFirst).unwrap();
    let x0 = quantile_of_gaussian(0.5, 1.5, 128).unwrap();
    let a = fine_step_reference(&problem, &x0, 0.5, 64, 16).unwrap();
    let b = fine_step_reference(&problem, &x0, 0.5, 64, 16).unwrap();
    assert_eq!(a, b);
    assert!(fine_step_reference(&problem, &x0, 0.5, 63, 16).is_err());
}
