//! Independent reference computations and random problem generators shared by
//! the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use trotter_split::euclidean::{build_euclidean_problem, EuclideanPoint, QuadraticFunctional};
use trotter_split::oracles::{barenblatt_quantiles, BarenblattParams};
use trotter_split::scheme::{Discretisation, SplitProblem, TrajectoryRecord};
use trotter_split::wass1d::{
    build_wasserstein_problem, quantile_of_mixture, EntropyKind, MixtureComponent, Ordering,
    PotentialSpec, QuantileDensity,
};

// ---------------------------------------------------------------------------
// Moment ODEs of the Ornstein-Uhlenbeck flow

/// Integrates `m' = −λm`, `v' = 2 − 2λv` with classical RK4 and returns
/// `(mean, sqrt(v))` at `t`.
pub fn ou_moments_rk4(lambda: f64, m0: f64, sigma0: f64, t: f64, dt: f64) -> (f64, f64) {
    let f = |s: [f64; 2]| [-lambda * s[0], 2.0 - 2.0 * lambda * s[1]];
    let mut s = [m0, sigma0 * sigma0];
    let steps = (t / dt).ceil() as usize;
    if steps == 0 {
        return (m0, sigma0);
    }
    let h = t / steps as f64;
    for _ in 0..steps {
        let k1 = f(s);
        let k2 = f([s[0] + 0.5 * h * k1[0], s[1] + 0.5 * h * k1[1]]);
        let k3 = f([s[0] + 0.5 * h * k2[0], s[1] + 0.5 * h * k2[1]]);
        let k4 = f([s[0] + h * k3[0], s[1] + h * k3[1]]);
        for i in 0..2 {
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    (s[0], s[1].sqrt())
}

// ---------------------------------------------------------------------------
// Barenblatt profile

/// Richardson-extrapolated central first derivative.
pub fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let c = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * c(h / 2.0) - c(h)) / 3.0
}

/// Richardson-extrapolated central second derivative.
pub fn d2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let c = |h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    (4.0 * c(h / 2.0) - c(h)) / 3.0
}

/// `|∂ρ/∂t − (ρ^m)″|` at `(t, x)`, by finite differences.
pub fn barenblatt_pde_residual(p: &BarenblattParams, t: f64, x: f64) -> f64 {
    let r = p.support_radius(t);
    let dt = 1e-3 * t;
    let dx = 1e-3 * r;
    let rho_t = d1(|s| p.density(s, x), t, dt);
    let flux = d2(|y| p.density(t, y).powf(p.m), x, dx);
    (rho_t - flux).abs()
}

/// Tanh-sinh quadrature of `f` over `[a, b]`, refined until two successive
/// levels agree to `tol`.
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let level = |h: f64| {
        let kmax = (4.5 / h).ceil() as i64;
        let mut s = 0.0;
        for k in -kmax..=kmax {
            let t = k as f64 * h;
            let u = half_pi * t.sinh();
            let x = u.tanh();
            let w = half_pi * t.cosh() / (u.cosh() * u.cosh());
            if w == 0.0 {
                continue;
            }
            s += w * f(c + r * x);
        }
        s * h * r
    };
    let mut h = 0.5;
    let mut prev = level(h);
    for _ in 0..10 {
        h *= 0.5;
        let next = level(h);
        if (next - prev).abs() <= tol {
            return next;
        }
        prev = next;
    }
    prev
}

// ---------------------------------------------------------------------------
// Discrete Gronwall

/// The extremal sequence `a_n = A + Σ_{k≤n} τ_k a_k`, solved for `a_n` step by
/// step.
pub fn gronwall_forward(a: f64, taus: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(taus.len());
    let mut acc = 0.0;
    for &tau in taus {
        let an = (a + acc) / (1.0 - tau);
        acc += tau * an;
        out.push(an);
    }
    out
}

// ---------------------------------------------------------------------------
// Remainder R_{h,x}

/// `R(t)` straight from its definition on cell `k` (where `t` lies in
/// `[t^{k−1}, t^k)`).
pub fn remainder_by_definition<P>(traj: &TrajectoryRecord<P>, k: usize, t: f64) -> f64 {
    let disc = traj.discretisation();
    let h = disc.step(k);
    let ell = (t - disc.time(k - 1)) / (2.0 * h);
    let s = traj.step(k);
    let q = s.step_dist_sq / (4.0 * h);
    (1.0 - ell) * (traj.phi(k - 1) - traj.phi(k) + s.delta - q) + ell * (s.delta - q)
}

/// Trapezoid rule for `∫[R]⁺` over cell `k` with `m` subintervals.
pub fn r_cell_trapezoid<P>(traj: &TrajectoryRecord<P>, k: usize, m: usize) -> f64 {
    let disc = traj.discretisation();
    let a = disc.time(k - 1);
    let len = 2.0 * disc.step(k);
    let dt = len / m as f64;
    // The right end is the left limit, which the definition gives at ℓ = 1.
    let vals: Vec<f64> = (0..=m)
        .map(|j| remainder_by_definition(traj, k, a + j as f64 * dt).max(0.0))
        .collect();
    vals.windows(2).map(|w| 0.5 * dt * (w[0] + w[1])).sum()
}

// ---------------------------------------------------------------------------
// Random inputs

pub fn random_psd(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> DMatrix<f64> {
    let b = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
    let a = &b * b.transpose() * (scale / dim as f64);
    // Symmetrise exactly.
    (&a + a.transpose()) * 0.5
}

pub fn random_quadratic(rng: &mut ChaCha8Rng, dim: usize) -> QuadraticFunctional {
    let scale = rng.random_range(0.1..3.0);
    let a = random_psd(rng, dim, scale);
    let b = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
    QuadraticFunctional::new(a, b, rng.random_range(-1.0..1.0)).expect("PSD by construction")
}

pub struct EuclideanCase {
    pub f1: QuadraticFunctional,
    pub f2: QuadraticFunctional,
    pub problem: SplitProblem<EuclideanPoint>,
    pub x0: EuclideanPoint,
}

pub fn random_euclidean(rng: &mut ChaCha8Rng) -> EuclideanCase {
    let dim = rng.random_range(1..=4);
    let f1 = random_quadratic(rng, dim);
    let f2 = random_quadratic(rng, dim);
    let problem = build_euclidean_problem(f1.clone(), f2.clone()).unwrap();
    let x0 = DVector::from_fn(dim, |_, _| rng.random_range(-2.0..2.0));
    EuclideanCase {
        f1,
        f2,
        problem,
        x0,
    }
}

pub fn random_schedule(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Discretisation {
    Discretisation::new((0..n).map(|_| rng.random_range(lo..hi)).collect()).unwrap()
}

/// A two- or three-component Gaussian mixture discretised with `n` cells.
pub fn random_mixture(rng: &mut ChaCha8Rng, n: usize) -> QuantileDensity {
    let k = rng.random_range(1..=3);
    let comps: Vec<MixtureComponent> = (0..k)
        .map(|_| MixtureComponent {
            weight: rng.random_range(0.2..1.0),
            mean: rng.random_range(-2.0..2.0),
            sigma: rng.random_range(0.4..1.5),
        })
        .collect();
    quantile_of_mixture(&comps, n).unwrap()
}

pub struct WassCase {
    pub label: String,
    pub problem: SplitProblem<QuantileDensity>,
    pub x0: QuantileDensity,
}

/// Fokker-Planck or porous-medium problem with a random potential, ordering
/// and initial state.
pub fn random_wass(rng: &mut ChaCha8Rng, cells: usize) -> WassCase {
    let order = if rng.random_bool(0.5) {
        Ordering::EntropyFirst
    } else {
        Ordering::PotentialFirst
    };
    let pot = match rng.random_range(0..3) {
        0 => PotentialSpec::zero(),
        1 => PotentialSpec::quadratic(rng.random_range(0.5..2.0)).unwrap(),
        _ => PotentialSpec::log_cosh(rng.random_range(0.5..2.0)).unwrap(),
    };
    let (kind, x0) = if rng.random_bool(0.5) {
        (EntropyKind::Boltzmann, random_mixture(rng, cells))
    } else {
        let m = if rng.random_bool(0.5) { 2.0 } else { 3.0 };
        let x0 = if rng.random_bool(0.5) {
            let p = BarenblattParams::new(m, rng.random_range(0.5..2.0)).unwrap();
            barenblatt_quantiles(&p, p.t0, cells).unwrap()
        } else {
            random_mixture(rng, cells)
        };
        (EntropyKind::renyi(m).unwrap(), x0)
    };
    let label = format!("{kind} / {} / {order:?}", pot.name());
    let problem = build_wasserstein_problem(pot, kind, order).unwrap();
    WassCase { label, problem, x0 }
}

pub fn vec_of(xs: &[f64]) -> EuclideanPoint {
    DVector::from_column_slice(xs)
}

// ---------------------------------------------------------------------------
// Oracle pre-verification

/// Largest `|ou_exact − RK4|` over mean and standard deviation, for 20 seeded
/// parameter sets and `t ∈ [0, 5]`.
pub fn ou_vs_rk4_worst() -> f64 {
    use rand::SeedableRng;
    use trotter_split::oracles::{ou_exact, OUParams};
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let p = OUParams::new(
            rng.random_range(0.2..3.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(0.2..3.0),
        )
        .unwrap();
        for j in 0..=20 {
            let t = 0.25 * j as f64;
            let (m, s) = ou_exact(&p, t);
            let (mr, sr) = ou_moments_rk4(p.lambda, p.m0, p.sigma0, t, 1e-3);
            worst = worst.max((m - mr).abs()).max((s - sr).abs());
        }
    }
    worst
}

/// Largest PDE residual of the Barenblatt profile over `m ∈ {1.5, 2, 3, 4}`,
/// two start times, four times each and 41 points inside 95% of the support.
pub fn barenblatt_residual_worst() -> f64 {
    let mut worst: f64 = 0.0;
    for m in [1.5, 2.0, 3.0, 4.0] {
        for t0 in [0.5, 1.0] {
            let p = BarenblattParams::new(m, t0).unwrap();
            for f in [1.0, 1.5, 2.0, 4.0] {
                let t = f * t0;
                let r = 0.95 * p.support_radius(t);
                for i in 0..=40 {
                    let x = -r + 2.0 * r * i as f64 / 40.0;
                    worst = worst.max(barenblatt_pde_residual(&p, t, x));
                }
            }
        }
    }
    worst
}

/// Largest deviation of the Barenblatt mass from one, and of the integrated
/// density up to each sampled quantile from its mass coordinate.
pub fn barenblatt_mass_worst() -> f64 {
    let mut worst: f64 = 0.0;
    for m in [1.5, 2.0, 3.0, 4.0] {
        let p = BarenblattParams::new(m, 1.0).unwrap();
        for t in [1.0, 2.5] {
            let r = p.support_radius(t);
            let mass = tanh_sinh(|x| p.density(t, x), -r, r, 1e-14);
            worst = worst.max((mass - 1.0).abs());
            let q = barenblatt_quantiles(&p, t, 64).unwrap();
            for i in [0, 7, 20, 31, 45, 63] {
                let xi = q.values()[i];
                let cdf = tanh_sinh(|x| p.density(t, x), -r, xi, 1e-14);
                worst = worst.max((cdf - q.mass_coordinate(i)).abs());
            }
        }
    }
    worst
}
