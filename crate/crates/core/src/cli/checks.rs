use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::problem::ProbeSampler;
use crate::scheme::diagnostics::check_bookkeeping;
use crate::scheme::{
    check_a3, check_apriori, check_discrete_evi, check_evi_integral, check_r_integral, verify_devi,
    A3Constants, ChiMode, Component, SchemeError, SplitProblem, TimeSamples, TolerancePolicy,
    TrajectoryRecord,
};
use crate::wass1d::{
    check_compatibility, EntropyKind, PotentialSpec, QuantileDensity, SolverSettings,
};

/// Outcome of one family of inequalities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyResult {
    pub name: String,
    pub pass: bool,
    /// Largest residual `lhs − rhs` found.
    pub worst: f64,
    pub tolerance: f64,
}

impl FamilyResult {
    fn new(name: &str, pass: bool, worst: f64, tolerance: f64) -> Self {
        FamilyResult {
            name: name.to_string(),
            pass,
            worst,
            tolerance,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {:<16} worst residual {:>12.4e}  tolerance {:.4e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.tolerance
        )
    }
}

/// Checks that apply to any metric space.
pub fn generic_checks<P: Clone>(
    traj: &TrajectoryRecord<P>,
    problem: &SplitProblem<P>,
    sampler: &dyn ProbeSampler<P>,
    probes: usize,
    rng: &mut ChaCha8Rng,
    policy: &TolerancePolicy,
) -> Result<Vec<FamilyResult>, SchemeError> {
    let mut out = Vec::new();

    let book = check_bookkeeping(traj);
    out.push(FamilyResult::new(
        "bookkeeping",
        book.holds(),
        book.worst(),
        book.tolerance,
    ));

    let ws: Vec<P> = (0..probes).map(|_| sampler.domain_point(rng)).collect();
    let (mut pass, mut worst, mut tol) = (true, f64::NEG_INFINITY, 0.0f64);
    for w in &ws {
        let r = check_discrete_evi(traj, problem, w, policy)?;
        pass &= r.holds();
        worst = worst.max(r.worst());
        tol = tol.max(r.tolerance);
    }
    out.push(FamilyResult::new("discrete-evi", pass, worst, tol));

    let (mut pass, mut worst, mut tol) = (true, f64::NEG_INFINITY, 0.0f64);
    for w in &ws {
        let r = check_apriori(traj, problem, w, policy)?;
        pass &= r.holds();
        worst = worst.max(r.worst());
        tol = tol.max(r.tolerance);
    }
    out.push(FamilyResult::new("a-priori", pass, worst, tol));

    let r = check_r_integral(traj, problem, policy);
    out.push(FamilyResult::new(
        "r-integral",
        r.holds(),
        r.worst(),
        r.tolerance,
    ));

    out.push(devi_family(traj, problem, sampler, probes, rng, policy)?);

    if traj.discretisation().is_uniform() && traj.len() >= 3 {
        out.push(limit_evi_family(
            traj, problem, sampler, probes, rng, policy,
        )?);
    }
    Ok(out)
}

/// Variational characterisation of both resolvents at a sample of steps.
fn devi_family<P: Clone>(
    traj: &TrajectoryRecord<P>,
    problem: &SplitProblem<P>,
    sampler: &dyn ProbeSampler<P>,
    probes: usize,
    rng: &mut ChaCha8Rng,
    policy: &TolerancePolicy,
) -> Result<FamilyResult, SchemeError> {
    let n = traj.len();
    let disc = traj.discretisation();
    let mut steps: Vec<usize> = sample(rng, n, n.min(8))
        .into_iter()
        .map(|k| k + 1)
        .collect();
    steps.sort_unstable();
    let base = policy.for_trajectory(traj);
    let (mut pass, mut worst, mut tol_max) = (true, f64::NEG_INFINITY, 0.0f64);
    for k in steps {
        let s = traj.step(k);
        let h = disc.step(k);
        for (which, x, y) in [
            (Component::First, traj.point(k - 1), &s.half),
            (Component::Second, &s.half, &s.full),
        ] {
            let mut zs: Vec<P> = (0..probes).map(|_| sampler.perturb(y, rng)).collect();
            zs.push(x.clone());
            let spread = zs
                .iter()
                .map(|z| problem.distance(y, z))
                .fold(0.0, f64::max);
            let r = verify_devi(problem, which, h, x, y, &zs)?;
            let tol = base * (1.0 + spread);
            pass &= r.worst_violation <= tol;
            worst = worst.max(r.worst_violation);
            tol_max = tol_max.max(tol);
        }
    }
    Ok(FamilyResult::new("resolvent-devi", pass, worst, tol_max))
}

/// Integral EVI along the scheme's nodes.
fn limit_evi_family<P: Clone>(
    traj: &TrajectoryRecord<P>,
    problem: &SplitProblem<P>,
    sampler: &dyn ProbeSampler<P>,
    probes: usize,
    rng: &mut ChaCha8Rng,
    policy: &TolerancePolicy,
) -> Result<FamilyResult, SchemeError> {
    let samples = TimeSamples::from_trajectory(traj, policy)?;
    let n = traj.len();
    let ys: Vec<P> = (0..probes).map(|_| sampler.domain_point(rng)).collect();
    let pairs = random_pairs(n, probes, samples.dt, rng);
    let report = check_evi_integral(&samples, problem, &ys, &pairs)?;
    let worst = report
        .entries
        .iter()
        .map(|e| e.residual)
        .fold(f64::NEG_INFINITY, f64::max);
    let tol = report
        .entries
        .iter()
        .map(|e| e.tolerance)
        .fold(0.0, f64::max);
    Ok(FamilyResult::new("limit-evi", report.holds(), worst, tol))
}

/// `count` node pairs `(a, b)` with `1 ≤ a/dt`, `b/dt ≤ n` and at least two
/// steps between them.
pub fn random_pairs(n: usize, count: usize, dt: f64, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    (0..count)
        .map(|_| {
            let ja = rng.random_range(1..=n - 2);
            let jb = rng.random_range(ja + 2..=n);
            (ja as f64 * dt, jb as f64 * dt)
        })
        .collect()
}

pub fn a3_family<P>(
    traj: &TrajectoryRecord<P>,
    problem: &SplitProblem<P>,
    mode: ChiMode,
    constants: A3Constants,
    policy: &TolerancePolicy,
) -> Result<FamilyResult, SchemeError> {
    let r = check_a3(traj, problem, mode, constants, policy)?;
    let worst = r
        .worst_step()
        .max(r.sign_residual)
        .max(r.delta_n - r.delta_bound);
    Ok(FamilyResult::new("a3", r.holds(), worst, r.tolerance))
}

/// Compatibility inequalities at the initial and final states.
pub fn compatibility_family(
    traj: &TrajectoryRecord<QuantileDensity>,
    potential: &PotentialSpec,
    kind: EntropyKind,
) -> Result<FamilyResult, crate::wass1d::WassError> {
    let settings = SolverSettings::default();
    let h = traj.discretisation().mesh();
    let (mut pass, mut worst, mut tol) = (true, f64::NEG_INFINITY, 0.0f64);
    for mu in [traj.initial(), traj.final_point()] {
        let r = check_compatibility(mu, potential, kind, h, &settings)?;
        pass &= r.holds();
        for v in &r.verdicts {
            worst = worst.max(v.lhs - v.rhs);
            tol = tol.max(v.tolerance);
        }
    }
    Ok(FamilyResult::new("compatibility", pass, worst, tol))
}
