//! Numerical checks of the discrete inequalities satisfied by the scheme.
//!
//! Every check evaluates a proved inequality `lhs ≤ rhs` and reports the
//! residual `lhs − rhs`; a residual above the tolerance is a bug (or a
//! corrupted record).

use serde::Serialize;

use super::interpolants::remainder_endpoints;
use super::{Component, SchemeError, SplitProblem, TolerancePolicy, TrajectoryRecord};
use crate::energy::Energy;

/// Moreau-Yosida functional `Φ(h, x; y) = φ^i(y) + d²(x, y)/(2h)`.
pub fn moreau_yosida_value<P>(
    problem: &SplitProblem<P>,
    which: Component,
    h: f64,
    x: &P,
    y: &P,
) -> Energy {
    match problem.energy(which, y) {
        Energy::Finite(v) => Energy::from(v + problem.distance_sq(x, y) / (2.0 * h)),
        Energy::Infinite => Energy::Infinite,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviReport {
    /// `max_z` of the violation; `≤ 0` (up to solver tolerance) certifies the
    /// inequality at the probes.
    pub worst_violation: f64,
    /// Index into the probe list where the maximum is attained.
    pub worst_probe: usize,
    /// Probes outside `D(φ^i)`, for which the inequality is void.
    pub skipped: usize,
}

/// Evaluates the variational inequality characterising `y = J_h^i x`:
///
/// ```text
/// (d²(y,z) − d²(x,z))/(2h) + d²(y,x)/(2h) + φ^i(y) − φ^i(z) ≤ 0   ∀ z ∈ D(φ^i)
/// ```
pub fn verify_devi<P>(
    problem: &SplitProblem<P>,
    which: Component,
    h: f64,
    x: &P,
    y_claimed: &P,
    probes: &[P],
) -> Result<DeviReport, SchemeError> {
    if h.is_nan() || h <= 0.0 {
        return Err(SchemeError::InvalidInput(format!(
            "step must be positive, got {h}"
        )));
    }
    if probes.is_empty() {
        return Err(SchemeError::InvalidInput("no probes supplied".into()));
    }
    let Some(phi_y) = problem.energy(which, y_claimed).finite() else {
        return Ok(DeviReport {
            worst_violation: f64::INFINITY,
            worst_probe: 0,
            skipped: 0,
        });
    };
    let dyx = problem.distance_sq(y_claimed, x);
    let mut report = DeviReport {
        worst_violation: f64::NEG_INFINITY,
        worst_probe: 0,
        skipped: 0,
    };
    for (i, z) in probes.iter().enumerate() {
        let Some(phi_z) = problem.energy(which, z).finite() else {
            report.skipped += 1;
            continue;
        };
        let v = (problem.distance_sq(y_claimed, z) - problem.distance_sq(x, z) + dyx) / (2.0 * h)
            + phi_y
            - phi_z;
        if v > report.worst_violation {
            report.worst_violation = v;
            report.worst_probe = i;
        }
    }
    Ok(report)
}

/// Per-step residuals of the discrete evolution variational inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteEviReport {
    /// `(d²(x^k,w) − d²(x^{k-1},w))/(2h_k) − [φ(w) − φ(x^k) − d²(x^k,x^{k-1})/(4h_k) + δ_k]`
    pub quad_residuals: Vec<f64>,
    /// `3 d²(x^k,x^{k-1})/(4h_k) − [φ(x^{k-1}) − φ(x^k) + δ_k]`
    pub dissipation_residuals: Vec<f64>,
    pub tolerance: f64,
}

impl DiscreteEviReport {
    pub fn worst(&self) -> f64 {
        self.quad_residuals
            .iter()
            .chain(&self.dissipation_residuals)
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn holds(&self) -> bool {
        self.worst() <= self.tolerance
    }
}

pub fn check_discrete_evi<P>(
    traj: &TrajectoryRecord<P>,
    problem: &SplitProblem<P>,
    w: &P,
    policy: &TolerancePolicy,
) -> Result<DiscreteEviReport, SchemeError> {
    let phi_w = problem.phi(w).finite().ok_or_else(|| {
        SchemeError::DomainViolation("comparison point w is outside D(phi)".into())
    })?;
    let disc = traj.discretisation();
    let mut quad = Vec::with_capacity(traj.len());
    let mut dissipation = Vec::with_capacity(traj.len());
    let mut dist_prev = problem.distance_sq(traj.point(0), w);
    for k in 1..=traj.len() {
        let h = disc.step(k);
        let step = traj.step(k);
        let dist_k = problem.distance_sq(&step.full, w);
        let lhs = (dist_k - dist_prev) / (2.0 * h);
        let rhs = phi_w - traj.phi(k) - step.step_dist_sq / (4.0 * h) + step.delta;
        quad.push(lhs - rhs);
        let lhs2 = 3.0 * step.step_dist_sq / (4.0 * h);
        let rhs2 = traj.phi(k - 1) - traj.phi(k) + step.delta;
        dissipation.push(lhs2 - rhs2);
        dist_prev = dist_k;
    }
    let tolerance = policy.for_trajectory(traj) * (1.0 + phi_w.abs());
    Ok(DiscreteEviReport {
        quad_residuals: quad,
        dissipation_residuals: dissipation,
        tolerance,
    })
}

/// One evaluated inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
}

impl Inequality {
    pub fn residual(&self) -> f64 {
        self.lhs - self.rhs
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AprioriReport {
    /// `¾ Σ d²(x^k,x^{k-1})/h_k ≤ φ(x⁰) − φ(x^n) + Δ_n`
    pub dissipation: Inequality,
    /// `φ(x^k) ≤ φ(x⁰) + Δ_k` for `k = 1, …, n`.
    pub energy_bounds: Vec<Inequality>,
    /// Intermediate estimate on `d²(x^n, w)` with `ε = 4|h|`:
    /// `¾(d²(x^n,w) − d²(x⁰,w)) ≤ ε(φ(x⁰) − φ(x^n) + Δ_n) + ¾ Σ_{k=0}^n (h_k + h_{k+1})/(2ε) d²(x^k,w)`.
    pub distance_growth: Inequality,
    pub tolerance: f64,
}

impl AprioriReport {
    pub fn worst(&self) -> f64 {
        std::iter::once(self.dissipation.residual())
            .chain(self.energy_bounds.iter().map(Inequality::residual))
            .chain(std::iter::once(self.distance_growth.residual()))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn holds(&self) -> bool {
        self.worst() <= self.tolerance
    }
}

pub fn check_apriori<P>(
    traj: &TrajectoryRecord<P>,
    problem: &SplitProblem<P>,
    w: &P,
    policy: &TolerancePolicy,
) -> Result<AprioriReport, SchemeError> {
    let disc = traj.discretisation();
    let n = traj.len();
    let weighted: f64 = (1..=n)
        .map(|k| traj.step(k).step_dist_sq / disc.step(k))
        .sum();
    let budget = traj.phi(0) - traj.phi(n) + traj.cum_delta(n);
    let dissipation = Inequality {
        lhs: 0.75 * weighted,
        rhs: budget,
    };

    let energy_bounds = (1..=n)
        .map(|k| Inequality {
            lhs: traj.phi(k),
            rhs: traj.phi(0) + traj.cum_delta(k),
        })
        .collect();

    let eps = 4.0 * disc.mesh();
    let h_ext = |k: usize| if k == 0 || k > n { 0.0 } else { disc.step(k) };
    let dists: Vec<f64> = (0..=n)
        .map(|k| problem.distance_sq(traj.point(k), w))
        .collect();
    let spread: f64 = (0..=n)
        .map(|k| (h_ext(k) + h_ext(k + 1)) / (2.0 * eps) * dists[k])
        .sum();
    let distance_growth = Inequality {
        lhs: 0.75 * (dists[n] - dists[0]),
        rhs: eps * budget + 0.75 * spread,
    };

    let tolerance = policy.for_trajectory(traj) * (1.0 + traj.len() as f64);
    Ok(AprioriReport {
        dissipation,
        energy_bounds,
        distance_growth,
        tolerance,
    })
}

/// Comparison of `∫₀^{t^k} [R(s)]⁺ ds` against `|h| (φ(x⁰) − φ(x^k) + 2Δ_k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RIntegralReport {
    /// Cumulative integrals, one per `k = 1, …, n`.
    pub integrals: Vec<f64>,
    pub bounds: Vec<f64>,
    pub tolerance: f64,
}

impl RIntegralReport {
    pub fn worst(&self) -> f64 {
        self.integrals
            .iter()
            .zip(&self.bounds)
            .map(|(i, b)| i - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn holds(&self) -> bool {
        self.worst() <= self.tolerance
    }
}

/// `∫_0^L [a + (b − a) s/L]⁺ ds` for an affine function with end values `a`, `b`.
pub fn positive_part_integral(a: f64, b: f64, length: f64) -> f64 {
    match (a >= 0.0, b >= 0.0) {
        (true, true) => 0.5 * length * (a + b),
        (false, false) => 0.0,
        (true, false) => 0.5 * length * a * a / (a - b),
        (false, true) => 0.5 * length * b * b / (b - a),
    }
}

/// Integral of `[R]⁺` over cell `k`, in closed form.
pub fn r_cell_integral<P>(traj: &TrajectoryRecord<P>, k: usize) -> f64 {
    let (start, end) = remainder_endpoints(traj, k);
    positive_part_integral(start, end, 2.0 * traj.discretisation().step(k))
}

pub fn check_r_integral<P>(
    traj: &TrajectoryRecord<P>,
    _problem: &SplitProblem<P>,
    policy: &TolerancePolicy,
) -> RIntegralReport {
    let mesh = traj.discretisation().mesh();
    let mut acc = 0.0;
    let mut integrals = Vec::with_capacity(traj.len());
    let mut bounds = Vec::with_capacity(traj.len());
    for k in 1..=traj.len() {
        acc += r_cell_integral(traj, k);
        integrals.push(acc);
        bounds.push(mesh * (traj.phi(0) - traj.phi(k) + 2.0 * traj.cum_delta(k)));
    }
    let tolerance = policy.for_trajectory(traj) * (traj.discretisation().final_time() + mesh);
    RIntegralReport {
        integrals,
        bounds,
        tolerance,
    }
}

/// Which functional plays the role of `χ` in the sufficient conditions for a
/// bounded `Δ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChiMode {
    /// `φ¹(J² x) ≤ φ¹(x) + c h`
    Constant,
    /// `φ¹ ≥ 0` and `φ¹(J² x) ≤ e^{α h} φ¹(x)`
    Phi1,
    /// `φ² ≥ 0`, `φ¹(J² x) ≤ φ¹(x) + c h φ²(J² x)` and `φ²(J¹ x) ≤ e^{α h} φ²(x)`
    Phi2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct A3Constants {
    pub c: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct A3Report {
    pub mode: ChiMode,
    /// Residuals of the per-step hypotheses (both (i) and (ii) in mode `Phi2`).
    pub step_residuals: Vec<f64>,
    /// Most negative value of the functional required to be nonnegative.
    pub sign_residual: f64,
    pub delta_n: f64,
    /// Bound on `Δ_n` implied by the hypotheses.
    pub delta_bound: f64,
    pub tolerance: f64,
}

impl A3Report {
    pub fn worst_step(&self) -> f64 {
        self.step_residuals
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn holds(&self) -> bool {
        self.worst_step() <= self.tolerance
            && self.sign_residual <= self.tolerance
            && self.delta_n
                <= self.delta_bound + self.tolerance * self.step_residuals.len().max(1) as f64
    }
}

pub fn check_a3<P>(
    traj: &TrajectoryRecord<P>,
    _problem: &SplitProblem<P>,
    mode: ChiMode,
    constants: A3Constants,
    policy: &TolerancePolicy,
) -> Result<A3Report, SchemeError> {
    let A3Constants { c, alpha } = constants;
    if !(c >= 0.0 && alpha >= 0.0) {
        return Err(SchemeError::InvalidInput(format!(
            "constants must be nonnegative (c = {c}, alpha = {alpha})"
        )));
    }
    let disc = traj.discretisation();
    let total = disc.final_time();
    let n = traj.len();
    let mut residuals = Vec::new();
    let mut sign_residual = f64::NEG_INFINITY;
    let delta_bound = match mode {
        ChiMode::Constant => {
            for k in 1..=n {
                let s = traj.step(k);
                residuals.push(s.phi1_full - (s.phi1_half + c * disc.step(k)));
            }
            0.5 * c * total
        }
        ChiMode::Phi1 => {
            for k in 0..=n {
                sign_residual = sign_residual.max(-traj.phi1(k));
            }
            for k in 1..=n {
                let s = traj.step(k);
                sign_residual = sign_residual.max(-s.phi1_half);
                residuals.push(s.phi1_full - (alpha * disc.step(k)).exp() * s.phi1_half);
            }
            ((0.5 * alpha * total).exp() - 1.0) * traj.phi1(0)
        }
        ChiMode::Phi2 => {
            for k in 0..=n {
                sign_residual = sign_residual.max(-traj.phi2(k));
            }
            for k in 1..=n {
                let s = traj.step(k);
                let h = disc.step(k);
                residuals.push(s.phi1_full - (s.phi1_half + c * h * s.phi2_full));
                match s.phi2_half {
                    Energy::Finite(v) => {
                        sign_residual = sign_residual.max(-v);
                        residuals.push(v - (alpha * h).exp() * traj.phi2(k - 1));
                    }
                    Energy::Infinite => residuals.push(f64::INFINITY),
                }
            }
            // c φ²(x) ∫_0^T e^{αs} ds
            let integral = if alpha > 0.0 {
                ((alpha * total).exp() - 1.0) / alpha
            } else {
                total
            };
            c * traj.phi2(0) * integral
        }
    };
    let tolerance = policy.for_trajectory(traj);
    Ok(A3Report {
        mode,
        step_residuals: residuals,
        sign_residual,
        delta_n: traj.cum_delta(n),
        delta_bound,
        tolerance,
    })
}

/// Consistency of the recorded `δ_k`, `Δ_k` with the recorded energies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BookkeepingReport {
    /// `max_k |δ_k − [φ¹(x^k) − φ¹(x̂^k)]⁺|`
    pub delta_mismatch: f64,
    /// `max_k |Δ_k − Δ_{k-1} − δ_k|`
    pub running_sum_mismatch: f64,
    /// `max_k (Δ_{k-1} − Δ_k)`, positive when `Δ` decreases.
    pub monotonicity_violation: f64,
    pub tolerance: f64,
}

impl BookkeepingReport {
    pub fn worst(&self) -> f64 {
        self.delta_mismatch
            .max(self.running_sum_mismatch)
            .max(self.monotonicity_violation)
    }

    pub fn holds(&self) -> bool {
        self.worst() <= self.tolerance
    }
}

pub fn check_bookkeeping<P>(traj: &TrajectoryRecord<P>) -> BookkeepingReport {
    let mut report = BookkeepingReport {
        delta_mismatch: 0.0,
        running_sum_mismatch: 0.0,
        monotonicity_violation: f64::NEG_INFINITY,
        tolerance: 0.0,
    };
    let mut scale: f64 = 1.0;
    for k in 1..=traj.len() {
        let s = traj.step(k);
        let expected = (s.phi1_full - s.phi1_half).max(0.0);
        report.delta_mismatch = report.delta_mismatch.max((s.delta - expected).abs());
        if s.delta < 0.0 {
            report.delta_mismatch = report.delta_mismatch.max(-s.delta);
        }
        let prev = traj.cum_delta(k - 1);
        report.running_sum_mismatch = report
            .running_sum_mismatch
            .max((s.cum_delta - prev - s.delta).abs());
        report.monotonicity_violation = report.monotonicity_violation.max(prev - s.cum_delta);
        scale = scale.max(s.cum_delta.abs()).max(s.phi1_full.abs());
    }
    report.tolerance = 1e-12 * scale * traj.len() as f64;
    report
}
