//! Integral form of the evolution variational inequality,
//!
//! ```text
//! ½ d²(u(b), y) − ½ d²(u(a), y) ≤ (b − a) φ(y) − ∫_a^b φ(u(t)) dt,
//! ```
//!
//! checked on a curve sampled on a uniform flow-time grid.

use serde::Serialize;

use super::{flow_time, SchemeError, SplitProblem, TolerancePolicy, TrajectoryRecord};

/// A curve sampled at `t_j = t0 + j·dt` (flow time).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSamples<P> {
    pub t0: f64,
    pub dt: f64,
    pub points: Vec<P>,
    /// Bound on how far the sampled curve may be from satisfying the inequality
    /// exactly, e.g. because it comes from a time-discrete scheme. Zero for
    /// exact flows.
    pub path_error: f64,
}

impl<P: Clone> TimeSamples<P> {
    pub fn new(t0: f64, dt: f64, points: Vec<P>) -> Self {
        TimeSamples {
            t0,
            dt,
            points,
            path_error: 0.0,
        }
    }

    /// Samples `u(τ)` for `τ = t0 + j·dt`, `j = 0..=n`.
    pub fn from_fn(t0: f64, dt: f64, n: usize, u: impl Fn(f64) -> P) -> Self {
        TimeSamples::new(t0, dt, (0..=n).map(|j| u(t0 + j as f64 * dt)).collect())
    }

    /// Nodes of a uniform scheme run, placed at flow time `t^k / 2`.
    ///
    /// Between nodes the scheme obeys the inequality up to `½ ∫[R]⁺`, which is
    /// at most `½ |h| (φ(x⁰) − φ(x^n) + 2Δ_n)`; that bound (plus the solver
    /// slack of every step) becomes the path error.
    pub fn from_trajectory(
        traj: &TrajectoryRecord<P>,
        policy: &TolerancePolicy,
    ) -> Result<Self, SchemeError> {
        let disc = traj.discretisation();
        if !disc.is_uniform() {
            return Err(SchemeError::InvalidInput(
                "trajectory sampling needs a uniform discretisation".into(),
            ));
        }
        let n = traj.len();
        let points = (0..=n).map(|k| traj.point(k).clone()).collect();
        let r_bound =
            0.5 * disc.mesh() * (traj.phi(0) - traj.phi(n) + 2.0 * traj.cum_delta(n)).max(0.0);
        let solver = policy.for_trajectory(traj) * flow_time(disc.final_time());
        Ok(TimeSamples {
            t0: 0.0,
            dt: disc.step(1),
            points,
            path_error: r_bound + solver,
        })
    }
}

impl<P> TimeSamples<P> {
    pub fn end(&self) -> f64 {
        self.t0 + self.dt * (self.points.len().saturating_sub(1)) as f64
    }

    fn node_index(&self, t: f64) -> Option<usize> {
        let x = (t - self.t0) / self.dt;
        let j = x.round();
        if (x - j).abs() <= 1e-9 && j >= 0.0 && (j as usize) < self.points.len() {
            Some(j as usize)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EviEntry {
    pub a: f64,
    pub b: f64,
    pub probe: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`
    pub residual: f64,
    pub quadrature_step: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EviReport {
    pub entries: Vec<EviEntry>,
}

impl EviReport {
    pub fn worst_excess(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.residual - e.tolerance)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn holds(&self) -> bool {
        self.entries.iter().all(|e| e.residual <= e.tolerance)
    }
}

/// Checks the integral inequality for every probe `y` and interval `(a, b)`.
///
/// `a` and `b` must be sample nodes at least two grid steps apart. The
/// tolerance is `(b−a) Δt² max|f″|/12 + 2·path_error` (trapezoid error with a
/// second-difference estimate of `f = φ∘u`), scaled up by `1e-12·(1 + |terms|)`
/// for rounding.
pub fn check_evi_integral<P>(
    samples: &TimeSamples<P>,
    problem: &SplitProblem<P>,
    ys: &[P],
    pairs: &[(f64, f64)],
) -> Result<EviReport, SchemeError> {
    if samples.dt.is_nan() || samples.dt <= 0.0 || samples.points.len() < 3 {
        return Err(SchemeError::InvalidInput(
            "need at least three samples with positive spacing".into(),
        ));
    }
    let end = samples.end();
    let phis: Vec<f64> = samples
        .points
        .iter()
        .map(|p| problem.phi(p).finite())
        .collect::<Option<_>>()
        .ok_or_else(|| SchemeError::DomainViolation("sampled curve leaves D(phi)".into()))?;
    let dt = samples.dt;

    let mut entries = Vec::new();
    for &(a, b) in pairs {
        if !(a > 0.0 && a < b && b <= end * (1.0 + 1e-12)) {
            return Err(SchemeError::InvalidInput(format!(
                "need 0 < a < b ≤ {end}, got ({a}, {b})"
            )));
        }
        let (ja, jb) = match (samples.node_index(a), samples.node_index(b)) {
            (Some(ja), Some(jb)) if jb >= ja + 2 => (ja, jb),
            _ => return Err(SchemeError::GridTooCoarse { a, b }),
        };
        let f = &phis[ja..=jb];
        let integral: f64 = f.windows(2).map(|w| 0.5 * dt * (w[0] + w[1])).sum();
        let curvature = f
            .windows(3)
            .map(|w| (w[0] - 2.0 * w[1] + w[2]).abs() / (dt * dt))
            .fold(0.0, f64::max);
        let quad_err = (b - a) * dt * dt * curvature / 12.0;

        for (probe, y) in ys.iter().enumerate() {
            let phi_y = problem.phi(y).finite().ok_or_else(|| {
                SchemeError::DomainViolation(format!("probe {probe} outside D(phi)"))
            })?;
            let da = problem.distance_sq(&samples.points[ja], y);
            let db = problem.distance_sq(&samples.points[jb], y);
            let lhs = 0.5 * db - 0.5 * da;
            let rhs = (b - a) * phi_y - integral;
            let rounding = 1e-12 * (1.0 + da + db + ((b - a) * phi_y).abs() + integral.abs());
            entries.push(EviEntry {
                a,
                b,
                probe,
                lhs,
                rhs,
                residual: lhs - rhs,
                quadrature_step: dt,
                tolerance: quad_err + 2.0 * samples.path_error + rounding,
            });
        }
    }
    Ok(EviReport { entries })
}
