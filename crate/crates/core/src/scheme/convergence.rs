//! Convergence of the scheme under mesh refinement.

use rayon::prelude::*;
use serde::Serialize;

use super::interpolants::overline_index;
use super::{flow_time, run_scheme, Discretisation, SchemeError, SplitProblem};

/// A curve sampled at given discretisation-clock times.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath<P> {
    pub times: Vec<f64>,
    pub points: Vec<P>,
}

/// What the study measures errors against.
pub enum Reference<'a, P> {
    /// The run with the largest step count.
    Finest,
    /// A closed-form flow, given as a function of *flow time*.
    Oracle(&'a (dyn Fn(f64) -> P + Sync)),
    /// A precomputed path (typically a much finer run).
    Sampled(&'a SampledPath<P>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub mesh: f64,
    pub sup_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log sup_error` against `log mesh`.
    pub slope: f64,
}

impl ConvergenceTable {
    /// Errors nonincreasing in `n`, allowing each to exceed its predecessor by
    /// the relative `slack`.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].sup_error <= (1.0 + slack) * w[0].sup_error)
    }

    pub fn error_for(&self, n: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.n == n).map(|r| r.sup_error)
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Runs the scheme with `n` uniform steps on `[0, total_time]` for each `n` in
/// `step_counts` and measures `sup_t d(x̄_n(t), reference(t))`.
///
/// The supremum is taken over a grid four times finer than the finest run, so
/// that every run is also probed between its nodes (or over the sample times of
/// a [`Reference::Sampled`] path). Closed-form references
/// are evaluated at flow time `t/2`.
pub fn trotter_convergence_study<P>(
    problem: &SplitProblem<P>,
    x0: &P,
    total_time: f64,
    step_counts: &[usize],
    reference: Reference<'_, P>,
) -> Result<ConvergenceTable, SchemeError>
where
    P: Clone + Send + Sync,
{
    if step_counts.len() < 2 {
        return Err(SchemeError::InvalidInput(
            "need at least two step counts".into(),
        ));
    }
    if step_counts.windows(2).any(|w| w[1] <= w[0]) || step_counts[0] == 0 {
        return Err(SchemeError::InvalidInput(
            "step counts must be positive and increasing".into(),
        ));
    }
    let n_max = *step_counts.last().unwrap();

    let runs: Vec<_> = step_counts
        .par_iter()
        .map(|&n| {
            let disc = Discretisation::uniform(n, total_time)?;
            run_scheme(problem, x0, &disc)
        })
        .collect::<Result<_, _>>()?;

    let grid: Vec<f64> = match &reference {
        Reference::Sampled(path) => path.times.clone(),
        _ => (0..=4 * n_max)
            .map(|j| total_time * j as f64 / (4 * n_max) as f64)
            .collect(),
    };
    let reference_points: Vec<P> = match reference {
        Reference::Finest => {
            let finest = runs.last().unwrap();
            grid.iter()
                .map(|&t| {
                    Ok(finest
                        .point(overline_index(finest.discretisation(), t)?)
                        .clone())
                })
                .collect::<Result<_, SchemeError>>()?
        }
        Reference::Oracle(f) => grid.iter().map(|&t| f(flow_time(t))).collect(),
        Reference::Sampled(path) => path.points.clone(),
    };
    let compared = match reference {
        Reference::Finest => &runs[..runs.len() - 1],
        _ => &runs[..],
    };

    let rows: Vec<ConvergenceRow> = compared
        .par_iter()
        .map(|traj| {
            let disc = traj.discretisation();
            let mut sup: f64 = 0.0;
            for (t, r) in grid.iter().zip(&reference_points) {
                let k = overline_index(disc, t.min(disc.final_time()))?;
                sup = sup.max(problem.distance(traj.point(k), r));
            }
            Ok(ConvergenceRow {
                n: traj.len(),
                mesh: disc.mesh(),
                sup_error: sup,
            })
        })
        .collect::<Result<_, SchemeError>>()?;

    let slope = if rows.len() >= 2 && rows.iter().all(|r| r.sup_error > 0.0) {
        let lx: Vec<f64> = rows.iter().map(|r| r.mesh.ln()).collect();
        let ly: Vec<f64> = rows.iter().map(|r| r.sup_error.ln()).collect();
        fit_slope(&lx, &ly)
    } else {
        f64::NAN
    };
    Ok(ConvergenceTable { rows, slope })
}
