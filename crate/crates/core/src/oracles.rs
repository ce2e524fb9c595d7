//! Reference solutions: Gaussian Ornstein-Uhlenbeck evolution, the Barenblatt
//! profile of the porous medium equation, and fine-step self-convergence runs.
//!
//! Times passed to [`ou_exact`] and [`barenblatt_quantiles`] are PDE times.

use statrs::function::beta::{beta, checked_beta_reg};

use crate::scheme::interpolants::overline_index;
use crate::scheme::{run_scheme, Discretisation, SampledPath, SchemeError, SplitProblem};
use crate::wass1d::{quantile_of_gaussian, QuantileDensity, WassError};

/// Fokker-Planck flow with `V = λx²/2` from `N(m0, σ0²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OUParams {
    pub lambda: f64,
    pub m0: f64,
    pub sigma0: f64,
}

impl OUParams {
    pub fn new(lambda: f64, m0: f64, sigma0: f64) -> Result<Self, WassError> {
        if !(lambda > 0.0
            && sigma0 > 0.0
            && lambda.is_finite()
            && sigma0.is_finite()
            && m0.is_finite())
        {
            return Err(WassError::InvalidParameter(format!(
                "need lambda > 0 and sigma0 > 0, got lambda = {lambda}, sigma0 = {sigma0}"
            )));
        }
        Ok(OUParams { lambda, m0, sigma0 })
    }
}

/// Mean and standard deviation at time `t`:
/// `m(t) = m0 e^{−λt}`, `σ²(t) = 1/λ + (σ0² − 1/λ) e^{−2λt}`.
pub fn ou_exact(params: &OUParams, t: f64) -> (f64, f64) {
    let OUParams { lambda, m0, sigma0 } = *params;
    let mean = m0 * (-lambda * t).exp();
    let var = sigma0 * sigma0 * (-2.0 * lambda * t).exp() - (-2.0 * lambda * t).exp_m1() / lambda;
    (mean, var.sqrt())
}

pub fn ou_quantiles(params: &OUParams, t: f64, n: usize) -> Result<QuantileDensity, WassError> {
    let (mean, sigma) = ou_exact(params, t);
    quantile_of_gaussian(mean, sigma, n)
}

/// Unit-mass Barenblatt solution of `∂ρ = (ρ^m)″` started at time `t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarenblattParams {
    pub m: f64,
    pub t0: f64,
}

impl BarenblattParams {
    pub fn new(m: f64, t0: f64) -> Result<Self, WassError> {
        if !(m > 1.0 && m <= 4.0) {
            return Err(WassError::InvalidParameter(format!(
                "m must lie in (1, 4], got {m}"
            )));
        }
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(WassError::InvalidParameter(format!(
                "t0 must be positive, got {t0}"
            )));
        }
        Ok(BarenblattParams { m, t0 })
    }

    /// `k = 1/(m+1)`
    pub fn k(&self) -> f64 {
        1.0 / (self.m + 1.0)
    }

    /// `κ = k(m−1)/(2m)`
    pub fn kappa(&self) -> f64 {
        self.k() * (self.m - 1.0) / (2.0 * self.m)
    }

    fn p(&self) -> f64 {
        1.0 / (self.m - 1.0)
    }

    /// Constant fixing unit mass: `C^{p+1/2} κ^{−1/2} B(1/2, p+1) = 1`.
    pub fn c(&self) -> f64 {
        let p = self.p();
        (self.kappa().sqrt() / beta(0.5, p + 1.0)).powf(1.0 / (p + 0.5))
    }

    pub fn support_radius(&self, t: f64) -> f64 {
        t.powf(self.k()) * (self.c() / self.kappa()).sqrt()
    }

    /// `ρ(t, x) = t^{−k} (C − κ x² t^{−2k})₊^{1/(m−1)}`
    pub fn density(&self, t: f64, x: f64) -> f64 {
        let k = self.k();
        let base = self.c() - self.kappa() * x * x * t.powf(-2.0 * k);
        t.powf(-k) * base.max(0.0).powf(self.p())
    }
}

/// Cell-center quantiles of the Barenblatt profile at time `t ≥ t0`.
///
/// In the similarity variable `z = x / R(t)` the CDF is the regularized
/// incomplete beta function `I_{(1+z)/2}(p+1, p+1)` with `p = 1/(m−1)`; it is
/// inverted by bisection.
pub fn barenblatt_quantiles(
    params: &BarenblattParams,
    t: f64,
    n: usize,
) -> Result<QuantileDensity, WassError> {
    if !(t >= params.t0 && t.is_finite()) {
        return Err(WassError::InvalidInput(format!(
            "need t >= t0 = {}, got {t}",
            params.t0
        )));
    }
    if n < 4 {
        return Err(WassError::TooFewCells(n));
    }
    let a = params.p() + 1.0;
    let radius = params.support_radius(t);
    let cdf =
        |v: f64| checked_beta_reg(a, a, v).map_err(|e| WassError::InversionFailure(e.to_string()));
    let mut x = vec![0.0; n];
    for i in 0..n / 2 {
        let s = (2 * i + 1) as f64 / (2 * n) as f64;
        let (mut lo, mut hi) = (0.0f64, 0.5f64);
        for _ in 0..100 {
            if hi - lo <= 1e-16 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if cdf(mid)? < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let v = 0.5 * (lo + hi);
        if (cdf(v)? - s).abs() > 1e-12 {
            return Err(WassError::InversionFailure(format!(
                "cell {i}: CDF residual too large"
            )));
        }
        x[i] = radius * (2.0 * v - 1.0);
        x[n - 1 - i] = -x[i];
    }
    QuantileDensity::new(x)
}

/// Runs the scheme with `n_ref` uniform steps on `[0, total_time]` and samples
/// the piecewise-constant path at `t_j = j T / grid_n`, `j = 0..=grid_n`.
pub fn fine_step_reference<P: Clone>(
    problem: &SplitProblem<P>,
    x0: &P,
    total_time: f64,
    n_ref: usize,
    grid_n: usize,
) -> Result<SampledPath<P>, SchemeError> {
    if grid_n == 0 || n_ref < 4 * grid_n {
        return Err(SchemeError::InvalidInput(format!(
            "reference needs at least 4x the study resolution ({n_ref} < 4 * {grid_n})"
        )));
    }
    let traj = run_scheme(problem, x0, &Discretisation::uniform(n_ref, total_time)?)?;
    let disc = traj.discretisation();
    let times: Vec<f64> = (0..=grid_n)
        .map(|j| total_time * j as f64 / grid_n as f64)
        .collect();
    let points = times
        .iter()
        .map(|&t| Ok(traj.point(overline_index(disc, t)?).clone()))
        .collect::<Result<_, SchemeError>>()?;
    Ok(SampledPath { times, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ou_limits() {
        let p = OUParams::new(2.0, 1.5, 0.3).unwrap();
        assert_eq!(ou_exact(&p, 0.0), (1.5, 0.3));
        let (m, s) = ou_exact(&p, 50.0);
        assert!(m.abs() < 1e-40);
        assert!((s - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(OUParams::new(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn barenblatt_shape() {
        let b = BarenblattParams::new(2.0, 1.0).unwrap();
        let q = barenblatt_quantiles(&b, 1.0, 64).unwrap();
        let x = q.values();
        for i in 0..64 {
            assert_eq!(x[i], -x[63 - i]);
        }
        assert!(x[63] < b.support_radius(1.0));
        let r1 = b.support_radius(1.0);
        let r8 = b.support_radius(8.0);
        assert!((r8 / r1 - 8f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert!(barenblatt_quantiles(&b, 0.5, 64).is_err());
        assert!(BarenblattParams::new(5.0, 1.0).is_err());
    }
}
