use std::f64::consts::{PI, SQRT_2};

use statrs::function::erf::{erfc, erfc_inv};

use super::WassError;
use crate::scheme::Metric;

/// Gaps at or below this are treated as collapsed cells.
pub const GAP_FLOOR: f64 = 1e-300;

/// A probability measure on `ℝ` stored as `N` cell-center quantiles
/// `x_i ≈ X((2i − 1) / (2N))`, each carrying mass `1/N`.
///
/// Values must be finite and nondecreasing. Repeated values (atoms) are
/// allowed here; the entropies treat them as lying outside their domain.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileDensity {
    x: Vec<f64>,
}

impl QuantileDensity {
    pub fn new(x: Vec<f64>) -> Result<Self, WassError> {
        if x.len() < 4 {
            return Err(WassError::TooFewCells(x.len()));
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(WassError::NonFinite(i));
        }
        if let Some(i) = x.windows(2).position(|w| w[1] < w[0]) {
            return Err(WassError::NonMonotone(i));
        }
        Ok(QuantileDensity { x })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.x
    }

    pub fn into_values(self) -> Vec<f64> {
        self.x
    }

    /// Mass coordinate of cell `i` (0-based): `(2i + 1) / (2N)`.
    pub fn mass_coordinate(&self, i: usize) -> f64 {
        (2 * i + 1) as f64 / (2 * self.len()) as f64
    }

    pub fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        self.x.windows(2).map(|w| w[1] - w[0])
    }

    pub fn min_gap(&self) -> f64 {
        self.gaps().fold(f64::INFINITY, f64::min)
    }

    /// Index of the first gap at or below [`GAP_FLOOR`].
    pub fn first_collapsed_gap(&self) -> Option<usize> {
        self.gaps().position(|g| g <= GAP_FLOOR)
    }

    pub fn mean(&self) -> f64 {
        self.x.iter().sum::<f64>() / self.len() as f64
    }

    pub fn second_moment(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum::<f64>() / self.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.len() as f64
    }
}

/// `W₂(μ, ν) = sqrt((1/N) Σ (x_i − y_i)²)`; the monotone coupling is optimal
/// on the line.
pub fn w2_distance(mu: &QuantileDensity, nu: &QuantileDensity) -> Result<f64, WassError> {
    w2_distance_sq(mu, nu).map(f64::sqrt)
}

pub fn w2_distance_sq(mu: &QuantileDensity, nu: &QuantileDensity) -> Result<f64, WassError> {
    if mu.len() != nu.len() {
        return Err(WassError::SizeMismatch {
            left: mu.len(),
            right: nu.len(),
        });
    }
    Ok(mu
        .x
        .iter()
        .zip(&nu.x)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / mu.len() as f64)
}

/// The 1D Wasserstein metric on quantile vectors of a common length.
#[derive(Debug, Clone, Copy, Default)]
pub struct W2Metric;

impl Metric<QuantileDensity> for W2Metric {
    fn distance(&self, x: &QuantileDensity, y: &QuantileDensity) -> f64 {
        self.distance_sq(x, y).sqrt()
    }

    fn distance_sq(&self, x: &QuantileDensity, y: &QuantileDensity) -> f64 {
        w2_distance_sq(x, y).unwrap_or(f64::INFINITY)
    }
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal quantile for `p ∈ (0, 1)`, polished with a Newton step on
/// the CDF.
pub fn normal_quantile(p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    let mut x = -SQRT_2 * erfc_inv(2.0 * p);
    let pdf = normal_pdf(x);
    if pdf > 0.0 {
        x -= (normal_cdf(x) - p) / pdf;
    }
    x
}

/// Cell-center quantiles of `N(mean, sigma²)`. The vector is built from the
/// lower half and mirrored, so it is exactly symmetric about `mean`.
pub fn quantile_of_gaussian(mean: f64, sigma: f64, n: usize) -> Result<QuantileDensity, WassError> {
    if !(sigma > 0.0 && sigma.is_finite() && mean.is_finite()) {
        return Err(WassError::InvalidParameter(format!(
            "need finite mean and sigma > 0, got ({mean}, {sigma})"
        )));
    }
    if n < 4 {
        return Err(WassError::TooFewCells(n));
    }
    let mut z = vec![0.0; n];
    for i in 0..n / 2 {
        let s = (2 * i + 1) as f64 / (2 * n) as f64;
        z[i] = normal_quantile(s);
        z[n - 1 - i] = -z[i];
    }
    QuantileDensity::new(z.into_iter().map(|v| mean + sigma * v).collect())
}

/// One component `(weight, mean, sigma)` of a Gaussian mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub sigma: f64,
}

/// Cell-center quantiles of a Gaussian mixture, by bisection on its CDF.
pub fn quantile_of_mixture(
    components: &[MixtureComponent],
    n: usize,
) -> Result<QuantileDensity, WassError> {
    if components.is_empty() {
        return Err(WassError::InvalidParameter(
            "mixture needs at least one component".into(),
        ));
    }
    if components
        .iter()
        .any(|c| !(c.weight > 0.0 && c.sigma > 0.0 && c.mean.is_finite()))
    {
        return Err(WassError::InvalidParameter(
            "mixture weights and sigmas must be positive".into(),
        ));
    }
    if n < 4 {
        return Err(WassError::TooFewCells(n));
    }
    let total: f64 = components.iter().map(|c| c.weight).sum();
    let cdf = |x: f64| {
        components
            .iter()
            .map(|c| c.weight * normal_cdf((x - c.mean) / c.sigma))
            .sum::<f64>()
            / total
    };
    let smax = components.iter().map(|c| c.sigma).fold(0.0, f64::max);
    let lo0 = components
        .iter()
        .map(|c| c.mean)
        .fold(f64::INFINITY, f64::min)
        - 40.0 * smax;
    let hi0 = components
        .iter()
        .map(|c| c.mean)
        .fold(f64::NEG_INFINITY, f64::max)
        + 40.0 * smax;
    let x = (0..n)
        .map(|i| {
            let s = (2 * i + 1) as f64 / (2 * n) as f64;
            let (mut lo, mut hi) = (lo0, hi0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if cdf(mid) < s {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-14 * (1.0 + mid.abs()) {
                    break;
                }
            }
            0.5 * (lo + hi)
        })
        .collect();
    QuantileDensity::new(x)
}
