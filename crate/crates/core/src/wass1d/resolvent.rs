use super::functionals::{EntropyKind, PotentialSpec};
use super::quantile::{QuantileDensity, GAP_FLOOR};
use super::WassError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Stop when the `∞`-norm of the metric gradient drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Fraction-to-boundary factor: a step may shrink a gap by at most this
    /// fraction.
    pub boundary_fraction: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tolerance: 1e-10,
            max_iterations: 200,
            boundary_fraction: 0.99,
        }
    }
}

/// `J_h^V`: maps every quantile through the scalar resolvent `y + hV′(y) = x`.
///
/// Returns the new vector and `max_i |V′(y_i) + (y_i − x_i)/h|`.
pub fn resolvent_potential(
    mu: &QuantileDensity,
    pot: &PotentialSpec,
    h: f64,
    settings: &SolverSettings,
) -> Result<(QuantileDensity, f64), WassError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(WassError::InvalidInput(format!(
            "step must be positive, got {h}"
        )));
    }
    let mut y = Vec::with_capacity(mu.len());
    if let Some(lambda) = pot.quadratic_coefficient() {
        y.extend(mu.values().iter().map(|x| x / (1.0 + h * lambda)));
    } else {
        for (i, &x) in mu.values().iter().enumerate() {
            y.push(scalar_resolvent(pot, h, x, settings.max_iterations).ok_or(
                WassError::NewtonFailure {
                    index: Some(i),
                    iterations: settings.max_iterations,
                    residual: f64::NAN,
                },
            )?);
        }
        // The exact map is increasing; keep rounding from reordering neighbours.
        for i in 1..y.len() {
            y[i] = y[i].max(y[i - 1]);
        }
    }
    let certificate = mu
        .values()
        .iter()
        .zip(&y)
        .map(|(&x, &yi)| (pot.dv(yi) + (yi - x) / h).abs())
        .fold(0.0, f64::max);
    Ok((QuantileDensity::new(y)?, certificate))
}

/// Safeguarded Newton for the increasing map `y ↦ y + hV′(y)`. The root lies
/// between `x − hV′(x)` and `x`.
fn scalar_resolvent(pot: &PotentialSpec, h: f64, x: f64, max_iterations: usize) -> Option<f64> {
    let g = |y: f64| y + h * pot.dv(y) - x;
    let explicit = x - h * pot.dv(x);
    if explicit == x {
        return Some(x);
    }
    let (mut lo, mut hi) = if explicit < x {
        (explicit, x)
    } else {
        (x, explicit)
    };
    let mut y = explicit;
    for _ in 0..max_iterations {
        let r = g(y);
        if r.abs() <= 4.0 * f64::EPSILON * (1.0 + x.abs())
            || hi - lo <= 2.0 * f64::EPSILON * (1.0 + y.abs())
        {
            return Some(y);
        }
        if r > 0.0 {
            hi = y;
        } else {
            lo = y;
        }
        let step = y - r / (1.0 + h * pot.d2v(y));
        y = if step > lo && step < hi {
            step
        } else {
            0.5 * (lo + hi)
        };
    }
    None
}

/// Result of an entropy resolvent solve.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropySolve {
    pub point: QuantileDensity,
    /// `∞`-norm of the metric gradient of the objective at `point`.
    pub gradient_norm: f64,
    pub iterations: usize,
}

/// Per-gap terms of `N · entropy` as a function of the gap `g`.
struct GapTerms {
    kind: EntropyKind,
    /// `N/(N−1)` for Boltzmann, `N^{2−m}/(N−1)` for Rényi.
    scale: f64,
    n: f64,
}

impl GapTerms {
    fn new(kind: EntropyKind, n: usize) -> Self {
        let nf = n as f64;
        let scale = match kind {
            EntropyKind::Boltzmann => nf / (nf - 1.0),
            EntropyKind::Renyi { m } => nf / (nf - 1.0) * nf.powf(1.0 - m),
        };
        GapTerms { kind, scale, n: nf }
    }

    fn value(&self, g: f64) -> f64 {
        match self.kind {
            EntropyKind::Boltzmann => -self.scale * (self.n * g).ln(),
            EntropyKind::Renyi { m } => self.scale / (m - 1.0) * g.powf(1.0 - m),
        }
    }

    fn first(&self, g: f64) -> f64 {
        match self.kind {
            EntropyKind::Boltzmann => -self.scale / g,
            EntropyKind::Renyi { m } => -self.scale * g.powf(-m),
        }
    }

    fn second(&self, g: f64) -> f64 {
        match self.kind {
            EntropyKind::Boltzmann => self.scale / (g * g),
            EntropyKind::Renyi { m } => self.scale * m * g.powf(-m - 1.0),
        }
    }
}

/// `J_h` of the Boltzmann or Rényi entropy: minimises
/// `entropy(y) + W₂²(y, μ)/(2h)` over monotone vectors.
///
/// Damped Newton on the displacement `d = y − x`, with the tridiagonal Hessian
/// solved directly. Steps are cut back so that no gap loses more than
/// `boundary_fraction` of its length, then backtracked until the objective
/// decreases sufficiently.
pub fn resolvent_entropy(
    mu: &QuantileDensity,
    kind: EntropyKind,
    h: f64,
    settings: &SolverSettings,
) -> Result<EntropySolve, WassError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(WassError::InvalidInput(format!(
            "step must be positive, got {h}"
        )));
    }
    let kind = kind.validate()?;
    if let Some(i) = mu.first_collapsed_gap() {
        return Err(WassError::NonMonotone(i));
    }
    let x = mu.values();
    let n = x.len();
    let terms = GapTerms::new(kind, n);
    let base_gaps: Vec<f64> = mu.gaps().collect();

    let gaps_of = |d: &[f64], out: &mut Vec<f64>| {
        out.clear();
        out.extend(
            base_gaps
                .iter()
                .enumerate()
                .map(|(j, g)| g + (d[j + 1] - d[j])),
        );
    };
    let objective = |d: &[f64], gaps: &[f64]| -> f64 {
        gaps.iter().map(|&g| terms.value(g)).sum::<f64>()
            + d.iter().map(|v| v * v).sum::<f64>() / (2.0 * h)
    };

    let mut d = vec![0.0; n];
    let mut gaps = base_gaps.clone();
    let mut value = objective(&d, &gaps);
    let mut grad = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n - 1];
    let mut step = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial_gaps = Vec::with_capacity(n - 1);

    for iteration in 0..=settings.max_iterations {
        for i in 0..n {
            grad[i] = d[i] / h;
            diag[i] = 1.0 / h;
        }
        for (j, &g) in gaps.iter().enumerate() {
            let f1 = terms.first(g);
            let f2 = terms.second(g);
            grad[j + 1] += f1;
            grad[j] -= f1;
            diag[j] += f2;
            diag[j + 1] += f2;
            off[j] = -f2;
        }
        let norm = grad.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if norm <= settings.tolerance {
            let y: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + b).collect();
            return Ok(EntropySolve {
                point: QuantileDensity::new(y)?,
                gradient_norm: norm,
                iterations: iteration,
            });
        }
        if iteration == settings.max_iterations {
            return Err(WassError::NewtonFailure {
                index: None,
                iterations: iteration,
                residual: norm,
            });
        }

        for (s, g) in step.iter_mut().zip(&grad) {
            *s = -g;
        }
        solve_tridiagonal(&diag, &off, &mut step);

        let mut alpha: f64 = 1.0;
        for (j, &g) in gaps.iter().enumerate() {
            let dg = step[j + 1] - step[j];
            if dg < 0.0 {
                alpha = alpha.min(settings.boundary_fraction * g / -dg);
            }
        }
        let slope: f64 = grad.iter().zip(&step).map(|(g, s)| g * s).sum();
        let mut accepted = false;
        for _ in 0..60 {
            for i in 0..n {
                trial[i] = d[i] + alpha * step[i];
            }
            gaps_of(&trial, &mut trial_gaps);
            if trial_gaps.iter().all(|&g| g > GAP_FLOOR) {
                let v = objective(&trial, &trial_gaps);
                if v <= value + 1e-4 * alpha * slope + 1e-15 * value.abs() {
                    std::mem::swap(&mut d, &mut trial);
                    std::mem::swap(&mut gaps, &mut trial_gaps);
                    value = v;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Err(WassError::NewtonFailure {
                index: None,
                iterations: iteration,
                residual: norm,
            });
        }
    }
    unreachable!("loop returns on its last iteration")
}

/// Solves a symmetric positive definite tridiagonal system in place.
fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut denom = diag[0];
    rhs[0] /= denom;
    for i in 1..n {
        c[i - 1] = off[i - 1] / denom;
        denom = diag[i] - off[i - 1] * c[i - 1];
        rhs[i] = (rhs[i] - off[i - 1] * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// Discrete optimality condition of the entropy resolvent,
///
/// ```text
/// h · (N/(N−1)) · N · (ρ_i^q − ρ_{i−1}^q) = x_i − y_i,   ρ_j = 1/(N (y_{j+1} − y_j)),
/// ```
///
/// with `q = 1` (Boltzmann) or `q = m` (Rényi), the quantile form of
/// `h ∇ρ^q = (T − id) ρ`. Returns the largest residual over interior cells.
pub fn check_optimality_tudorascu(
    mu_out: &QuantileDensity,
    mu_in: &QuantileDensity,
    kind: EntropyKind,
    h: f64,
) -> Result<f64, WassError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(WassError::InvalidInput(format!(
            "step must be positive, got {h}"
        )));
    }
    if mu_out.len() != mu_in.len() {
        return Err(WassError::SizeMismatch {
            left: mu_out.len(),
            right: mu_in.len(),
        });
    }
    if let Some(i) = mu_out.first_collapsed_gap() {
        return Err(WassError::NonMonotone(i));
    }
    let n = mu_out.len() as f64;
    let q = kind.exponent().unwrap_or(1.0);
    let pressure: Vec<f64> = mu_out.gaps().map(|g| (1.0 / (n * g)).powf(q)).collect();
    let (x, y) = (mu_in.values(), mu_out.values());
    Ok((1..mu_out.len() - 1)
        .map(|i| (h * n / (n - 1.0) * n * (pressure[i] - pressure[i - 1]) - (x[i] - y[i])).abs())
        .fold(0.0, f64::max))
}
