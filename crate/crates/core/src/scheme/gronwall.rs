use super::SchemeError;

/// Discrete Gronwall bound.
///
/// If `a_n ≤ A + Σ_{k≤n} τ_k a_k` with `m = max τ_k < 1`, then
/// `a_n ≤ A β exp(β t_{n-1})` where `β = 1/(1−m)` and `t_j = Σ_{k≤j} τ_k`.
/// Returns the bound for `n = 1, …, taus.len()`.
pub fn gronwall_bound(a: f64, taus: &[f64]) -> Result<Vec<f64>, SchemeError> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(SchemeError::InvalidInput(format!(
            "A must be finite and nonnegative, got {a}"
        )));
    }
    if let Some(t) = taus.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(SchemeError::InvalidInput(format!(
            "every tau must be positive, got {t}"
        )));
    }
    let m = taus.iter().copied().fold(0.0, f64::max);
    if m >= 1.0 {
        return Err(SchemeError::InvalidInput(format!(
            "max tau must be < 1, got {m}"
        )));
    }
    let beta = 1.0 / (1.0 - m);
    let mut elapsed = 0.0;
    Ok(taus
        .iter()
        .map(|&tau| {
            let bound = a * beta * (beta * elapsed).exp();
            elapsed += tau;
            bound
        })
        .collect())
}
