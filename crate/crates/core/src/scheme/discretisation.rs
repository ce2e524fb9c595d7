use serde::Serialize;

use super::SchemeError;

/// Finite sequence of positive step sizes `h_1, …, h_n`.
///
/// Node times are `t^0 = 0`, `t^k = 2 Σ_{j≤k} h_j`; cell `k` is `[t^{k-1}, t^k)`
/// and has length `2 h_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discretisation {
    steps: Vec<f64>,
    times: Vec<f64>,
    mesh: f64,
}

impl Discretisation {
    pub fn new(steps: Vec<f64>) -> Result<Self, SchemeError> {
        if steps.is_empty() {
            return Err(SchemeError::EmptyDiscretisation);
        }
        if let Some((index, &value)) = steps
            .iter()
            .enumerate()
            .find(|(_, h)| !(h.is_finite() && **h > 0.0))
        {
            return Err(SchemeError::InvalidStep {
                index: index + 1,
                value,
            });
        }
        let mut times = Vec::with_capacity(steps.len() + 1);
        times.push(0.0);
        let mut acc = 0.0;
        for &h in &steps {
            acc += h;
            times.push(2.0 * acc);
        }
        let mesh = steps.iter().copied().fold(f64::MIN, f64::max);
        Ok(Discretisation { steps, times, mesh })
    }

    /// `n` equal steps covering `[0, total_time]` on the discretisation clock.
    pub fn uniform(n: usize, total_time: f64) -> Result<Self, SchemeError> {
        if n == 0 {
            return Err(SchemeError::EmptyDiscretisation);
        }
        if !(total_time.is_finite() && total_time > 0.0) {
            return Err(SchemeError::InvalidInput(format!(
                "total time must be positive, got {total_time}"
            )));
        }
        let mut disc = Discretisation::new(vec![total_time / (2.0 * n as f64); n])?;
        // Pin the last node so that t^n == total_time bit-for-bit.
        disc.times[n] = total_time;
        Ok(disc)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    /// Step size `h_k`, 1-based.
    pub fn step(&self, k: usize) -> f64 {
        self.steps[k - 1]
    }

    /// Node times `t^0, …, t^n`.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn time(&self, k: usize) -> f64 {
        self.times[k]
    }

    pub fn final_time(&self) -> f64 {
        self.times[self.steps.len()]
    }

    /// `|h| = max_k h_k`.
    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn min_step(&self) -> f64 {
        self.steps.iter().copied().fold(f64::MAX, f64::min)
    }

    /// Is every step equal (to rounding)?
    pub fn is_uniform(&self) -> bool {
        let h = self.steps[0];
        self.steps.iter().all(|&s| (s - h).abs() <= 1e-12 * h)
    }

    /// Index `k` of the cell `[t^{k-1}, t^k)` containing `t`; `t^n` maps to `n`.
    pub fn cell_of(&self, t: f64) -> Result<usize, SchemeError> {
        let end = self.final_time();
        if !(0.0..=end).contains(&t) {
            return Err(SchemeError::OutOfRange { t, end });
        }
        let n = self.len();
        if t >= end {
            return Ok(n);
        }
        // first node strictly greater than t
        let idx = self.times.partition_point(|&s| s <= t);
        Ok(idx.clamp(1, n))
    }

    /// Prefix `h_1, …, h_k`.
    pub fn prefix(&self, k: usize) -> Result<Discretisation, SchemeError> {
        Discretisation::new(self.steps[..k].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_nonpositive() {
        assert_eq!(
            Discretisation::new(vec![]),
            Err(SchemeError::EmptyDiscretisation)
        );
        assert!(matches!(
            Discretisation::new(vec![0.1, 0.0]),
            Err(SchemeError::InvalidStep { index: 2, .. })
        ));
        assert!(matches!(
            Discretisation::new(vec![f64::NAN]),
            Err(SchemeError::InvalidStep { index: 1, .. })
        ));
        assert!(matches!(
            Discretisation::new(vec![-1.0]),
            Err(SchemeError::InvalidStep { .. })
        ));
    }

    #[test]
    fn times_are_twice_partial_sums() {
        let d = Discretisation::new(vec![0.5, 0.25, 1.0]).unwrap();
        assert_eq!(d.times(), &[0.0, 1.0, 1.5, 3.5]);
        assert_eq!(d.mesh(), 1.0);
        assert_eq!(d.min_step(), 0.25);
        assert_eq!(d.final_time(), 3.5);
    }

    #[test]
    fn uniform_hits_final_time() {
        let d = Discretisation::uniform(7, 1.0).unwrap();
        assert_eq!(d.final_time(), 1.0);
        assert_eq!(d.step(3), 1.0 / 14.0);
        assert!(d.is_uniform());
    }

    #[test]
    fn cell_lookup() {
        let d = Discretisation::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(d.cell_of(0.0).unwrap(), 1);
        assert_eq!(d.cell_of(0.99).unwrap(), 1);
        assert_eq!(d.cell_of(1.0).unwrap(), 2);
        assert_eq!(d.cell_of(2.0).unwrap(), 2);
        assert!(d.cell_of(2.1).is_err());
        assert!(d.cell_of(-0.1).is_err());
    }

    #[test]
    fn single_step_is_legal() {
        let d = Discretisation::new(vec![0.3]).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.final_time(), 0.6);
    }
}
