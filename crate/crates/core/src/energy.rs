//! Extended-real energy values.

use std::fmt;
use std::ops::Add;

/// Value of a functional on `ℝ ∪ {+∞}`.
///
/// Points outside the effective domain evaluate to [`Energy::Infinite`]; the
/// sentinel never takes part in floating-point arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Energy {
    Finite(f64),
    Infinite,
}

impl Energy {
    pub fn is_finite(self) -> bool {
        matches!(self, Energy::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Energy::Finite(v) => Some(v),
            Energy::Infinite => None,
        }
    }

    /// `true` when `self ≤ other` in the extended order.
    pub fn le(self, other: Energy) -> bool {
        match (self, other) {
            (_, Energy::Infinite) => true,
            (Energy::Infinite, Energy::Finite(_)) => false,
            (Energy::Finite(a), Energy::Finite(b)) => a <= b,
        }
    }
}

impl From<f64> for Energy {
    /// Non-finite floats (NaN, ±inf) map to the sentinel.
    fn from(v: f64) -> Self {
        if v.is_finite() {
            Energy::Finite(v)
        } else {
            Energy::Infinite
        }
    }
}

impl Add for Energy {
    type Output = Energy;

    fn add(self, rhs: Energy) -> Energy {
        match (self, rhs) {
            (Energy::Finite(a), Energy::Finite(b)) => Energy::from(a + b),
            _ => Energy::Infinite,
        }
    }
}

impl fmt::Display for Energy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Energy::Finite(v) => write!(f, "{v}"),
            Energy::Infinite => f.write_str("+inf"),
        }
    }
}
