//! Utility values with an explicit minus-infinity sentinel.
//!
//! An infeasible coalition (broadcast power over budget, or too few members
//! to null every eavesdropper) is worth strictly less than any achievable
//! rate. Representing that as an enum instead of `f64::NEG_INFINITY` keeps
//! the sentinel from leaking into float arithmetic unnoticed: sums absorb
//! it, comparisons order it below every finite value, and extracting a float
//! is always an explicit choice.

use std::cmp::Ordering;
use std::iter::Sum;
use std::ops::Add;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Utility {
    NegInfinity,
    Finite(f64),
}

impl Utility {
    pub fn finite(value: f64) -> Self {
        debug_assert!(value.is_finite(), "utility must be finite, got {value}");
        Utility::Finite(value)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Utility::Finite(_))
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Utility::Finite(v) => Some(*v),
            Utility::NegInfinity => None,
        }
    }

    /// Finite value, panicking on the sentinel. For contexts that have
    /// already established feasibility.
    pub fn expect_finite(&self) -> f64 {
        self.value().expect("utility is minus infinity")
    }
}

impl PartialOrd for Utility {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Utility::NegInfinity, Utility::NegInfinity) => Some(Ordering::Equal),
            (Utility::NegInfinity, Utility::Finite(_)) => Some(Ordering::Less),
            (Utility::Finite(_), Utility::NegInfinity) => Some(Ordering::Greater),
            (Utility::Finite(a), Utility::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl Add for Utility {
    type Output = Utility;

    fn add(self, rhs: Utility) -> Utility {
        match (self, rhs) {
            (Utility::Finite(a), Utility::Finite(b)) => Utility::Finite(a + b),
            _ => Utility::NegInfinity,
        }
    }
}

impl Sum for Utility {
    fn sum<I: Iterator<Item = Utility>>(iter: I) -> Utility {
        iter.fold(Utility::Finite(0.0), Add::add)
    }
}

impl std::fmt::Display for Utility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Utility::NegInfinity => write!(f, "-inf"),
            Utility::Finite(v) => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_puts_sentinel_below_everything() {
        assert!(Utility::NegInfinity < Utility::finite(-1e300));
        assert!(Utility::finite(0.0) > Utility::NegInfinity);
        assert!(Utility::finite(1.0) > Utility::finite(0.5));
        assert!(Utility::NegInfinity >= Utility::NegInfinity);
        assert_eq!(Utility::NegInfinity, Utility::NegInfinity);
    }

    #[test]
    fn sums_absorb_the_sentinel() {
        let total: Utility = [Utility::finite(1.0), Utility::finite(2.0)].into_iter().sum();
        assert_eq!(total, Utility::finite(3.0));
        let poisoned: Utility =
            [Utility::finite(1.0), Utility::NegInfinity, Utility::finite(2.0)].into_iter().sum();
        assert_eq!(poisoned, Utility::NegInfinity);
        let empty: Utility = std::iter::empty().sum();
        assert_eq!(empty, Utility::finite(0.0));
    }
}
