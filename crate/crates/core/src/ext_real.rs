//! Nonnegative extended reals with explicit error bounds.
//!
//! Every quadrature and sup probe in this crate reports one of three
//! outcomes: a finite value with a bound on its absolute error, a certified
//! divergence, or an explicit "could not decide" with a machine-readable
//! reason. Finite values additionally carry an `approximate` provenance
//! flag, set whenever a grid-sampled (rather than exact) representation
//! contributed anywhere upstream.

use serde::{Deserialize, Serialize};

/// Outcome of an integral, norm or sup computation on `[0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtReal {
    Finite {
        value: f64,
        err_bound: f64,
        #[serde(default, skip_serializing_if = "is_false")]
        approximate: bool,
    },
    Divergent,
    Unknown {
        reason: String,
    },
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl ExtReal {
    /// Exact-path finite value.
    pub fn finite(value: f64, err_bound: f64) -> Self {
        debug_assert!(err_bound >= 0.0);
        ExtReal::Finite { value, err_bound, approximate: false }
    }

    /// Finite value that went through a sampled representation.
    pub fn finite_approx(value: f64, err_bound: f64) -> Self {
        ExtReal::Finite { value, err_bound, approximate: true }
    }

    pub fn unknown(reason: impl Into<String>) -> Self {
        ExtReal::Unknown { reason: reason.into() }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite { .. })
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, ExtReal::Divergent)
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, ExtReal::Unknown { .. })
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            ExtReal::Finite { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn err_bound(&self) -> Option<f64> {
        match self {
            ExtReal::Finite { err_bound, .. } => Some(*err_bound),
            _ => None,
        }
    }

    pub fn approximate(&self) -> bool {
        matches!(self, ExtReal::Finite { approximate: true, .. })
    }

    /// Marks the value as grid-derived, keeping everything else.
    pub fn mark_approx(self) -> Self {
        match self {
            ExtReal::Finite { value, err_bound, .. } => {
                ExtReal::Finite { value, err_bound, approximate: true }
            }
            other => other,
        }
    }

    /// Sum of two outcomes. Divergence dominates, Unknown is sticky
    /// otherwise.
    pub fn add(&self, other: &ExtReal) -> ExtReal {
        use ExtReal::*;
        match (self, other) {
            (Divergent, _) | (_, Divergent) => Divergent,
            (Unknown { reason }, _) | (_, Unknown { reason }) => {
                ExtReal::unknown(reason.clone())
            }
            (
                Finite { value: v1, err_bound: e1, approximate: a1 },
                Finite { value: v2, err_bound: e2, approximate: a2 },
            ) => Finite {
                value: v1 + v2,
                err_bound: e1 + e2,
                approximate: *a1 || *a2,
            },
        }
    }

    /// Scales a finite outcome by `k >= 0`. `0 * Divergent` is the zero
    /// function, so scaling by zero always yields an exact zero.
    pub fn scale(&self, k: f64) -> ExtReal {
        debug_assert!(k >= 0.0);
        if k == 0.0 {
            return ExtReal::finite(0.0, 0.0);
        }
        match self {
            ExtReal::Finite { value, err_bound, approximate } => ExtReal::Finite {
                value: k * value,
                err_bound: k * err_bound,
                approximate: *approximate,
            },
            other => other.clone(),
        }
    }

    /// True when the two outcomes agree: both Finite within combined error
    /// bounds plus `slack`, or both Divergent.
    pub fn agrees(&self, other: &ExtReal, slack: f64) -> bool {
        match (self, other) {
            (ExtReal::Divergent, ExtReal::Divergent) => true,
            (
                ExtReal::Finite { value: v1, err_bound: e1, .. },
                ExtReal::Finite { value: v2, err_bound: e2, .. },
            ) => (v1 - v2).abs() <= e1 + e2 + slack,
            _ => false,
        }
    }
}

impl std::fmt::Display for ExtReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtReal::Finite { value, err_bound, approximate } => {
                write!(f, "{:.12e} (err <= {:.3e}{})", value, err_bound,
                       if *approximate { ", approx" } else { "" })
            }
            ExtReal::Divergent => write!(f, "divergent"),
            ExtReal::Unknown { reason } => write!(f, "unknown: {}", reason),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_propagates_divergence_and_errors() {
        let a = ExtReal::finite(1.0, 1e-9);
        let b = ExtReal::finite(2.0, 1e-9);
        match a.add(&b) {
            ExtReal::Finite { value, err_bound, approximate } => {
                assert_eq!(value, 3.0);
                assert!((err_bound - 2e-9).abs() < 1e-18);
                assert!(!approximate);
            }
            _ => panic!("expected finite"),
        }
        assert!(a.add(&ExtReal::Divergent).is_divergent());
    }

    #[test]
    fn scale_by_zero_kills_divergence() {
        assert_eq!(ExtReal::Divergent.scale(0.0), ExtReal::finite(0.0, 0.0));
    }

    #[test]
    fn approx_flag_is_sticky_under_add() {
        let a = ExtReal::finite_approx(1.0, 0.1);
        let b = ExtReal::finite(1.0, 0.0);
        assert!(a.add(&b).approximate());
    }
}
