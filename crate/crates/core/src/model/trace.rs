//! Per-iteration progress records, the unit of Monte Carlo aggregation.

use crate::scalar::{to_f64, Scalar};

/// Sum-rate value per iteration for one solver run. The trace ends at the
/// iteration where the stopping rule fired; it is never padded, so averaged
/// campaign curves reflect the declining number of still-active trials.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace<T> {
    /// Sum rate after each iteration, in bits/s. Entry `i` is iteration `i+1`.
    pub sum_rates_bps: Vec<T>,
    /// Iteration (1-based) at which the stopping rule fired, `None` when the
    /// run exhausted its iteration cap without meeting it.
    pub converged_at: Option<usize>,
}

impl<T: Scalar> ConvergenceTrace<T> {
    pub fn len(&self) -> usize {
        self.sum_rates_bps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sum_rates_bps.is_empty()
    }

    /// Sum rate at the last recorded iteration, in bits/s.
    pub fn final_sum_rate_bps(&self) -> Option<T> {
        self.sum_rates_bps.last().copied()
    }

    /// True when each step loses no more than `rel_tol` of the previous value.
    pub fn is_monotone(&self, rel_tol: f64) -> bool {
        self.sum_rates_bps.windows(2).all(|w| {
            let prev = to_f64(w[0]);
            let next = to_f64(w[1]);
            next >= prev - rel_tol * prev.abs().max(1.0)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_checks_relative_slack() {
        let trace = ConvergenceTrace {
            sum_rates_bps: vec![1.0, 2.0, 2.0 - 1e-12],
            converged_at: Some(3),
        };
        assert!(trace.is_monotone(1e-9));
        let bad = ConvergenceTrace {
            sum_rates_bps: vec![2.0, 1.0],
            converged_at: None,
        };
        assert!(!bad.is_monotone(1e-9));
        assert_eq!(bad.final_sum_rate_bps(), Some(1.0));
        assert_eq!(bad.len(), 2);
    }
}
