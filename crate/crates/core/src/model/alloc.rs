//! Paired subcarrier-assignment and power matrices.

use ndarray::Array2;

use super::ModelError;
use crate::scalar::Scalar;

/// A joint allocation: a binary K x N assignment mask and a K x N power
/// matrix in watts. Power is carried only on assigned pairs; the constructor
/// zeroes any power a caller leaves on an unassigned pair.
///
/// Exclusivity and the power budget are *not* enforced here: solvers need to
/// evaluate infeasible candidates, so those checks live in
/// [`check_constraints`](super::check_constraints) and report violations as
/// data.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation<T> {
    assignment: Array2<bool>,
    power: Array2<T>,
}

impl<T: Scalar> Allocation<T> {
    pub fn new(assignment: Array2<bool>, mut power: Array2<T>) -> Result<Self, ModelError> {
        if assignment.dim() != power.dim() {
            let (rows, cols) = power.dim();
            let (expected_rows, expected_cols) = assignment.dim();
            return Err(ModelError::DimensionMismatch {
                expected_rows,
                expected_cols,
                rows,
                cols,
            });
        }
        for ((user, subcarrier), p) in power.indexed_iter_mut() {
            if !p.is_finite() || *p < T::zero() {
                return Err(ModelError::InvalidPower { user, subcarrier });
            }
            if !assignment[[user, subcarrier]] {
                *p = T::zero();
            }
        }
        Ok(Self { assignment, power })
    }

    /// All-zero allocation of the given shape.
    pub fn empty(n_users: usize, n_subcarriers: usize) -> Self {
        Self {
            assignment: Array2::from_elem((n_users, n_subcarriers), false),
            power: Array2::from_elem((n_users, n_subcarriers), T::zero()),
        }
    }

    /// One-to-one allocation: user `k` holds subcarrier `mapping[k]` with
    /// power `power_per_user[k]`.
    pub fn from_mapping(
        mapping: &[usize],
        power_per_user: &[T],
        n_subcarriers: usize,
    ) -> Result<Self, ModelError> {
        if mapping.len() != power_per_user.len() {
            return Err(ModelError::DimensionMismatch {
                expected_rows: mapping.len(),
                expected_cols: 1,
                rows: power_per_user.len(),
                cols: 1,
            });
        }
        let k = mapping.len();
        let mut assignment = Array2::from_elem((k, n_subcarriers), false);
        let mut power = Array2::from_elem((k, n_subcarriers), T::zero());
        for (user, (&subcarrier, &p)) in mapping.iter().zip(power_per_user).enumerate() {
            if subcarrier >= n_subcarriers {
                return Err(ModelError::InvalidConfig(format!(
                    "user {user} mapped to subcarrier {subcarrier} of {n_subcarriers}"
                )));
            }
            assignment[[user, subcarrier]] = true;
            power[[user, subcarrier]] = p;
        }
        Allocation::new(assignment, power)
    }

    pub fn n_users(&self) -> usize {
        self.assignment.nrows()
    }

    pub fn n_subcarriers(&self) -> usize {
        self.assignment.ncols()
    }

    pub fn assignment(&self) -> &Array2<bool> {
        &self.assignment
    }

    pub fn power(&self) -> &Array2<T> {
        &self.power
    }

    pub fn is_assigned(&self, user: usize, subcarrier: usize) -> bool {
        self.assignment[[user, subcarrier]]
    }

    /// Total transmit power over assigned pairs, in watts.
    pub fn total_power(&self) -> T {
        self.power.iter().copied().sum()
    }

    /// Assigned `(user, subcarrier, power)` triples in row-major order.
    pub fn assigned_pairs(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.assignment
            .indexed_iter()
            .filter(|(_, &a)| a)
            .map(|((k, n), _)| (k, n, self.power[[k, n]]))
    }

    /// True when every subcarrier column carries at most one assignment.
    pub fn is_exclusive(&self) -> bool {
        (0..self.n_subcarriers())
            .all(|n| self.assignment.column(n).iter().filter(|&&a| a).count() <= 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masks_unassigned_power() {
        let assignment = Array2::from_shape_vec((2, 2), vec![true, false, false, true]).unwrap();
        let power = Array2::from_elem((2, 2), 1.0);
        let alloc = Allocation::new(assignment, power).unwrap();
        assert_eq!(alloc.power()[[0, 1]], 0.0);
        assert_eq!(alloc.power()[[0, 0]], 1.0);
        assert_eq!(alloc.total_power(), 2.0);
        assert!(alloc.is_exclusive());
    }

    #[test]
    fn rejects_negative_power_and_shape_mismatch() {
        let assignment = Array2::from_elem((2, 2), true);
        let power = Array2::from_elem((2, 2), -1.0);
        assert!(Allocation::new(assignment, power).is_err());

        let assignment = Array2::from_elem((2, 2), true);
        let power = Array2::from_elem((2, 3), 1.0);
        assert!(Allocation::new(assignment, power).is_err());
    }

    #[test]
    fn mapping_constructor_places_users() {
        let alloc = Allocation::from_mapping(&[2, 0], &[1.5, 0.5], 3).unwrap();
        assert!(alloc.is_assigned(0, 2));
        assert!(alloc.is_assigned(1, 0));
        assert_eq!(alloc.power()[[0, 2]], 1.5);
        assert_eq!(alloc.assigned_pairs().count(), 2);
        assert!(Allocation::from_mapping(&[3], &[1.0], 3).is_err());
    }

    #[test]
    fn non_exclusive_column_detected() {
        let assignment = Array2::from_shape_vec((2, 2), vec![true, false, true, false]).unwrap();
        let power = Array2::from_elem((2, 2), 1.0);
        let alloc = Allocation::new(assignment, power).unwrap();
        assert!(!alloc.is_exclusive());
    }
}
