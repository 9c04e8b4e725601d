//! Fock basis of three bosonic modes at fixed total particle number.
//!
//! States are stored as occupation pairs `(n1, n2)`; the third occupation
//! `n3 = N - n1 - n2` is always derived, so every basis vector carries the
//! same total number.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Default cap on the atom number accepted by [`FockBasis::new`].
pub const DEFAULT_MAX_ATOMS: usize = 500;

/// Occupation numbers `(n1, n2, n3)` of a three-mode number state.
pub type Occupation = [usize; 3];

#[derive(Debug, Clone)]
pub struct FockBasis {
    total_n: usize,
    states: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
}

impl FockBasis {
    /// Builds the basis for `total_n` atoms, rejecting anything above
    /// [`DEFAULT_MAX_ATOMS`].
    pub fn new(total_n: usize) -> Result<Self> {
        Self::with_max(total_n, DEFAULT_MAX_ATOMS)
    }

    /// Builds the basis with an explicit atom-number cap.
    ///
    /// States are ordered lexicographically in `(n1, n2)`.
    pub fn with_max(total_n: usize, max_atoms: usize) -> Result<Self> {
        if total_n > max_atoms {
            return Err(Error::TooManyAtoms {
                requested: total_n,
                max: max_atoms,
            });
        }
        let dim = dimension_for(total_n);
        let mut states = Vec::with_capacity(dim);
        for n1 in 0..=total_n {
            for n2 in 0..=(total_n - n1) {
                states.push((n1, n2));
            }
        }
        let index = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(Self {
            total_n,
            states,
            index,
        })
    }

    pub fn total_n(&self) -> usize {
        self.total_n
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[(usize, usize)] {
        &self.states
    }

    /// Full occupation triple of basis state `i`.
    pub fn occupation(&self, i: usize) -> Occupation {
        let (n1, n2) = self.states[i];
        [n1, n2, self.total_n - n1 - n2]
    }

    pub fn index_of(&self, n1: usize, n2: usize) -> Result<usize> {
        self.index
            .get(&(n1, n2))
            .copied()
            .ok_or(Error::InvalidOccupation {
                n1,
                n2,
                total_n: self.total_n,
            })
    }

    /// Index of the state with the given full occupation triple.
    pub fn index_of_occupation(&self, occ: Occupation) -> Result<usize> {
        if occ.iter().sum::<usize>() != self.total_n {
            return Err(Error::InvalidOccupation {
                n1: occ[0],
                n2: occ[1],
                total_n: self.total_n,
            });
        }
        self.index_of(occ[0], occ[1])
    }

    /// Two bases are interchangeable when they describe the same sector.
    pub fn same_sector(&self, other: &FockBasis) -> bool {
        self.total_n == other.total_n
    }
}

/// `(N+1)(N+2)/2`, the number of ways to place `N` bosons in three modes.
pub fn dimension_for(total_n: usize) -> usize {
    (total_n + 1) * (total_n + 2) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_sector() {
        let b = FockBasis::new(0).unwrap();
        assert_eq!(b.dim(), 1);
        assert_eq!(b.states(), &[(0, 0)]);
        assert_eq!(b.occupation(0), [0, 0, 0]);
    }

    #[test]
    fn single_atom_ordering() {
        let b = FockBasis::new(1).unwrap();
        assert_eq!(b.states(), &[(0, 0), (0, 1), (1, 0)]);
        assert_eq!(b.index_of(0, 0).unwrap(), 0);
        assert_eq!(b.occupation(0), [0, 0, 1]);
    }

    #[test]
    fn fifty_atoms_by_counting() {
        let b = FockBasis::new(50).unwrap();
        let mut count = 0;
        for n1 in 0..=50usize {
            for n2 in 0..=50usize {
                if n1 + n2 <= 50 {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 1326);
        assert_eq!(b.dim(), count);
        let e1 = b.index_of(0, 0).unwrap();
        assert_eq!(b.occupation(e1), [0, 0, 50]);
    }

    #[test]
    fn out_of_range_occupation() {
        let b = FockBasis::new(2).unwrap();
        let err = b.index_of(3, 0).unwrap_err();
        assert!(err.to_string().contains("(3, 0)"), "{err}");
        assert!(b.index_of_occupation([1, 1, 1]).is_err());
        assert_eq!(b.index_of_occupation([1, 1, 0]).unwrap(), b.index_of(1, 1).unwrap());
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(
            FockBasis::new(501),
            Err(Error::TooManyAtoms { requested: 501, max: 500 })
        ));
        assert!(FockBasis::with_max(501, 600).is_ok());
    }

    #[test]
    fn bijection_and_dimension_up_to_sixty() {
        for n in 0..=60 {
            let b = FockBasis::new(n).unwrap();
            assert_eq!(b.dim(), dimension_for(n));
            for (i, &(n1, n2)) in b.states().iter().enumerate() {
                assert_eq!(b.index_of(n1, n2).unwrap(), i);
            }
            let exhaustive = (0..=n).flat_map(|a| (0..=n).map(move |c| (a, c)))
                .filter(|(a, c)| a + c <= n)
                .count();
            assert_eq!(exhaustive, b.dim());
        }
    }
}
