//! Minimal row-compressed complex matrix.
//!
//! Ladder operators couple at most three occupations per row, so products of
//! a few generators stay sparse and the operator identities can be checked
//! at N = 50 without forming dense 1326 x 1326 products.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    // each row sorted by column, no duplicate columns, no explicit zeros
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            rows: vec![Vec::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![1.0; dim])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let rows = diag
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                if d == 0.0 {
                    Vec::new()
                } else {
                    vec![(i, Complex64::new(d, 0.0))]
                }
            })
            .collect();
        Self {
            dim: diag.len(),
            rows,
        }
    }

    /// Assembles a matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut acc: Vec<BTreeMap<usize, Complex64>> = vec![BTreeMap::new(); dim];
        for (i, j, v) in triplets {
            assert!(i < dim && j < dim, "triplet ({i}, {j}) outside {dim}x{dim}");
            *acc[i].entry(j).or_default() += v;
        }
        Self::from_row_maps(dim, acc)
    }

    fn from_row_maps(dim: usize, acc: Vec<BTreeMap<usize, Complex64>>) -> Self {
        let rows = acc
            .into_iter()
            .map(|row| row.into_iter().filter(|(_, v)| *v != Complex64::default()).collect())
            .collect();
        Self { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, Complex64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map(|k| self.rows[i][k].1)
            .unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(j, v)| (i, j, v)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&(j, v)| (j, v * s))
                    .filter(|(_, v)| *v != Complex64::default())
                    .collect()
            })
            .collect();
        Self { dim: self.dim, rows }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// `self + s * other`
    pub fn add_scaled(&self, other: &SparseMatrix, s: Complex64) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_triplets(
            self.dim,
            self.iter().chain(other.iter().map(|(i, j, v)| (i, j, v * s))),
        )
    }

    pub fn add(&self, other: &SparseMatrix) -> Self {
        self.add_scaled(other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &SparseMatrix) -> Self {
        self.add_scaled(other, Complex64::new(-1.0, 0.0))
    }

    /// Adds `s` times the identity.
    pub fn shift(&self, s: f64) -> Self {
        self.add(&Self::identity(self.dim).scale_real(s))
    }

    pub fn matmul(&self, other: &SparseMatrix) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut acc: Vec<BTreeMap<usize, Complex64>> = vec![BTreeMap::new(); self.dim];
        for (i, row) in self.rows.iter().enumerate() {
            for &(k, a) in row {
                for &(j, b) in &other.rows[k] {
                    *acc[i].entry(j).or_default() += a * b;
                }
            }
        }
        Self::from_row_maps(self.dim, acc)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.iter().map(|(i, j, v)| (j, i, v.conj())))
    }

    pub fn commutator(&self, other: &SparseMatrix) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, a)| a * v[j]).sum())
            .collect()
    }

    /// `<v| self |v>` without normalization.
    pub fn quadratic_form(&self, v: &[Complex64]) -> Complex64 {
        assert_eq!(v.len(), self.dim);
        self.rows
            .iter()
            .zip(v)
            .map(|(row, vi)| {
                let av: Complex64 = row.iter().map(|&(j, a)| a * v[j]).sum();
                vi.conj() * av
            })
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    pub fn is_real(&self) -> bool {
        self.iter().all(|(_, _, v)| v.im == 0.0)
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
        }
        m
    }

    /// Real part as a dense matrix; only meaningful when [`Self::is_real`].
    pub fn to_dense_real(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v.re;
        }
        m
    }

    pub fn mul_dense_vec(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        DVector::from_vec(self.mul_vec(v.as_slice()))
    }
}
