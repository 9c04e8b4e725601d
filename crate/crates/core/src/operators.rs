//! SU(3) generators built from Schwinger bosons on a [`FockBasis`].
//!
//! With mode pairs `(k, j)` in `{(1,2), (2,3), (3,1)}`:
//!
//! ```text
//! X1 = n1 - n2            X2 = (n1 + n2 - 2 n3) / 3
//! Yk = i (ck' cj - cj' ck)  Zk = ck' cj + cj' ck
//! ```
//!
//! The Casimir is normalized as `sum_k (Yk^2 + Zk^2) + X1^2 + 3 X2^2`, which
//! is the Gell-Mann sum `sum_a (c' lambda_a c)^2` and equals `4N(N/3 + 1)` on
//! the fixed-N sector.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::basis::FockBasis;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Mode pairs `(k, j)` for `Yk`/`Zk`, zero-based.
pub const MODE_PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    X1,
    X2,
    Y1,
    Y2,
    Y3,
    Z1,
    Z2,
    Z3,
}

impl Generator {
    pub const ALL: [Generator; 8] = [
        Generator::X1,
        Generator::X2,
        Generator::Y1,
        Generator::Y2,
        Generator::Y3,
        Generator::Z1,
        Generator::Z2,
        Generator::Z3,
    ];

    pub fn y(k: usize) -> Generator {
        [Generator::Y1, Generator::Y2, Generator::Y3][k]
    }

    pub fn z(k: usize) -> Generator {
        [Generator::Z1, Generator::Z2, Generator::Z3][k]
    }

    pub fn name(self) -> &'static str {
        match self {
            Generator::X1 => "X1",
            Generator::X2 => "X2",
            Generator::Y1 => "Y1",
            Generator::Y2 => "Y2",
            Generator::Y3 => "Y3",
            Generator::Z1 => "Z1",
            Generator::Z2 => "Z2",
            Generator::Z3 => "Z3",
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Generator::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

/// Physical parameters of the three-mode Hamiltonian.
///
/// `big_omega` is the tunnelling rate and `chi` the on-site interaction; the
/// attractive regime has both negative, so `r = big_omega / (N chi) >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub total_n: usize,
    pub omega: f64,
    pub big_omega: f64,
    pub chi: f64,
}

impl ModelParams {
    pub fn new(total_n: usize, omega: f64, big_omega: f64, chi: f64) -> Result<Self> {
        if !(omega.is_finite() && big_omega.is_finite() && chi.is_finite()) {
            return Err(Error::InvalidParams("frequencies must be finite".into()));
        }
        if big_omega * chi < 0.0 {
            return Err(Error::InvalidParams(format!(
                "tunnelling {big_omega} and interaction {chi} must share a sign so that r >= 0"
            )));
        }
        Ok(Self {
            total_n,
            omega,
            big_omega,
            chi,
        })
    }

    /// Preset with `|Omega| = 1` carrying `omega_sign`, and `chi = Omega / (r N)`.
    ///
    /// `r = 0` keeps the interaction with the same sign and `|chi| N = 1`.
    pub fn from_ratio(total_n: usize, r: f64, omega_sign: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidRatio {
                value: r,
                requirement: "finite and >= 0",
            });
        }
        if total_n == 0 {
            return Err(Error::InvalidParams("ratio presets need at least one atom".into()));
        }
        let sign = if omega_sign < 0.0 { -1.0 } else { 1.0 };
        let n = total_n as f64;
        if r == 0.0 {
            Self::new(total_n, 0.0, 0.0, sign / n)
        } else {
            Self::new(total_n, 0.0, sign, sign / (r * n))
        }
    }

    /// `Omega / (N chi)`, undefined for an empty sector or vanishing interaction.
    pub fn ratio(&self) -> Option<f64> {
        if self.total_n == 0 || self.chi == 0.0 {
            None
        } else {
            Some(self.big_omega / (self.total_n as f64 * self.chi))
        }
    }

    /// Rate that converts lab time to the dimensionless time `tau`.
    ///
    /// `|Omega|` when tunnelling is present, otherwise `|chi| N`, otherwise 1.
    pub fn time_scale(&self) -> f64 {
        if self.big_omega != 0.0 {
            self.big_omega.abs()
        } else if self.chi != 0.0 && self.total_n > 0 {
            self.chi.abs() * self.total_n as f64
        } else {
            1.0
        }
    }
}

/// A Hermitian observable in the Fock basis of one particle-number sector.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    label: String,
    total_n: usize,
    matrix: SparseMatrix,
}

impl OperatorMatrix {
    pub fn new(label: impl Into<String>, total_n: usize, matrix: SparseMatrix) -> Self {
        Self {
            label: label.into(),
            total_n,
            matrix,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn total_n(&self) -> usize {
        self.total_n
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn check_sector(&self, other: &OperatorMatrix) -> Result<()> {
        if self.total_n != other.total_n {
            return Err(Error::SectorMismatch {
                left: self.total_n,
                right: other.total_n,
            });
        }
        Ok(())
    }

    pub fn ensure_hermitian(&self, tol: f64) -> Result<()> {
        let deviation = self.matrix.hermitian_deviation();
        if deviation > tol * self.matrix.max_abs().max(1.0) {
            return Err(Error::NotHermitian {
                label: self.label.clone(),
                deviation,
            });
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.label.clone(), self.total_n, self.matrix.scale_real(s))
    }

    pub fn sum(&self, other: &OperatorMatrix) -> Result<Self> {
        self.check_sector(other)?;
        Ok(Self::new(
            format!("{}+{}", self.label, other.label),
            self.total_n,
            self.matrix.add(&other.matrix),
        ))
    }
}

/// Matrix of `c_k^dagger c_j` (zero-based modes).
pub fn hopping(basis: &FockBasis, k: usize, j: usize) -> SparseMatrix {
    let triplets = (0..basis.dim()).filter_map(|col| {
        let mut occ = basis.occupation(col);
        if occ[j] == 0 {
            return None;
        }
        let amp = (((occ[k] + 1) * occ[j]) as f64).sqrt();
        if k == j {
            return Some((col, col, Complex64::new(occ[k] as f64, 0.0)));
        }
        occ[k] += 1;
        occ[j] -= 1;
        let row = basis
            .index_of_occupation(occ)
            .expect("ladder move stays in the sector");
        Some((row, col, Complex64::new(amp, 0.0)))
    });
    SparseMatrix::from_triplets(basis.dim(), triplets)
}

fn diagonal_from(basis: &FockBasis, f: impl Fn([usize; 3]) -> f64) -> SparseMatrix {
    let diag: Vec<f64> = (0..basis.dim()).map(|i| f(basis.occupation(i))).collect();
    SparseMatrix::from_diagonal(&diag)
}

pub fn generator(basis: &FockBasis, g: Generator) -> OperatorMatrix {
    let n = basis.total_n();
    let matrix = match g {
        Generator::X1 => diagonal_from(basis, |o| o[0] as f64 - o[1] as f64),
        Generator::X2 => diagonal_from(basis, |o| (o[0] as f64 + o[1] as f64 - 2.0 * o[2] as f64) / 3.0),
        Generator::Y1 | Generator::Y2 | Generator::Y3 | Generator::Z1 | Generator::Z2 | Generator::Z3 => {
            let k = match g {
                Generator::Y1 | Generator::Z1 => 0,
                Generator::Y2 | Generator::Z2 => 1,
                _ => 2,
            };
            let (a, b) = MODE_PAIRS[k];
            let up = hopping(basis, a, b);
            let down = hopping(basis, b, a);
            if matches!(g, Generator::Z1 | Generator::Z2 | Generator::Z3) {
                up.add(&down)
            } else {
                up.sub(&down).scale(Complex64::new(0.0, 1.0))
            }
        }
    };
    OperatorMatrix::new(g.name(), n, matrix)
}

/// Generator lookup by name, e.g. `"Y2"`.
pub fn generator_by_name(basis: &FockBasis, label: &str) -> Result<OperatorMatrix> {
    Ok(generator(basis, label.parse()?))
}

pub fn number_operator(basis: &FockBasis) -> OperatorMatrix {
    OperatorMatrix::new(
        "N",
        basis.total_n(),
        diagonal_from(basis, |o| (o[0] + o[1] + o[2]) as f64),
    )
}

/// `Ys = Y1 + Y2 + Y3`, the circulation around the triangle of wells.
pub fn angular_momentum(basis: &FockBasis) -> OperatorMatrix {
    let m = (0..3)
        .map(|k| generator(basis, Generator::y(k)).matrix)
        .reduce(|a, b| a.add(&b))
        .expect("three terms");
    OperatorMatrix::new("Ys", basis.total_n(), m)
}

fn check_params(basis: &FockBasis, params: &ModelParams) -> Result<()> {
    if basis.total_n() != params.total_n {
        return Err(Error::SectorMismatch {
            left: basis.total_n(),
            right: params.total_n,
        });
    }
    Ok(())
}

/// `Omega (Z1 + Z2 + Z3) + (chi / 2)(X1^2 + 3 X2^2)`; drives all dynamics.
pub fn hamiltonian_reduced(basis: &FockBasis, params: &ModelParams) -> Result<OperatorMatrix> {
    check_params(basis, params)?;
    let hop = (0..3)
        .map(|k| generator(basis, Generator::z(k)).matrix)
        .reduce(|a, b| a.add(&b))
        .expect("three terms");
    let interaction = diagonal_from(basis, |o| {
        let x1 = o[0] as f64 - o[1] as f64;
        let x2 = (o[0] as f64 + o[1] as f64 - 2.0 * o[2] as f64) / 3.0;
        0.5 * params.chi * (x1 * x1 + 3.0 * x2 * x2)
    });
    Ok(OperatorMatrix::new(
        "H",
        basis.total_n(),
        hop.scale_real(params.big_omega).add(&interaction),
    ))
}

/// The three-mode Hamiltonian before dropping number-dependent constants.
///
/// Equals [`hamiltonian_reduced`] plus `(omega N + chi N^2 / 3 - chi N)` times
/// the identity.
pub fn hamiltonian_full(basis: &FockBasis, params: &ModelParams) -> Result<OperatorMatrix> {
    check_params(basis, params)?;
    let mut triplets = Vec::new();
    for j in 0..3 {
        for k in 0..3 {
            if j != k {
                triplets.extend(hopping(basis, j, k).iter());
            }
        }
    }
    let hop = SparseMatrix::from_triplets(basis.dim(), triplets);
    let onsite = diagonal_from(basis, |o| {
        let n = (o[0] + o[1] + o[2]) as f64;
        let pairs: f64 = o.iter().map(|&m| (m * m.saturating_sub(1)) as f64).sum();
        params.omega * n + params.chi * pairs
    });
    Ok(OperatorMatrix::new(
        "H_full",
        basis.total_n(),
        hop.scale_real(params.big_omega).add(&onsite),
    ))
}

/// Scalar the Casimir takes on the sector with `n` atoms.
pub fn casimir_value(n: usize) -> f64 {
    let n = n as f64;
    4.0 * n * (n / 3.0 + 1.0)
}

pub fn casimir(basis: &FockBasis) -> OperatorMatrix {
    let sq = |g: Generator| {
        let m = generator(basis, g).matrix;
        m.matmul(&m)
    };
    let mut acc = sq(Generator::X1).add(&sq(Generator::X2).scale_real(3.0));
    for k in 0..3 {
        acc = acc.add(&sq(Generator::y(k))).add(&sq(Generator::z(k)));
    }
    OperatorMatrix::new("Casimir", basis.total_n(), acc)
}

/// Max entrywise residual of each quadratic identity between the diagonal
/// generators and `Yk^2 + Zk^2`, absolute and relative to the largest entry
/// of the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    pub total_n: usize,
    pub absolute: [f64; 3],
    pub relative: [f64; 3],
}

impl IdentityReport {
    pub fn max_relative(&self) -> f64 {
        self.relative.iter().copied().fold(0.0, f64::max)
    }
}

pub fn verify_identities(basis: &FockBasis) -> IdentityReport {
    let n = basis.total_n() as f64;
    let dim = basis.dim();
    let x1 = generator(basis, Generator::X1).matrix;
    let x2 = generator(basis, Generator::X2).matrix;
    let id = SparseMatrix::identity(dim);

    // 2N/3 + X2 + X1, 2N/3 + X2 - X1, N/3 - X2
    let p = x2.add(&x1).shift(2.0 * n / 3.0);
    let m = x2.sub(&x1).shift(2.0 * n / 3.0);
    let q = id.scale_real(n / 3.0).sub(&x2);

    let lhs = [
        p.matmul(&m)
            .add(&x2.scale_real(2.0))
            .shift(4.0 * n / 3.0),
        m.matmul(&q)
            .scale_real(2.0)
            .sub(&x2)
            .sub(&x1)
            .shift(4.0 * n / 3.0),
        p.matmul(&q)
            .scale_real(2.0)
            .sub(&x2)
            .add(&x1)
            .shift(4.0 * n / 3.0),
    ];

    let mut absolute = [0.0; 3];
    let mut relative = [0.0; 3];
    for k in 0..3 {
        let y = generator(basis, Generator::y(k)).matrix;
        let z = generator(basis, Generator::z(k)).matrix;
        let rhs = y.matmul(&y).add(&z.matmul(&z));
        absolute[k] = lhs[k].sub(&rhs).max_abs();
        relative[k] = absolute[k] / rhs.max_abs().max(1.0);
    }
    IdentityReport {
        total_n: basis.total_n(),
        absolute,
        relative,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    #[test]
    fn diagonal_generators_on_extreme_states() {
        let b = FockBasis::new(50).unwrap();
        let x1 = generator(&b, Generator::X1);
        let x2 = generator(&b, Generator::X2);
        let e2 = b.index_of(50, 0).unwrap();
        let e1 = b.index_of(0, 0).unwrap();
        assert_eq!(x1.matrix().get(e2, e2).re, 50.0);
        assert_relative_eq!(x2.matrix().get(e1, e1).re, -100.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn y1_squared_single_atom() {
        let b = FockBasis::new(1).unwrap();
        let y1 = generator(&b, Generator::Y1).matrix().to_dense();
        // c1'c2 - c2'c1 restricted to one particle is a plain 3x3 exchange
        // between |1,0,0> and |0,1,0>; brute-force its square.
        let i100 = b.index_of(1, 0).unwrap();
        let i010 = b.index_of(0, 1).unwrap();
        let mut expected = DMatrix::<Complex64>::zeros(3, 3);
        expected[(i100, i010)] = Complex64::new(0.0, 1.0);
        expected[(i010, i100)] = Complex64::new(0.0, -1.0);
        assert!((&y1 - &expected).norm() < 1e-15);
        let sq = &y1 * &y1;
        let eig = nalgebra::SymmetricEigen::new(sq).eigenvalues;
        for e in eig.iter() {
            assert!(e.abs() < 1e-12 || (e - 1.0).abs() < 1e-12, "eigenvalue {e}");
        }
    }

    #[test]
    fn hermitian_with_expected_structure() {
        let b = FockBasis::new(4).unwrap();
        for g in Generator::ALL {
            let op = generator(&b, g);
            assert_eq!(op.matrix().hermitian_deviation(), 0.0, "{g}");
            match g {
                Generator::Y1 | Generator::Y2 | Generator::Y3 => {
                    assert!(op.matrix().iter().all(|(_, _, v)| v.re == 0.0))
                }
                _ => assert!(op.matrix().is_real()),
            }
        }
    }

    #[test]
    fn unknown_label_rejected() {
        let b = FockBasis::new(2).unwrap();
        assert!(matches!(generator_by_name(&b, "W4"), Err(Error::UnknownLabel(_))));
        assert_eq!(generator_by_name(&b, "z3").unwrap().label(), "Z3");
    }

    #[test]
    fn diagonal_generators_commute_and_conserve_number() {
        let b = FockBasis::new(6).unwrap();
        let x1 = generator(&b, Generator::X1);
        let x2 = generator(&b, Generator::X2);
        assert_eq!(x1.matrix().commutator(x2.matrix()).max_abs(), 0.0);
        let n = number_operator(&b);
        for g in Generator::ALL {
            let c = generator(&b, g).matrix().commutator(n.matrix());
            assert!(c.max_abs() < 1e-12, "{g}");
        }
    }

    #[test]
    fn ground_state_energy_zero_tunnelling() {
        let n = 50;
        let b = FockBasis::new(n).unwrap();
        let p = ModelParams::new(n, 0.0, 0.0, -1.0).unwrap();
        let h = hamiltonian_reduced(&b, &p).unwrap();
        for (n1, n2) in [(0, 0), (50, 0), (0, 50)] {
            let i = b.index_of(n1, n2).unwrap();
            assert_relative_eq!(h.matrix().get(i, i).re, -5000.0 / 3.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn pure_hopping_single_atom_spectrum() {
        let b = FockBasis::new(1).unwrap();
        let omega = -0.7;
        let p = ModelParams::new(1, 0.0, omega, 0.0).unwrap();
        let h = hamiltonian_reduced(&b, &p).unwrap().matrix().to_dense_real();
        // The 3x3 all-to-all hopping matrix; brute-force characteristic check:
        // (2 Omega) on (1,1,1), (-Omega) on vectors summing to zero.
        let all = nalgebra::DVector::from_element(3, 1.0);
        assert!((&h * &all - &all * (2.0 * omega)).norm() < 1e-14);
        let v = nalgebra::DVector::from_vec(vec![1.0, -1.0, 0.0]);
        assert!((&h * &v - &v * (-omega)).norm() < 1e-14);
        let w = nalgebra::DVector::from_vec(vec![1.0, 1.0, -2.0]);
        assert!((&h * &w - &w * (-omega)).norm() < 1e-14);
        let mut eig: Vec<f64> = nalgebra::SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        let mut expected = vec![2.0 * omega, -omega, -omega];
        expected.sort_by(f64::total_cmp);
        for (a, e) in eig.iter().zip(&expected) {
            assert_relative_eq!(a, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn full_minus_reduced_is_scalar() {
        let n = 3;
        let b = FockBasis::new(n).unwrap();
        let p = ModelParams::new(n, 0.37, -1.3, -0.45).unwrap();
        let full = hamiltonian_full(&b, &p).unwrap();
        let red = hamiltonian_reduced(&b, &p).unwrap();
        let nf = n as f64;
        let shift = p.omega * nf + p.chi * nf * nf / 3.0 - p.chi * nf;
        let diff = full.matrix().sub(red.matrix()).sub(&SparseMatrix::identity(b.dim()).scale_real(shift));
        assert!(diff.max_abs() < 1e-12, "{}", diff.max_abs());
    }

    #[test]
    fn full_hamiltonian_edge_cases() {
        let b = FockBasis::new(3).unwrap();
        let zero = ModelParams::new(3, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(hamiltonian_full(&b, &zero).unwrap().matrix().nnz(), 0);

        let b1 = FockBasis::new(1).unwrap();
        let p = ModelParams::new(1, 0.0, 0.0, -4.2).unwrap();
        assert_eq!(hamiltonian_full(&b1, &p).unwrap().matrix().max_abs(), 0.0);
    }

    #[test]
    fn mismatched_sector_rejected() {
        let b = FockBasis::new(3).unwrap();
        let p = ModelParams::new(4, 0.0, -1.0, -0.1).unwrap();
        assert!(matches!(
            hamiltonian_reduced(&b, &p),
            Err(Error::SectorMismatch { left: 3, right: 4 })
        ));
        assert!(hamiltonian_full(&b, &p).is_err());
    }

    #[test]
    fn params_sign_rules() {
        assert!(ModelParams::new(10, 0.0, -1.0, 0.5).is_err());
        let p = ModelParams::from_ratio(50, 0.283, -1.0).unwrap();
        assert_relative_eq!(p.ratio().unwrap(), 0.283, max_relative = 1e-14);
        assert!(p.chi < 0.0 && p.big_omega == -1.0);
        let p0 = ModelParams::from_ratio(50, 0.0, -1.0).unwrap();
        assert_eq!(p0.big_omega, 0.0);
        assert_eq!(p0.ratio(), Some(0.0));
        assert_relative_eq!(p0.time_scale(), 1.0);
        assert!(ModelParams::from_ratio(50, -0.1, -1.0).is_err());
    }

    #[test]
    fn casimir_small_sectors() {
        let b0 = FockBasis::new(0).unwrap();
        assert_eq!(casimir(&b0).matrix().max_abs(), 0.0);
        let b1 = FockBasis::new(1).unwrap();
        let c = casimir(&b1);
        let diff = c.matrix().sub(&SparseMatrix::identity(3).scale_real(16.0 / 3.0));
        assert!(diff.max_abs() < 1e-12);
        assert_relative_eq!(casimir_value(50), 10600.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn identities_small_sectors() {
        let r0 = verify_identities(&FockBasis::new(0).unwrap());
        assert_eq!(r0.absolute, [0.0; 3]);
        let r2 = verify_identities(&FockBasis::new(2).unwrap());
        assert!(r2.absolute.iter().all(|&a| a <= 1e-12), "{r2:?}");
    }

    #[test]
    fn orbit_matrix_elements() {
        let n = 7;
        let b = FockBasis::new(n).unwrap();
        let e = [b.index_of(0, 0).unwrap(), b.index_of(n, 0).unwrap(), b.index_of(0, n).unwrap()];
        for j in 0..3 {
            let y = generator(&b, Generator::y(j)).matrix().clone();
            let z = generator(&b, Generator::z(j)).matrix().clone();
            let s = y.matmul(&y).add(&z.matmul(&z));
            for (i, &idx) in e.iter().enumerate() {
                let expected = if i == j { 0.0 } else { 2.0 * n as f64 };
                assert_relative_eq!(s.get(idx, idx).re, expected, epsilon = 1e-12);
            }
        }
    }
}
