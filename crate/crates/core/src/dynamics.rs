//! Exact quantum evolution by spectral decomposition.
//!
//! The Hamiltonian is diagonalized once; `|psi(tau)> = V exp(-i E tau / s) V' |psi(0)>`
//! where `s` is the rate that makes `tau` dimensionless (see
//! [`ModelParams::time_scale`]).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::FockBasis;
use crate::error::{Error, Result};
use crate::operators::{
    angular_momentum, generator, hamiltonian_reduced, Generator, ModelParams, OperatorMatrix,
};
use crate::series::TimeSeries;

/// Hermiticity tolerance relative to the largest matrix entry.
const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    total_n: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// Wraps amplitudes, rejecting vectors whose norm is not 1 within 1e-12.
    pub fn new(basis: &FockBasis, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::InvalidParams(format!(
                "state has {} amplitudes, basis has {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        let state = Self {
            total_n: basis.total_n(),
            amplitudes,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    pub fn basis_vector(basis: &FockBasis, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::default(); basis.dim()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self {
            total_n: basis.total_n(),
            amplitudes,
        }
    }

    pub fn total_n(&self) -> usize {
        self.total_n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `<psi|O|psi>`; the imaginary part vanishes for Hermitian `O`.
    pub fn expectation(&self, op: &OperatorMatrix) -> Result<f64> {
        if op.total_n() != self.total_n {
            return Err(Error::SectorMismatch {
                left: self.total_n,
                right: op.total_n(),
            });
        }
        Ok(op.matrix().quadratic_form(&self.amplitudes).re)
    }

    pub fn distance(&self, other: &QuantumState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// One of the three fully localized states `|e1> = |0,0,N>`,
/// `|e2> = |N,0,0>`, `|e3> = |0,N,0>`.
pub fn state_e(basis: &FockBasis, which: u8) -> Result<QuantumState> {
    let n = basis.total_n();
    let (n1, n2) = match which {
        1 => (0, 0),
        2 => (n, 0),
        3 => (0, n),
        other => return Err(Error::InvalidSelector(other)),
    };
    Ok(QuantumState::basis_vector(basis, basis.index_of(n1, n2)?))
}

/// Equal-weight superpositions of the localized states with the
/// `exp(+-2 pi i / 3)` phases that make them carry circulation.
pub fn state_g(basis: &FockBasis, which: u8) -> Result<QuantumState> {
    let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let one = Complex64::new(1.0, 0.0);
    let phases = match which {
        1 => [one, one, one],
        2 => [w.conj(), one, w],
        3 => [w.conj(), w, one],
        other => return Err(Error::InvalidSelector(other)),
    };
    if basis.total_n() == 0 {
        return Err(Error::InvalidParams(
            "superposition states need N >= 1 (the localized states coincide at N = 0)".into(),
        ));
    }
    let mut amplitudes = vec![Complex64::default(); basis.dim()];
    let s = 1.0 / 3f64.sqrt();
    for (k, phase) in phases.into_iter().enumerate() {
        let e = state_e(basis, k as u8 + 1)?;
        for (a, b) in amplitudes.iter_mut().zip(e.amplitudes()) {
            *a += phase * b * s;
        }
    }
    QuantumState::new(basis, amplitudes)
}

/// Parses `e1`..`e3` / `g1`..`g3`.
pub fn named_state(basis: &FockBasis, name: &str) -> Result<QuantumState> {
    let lower = name.to_ascii_lowercase();
    let (family, idx) = lower.split_at(lower.len().min(1));
    let which: u8 = idx.parse().map_err(|_| Error::UnknownLabel(name.to_string()))?;
    match family {
        "e" => state_e(basis, which),
        "g" => state_g(basis, which),
        _ => Err(Error::UnknownLabel(name.to_string())),
    }
}

#[derive(Debug, Clone)]
enum Eigenvectors {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

/// A quantity recorded along a propagation.
#[derive(Debug, Clone)]
pub enum Observable {
    /// `<psi|O|psi>` recorded under the operator's label.
    Operator(OperatorMatrix),
    /// `||psi||` recorded as `norm`.
    Norm,
}

impl Observable {
    pub fn label(&self) -> &str {
        match self {
            Observable::Operator(op) => op.label(),
            Observable::Norm => "norm",
        }
    }
}

/// Eigendecomposition of a Hamiltonian, reusable for any number of
/// initial states and output times.
#[derive(Debug, Clone)]
pub struct Propagator {
    total_n: usize,
    time_scale: f64,
    energies: Vec<f64>,
    vectors: Eigenvectors,
}

impl Propagator {
    /// Diagonalizes `hamiltonian`; real symmetric input takes the real path.
    pub fn new(hamiltonian: &OperatorMatrix, time_scale: f64) -> Result<Self> {
        hamiltonian.ensure_hermitian(HERMITIAN_TOL)?;
        if !(time_scale.is_finite() && time_scale > 0.0) {
            return Err(Error::InvalidParams(format!("time scale must be positive, got {time_scale}")));
        }
        let (energies, vectors) = if hamiltonian.matrix().is_real() {
            let eig = SymmetricEigen::new(hamiltonian.matrix().to_dense_real());
            (eig.eigenvalues.iter().copied().collect(), Eigenvectors::Real(eig.eigenvectors))
        } else {
            let eig = SymmetricEigen::new(hamiltonian.matrix().to_dense());
            (eig.eigenvalues.iter().copied().collect(), Eigenvectors::Complex(eig.eigenvectors))
        };
        Ok(Self {
            total_n: hamiltonian.total_n(),
            time_scale,
            energies,
            vectors,
        })
    }

    pub fn for_params(basis: &FockBasis, params: &ModelParams) -> Result<Self> {
        let h = hamiltonian_reduced(basis, params)?;
        Self::new(&h, params.time_scale())
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    fn check(&self, state: &QuantumState) -> Result<()> {
        if state.total_n != self.total_n {
            return Err(Error::SectorMismatch {
                left: self.total_n,
                right: state.total_n,
            });
        }
        Ok(())
    }

    /// Coordinates of `state` in the eigenbasis.
    fn to_eigenbasis(&self, state: &QuantumState) -> DVector<Complex64> {
        let psi = DVector::from_column_slice(&state.amplitudes);
        match &self.vectors {
            Eigenvectors::Real(v) => {
                let re = v.tr_mul(&psi.map(|c| c.re));
                let im = v.tr_mul(&psi.map(|c| c.im));
                re.zip_map(&im, Complex64::new)
            }
            Eigenvectors::Complex(v) => v.ad_mul(&psi),
        }
    }

    fn from_eigenbasis(&self, coeffs: &DVector<Complex64>) -> Vec<Complex64> {
        match &self.vectors {
            Eigenvectors::Real(v) => {
                let re = v * coeffs.map(|c| c.re);
                let im = v * coeffs.map(|c| c.im);
                re.iter().zip(im.iter()).map(|(&a, &b)| Complex64::new(a, b)).collect()
            }
            Eigenvectors::Complex(v) => (v * coeffs).iter().copied().collect(),
        }
    }

    fn phase_rotate(&self, coeffs: &DVector<Complex64>, tau: f64) -> DVector<Complex64> {
        let t = tau / self.time_scale;
        DVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(&self.energies)
                .map(|(c, &e)| c * Complex64::from_polar(1.0, -e * t)),
        )
    }

    /// State after dimensionless time `tau` (negative values run backwards).
    pub fn evolve(&self, initial: &QuantumState, tau: f64) -> Result<QuantumState> {
        self.check(initial)?;
        let coeffs = self.to_eigenbasis(initial);
        Ok(QuantumState {
            total_n: self.total_n,
            amplitudes: self.from_eigenbasis(&self.phase_rotate(&coeffs, tau)),
        })
    }

    /// Records every observable at every time. Output times are evaluated
    /// independently (in parallel), so the result does not depend on the
    /// thread count.
    pub fn propagate(
        &self,
        initial: &QuantumState,
        times: &[f64],
        observables: &[Observable],
    ) -> Result<TimeSeries> {
        self.check(initial)?;
        validate_times(times)?;
        for obs in observables {
            if let Observable::Operator(op) = obs {
                if op.total_n() != self.total_n {
                    return Err(Error::SectorMismatch {
                        left: self.total_n,
                        right: op.total_n(),
                    });
                }
            }
        }
        let coeffs = self.to_eigenbasis(initial);
        let rows: Vec<Vec<f64>> = times
            .par_iter()
            .map(|&tau| {
                let psi = self.from_eigenbasis(&self.phase_rotate(&coeffs, tau));
                observables
                    .iter()
                    .map(|obs| match obs {
                        Observable::Operator(op) => op.matrix().quadratic_form(&psi).re,
                        Observable::Norm => psi.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt(),
                    })
                    .collect()
            })
            .collect();
        let labels = observables.iter().map(|o| o.label().to_string()).collect();
        TimeSeries::from_rows(times.to_vec(), labels, &rows)
    }
}

pub(crate) fn validate_times(times: &[f64]) -> Result<()> {
    if let Some(bad) = times.iter().find(|t| !t.is_finite() || **t < 0.0) {
        return Err(Error::InvalidTimes(format!("time {bad} is negative or not finite")));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTimes("times must be strictly increasing".into()));
    }
    Ok(())
}

/// Convenience wrapper: diagonalize and propagate in one call.
pub fn propagate(
    hamiltonian: &OperatorMatrix,
    time_scale: f64,
    initial: &QuantumState,
    times: &[f64],
    observables: &[Observable],
) -> Result<TimeSeries> {
    Propagator::new(hamiltonian, time_scale)?.propagate(initial, times, observables)
}

/// `op / N` relabelled, for population-like observables.
pub fn per_atom(op: OperatorMatrix, label: &str) -> OperatorMatrix {
    let n = op.total_n().max(1) as f64;
    op.scaled(1.0 / n).with_label(label)
}

/// Default recorded quantities: `x1_over_n, x2_over_n, ys_over_n, energy, norm`.
pub fn default_observables(basis: &FockBasis, params: &ModelParams) -> Result<Vec<Observable>> {
    Ok(vec![
        Observable::Operator(per_atom(generator(basis, Generator::X1), "x1_over_n")),
        Observable::Operator(per_atom(generator(basis, Generator::X2), "x2_over_n")),
        Observable::Operator(per_atom(angular_momentum(basis), "ys_over_n")),
        Observable::Operator(hamiltonian_reduced(basis, params)?.with_label("energy")),
        Observable::Norm,
    ])
}

/// Every label [`observable_by_label`] understands.
pub const OBSERVABLE_LABELS: [&str; 12] = [
    "x1_over_n",
    "x2_over_n",
    "y1_over_n",
    "y2_over_n",
    "y3_over_n",
    "z1_over_n",
    "z2_over_n",
    "z3_over_n",
    "ys_over_n",
    "number",
    "energy",
    "norm",
];

pub fn observable_by_label(basis: &FockBasis, params: &ModelParams, label: &str) -> Result<Observable> {
    let obs = match label {
        "norm" => Observable::Norm,
        "energy" => Observable::Operator(hamiltonian_reduced(basis, params)?.with_label("energy")),
        "number" => Observable::Operator(crate::operators::number_operator(basis).with_label("number")),
        "ys_over_n" => Observable::Operator(per_atom(angular_momentum(basis), label)),
        other => {
            let g = other
                .strip_suffix("_over_n")
                .ok_or_else(|| Error::UnknownLabel(other.to_string()))?;
            Observable::Operator(per_atom(generator(basis, g.parse()?), other))
        }
    };
    Ok(obs)
}

/// `<Ys>/N` along the evolution of `initial` under the reduced Hamiltonian.
pub fn angular_momentum_series(params: &ModelParams, times: &[f64], initial: &QuantumState) -> Result<TimeSeries> {
    let basis = FockBasis::with_max(params.total_n, params.total_n.max(crate::basis::DEFAULT_MAX_ATOMS))?;
    let obs = Observable::Operator(per_atom(angular_momentum(&basis), "ys_over_n"));
    Propagator::for_params(&basis, params)?.propagate(initial, times, &[obs])
}

/// Half peak-to-peak amplitude of `values` over consecutive windows of
/// `window` samples; a trailing partial window is dropped.
pub fn windowed_amplitude(values: &[f64], window: usize) -> Vec<f64> {
    assert!(window > 0);
    values
        .chunks_exact(window)
        .map(|w| {
            let (lo, hi) = w
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            0.5 * (hi - lo)
        })
        .collect()
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Collapse and revival read off a windowed amplitude envelope.
///
/// Collapse is the first window below half the initial amplitude. From there
/// on, the revival is the largest rise of the envelope above its running
/// minimum, so a slow decay never counts as recovery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseRevival {
    pub initial_amplitude: f64,
    pub collapse_window: Option<usize>,
    /// Envelope minimum preceding the revival peak.
    pub minimum_window: Option<usize>,
    pub minimum_amplitude: f64,
    pub revival_window: Option<usize>,
    pub revival_amplitude: f64,
}

impl CollapseRevival {
    pub fn from_envelope(envelope: &[f64]) -> Self {
        let initial_amplitude = envelope.first().copied().unwrap_or(0.0);
        let collapse_window = envelope.iter().position(|&a| a < 0.5 * initial_amplitude);
        let mut out = Self {
            initial_amplitude,
            collapse_window,
            minimum_window: None,
            minimum_amplitude: f64::NAN,
            revival_window: None,
            revival_amplitude: f64::NAN,
        };
        let Some(c) = collapse_window else {
            return out;
        };
        let mut running_min = c;
        let mut best = (c, c);
        for k in c..envelope.len() {
            if envelope[k] < envelope[running_min] {
                running_min = k;
            }
            if envelope[k] - envelope[running_min] > envelope[best.1] - envelope[best.0] {
                best = (running_min, k);
            }
        }
        out.minimum_window = Some(best.0);
        out.minimum_amplitude = envelope[best.0];
        out.revival_window = Some(best.1);
        out.revival_amplitude = envelope[best.1];
        out
    }

    pub fn collapsed(&self) -> bool {
        self.collapse_window.is_some()
    }

    /// Rise from the minimum to the revival peak, relative to the initial amplitude.
    pub fn recovery(&self) -> f64 {
        if self.collapsed() {
            (self.revival_amplitude - self.minimum_amplitude) / self.initial_amplitude
        } else {
            0.0
        }
    }
}
