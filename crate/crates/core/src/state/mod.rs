//! Dense pure states and density matrices.

pub(crate) mod decompose;
mod norms;

pub use decompose::{pauli_decompose, pauli_reconstruct, PauliCoefficients};
pub use norms::{frobenius_norm, hermitian_eigenvalues, trace_norm, von_neumann_entropy, LogBase};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::DENSE_CAP;
use crate::rng::{self, Rng};

/// Tolerance for unit norm, unit trace and Hermiticity checks.
pub const STATE_TOL: f64 = 1e-9;

/// Largest qubit count for state vectors.
pub const PURE_CAP: usize = 24;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn check_pure_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidQubitCount(0));
    }
    if n > PURE_CAP {
        return Err(Error::OverCap { n, cap: PURE_CAP });
    }
    Ok(())
}

pub(crate) fn check_dense_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidQubitCount(0));
    }
    if n > DENSE_CAP {
        return Err(Error::OverCap { n, cap: DENSE_CAP });
    }
    Ok(())
}

/// A normalized n-qubit state vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub struct PureState {
    n: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        let state = Self::from_amplitudes_unchecked(n, amps)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("norm {norm} is not 1")));
        }
        Ok(state)
    }

    /// Checks only the dimension.
    pub(crate) fn from_amplitudes_unchecked(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_pure_qubits(n)?;
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, got: amps.len() });
        }
        Ok(PureState { n, amps })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_pure_qubits(n)?;
        if index >= 1 << n {
            return Err(Error::InvalidState(format!("basis index {index} out of range for n={n}")));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(PureState { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::QubitMismatch(self.n, other.n));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(x, y)| x.conj() * y).sum())
    }

    /// `|⟨self|other⟩|²`; global phase drops out.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl TryFrom<StateJson> for PureState {
    type Error = Error;

    fn try_from(j: StateJson) -> Result<Self> {
        if j.re.len() != j.im.len() {
            return Err(Error::InvalidState(format!(
                "re/im lengths differ: {} vs {}",
                j.re.len(),
                j.im.len()
            )));
        }
        let amps = j.re.into_iter().zip(j.im).map(|(re, im)| Complex64::new(re, im)).collect();
        PureState::from_amplitudes(j.n, amps)
    }
}

impl From<PureState> for StateJson {
    fn from(s: PureState) -> Self {
        StateJson {
            n: s.n,
            re: s.amps.iter().map(|z| z.re).collect(),
            im: s.amps.iter().map(|z| z.im).collect(),
        }
    }
}

/// Normalized complex-Gaussian vector; deterministic for a fixed seed.
pub fn random_pure_state(n: usize, seed: u64) -> Result<PureState> {
    random_pure_state_with(n, &mut rng::stream(seed, rng::domain::STATE, 0))
}

pub fn random_pure_state_with(n: usize, rng: &mut Rng) -> Result<PureState> {
    check_pure_qubits(n)?;
    let mut amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut amps {
        *z /= norm;
    }
    Ok(PureState { n, amps })
}

/// A unit-trace, Hermitian, positive semidefinite `2ⁿ×2ⁿ` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    m: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and the minimum eigenvalue at [`STATE_TOL`].
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(m)?;
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare(m.nrows(), m.ncols()));
        }
        let dim = m.nrows();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::InvalidState(format!("dimension {dim} is not 2^n")));
        }
        let n = dim.trailing_zeros() as usize;
        check_dense_qubits(n)?;
        Ok(DensityMatrix { n, m })
    }

    pub fn validate(&self) -> Result<()> {
        let herm = norms::hermiticity_defect(&self.m);
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = self.min_eigenvalue();
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("minimum eigenvalue {min:e} is negative")));
        }
        Ok(())
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_dense_qubits(n)?;
        let dim = 1usize << n;
        Ok(DensityMatrix {
            n,
            m: DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0),
        })
    }

    /// Rank-one projector `|ψ⟩⟨ψ|`.
    pub fn from_pure(state: &PureState) -> Result<Self> {
        check_dense_qubits(state.n)?;
        let v = DVector::from_column_slice(&state.amps);
        Ok(DensityMatrix { n: state.n, m: &v * v.adjoint() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.m
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        frobenius_norm(&self.m).powi(2)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// `ρ ⊗ σ` with `ρ` on the leading (more significant) qubits.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        Self::from_matrix_unchecked(self.m.kronecker(&other.m))
    }

    /// `‖ρ − 𝟙/d‖₁`.
    pub fn distance_to_maximally_mixed(&self) -> f64 {
        let dim = self.dim();
        let shifted = &self.m - DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0);
        trace_norm(&shifted).expect("square by construction")
    }

    /// `‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::QubitMismatch(self.n, other.n));
        }
        trace_norm(&(&self.m - &other.m))
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::QubitMismatch(self.n, other.n));
        }
        Ok((&self.m - &other.m).iter().map(|z| z.norm()).fold(0.0, f64::max))
    }
}

/// `|ψ⟩⟨ψ|`.
pub fn density_from_pure(state: &PureState) -> Result<DensityMatrix> {
    DensityMatrix::from_pure(state)
}
