//! Expansion `ρ = 2⁻ⁿ Σ_{(a,b)} c_{a,b} X^a Z^b` with `c_{a,b} = tr(ρ Z^b X^a)`.
//!
//! Both directions run one length-2ⁿ Walsh–Hadamard transform per X-part
//! `a`: the entries `ρ[j⊕a, j]` along one "X-diagonal" carry exactly the
//! coefficients `c_{a,·}`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{check_dense_qubits, DensityMatrix};
use crate::error::{Error, Result};
use crate::walsh::fwht_c64;

/// `c_{a,b}` indexed by the key index `(a << n) | b`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliCoefficients {
    n: usize,
    c: Vec<Complex64>,
}

impl PauliCoefficients {
    pub fn new(n: usize, c: Vec<Complex64>) -> Result<Self> {
        check_dense_qubits(n)?;
        if c.len() != 1 << (2 * n) {
            return Err(Error::DimensionMismatch { expected: 1 << (2 * n), got: c.len() });
        }
        Ok(PauliCoefficients { n, c })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.c
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.c
    }

    pub fn get(&self, a: u64, b: u64) -> Complex64 {
        self.c[((a << self.n) | b) as usize]
    }

    /// `Σ|c_{a,b}|²`, equal to `2ⁿ tr(ρ²)`.
    pub fn norm_sqr(&self) -> f64 {
        self.c.iter().map(|z| z.norm_sqr()).sum()
    }
}

pub(crate) fn decompose_matrix(n: usize, m: &DMatrix<Complex64>) -> Vec<Complex64> {
    let dim = 1usize << n;
    let mut c = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (a, row) in c.chunks_exact_mut(dim).enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = m[(j ^ a, j)];
        }
        fwht_c64(row);
    }
    c
}

pub(crate) fn reconstruct_matrix(n: usize, c: &[Complex64]) -> DMatrix<Complex64> {
    let dim = 1usize << n;
    let scale = 1.0 / dim as f64;
    let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    let mut row = vec![Complex64::new(0.0, 0.0); dim];
    for a in 0..dim {
        row.copy_from_slice(&c[a * dim..(a + 1) * dim]);
        fwht_c64(&mut row);
        for (j, v) in row.iter().enumerate() {
            m[(j ^ a, j)] = v * scale;
        }
    }
    m
}

pub fn pauli_decompose(rho: &DensityMatrix) -> PauliCoefficients {
    PauliCoefficients { n: rho.n(), c: decompose_matrix(rho.n(), rho.matrix()) }
}

pub fn pauli_reconstruct(coeffs: &PauliCoefficients) -> Result<DensityMatrix> {
    DensityMatrix::from_matrix(reconstruct_matrix(coeffs.n, &coeffs.c))
}
