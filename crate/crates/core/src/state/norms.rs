use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::DensityMatrix;
use crate::error::{Error, Result};

/// Eigenvalues below this are treated as zero in entropies.
pub const EIGEN_CLAMP: f64 = 1e-15;

/// Logarithm base for entropies and Holevo quantities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "e")]
    E,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::E => x.ln(),
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Two => "2",
            LogBase::E => "e",
        })
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" => Ok(LogBase::Two),
            "e" => Ok(LogBase::E),
            _ => Err(Error::Parse(format!("unknown log base {s:?} (expected 2 or e)"))),
        }
    }
}

pub(crate) fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in j..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of the Hermitian part of a square matrix, ascending.
///
/// This is the single numeric kernel behind trace norms and entropies.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let n = herm.nrows();
    let diagonal = (0..n).all(|j| (0..n).all(|i| i == j || herm[(i, j)] == Complex64::new(0.0, 0.0)));
    if diagonal {
        let mut vals: Vec<f64> = (0..n).map(|i| herm[(i, i)].re).collect();
        vals.sort_by(f64::total_cmp);
        return vals;
    }
    let mut vals: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// `‖M‖₁ = tr√(M†M)`, the sum of singular values.
pub fn trace_norm(m: &DMatrix<Complex64>) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare(m.nrows(), m.ncols()));
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if hermiticity_defect(m) <= 1e-14 * scale.max(1.0) {
        return Ok(hermitian_eigenvalues(m).iter().map(|l| l.abs()).sum());
    }
    let gram = m.adjoint() * m;
    Ok(hermitian_eigenvalues(&gram).iter().map(|l| l.max(0.0).sqrt()).sum())
}

/// `√tr(M†M)`.
pub fn frobenius_norm(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `S(ρ) = −tr ρ log ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix, base: LogBase) -> f64 {
    rho.eigenvalues()
        .into_iter()
        .filter(|&l| l > EIGEN_CLAMP)
        .map(|l| -l * base.log(l))
        .sum::<f64>()
        .max(0.0)
}
