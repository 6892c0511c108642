//! Dense complex spectral kernels.
//!
//! Decompositions are delegated to nalgebra's Schur / SVD / symmetric-eigen
//! routines under explicit contracts: backward-stable results, a hard
//! iteration cap of `40·n` sweeps, and an explicit error on non-convergence
//! (never a silent partial answer).

use num_complex::Complex64;
use thiserror::Error;

/// Dense complex matrix carrier used across the crate.
pub type CMatrix = nalgebra::DMatrix<Complex64>;

/// All `n` eigenvalues of a square matrix, with multiplicity, unordered.
#[derive(Debug, Clone)]
pub struct EigenSpectrum {
    pub values: Vec<Complex64>,
}

/// Singular values of `M - zI`, sorted descending, together with the shift.
#[derive(Debug, Clone)]
pub struct SingularSpectrum {
    pub values: Vec<f64>,
    pub shift: Complex64,
}

/// `Σ_j ln max(s_j, floor)` plus how many singular values hit the floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogAbsDet {
    pub value: f64,
    pub floored_count: usize,
}

pub const DEFAULT_LOG_FLOOR: f64 = 1e-300;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("{algorithm} did not converge within {max_sweeps} sweeps on a {n}x{n} matrix")]
    NonConvergence {
        algorithm: &'static str,
        n: usize,
        max_sweeps: usize,
    },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

fn check_input(m: &CMatrix) -> Result<(), LinalgError> {
    if m.nrows() != m.ncols() {
        return Err(LinalgError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let x = m[(i, j)];
            if !x.re.is_finite() || !x.im.is_finite() {
                return Err(LinalgError::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

fn shifted(m: &CMatrix, z: Complex64) -> CMatrix {
    let mut a = m.clone();
    for i in 0..a.nrows() {
        a[(i, i)] -= z;
    }
    a
}

/// All eigenvalues of `M` via Schur reduction (Hessenberg + shifted QR).
pub fn eigenvalues(m: &CMatrix) -> Result<EigenSpectrum, LinalgError> {
    check_input(m)?;
    let n = m.nrows();
    let max_sweeps = 40 * n;
    let schur = m
        .clone()
        .try_schur(f64::EPSILON, max_sweeps)
        .ok_or(LinalgError::NonConvergence {
            algorithm: "schur",
            n,
            max_sweeps,
        })?;
    let values = schur
        .eigenvalues()
        .ok_or(LinalgError::NonConvergence {
            algorithm: "schur",
            n,
            max_sweeps,
        })?
        .iter()
        .copied()
        .collect();
    Ok(EigenSpectrum { values })
}

/// Singular values of `M - zI`, sorted descending.
pub fn singular_values(m: &CMatrix, z: Complex64) -> Result<SingularSpectrum, LinalgError> {
    check_input(m)?;
    let n = m.nrows();
    let max_sweeps = 40 * n;
    let a = shifted(m, z);
    let svd = a
        .try_svd(false, false, f64::EPSILON, max_sweeps)
        .ok_or(LinalgError::NonConvergence {
            algorithm: "svd",
            n,
            max_sweeps,
        })?;
    let mut values: Vec<f64> = svd.singular_values.iter().copied().collect();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(SingularSpectrum { values, shift: z })
}

/// Eigenvalues of the `2n × 2n` Hermitian block matrix
/// `[[0, M - zI], [(M - zI)*, 0]]`, sorted ascending. The spectrum is
/// `{±s_j}`: the symmetrized singular values of `M - zI`.
pub fn linearized_spectrum(m: &CMatrix, z: Complex64) -> Result<Vec<f64>, LinalgError> {
    check_input(m)?;
    let n = m.nrows();
    let a = shifted(m, z);
    let mut h = CMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for i in 0..n {
            h[(i, j + n)] = a[(i, j)];
            h[(j + n, i)] = a[(i, j)].conj();
        }
    }
    let max_sweeps = 40 * 2 * n;
    let eig = h
        .try_symmetric_eigen(f64::EPSILON, max_sweeps)
        .ok_or(LinalgError::NonConvergence {
            algorithm: "symmetric_eigen",
            n: 2 * n,
            max_sweeps,
        })?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(values)
}

/// `Σ_j ln max(s_j(M - zI), floor)` with an explicit count of floored
/// singular values; exact zeros never produce NaN.
pub fn log_abs_det(m: &CMatrix, z: Complex64, floor: f64) -> Result<LogAbsDet, LinalgError> {
    assert!(floor > 0.0, "floor must be positive");
    let sv = singular_values(m, z)?;
    let mut value = 0.0;
    let mut floored_count = 0;
    for &s in &sv.values {
        if s > floor {
            value += s.ln();
        } else {
            value += floor.ln();
            floored_count += 1;
        }
    }
    Ok(LogAbsDet {
        value,
        floored_count,
    })
}

impl SingularSpectrum {
    /// Frobenius norm squared of the shifted matrix, `Σ s_j²`.
    pub fn frobenius_sq(&self) -> f64 {
        self.values.iter().map(|s| s * s).sum()
    }
}

impl EigenSpectrum {
    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }
}

pub fn frobenius_norm_sq(m: &CMatrix) -> f64 {
    m.iter().map(|x| x.norm_sqr()).sum()
}
