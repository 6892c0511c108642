//! Random-matrix ensembles: entry laws, truncation and the product chain.
//!
//! A factor is an `n × n` matrix of i.i.d. mean-zero unit-variance complex
//! entries divided by `√n`. Entries are drawn unscaled (so truncation
//! thresholds stay in unscaled units), optionally truncated and recentered,
//! and scaled at assembly. Every matrix is a pure function of
//! `(seed, factor_index, replica)`: each triple keys its own ChaCha stream,
//! so distinct factors and replicas may be sampled concurrently in any order
//! with identical results.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::CMatrix;

/// Entry distribution for a single factor, before the `1/√n` scaling.
/// All variants have mean zero and unit second absolute moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryLaw {
    /// `(g₁ + i·g₂)/√2` with independent standard normals.
    ComplexGaussian,
    /// Standard real normal.
    RealGaussian,
    /// `±1` with probability 1/2 each.
    Rademacher,
    /// Uniform on `[-√3, √3]`.
    UniformPmSqrt3,
    /// Symmetrized Pareto with the given tail exponent, rescaled to unit
    /// variance. Requires `exponent > 2`; the default 4.5 keeps the fourth
    /// moment finite while stressing uniform integrability.
    TruncatedPareto { exponent: f64 },
}

pub const DEFAULT_PARETO_EXPONENT: f64 = 4.5;

impl EntryLaw {
    fn sample(&self, rng: &mut ChaCha12Rng) -> Complex64 {
        match *self {
            EntryLaw::ComplexGaussian => {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im) / std::f64::consts::SQRT_2
            }
            EntryLaw::RealGaussian => {
                let re: f64 = rng.sample(StandardNormal);
                Complex64::new(re, 0.0)
            }
            EntryLaw::Rademacher => {
                let s = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                Complex64::new(s, 0.0)
            }
            EntryLaw::UniformPmSqrt3 => {
                let u: f64 = rng.gen();
                Complex64::new((2.0 * u - 1.0) * 3.0f64.sqrt(), 0.0)
            }
            EntryLaw::TruncatedPareto { exponent } => {
                // Pareto(1, a) via inverse CDF, random sign for mean zero,
                // analytic scale sqrt((a-2)/a) for unit variance.
                let u: f64 = rng.gen();
                let x = (1.0 - u).powf(-1.0 / exponent);
                let s = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                let scale = ((exponent - 2.0) / exponent).sqrt();
                Complex64::new(s * x * scale, 0.0)
            }
        }
    }

    /// Upper bound on |entry| for compactly supported laws.
    pub fn support_bound(&self) -> Option<f64> {
        match *self {
            EntryLaw::Rademacher => Some(1.0),
            EntryLaw::UniformPmSqrt3 => Some(3.0f64.sqrt()),
            _ => None,
        }
    }
}

/// Entry truncation level in unscaled units: entries with modulus above
/// `tau·√n` are zeroed, then the factor is recentered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub tau: f64,
}

impl Truncation {
    /// The default schedule `tau = n^{-1/4}`: vanishes with `n` while keeping
    /// the Lindeberg side condition checkable.
    pub fn default_for(n: usize) -> Self {
        Truncation {
            tau: (n as f64).powf(-0.25),
        }
    }
}

/// Full description of a random-matrix-product experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    /// Number of independent factors in the product.
    pub m: usize,
    /// Dimension of each (square) factor.
    pub n: usize,
    pub entry_law: EntryLaw,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation>,
    pub seed: u64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnsembleError {
    #[error("m must be >= 1, got {0}")]
    BadFactorCount(usize),
    #[error("n must be >= 2, got {0}")]
    BadDimension(usize),
    #[error("truncation tau must lie in (0, 1), got {0}")]
    BadTau(f64),
    #[error("pareto exponent must exceed 2 for finite variance, got {0}")]
    BadParetoExponent(f64),
    #[error("factor index {index} out of range 1..={m}")]
    FactorIndexOutOfRange { index: usize, m: usize },
    #[error("product chain needs at least one factor")]
    EmptyChain,
    #[error("factor {index} is {rows}x{cols}, expected {n}x{n}")]
    DimensionMismatch {
        index: usize,
        rows: usize,
        cols: usize,
        n: usize,
    },
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<(), EnsembleError> {
        if self.m < 1 {
            return Err(EnsembleError::BadFactorCount(self.m));
        }
        if self.n < 2 {
            return Err(EnsembleError::BadDimension(self.n));
        }
        if let Some(t) = self.truncation {
            if !(t.tau > 0.0 && t.tau < 1.0) {
                return Err(EnsembleError::BadTau(t.tau));
            }
        }
        if let EntryLaw::TruncatedPareto { exponent } = self.entry_law {
            if exponent.is_nan() || exponent <= 2.0 {
                return Err(EnsembleError::BadParetoExponent(exponent));
            }
        }
        Ok(())
    }

    /// Copy of the spec with a different dimension (used by n-sweeps).
    pub fn with_n(&self, n: usize) -> Self {
        let mut s = self.clone();
        s.n = n;
        s
    }
}

// One ChaCha key per (seed, factor, replica): distinct keys give
// statistically independent streams, and sampling order never matters.
fn stream_rng(seed: u64, factor_index: u64, replica: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&factor_index.to_le_bytes());
    key[16..24].copy_from_slice(&replica.to_le_bytes());
    key[24..32].copy_from_slice(b"w-chain\0");
    ChaCha12Rng::from_seed(key)
}

/// Unscaled, untruncated entries of factor `factor_index` (1-based), in
/// row-major sampling order.
pub fn sample_raw_factor(
    spec: &EnsembleSpec,
    factor_index: usize,
    replica: u64,
) -> Result<CMatrix, EnsembleError> {
    spec.validate()?;
    if factor_index < 1 || factor_index > spec.m {
        return Err(EnsembleError::FactorIndexOutOfRange {
            index: factor_index,
            m: spec.m,
        });
    }
    let mut rng = stream_rng(spec.seed, factor_index as u64, replica);
    let n = spec.n;
    let entries: Vec<Complex64> = (0..n * n).map(|_| spec.entry_law.sample(&mut rng)).collect();
    Ok(CMatrix::from_row_slice(n, n, &entries))
}

/// The scaled factor `X^(ν)/√n`, after optional truncation and recentering.
/// Deterministic in `(spec.seed, factor_index, replica)`.
pub fn sample_factor(
    spec: &EnsembleSpec,
    factor_index: usize,
    replica: u64,
) -> Result<CMatrix, EnsembleError> {
    let mut raw = sample_raw_factor(spec, factor_index, replica)?;
    if let Some(t) = spec.truncation {
        raw = truncate_recenter(&raw, t.tau * (spec.n as f64).sqrt());
    }
    let scale = Complex64::new(1.0 / (spec.n as f64).sqrt(), 0.0);
    Ok(raw * scale)
}

/// Zero out entries with modulus above `threshold`, then subtract the
/// empirical mean of the result from every entry. The output has empirical
/// mean zero to machine precision.
pub fn truncate_recenter(raw: &CMatrix, threshold: f64) -> CMatrix {
    assert!(threshold > 0.0, "threshold must be positive");
    let mut out = raw.map(|x| if x.norm() > threshold { Complex64::default() } else { x });
    let mean = out.iter().sum::<Complex64>() / out.len() as f64;
    for x in out.iter_mut() {
        *x -= mean;
    }
    out
}

/// `(1/n²) Σ |X_jk|² · I{|X_jk| ≥ tau·√n}` for one matrix of unscaled
/// entries; the harness takes the max over factors.
pub fn lindeberg_ratio(raw: &CMatrix, tau: f64) -> f64 {
    assert!(tau > 0.0, "tau must be positive");
    assert_eq!(raw.nrows(), raw.ncols(), "lindeberg_ratio expects a square matrix");
    let n = raw.nrows();
    let cut = tau * (n as f64).sqrt();
    let total: f64 = raw
        .iter()
        .map(|x| {
            let a = x.norm();
            if a >= cut {
                a * a
            } else {
                0.0
            }
        })
        .sum();
    total / (n * n) as f64
}

/// Left-to-right product of the factors, in the given order.
pub fn product_chain(factors: &[CMatrix]) -> Result<CMatrix, EnsembleError> {
    let first = factors.first().ok_or(EnsembleError::EmptyChain)?;
    let n = first.nrows();
    for (i, f) in factors.iter().enumerate() {
        if f.nrows() != n || f.ncols() != n {
            return Err(EnsembleError::DimensionMismatch {
                index: i + 1,
                rows: f.nrows(),
                cols: f.ncols(),
                n,
            });
        }
    }
    let mut w = first.clone();
    for f in &factors[1..] {
        w = &w * f;
    }
    Ok(w)
}

/// Sample all `m` factors of one replica and form `W`.
pub fn sample_product(spec: &EnsembleSpec, replica: u64) -> Result<CMatrix, EnsembleError> {
    let factors: Vec<CMatrix> = (1..=spec.m)
        .map(|nu| sample_factor(spec, nu, replica))
        .collect::<Result<_, _>>()?;
    product_chain(&factors)
}
