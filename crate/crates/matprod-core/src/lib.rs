//! Numerical laboratory for the complex spectra of products of independent
//! random matrices.
//!
//! The crate simulates `W = X(1) · X(2) · … · X(m)` where each factor is an
//! `n × n` matrix with independent mean-zero, unit-variance entries scaled by
//! `1/√n`, and compares the empirical eigenvalue and singular-value
//! distributions of `W` against their large-`n` limits:
//!
//! * the eigenvalue cloud converges to the law of `ζ^m` with `ζ` uniform on
//!   the unit disc (density `1/(πm r^{2(m-1)/m})` inside the disc),
//! * the symmetrized singular values of `W - zI` converge to a family of
//!   measures whose Stieltjes transform solves a small polynomial system,
//! * the limiting squared singular-value moments at `z = 0` are the
//!   Fuss–Catalan numbers, and the logarithmic potential of the eigenvalue
//!   limit matches the one recovered from the singular-value system.
//!
//! Modules:
//!
//! * [`ensembles`] — entry laws, truncation/recentering, factor sampling and
//!   the matrix product chain (deterministic, replica-parallel streams);
//! * [`linalg`] — dense complex eigenvalues, singular values, the Hermitian
//!   block linearization and log-determinants;
//! * [`esd`] — empirical CDFs, symmetrization, Kolmogorov distances,
//!   log-potential estimates and spectral moments;
//! * [`limitlaw`] — closed forms for the limiting eigenvalue law: density,
//!   CDFs, logarithmic potential, Fuss–Catalan moments, support edge;
//! * [`stieltjes`] — continuation solver for the limiting system, density
//!   recovery by Stieltjes inversion, and the analytic identities it obeys;
//! * [`harness`] — experiment configs, convergence/moment/potential runs,
//!   property suites and CSV/JSON reports.

pub mod ensembles;
pub mod esd;
pub mod harness;
pub mod limitlaw;
pub mod linalg;
pub mod stieltjes;

pub use ensembles::{EnsembleSpec, EntryLaw, Truncation};
pub use esd::EmpiricalCdf;
pub use harness::{ExperimentConfig, ExperimentReport, Metric, ReportFormat};
pub use limitlaw::PowerDiscLaw;
pub use linalg::{CMatrix, EigenSpectrum, SingularSpectrum};
pub use stieltjes::{DensityCurve, StieltjesState};
