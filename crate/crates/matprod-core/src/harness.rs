//! Experiment orchestration: convergence sweeps, moment checks, potential
//! comparisons, property suites, and CSV/JSON reports.
//!
//! Replicas run in a parallel worker pool; per-replica results are collected
//! and reduced in ascending replica index, so a fixed `(config, seed)` gives
//! bit-reproducible report values regardless of scheduling. Decomposition
//! failures exclude the replica and are counted in the report.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensembles::{self, EnsembleError, EnsembleSpec};
use crate::esd;
use crate::limitlaw::{self, PowerDiscLaw};
use crate::linalg::{self, LinalgError};
use crate::stieltjes;

/// Which summaries a run produces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    RadialKs,
    Grid2dKs,
    Moments { p_max: u32 },
    Potential,
    Properties,
}

/// Calibration constants for the property and convergence checks. These are
/// tolerances chosen by pilot runs, not limit-theorem claims, so they live
/// in the config rather than in code.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    pub radial_ks_max: f64,
    pub angular_ks_max: f64,
    pub grid2d_max: f64,
    /// Constant `c` in the lower bound `s_j ≥ c·sqrt((n-j)/n)`.
    pub prod3_constant: f64,
    /// Margin over the support edge for the largest singular value.
    pub s1_margin: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            radial_ks_max: 0.05,
            angular_ks_max: 0.05,
            grid2d_max: 0.08,
            prod3_constant: 0.05,
            s1_margin: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub ensemble: EnsembleSpec,
    /// Dimensions to sweep, ascending.
    pub n_values: Vec<usize>,
    pub replicas: usize,
    #[serde(default)]
    pub z_values: Vec<Complex64>,
    pub metrics: Vec<Metric>,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub thresholds: Thresholds,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Stieltjes(#[from] stieltjes::StieltjesError),
    #[error("report I/O failed for {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("all {0} replicas failed decomposition")]
    AllReplicasFailed(usize),
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        self.ensemble
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if self.replicas < 1 {
            return Err(HarnessError::Config("replicas must be >= 1".into()));
        }
        if self.n_values.is_empty() {
            return Err(HarnessError::Config("n_values must be nonempty".into()));
        }
        if self.n_values.windows(2).any(|w| w[0] > w[1]) {
            return Err(HarnessError::Config(
                "n_values must be sorted ascending".into(),
            ));
        }
        if self.n_values.iter().any(|&n| n < 2) {
            return Err(HarnessError::Config("every n must be >= 2".into()));
        }
        if self.metrics.is_empty() {
            return Err(HarnessError::Config("metrics must be nonempty".into()));
        }
        for m in &self.metrics {
            if let Metric::Moments { p_max } = m {
                if *p_max > 8 {
                    return Err(HarnessError::Config(
                        "moments p_max must be <= 8".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn wants(&self, probe: fn(&Metric) -> bool) -> bool {
        self.metrics.iter().any(probe)
    }

    pub fn moments_p_max(&self) -> Option<u32> {
        self.metrics.iter().find_map(|m| match m {
            Metric::Moments { p_max } => Some(*p_max),
            _ => None,
        })
    }
}

/// One aggregated report row; `iqr` is the interquartile spread over
/// replicas where that makes sense, 0 otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub n: usize,
    pub metric: String,
    pub value: f64,
    pub iqr: f64,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub code_version: String,
    pub seed: u64,
    /// Volatile; excluded from reproducibility comparisons.
    pub unix_timestamp_seconds: f64,
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ExperimentReport {
    fn new(experiment: &str, config: &ExperimentConfig, rows: Vec<ReportRow>) -> Self {
        ExperimentReport {
            experiment: experiment.to_string(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.ensemble.seed,
            unix_timestamp_seconds: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs_f64())
                .unwrap_or(0.0),
            config: config.clone(),
            rows,
        }
    }

    /// Columns exactly `n,metric,value,iqr,runtime_seconds`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,metric,value,iqr,runtime_seconds\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n, r.metric, r.value, r.iqr, r.runtime_seconds
            ));
        }
        out
    }

    /// CSV with the measured-time column masked; this is the byte-stable
    /// projection used by reproducibility checks (runtime, like the
    /// timestamp, varies between otherwise identical runs).
    pub fn to_csv_without_runtime(&self) -> String {
        let mut out = String::from("n,metric,value,iqr\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.n, r.metric, r.value, r.iqr));
        }
        out
    }
}

/// Write the report as `<experiment>_<seed>.<ext>` under `dir`.
pub fn emit_report(
    report: &ExperimentReport,
    format: ReportFormat,
    dir: &Path,
) -> Result<PathBuf, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let (ext, content) = match format {
        ReportFormat::Csv => ("csv", report.to_csv()),
        ReportFormat::Json => (
            "json",
            serde_json::to_string_pretty(report).expect("report serializes") + "\n",
        ),
    };
    let path = dir.join(format!("{}_{}.{}", report.experiment, report.seed, ext));
    std::fs::write(&path, content).map_err(|source| HarnessError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    if sorted.len() == 1 {
        return sorted[0];
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn median(values: &[f64]) -> f64 {
    quantile(&sorted(values.to_vec()), 0.5)
}

fn iqr(values: &[f64]) -> f64 {
    let s = sorted(values.to_vec());
    quantile(&s, 0.75) - quantile(&s, 0.25)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Split replica outcomes into included values (ascending replica order)
/// and the excluded count. Conservation: `included + excluded = total`.
fn partition_replicas<T>(results: Vec<Result<T, LinalgError>>) -> (Vec<T>, usize) {
    let total = results.len();
    let included: Vec<T> = results.into_iter().filter_map(|r| r.ok()).collect();
    let excluded = total - included.len();
    (included, excluded)
}

fn elapsed_secs(t0: Instant) -> f64 {
    t0.elapsed().as_secs_f64().max(1e-9)
}

// 64x64 evaluation grid over [-1.5, 1.5]^2 for the 2D sup-discrepancy.
fn grid2d_points() -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(64 * 64);
    for i in 0..64 {
        for j in 0..64 {
            let x = -1.5 + 3.0 * i as f64 / 63.0;
            let y = -1.5 + 3.0 * j as f64 / 63.0;
            pts.push((x, y));
        }
    }
    pts
}

struct ConvergenceStats {
    radial: f64,
    angular: f64,
    grid2d: Option<f64>,
}

/// Eigenvalue-side convergence metrics: radial KS against `r^{2/m}`,
/// angular KS against uniform, and the gridded 2D sup-discrepancy.
pub fn run_convergence(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    config.validate()?;
    let want_radial = config.wants(|m| matches!(m, Metric::RadialKs));
    let want_grid = config.wants(|m| matches!(m, Metric::Grid2dKs));
    if !want_radial && !want_grid {
        return Err(HarnessError::Config(
            "convergence run needs the radial_ks or grid2d_ks metric".into(),
        ));
    }
    let law = PowerDiscLaw::new(config.ensemble.m as u32);
    // reference CDF cached on the fixed grid once per run
    let fixed_grid: Vec<(f64, f64, f64)> = if want_grid {
        grid2d_points()
            .into_par_iter()
            .map(|(x, y)| (x, y, law.cdf(x, y)))
            .collect()
    } else {
        Vec::new()
    };

    let mut rows = Vec::new();
    for &n in &config.n_values {
        let t0 = Instant::now();
        let spec = config.ensemble.with_n(n);
        let results: Vec<Result<ConvergenceStats, LinalgError>> = (0..config.replicas as u64)
            .into_par_iter()
            .map(|rep| {
                let w = ensembles::sample_product(&spec, rep).expect("validated spec");
                let eig = linalg::eigenvalues(&w)?;
                let radial = esd::ks_distance(&esd::radial_ecdf(&eig), |r| {
                    law.radial_cdf(r.max(0.0))
                });
                let angular =
                    esd::ks_distance(&esd::angular_ecdf(&eig), |t| t.clamp(0.0, 1.0));
                let grid2d = if want_grid {
                    let mut sup: f64 = 0.0;
                    for &(x, y, g) in &fixed_grid {
                        sup = sup.max((esd::cdf2d(&eig, x, y) - g).abs());
                    }
                    for l in &eig.values {
                        let g = law.cdf(l.re, l.im);
                        sup = sup.max((esd::cdf2d(&eig, l.re, l.im) - g).abs());
                    }
                    Some(sup)
                } else {
                    None
                };
                Ok(ConvergenceStats {
                    radial,
                    angular,
                    grid2d,
                })
            })
            .collect();
        let (included, excluded) = partition_replicas(results);
        if included.is_empty() {
            return Err(HarnessError::AllReplicasFailed(config.replicas));
        }
        let dt = elapsed_secs(t0);
        if want_radial {
            let radials: Vec<f64> = included.iter().map(|s| s.radial).collect();
            rows.push(ReportRow {
                n,
                metric: "radial_ks".into(),
                value: median(&radials),
                iqr: iqr(&radials),
                runtime_seconds: dt,
            });
            let angulars: Vec<f64> = included.iter().map(|s| s.angular).collect();
            rows.push(ReportRow {
                n,
                metric: "angular_ks".into(),
                value: median(&angulars),
                iqr: iqr(&angulars),
                runtime_seconds: dt,
            });
        }
        if want_grid {
            let grids: Vec<f64> = included.iter().filter_map(|s| s.grid2d).collect();
            rows.push(ReportRow {
                n,
                metric: "grid2d_ks".into(),
                value: median(&grids),
                iqr: iqr(&grids),
                runtime_seconds: dt,
            });
        }
        rows.push(ReportRow {
            n,
            metric: "excluded_replicas".into(),
            value: excluded as f64,
            iqr: 0.0,
            runtime_seconds: dt,
        });
    }
    Ok(ExperimentReport::new("convergence", config, rows))
}

/// Replica-averaged squared singular-value moments of `W` at `z = 0`
/// against the Fuss–Catalan values.
pub fn run_moment_check(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    config.validate()?;
    let p_max = config
        .moments_p_max()
        .ok_or_else(|| HarnessError::Config("moment run needs the moments metric".into()))?;
    if !config.z_values.iter().any(|z| z.norm() == 0.0) {
        return Err(HarnessError::Config(
            "moment run needs z = 0 in z_values".into(),
        ));
    }
    let m = config.ensemble.m as u32;
    let mut rows = Vec::new();
    for &n in &config.n_values {
        let t0 = Instant::now();
        let spec = config.ensemble.with_n(n);
        let results: Vec<Result<Vec<f64>, LinalgError>> = (0..config.replicas as u64)
            .into_par_iter()
            .map(|rep| {
                let w = ensembles::sample_product(&spec, rep).expect("validated spec");
                let sv = linalg::singular_values(&w, Complex64::new(0.0, 0.0))?;
                Ok((0..=p_max).map(|p| esd::spectral_moment(&sv, p)).collect())
            })
            .collect();
        let (included, excluded) = partition_replicas(results);
        if included.is_empty() {
            return Err(HarnessError::AllReplicasFailed(config.replicas));
        }
        let dt = elapsed_secs(t0);
        for p in 0..=p_max {
            let per_replica: Vec<f64> = included.iter().map(|v| v[p as usize]).collect();
            let avg = mean(&per_replica);
            let fc = limitlaw::fuss_catalan_f64(m, p)
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            let rel_per_replica: Vec<f64> =
                per_replica.iter().map(|v| (v / fc - 1.0).abs()).collect();
            rows.push(ReportRow {
                n,
                metric: format!("moment_p{p}"),
                value: avg,
                iqr: iqr(&per_replica),
                runtime_seconds: dt,
            });
            rows.push(ReportRow {
                n,
                metric: format!("moment_rel_err_p{p}"),
                value: (avg / fc - 1.0).abs(),
                iqr: iqr(&rel_per_replica),
                runtime_seconds: dt,
            });
        }
        rows.push(ReportRow {
            n,
            metric: "excluded_replicas".into(),
            value: excluded as f64,
            iqr: 0.0,
            runtime_seconds: dt,
        });
    }
    Ok(ExperimentReport::new("moments", config, rows))
}

/// Three-way log-potential table at each configured shift: empirical
/// `-(1/n)Σ ln s_j(W - zI)` vs the closed form vs the solver quadrature.
pub fn run_potential_check(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    config.validate()?;
    if config.z_values.is_empty() {
        return Err(HarnessError::Config(
            "potential run needs at least one z".into(),
        ));
    }
    let m = config.ensemble.m as u32;
    let law = PowerDiscLaw::new(m);
    // limit-side values are n-independent; compute once per z
    let t0 = Instant::now();
    let solver_vals: Result<Vec<f64>, stieltjes::StieltjesError> = config
        .z_values
        .par_iter()
        .map(|&z| stieltjes::log_potential(m, z, stieltjes::DEFAULT_CURVE_POINTS))
        .collect();
    let solver_vals = solver_vals?;
    let solver_dt = elapsed_secs(t0);

    let mut rows = Vec::new();
    for &n in &config.n_values {
        let t0 = Instant::now();
        let spec = config.ensemble.with_n(n);
        let results: Vec<Result<Vec<(f64, usize)>, LinalgError>> = (0..config.replicas as u64)
            .into_par_iter()
            .map(|rep| {
                let w = ensembles::sample_product(&spec, rep).expect("validated spec");
                let mut rng = ChaCha12Rng::seed_from_u64(rep);
                config
                    .z_values
                    .iter()
                    .map(|&z| {
                        let est = esd::empirical_log_potential(&w, z, 0.0, 1, &mut rng)?;
                        Ok((est.value, est.floored_count))
                    })
                    .collect()
            })
            .collect();
        let (included, excluded) = partition_replicas(results);
        if included.is_empty() {
            return Err(HarnessError::AllReplicasFailed(config.replicas));
        }
        let dt = elapsed_secs(t0);
        for (zi, &z) in config.z_values.iter().enumerate() {
            let vals: Vec<f64> = included.iter().map(|per_z| per_z[zi].0).collect();
            let floored: usize = included.iter().map(|per_z| per_z[zi].1).sum();
            rows.push(ReportRow {
                n,
                metric: format!("potential_empirical_z{zi}"),
                value: mean(&vals),
                iqr: iqr(&vals),
                runtime_seconds: dt,
            });
            rows.push(ReportRow {
                n,
                metric: format!("potential_floored_z{zi}"),
                value: floored as f64,
                iqr: 0.0,
                runtime_seconds: dt,
            });
            rows.push(ReportRow {
                n,
                metric: format!("potential_analytic_z{zi}"),
                value: law.log_potential(z),
                iqr: 0.0,
                runtime_seconds: dt,
            });
            rows.push(ReportRow {
                n,
                metric: format!("potential_solver_z{zi}"),
                value: solver_vals[zi],
                iqr: 0.0,
                runtime_seconds: solver_dt,
            });
        }
        rows.push(ReportRow {
            n,
            metric: "excluded_replicas".into(),
            value: excluded as f64,
            iqr: 0.0,
            runtime_seconds: dt,
        });
    }
    Ok(ExperimentReport::new("potential", config, rows))
}

/// Deterministic and statistical property checks. Only the product
/// singular-value inequality (`prod1_violations`) is a hard failure; every
/// other part is reported as data.
pub fn run_property_suite(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    config.validate()?;
    let m = config.ensemble.m as u32;
    let edge = limitlaw::support_edge(m);
    let mut rows = Vec::new();

    // (a) product singular-value inequality on 100 random 8x8 pairs
    let t0 = Instant::now();
    let pair_spec = EnsembleSpec {
        m: 2,
        n: 8,
        entry_law: config.ensemble.entry_law,
        truncation: None,
        seed: config.ensemble.seed,
    };
    let violations: usize = (0..100u64)
        .into_par_iter()
        .map(|rep| {
            let a = ensembles::sample_factor(&pair_spec, 1, rep).expect("valid spec");
            let b = ensembles::sample_factor(&pair_spec, 2, rep).expect("valid spec");
            let ab = &a * &b;
            let z0 = Complex64::new(0.0, 0.0);
            let sa = linalg::singular_values(&a, z0).expect("8x8 svd").values;
            let sb = linalg::singular_values(&b, z0).expect("8x8 svd").values;
            let sab = linalg::singular_values(&ab, z0).expect("8x8 svd").values;
            let mut bad = 0usize;
            for k in 0..8 {
                let lhs: f64 = sab[k..].iter().product();
                let rhs: f64 = sa[k..].iter().zip(&sb[k..]).map(|(x, y)| x * y).product();
                if lhs < rhs - 1e-8 {
                    bad += 1;
                }
            }
            bad
        })
        .sum();
    rows.push(ReportRow {
        n: 8,
        metric: "prod1_violations".into(),
        value: violations as f64,
        iqr: 0.0,
        runtime_seconds: elapsed_secs(t0),
    });

    // (b) + (e) at fixed n = 256: intermediate singular-value lower bound
    // and the smallest singular value, per shift
    if !config.z_values.is_empty() {
        let n = 256usize;
        let spec = config.ensemble.with_n(n);
        let t0 = Instant::now();
        let per_replica: Vec<Result<Vec<(f64, f64)>, LinalgError>> = (0..config.replicas as u64)
            .into_par_iter()
            .map(|rep| {
                let w = ensembles::sample_product(&spec, rep).expect("validated spec");
                config
                    .z_values
                    .iter()
                    .map(|&z| {
                        let sv = linalg::singular_values(&w, z)?;
                        let cutoff = n as f64 - (n as f64).powf(0.6);
                        let c = config.thresholds.prod3_constant;
                        let mut checked = 0usize;
                        let mut bad = 0usize;
                        for (j, &s) in sv.values.iter().enumerate() {
                            let j1 = (j + 1) as f64; // 1-based rank
                            if j1 <= cutoff {
                                checked += 1;
                                if s < c * ((n as f64 - j1) / n as f64).sqrt() {
                                    bad += 1;
                                }
                            }
                        }
                        let frac = bad as f64 / checked.max(1) as f64;
                        let smin = *sv.values.last().expect("nonempty spectrum");
                        Ok((frac, smin))
                    })
                    .collect()
            })
            .collect();
        let (included, excluded) = partition_replicas(per_replica);
        if included.is_empty() {
            return Err(HarnessError::AllReplicasFailed(config.replicas));
        }
        let dt = elapsed_secs(t0);
        for (zi, _z) in config.z_values.iter().enumerate() {
            let fracs: Vec<f64> = included.iter().map(|v| v[zi].0).collect();
            rows.push(ReportRow {
                n,
                metric: format!("prod3_violation_fraction_z{zi}"),
                value: mean(&fracs),
                iqr: iqr(&fracs),
                runtime_seconds: dt,
            });
            let ok_fraction = included
                .iter()
                .filter(|v| v[zi].1 >= 1e-8)
                .count() as f64
                / included.len() as f64;
            rows.push(ReportRow {
                n,
                metric: format!("smin_above_1e-8_fraction_z{zi}"),
                value: ok_fraction,
                iqr: 0.0,
                runtime_seconds: dt,
            });
        }
        rows.push(ReportRow {
            n,
            metric: "excluded_replicas".into(),
            value: excluded as f64,
            iqr: 0.0,
            runtime_seconds: dt,
        });
    }

    // (c) + (d): largest singular value and Frobenius mass per configured n
    for &n in &config.n_values {
        let t0 = Instant::now();
        let spec = config.ensemble.with_n(n);
        let results: Vec<Result<(f64, f64), LinalgError>> = (0..config.replicas as u64)
            .into_par_iter()
            .map(|rep| {
                let w = ensembles::sample_product(&spec, rep).expect("validated spec");
                let frob = linalg::frobenius_norm_sq(&w) / n as f64;
                let s1 = linalg::singular_values(&w, Complex64::new(0.0, 0.0))?.values[0];
                Ok((s1, frob))
            })
            .collect();
        let (included, excluded) = partition_replicas(results);
        if included.is_empty() {
            return Err(HarnessError::AllReplicasFailed(config.replicas));
        }
        let dt = elapsed_secs(t0);
        let s1s: Vec<f64> = included.iter().map(|v| v.0).collect();
        let frobs: Vec<f64> = included.iter().map(|v| v.1).collect();
        let s1_max = s1s.iter().cloned().fold(0.0, f64::max);
        rows.push(ReportRow {
            n,
            metric: "s1_max".into(),
            value: s1_max,
            iqr: iqr(&s1s),
            runtime_seconds: dt,
        });
        rows.push(ReportRow {
            n,
            metric: "s1_exceeds_n_count".into(),
            value: s1s.iter().filter(|&&s| s >= n as f64).count() as f64,
            iqr: 0.0,
            runtime_seconds: dt,
        });
        rows.push(ReportRow {
            n,
            metric: "s1_bound".into(),
            value: edge + config.thresholds.s1_margin,
            iqr: 0.0,
            runtime_seconds: dt,
        });
        rows.push(ReportRow {
            n,
            metric: "frobenius_mean".into(),
            value: mean(&frobs),
            iqr: iqr(&frobs),
            runtime_seconds: dt,
        });
        rows.push(ReportRow {
            n,
            metric: "properties_excluded_replicas".into(),
            value: excluded as f64,
            iqr: 0.0,
            runtime_seconds: dt,
        });
    }
    Ok(ExperimentReport::new("properties", config, rows))
}

/// Combined run over whatever metrics the config selects.
pub fn run_compare(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    config.validate()?;
    let mut rows = Vec::new();
    if config.wants(|m| matches!(m, Metric::RadialKs | Metric::Grid2dKs)) {
        rows.extend(run_convergence(config)?.rows);
    }
    if config.wants(|m| matches!(m, Metric::Moments { .. })) {
        rows.extend(run_moment_check(config)?.rows);
    }
    if config.wants(|m| matches!(m, Metric::Potential)) {
        rows.extend(run_potential_check(config)?.rows);
    }
    if config.wants(|m| matches!(m, Metric::Properties)) {
        rows.extend(run_property_suite(config)?.rows);
    }
    Ok(ExperimentReport::new("compare", config, rows))
}

/// Sample spectra and write them as CSV files; returns the written paths.
pub fn run_simulate(config: &ExperimentConfig) -> Result<Vec<PathBuf>, HarnessError> {
    config.validate()?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.clone(),
        source,
    })?;
    let seed = config.ensemble.seed;
    let mut written = Vec::new();
    let write = |path: PathBuf, content: String| -> Result<PathBuf, HarnessError> {
        std::fs::write(&path, content).map_err(|source| HarnessError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    };
    for &n in &config.n_values {
        let spec = config.ensemble.with_n(n);
        for rep in 0..config.replicas as u64 {
            let w = ensembles::sample_product(&spec, rep)?;
            let eig = linalg::eigenvalues(&w).map_err(|e| {
                HarnessError::Config(format!("decomposition failed at n={n}, replica {rep}: {e}"))
            })?;
            let mut csv = String::from("re,im\n");
            for l in &eig.values {
                csv.push_str(&format!("{},{}\n", l.re, l.im));
            }
            written.push(write(
                dir.join(format!("spectrum_eigs_n{n}_r{rep}_{seed}.csv")),
                csv,
            )?);
            written.push(write(
                dir.join(format!("spectrum_radial_ecdf_n{n}_r{rep}_{seed}.csv")),
                esd::radial_ecdf(&eig).to_csv(),
            )?);
            for (zi, &z) in config.z_values.iter().enumerate() {
                let sv = linalg::singular_values(&w, z).map_err(|e| {
                    HarnessError::Config(format!("svd failed at n={n}, replica {rep}: {e}"))
                })?;
                let mut csv = String::from("s\n");
                for s in &sv.values {
                    csv.push_str(&format!("{}\n", s));
                }
                written.push(write(
                    dir.join(format!("spectrum_sv_n{n}_r{rep}_z{zi}_{seed}.csv")),
                    csv,
                )?);
            }
        }
    }
    Ok(written)
}

/// Evaluate the limit objects on grids and write them as CSV/JSON files.
pub fn run_limit(config: &ExperimentConfig) -> Result<Vec<PathBuf>, HarnessError> {
    config.validate()?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.clone(),
        source,
    })?;
    let m = config.ensemble.m as u32;
    let law = PowerDiscLaw::new(m);
    let seed = config.ensemble.seed;
    let mut written = Vec::new();
    let write = |path: PathBuf, content: String| -> Result<PathBuf, HarnessError> {
        std::fs::write(&path, content).map_err(|source| HarnessError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    };

    let mut csv = String::from("x,y,g\n");
    for (x, y) in grid2d_points() {
        csv.push_str(&format!("{},{},{}\n", x, y, law.density(x, y)));
    }
    written.push(write(dir.join(format!("limit_density_g_m{m}_{seed}.csv")), csv)?);

    let mut csv = String::from("r,G\n");
    for i in 0..=512 {
        let r = 1.25 * i as f64 / 512.0;
        csv.push_str(&format!("{},{}\n", r, law.radial_cdf(r)));
    }
    written.push(write(dir.join(format!("limit_radial_G_m{m}_{seed}.csv")), csv)?);

    let mut states = Vec::new();
    let mut potential_csv = String::from("z_re,z_im,analytic,solver,abs_diff\n");
    for &z in &config.z_values {
        let zi = states.len();
        let curve = stieltjes::density_curve(m, z, stieltjes::DEFAULT_CURVE_V_MIN, stieltjes::DEFAULT_CURVE_POINTS)?;
        written.push(write(
            dir.join(format!("limit_density_p_m{m}_z{zi}_{seed}.csv")),
            curve.to_csv(),
        )?);
        let analytic = law.log_potential(z);
        let solver = curve.neg_log_moment();
        potential_csv.push_str(&format!(
            "{},{},{},{},{}\n",
            z.re,
            z.im,
            analytic,
            solver,
            (analytic - solver).abs()
        ));
        states.push(stieltjes::solve_system(m, z, Complex64::new(0.0, 1e-6)));
    }
    written.push(write(
        dir.join(format!("limit_potential_m{m}_{seed}.csv")),
        potential_csv,
    )?);
    written.push(write(
        dir.join(format!("limit_solver_states_m{m}_{seed}.json")),
        serde_json::to_string_pretty(&states).expect("states serialize") + "\n",
    )?);
    Ok(written)
}
