//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured margin (visible under `--nocapture`). Every tolerance is
//! pinned here.

use num_complex::Complex64;

use matprod_core::ensembles::{EnsembleSpec, EntryLaw};
use matprod_core::harness::{
    emit_report, run_compare, run_convergence, run_moment_check, run_potential_check,
    run_property_suite, ExperimentConfig, Metric, ReportFormat, Thresholds,
};
use matprod_core::limitlaw::{self, PowerDiscLaw};
use matprod_core::{linalg, stieltjes};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn config(
    m: usize,
    law: EntryLaw,
    n_values: Vec<usize>,
    replicas: usize,
    z_values: Vec<Complex64>,
    metrics: Vec<Metric>,
    seed: u64,
) -> ExperimentConfig {
    ExperimentConfig {
        ensemble: EnsembleSpec {
            m,
            n: n_values[0],
            entry_law: law,
            truncation: None,
            seed,
        },
        n_values,
        replicas,
        z_values,
        metrics,
        output_dir: std::env::temp_dir().join("matprod_acceptance"),
        thresholds: Thresholds::default(),
    }
}

fn row(report: &matprod_core::ExperimentReport, n: usize, metric: &str) -> f64 {
    report
        .rows
        .iter()
        .find(|r| r.n == n && r.metric == metric)
        .unwrap_or_else(|| panic!("missing row ({n}, {metric})"))
        .value
}

/// Criterion 1: solver against the closed form at the origin of the spectral axis.
#[test]
fn acceptance_01_solver_vs_closed_form() {
    let alpha = c(0.0, 1e-6);
    let mut worst_inside: f64 = 0.0;
    for m in [1u32, 2, 3] {
        let mf = m as f64;
        for r in [0.25f64, 0.5, 0.9] {
            let st = stieltjes::solve_system(m, c(r, 0.0), alpha);
            assert!(st.converged, "m={m}, |z|={r}");
            let expect = c(0.0, (1.0 - r.powf(2.0 / mf)).sqrt() / r.powf(1.0 - 1.0 / mf));
            let err = (st.y - expect).norm();
            worst_inside = worst_inside.max(err);
            assert!(err <= 1e-3, "m={m}, |z|={r}: |y - closed form| = {err:.3e}");
        }
        for r in [1.2f64, 2.0] {
            let st = stieltjes::solve_system(m, c(r, 0.0), alpha);
            assert!(st.converged, "m={m}, |z|={r}");
            assert!(
                st.y.norm() <= 1e-2,
                "m={m}, |z|={r}: |y| = {:.3e}",
                st.y.norm()
            );
        }
    }
    println!("ACCEPTANCE 01 solver-vs-closed-form: PASS (max |y - s(0,z)| = {worst_inside:.2e} <= 1e-3; |y| <= 1e-2 outside the disc)");
}

/// Criterion 2: m = 1, z = 0 reduces to the semicircle transform.
#[test]
fn acceptance_02_semicircle_reduction() {
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let alpha = c(-3.0 + 6.0 * k as f64 / 19.0, 0.15 + 0.1 * k as f64);
        let st = stieltjes::solve_system(1, c(0.0, 0.0), alpha);
        assert!(st.converged);
        let d = (alpha * alpha - 4.0).sqrt();
        let oracle = if ((-alpha + d) / 2.0).im > 0.0 {
            (-alpha + d) / 2.0
        } else {
            (-alpha - d) / 2.0
        };
        let err = (st.y - oracle).norm();
        worst = worst.max(err);
        assert!(err <= 1e-10, "alpha={alpha}: err {err:.3e}");
    }
    println!("ACCEPTANCE 02 semicircle-reduction: PASS (max error {worst:.2e} <= 1e-10 on 20 alpha points)");
}

/// Criterion 3: logarithmic potential from the solver equals the closed form.
#[test]
fn acceptance_03_potential_identity() {
    let mut worst: f64 = 0.0;
    for m in [1u32, 2, 3] {
        let law = PowerDiscLaw::new(m);
        for zr in [0.2f64, 0.5, 0.8, 1.5, 2.0] {
            let z = c(zr, 0.0);
            let solver = stieltjes::log_potential(m, z, stieltjes::DEFAULT_CURVE_POINTS)
                .unwrap_or_else(|e| panic!("m={m}, z={zr}: {e}"));
            let analytic = law.log_potential(z);
            let err = (solver - analytic).abs();
            worst = worst.max(err);
            assert!(err <= 1e-3, "m={m}, z={zr}: |V - U| = {err:.3e}");
        }
    }
    println!("ACCEPTANCE 03 potential-identity: PASS (max |V - U| = {worst:.2e} <= 1e-3 over 15 (m, z) points)");
}

/// Criterion 4: limiting density at z = 0 — unit mass, Fuss–Catalan
/// moments, compact support.
#[test]
fn acceptance_04_density_properties() {
    let mut worst_mass: f64 = 0.0;
    let mut worst_moment: f64 = 0.0;
    let mut worst_tail: f64 = 0.0;
    for m in [1u32, 2, 3] {
        let curve = stieltjes::density_curve(
            m,
            c(0.0, 0.0),
            stieltjes::DEFAULT_CURVE_V_MIN,
            stieltjes::DEFAULT_CURVE_POINTS,
        )
        .unwrap();
        let mass = curve.integral();
        worst_mass = worst_mass.max((mass - 1.0).abs());
        assert!((mass - 1.0).abs() <= 1e-3, "m={m}: mass {mass}");
        for p in 1..=3u32 {
            let want = limitlaw::fuss_catalan_f64(m, p).unwrap();
            let got = curve.even_moment(p);
            let rel = (got / want - 1.0).abs();
            worst_moment = worst_moment.max(rel);
            assert!(rel <= 0.01, "m={m}, p={p}: {got} vs {want} (rel {rel:.3e})");
        }
        let tail = curve.max_density_outside(limitlaw::support_edge(m) + 0.05);
        worst_tail = worst_tail.max(tail);
        assert!(tail <= 1e-4, "m={m}: tail density {tail:.3e}");
    }
    println!("ACCEPTANCE 04 density-properties: PASS (mass err {worst_mass:.2e} <= 1e-3; moment rel err {worst_moment:.2e} <= 1e-2; tail {worst_tail:.2e} <= 1e-4)");
}

/// Criterion 5: the derivative identity linking the z- and x-derivatives of the
/// transform, in its proof form with the 2u factor.
#[test]
fn acceptance_05_derivative_identity() {
    let h = 1e-3;
    let generic = [
        (1.0, c(0.3, 0.2)),
        (0.5, c(0.5, 0.1)),
        (1.5, c(0.4, -0.3)),
        (0.8, c(0.2, 0.4)),
        (2.0, c(0.6, 0.2)),
    ];
    let mut worst: f64 = 0.0;
    for (x, z) in generic {
        let r = stieltjes::pde_residual(2, z, x, h).unwrap();
        worst = worst.max(r);
        assert!(r <= 1e-3, "x={x}, z={z}: residual {r:.3e}");
    }
    let r0 = stieltjes::pde_residual(2, c(0.0, 0.4), 1.0, h).unwrap();
    assert!(r0 <= 1e-4, "u=0 residual {r0:.3e}");
    println!("ACCEPTANCE 05 derivative-identity: PASS (max generic residual {worst:.2e} <= 1e-3; u=0 residual {r0:.2e} <= 1e-4)");
}

/// Criterion 6: circular-law generalization at desk scale, including universality for
/// Rademacher entries.
#[test]
fn acceptance_06_circular_law_generalization() {
    let thresholds = Thresholds::default();
    let cases: Vec<(usize, EntryLaw, &str)> = vec![
        (1, EntryLaw::ComplexGaussian, "gaussian"),
        (2, EntryLaw::ComplexGaussian, "gaussian"),
        (3, EntryLaw::ComplexGaussian, "gaussian"),
        (2, EntryLaw::Rademacher, "rademacher"),
    ];
    let mut summary = String::new();
    for (m, law, name) in cases {
        let cfg = config(
            m,
            law,
            vec![512],
            10,
            vec![],
            vec![Metric::RadialKs, Metric::Grid2dKs],
            20240601,
        );
        let report = run_convergence(&cfg).unwrap();
        let radial = row(&report, 512, "radial_ks");
        let angular = row(&report, 512, "angular_ks");
        let grid2d = row(&report, 512, "grid2d_ks");
        assert!(
            radial <= thresholds.radial_ks_max,
            "m={m} {name}: radial {radial:.4}"
        );
        assert!(
            angular <= thresholds.angular_ks_max,
            "m={m} {name}: angular {angular:.4}"
        );
        assert!(
            grid2d <= thresholds.grid2d_max,
            "m={m} {name}: grid2d {grid2d:.4}"
        );
        assert_eq!(row(&report, 512, "excluded_replicas"), 0.0);
        summary.push_str(&format!(
            " [m={m} {name}: radial {radial:.3} angular {angular:.3} grid2d {grid2d:.3}]"
        ));
    }
    println!("ACCEPTANCE 06 circular-law-generalization: PASS (n=512, 10 replicas; radial <= 0.05, angular <= 0.05, grid2d <= 0.08){summary}");
}

/// Criterion 7: median radial KS strictly decreases along n.
#[test]
fn acceptance_07_convergence_trend() {
    let cfg = config(
        2,
        EntryLaw::ComplexGaussian,
        vec![64, 128, 256, 512],
        10,
        vec![],
        vec![Metric::RadialKs],
        20240602,
    );
    let report = run_convergence(&cfg).unwrap();
    let ks: Vec<f64> = [64, 128, 256, 512]
        .iter()
        .map(|&n| row(&report, n, "radial_ks"))
        .collect();
    for w in ks.windows(2) {
        assert!(w[1] < w[0], "not strictly decreasing: {ks:?}");
    }
    println!("ACCEPTANCE 07 convergence-trend: PASS (median radial KS {ks:?} strictly decreasing over n = 64..512)");
}

/// Criterion 8: replica-averaged squared singular-value moments match Fuss–Catalan.
#[test]
fn acceptance_08_fuss_catalan_moments() {
    let mut worst: f64 = 0.0;
    for (m, expect) in [(1usize, [1.0, 2.0, 5.0, 14.0]), (2, [1.0, 3.0, 12.0, 55.0])] {
        let cfg = config(
            m,
            EntryLaw::ComplexGaussian,
            vec![1024],
            10,
            vec![c(0.0, 0.0)],
            vec![Metric::Moments { p_max: 4 }],
            20240603,
        );
        let report = run_moment_check(&cfg).unwrap();
        for (p, want) in expect.iter().enumerate() {
            let p = p + 1;
            let got = row(&report, 1024, &format!("moment_p{p}"));
            let rel = (got / want - 1.0).abs();
            worst = worst.max(rel);
            assert!(rel <= 0.05, "m={m}, p={p}: {got} vs {want} (rel {rel:.3})");
        }
    }
    println!("ACCEPTANCE 08 fuss-catalan-moments: PASS (worst relative error {worst:.3} <= 0.05 at n=1024, 10 replicas, p=1..4)");
}

/// Criterion 9: empirical log-potential matches the closed form at n = 512.
#[test]
fn acceptance_09_empirical_potential() {
    let mut worst: f64 = 0.0;
    for m in [1usize, 2] {
        let law = PowerDiscLaw::new(m as u32);
        let zs = vec![c(0.0, 0.0), c(0.5, 0.0), c(2.0, 0.0)];
        let cfg = config(
            m,
            EntryLaw::ComplexGaussian,
            vec![512],
            5,
            zs.clone(),
            vec![Metric::Potential],
            20240604,
        );
        let report = run_potential_check(&cfg).unwrap();
        for (zi, &z) in zs.iter().enumerate() {
            let emp = row(&report, 512, &format!("potential_empirical_z{zi}"));
            let err = (emp - law.log_potential(z)).abs();
            worst = worst.max(err);
            assert!(err <= 0.05, "m={m}, z={z}: |emp - U| = {err:.4}");
        }
    }
    println!("ACCEPTANCE 09 empirical-potential: PASS (max |empirical - analytic| = {worst:.3} <= 0.05 at n=512)");
}

/// Criterion 10: deterministic inequalities — the product singular-value
/// bound and the block-linearization pairing/SVD agreement.
#[test]
fn acceptance_10_deterministic_inequalities() {
    let cfg = config(
        2,
        EntryLaw::ComplexGaussian,
        vec![16],
        2,
        vec![],
        vec![Metric::Properties],
        20240605,
    );
    let report = run_property_suite(&cfg).unwrap();
    let violations = row(&report, 8, "prod1_violations");
    assert_eq!(violations, 0.0, "product inequality violations");

    let mut worst: f64 = 0.0;
    for seed in 0..50u64 {
        let n = [4usize, 16, 64][seed as usize % 3];
        let spec = EnsembleSpec {
            m: 1,
            n,
            entry_law: EntryLaw::ComplexGaussian,
            truncation: None,
            seed: 900 + seed,
        };
        let w = matprod_core::ensembles::sample_factor(&spec, 1, 0).unwrap();
        let z = c(0.3, -0.1);
        let ls = linalg::linearized_spectrum(&w, z).unwrap();
        let sv = linalg::singular_values(&w, z).unwrap();
        let tol = 1e-8 * sv.values[0].max(1.0);
        for k in 0..2 * n {
            let gap = (ls[k] + ls[2 * n - 1 - k]).abs();
            worst = worst.max(gap / sv.values[0].max(1.0));
            assert!(gap <= tol, "pairing at n={n}, seed={seed}");
        }
        for j in 0..n {
            let gap = (ls[2 * n - 1 - j] - sv.values[j]).abs();
            worst = worst.max(gap / sv.values[0].max(1.0));
            assert!(gap <= tol, "svd agreement at n={n}, seed={seed}");
        }
    }
    println!("ACCEPTANCE 10 deterministic-inequalities: PASS (0/100 product violations; pairing/SVD agreement within 1e-8 on 50 instances, worst {worst:.2e})");
}

/// Criterion 11: identical config and seed give byte-identical CSV reports up to the
/// measured-time column (runtime, like the JSON timestamp, is volatile).
#[test]
fn acceptance_11_reproducibility() {
    let dir = std::env::temp_dir().join("matprod_acceptance_repro");
    let mut cfg = config(
        2,
        EntryLaw::ComplexGaussian,
        vec![64],
        3,
        vec![c(0.0, 0.0)],
        vec![Metric::RadialKs, Metric::Moments { p_max: 2 }],
        20240606,
    );
    cfg.output_dir = dir.clone();
    let a = run_compare(&cfg).unwrap();
    let b = run_compare(&cfg).unwrap();
    assert_eq!(a.to_csv_without_runtime(), b.to_csv_without_runtime());

    // emitted files agree byte-for-byte after masking the volatile column
    let pa = emit_report(&a, ReportFormat::Csv, &dir.join("first")).unwrap();
    let pb = emit_report(&b, ReportFormat::Csv, &dir.join("second")).unwrap();
    let strip = |p: &std::path::Path| -> String {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .map(|l| {
                let cols: Vec<&str> = l.split(',').collect();
                cols[..cols.len() - 1].join(",")
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&pa), strip(&pb));
    std::fs::remove_dir_all(&dir).ok();
    println!("ACCEPTANCE 11 reproducibility: PASS (byte-identical CSV values for identical config+seed)");
}
