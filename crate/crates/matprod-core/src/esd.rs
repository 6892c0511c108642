//! Empirical spectral distributions and summary statistics.

use num_complex::Complex64;
use rand::Rng;

use crate::linalg::{self, CMatrix, EigenSpectrum, LinalgError, SingularSpectrum};

/// Right-continuous empirical CDF of a finite sample with uniform weights.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    samples: Vec<f64>, // sorted ascending
}

impl EmpiricalCdf {
    /// Sorts the samples; rejects NaN.
    pub fn new(mut samples: Vec<f64>) -> Self {
        assert!(!samples.is_empty(), "empty sample");
        assert!(samples.iter().all(|x| !x.is_nan()), "NaN sample");
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        EmpiricalCdf { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// `F(x) = #{s ≤ x} / N` (right-continuous).
    pub fn eval(&self, x: f64) -> f64 {
        let k = self.samples.partition_point(|&s| s <= x);
        k as f64 / self.samples.len() as f64
    }

    /// Left limit `F(x⁻) = #{s < x} / N`.
    pub fn eval_left(&self, x: f64) -> f64 {
        let k = self.samples.partition_point(|&s| s < x);
        k as f64 / self.samples.len() as f64
    }

    /// Jump points with ties merged, paired with (left, right) CDF values.
    fn jumps(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let n = self.samples.len() as f64;
        let mut idx = 0usize;
        std::iter::from_fn(move || {
            if idx >= self.samples.len() {
                return None;
            }
            let x = self.samples[idx];
            let left = idx as f64 / n;
            while idx < self.samples.len() && self.samples[idx] == x {
                idx += 1;
            }
            Some((x, left, idx as f64 / n))
        })
    }

    /// CSV with columns `sample,cumulative_weight`.
    pub fn to_csv(&self) -> String {
        let n = self.samples.len() as f64;
        let mut out = String::from("sample,cumulative_weight\n");
        for (i, s) in self.samples.iter().enumerate() {
            out.push_str(&format!("{},{}\n", s, (i + 1) as f64 / n));
        }
        out
    }
}

/// Empirical CDF of the eigenvalue moduli.
pub fn radial_ecdf(eig: &EigenSpectrum) -> EmpiricalCdf {
    EmpiricalCdf::new(eig.values.iter().map(|l| l.norm()).collect())
}

/// Empirical CDF of the eigenvalue arguments mapped to `[0, 1)`.
pub fn angular_ecdf(eig: &EigenSpectrum) -> EmpiricalCdf {
    EmpiricalCdf::new(
        eig.values
            .iter()
            .map(|l| {
                let t = l.arg() / (2.0 * std::f64::consts::PI);
                if t < 0.0 {
                    t + 1.0
                } else {
                    t
                }
            })
            .collect(),
    )
}

/// Fraction of eigenvalues with `Re ≤ x` and `Im ≤ y`.
pub fn cdf2d(eig: &EigenSpectrum, x: f64, y: f64) -> f64 {
    let count = eig
        .values
        .iter()
        .filter(|l| l.re <= x && l.im <= y)
        .count();
    count as f64 / eig.values.len() as f64
}

/// Symmetrization of a one-sided (squared-value) CDF:
/// `F̃(x) = ½(1 + sign(x)·F(x²))`.
pub fn symmetrize(squared_value_cdf: &EmpiricalCdf, x: f64) -> f64 {
    let sign = if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    };
    0.5 * (1.0 + sign * squared_value_cdf.eval(x * x))
}

// largest float strictly below x; used to take left limits of references
fn next_down(x: f64) -> f64 {
    if x.is_nan() || x == f64::NEG_INFINITY {
        return x;
    }
    let bits = if x == 0.0 {
        1u64 | (1u64 << 63) // -0 direction: smallest negative subnormal
    } else if x > 0.0 {
        x.to_bits() - 1
    } else {
        x.to_bits() + 1
    };
    f64::from_bits(bits)
}

/// Exact Kolmogorov distance between an empirical CDF and a nondecreasing
/// reference with limits 0 and 1: the sup over jump points of the post-jump
/// gap `|F(x) - G(x)|` and the pre-jump gap `|F(x⁻) - G(x⁻)|` (the reference
/// left limit taken one ulp below, so step references are handled exactly).
pub fn ks_distance<G: Fn(f64) -> f64>(empirical: &EmpiricalCdf, reference: G) -> f64 {
    let mut sup: f64 = 0.0;
    for (x, left, right) in empirical.jumps() {
        sup = sup
            .max((right - reference(x)).abs())
            .max((left - reference(next_down(x))).abs());
    }
    sup
}

/// Smoothed (or raw) log-potential estimate at one shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialEstimate {
    pub value: f64,
    pub floored_count: usize,
    pub smoothing_radius: f64,
    pub replica_count: usize,
}

/// `-(1/n)·log|det(W - zI)|`, optionally averaged over `draws` uniform
/// shifts `z + r·ξ` with `ξ` uniform in the unit disc.
pub fn empirical_log_potential<R: Rng>(
    w: &CMatrix,
    z: Complex64,
    smoothing_radius: f64,
    smoothing_draws: usize,
    rng: &mut R,
) -> Result<PotentialEstimate, LinalgError> {
    assert!(smoothing_radius >= 0.0);
    let n = w.nrows() as f64;
    if smoothing_radius == 0.0 {
        let lad = linalg::log_abs_det(w, z, linalg::DEFAULT_LOG_FLOOR)?;
        return Ok(PotentialEstimate {
            value: -lad.value / n,
            floored_count: lad.floored_count,
            smoothing_radius: 0.0,
            replica_count: 1,
        });
    }
    assert!(smoothing_draws >= 1, "smoothing needs at least one draw");
    let mut sum = 0.0;
    let mut floored = 0;
    for _ in 0..smoothing_draws {
        let r = smoothing_radius * rng.gen::<f64>().sqrt();
        let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
        let xi = Complex64::from_polar(r, theta);
        let lad = linalg::log_abs_det(w, z + xi, linalg::DEFAULT_LOG_FLOOR)?;
        sum += -lad.value / n;
        floored += lad.floored_count;
    }
    Ok(PotentialEstimate {
        value: sum / smoothing_draws as f64,
        floored_count: floored,
        smoothing_radius,
        replica_count: smoothing_draws,
    })
}

/// `(1/n) Σ_j s_j^{2p}`.
pub fn spectral_moment(singulars: &SingularSpectrum, p: u32) -> f64 {
    assert!(p <= 8, "moment order capped at 8 to avoid overflow");
    let n = singulars.values.len() as f64;
    singulars
        .values
        .iter()
        .map(|s| s.powi(2 * p as i32))
        .sum::<f64>()
        / n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_factor, EnsembleSpec, EntryLaw};
    use crate::linalg::singular_values;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn radial_cdf_of_degenerate_and_roots_of_unity() {
        let zero = EigenSpectrum {
            values: vec![c(0.0, 0.0); 4],
        };
        let cdf = radial_ecdf(&zero);
        assert_eq!(cdf.eval(0.0), 1.0);
        assert_eq!(cdf.eval(2.0), 1.0);

        let roots = EigenSpectrum {
            values: vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)],
        };
        let cdf = radial_ecdf(&roots);
        assert_eq!(cdf.eval(0.5), 0.0);
        assert_eq!(cdf.eval(1.0), 1.0);
    }

    #[test]
    fn radial_cdf_hits_k_over_n_at_sorted_moduli() {
        let eig = EigenSpectrum {
            values: vec![c(0.3, 0.0), c(0.0, 0.7), c(-1.1, 0.0), c(0.5, 0.5)],
        };
        let cdf = radial_ecdf(&eig);
        let mut moduli: Vec<f64> = eig.values.iter().map(|l| l.norm()).collect();
        moduli.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (k, r) in moduli.iter().enumerate() {
            assert_eq!(cdf.eval(*r), (k + 1) as f64 / 4.0);
        }
    }

    #[test]
    fn cdf2d_examples() {
        let one = EigenSpectrum {
            values: vec![c(1.0, 1.0)],
        };
        assert_eq!(cdf2d(&one, f64::INFINITY, f64::INFINITY), 1.0);
        assert_eq!(cdf2d(&one, 0.0, 0.0), 0.0);
        let two = EigenSpectrum {
            values: vec![c(0.0, 0.0), c(1.0, 1.0)],
        };
        assert_eq!(cdf2d(&two, 0.5, 0.5), 0.5);
    }

    #[test]
    fn symmetrize_hand_values() {
        let sq = EmpiricalCdf::new(vec![4.0, 9.0]);
        assert_eq!(symmetrize(&sq, 2.0), 0.75);
        assert_eq!(symmetrize(&sq, 0.0), 0.5);
        assert_eq!(symmetrize(&sq, -2.0), 0.25);
    }

    #[test]
    fn ks_distance_examples() {
        let e = EmpiricalCdf::new(vec![0.2, 0.5, 0.9]);
        let own = e.clone();
        assert_eq!(ks_distance(&e, |x| own.eval(x)), 0.0);

        // point mass at 0 vs r^2 on [0,1]: sup attained just above 0
        let point = EmpiricalCdf::new(vec![0.0]);
        let d = ks_distance(&point, |r| r.clamp(0.0, 1.0).powi(2));
        assert_eq!(d, 1.0);

        let two = EmpiricalCdf::new(vec![0.5, 1.0]);
        let d = ks_distance(&two, |r| r.clamp(0.0, 1.0).powi(2));
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn log_potential_radius_zero_matches_singulars_exactly() {
        let spec = EnsembleSpec {
            m: 1,
            n: 16,
            entry_law: EntryLaw::ComplexGaussian,
            truncation: None,
            seed: 8,
        };
        let w = sample_factor(&spec, 1, 0).unwrap();
        let z = c(0.2, 0.1);
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let est = empirical_log_potential(&w, z, 0.0, 1, &mut rng).unwrap();
        let sv = singular_values(&w, z).unwrap();
        let direct = -sv.values.iter().map(|s| s.ln()).sum::<f64>() / 16.0;
        assert_eq!(est.value, direct);
        assert_eq!(est.floored_count, 0);
    }

    #[test]
    fn log_potential_of_unit_singulars_is_zero() {
        // diag(e, 1/e): s = {e, e^-1}, radius 0 -> 0
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                c(std::f64::consts::E, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(1.0 / std::f64::consts::E, 0.0),
            ],
        );
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let est = empirical_log_potential(&m, c(0.0, 0.0), 0.0, 1, &mut rng).unwrap();
        assert!(est.value.abs() < 1e-14);
    }

    #[test]
    fn moment_examples() {
        let s = SingularSpectrum {
            values: vec![1.0, 1.0],
            shift: c(0.0, 0.0),
        };
        assert_eq!(spectral_moment(&s, 1), 1.0);
        assert_eq!(spectral_moment(&s, 0), 1.0);
        let s = SingularSpectrum {
            values: vec![2.0, 0.0],
            shift: c(0.0, 0.0),
        };
        assert_eq!(spectral_moment(&s, 0), 1.0);
        assert_eq!(spectral_moment(&s, 2), 8.0);
    }

    #[test]
    fn first_moment_is_frobenius_over_n() {
        let spec = EnsembleSpec {
            m: 1,
            n: 24,
            entry_law: EntryLaw::ComplexGaussian,
            truncation: None,
            seed: 123,
        };
        let w = sample_factor(&spec, 1, 0).unwrap();
        let z = c(0.4, -0.2);
        let sv = singular_values(&w, z).unwrap();
        let mut a = w.clone();
        for i in 0..24 {
            a[(i, i)] -= z;
        }
        let f2 = crate::linalg::frobenius_norm_sq(&a);
        let m1 = spectral_moment(&sv, 1) * 24.0;
        assert!((m1 - f2).abs() <= 1e-9 * f2);
    }

    #[test]
    fn csv_round_trip_shape() {
        let cdf = EmpiricalCdf::new(vec![0.5, 0.25, 1.0]);
        let csv = cdf.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "sample,cumulative_weight");
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].starts_with("0.25,"));
        assert!(rows[2].ends_with(",1"));
    }

    proptest! {
        // symmetrized output is a valid CDF: F(0) = 1/2, nondecreasing,
        // and F(-x) + F(x⁻) = 1 at continuity points.
        #[test]
        fn symmetrize_is_a_valid_cdf(mut sq in proptest::collection::vec(0.0f64..9.0, 1..40),
                                     x1 in -4.0f64..4.0, x2 in -4.0f64..4.0) {
            sq.retain(|v| v.is_finite());
            prop_assume!(!sq.is_empty());
            let cdf = EmpiricalCdf::new(sq.clone());
            prop_assert_eq!(symmetrize(&cdf, 0.0), 0.5);
            let (lo, hi) = if x1 <= x2 { (x1, x2) } else { (x2, x1) };
            prop_assert!(symmetrize(&cdf, lo) <= symmetrize(&cdf, hi) + 1e-15);
            // pick a continuity point: x not a sample sqrt
            let x = 1.2345678;
            let plus = symmetrize(&cdf, x);
            let minus = symmetrize(&cdf, -x);
            prop_assert!((plus + minus - 1.0).abs() < 1e-12);
        }

        #[test]
        fn ks_distance_is_bounded(samples in proptest::collection::vec(0.0f64..2.0, 1..50)) {
            let cdf = EmpiricalCdf::new(samples);
            let d = ks_distance(&cdf, |r| r.clamp(0.0, 1.0));
            prop_assert!((0.0..=1.0).contains(&d));
        }

        // triangle sanity: D(F, H) <= D(F, G) + sup|G - H| on the jump grid
        #[test]
        fn ks_triangle_sanity(samples in proptest::collection::vec(0.0f64..1.0, 1..30)) {
            let cdf = EmpiricalCdf::new(samples);
            let g = |r: f64| r.clamp(0.0, 1.0);
            let h = |r: f64| r.clamp(0.0, 1.0).powi(2);
            let d_fh = ks_distance(&cdf, h);
            let d_fg = ks_distance(&cdf, g);
            let sup_gh = 0.25; // max of r - r^2 on [0,1]
            prop_assert!(d_fh <= d_fg + sup_gh + 1e-12);
        }
    }
}
