//! The limiting eigenvalue law of the product: the `m`-th power of the
//! uniform distribution on the unit disc.
//!
//! Density `g(x,y) = 1/(πm (x²+y²)^{(m-1)/m})` inside the closed unit disc
//! and 0 outside; radial CDF `r^{2/m}`; logarithmic potential `-log|z|`
//! outside the disc and `(m/2)(1 - |z|^{2/m})` inside. The squared
//! singular-value moments of the product at `z = 0` are the Fuss–Catalan
//! numbers, with support edge `C_m = sqrt((m+1)^{m+1}/m^m)`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::One;
use num_complex::Complex64;
use thiserror::Error;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Law of `ζ^m` for `ζ` uniform on the unit disc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PowerDiscLaw {
    m: u32,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LimitLawError {
    #[error("moment order {p} exceeds the exact-arithmetic guard (p <= {max})")]
    MomentOrderTooLarge { p: u32, max: u32 },
    #[error("the alternative normalization is undefined at p = 0")]
    VariantUndefinedAtZero,
}

impl PowerDiscLaw {
    pub fn new(m: u32) -> Self {
        assert!(m >= 1, "m must be >= 1");
        PowerDiscLaw { m }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Lebesgue density; `+∞` marker at the integrable pole (m > 1, origin),
    /// 0 outside the closed unit disc.
    pub fn density(&self, x: f64, y: f64) -> f64 {
        let r2 = x * x + y * y;
        if r2 > 1.0 {
            return 0.0;
        }
        if self.m == 1 {
            return 1.0 / std::f64::consts::PI;
        }
        if r2 == 0.0 {
            return f64::INFINITY;
        }
        let mf = self.m as f64;
        1.0 / (std::f64::consts::PI * mf * r2.powf((mf - 1.0) / mf))
    }

    /// `P(|Λ| ≤ r) = r^{2/m}` on `[0, 1]`, 1 beyond.
    pub fn radial_cdf(&self, r: f64) -> f64 {
        assert!(r >= 0.0);
        if r >= 1.0 {
            1.0
        } else {
            r.powf(2.0 / self.m as f64)
        }
    }

    /// `P(Re Λ ≤ x, Im Λ ≤ y)` by adaptive polar quadrature, absolute error
    /// below `1e-6`. The radial variable is substituted by its CDF value so
    /// the integrand stays bounded for every `m`.
    pub fn cdf(&self, x: f64, y: f64) -> f64 {
        if x >= 1.0 && y >= 1.0 {
            return 1.0;
        }
        if x <= -1.0 || y <= -1.0 {
            return 0.0;
        }
        let mf = self.m as f64;
        let f = |t: f64| {
            let r = t.powf(mf / 2.0);
            angular_fraction(r, x, y)
        };
        // split at the radii where the angular set changes shape
        let mut cuts = vec![0.0, 1.0];
        for r in [x.abs(), y.abs(), x.hypot(y)] {
            if r > 0.0 && r < 1.0 {
                cuts.push(r.powf(2.0 / mf));
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        let tol = 2.0e-7 / (cuts.len() - 1) as f64;
        let mut total = 0.0;
        for w in cuts.windows(2) {
            total += adaptive_simpson(&f, w[0], w[1], tol, 40);
        }
        total.clamp(0.0, 1.0)
    }

    /// Mass of the disc of radius `r` by direct quadrature of the density
    /// (an independent route to `radial_cdf`).
    pub fn quadrature_radial_mass(&self, r: f64) -> f64 {
        assert!(r >= 0.0);
        let mf = self.m as f64;
        let f = |t: f64| {
            let rho = t.powf(mf / 2.0);
            if rho == 0.0 {
                // integrand limit: pi*m*t^{m-1}*g = 1 inside the disc
                return 1.0;
            }
            std::f64::consts::PI * mf * t.powf(mf - 1.0) * self.density(rho, 0.0)
        };
        let upper = self.radial_cdf(r.min(1.0));
        let tail = adaptive_simpson(&f, 0.0, upper, 1e-7, 40);
        if r > 1.0 {
            // density vanishes outside the unit disc
            tail + 0.0
        } else {
            tail
        }
    }

    /// Logarithmic potential `U(z) = -∫ log|z - w| dμ(w)`:
    /// `-log|z|` for `|z| ≥ 1`, `(m/2)(1 - |z|^{2/m})` for `|z| ≤ 1`.
    pub fn log_potential(&self, z: Complex64) -> f64 {
        let r = z.norm();
        if r >= 1.0 {
            -r.ln()
        } else {
            let mf = self.m as f64;
            0.5 * mf * (1.0 - r.powf(2.0 / mf))
        }
    }
}

/// Fraction of the circle of radius `r` lying in `{Re ≤ x, Im ≤ y}`.
fn angular_fraction(r: f64, x: f64, y: f64) -> f64 {
    if r == 0.0 {
        return if x >= 0.0 && y >= 0.0 { 1.0 } else { 0.0 };
    }
    let a = segments_cos_le(x / r);
    let b = segments_sin_le(y / r);
    let mut len = 0.0;
    for &(a1, b1) in &a {
        for &(a2, b2) in &b {
            len += (b1.min(b2) - a1.max(a2)).max(0.0);
        }
    }
    len / TAU
}

// {θ ∈ [0, 2π): cos θ ≤ a} as disjoint segments
fn segments_cos_le(a: f64) -> Vec<(f64, f64)> {
    if a >= 1.0 {
        vec![(0.0, TAU)]
    } else if a <= -1.0 {
        vec![]
    } else {
        let t = a.acos();
        vec![(t, TAU - t)]
    }
}

// {θ ∈ [0, 2π): sin θ ≤ b} as disjoint segments
fn segments_sin_le(b: f64) -> Vec<(f64, f64)> {
    if b >= 1.0 {
        vec![(0.0, TAU)]
    } else if b <= -1.0 {
        vec![]
    } else {
        let s = b.asin();
        if s >= 0.0 {
            vec![(0.0, s), (std::f64::consts::PI - s, TAU)]
        } else {
            vec![(std::f64::consts::PI - s, TAU + s)]
        }
    }
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    let k = k.min(n - k);
    let mut num = BigInt::one();
    for i in 0..k {
        num *= n - i;
    }
    let mut den = BigInt::one();
    for i in 0..k {
        den *= i + 1;
    }
    num / den
}

/// Fuss–Catalan number `FC_m(p) = binom((m+1)p, p) / (mp + 1)` as an exact
/// rational; the `z = 0` squared singular-value moments of the product.
pub fn fuss_catalan(m: u32, p: u32) -> Result<BigRational, LimitLawError> {
    const MAX_P: u32 = 12;
    if p > MAX_P {
        return Err(LimitLawError::MomentOrderTooLarge { p, max: MAX_P });
    }
    let n = (m as u64 + 1) * p as u64;
    Ok(BigRational::new(
        binomial(n, p as u64),
        BigInt::from(m as u64 * p as u64 + 1),
    ))
}

/// Alternative normalization `binom((m+1)p, p) / (mp + p)`, kept for
/// comparison with the main definition; undefined at `p = 0`. At `m = 1` it
/// departs from the Catalan sequence (3/2 instead of 2 at `p = 2`), which is
/// why [`fuss_catalan`] is the one the moment checks use.
pub fn fuss_catalan_variant(m: u32, p: u32) -> Result<BigRational, LimitLawError> {
    const MAX_P: u32 = 12;
    if p == 0 {
        return Err(LimitLawError::VariantUndefinedAtZero);
    }
    if p > MAX_P {
        return Err(LimitLawError::MomentOrderTooLarge { p, max: MAX_P });
    }
    let n = (m as u64 + 1) * p as u64;
    Ok(BigRational::new(
        binomial(n, p as u64),
        BigInt::from((m as u64 + 1) * p as u64),
    ))
}

/// `fuss_catalan` as f64.
pub fn fuss_catalan_f64(m: u32, p: u32) -> Result<f64, LimitLawError> {
    use num::traits::ToPrimitive;
    Ok(fuss_catalan(m, p)?.to_f64().expect("fits in f64 for p <= 12"))
}

/// Right edge `C_m = sqrt((m+1)^{m+1} / m^m)` of the `z = 0` singular-value
/// limit law.
pub fn support_edge(m: u32) -> f64 {
    assert!(m >= 1);
    let mf = m as f64;
    ((mf + 1.0).powi(m as i32 + 1) / mf.powi(m as i32)).sqrt()
}
