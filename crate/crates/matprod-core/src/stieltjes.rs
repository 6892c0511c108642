//! Solver for the limiting Stieltjes-transform system of the symmetrized
//! singular-value laws of `W - zI`.
//!
//! At each spectral parameter `α` (upper half-plane) and shift `z`, the limit
//! transform `y` and the auxiliary variable `w` satisfy
//!
//! ```text
//! 1 + w·y + (-1)^{m+1} w^{m-1} y^{m+1} = 0
//! y (w - α)² + (w - α) - y |z|²        = 0
//! ```
//!
//! with the off-diagonal resolvent average recovered as `t = y (w - α) / z`
//! (`t = 0` at `z = 0`, where the second equation degenerates; the conjugate
//! average `u` is tied to `t` by `z·t = z̄·u` and is not stored separately).
//! The pair is solved by damped Newton iteration with continuation in
//! `Im α` from `v₀ = 8 + |z|` down to the requested height: at large `v` the
//! solution is unique and close to the asymptote `y ≈ -1/α`, and each level
//! warm-starts the next, which keeps the iteration on the Nevanlinna branch
//! (`Im y > 0`, `Im(w - α) ≥ 0`). On Newton stagnation a damped fixed-point
//! form of the first equation is used, with the square-root branch of the
//! second equation chosen by `Im(w - α) ≥ 0` and ties broken by continuity.
//! A failed continuation yields a non-converged state with diagnostics,
//! never a fabricated value.
//!
//! Densities come from Stieltjes inversion `p(x) = Im y(x + iv)/π` with a
//! two-point Richardson extrapolation in `v`, and the logarithmic potential
//! of the limit eigenvalue law is recovered as `-∫ log|x| p(x, z) dx`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::limitlaw;

const PI: f64 = std::f64::consts::PI;
const INNER_TOL: f64 = 1e-13;
const CONVERGED_TOL: f64 = 1e-11;
const CONTINUATION_RATIO: f64 = 0.7;

/// Solution of the limit system at one `(α, z)`, with branch and
/// convergence metadata. Serializes to the solver's JSON diagnostic record.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StieltjesState {
    pub alpha: Complex64,
    pub z: Complex64,
    pub y: Complex64,
    pub t: Complex64,
    pub w: Complex64,
    /// Moduli of the two equation defects at the returned point; the second
    /// is normalized by the magnitude of its dominant term, which matters
    /// only where `|w - α|` is huge (outside the spectrum near the real
    /// axis) and coincides with the absolute defect everywhere else.
    pub residuals: [f64; 2],
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Error, Clone)]
pub enum StieltjesError {
    #[error(
        "limit-system solver did not converge: m={m}, z={z}, alpha={alpha}, \
         residuals=({r1:.3e}, {r2:.3e}) after {iterations} iterations"
    )]
    NotConverged {
        m: u32,
        z: Complex64,
        alpha: Complex64,
        r1: f64,
        r2: f64,
        iterations: usize,
    },
    #[error("imaginary residue {imag:.3e} on the imaginary axis exceeds 1e-8")]
    ResidueTooLarge { imag: f64 },
}

fn ensure_converged(m: u32, st: &StieltjesState) -> Result<(), StieltjesError> {
    if st.converged {
        Ok(())
    } else {
        Err(StieltjesError::NotConverged {
            m,
            z: st.z,
            alpha: st.alpha,
            r1: st.residuals[0],
            r2: st.residuals[1],
            iterations: st.iterations,
        })
    }
}

struct System {
    m: u32,
    z2: f64,
    /// `(-1)^{m+1}`
    sign: f64,
}

// Outcome of one inner solve: iterate, scale-normalized residual moduli,
// iterations spent, and whether both residuals met the convergence bar.
struct Inner {
    y: Complex64,
    w: Complex64,
    res: [f64; 2],
    iters: usize,
    ok: bool,
}

impl System {
    fn new(m: u32, z: Complex64) -> Self {
        assert!(m >= 1, "m must be >= 1");
        System {
            m,
            z2: z.norm_sqr(),
            sign: if m.is_multiple_of(2) { -1.0 } else { 1.0 },
        }
    }

    // Equation defects in forms that stay O(1) even where `|w| ~ 1/|y|`
    // blows up (outside the spectrum near the real axis): the first through
    // powers of `q = w·y`, the second factored as `(w-α)(q+1-αy) - y|z|²`
    // and normalized by its dominant term.
    fn residuals(&self, alpha: Complex64, y: Complex64, w: Complex64) -> [f64; 2] {
        let q = w * y;
        let r1 = Complex64::new(1.0, 0.0) + q + q.powu(self.m - 1) * y * y * self.sign;
        let x = w - alpha;
        let g = q + 1.0 - y * alpha;
        let r2 = x * g - y * self.z2;
        let scale2 = (y.norm() * x.norm_sqr())
            .max(x.norm())
            .max(y.norm() * self.z2)
            .max(1.0);
        [r1.norm(), r2.norm() / scale2]
    }

    // Square root of 1 + 4y²|z|², principal branch.
    fn root_disc(&self, y: Complex64) -> Complex64 {
        (Complex64::new(1.0, 0.0) + y * y * (4.0 * self.z2)).sqrt()
    }

    // The two roots of the second equation in X = w - α, in cancellation-free
    // forms: β₊ = 2y|z|²/(1+Q) (small root), β₋ = -(1+Q)/(2y) (large root).
    fn beta(&self, y: Complex64, sigma: i8) -> Complex64 {
        let q = self.root_disc(y);
        if sigma > 0 {
            y * (2.0 * self.z2) / (q + 1.0)
        } else {
            -(q + 1.0) / (y * 2.0)
        }
    }

    fn beta_prime(&self, y: Complex64, sigma: i8) -> Complex64 {
        let q = self.root_disc(y);
        if sigma > 0 {
            let qp1 = q + 1.0;
            Complex64::new(2.0 * self.z2, 0.0) / qp1
                - y * y * (8.0 * self.z2 * self.z2) / (q * qp1 * qp1)
        } else {
            ((q + 1.0) - y * y * (4.0 * self.z2) / q) / (y * y * 2.0)
        }
    }

    // First equation with w eliminated: F(y) = 1 + wy + (-1)^{m+1} (wy)^{m-1} y².
    fn scalar_f(&self, alpha: Complex64, y: Complex64, sigma: i8) -> (Complex64, Complex64) {
        let w = alpha + self.beta(y, sigma);
        let q = w * y;
        let f = Complex64::new(1.0, 0.0) + q + q.powu(self.m - 1) * y * y * self.sign;
        (f, w)
    }

    fn scalar_f_prime(&self, y: Complex64, w: Complex64, sigma: i8) -> Complex64 {
        let wp = self.beta_prime(y, sigma);
        let q = w * y;
        let m = self.m;
        let mut fp = w + wp * y + q.powu(m - 1) * y * (self.sign * (m + 1) as f64);
        if m >= 2 {
            fp += q.powu(m - 2) * y * y * y * wp * (self.sign * (m - 1) as f64);
        }
        fp
    }

    // Pick the root label whose value at `y` continues the incumbent X.
    fn match_branch(&self, y: Complex64, x_prev: Complex64) -> i8 {
        let bp = self.beta(y, 1);
        let bm = self.beta(y, -1);
        if (bp - x_prev).norm() <= (bm - x_prev).norm() {
            1
        } else {
            -1
        }
    }

    // Damped Newton on the eliminated scalar equation; the second equation
    // holds by construction of w.
    fn scalar_newton(
        &self,
        alpha: Complex64,
        y0: Complex64,
        sigma: i8,
        budget: usize,
    ) -> Inner {
        let mut y = y0;
        let (mut f, mut w) = self.scalar_f(alpha, y, sigma);
        let mut iters = 0;
        while iters < budget && f.norm() > INNER_TOL {
            iters += 1;
            let fp = self.scalar_f_prime(y, w, sigma);
            if !fp.is_finite() || fp.norm() < 1e-300 {
                break;
            }
            let dy = -f / fp;
            let mut lambda = 1.0;
            let mut stepped = false;
            for _ in 0..8 {
                let yt = y + dy * lambda;
                if yt.im > 0.0 && yt.is_finite() {
                    let (ft, wt) = self.scalar_f(alpha, yt, sigma);
                    if ft.is_finite() && ft.norm() < f.norm() {
                        y = yt;
                        f = ft;
                        w = wt;
                        stepped = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !stepped {
                break;
            }
        }
        let res = self.residuals(alpha, y, w);
        Inner {
            y,
            w,
            res,
            iters,
            ok: res[0] <= CONVERGED_TOL && res[1] <= CONVERGED_TOL,
        }
    }

    // Damped Newton on the full pair; healthy at the square-root branch
    // point Q ≈ 0, where the eliminated scalar derivative blows up.
    fn pair_newton(
        &self,
        alpha: Complex64,
        start: (Complex64, Complex64),
        budget: usize,
    ) -> Inner {
        let (mut y, mut w) = start;
        let mut res = self.residuals(alpha, y, w);
        let mut rho = res[0] + res[1];
        let mut iters = 0;
        while iters < budget && rho > INNER_TOL {
            iters += 1;
            let m = self.m;
            let a = w + w.powu(m - 1) * y.powu(m) * (self.sign * (m + 1) as f64);
            let b = if m >= 2 {
                y + w.powu(m - 2) * y.powu(m + 1) * (self.sign * (m - 1) as f64)
            } else {
                y
            };
            let x = w - alpha;
            let c = x * x - self.z2;
            let d = y * x * 2.0 + 1.0;
            let det = a * d - b * c;
            if !det.is_finite() || det.norm() < 1e-300 {
                break;
            }
            let q = w * y;
            let r1 = Complex64::new(1.0, 0.0) + q + q.powu(m - 1) * y * y * self.sign;
            let r2 = x * (q + 1.0 - y * alpha) - y * self.z2;
            let dy = (-r1 * d + r2 * b) / det;
            let dw = (-r2 * a + r1 * c) / det;
            let mut lambda = 1.0;
            let mut stepped = false;
            for _ in 0..8 {
                let yt = y + dy * lambda;
                let wt = w + dw * lambda;
                if yt.im > 0.0 && yt.is_finite() && wt.is_finite() {
                    let rt = self.residuals(alpha, yt, wt);
                    if rt[0] + rt[1] < rho {
                        y = yt;
                        w = wt;
                        res = rt;
                        rho = rt[0] + rt[1];
                        stepped = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !stepped {
                break;
            }
        }
        Inner {
            y,
            w,
            res,
            iters,
            ok: res[0] <= CONVERGED_TOL && res[1] <= CONVERGED_TOL,
        }
    }

    // Damped fixed-point form y ← -1/(w + (-1)^{m+1} w^{m-1} y^m) with w
    // from the Im ≥ 0 square-root branch (ties by continuity); used to
    // escape Newton stagnation.
    fn fixed_point(
        &self,
        alpha: Complex64,
        start: (Complex64, Complex64),
        budget: usize,
    ) -> (Complex64, Complex64, usize) {
        let (mut y, mut w) = start;
        let mut best = (y, w);
        let r = self.residuals(alpha, y, w);
        let mut best_rho = r[0] + r[1];
        for _ in 0..budget {
            let bp = self.beta(y, 1);
            let bm = self.beta(y, -1);
            let prev = w - alpha;
            let p_ok = bp.im >= -1e-14;
            let m_ok = bm.im >= -1e-14;
            let beta = match (p_ok, m_ok) {
                (true, false) => bp,
                (false, true) => bm,
                (true, true) => {
                    if (bp - prev).norm() <= (bm - prev).norm() {
                        bp
                    } else {
                        bm
                    }
                }
                (false, false) => {
                    if bp.im >= bm.im {
                        bp
                    } else {
                        bm
                    }
                }
            };
            let w_new = alpha + beta;
            let denom = w_new + w_new.powu(self.m - 1) * y.powu(self.m) * self.sign;
            if !denom.is_finite() || denom.norm() < 1e-300 {
                break;
            }
            let y_new = y + (-denom.inv() - y) * 0.5;
            if !(y_new.im > 0.0 && y_new.is_finite()) {
                break;
            }
            y = y_new;
            w = w_new;
            let r = self.residuals(alpha, y, w);
            if r[0] + r[1] < best_rho {
                best_rho = r[0] + r[1];
                best = (y, w);
            }
        }
        (best.0, best.1, budget)
    }

    // Full strategy at one continuation level: eliminated scalar Newton
    // first (pair Newton first when starting near the branch point),
    // cross-falling back, then a fixed-point escape and one retry.
    fn solve_level(&self, alpha: Complex64, start: (Complex64, Complex64)) -> Inner {
        let (y0, w0) = start;
        let sigma = self.match_branch(y0, w0 - alpha);
        let near_branch_point = self.root_disc(y0).norm() < 0.05;

        let first = if near_branch_point {
            self.pair_newton(alpha, (y0, w0), 120)
        } else {
            self.scalar_newton(alpha, y0, sigma, 80)
        };
        if first.ok {
            return first;
        }
        let mut iters = first.iters;

        let second = if near_branch_point {
            let s = self.match_branch(first.y, first.w - alpha);
            self.scalar_newton(alpha, first.y, s, 80)
        } else {
            self.pair_newton(alpha, (first.y, first.w), 120)
        };
        iters += second.iters;
        if second.ok {
            return Inner { iters, ..second };
        }

        let best = if second.res[0] + second.res[1] < first.res[0] + first.res[1] {
            (second.y, second.w)
        } else {
            (first.y, first.w)
        };
        let (y, w, fp_iters) = self.fixed_point(alpha, best, 30);
        iters += fp_iters;
        let sigma = self.match_branch(y, w - alpha);
        let third = self.scalar_newton(alpha, y, sigma, 80);
        iters += third.iters;
        if third.ok {
            return Inner { iters, ..third };
        }
        let fourth = self.pair_newton(alpha, (third.y, third.w), 120);
        iters += fourth.iters;
        Inner {
            iters,
            ..fourth
        }
    }
}

fn asymptotic_start(sys: &System, alpha: Complex64) -> (Complex64, Complex64) {
    let y = -alpha.inv();
    let w = alpha + y * sys.z2;
    (y, w)
}

/// Solve the limit system at `(α, z)` by a warm-started continuation sweep
/// in `Im α`. Requires `Im α > 0`.
pub fn solve_system(m: u32, z: Complex64, alpha: Complex64) -> StieltjesState {
    assert!(alpha.im > 0.0, "alpha must lie in the upper half-plane");
    let sys = System::new(m, z);
    let u = alpha.re;
    let v_target = alpha.im;
    let v0 = 8.0 + z.norm();

    let mut schedule = Vec::new();
    if v_target >= v0 {
        schedule.push(v_target);
    } else {
        let mut v = v0;
        while v > v_target {
            schedule.push(v);
            v *= CONTINUATION_RATIO;
        }
        schedule.push(v_target);
    }

    let mut warm: Option<(Complex64, Complex64)> = None;
    let mut last = asymptotic_start(&sys, Complex64::new(u, schedule[0]));
    let mut residuals = [f64::INFINITY; 2];
    let mut total_iters = 0usize;
    let mut ok_all = true;
    for &v in &schedule {
        let a = Complex64::new(u, v);
        let start = warm.unwrap_or_else(|| asymptotic_start(&sys, a));
        let mut sol = sys.solve_level(a, start);
        total_iters += sol.iters;
        if !sol.ok && warm.is_some() {
            // cold restart at this level before giving up
            let retry = sys.solve_level(a, asymptotic_start(&sys, a));
            total_iters += retry.iters;
            if retry.ok {
                sol = retry;
            }
        }
        last = (sol.y, sol.w);
        residuals = sol.res;
        if !sol.ok {
            ok_all = false;
            break;
        }
        warm = Some((sol.y, sol.w));
    }

    let (mut y, mut w) = last;
    let mut converged = ok_all;
    if converged && (w - alpha).im < -1e-12 && sys.z2 > 0.0 {
        // wrong root of the quadratic: jump to the conjugate root (their
        // product is -|z|²) and re-polish
        let x = w - alpha;
        let flipped = alpha - Complex64::new(sys.z2, 0.0) / x;
        let sol = sys.solve_level(alpha, (y, flipped));
        total_iters += sol.iters;
        if sol.ok && (sol.w - alpha).im >= -1e-12 {
            y = sol.y;
            w = sol.w;
            residuals = sol.res;
        } else {
            converged = false;
        }
    }

    let t = if z.norm() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        y * (w - alpha) / z
    };
    StieltjesState {
        alpha,
        z,
        y,
        t,
        w,
        residuals,
        iterations: total_iters,
        converged,
    }
}

/// Limiting symmetrized singular-value density at `x`:
/// `(1/π)·Im y(x + iv)` extrapolated from heights `v_min` and `2·v_min`.
pub fn density(m: u32, z: Complex64, x: f64, v_min: f64) -> Result<f64, StieltjesError> {
    assert!(
        (1e-8..=1e-2).contains(&v_min),
        "v_min must lie in [1e-8, 1e-2]"
    );
    let s1 = solve_system(m, z, Complex64::new(x, v_min));
    ensure_converged(m, &s1)?;
    let s2 = solve_system(m, z, Complex64::new(x, 2.0 * v_min));
    ensure_converged(m, &s2)?;
    Ok(((2.0 * s1.y.im - s2.y.im) / PI).max(0.0))
}

/// Density of the limiting symmetrized law on a symmetric grid.
#[derive(Debug, Clone, Serialize)]
pub struct DensityCurve {
    pub z: Complex64,
    /// `(x, p(x, z))`, sorted by `x`; the grid straddles but never contains 0.
    pub grid: Vec<(f64, f64)>,
    pub v_min: f64,
}

pub const DEFAULT_CURVE_POINTS: usize = 2048;
pub const DEFAULT_CURVE_V_MIN: f64 = 1e-5;

/// Build the density curve on `[-L, L]`, `L = C_m + |z| + 0.2`: a uniform
/// midpoint grid of `base_points` cells plus a geometric refinement toward
/// the origin (the density blows up like `|x|^{-(m-1)/(m+1)}` at `z = 0`
/// and the trapezoid mass criterion needs the singular hump resolved).
/// Every point runs its own downward continuation in `Im α` — tracking
/// roots along the real axis is unsafe at spectral edges, where branches
/// collide — and points are solved in parallel chunks.
pub fn density_curve(
    m: u32,
    z: Complex64,
    v_min: f64,
    base_points: usize,
) -> Result<DensityCurve, StieltjesError> {
    assert!(
        (1e-8..=1e-2).contains(&v_min),
        "v_min must lie in [1e-8, 1e-2]"
    );
    assert!(base_points >= 64, "grid too coarse");
    let l = limitlaw::support_edge(m) + z.norm() + 0.2;
    let h = 2.0 * l / base_points as f64;
    let mut xs: Vec<f64> = (0..base_points)
        .map(|k| -l + (k as f64 + 0.5) * h)
        .collect();
    let floor = 1e-7 * l.max(1.0);
    let mut xr = (0.25f64).min(0.25 * l).max(h);
    while xr > floor {
        xs.push(xr);
        xs.push(-xr);
        xr *= 0.9;
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();

    let rows: Result<Vec<Vec<(f64, f64)>>, StieltjesError> = xs
        .chunks(64)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|chunk| {
            let mut out = Vec::with_capacity(chunk.len());
            for &x in *chunk {
                let s1 = solve_system(m, z, Complex64::new(x, v_min));
                ensure_converged(m, &s1)?;
                let s2 = solve_system(m, z, Complex64::new(x, 2.0 * v_min));
                ensure_converged(m, &s2)?;
                out.push((x, ((2.0 * s1.y.im - s2.y.im) / PI).max(0.0)));
            }
            Ok(out)
        })
        .collect();
    Ok(DensityCurve {
        z,
        grid: rows?.into_iter().flatten().collect(),
        v_min,
    })
}

impl DensityCurve {
    /// Trapezoid mass of the curve.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.grid, |_x, p| p)
    }

    /// Trapezoid `∫ x^{2p} p(x) dx`.
    pub fn even_moment(&self, p: u32) -> f64 {
        trapezoid(&self.grid, |x, v| x.powi(2 * p as i32) * v)
    }

    /// `-∫ log|x| p(x) dx` with the log weight integrated exactly against
    /// the piecewise-linear density (a plain trapezoid rule loses the mass
    /// near the integrable log singularity at 0).
    pub fn neg_log_moment(&self) -> f64 {
        // primitives of ln|x| and x·ln|x|, both continuous through 0
        fn f1(x: f64) -> f64 {
            if x == 0.0 {
                0.0
            } else {
                x * x.abs().ln() - x
            }
        }
        fn f2(x: f64) -> f64 {
            if x == 0.0 {
                0.0
            } else {
                0.5 * x * x * x.abs().ln() - 0.25 * x * x
            }
        }
        let mut acc = 0.0;
        for pair in self.grid.windows(2) {
            let (x0, p0) = pair[0];
            let (x1, p1) = pair[1];
            let b = (p1 - p0) / (x1 - x0);
            let a = p0 - b * x0;
            acc -= a * (f1(x1) - f1(x0)) + b * (f2(x1) - f2(x0));
        }
        acc
    }

    /// Largest density value at grid points with `|x| ≥ bound`.
    pub fn max_density_outside(&self, bound: f64) -> f64 {
        self.grid
            .iter()
            .filter(|(x, _)| x.abs() >= bound)
            .map(|&(_, p)| p)
            .fold(0.0, f64::max)
    }

    /// CSV with columns `x,p`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,p\n");
        for (x, p) in &self.grid {
            out.push_str(&format!("{},{}\n", x, p));
        }
        out
    }
}

fn trapezoid(grid: &[(f64, f64)], f: impl Fn(f64, f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for pair in grid.windows(2) {
        let (x0, p0) = pair[0];
        let (x1, p1) = pair[1];
        acc += 0.5 * (x1 - x0) * (f(x0, p0) + f(x1, p1));
    }
    acc
}

/// Logarithmic potential of the limit eigenvalue law recovered from the
/// solver: `-∫ log|x| p(x, z) dx` over the symmetric support grid.
pub fn log_potential(m: u32, z: Complex64, base_points: usize) -> Result<f64, StieltjesError> {
    let curve = density_curve(m, z, DEFAULT_CURVE_V_MIN, base_points)?;
    Ok(curve.neg_log_moment())
}

/// The transform along the imaginary axis, `-i·y(ix, z)` for `x > 0`:
/// equals `∫ x/(x² + s²) dν(s, z)`, real and in `[0, 1/(2|z|)]`. The
/// imaginary residue is checked against `1e-8` and discarded.
pub fn imaginary_axis_transform(m: u32, z: Complex64, x: f64) -> Result<f64, StieltjesError> {
    assert!(x > 0.0, "x must be positive");
    assert!(z.norm() > 0.0, "z must be nonzero");
    let st = solve_system(m, z, Complex64::new(0.0, x));
    ensure_converged(m, &st)?;
    let val = -Complex64::i() * st.y;
    if val.im.abs() > 1e-8 {
        return Err(StieltjesError::ResidueTooLarge { imag: val.im });
    }
    Ok(val.re.max(0.0))
}

/// Finite-difference residual of the derivative identity
/// `∂y/∂u = 2u · y/sqrt(1 + 4|z|² y²) · ∂y/∂x` for `z = u + iv`, evaluated
/// with central differences of step `h` at height `Im α = 1e-4`. The square
/// root is taken on the tracked branch via `1 + 2y(w - α)`.
pub fn pde_residual(m: u32, z: Complex64, x: f64, h: f64) -> Result<f64, StieltjesError> {
    assert!((1e-5..=1e-2).contains(&h), "h must lie in [1e-5, 1e-2]");
    let v_alpha = 1e-4;
    let u = z.re;
    let vz = z.im;
    let solve_uz = |uu: f64, xx: f64| -> Result<StieltjesState, StieltjesError> {
        let st = solve_system(m, Complex64::new(uu, vz), Complex64::new(xx, v_alpha));
        ensure_converged(m, &st)?;
        Ok(st)
    };
    let center = solve_uz(u, x)?;
    let xp = solve_uz(u, x + h)?;
    let xm = solve_uz(u, x - h)?;
    let up = solve_uz(u + h, x)?;
    let um = solve_uz(u - h, x)?;
    let ds_dx = (xp.y - xm.y) / (2.0 * h);
    let ds_du = (up.y - um.y) / (2.0 * h);
    let q = Complex64::new(1.0, 0.0) + center.y * (center.w - center.alpha) * 2.0;
    let rhs = center.y / q * ds_dx * (2.0 * u);
    Ok((ds_du - rhs).norm())
}
