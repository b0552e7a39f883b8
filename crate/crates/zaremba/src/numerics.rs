//! Shared numerical primitives: adaptive Gauss–Legendre quadrature (finite
//! and semi-infinite), bracketed root finding, and weighted least-squares
//! fitting of power-law expansions `y ≈ Σ c_k t^{e_k}`.
//!
//! All routines are pure and deterministic: identical inputs give bitwise
//! identical results regardless of thread context.

use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("quadrature did not converge: best estimate {estimate:e}, error bound {error_bound:e}")]
    NonConvergence { estimate: f64, error_bound: f64 },
    #[error("invalid bracket: f({lo}) and f({hi}) have the same sign")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("normal system condition estimate {condition:.3e} exceeds cap {cap:.3e}")]
    IllConditioned {
        condition: f64,
        cap: f64,
        /// The completed fit, still usable but flagged.
        fit: AsymptoticFit,
    },
}

/// Tolerances and refinement budget for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32) -> Self {
        assert!(abs_tol > 0.0 && rel_tol > 0.0, "tolerances must be positive");
        assert!(max_depth >= 1, "depth must be at least 1");
        Self { abs_tol, rel_tol, max_depth }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-11, max_depth: 48 }
    }
}

/// Result of a power-law fit `y ≈ Σ c_k t^{e_k}`.
///
/// Exponents are sorted ascending; `coefficients` and `stderr` follow the
/// same order. `condition` is a 1-norm estimate of the condition number of
/// the normal system (always ≥ 1).
#[derive(Debug, Clone)]
pub struct AsymptoticFit {
    pub exponents: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub stderr: Vec<f64>,
    pub max_rel_residual: f64,
    pub condition: f64,
}

impl AsymptoticFit {
    /// Coefficient belonging to the given exponent, if it was fitted.
    pub fn coefficient_for(&self, exponent: f64) -> Option<f64> {
        self.exponents
            .iter()
            .position(|&e| e == exponent)
            .map(|i| self.coefficients[i])
    }

    pub fn stderr_for(&self, exponent: f64) -> Option<f64> {
        self.exponents
            .iter()
            .position(|&e| e == exponent)
            .map(|i| self.stderr[i])
    }
}

// ---------------------------------------------------------------------------
// Gauss–Legendre rules
// ---------------------------------------------------------------------------

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1],
/// computed by Newton iteration on P_n (machine-precision, deterministic).
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Recurrence (k+1) P_{k+1} = (2k+1) x P_k − k P_{k−1}.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 1..n {
                let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                // one polishing step after convergence
                let mut q0 = 1.0;
                let mut q1 = x;
                for k in 1..n {
                    let q2 = ((2 * k + 1) as f64 * x * q1 - k as f64 * q0) / (k + 1) as f64;
                    q0 = q1;
                    q1 = q2;
                }
                dp = n as f64 * (x * q1 - q0) / (x * x - 1.0);
                x -= q1 / dp;
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule_7() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(7))
}

fn rule_15() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(15))
}

fn panel<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let (n7, w7) = rule_7();
    let (n15, w15) = rule_15();
    let mut i7 = 0.0;
    for (x, w) in n7.iter().zip(w7) {
        i7 += w * f(c + h * x);
    }
    let mut i15 = 0.0;
    for (x, w) in n15.iter().zip(w15) {
        i15 += w * f(c + h * x);
    }
    (h * i15, (h * (i15 - i7)).abs())
}

/// Adaptive quadrature of `f` over `[a, b]`; pass `b = f64::INFINITY` for a
/// semi-infinite range.
///
/// The semi-infinite case is mapped onto [0, 1) by the fixed substitution
/// `x = a + u/(1−u)` (so the caller must guarantee eventual exponential
/// decay). Interior panels are refined by bisection with a 7/15-point
/// Gauss–Legendre error estimate until the accumulated bound drops below
/// `max(abs_tol, rel_tol·|I|)`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64, NumericsError> {
    if b.is_infinite() {
        assert!(b > 0.0, "lower bound must be finite");
        let g = |u: f64| {
            let om = 1.0 - u;
            f(a + u / om) / (om * om)
        };
        return integrate_finite(&g, 0.0, 1.0, spec);
    }
    integrate_finite(&f, a, b, spec)
}

fn integrate_finite<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64, NumericsError> {
    if a == b {
        return Ok(0.0);
    }
    let (first, _) = panel(f, a, b);
    let tol = spec.abs_tol.max(spec.rel_tol * first.abs());
    let mut total = 0.0;
    let mut err_total = 0.0;
    let mut converged = true;
    // explicit stack: (lo, hi, local tolerance, depth)
    let mut stack = vec![(a, b, tol, 0u32)];
    while let Some((lo, hi, tol, depth)) = stack.pop() {
        let (val, err) = panel(f, lo, hi);
        if err <= tol || depth >= spec.max_depth {
            if err > tol {
                converged = false;
            }
            total += val;
            err_total += err;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, 0.5 * tol, depth + 1));
            stack.push((lo, mid, 0.5 * tol, depth + 1));
        }
    }
    let allowed = spec.abs_tol.max(spec.rel_tol * total.abs());
    if !converged && err_total > allowed {
        return Err(NumericsError::NonConvergence { estimate: total, error_bound: err_total });
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

/// Bracketed root finding by false position with a bisection fallback.
///
/// The fixed rule: try the secant point of the current bracket; whenever the
/// interpolation step leaves the bracket, or the same endpoint survived two
/// consecutive steps, take the midpoint instead. Converges for any continuous
/// `f` with `f(lo)·f(hi) < 0`; the result is invariant under swapping the
/// bracket ends.
pub fn find_root<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, NumericsError> {
    assert!(tol > 0.0, "tolerance must be positive");
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::InvalidBracket { lo, hi });
    }
    let mut stale_side = 0i32; // +1: kept b twice, -1: kept a twice
    while b - a > tol {
        let secant = b - fb * (b - a) / (fb - fa);
        let width = b - a;
        let x = if stale_side.abs() >= 2
            || !(secant > a + 0.01 * width && secant < b - 0.01 * width)
        {
            stale_side = 0;
            0.5 * (a + b)
        } else {
            secant
        };
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            stale_side = if stale_side > 0 { stale_side + 1 } else { 1 };
        } else {
            b = x;
            fb = fx;
            stale_side = if stale_side < 0 { stale_side - 1 } else { -1 };
        }
    }
    Ok(0.5 * (a + b))
}

// ---------------------------------------------------------------------------
// Power-law fitting
// ---------------------------------------------------------------------------

pub const CONDITION_CAP_DEFAULT: f64 = 1e12;

/// Weighted least squares for `y ≈ Σ c_k t^{e_k}` with the default
/// condition-number cap.
///
/// `samples` are `(t, y, weight)` triples with `t > 0` and `weight > 0`;
/// at least `exponents.len() + 2` samples are required. Standard errors come
/// from the residual covariance σ²·(AᵀWA)⁻¹.
pub fn fit_powers(
    samples: &[(f64, f64, f64)],
    exponents: &[f64],
) -> Result<AsymptoticFit, NumericsError> {
    fit_powers_with_cap(samples, exponents, CONDITION_CAP_DEFAULT)
}

pub fn fit_powers_with_cap(
    samples: &[(f64, f64, f64)],
    exponents: &[f64],
    condition_cap: f64,
) -> Result<AsymptoticFit, NumericsError> {
    let k = exponents.len();
    let n = samples.len();
    assert!(k >= 1, "need at least one exponent");
    assert!(n >= k + 2, "need at least {} samples, got {}", k + 2, n);
    assert!(
        samples.iter().all(|&(t, _, w)| t > 0.0 && w > 0.0),
        "samples require t > 0 and weight > 0"
    );
    let mut exps: Vec<f64> = exponents.to_vec();
    exps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    exps.dedup();
    assert!(exps.len() == k, "exponents must be distinct");

    // design matrix rows a_i = (t_i^{e_0}, ..., t_i^{e_{k-1}})
    let design: Vec<Vec<f64>> = samples
        .iter()
        .map(|&(t, _, _)| exps.iter().map(|&e| t.powf(e)).collect())
        .collect();

    // normal system N = AᵀWA, rhs = AᵀWy
    let mut normal = vec![vec![0.0; k]; k];
    let mut rhs = vec![0.0; k];
    for (row, &(_, y, w)) in design.iter().zip(samples) {
        for i in 0..k {
            rhs[i] += w * row[i] * y;
            for j in i..k {
                normal[i][j] += w * row[i] * row[j];
            }
        }
    }
    for i in 0..k {
        for j in 0..i {
            normal[i][j] = normal[j][i];
        }
    }

    let inv = invert_spd(&normal);
    let (inv, condition) = match inv {
        Some(inv) => {
            let cond = norm1(&normal) * norm1(&inv);
            (inv, cond)
        }
        None => {
            // Degenerate normal system: regularise minimally so a flagged
            // result can still be reported.
            let ridge = 1e-13 * normal.iter().enumerate().map(|(i, r)| r[i]).sum::<f64>();
            let mut reg = normal.clone();
            for (i, row) in reg.iter_mut().enumerate() {
                row[i] += ridge.max(f64::MIN_POSITIVE);
            }
            let inv = invert_spd(&reg).expect("ridge-regularised system is SPD");
            (inv, f64::INFINITY)
        }
    };

    let coefficients: Vec<f64> = (0..k)
        .map(|i| (0..k).map(|j| inv[i][j] * rhs[j]).sum())
        .collect();

    // weighted residual variance and per-coefficient standard errors
    let mut wssr = 0.0;
    let mut max_rel_residual: f64 = 0.0;
    for (row, &(_, y, w)) in design.iter().zip(samples) {
        let fitted: f64 = row.iter().zip(&coefficients).map(|(a, c)| a * c).sum();
        let r = y - fitted;
        wssr += w * r * r;
        max_rel_residual = max_rel_residual.max(r.abs() / y.abs().max(1e-300));
    }
    let sigma2 = if n > k { wssr / (n - k) as f64 } else { 0.0 };
    let stderr: Vec<f64> = (0..k).map(|i| (sigma2 * inv[i][i].max(0.0)).sqrt()).collect();

    let fit = AsymptoticFit {
        exponents: exps,
        coefficients,
        stderr,
        max_rel_residual,
        condition,
    };
    if condition > condition_cap {
        return Err(NumericsError::IllConditioned { condition, cap: condition_cap, fit });
    }
    Ok(fit)
}

fn norm1(m: &[Vec<f64>]) -> f64 {
    let k = m.len();
    (0..k)
        .map(|j| (0..k).map(|i| m[i][j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Inverse of a symmetric positive-definite matrix via Cholesky;
/// `None` if the factorisation breaks down.
fn invert_spd(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let k = m.len();
    let mut l = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let mut s = m[i][j];
            for p in 0..j {
                s -= l[i][p] * l[j][p];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    // columns of the inverse by forward/back substitution
    let mut inv = vec![vec![0.0; k]; k];
    for col in 0..k {
        let mut y = vec![0.0; k];
        for i in 0..k {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for p in 0..i {
                s -= l[i][p] * y[p];
            }
            y[i] = s / l[i][i];
        }
        for i in (0..k).rev() {
            let mut s = y[i];
            for p in (i + 1)..k {
                s -= l[p][i] * inv[p][col];
            }
            inv[i][col] = s / l[i][i];
        }
    }
    Some(inv)
}

/// Neumaier-compensated sum in the iteration order given; deterministic for
/// a fixed input sequence.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPEC: QuadratureSpec = QuadratureSpec { abs_tol: 1e-13, rel_tol: 1e-12, max_depth: 48 };

    #[test]
    fn exponential_integral_semi_infinite() {
        let v = integrate_adaptive(|x| (-x).exp(), 0.0, f64::INFINITY, &SPEC).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_is_exact() {
        let v = integrate_adaptive(|x| x * x, 0.0, 1.0, &SPEC).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn high_degree_polynomial_exact_on_base_rule() {
        // GL15 integrates degree ≤ 29 exactly.
        let v = integrate_adaptive(|x| x.powi(29), 0.0, 1.0, &SPEC).unwrap();
        assert!((v - 1.0 / 30.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_integral() {
        let v = integrate_adaptive(|x| (-x * x).exp(), 0.0, f64::INFINITY, &SPEC).unwrap();
        assert!((v - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn nonconvergence_reports_best_estimate() {
        let tight = QuadratureSpec { abs_tol: 1e-300, rel_tol: 1e-300, max_depth: 2 };
        let err = integrate_adaptive(|x| (x - 0.3141).abs().sqrt().recip().min(1e6), 0.0, 1.0, &tight);
        match err {
            Err(NumericsError::NonConvergence { estimate, error_bound }) => {
                assert!(estimate.is_finite() && error_bound > 0.0);
            }
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn root_of_sine() {
        let r = find_root(|x: f64| x.sin(), 3.0, 3.5, 1e-12).unwrap();
        assert!((r - std::f64::consts::PI).abs() < 1e-11);
    }

    #[test]
    fn root_of_quadratic() {
        let r = find_root(|x| x * x - 2.0, 1.0, 2.0, 1e-13).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn root_spherical_j1() {
        // first positive root of tan x = x, i.e. of j_1(x) beyond the origin
        let j1 = |x: f64| x.sin() / (x * x) - x.cos() / x;
        let r = find_root(j1, 4.0, 5.0, 1e-13).unwrap();
        assert!((r.tan() - r).abs() < 1e-9, "tan x - x = {:e}", r.tan() - r);
        assert!((r - 4.493409457909064).abs() < 1e-11);
    }

    #[test]
    fn root_invariant_under_swap() {
        let f = |x: f64| x.cos();
        let a = find_root(f, 1.0, 2.0, 1e-12).unwrap();
        let b = find_root(f, 2.0, 1.0, 1e-12).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_bracket_is_rejected() {
        assert!(matches!(
            find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(NumericsError::InvalidBracket { .. })
        ));
    }

    #[test]
    fn fit_recovers_exact_two_term_model() {
        let ts: Vec<f64> = (1..=12).map(|i| 0.05 * i as f64).collect();
        let samples: Vec<(f64, f64, f64)> = ts.iter().map(|&t| (t, 2.0 / t + 3.0, 1.0)).collect();
        let fit = fit_powers(&samples, &[-1.0, 0.0]).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-10);
        assert!((fit.coefficients[1] - 3.0).abs() < 1e-10);
        assert!(fit.max_rel_residual < 1e-12);
        assert!(fit.condition >= 1.0);
    }

    #[test]
    fn fit_recovers_vanishing_middle_coefficient() {
        let ts: Vec<f64> = (1..=16).map(|i| 0.1 * i as f64).collect();
        let samples: Vec<(f64, f64, f64)> = ts.iter().map(|&t| (t, 1.0 / t + t, 1.0)).collect();
        let fit = fit_powers(&samples, &[-1.0, 0.0, 1.0]).unwrap();
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-10);
        assert!(fit.coefficients[1].abs() < 1e-10);
        assert!((fit.coefficients[2] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fit_sorts_exponents() {
        let ts: Vec<f64> = (1..=10).map(|i| 0.2 * i as f64).collect();
        let samples: Vec<(f64, f64, f64)> = ts.iter().map(|&t| (t, 5.0 + 0.5 / t, 2.0)).collect();
        let fit = fit_powers(&samples, &[0.0, -1.0]).unwrap();
        assert_eq!(fit.exponents, vec![-1.0, 0.0]);
        assert!((fit.coefficient_for(-1.0).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn ill_conditioned_fit_is_flagged_but_returned() {
        // nearly collinear columns
        let ts: Vec<f64> = (1..=14).map(|i| 1.0 + 1e-9 * i as f64).collect();
        let samples: Vec<(f64, f64, f64)> = ts.iter().map(|&t| (t, t.powf(0.5), 1.0)).collect();
        match fit_powers_with_cap(&samples, &[0.0, 0.5, 1.0], 1e3) {
            Err(NumericsError::IllConditioned { condition, fit, .. }) => {
                assert!(condition > 1e3);
                assert_eq!(fit.coefficients.len(), 3);
            }
            other => panic!("expected IllConditioned, got {other:?}"),
        }
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let vals = vec![1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(vals), 2.0);
    }
}
