//! Special functions needed by the closed-form kernels: the error-function
//! family (erf, erfc, and the scaled complement erfcx(z) = e^{z²} erfc z),
//! Bessel J of integer and half-integer order, the scaled modified Bessel
//! e^{−z} I_{n+1/2}(z), and certified enumeration of Bessel zeros.
//!
//! Everything here is restricted to the orders the wedge problem actually
//! produces — integers and half-integers — which keeps all evaluations on
//! elementary closed forms, power series, and three-term recurrences.
//! Scaled variants are the primitives; unscaled values only ever appear
//! multiplied by the Gaussian envelopes that tame them.

use crate::numerics::find_root;
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecFunError {
    #[error("erfcx overflows for z = {z}: e^(z^2) is not representable")]
    Overflow { z: f64 },
}

// ---------------------------------------------------------------------------
// Error-function family
// ---------------------------------------------------------------------------

const FRAC_2_SQRT_PI: f64 = 1.1283791670955126; // 2/√π
const ERF_SERIES_CUT: f64 = 2.0;
/// Largest |z| with e^{z²} representable in f64 (z² < 709.78).
const ERFCX_NEG_LIMIT: f64 = 26.64;

/// erf by its confluent (all-positive-term) Maclaurin series,
/// erf(x) = (2/√π) e^{−x²} Σ_k (2x²)^k x / (2k+1)!!. No cancellation.
fn erf_series(x: f64) -> f64 {
    debug_assert!(x.abs() <= ERF_SERIES_CUT + 1e-9);
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= 2.0 * x2 / (2 * k + 1) as f64;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() || k > 200 {
            break;
        }
    }
    FRAC_2_SQRT_PI * (-x2).exp() * sum
}

/// erfcx by its Stieltjes continued fraction (modified Lentz), valid and
/// fast for z ≥ 2: erfcx(z)·√π = 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + …)))).
fn erfcx_cf(z: f64) -> f64 {
    debug_assert!(z >= ERF_SERIES_CUT - 1e-9);
    let tiny = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for n in 1..250 {
        let a = n as f64 / 2.0;
        d = z + a * d;
        if d == 0.0 {
            d = tiny;
        }
        c = z + a / c;
        if c == 0.0 {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / (PI.sqrt() * f)
}

/// Scaled complementary error function restricted to z ≥ 0, where it is
/// total. Internal building block for the kernels.
pub(crate) fn erfcx_nonneg(z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    if z < ERF_SERIES_CUT {
        (z * z).exp() * (1.0 - erf_series(z))
    } else {
        erfcx_cf(z)
    }
}

/// The paper's Θ(z) = e^{z²} erfc(z).
///
/// Total for z ≥ −26.64; for more negative z the reflected term 2e^{z²}
/// overflows and an error is returned. Monotone decreasing, Θ(0) = 1,
/// Θ(z) → 1/(√π z) as z → +∞.
pub fn erfcx(z: f64) -> Result<f64, SpecFunError> {
    if z >= 0.0 {
        Ok(erfcx_nonneg(z))
    } else if z >= -ERFCX_NEG_LIMIT {
        Ok(2.0 * (z * z).exp() - erfcx_nonneg(-z))
    } else {
        Err(SpecFunError::Overflow { z })
    }
}

pub fn erf(x: f64) -> f64 {
    let a = x.abs();
    let v = if a <= ERF_SERIES_CUT {
        erf_series(a)
    } else {
        1.0 - (-a * a).exp() * erfcx_cf(a)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc(-x)
    } else if x <= ERF_SERIES_CUT {
        1.0 - erf_series(x)
    } else {
        // e^{−x²}·erfcx(x); underflows to 0 beyond x ≈ 26.6, as erfc does.
        (-x * x).exp() * erfcx_cf(x)
    }
}

// ---------------------------------------------------------------------------
// Gamma at half-integer lattice points
// ---------------------------------------------------------------------------

/// ln Γ(twice/2) for twice ≥ 1, by direct recursion from Γ(1) and Γ(1/2).
pub(crate) fn ln_gamma_half_int(twice: u32) -> f64 {
    assert!(twice >= 1);
    if twice % 2 == 0 {
        // Γ(n) = (n−1)!
        let n = twice / 2;
        (1..n).map(|k| (k as f64).ln()).sum()
    } else {
        // Γ(n + 1/2) = √π · Π_{k=1..n} (k − 1/2)
        let n = (twice - 1) / 2;
        0.5 * PI.ln() + (1..=n).map(|k| (k as f64 - 0.5).ln()).sum::<f64>()
    }
}

// ---------------------------------------------------------------------------
// Bessel order lattice
// ---------------------------------------------------------------------------

/// A nonnegative Bessel order on the half-integer lattice: ν = `twice`/2.
///
/// The wedge spectrum only ever produces such orders; negative half-integer
/// orders are excluded because they violate the integrability condition at
/// the vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BesselOrder {
    twice: u32,
}

impl BesselOrder {
    pub fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    pub fn integer(n: u32) -> Self {
        Self { twice: 2 * n }
    }

    /// ν = n + 1/2.
    pub fn half_integer(n: u32) -> Self {
        Self { twice: 2 * n + 1 }
    }

    pub fn as_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn is_half_integer(self) -> bool {
        self.twice % 2 == 1
    }
}

impl std::fmt::Display for BesselOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_half_integer() {
            write!(f, "{}/2", self.twice)
        } else {
            write!(f, "{}", self.twice / 2)
        }
    }
}

// ---------------------------------------------------------------------------
// Bessel J
// ---------------------------------------------------------------------------

/// Ascending power series Σ_k (−1)^k (x/2)^{ν+2k} / (k! Γ(ν+k+1));
/// safe while x² ≲ 4(ν+1), where no leading-order cancellation occurs.
fn bessel_j_series(nu: f64, twice_nu: u32, x: f64) -> f64 {
    let mut term = (nu * (0.5 * x).ln() - ln_gamma_half_int(twice_nu + 2)).exp();
    let mut sum = term;
    let q = 0.25 * x * x;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= -q / (k as f64 * (nu + k as f64));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) || k > 400 {
            break;
        }
    }
    sum
}

const J01_ASYMPTOTIC_CUT: f64 = 12.0;

/// J₀ or J₁ for x > 12 from the Stokes expansion
/// J_n(x) = √(2/πx) [P cos χ − Q sin χ], χ = x − (2n+1)π/4,
/// truncated at the smallest term (≈ 4e−12 worst near x = 12, improving
/// rapidly with x).
fn bessel_j01_asymptotic(n: u32, x: f64) -> f64 {
    debug_assert!(n <= 1 && x >= J01_ASYMPTOTIC_CUT - 1e-9);
    let mu = 4.0 * (n * n) as f64;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut k = 0u32;
    while k < 40 {
        let mag = term.abs();
        if k % 2 == 0 {
            p += term * if k % 4 == 0 { 1.0 } else { -1.0 };
        } else {
            q += term * if k % 4 == 1 { 1.0 } else { -1.0 };
        }
        term *= (mu - ((2 * k + 1) * (2 * k + 1)) as f64) / ((k + 1) as f64 * 8.0 * x);
        k += 1;
        if term.abs() < 1e-18 || (term.abs() > mag && k > 4) {
            break;
        }
    }
    let chi = x - (2 * n + 1) as f64 * PI / 4.0;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn bessel_j0(x: f64) -> f64 {
    if x <= J01_ASYMPTOTIC_CUT {
        bessel_j_series(0.0, 0, x)
    } else {
        bessel_j01_asymptotic(0, x)
    }
}

fn bessel_j1(x: f64) -> f64 {
    if x <= J01_ASYMPTOTIC_CUT {
        bessel_j_series(1.0, 2, x)
    } else {
        bessel_j01_asymptotic(1, x)
    }
}

/// Seed pair (J_base, J_{base+1}) for the upward recurrence.
fn bessel_base_pair(half: bool, x: f64) -> (f64, f64) {
    if half {
        let amp = (2.0 / (PI * x)).sqrt();
        (amp * x.sin(), amp * (x.sin() / x - x.cos()))
    } else {
        (bessel_j0(x), bessel_j1(x))
    }
}

/// Upward recurrence J_{ν+1} = (2ν/x) J_ν − J_{ν−1}; stable in the
/// oscillatory regime x ≥ ν.
fn bessel_j_forward(nu: BesselOrder, x: f64) -> f64 {
    let half = nu.is_half_integer();
    let steps = (nu.twice / 2) as usize; // number of orders above the base
    let (mut prev, mut cur) = bessel_base_pair(half, x);
    if steps == 0 {
        return prev;
    }
    let mut order = if half { 1.5 } else { 1.0 };
    for _ in 0..steps - 1 {
        let next = (2.0 * order / x) * cur - prev;
        prev = cur;
        cur = next;
        order += 1.0;
    }
    cur
}

/// Downward (Miller) recurrence for x < ν, normalised against the base pair.
fn bessel_j_miller(nu: BesselOrder, x: f64) -> f64 {
    let half = nu.is_half_integer();
    let n = (nu.twice / 2) as usize;
    let start = n + (2.0 * (40.0 * (n.max(1)) as f64).sqrt()).ceil() as usize + 20;
    let base = if half { 0.5 } else { 0.0 };
    let mut above = 0.0f64;
    let mut cur = 1e-305f64;
    let mut target = f64::NAN;
    let mut order = base + start as f64;
    for m in (1..=start).rev() {
        let below = (2.0 * order / x) * cur - above;
        above = cur;
        cur = below;
        order -= 1.0;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            above *= 1e-250;
            if m - 1 <= n {
                target *= 1e-250;
            }
        }
        if m - 1 == n {
            target = cur;
        }
    }
    // cur = unnormalised J_base, above = unnormalised J_{base+1}
    let (r0, r1) = bessel_base_pair(half, x);
    let scale = if r0.abs() * above.abs() >= r1.abs() * cur.abs() {
        r0 / cur
    } else {
        r1 / above
    };
    target * scale
}

/// Bessel function of the first kind for integer and half-integer order.
///
/// Dispatch: ascending series while x² ≤ 4(ν+1); upward recurrence from the
/// J₀/J₁ (or sin/cos closed form) seeds for x ≥ ν; Miller downward
/// recurrence in the remaining band below the turning point.
pub fn bessel_j(nu: BesselOrder, x: f64) -> f64 {
    assert!(x > 0.0, "bessel_j requires x > 0");
    let v = nu.as_f64();
    if x * x <= 4.0 * (v + 1.0) {
        bessel_j_series(v, nu.twice, x)
    } else if x >= v {
        bessel_j_forward(nu, x)
    } else {
        bessel_j_miller(nu, x)
    }
}

// ---------------------------------------------------------------------------
// Scaled modified Bessel e^{−z} I_{n+1/2}(z)
// ---------------------------------------------------------------------------

/// Scaled series e^{−z} Σ_k (z/2)^{ν+2k}/(k! Γ(ν+k+1)) for small z.
fn bessel_i_half_scaled_series(n: u32, z: f64) -> f64 {
    let nu = n as f64 + 0.5;
    let mut term = (nu * (0.5 * z).ln() - ln_gamma_half_int(2 * n + 3) - z).exp();
    let mut sum = term;
    let q = 0.25 * z * z;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= q / (k as f64 * (nu + k as f64));
        sum += term;
        if term <= 1e-17 * sum || k > 300 {
            break;
        }
    }
    sum
}

/// Scaled closed forms for the two lowest half-integer orders:
/// e^{−z} I_{1/2} = √(2/πz)·(1 − e^{−2z})/2 and its ν = 3/2 companion.
fn bessel_i_half_scaled_base(z: f64) -> (f64, f64) {
    let amp = (2.0 / (PI * z)).sqrt();
    let em = (-2.0 * z).exp_m1(); // e^{−2z} − 1, exact near 0
    let sinh_scaled = -0.5 * em; // e^{−z} sinh z
    let cosh_scaled = 0.5 * (2.0 + em); // e^{−z} cosh z
    (amp * sinh_scaled, amp * (cosh_scaled - sinh_scaled / z))
}

/// e^{−z} I_{n+1/2}(z) for z > 0.
///
/// Small z goes through the scaled series; otherwise the closed sinh/cosh
/// seeds feed the three-term recurrence, upward while n ≤ z and by a
/// normalised downward (Miller) sweep when the order exceeds the argument,
/// where the upward direction is unstable.
pub fn bessel_i_half_scaled(n: u32, z: f64) -> f64 {
    assert!(z > 0.0, "bessel_i_half_scaled requires z > 0");
    if z < 2.0 {
        return bessel_i_half_scaled_series(n, z);
    }
    let (i0, i1) = bessel_i_half_scaled_base(z);
    if n == 0 {
        return i0;
    }
    if n == 1 {
        return i1;
    }
    if (n as f64) <= z {
        // I_{ν+1} = I_{ν−1} − (2ν/z) I_ν with ν = m + 1/2
        let mut prev = i0;
        let mut cur = i1;
        for m in 1..n {
            let next = prev - ((2 * m + 1) as f64 / z) * cur;
            prev = cur;
            cur = next;
        }
        cur
    } else {
        // Miller downward; all terms positive, unconditionally stable.
        let start = n as usize + (2.0 * (40.0 * n as f64).sqrt()).ceil() as usize + 20;
        let mut above = 0.0f64;
        let mut cur = 1e-305f64;
        let mut target = f64::NAN;
        for m in (1..=start).rev() {
            let below = above + ((2 * m + 1) as f64 / z) * cur;
            above = cur;
            cur = below;
            if cur > 1e250 {
                cur *= 1e-250;
                above *= 1e-250;
                target *= 1e-250;
            }
            if m - 1 == n as usize {
                target = cur;
            }
        }
        target * (i0 / cur)
    }
}

/// Rigorous upper bound on e^{−z} I_{n+1/2}(z) from
/// I_ν(z) ≤ (z/2)^ν e^{z²/(4(ν+1))} / Γ(ν+1); used for series-tail control.
pub(crate) fn bessel_i_half_scaled_bound(n: u32, z: f64) -> f64 {
    let nu = n as f64 + 0.5;
    (nu * (0.5 * z).ln() + z * z / (4.0 * (nu + 1.0)) - z - ln_gamma_half_int(2 * n + 3)).exp()
}

// ---------------------------------------------------------------------------
// Bessel zero enumeration
// ---------------------------------------------------------------------------

const ZERO_REFINE_TOL: f64 = 1e-12;

/// Zeros of the base order in (0, x_max], from analytic brackets:
/// (k−1/2)π < j_{0,k} < kπ (monotonicity of j_{ν,k} in ν between ∓1/2),
/// and (k−1/2)π < j_{1/2,k} = kπ < (k+1/2)π.
fn base_zeros(half: bool, x_max: f64) -> Vec<f64> {
    let order = if half { BesselOrder::half_integer(0) } else { BesselOrder::integer(0) };
    let mut brackets = Vec::new();
    let mut k = 1u64;
    loop {
        let (lo, hi) = if half {
            ((k as f64 - 0.5) * PI, (k as f64 + 0.5) * PI)
        } else {
            ((k as f64 - 0.5) * PI, k as f64 * PI)
        };
        if lo >= x_max {
            break;
        }
        brackets.push((lo, hi.min(x_max)));
        k += 1;
    }
    refine_brackets(order, &brackets)
}

/// Refine each bracket that actually straddles a sign change; panics if an
/// interior interlacing bracket unexpectedly fails, since that would mean a
/// lost eigenvalue.
fn refine_brackets(order: BesselOrder, brackets: &[(f64, f64)]) -> Vec<f64> {
    brackets
        .par_iter()
        .filter_map(|&(lo, hi)| {
            if hi <= lo {
                return None;
            }
            let f = |x: f64| bessel_j(order, x);
            if f(lo).signum() == f(hi).signum() {
                return None; // only legal for the trailing partial bracket
            }
            Some(find_root(f, lo, hi, ZERO_REFINE_TOL).expect("bracket has a sign change"))
        })
        .collect()
}

/// One interlacing step: zeros of J_{ν+1} in (0, x_max] from the zeros of
/// J_ν. Interior brackets (j_{ν,k}, j_{ν,k+1}) each hold exactly one zero;
/// the trailing partial bracket (j_{ν,last}, x_max] holds at most one.
fn climb_level(next: BesselOrder, prev_zeros: &[f64], x_max: f64) -> Vec<f64> {
    if prev_zeros.is_empty() {
        return Vec::new();
    }
    let mut brackets: Vec<(f64, f64)> = prev_zeros.windows(2).map(|w| (w[0], w[1])).collect();
    brackets.push((*prev_zeros.last().unwrap(), x_max));
    refine_brackets(next, &brackets)
}

/// All zero lists for orders base, base+1, …, base+levels, each complete in
/// (0, x_max]. Completeness is inherited level by level from the interlacing
/// construction.
pub(crate) fn bessel_zero_ladder(half: bool, levels: usize, x_max: f64) -> Vec<Vec<f64>> {
    let mut ladder = Vec::with_capacity(levels + 1);
    ladder.push(base_zeros(half, x_max));
    for level in 0..levels {
        let next = if half {
            BesselOrder::half_integer(level as u32 + 1)
        } else {
            BesselOrder::integer(level as u32 + 1)
        };
        let zeros = climb_level(next, &ladder[level], x_max);
        ladder.push(zeros);
    }
    ladder
}

/// All zeros of J_ν in (0, x_max], each to ≲1e−10 absolute, with
/// completeness certified by the interlacing ladder from the order-0 (or
/// order-1/2) analytic brackets.
pub fn bessel_j_zeros(nu: BesselOrder, x_max: f64) -> Vec<f64> {
    assert!(x_max > 0.0);
    let levels = (nu.twice / 2) as usize;
    let ladder = bessel_zero_ladder(nu.is_half_integer(), levels, x_max);
    ladder.into_iter().last().unwrap()
}
