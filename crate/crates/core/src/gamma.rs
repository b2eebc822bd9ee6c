//! Log-Gamma and the Laguerre normalisation constants.
//!
//! With `β_{m+1}² = Γ(m+α+1)/Γ(m+1)` the squared norm of `L_m^{(α)}`, the
//! Markov matrix only ever needs ratios `β_i/β_k`, and those telescope into
//! products of the one-step ratio `β_ν²/β_{ν+1}² = ν/(ν+α)`. Everything here
//! stays in log scale or in product form so that nothing overflows for
//! large `n` or `α`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Laguerre exponent `α` of the weight `t^α e^{−t}`; always `> −1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > -1.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::AlphaOutOfRange(value))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Alpha::new(value)
    }
}

impl std::fmt::Display for Alpha {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

// Lanczos coefficients (g = 10.900511, n = 11), from Pugh's thesis.
const LANCZOS_R: f64 = 10.900511;
const LANCZOS_DK: [f64; 11] = [
    2.485_740_891_387_535_5e-5,
    1.051_423_785_817_219_7,
    -3.456_870_972_220_162_5,
    4.512_277_094_668_948,
    -2.982_852_253_235_766_4,
    1.056_397_115_771_267,
    -1.954_287_731_916_458_7e-1,
    1.709_705_434_044_412e-2,
    -5.719_261_174_043_057e-4,
    4.633_994_733_599_057e-6,
    -2.719_949_084_886_077_2e-9,
];
const LN_2_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_2;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// Stirling series coefficients B_{2k}/(2k(2k−1)).
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// `ln Γ(x)` for `x > 0`.
///
/// Reflection below 1/2, Lanczos on `[1/2, 10)`, Stirling series above.
pub fn ln_gamma(x: f64) -> f64 {
    if x.is_nan() || x <= 0.0 {
        return f64::NAN;
    }
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    if x < 10.0 {
        let s = LANCZOS_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_DK[0], |s, (k, d)| s + d / (x + k as f64 - 1.0));
        return s.ln() + LN_2_SQRT_E_OVER_PI + (x - 0.5) * ((x - 0.5 + LANCZOS_R) / std::f64::consts::E).ln();
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    for c in STIRLING.iter().rev() {
        series = series * inv2 + c;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + series * inv
}

/// `Γ(x)` for `x > 0`, through [`ln_gamma`].
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// `e^x − e^y` without losing the sign when the two are close.
#[inline]
pub(crate) fn exp_diff(x: f64, y: f64) -> f64 {
    y.exp() * (x - y).exp_m1()
}

/// `ln β_m² = ln Γ(m+α) − ln Γ(m)`.
pub fn log_beta_sq(m: usize, alpha: Alpha) -> Result<f64> {
    if m < 1 {
        return Err(Error::InvalidArgument(format!("log_beta_sq needs m >= 1, got {m}")));
    }
    let m = m as f64;
    Ok(ln_gamma(m + alpha.get()) - ln_gamma(m))
}

/// `ln(β_i²/β_k²) = −Σ_{ν=i}^{k−1} ln(1 + α/ν)` for `i ≤ k`.
pub fn log_ratio_sq(i: usize, k: usize, alpha: Alpha) -> Result<f64> {
    check_pair(i, k, true)?;
    let a = alpha.get();
    Ok(-(i..k).map(|nu| (a / nu as f64).ln_1p()).sum::<f64>())
}

/// `β_i/β_k` as the product of one-step ratios `sqrt(ν/(ν+α))`.
pub fn beta_ratio(i: usize, k: usize, alpha: Alpha) -> Result<f64> {
    check_pair(i, k, true)?;
    let a = alpha.get();
    Ok((i..k).map(|nu| step_ratio(nu, a)).product())
}

/// One-step ratio `β_ν/β_{ν+1} = sqrt(ν/(ν+α))`.
#[inline]
pub(crate) fn step_ratio(nu: usize, alpha: f64) -> f64 {
    let nu = nu as f64;
    (nu / (nu + alpha)).sqrt()
}

fn check_pair(i: usize, k: usize, allow_equal: bool) -> Result<()> {
    if i < 1 {
        return Err(Error::InvalidArgument(format!("index must be >= 1, got {i}")));
    }
    if i > k || (!allow_equal && i == k) {
        let rel = if allow_equal { "<=" } else { "<" };
        return Err(Error::InvalidArgument(format!("need i {rel} k, got i={i}, k={k}")));
    }
    Ok(())
}

/// `ln β_m²` for `m = 1..=size`, built by accumulating one-step ratios from
/// `β_1² = Γ(α+1)`.
#[derive(Debug, Clone)]
pub struct BetaTable {
    alpha: Alpha,
    log_beta_sq: Vec<f64>,
}

impl BetaTable {
    pub fn new(size: usize, alpha: Alpha) -> Result<Self> {
        if size < 1 {
            return Err(Error::InvalidArgument("BetaTable size must be >= 1".into()));
        }
        let a = alpha.get();
        let mut log_beta_sq = Vec::with_capacity(size);
        let mut acc = ln_gamma(1.0 + a);
        log_beta_sq.push(acc);
        for m in 1..size {
            acc += (a / m as f64).ln_1p();
            log_beta_sq.push(acc);
        }
        Ok(BetaTable { alpha, log_beta_sq })
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn size(&self) -> usize {
        self.log_beta_sq.len()
    }

    /// `ln β_m²`, 1-based.
    pub fn log_beta_sq(&self, m: usize) -> f64 {
        self.log_beta_sq[m - 1]
    }

    pub fn beta(&self, m: usize) -> f64 {
        (0.5 * self.log_beta_sq(m)).exp()
    }
}

/// Signed margin `RHS − LHS` of the Gamma-ratio inequality
/// `(Γ(i+α)/Γ(i)) / (Γ(k+α)/Γ(k)) ≤ ((i+(α−1)/2)/(k+(α−1)/2))^α`,
/// valid for `α ≥ 1`, `i < k`. Non-negative means the inequality holds.
pub fn lemma31_margin(i: usize, k: usize, alpha: Alpha) -> Result<f64> {
    check_pair(i, k, false)?;
    if alpha.get() < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "lemma31_margin requires alpha >= 1, got {alpha}; use prop32_margin"
        )));
    }
    let ln_lhs = log_ratio_sq(i, k, alpha)?;
    Ok(lemma31_from_log(i, k, alpha.get(), ln_lhs))
}

pub(crate) fn lemma31_from_log(i: usize, k: usize, alpha: f64, ln_lhs: f64) -> f64 {
    exp_diff(ln_shifted_bound(i, k, alpha), ln_lhs)
}

/// `α · ln((i+h)/(k+h))`, `h = (α−1)/2`.
fn ln_shifted_bound(i: usize, k: usize, alpha: f64) -> f64 {
    let h = 0.5 * (alpha - 1.0);
    -alpha * ((k - i) as f64 / (i as f64 + h)).ln_1p()
}

/// `α · ln(i/k)`.
fn ln_power_bound(i: usize, k: usize, alpha: f64) -> f64 {
    -alpha * ((k - i) as f64 / i as f64).ln_1p()
}

/// The two-sided Gamma-ratio estimate with bounds `(i/k)^α` and
/// `((i+(α−1)/2)/(k+(α−1)/2))^α`, whose orientation flips between
/// `α ∈ (−1, 0] ∪ [1, ∞)` and `α ∈ [0, 1]`.
///
/// Returns `(outer − ratio, ratio − inner)`; both are non-negative when the
/// estimate holds.
pub fn prop32_margin(i: usize, k: usize, alpha: Alpha) -> Result<(f64, f64)> {
    check_pair(i, k, false)?;
    let ln_ratio = log_ratio_sq(i, k, alpha)?;
    Ok(prop32_from_log(i, k, alpha.get(), ln_ratio))
}

pub(crate) fn prop32_from_log(i: usize, k: usize, alpha: f64, ln_ratio: f64) -> (f64, f64) {
    let ln_pow = ln_power_bound(i, k, alpha);
    let ln_shift = ln_shifted_bound(i, k, alpha);
    if alpha <= 0.0 || alpha >= 1.0 {
        (exp_diff(ln_shift, ln_ratio), exp_diff(ln_ratio, ln_pow))
    } else {
        (exp_diff(ln_pow, ln_ratio), exp_diff(ln_ratio, ln_shift))
    }
}
