//! `J_ν`, its first positive zero, and the asymptotic Markov constant
//! `c(α) = lim c_n(α)/n = 1/j_{(α−1)/2,1}`.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::gamma::{ln_gamma, Alpha};
use crate::spectral::{markov_constant, DEFAULT_TOL};

pub const MAX_X: f64 = 100.0;
const SCAN_STEP: f64 = 0.1;
const ZERO_TOL: f64 = 1e-13;
const MAX_TERMS: usize = 2000;
pub const MAX_EXTRAPOLATION_N: usize = 4000;

/// `J_ν(x)` from the ascending series
/// `Σ (−1)^m (x/2)^{ν+2m} / (m! Γ(ν+m+1))`.
///
/// The alternating sum `Σ (−1)^m (x²/4)^m / (m! (ν+1)_m)` is accumulated in
/// double-double arithmetic, so cancellation near large-order zeros costs
/// nothing visible in `f64`; the prefactor `(x/2)^ν/Γ(ν+1)` is taken in log
/// scale.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if !(nu > -1.0) || !nu.is_finite() {
        return Err(Error::InvalidArgument(format!("bessel_j needs nu > -1, got {nu}")));
    }
    if !(x > 0.0 && x <= MAX_X) {
        return Err(Error::InvalidArgument(format!(
            "bessel_j needs 0 < x <= {MAX_X}, got {x}"
        )));
    }
    let half = x / 2.0;
    let q = Dd::from_f64(half) * Dd::from_f64(half);
    let nu_dd = Dd::from_f64(nu);
    let mut term = Dd::from_f64(1.0);
    let mut sum = term;
    let mut peak = 1.0f64;
    for m in 1..=MAX_TERMS {
        let mf = m as f64;
        let denom = (nu_dd + Dd::from_f64(mf)) * mf;
        term = -(term * q).div(denom);
        sum = sum + term;
        let t = term.hi().abs();
        peak = peak.max(t);
        if t <= (1e-18 * sum.abs().hi()).max(1e-33 * peak) {
            break;
        }
    }
    let ln_pre = nu * half.ln() - ln_gamma(nu + 1.0);
    Ok(ln_pre.exp() * sum.to_f64())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselZero {
    pub nu: f64,
    pub value: f64,
    /// `|J_ν(value)|`.
    pub residual: f64,
}

/// First positive zero `j_{ν,1}`: scan upward from `max(0.1, ν)` in steps
/// of 0.1 until `J_ν` changes sign, then bisect.
pub fn first_positive_zero(nu: f64) -> Result<BesselZero> {
    if !(nu >= -0.5) || !nu.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "zero finder is certified for nu >= -1/2, got {nu}"
        )));
    }
    let start = nu.max(0.1);
    let mut lo = start;
    let mut f_lo = bessel_j(nu, lo)?;
    let mut k = 1usize;
    let hi = loop {
        let x = start + k as f64 * SCAN_STEP;
        if x > MAX_X {
            return Err(Error::NoBesselZero { nu, limit: MAX_X });
        }
        let f = bessel_j(nu, x)?;
        if f == 0.0 {
            return Ok(BesselZero {
                nu,
                value: x,
                residual: 0.0,
            });
        }
        if f.signum() != f_lo.signum() {
            break x;
        }
        lo = x;
        f_lo = f;
        k += 1;
    };
    let mut hi = hi;
    while hi - lo > ZERO_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f = bessel_j(nu, mid)?;
        if f == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let value = 0.5 * (lo + hi);
    Ok(BesselZero {
        nu,
        value,
        residual: bessel_j(nu, value)?.abs(),
    })
}

/// `c(α) = 1/j_{(α−1)/2,1}` for `α ≥ 0`.
pub fn asymptotic_constant(alpha: Alpha) -> Result<f64> {
    let a = alpha.get();
    if a < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "asymptotic constant needs alpha >= 0 (Bessel order >= -1/2), got {a}"
        )));
    }
    Ok(1.0 / first_positive_zero(0.5 * (a - 1.0))?.value)
}

/// `(α+1)·∛((α+3)(α+5)) − (α²+10α+8)/4`; positive where the cube-root
/// upper bound on `c(α)²` is the smaller one.
fn branch_gap(a: f64) -> f64 {
    (a + 1.0) * ((a + 3.0) * (a + 5.0)).cbrt() - (a * a + 10.0 * a + 8.0) / 4.0
}

/// Crossover `α*` where the two upper bounds on `c(α)²` coincide.
pub fn alpha_star() -> Result<f64> {
    let (mut lo, mut hi) = (10.0f64, 100.0f64);
    let (g_lo, g_hi) = (branch_gap(lo), branch_gap(hi));
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::NoRootInBracket { lo, hi });
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if branch_gap(mid).signum() == g_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn cached_alpha_star() -> f64 {
    static STAR: OnceLock<f64> = OnceLock::new();
    *STAR.get_or_init(|| alpha_star().expect("bracket [10, 100] contains the crossover"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperBranch {
    /// `1/((α+1)·∛((α+3)(α+5)))`, used for `α ≤ α*`.
    CubeRoot,
    /// `4/(α²+10α+8)`, used for `α > α*`.
    Quadratic,
}

/// Two-sided bounds on `c(α)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cor14Report {
    pub alpha: f64,
    pub lower: f64,
    pub upper: f64,
    pub branch: UpperBranch,
    pub cube_root_upper: f64,
    pub quadratic_upper: f64,
    /// `sqrt(upper/lower)`: the ratio of the implied bounds on `c(α)`.
    pub ratio: f64,
}

pub fn cor14_report(alpha: Alpha) -> Cor14Report {
    let a = alpha.get();
    let lower = 2.0 / ((a + 1.0) * (a + 5.0));
    let cube_root_upper = 1.0 / ((a + 1.0) * ((a + 3.0) * (a + 5.0)).cbrt());
    let quadratic_upper = 4.0 / (a * a + 10.0 * a + 8.0);
    let (upper, branch) = if a <= cached_alpha_star() {
        (cube_root_upper, UpperBranch::CubeRoot)
    } else {
        (quadratic_upper, UpperBranch::Quadratic)
    };
    Cor14Report {
        alpha: a,
        lower,
        upper,
        branch,
        cube_root_upper,
        quadratic_upper,
        ratio: (upper / lower).sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticEstimate {
    /// Extrapolated `c(α)` from the two largest `n`.
    pub value: f64,
    /// `(n, c_n(α)/n)`.
    pub samples: Vec<(usize, f64)>,
    /// First-order Richardson estimates from consecutive pairs of samples.
    pub pairwise: Vec<f64>,
}

/// Estimate `c(α)` from `c_n(α)/n = c(α) + a/n + O(1/n²)` by first-order
/// Richardson extrapolation.
pub fn estimate_c_numeric(alpha: Alpha, n_list: &[usize]) -> Result<AsymptoticEstimate> {
    if n_list.len() < 3 {
        return Err(Error::InvalidArgument("need at least three values of n".into()));
    }
    if n_list[0] < 1 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "n values must be positive and increasing: {n_list:?}"
        )));
    }
    let top = *n_list.last().expect("non-empty");
    if top > MAX_EXTRAPOLATION_N {
        return Err(Error::InvalidArgument(format!(
            "n = {top} exceeds {MAX_EXTRAPOLATION_N}"
        )));
    }
    let samples = n_list
        .par_iter()
        .map(|&n| markov_constant(n, alpha, DEFAULT_TOL).map(|c| (n, c / n as f64)))
        .collect::<Result<Vec<_>>>()?;
    let pairwise: Vec<f64> = samples
        .windows(2)
        .map(|w| {
            let ((n1, f1), (n2, f2)) = (w[0], w[1]);
            let (n1, n2) = (n1 as f64, n2 as f64);
            (n2 * f2 - n1 * f1) / (n2 - n1)
        })
        .collect();
    let value = *pairwise.last().expect("at least two pairs");
    Ok(AsymptoticEstimate {
        value,
        samples,
        pairwise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn alpha(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    /// Plain f64 partial sums of the series; fine where there is no
    /// cancellation to speak of.
    fn series_oracle(nu: f64, x: f64, terms: usize) -> f64 {
        let mut fact = 1.0;
        let mut s = 0.0;
        for m in 0..terms {
            if m > 0 {
                fact *= m as f64;
            }
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * (x / 2.0).powf(nu + 2.0 * m as f64) / (fact * crate::gamma::gamma(nu + m as f64 + 1.0));
        }
        s
    }

    #[test]
    fn j_examples() {
        assert!(bessel_j(0.5, PI).unwrap().abs() < 1e-15);
        assert!(bessel_j(-0.5, PI / 2.0).unwrap().abs() < 1e-15);
        let oracle = series_oracle(0.0, 1.0, 20);
        assert!((bessel_j(0.0, 1.0).unwrap() - oracle).abs() < 1e-12);
        assert!((oracle - 0.765_197_686_557_966_6).abs() < 1e-14);
    }

    #[test]
    fn j_domain_guards() {
        assert!(bessel_j(-1.0, 1.0).is_err());
        assert!(bessel_j(0.0, 0.0).is_err());
        assert!(bessel_j(0.0, 100.5).is_err());
        assert!(bessel_j(0.0, 100.0).is_ok());
    }

    #[test]
    fn half_integer_reductions() {
        let mut x = 0.05;
        while x <= 30.0 {
            let pref = (2.0 / (PI * x)).sqrt();
            assert!((bessel_j(0.5, x).unwrap() - pref * x.sin()).abs() <= 1e-12, "x={x}");
            assert!((bessel_j(-0.5, x).unwrap() - pref * x.cos()).abs() <= 1e-12, "x={x}");
            x += 0.05;
        }
        let pref = (2.0 / (PI * 30.0)).sqrt();
        assert!((bessel_j(0.5, 30.0).unwrap() - pref * 30f64.sin()).abs() <= 1e-12);
    }

    #[test]
    fn j_high_order_near_its_zero() {
        // J_{3/2}(x) = sqrt(2/(πx)) (sin x / x − cos x)
        for x in [5.0, 20.0, 45.0] {
            let want = (2.0 / (PI * x)).sqrt() * (x.sin() / x - x.cos());
            assert!((bessel_j(1.5, x).unwrap() - want).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn zero_examples() {
        let z = first_positive_zero(-0.5).unwrap();
        assert!((z.value - PI / 2.0).abs() < 1e-12);
        let z = first_positive_zero(0.5).unwrap();
        assert!((z.value - PI).abs() < 1e-12);
        let z = first_positive_zero(0.0).unwrap();
        assert!((z.value - 2.404_825_557_695_773).abs() < 1e-12);
        assert!(z.residual <= 1e-12);
        assert!(first_positive_zero(-0.6).is_err());
    }

    #[test]
    fn zero_matches_fine_scan_oracle() {
        // sign scan at step 1e-4 brackets j_{0,1}
        let mut x = 2.0f64;
        let mut prev = bessel_j(0.0, x).unwrap();
        let z = first_positive_zero(0.0).unwrap();
        loop {
            let nx = x + 1e-4;
            let f = bessel_j(0.0, nx).unwrap();
            if f.signum() != prev.signum() {
                assert!(x <= z.value && z.value <= nx);
                break;
            }
            prev = f;
            x = nx;
        }
    }

    #[test]
    fn zeros_are_certified() {
        for nu in [-0.5, -0.25, 0.0, 0.5, 2.0, 4.5, 21.2, 49.5] {
            let z = first_positive_zero(nu).unwrap();
            assert!(z.residual <= 1e-12, "nu={nu} residual={}", z.residual);
            assert!(z.value > 0.0);
            let step = z.value / 1000.0;
            let mut x = step;
            let sign = bessel_j(nu, x).unwrap().signum();
            while x < z.value - step {
                assert_eq!(bessel_j(nu, x).unwrap().signum(), sign, "nu={nu} x={x}");
                x += step;
            }
        }
    }

    #[test]
    fn asymptotic_examples() {
        assert!((asymptotic_constant(alpha(0.0)).unwrap() - 2.0 / PI).abs() < 1e-10);
        assert!((asymptotic_constant(alpha(2.0)).unwrap() - 1.0 / PI).abs() < 1e-10);
        assert!((asymptotic_constant(alpha(1.0)).unwrap() - 1.0 / 2.404_825_557_695_773).abs() < 1e-12);
        assert!((asymptotic_constant(alpha(1.0)).unwrap() - 0.415_830_6).abs() < 1e-7);
        assert!(asymptotic_constant(alpha(-0.5)).is_err());
    }

    #[test]
    fn turan_limit_is_two_over_pi() {
        // c_n(0)/n = 1/(2 n sin(π/(4n+2))) → 2/π
        let n = 1e7f64;
        let lim = 1.0 / (2.0 * n * (PI / (4.0 * n + 2.0)).sin());
        assert!((lim - asymptotic_constant(alpha(0.0)).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn cor14_examples() {
        let r = cor14_report(alpha(0.0));
        assert!((r.lower - 0.4).abs() < 1e-15);
        assert!((r.upper - 15f64.cbrt().recip()).abs() < 1e-15);
        assert!((r.upper - 0.405_480).abs() < 1e-6);
        assert!((r.ratio - 1.006_82).abs() < 1e-5);
        assert!(r.ratio < 2f64.sqrt());
        assert_eq!(r.branch, UpperBranch::CubeRoot);
        assert_eq!(cor14_report(alpha(100.0)).branch, UpperBranch::Quadratic);
        let r = cor14_report(alpha(43.4));
        assert!((r.cube_root_upper - r.quadratic_upper).abs() / r.quadratic_upper < 1e-3);
    }

    #[test]
    fn alpha_star_examples() {
        let s = alpha_star().unwrap();
        assert!((s - 43.4).abs() < 0.05, "{s}");
        let at = |a: f64| cor14_report(alpha(a));
        assert!(at(10.0).cube_root_upper < at(10.0).quadratic_upper);
        assert!(at(60.0).quadratic_upper < at(60.0).cube_root_upper);
    }

    #[test]
    fn estimate_validation() {
        assert!(estimate_c_numeric(alpha(0.0), &[10, 20]).is_err());
        assert!(estimate_c_numeric(alpha(0.0), &[10, 30, 20]).is_err());
        assert!(estimate_c_numeric(alpha(0.0), &[10, 20, 5000]).is_err());
    }

    #[test]
    fn estimate_matches_bessel_route() {
        let ns = [500, 1000, 2000];
        let e = estimate_c_numeric(alpha(0.0), &ns).unwrap();
        assert!((e.value - 2.0 / PI).abs() < 1e-3);
        for a in [1.0, 2.0] {
            let e = estimate_c_numeric(alpha(a), &ns).unwrap();
            let c = asymptotic_constant(alpha(a)).unwrap();
            assert!((e.value - c).abs() < 5e-3, "a={a} {} vs {c}", e.value);
        }
    }

    #[test]
    fn limit_sits_strictly_inside_bounds() {
        for a in [0.0, 1.0, 2.0, 5.0, 10.0, 43.4, 100.0] {
            let c = asymptotic_constant(alpha(a)).unwrap();
            let r = cor14_report(alpha(a));
            assert!(r.lower < c * c && c * c < r.upper, "a={a}");
        }
    }

    #[test]
    fn bound_ratio_below_sqrt_two_on_grid() {
        for k in 1..=200 {
            let a = -1.0 + 201.0 * k as f64 / 200.0;
            assert!(cor14_report(alpha(a)).ratio < 2f64.sqrt(), "a={a}");
        }
    }

    proptest::proptest! {
        #[test]
        fn bound_ratio_below_sqrt_two(a in -0.999f64..1000.0) {
            let r = cor14_report(alpha(a));
            proptest::prop_assert!(r.lower < r.upper && r.ratio < 2f64.sqrt());
        }
    }

    #[test]
    fn estimate_small_turan() {
        let e = estimate_c_numeric(alpha(0.0), &[50, 100, 200]).unwrap();
        assert_eq!(e.samples.len(), 3);
        assert_eq!(e.pairwise.len(), 2);
        assert!((e.value - 2.0 / PI).abs() / (2.0 / PI) < 1e-4, "{}", e.value);
    }
}
