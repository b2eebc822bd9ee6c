//! Grid sweeps that check each inequality and identity numerically and
//! record signed, normalised margins.
//!
//! A margin is `(bound − value)/max(1, |bound|)` oriented so that a
//! non-negative value means the claim holds; a case passes when its margin
//! is at least `−PASS_SLACK`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{charpoly_coeffs, evaluate_bound, BoundId};
use crate::error::{Error, Result};
use crate::gamma::{lemma31_from_log, prop32_from_log, Alpha};
use crate::matrix::MarkovMatrix;
use crate::report::{fmt17, Tabular};
use crate::spectral::{default_max_iter, mu_max_power, DEFAULT_TOL};

pub const PASS_SLACK: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const FROBENIUS_TOL: f64 = 1e-10;
pub const COR13_LIMIT_TOL: f64 = 1e-3;
pub const COR13_CHECK_EPS: f64 = 1e-6;
pub const COR13_MAX_N: usize = 10;
pub const DEFAULT_EPS: [f64; 7] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];
pub const DEFAULT_ALPHA_BIG: [f64; 3] = [1e2, 1e3, 1e4];
pub const DEFAULT_ALPHAS: [f64; 12] = [-0.9, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 25.0, 50.0, 100.0];
const SIMPSON_REL_TOL: f64 = 1e-13;
const SIMPSON_MAX_DEPTH: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Suite {
    #[serde(rename = "lemma31")]
    Lemma31,
    #[serde(rename = "prop32")]
    Prop32,
    #[serde(rename = "prop41")]
    Prop41,
    #[serde(rename = "theoremA")]
    TheoremA,
    #[serde(rename = "theorem11")]
    Theorem11,
    #[serde(rename = "cor12")]
    Cor12,
    #[serde(rename = "trace_frobenius")]
    TraceFrobenius,
    #[serde(rename = "bound_ordering")]
    BoundOrdering,
    #[serde(rename = "cor13")]
    Cor13,
    #[serde(rename = "integral_lemma")]
    IntegralLemma,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Lemma31,
        Suite::Prop32,
        Suite::Prop41,
        Suite::TheoremA,
        Suite::Theorem11,
        Suite::Cor12,
        Suite::TraceFrobenius,
        Suite::BoundOrdering,
        Suite::Cor13,
        Suite::IntegralLemma,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Lemma31 => "lemma31",
            Suite::Prop32 => "prop32",
            Suite::Prop41 => "prop41",
            Suite::TheoremA => "theoremA",
            Suite::Theorem11 => "theorem11",
            Suite::Cor12 => "cor12",
            Suite::TraceFrobenius => "trace_frobenius",
            Suite::BoundOrdering => "bound_ordering",
            Suite::Cor13 => "cor13",
            Suite::IntegralLemma => "integral_lemma",
        }
    }

    /// Default `n` values; for the Gamma-ratio suites these are the outer
    /// index `k`.
    pub fn default_n_values(self) -> Vec<usize> {
        match self {
            Suite::Cor13 => (1..=COR13_MAX_N).collect(),
            _ => (3..=30).collect(),
        }
    }

    pub fn default_alpha_values(self) -> Vec<f64> {
        match self {
            Suite::Cor13 => DEFAULT_ALPHA_BIG.to_vec(),
            _ => DEFAULT_ALPHAS.to_vec(),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub n_values: Vec<usize>,
    pub alpha_values: Vec<Alpha>,
    pub suite: Suite,
}

impl GridSpec {
    pub fn new(suite: Suite, n_values: Vec<usize>, alpha_values: &[f64]) -> Result<Self> {
        if n_values.is_empty() || alpha_values.is_empty() {
            return Err(Error::InvalidArgument("grid lists must be non-empty".into()));
        }
        if n_values.contains(&0) {
            return Err(Error::InvalidArgument("grid n values must be >= 1".into()));
        }
        let alpha_values = alpha_values.iter().map(|&a| Alpha::new(a)).collect::<Result<_>>()?;
        Ok(GridSpec {
            n_values,
            alpha_values,
            suite,
        })
    }

    pub fn default_for(suite: Suite) -> Self {
        GridSpec::new(suite, suite.default_n_values(), &suite.default_alpha_values()).expect("defaults are valid")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCase {
    pub suite: Suite,
    pub n: usize,
    pub alpha: f64,
    pub margin: f64,
    pub pass: bool,
    pub detail: String,
}

impl SweepCase {
    fn new(suite: Suite, n: usize, alpha: f64, margin: f64, detail: String) -> Self {
        SweepCase {
            suite,
            n,
            alpha,
            margin,
            pass: margin >= -PASS_SLACK,
            detail,
        }
    }

    fn failed(suite: Suite, n: usize, alpha: f64, err: &Error) -> Self {
        SweepCase {
            suite,
            n,
            alpha,
            margin: f64::NEG_INFINITY,
            pass: false,
            detail: err.to_string(),
        }
    }
}

impl Tabular for SweepCase {
    fn headers() -> &'static [&'static str] {
        &["suite", "n", "alpha", "margin", "pass", "detail"]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.suite.to_string(),
            self.n.to_string(),
            fmt17(self.alpha),
            fmt17(self.margin),
            self.pass.to_string(),
            self.detail.clone(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub suite: Suite,
    pub cases: Vec<SweepCase>,
    pub worst_margin: f64,
    pub all_pass: bool,
    /// Grid points outside the hypotheses of the checked claim.
    pub skipped: usize,
}

impl SweepReport {
    fn assemble(suite: Suite, mut cases: Vec<SweepCase>, skipped: usize) -> Self {
        cases.sort_by(|a, b| a.n.cmp(&b.n).then(a.alpha.total_cmp(&b.alpha)));
        let worst_margin = cases.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
        let all_pass = cases.iter().all(|c| c.pass);
        SweepReport {
            suite,
            cases,
            worst_margin,
            all_pass,
            skipped,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &SweepCase> {
        self.cases.iter().filter(|c| !c.pass)
    }
}

/// `(bound − value)/max(1, |bound|)` for an upper bound.
fn upper_margin(bound: f64, value: f64) -> f64 {
    (bound - value) / bound.abs().max(1.0)
}

/// `(value − bound)/max(1, |bound|)` for a lower bound.
fn lower_margin(bound: f64, value: f64) -> f64 {
    (value - bound) / bound.abs().max(1.0)
}

fn bound(id: BoundId, n: usize, alpha: Alpha) -> f64 {
    evaluate_bound(id, n, alpha).expect("n >= 1 on every grid").value
}

fn c_sq(n: usize, alpha: Alpha) -> Result<f64> {
    let a = MarkovMatrix::build(n, alpha)?;
    Ok(mu_max_power(&a, DEFAULT_TOL, default_max_iter(n))?.mu_max)
}

enum Outcome {
    Case(SweepCase),
    Skip,
}

/// Run one of the grid suites. `Cor13` reads `n ≤ 10` and `α ≥ 100` from the
/// grid and uses [`DEFAULT_EPS`]; `IntegralLemma` is seeded and goes through
/// [`verify_integral_lemma`].
pub fn run_suite(grid: &GridSpec) -> Result<SweepReport> {
    let suite = grid.suite;
    match suite {
        Suite::IntegralLemma => {
            return Err(Error::InvalidArgument(
                "integral_lemma is a seeded suite; use verify_integral_lemma".into(),
            ))
        }
        Suite::Cor13 => {
            let n_max = grid
                .n_values
                .iter()
                .copied()
                .filter(|&n| n <= COR13_MAX_N)
                .max()
                .unwrap_or(0);
            let big: Vec<f64> = grid
                .alpha_values
                .iter()
                .map(|a| a.get())
                .filter(|&a| a >= 100.0)
                .collect();
            if n_max == 0 || big.is_empty() {
                return Err(Error::InvalidArgument(
                    "cor13 needs some n <= 10 and some alpha >= 100".into(),
                ));
            }
            return verify_cor13(n_max, &DEFAULT_EPS, &big);
        }
        _ => {}
    }
    let points: Vec<(usize, Alpha)> = grid
        .n_values
        .iter()
        .flat_map(|&n| grid.alpha_values.iter().map(move |&a| (n, a)))
        .collect();
    let outcomes: Vec<Outcome> = points.par_iter().map(|&(n, a)| check_point(suite, n, a)).collect();
    let mut cases = Vec::with_capacity(outcomes.len());
    let mut skipped = 0;
    for o in outcomes {
        match o {
            Outcome::Case(c) => cases.push(c),
            Outcome::Skip => skipped += 1,
        }
    }
    Ok(SweepReport::assemble(suite, cases, skipped))
}

fn check_point(suite: Suite, n: usize, alpha: Alpha) -> Outcome {
    let a = alpha.get();
    let case = |margin: f64, detail: String| Outcome::Case(SweepCase::new(suite, n, a, margin, detail));
    let with_c_sq = |f: &dyn Fn(f64) -> Outcome| match c_sq(n, alpha) {
        Ok(c) => f(c),
        Err(e) => Outcome::Case(SweepCase::failed(suite, n, a, &e)),
    };
    match suite {
        Suite::Lemma31 => {
            if a < 1.0 || n < 2 {
                return Outcome::Skip;
            }
            let (i, m) = worst_gamma_ratio(n, a, |i, l| lemma31_from_log(i, n, a, l));
            case(m, format!("k={n} worst_i={i}"))
        }
        Suite::Prop32 => {
            if n < 2 {
                return Outcome::Skip;
            }
            let (i, m) = worst_gamma_ratio(n, a, |i, l| {
                let (outer, inner) = prop32_from_log(i, n, a, l);
                outer.min(inner)
            });
            let branch = if a <= 0.0 || a >= 1.0 {
                "outer=shifted"
            } else {
                "outer=power"
            };
            case(m, format!("k={n} worst_i={i} {branch}"))
        }
        Suite::Prop41 => {
            if a < 2.0 {
                return Outcome::Skip;
            }
            match MarkovMatrix::build(n, alpha) {
                Ok(mat) => {
                    let norm = mat.inf_norm();
                    let b = bound(BoundId::Theorem11Upper, n, alpha);
                    case(
                        upper_margin(b, norm),
                        format!("inf_norm={} bound={}", fmt17(norm), fmt17(b)),
                    )
                }
                Err(e) => Outcome::Case(SweepCase::failed(suite, n, a, &e)),
            }
        }
        Suite::TheoremA => {
            if n < 3 {
                return Outcome::Skip;
            }
            with_c_sq(&|c| {
                let up = bound(BoundId::TheoremAUpper, n, alpha);
                let mut m = upper_margin(up, c);
                let mut detail = format!("c_sq={} upper={}", fmt17(c), fmt17(up));
                if (n as f64) > (a + 1.0) / 6.0 {
                    let lo = bound(BoundId::TheoremALower, n, alpha);
                    m = m.min(lower_margin(lo, c));
                    detail = format!("{detail} lower={}", fmt17(lo));
                } else {
                    detail.push_str(" lower=not_applicable");
                }
                case(m, detail)
            })
        }
        Suite::Theorem11 | Suite::Cor12 => {
            if n < 3 || a < 2.0 {
                return Outcome::Skip;
            }
            let (lo_id, up_id) = if suite == Suite::Theorem11 {
                (BoundId::DorflerLower, BoundId::Theorem11Upper)
            } else {
                (BoundId::Cor12Lower, BoundId::Cor12Upper)
            };
            with_c_sq(&|c| {
                let (lo, up) = (bound(lo_id, n, alpha), bound(up_id, n, alpha));
                let m = lower_margin(lo, c).min(upper_margin(up, c));
                let mut detail = format!("lower={} c_sq={} upper={}", fmt17(lo), fmt17(c), fmt17(up));
                if suite == Suite::Cor12 {
                    detail = format!("{detail} ratio={}", fmt17(up / lo));
                }
                case(m, detail)
            })
        }
        Suite::TraceFrobenius => match MarkovMatrix::build(n, alpha) {
            Ok(mat) => {
                let nf = n as f64;
                let trace_want = nf * (nf + 1.0) / (2.0 * (a + 1.0));
                let tr_err = (mat.trace() - trace_want).abs() / trace_want;
                let cp = charpoly_coeffs(n, alpha);
                let fro_want = cp.b1 * cp.b1 - 2.0 * cp.b2;
                let fro_err = (mat.frobenius_sq() - fro_want).abs() / fro_want;
                let m = ((TRACE_TOL - tr_err) / TRACE_TOL).min((FROBENIUS_TOL - fro_err) / FROBENIUS_TOL);
                case(m, format!("trace_relerr={tr_err:.3e} frobenius_relerr={fro_err:.3e}"))
            }
            Err(e) => Outcome::Case(SweepCase::failed(suite, n, a, &e)),
        },
        Suite::BoundOrdering => {
            if n < 3 {
                return Outcome::Skip;
            }
            let ta = bound(BoundId::TheoremAUpper, n, alpha);
            let su = bound(BoundId::SimpleUpper, n, alpha);
            let tighter = if ta < su { "theoremA_upper" } else { "simple_upper" };
            case(
                upper_margin(su, ta),
                format!(
                    "theoremA_upper={} simple_upper={} tighter={tighter}",
                    fmt17(ta),
                    fmt17(su)
                ),
            )
        }
        Suite::Cor13 | Suite::IntegralLemma => unreachable!("dispatched in run_suite"),
    }
}

/// Worst margin over `i = 1..k−1` for a Gamma-ratio claim, given
/// `ln(β_i²/β_k²)` accumulated downward from `i = k−1`.
fn worst_gamma_ratio(k: usize, alpha: f64, margin: impl Fn(usize, f64) -> f64) -> (usize, f64) {
    let mut ln_ratio = 0.0;
    let mut worst = (0, f64::INFINITY);
    for i in (1..k).rev() {
        ln_ratio -= (alpha / i as f64).ln_1p();
        let m = margin(i, ln_ratio);
        if m < worst.1 {
            worst = (i, m);
        }
    }
    worst
}

/// Limits of `(α+1)c_n(α)²` at both ends of the α range, for `n = 1..=n_max`.
///
/// (i) `α = −1+ε`: the relative distance to `n(n+1)/2` must shrink with ε
/// and be at most `1e−3` once `ε ≤ 1e−6`. (ii) `α ≥ 100`: `α c_n²` must lie
/// in `[2n/3, 3(n+1)]`.
pub fn verify_cor13(n_max: usize, eps_list: &[f64], alpha_big: &[f64]) -> Result<SweepReport> {
    if n_max == 0 || n_max > COR13_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "cor13 needs 1 <= n <= {COR13_MAX_N}, got {n_max}"
        )));
    }
    if eps_list.is_empty() || eps_list.iter().any(|&e| !(1e-8..1.0).contains(&e)) {
        return Err(Error::InvalidArgument("eps values must lie in [1e-8, 1)".into()));
    }
    if eps_list.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::InvalidArgument("eps values must be strictly decreasing".into()));
    }
    if alpha_big.iter().any(|&a| !(a >= 100.0)) {
        return Err(Error::InvalidArgument("large-alpha values must be >= 100".into()));
    }
    let suite = Suite::Cor13;
    let cases: Vec<SweepCase> = (1..=n_max)
        .into_par_iter()
        .flat_map_iter(|n| {
            let mut out = Vec::new();
            let nf = n as f64;
            let limit = nf * (nf + 1.0) / 2.0;
            let mut prev: Option<f64> = None;
            for &eps in eps_list {
                let a = -1.0 + eps;
                let alpha = Alpha::new(a).expect("eps < 1");
                match c_sq(n, alpha) {
                    Ok(c) => {
                        let relerr = ((a + 1.0) * c - limit).abs() / limit;
                        let mut m = prev.map_or(f64::INFINITY, |p| (p - relerr) / p.max(1.0));
                        if eps <= COR13_CHECK_EPS {
                            m = m.min((COR13_LIMIT_TOL - relerr) / COR13_LIMIT_TOL);
                        }
                        let m = if m.is_finite() { m } else { 0.0 };
                        out.push(SweepCase::new(
                            suite,
                            n,
                            a,
                            m,
                            format!("part=i eps={eps:e} relerr={relerr:.6e}"),
                        ));
                        prev = Some(relerr);
                    }
                    Err(e) => out.push(SweepCase::failed(suite, n, a, &e)),
                }
            }
            for &a in alpha_big {
                let alpha = Alpha::new(a).expect("a >= 100");
                match c_sq(n, alpha) {
                    Ok(c) => {
                        let v = a * c;
                        let (lo, hi) = (2.0 * nf / 3.0, 3.0 * (nf + 1.0));
                        let m = lower_margin(lo, v).min(upper_margin(hi, v));
                        out.push(SweepCase::new(
                            suite,
                            n,
                            a,
                            m,
                            format!("part=ii alpha_c_sq={}", fmt17(v)),
                        ));
                    }
                    Err(e) => out.push(SweepCase::failed(suite, n, a, &e)),
                }
            }
            out
        })
        .collect();
    Ok(SweepReport::assemble(suite, cases, 0))
}

/// One draw of `f(t) = Π (t+γ_i)^{α_i}` on `[0, x]`.
#[derive(Debug, Clone, PartialEq)]
struct ProductPower {
    exponents: Vec<f64>,
    shifts: Vec<f64>,
}

impl ProductPower {
    fn eval(&self, t: f64) -> f64 {
        self.exponents
            .iter()
            .zip(&self.shifts)
            .map(|(a, g)| (t + g).powf(*a))
            .product()
    }

    fn s(&self) -> f64 {
        self.exponents.iter().sum()
    }

    fn gamma_min(&self) -> f64 {
        self.shifts.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn gamma_max(&self) -> f64 {
        self.shifts.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> std::result::Result<f64, ()> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, a, m);
    let right = simpson(fm, frm, fb, m, b);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 || m <= a || m >= b {
        return Err(());
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

/// Adaptive Simpson with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, SIMPSON_MAX_DEPTH).map_err(|_| Error::Integration { a, b, tol })
}

/// Random checks of the two-sided estimate
/// `[(t+γ_min) f(t)]_0^x/(s+1) ≤ ∫_0^x f ≤ (x+γ_max) f(x)/(s+1)`.
///
/// Case `n` is the trial number and `alpha` is `s = Σ α_i`.
pub fn verify_integral_lemma(trials: usize, seed: u64) -> Result<SweepReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(ProductPower, f64)> = (0..trials)
        .map(|_| {
            let r = rng.gen_range(1..=3);
            let exponents = (0..r).map(|_| 3.0 - rng.gen_range(0.0..3.0)).collect();
            let shifts = (0..r).map(|_| rng.gen_range(0.0..=2.0)).collect();
            let x = 5.0 - rng.gen_range(0.0..5.0);
            (ProductPower { exponents, shifts }, x)
        })
        .collect();
    let suite = Suite::IntegralLemma;
    let cases = draws
        .par_iter()
        .enumerate()
        .map(|(idx, (f, x))| integral_case(suite, idx + 1, f, *x))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport::assemble(suite, cases, 0))
}

fn integral_case(suite: Suite, trial: usize, f: &ProductPower, x: f64) -> Result<SweepCase> {
    let s = f.s();
    let (gmin, gmax) = (f.gamma_min(), f.gamma_max());
    let eval = |t: f64| f.eval(t);
    let scale = (x + gmax) * f.eval(x) / (s + 1.0);
    let integral = adaptive_simpson(&eval, 0.0, x, SIMPSON_REL_TOL * scale.max(1.0))?;
    let lower = ((x + gmin) * f.eval(x) - gmin * f.eval(0.0)) / (s + 1.0);
    let upper = scale;
    let m = lower_margin(lower, integral).min(upper_margin(upper, integral));
    let detail = format!(
        "x={} exponents={:?} shifts={:?} lower={} integral={} upper={}",
        fmt17(x),
        f.exponents,
        f.shifts,
        fmt17(lower),
        fmt17(integral),
        fmt17(upper)
    );
    Ok(SweepCase::new(suite, trial, s, m, detail))
}
