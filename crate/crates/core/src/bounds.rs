//! Closed-form bounds on `c_n(α)²`.
//!
//! Every bound is normalised to bound the square of the Markov constant.
//! Bounds are evaluated even outside their hypotheses so they can be
//! studied there; the `applicable` flag says whether the hypotheses hold.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::Alpha;
use crate::spectral::{solve, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BoundId {
    #[serde(rename = "turan_exact")]
    TuranExact,
    #[serde(rename = "dorfler_lower")]
    DorflerLower,
    #[serde(rename = "dorfler_upper")]
    DorflerUpper,
    #[serde(rename = "theoremA_lower")]
    TheoremALower,
    #[serde(rename = "theoremA_upper")]
    TheoremAUpper,
    #[serde(rename = "theorem11_upper")]
    Theorem11Upper,
    #[serde(rename = "cor12_lower")]
    Cor12Lower,
    #[serde(rename = "cor12_upper")]
    Cor12Upper,
    #[serde(rename = "frob_upper")]
    FrobUpper,
    #[serde(rename = "newton_lower")]
    NewtonLower,
    #[serde(rename = "simple_upper")]
    SimpleUpper,
    #[serde(rename = "simple_lower")]
    SimpleLower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
    Exact,
}

impl BoundId {
    pub const ALL: [BoundId; 12] = [
        BoundId::TuranExact,
        BoundId::DorflerLower,
        BoundId::DorflerUpper,
        BoundId::TheoremALower,
        BoundId::TheoremAUpper,
        BoundId::Theorem11Upper,
        BoundId::Cor12Lower,
        BoundId::Cor12Upper,
        BoundId::FrobUpper,
        BoundId::NewtonLower,
        BoundId::SimpleUpper,
        BoundId::SimpleLower,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundId::TuranExact => "turan_exact",
            BoundId::DorflerLower => "dorfler_lower",
            BoundId::DorflerUpper => "dorfler_upper",
            BoundId::TheoremALower => "theoremA_lower",
            BoundId::TheoremAUpper => "theoremA_upper",
            BoundId::Theorem11Upper => "theorem11_upper",
            BoundId::Cor12Lower => "cor12_lower",
            BoundId::Cor12Upper => "cor12_upper",
            BoundId::FrobUpper => "frob_upper",
            BoundId::NewtonLower => "newton_lower",
            BoundId::SimpleUpper => "simple_upper",
            BoundId::SimpleLower => "simple_lower",
        }
    }

    pub fn kind(self) -> BoundKind {
        use BoundId::*;
        match self {
            TuranExact => BoundKind::Exact,
            DorflerLower | TheoremALower | Cor12Lower | NewtonLower | SimpleLower => BoundKind::Lower,
            DorflerUpper | TheoremAUpper | Theorem11Upper | Cor12Upper | FrobUpper | SimpleUpper => BoundKind::Upper,
        }
    }

    pub fn hypothesis(self) -> &'static str {
        use BoundId::*;
        match self {
            TuranExact => "alpha = 0",
            DorflerLower | DorflerUpper | FrobUpper | NewtonLower => "n >= 1, alpha > -1",
            TheoremALower => "n >= 3, n > (alpha+1)/6",
            TheoremAUpper | SimpleUpper | SimpleLower => "n >= 3, alpha > -1",
            Theorem11Upper | Cor12Lower | Cor12Upper => "n >= 3, alpha >= 2",
        }
    }

    fn applicable(self, n: usize, alpha: f64) -> bool {
        use BoundId::*;
        let nf = n as f64;
        match self {
            TuranExact => alpha == 0.0,
            DorflerLower | DorflerUpper | FrobUpper | NewtonLower => n >= 1,
            TheoremALower => n >= 3 && nf > (alpha + 1.0) / 6.0,
            TheoremAUpper | SimpleUpper | SimpleLower => n >= 3,
            Theorem11Upper | Cor12Lower | Cor12Upper => n >= 3 && alpha >= 2.0,
        }
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownBound(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    pub applicable: bool,
}

/// Leading coefficients of `det(μI − A_n) = μⁿ − b1 μⁿ⁻¹ + b2 μⁿ⁻² − b3 μⁿ⁻³ + …`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharPolyCoeffs {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

pub fn charpoly_coeffs(n: usize, alpha: Alpha) -> CharPolyCoeffs {
    let a = alpha.get();
    let nf = n as f64;
    let b1 = nf * (nf + 1.0) / (2.0 * (a + 1.0));
    let b2 = (nf - 1.0) * nf * (nf + 1.0) / (24.0 * (a + 1.0) * (a + 2.0) * (a + 3.0))
        * (3.0 * (a + 2.0) * nf + 2.0 * (a + 6.0));
    let b3 = (nf - 2.0)
        * (nf - 1.0)
        * nf
        * (nf + 1.0)
        * (5.0 * (a + 2.0) * (a + 4.0) * nf * (nf + 1.0) + 8.0 * (7.0 * a + 20.0) * nf + 12.0 * (a + 20.0))
        / (240.0 * (a + 1.0) * (a + 2.0) * (a + 3.0) * (a + 4.0) * (a + 5.0));
    // the (n−1), (n−2) factors vanish below their thresholds
    CharPolyCoeffs {
        b1,
        b2: if n >= 2 { b2 } else { 0.0 },
        b3: if n >= 3 { b3 } else { 0.0 },
    }
}

/// `‖A_n‖_F² = b1² − 2 b2` in fully expanded form.
pub fn frobenius_sq_closed_form(n: usize, alpha: Alpha) -> f64 {
    let a = alpha.get();
    let nf = n as f64;
    nf * (nf + 1.0) / (2.0 * (a + 1.0).powi(2) * (a + 3.0))
        * (nf * nf + (2.0 * a * a + 5.0 * a + 6.0) / (3.0 * (a + 2.0)) * nf + (a + 1.0) * (a + 6.0) / (3.0 * (a + 2.0)))
}

fn value_of(id: BoundId, n: usize, a: f64) -> f64 {
    use BoundId::*;
    let nf = n as f64;
    match id {
        TuranExact => (2.0 * (PI / (4.0 * nf + 2.0)).sin()).powi(-2),
        DorflerLower => {
            nf * nf / ((a + 1.0) * (a + 3.0))
                + (2.0 * a * a + 5.0 * a + 6.0) * nf / (3.0 * (a + 1.0) * (a + 2.0) * (a + 3.0))
                + (a + 6.0) / (3.0 * (a + 2.0) * (a + 3.0))
        }
        DorflerUpper => nf * (nf + 1.0) / (2.0 * (a + 1.0)),
        TheoremALower => 2.0 * (nf + 2.0 * a / 3.0) * (nf - (a + 1.0) / 6.0) / ((a + 1.0) * (a + 5.0)),
        TheoremAUpper => (nf + 1.0) * (nf + 2.0 * (a + 1.0) / 5.0) / ((a + 1.0) * ((a + 3.0) * (a + 5.0)).cbrt()),
        Theorem11Upper => 4.0 * (nf + 1.0) * (nf + 3.0 + 3.0 * (a + 1.0) / 4.0) / (a * a + 10.0 * a + 8.0),
        Cor12Lower => (nf + 1.0) * (nf + a + 4.0) / (2.0 * (a + 1.0) * (a + 8.0)),
        Cor12Upper => 4.0 * (nf + 1.0) * (nf + a + 4.0) / ((a + 1.0) * (a + 8.0)),
        FrobUpper => frobenius_sq_closed_form(n, Alpha::new(a).expect("validated alpha")).sqrt(),
        NewtonLower => {
            let c = charpoly_coeffs(n, Alpha::new(a).expect("validated alpha"));
            c.b1 - 2.0 * c.b2 / c.b1
        }
        SimpleUpper => (nf + 1.0) * (nf * (nf + 2.0 * (a + 1.0) / 3.0)).sqrt() / ((a + 1.0) * (2.0 * (a + 3.0)).sqrt()),
        SimpleLower => {
            let shift = if a < 0.0 {
                7.0 / 8.0
            } else if a <= 1.0 {
                1.0
            } else {
                (2.0 * a + 1.0) / 3.0
            };
            nf * (nf + shift) / ((a + 1.0) * (a + 3.0))
        }
    }
}

/// Evaluate one bound on `c_n(α)²`.
pub fn evaluate_bound(id: BoundId, n: usize, alpha: Alpha) -> Result<BoundValue> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!("n must be >= 1, got {n}")));
    }
    Ok(BoundValue {
        value: value_of(id, n, alpha.get()),
        applicable: id.applicable(n, alpha.get()),
    })
}

/// Relative slack used when comparing bounds against each other or against
/// the computed constant.
pub const SANDWICH_SLACK: f64 = 1e-12;
/// Agreement demanded between the exact α = 0 formula and the eigenvalue.
pub const EXACT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEntry {
    pub id: BoundId,
    pub kind: BoundKind,
    pub value: f64,
    pub applicable: bool,
    pub hypothesis: &'static str,
    /// Whether the computed constant respects this bound; `None` when no
    /// constant was computed or the bound is inapplicable.
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub n: usize,
    pub alpha: Alpha,
    pub entries: Vec<BoundEntry>,
    pub computed_c_sq: Option<f64>,
    /// Human-readable sandwich violations; empty when everything is ordered.
    pub violations: Vec<String>,
}

impl BoundsReport {
    /// Evaluate every bound and check the sandwich, optionally around a
    /// known value of `c_n(α)²`.
    pub fn new(n: usize, alpha: Alpha, computed_c_sq: Option<f64>) -> Result<Self> {
        let mut entries = Vec::with_capacity(BoundId::ALL.len());
        for id in BoundId::ALL {
            let BoundValue { value, applicable } = evaluate_bound(id, n, alpha)?;
            let holds = match (computed_c_sq, applicable) {
                (Some(c), true) => Some(respects(id.kind(), value, c)),
                _ => None,
            };
            entries.push(BoundEntry {
                id,
                kind: id.kind(),
                value,
                applicable,
                hypothesis: id.hypothesis(),
                holds,
            });
        }

        let mut violations = Vec::new();
        let applicable = || entries.iter().filter(|e| e.applicable);
        for lo in applicable().filter(|e| e.kind != BoundKind::Upper) {
            for hi in applicable().filter(|e| e.kind != BoundKind::Lower) {
                if lo.id != hi.id && lo.value > hi.value * (1.0 + SANDWICH_SLACK) {
                    violations.push(format!("{} = {} exceeds {} = {}", lo.id, lo.value, hi.id, hi.value));
                }
            }
        }
        for e in applicable().filter(|e| e.holds == Some(false)) {
            violations.push(format!(
                "computed c^2 = {} violates {} {} = {}",
                computed_c_sq.unwrap_or(f64::NAN),
                kind_word(e.kind),
                e.id,
                e.value
            ));
        }
        Ok(BoundsReport {
            n,
            alpha,
            entries,
            computed_c_sq,
            violations,
        })
    }

    pub fn sandwich_holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn get(&self, id: BoundId) -> &BoundEntry {
        self.entries.iter().find(|e| e.id == id).expect("report holds every id")
    }
}

fn kind_word(kind: BoundKind) -> &'static str {
    match kind {
        BoundKind::Lower => "lower bound",
        BoundKind::Upper => "upper bound",
        BoundKind::Exact => "exact value",
    }
}

fn respects(kind: BoundKind, bound: f64, c_sq: f64) -> bool {
    let slack = SANDWICH_SLACK * bound.abs().max(1.0);
    match kind {
        BoundKind::Lower => c_sq >= bound - slack,
        BoundKind::Upper => c_sq <= bound + slack,
        BoundKind::Exact => (c_sq - bound).abs() <= EXACT_TOL * bound.abs(),
    }
}

/// All twelve bounds for `(n, α)`, with `c_n(α)²` attached when requested.
pub fn bounds_report(n: usize, alpha: Alpha, include_computed: bool) -> Result<BoundsReport> {
    let computed = if include_computed {
        Some(solve(n, alpha, DEFAULT_TOL)?.mu_max)
    } else {
        None
    };
    BoundsReport::new(n, alpha, computed)
}
