//! Gauss–Laguerre quadrature and the extremal-polynomial oracle.
//!
//! This path never touches `A_n`: it rebuilds `p = Σ a_ν L_ν^{(α)}` from an
//! eigenvector and integrates `p²` and `p′²` against `x^α e^{−x}` directly.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::{ln_gamma, Alpha, BetaTable};
use crate::report::fmt17;
use crate::spectral::{jacobi_eigen, SpectralResult};

pub const MAX_RULE_SIZE: usize = 300;
const NEWTON_STEPS: usize = 8;
const RESCALE: f64 = 1e150;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRule {
    pub alpha: Alpha,
    /// Ascending.
    pub nodes: Vec<f64>,
    /// Weights for `x^α e^{−x}`; the tail ones underflow to zero for `m` in
    /// the high hundreds.
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn m(&self) -> usize {
        self.nodes.len()
    }

    /// `Σ w_j f(x_j)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `(L_m(x), L_{m−1}(x))` up to a common positive factor. Rescaling keeps
/// the pair finite far out on the positive axis.
fn laguerre_pair_scaled(m: usize, alpha: f64, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..m {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
        }
    }
    (cur, prev)
}

/// Christoffel weight `Γ(α+1) / Σ_{k<m} q_k(x)²`, with `q_k` the
/// orthonormal polynomials scaled so that `q_0 = 1`.
fn christoffel_weight(m: usize, alpha: f64, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut sum = 1.0;
    let mut ln_scale = 0.0;
    for j in 0..m.saturating_sub(1) {
        let jf = j as f64;
        let b_j = (jf * (jf + alpha)).sqrt();
        let b_next = ((jf + 1.0) * (jf + 1.0 + alpha)).sqrt();
        let next = ((x - (2.0 * jf + alpha + 1.0)) * cur - b_j * prev) / b_next;
        prev = cur;
        cur = next;
        sum += cur * cur;
        if sum > RESCALE {
            cur /= RESCALE.sqrt();
            prev /= RESCALE.sqrt();
            sum /= RESCALE;
            ln_scale += RESCALE.ln();
        }
    }
    (ln_gamma(alpha + 1.0) - sum.ln() - ln_scale).exp()
}

/// Golub–Welsch nodes from the Jacobi matrix, polished by Newton on
/// `L_m^{(α)}`; weights from the Christoffel function at the polished node.
pub fn gauss_laguerre(m: usize, alpha: Alpha) -> Result<QuadratureRule> {
    if m == 0 || m > MAX_RULE_SIZE {
        return Err(Error::SizeGuard {
            n: m,
            limit: MAX_RULE_SIZE,
        });
    }
    let a = alpha.get();
    let mut jm = vec![0.0; m * m];
    for j in 0..m {
        jm[j * m + j] = 2.0 * j as f64 + a + 1.0;
        if j > 0 {
            let off = (j as f64 * (j as f64 + a)).sqrt();
            jm[j * m + j - 1] = off;
            jm[(j - 1) * m + j] = off;
        }
    }
    let eig = jacobi_eigen(&jm, m, false)?;
    let mut nodes = eig.values;
    for x in nodes.iter_mut() {
        for _ in 0..NEWTON_STEPS {
            let (l, lm1) = laguerre_pair_scaled(m, a, *x);
            let dl = (m as f64 * l - (m as f64 + a) * lm1) / *x;
            if dl == 0.0 {
                break;
            }
            let step = l / dl;
            let nx = *x - step;
            if !(nx > 0.0) {
                break;
            }
            *x = nx;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
                break;
            }
        }
    }
    nodes.sort_by(f64::total_cmp);
    let weights = nodes.iter().map(|&x| christoffel_weight(m, a, x)).collect();
    Ok(QuadratureRule { alpha, nodes, weights })
}

/// `L_m^{(α)}(x)` by forward three-term recurrence.
pub fn laguerre_eval(m: usize, alpha: Alpha, x: f64) -> f64 {
    laguerre_all(m, alpha.get(), x)[m]
}

/// `[L_0(x), …, L_m(x)]`.
fn laguerre_all(m: usize, alpha: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(m + 1);
    out.push(1.0);
    if m >= 1 {
        out.push(1.0 + alpha - x);
    }
    for k in 1..m {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// `p = Σ_{ν=1}^{n} a_ν L_ν^{(α)}`; `coeffs[ν−1] = a_ν`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaguerreExpansion {
    pub alpha: Alpha,
    pub coeffs: Vec<f64>,
}

impl LaguerreExpansion {
    pub fn new(alpha: Alpha, coeffs: Vec<f64>) -> Self {
        LaguerreExpansion { alpha, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `‖p‖²` from orthogonality: `Σ a_ν² β_{ν+1}²`.
    pub fn parseval_norm_sq(&self) -> f64 {
        let table = BetaTable::new(self.degree() + 1, self.alpha).expect("table size >= 1");
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| a * a * table.log_beta_sq(i + 2).exp())
            .sum()
    }

    /// CSV with header `nu,coefficient`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["nu", "coefficient"])?;
        for (i, a) in self.coeffs.iter().enumerate() {
            w.write_record([(i + 1).to_string(), fmt17(*a)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `p(x)`, or `p′(x) = −Σ a_ν L_{ν−1}^{(α+1)}(x)` when `derivative` is set.
pub fn expansion_eval(p: &LaguerreExpansion, x: f64, derivative: bool) -> f64 {
    let n = p.degree();
    if n == 0 {
        return 0.0;
    }
    let a = p.alpha.get();
    if derivative {
        let l = laguerre_all(n - 1, a + 1.0, x);
        -p.coeffs.iter().zip(&l).map(|(c, v)| c * v).sum::<f64>()
    } else {
        let l = laguerre_all(n, a, x);
        p.coeffs.iter().zip(&l[1..]).map(|(c, v)| c * v).sum()
    }
}

/// `‖p′‖² / ‖p‖²` by an `rule_size`-point Gauss–Laguerre rule; `None` uses
/// `n + 2` points.
pub fn rayleigh_quotient(p: &LaguerreExpansion, rule_size: Option<usize>) -> Result<f64> {
    let n = p.degree();
    let m = rule_size.unwrap_or(n + 2);
    if m < n + 1 {
        return Err(Error::InvalidArgument(format!("rule size {m} below n+1 = {}", n + 1)));
    }
    if p.coeffs.iter().all(|&c| c == 0.0) {
        return Err(Error::ZeroPolynomial);
    }
    let rule = gauss_laguerre(m, p.alpha)?;
    let num = rule.integrate(|x| expansion_eval(p, x, true).powi(2));
    let den = rule.integrate(|x| expansion_eval(p, x, false).powi(2));
    if !(den > 0.0) {
        return Err(Error::ZeroPolynomial);
    }
    Ok(num / den)
}

/// `a_ν = t_ν / β_{ν+1}`, with `t` the dominant unit eigenvector of `A_n`.
pub fn extremal_from_eigenvector(result: &SpectralResult, alpha: Alpha) -> LaguerreExpansion {
    let n = result.eigenvector.len();
    let table = BetaTable::new(n + 1, alpha).expect("table size >= 1");
    let coeffs = result
        .eigenvector
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            if t == 0.0 {
                0.0
            } else {
                t.signum() * (t.abs().ln() - 0.5 * table.log_beta_sq(i + 2)).exp()
            }
        })
        .collect();
    LaguerreExpansion { alpha, coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::gamma;
    use crate::spectral::{solve, DEFAULT_TOL};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn alpha(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    const ALPHAS: [f64; 8] = [-0.9, -0.5, 0.0, 0.5, 1.0, 2.0, 10.0, 50.0];

    #[test]
    fn rule_examples() {
        let r = gauss_laguerre(1, alpha(0.0)).unwrap();
        assert!((r.nodes[0] - 1.0).abs() < 1e-15 && (r.weights[0] - 1.0).abs() < 1e-15);

        let r = gauss_laguerre(2, alpha(0.0)).unwrap();
        assert!((r.nodes[0] - (2.0 - SQRT2)).abs() < 1e-14);
        assert!((r.nodes[1] - (2.0 + SQRT2)).abs() < 1e-14);
        assert!((r.weights[0] - (2.0 + SQRT2) / 4.0).abs() < 1e-14);
        assert!((r.weights[1] - (2.0 - SQRT2) / 4.0).abs() < 1e-14);

        for m in [1, 5, 40, 150] {
            let r = gauss_laguerre(m, alpha(1.0)).unwrap();
            assert!(rel(r.weights.iter().sum(), 1.0) < 1e-10, "m={m}");
        }
        assert!(gauss_laguerre(0, alpha(0.0)).is_err());
        assert!(gauss_laguerre(301, alpha(0.0)).is_err());
    }

    #[test]
    fn zeroth_moment_and_positivity() {
        for &a in &ALPHAS {
            for m in [1, 2, 7, 30, 100] {
                let r = gauss_laguerre(m, alpha(a)).unwrap();
                assert!(rel(r.weights.iter().sum(), gamma(a + 1.0)) < 1e-10, "a={a} m={m}");
                assert!(r.weights.iter().all(|&w| w > 0.0));
                assert!(r.nodes.iter().all(|&x| x > 0.0));
                assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn full_size_rule_is_sane() {
        let r = gauss_laguerre(MAX_RULE_SIZE, alpha(2.0)).unwrap();
        assert!(rel(r.weights.iter().sum(), 2.0) < 1e-10);
        assert!(r.weights.iter().all(|&w| w >= 0.0));
    }

    #[test]
    fn monomial_exactness() {
        for &a in &ALPHAS {
            for m in [1, 3, 8, 15] {
                let r = gauss_laguerre(m, alpha(a)).unwrap();
                for d in 0..2 * m {
                    let got = r.integrate(|x| x.powi(d as i32));
                    let want = (ln_gamma(a + d as f64 + 1.0)).exp();
                    assert!(rel(got, want) < 1e-9, "a={a} m={m} d={d} {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn laguerre_examples() {
        assert_eq!(laguerre_eval(0, alpha(3.0), 7.0), 1.0);
        assert_eq!(laguerre_eval(1, alpha(0.0), 1.0), 0.0);
        assert_eq!(laguerre_eval(2, alpha(0.0), 0.0), 1.0);
        // L_2^{(α)}(x) = x²/2 − (α+2)x + (α+1)(α+2)/2
        let (a, x) = (1.5, 2.25);
        let want = x * x / 2.0 - (a + 2.0) * x + (a + 1.0) * (a + 2.0) / 2.0;
        assert!((laguerre_eval(2, alpha(a), x) - want).abs() < 1e-14);
        // L_m^{(α)}(0) = Γ(m+α+1)/(Γ(m+1)Γ(α+1))
        let want = gamma(6.0 + 1.5) / (gamma(6.0) * gamma(2.5));
        assert!(rel(laguerre_eval(5, alpha(1.5), 0.0), want) < 1e-13);
    }

    #[test]
    fn raising_alpha_sums_lower_order() {
        for a in [-0.5, 0.0, 2.0] {
            for x in [0.5, 1.0, 3.0] {
                let lhs = laguerre_eval(2, alpha(a + 1.0), x);
                let rhs: f64 = (0..=2).map(|k| laguerre_eval(k, alpha(a), x)).sum();
                assert!((lhs - rhs).abs() < 1e-13, "a={a} x={x}");
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = LaguerreExpansion::new(alpha(0.7), vec![0.3, -1.2, 0.5, 2.0]);
        for x in [0.4, 1.7, 6.0] {
            let h = 1e-5;
            let fd = (expansion_eval(&p, x + h, false) - expansion_eval(&p, x - h, false)) / (2.0 * h);
            assert!((expansion_eval(&p, x, true) - fd).abs() < 1e-7, "x={x}");
        }
    }

    #[test]
    fn expansion_examples() {
        let p = LaguerreExpansion::new(alpha(2.0), vec![1.0]);
        for x in [0.1, 1.0, 9.0] {
            assert_eq!(expansion_eval(&p, x, true), -1.0);
        }
        let z = LaguerreExpansion::new(alpha(2.0), vec![0.0; 4]);
        assert_eq!(expansion_eval(&z, 1.3, false), 0.0);
        assert_eq!(rayleigh_quotient(&z, None), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn orthogonality_oracle() {
        for &a in &ALPHAS {
            let r = gauss_laguerre(12, alpha(a)).unwrap();
            let table = BetaTable::new(11, alpha(a)).unwrap();
            for m in 0..=10 {
                for mp in 0..=10 {
                    let q = r.integrate(|x| laguerre_eval(m, alpha(a), x) * laguerre_eval(mp, alpha(a), x));
                    if m == mp {
                        let want = table.log_beta_sq(m + 1).exp();
                        assert!(rel(q, want) < 1e-9, "a={a} m={m}");
                    } else {
                        let scale = (table.log_beta_sq(m + 1) + table.log_beta_sq(mp + 1)).exp().sqrt();
                        assert!(q.abs() <= 1e-9 * scale.max(1.0), "a={a} m={m} m'={mp} q={q}");
                    }
                }
            }
        }
    }

    #[test]
    fn rayleigh_of_first_polynomial() {
        for &a in &ALPHAS {
            let p = LaguerreExpansion::new(alpha(a), vec![1.0]);
            assert!(
                rel(rayleigh_quotient(&p, None).unwrap(), 1.0 / (a + 1.0)) < 1e-12,
                "a={a}"
            );
        }
        let p = LaguerreExpansion::new(alpha(0.0), vec![1.0, 1.0]);
        assert!(rayleigh_quotient(&p, Some(2)).is_err());
    }

    #[test]
    fn extremal_examples() {
        let res = solve(1, alpha(3.0), DEFAULT_TOL).unwrap();
        let p = extremal_from_eigenvector(&res, alpha(3.0));
        assert!(rel(p.coeffs[0], 1.0 / gamma(5.0).sqrt()) < 1e-14);

        let res = solve(2, alpha(0.0), DEFAULT_TOL).unwrap();
        let p = extremal_from_eigenvector(&res, alpha(0.0));
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(rel(p.coeffs[1] / p.coeffs[0], golden) < 1e-10);
        let q = rayleigh_quotient(&p, None).unwrap();
        assert!(rel(q, (3.0 + 5f64.sqrt()) / 2.0) < 1e-10);

        let res = solve(5, alpha(3.0), DEFAULT_TOL).unwrap();
        let p = extremal_from_eigenvector(&res, alpha(3.0));
        assert!((p.parseval_norm_sq() - 1.0).abs() < 1e-10);
        let r = gauss_laguerre(7, alpha(3.0)).unwrap();
        let quad = r.integrate(|x| expansion_eval(&p, x, false).powi(2));
        assert!((quad - 1.0).abs() < 1e-10);
    }

    #[test]
    fn end_to_end_oracle() {
        for a in [-0.5, 0.0, 1.0, 2.0, 10.0] {
            for n in [1, 2, 3, 7, 15, 30, 50] {
                let res = solve(n, alpha(a), DEFAULT_TOL).unwrap();
                let p = extremal_from_eigenvector(&res, alpha(a));
                let q = rayleigh_quotient(&p, None).unwrap();
                assert!(rel(q, res.mu_max) < 1e-8, "a={a} n={n} q={q} mu={}", res.mu_max);
            }
        }
    }

    #[test]
    fn random_expansions_are_suboptimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for a in [-0.5, 0.0, 2.0] {
            let mu = solve(10, alpha(a), DEFAULT_TOL).unwrap().mu_max;
            for _ in 0..100 {
                let coeffs: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let q = rayleigh_quotient(&LaguerreExpansion::new(alpha(a), coeffs), None).unwrap();
                assert!(q <= mu + 1e-8, "a={a} q={q} mu={mu}");
            }
        }
    }

    #[test]
    fn csv_dump() {
        let p = LaguerreExpansion::new(alpha(0.0), vec![1.0, -0.5]);
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "nu,coefficient\n1,1.0000000000000000e0\n2,-5.0000000000000000e-1\n"
        );
    }

    proptest! {
        #[test]
        fn parseval_matches_quadrature(a in -0.95f64..20.0, coeffs in prop::collection::vec(-2.0f64..2.0, 1..12)) {
            let p = LaguerreExpansion::new(alpha(a), coeffs);
            let r = gauss_laguerre(p.degree() + 2, alpha(a)).unwrap();
            let quad = r.integrate(|x| expansion_eval(&p, x, false).powi(2));
            let pars = p.parseval_norm_sq();
            prop_assert!((quad - pars).abs() <= 1e-9 * pars.max(1e-300));
        }
    }
}
