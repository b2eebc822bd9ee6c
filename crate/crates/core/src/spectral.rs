//! Largest eigenvalue of `A_n` (hence `c_n(α)²`) and small dense spectra.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::Alpha;
use crate::matrix::MarkovMatrix;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const MIN_TOL: f64 = 1e-14;
pub const FULL_SPECTRUM_LIMIT: usize = 500;
const MAX_JACOBI_SWEEPS: usize = 100;

/// Default power-iteration budget, `200·n`.
pub fn default_max_iter(n: usize) -> usize {
    200 * n.max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralResult {
    pub mu_max: f64,
    /// Unit-norm dominant eigenvector; all components positive.
    pub eigenvector: Vec<f64>,
    /// `‖A v − μ v‖₂`.
    pub residual: f64,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Power iteration with Rayleigh-quotient estimate from the normalised
/// all-ones vector. Stops once `‖A v − μ v‖ ≤ tol · μ`.
pub fn mu_max_power(a: &MarkovMatrix, tol: f64, max_iter: usize) -> Result<SpectralResult> {
    if !(tol >= MIN_TOL) {
        return Err(Error::InvalidArgument(format!(
            "tol must be >= {MIN_TOL:e}, got {tol:e}"
        )));
    }
    let n = a.n();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut w = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for it in 0..=max_iter {
        a.mul_vec(&v, &mut w);
        let mu = dot(&v, &w);
        residual = w
            .iter()
            .zip(&v)
            .map(|(wi, vi)| (wi - mu * vi).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= tol * mu {
            return Ok(SpectralResult {
                mu_max: mu,
                eigenvector: v,
                residual,
                iterations: it,
            });
        }
        if it == max_iter {
            break;
        }
        let scale = 1.0 / norm(&w);
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi * scale;
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

/// Solve for the dominant pair of `A_n(α)` with default iteration budget.
pub fn solve(n: usize, alpha: Alpha, tol: f64) -> Result<SpectralResult> {
    let a = MarkovMatrix::build(n, alpha)?;
    mu_max_power(&a, tol, default_max_iter(n))
}

/// `c_n(α) = sqrt(μ_max(A_n))`.
pub fn markov_constant(n: usize, alpha: Alpha, tol: f64) -> Result<f64> {
    Ok(solve(n, alpha, tol)?.mu_max.sqrt())
}

/// Eigen-decomposition of a dense symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `j` (stored row-major, `vectors[r * n + j]`) is the unit
    /// eigenvector for `values[j]`. Empty when vectors were not requested.
    pub vectors: Vec<f64>,
}

/// Cyclic Jacobi rotations on a dense symmetric `n × n` row-major matrix.
pub fn jacobi_eigen(matrix: &[f64], n: usize, want_vectors: bool) -> Result<SymmetricEigen> {
    if matrix.len() != n * n {
        return Err(Error::InvalidArgument(format!(
            "expected {} entries, got {}",
            n * n,
            matrix.len()
        )));
    }
    let mut a = matrix.to_vec();
    let mut v = if want_vectors {
        let mut id = vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        id
    } else {
        Vec::new()
    };

    let mut converged = n <= 1;
    let mut off = 0.0;
    for sweep in 0..MAX_JACOBI_SWEEPS {
        off = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q].abs())
            .sum::<f64>();
        if off == 0.0 {
            converged = true;
            break;
        }
        let thresh = if sweep < 3 { 0.2 * off / (n * n) as f64 } else { 0.0 };
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                if apq.abs() <= thresh {
                    continue;
                }
                let h = aqq - app;
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let new_rp = arp - s * (arq + arp * tau);
                    let new_rq = arq + s * (arp - arq * tau);
                    a[r * n + p] = new_rp;
                    a[p * n + r] = new_rp;
                    a[r * n + q] = new_rq;
                    a[q * n + r] = new_rq;
                }
                if want_vectors {
                    for r in 0..n {
                        let vrp = v[r * n + p];
                        let vrq = v[r * n + q];
                        v[r * n + p] = vrp - s * (vrq + vrp * tau);
                        v[r * n + q] = vrq + s * (vrp - vrq * tau);
                    }
                }
            }
        }
    }
    if !converged {
        return Err(Error::JacobiNoConvergence {
            sweeps: MAX_JACOBI_SWEEPS,
            off,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = if want_vectors {
        let mut sorted = vec![0.0; n * n];
        for (j, &src) in order.iter().enumerate() {
            for r in 0..n {
                sorted[r * n + j] = v[r * n + src];
            }
        }
        sorted
    } else {
        Vec::new()
    };
    Ok(SymmetricEigen { values, vectors })
}

/// All eigenvalues of `A_n`, ascending. Limited to `n ≤ 500`.
pub fn full_spectrum(a: &MarkovMatrix) -> Result<Vec<f64>> {
    if a.n() > FULL_SPECTRUM_LIMIT {
        return Err(Error::SizeGuard {
            n: a.n(),
            limit: FULL_SPECTRUM_LIMIT,
        });
    }
    Ok(jacobi_eigen(a.as_slice(), a.n(), false)?.values)
}
