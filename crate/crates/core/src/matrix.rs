//! The triangular factor `C_n` and the Markov matrix `A_n = C_nᵀ C_n`.
//!
//! Writing the extremal polynomial as `Σ a_ν L_ν^{(α)}` with
//! `t_ν = a_ν β_{ν+1}` turns `‖p′‖²` into `‖C_n t‖²`, where `C_n` is upper
//! triangular with entries `β_i/β_{k+1}` (`i ≤ k`). `A_n` has the closed
//! form
//!
//! ```text
//! a_{k,k} = k/(α+1),   a_{k,i} = (β_{i+1}/β_{k+1}) · a_{i,i}   (i < k)
//! ```
//!
//! which is what [`MarkovMatrix::build`] uses; the explicit product is kept
//! as [`TriangularFactor::gram`] for cross-checking.

use std::io::Write;

use crate::error::{Error, Result};
use crate::gamma::{step_ratio, Alpha};
use crate::report::fmt17;

fn check_order(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!("matrix order must be >= 1, got {n}")));
    }
    Ok(())
}

/// Upper triangular `n × n` factor with entries `β_i/β_{k+1}`, `i ≤ k`.
#[derive(Debug, Clone)]
pub struct TriangularFactor {
    n: usize,
    alpha: Alpha,
    data: Vec<f64>,
}

impl TriangularFactor {
    pub fn build(n: usize, alpha: Alpha) -> Result<Self> {
        check_order(n)?;
        let a = alpha.get();
        let steps: Vec<f64> = (0..=n)
            .map(|nu| if nu == 0 { 0.0 } else { step_ratio(nu, a) })
            .collect();
        let mut data = vec![0.0; n * n];
        for i in 1..=n {
            let mut r = 1.0;
            for k in i..=n {
                r *= steps[k];
                data[(i - 1) * n + (k - 1)] = r;
            }
        }
        Ok(TriangularFactor { n, alpha, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    /// Entry `(i, k)`, 1-based; zero below the diagonal.
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.data[(i - 1) * self.n + (k - 1)]
    }

    /// Dense `C_nᵀ C_n`, row-major. O(n³); reference only.
    pub fn gram(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for r in 0..n {
            for c in r..n {
                let s: f64 = (0..=r).map(|m| self.data[m * n + r] * self.data[m * n + c]).sum();
                out[r * n + c] = s;
                out[c * n + r] = s;
            }
        }
        out
    }
}

/// Build `C_n`.
pub fn build_c_factor(n: usize, alpha: Alpha) -> Result<TriangularFactor> {
    TriangularFactor::build(n, alpha)
}

/// Dense symmetric Markov matrix `A_n`, row-major, immutable once built.
#[derive(Debug, Clone)]
pub struct MarkovMatrix {
    n: usize,
    alpha: Alpha,
    data: Vec<f64>,
}

impl MarkovMatrix {
    pub fn build(n: usize, alpha: Alpha) -> Result<Self> {
        check_order(n)?;
        let a = alpha.get();
        let steps: Vec<f64> = (0..=n)
            .map(|nu| if nu == 0 { 0.0 } else { step_ratio(nu, a) })
            .collect();
        let mut data = vec![0.0; n * n];
        for i in 1..=n {
            let diag = i as f64 / (a + 1.0);
            data[(i - 1) * n + (i - 1)] = diag;
            // running β_{i+1}/β_{k+1}
            let mut r = 1.0;
            for k in i + 1..=n {
                r *= steps[k];
                let v = r * diag;
                data[(i - 1) * n + (k - 1)] = v;
                data[(k - 1) * n + (i - 1)] = v;
            }
        }
        Ok(MarkovMatrix { n, alpha, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    /// Entry `a_{k,i}`, 1-based.
    pub fn get(&self, k: usize, i: usize) -> f64 {
        self.data[(k - 1) * self.n + (i - 1)]
    }

    /// Row `k` (0-based) as a slice.
    pub fn row(&self, k: usize) -> &[f64] {
        &self.data[k * self.n..(k + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_diagonal(&self) -> f64 {
        (0..self.n).map(|k| self.data[k * self.n + k]).fold(f64::MIN, f64::max)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|k| self.data[k * self.n + k]).sum()
    }

    /// Maximum row sum. Entries are all positive, so no absolute values.
    pub fn inf_norm(&self) -> f64 {
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Squared Frobenius norm `Σ a_{k,i}²`.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// `out = A x`.
    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.n)) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// CSV dump `row,col,value`, row-major, 1-based indices.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["row", "col", "value"])?;
        for k in 0..self.n {
            for i in 0..self.n {
                w.write_record([
                    (k + 1).to_string(),
                    (i + 1).to_string(),
                    fmt17(self.data[k * self.n + i]),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Build `A_n` from its closed form.
pub fn build_a(n: usize, alpha: Alpha) -> Result<MarkovMatrix> {
    MarkovMatrix::build(n, alpha)
}
