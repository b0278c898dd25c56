//! The Chebyshev Gram reduction of the interpolation-stability constant.
//!
//! For polynomials `p = sum_{i<N-1} b_i T_i` and the weight `w = (1-x^2)^alpha`,
//!
//! ```text
//! c_H(N; alpha) = -2 min_b (b' B b) / (b' A b),
//! A_pq = int T_p T_q w,   B_pq = int T_p T_q w T_2N,
//! ```
//!
//! and the hypothesis is `c_H < 1`. Every entry is an exact combination of
//! `int T_i T_j dx`, so no quadrature is involved. The minimum is the smallest
//! eigenvalue of `L^-1 B L^-T` with `A = L L'`.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// `int_{-1}^{1} T_k dx`.
pub fn chebyshev_integral(k: usize) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        let k = k as f64;
        -2.0 / (k * k - 1.0)
    }
}

/// Symmetric table of `int T_i T_j dx` for `i, j <= max_index`.
#[derive(Debug, Clone)]
pub struct ChebyshevTable {
    size: usize,
    data: Vec<f64>,
}

impl ChebyshevTable {
    pub fn max_index(&self) -> usize {
        self.size - 1
    }

    /// `int T_i T_j dx`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    /// `int T_p T_q (1-x^2)^alpha dx`.
    fn weighted(&self, alpha: u32, p: usize, q: usize) -> f64 {
        let c = |i: usize, j: usize| self.get(i, j);
        match alpha {
            0 => c(p, q),
            1 => 0.5 * c(p, q) - 0.25 * (c(p + 2, q) + c(p.abs_diff(2), q)),
            _ => {
                // (1-x^2) T_p = T_p / 2 - (T_{p+2} + T_{|p-2|}) / 4 on both factors
                let (pu, pd) = (p + 2, p.abs_diff(2));
                let (qu, qd) = (q + 2, q.abs_diff(2));
                0.25 * c(p, q) - 0.125 * (c(pu, q) + c(pd, q) + c(p, qu) + c(p, qd))
                    + 0.0625 * (c(pu, qu) + c(pd, qu) + c(pu, qd) + c(pd, qd))
            }
        }
    }
}

/// `int T_i T_j dx = (I_{i+j} + I_{|i-j|}) / 2` for `i, j <= max_index`.
pub fn cheb_integral_table(max_index: usize) -> ChebyshevTable {
    let size = max_index + 1;
    let mut data = vec![0.0; size * size];
    for i in 0..size {
        for j in 0..=i {
            let v = 0.5 * (chebyshev_integral(i + j) + chebyshev_integral(i - j));
            data[i * size + j] = v;
            data[j * size + i] = v;
        }
    }
    ChebyshevTable { size, data }
}

/// Table size sufficient for every `N <= n_max` and every weight.
pub fn table_size_for(n_max: usize) -> usize {
    2 * n_max + 2
}

/// `A` and `B` for one `(alpha, N)`, both `(N-1) x (N-1)`.
#[derive(Debug, Clone)]
pub struct ChebyshevGram {
    pub alpha: u32,
    pub n: usize,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

fn check_args(alpha: u32, n: usize) -> Result<()> {
    if alpha > 2 {
        return Err(Error::InvalidArgument(format!(
            "alpha must be 0, 1 or 2, got {alpha}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("N must be >= 2, got {n}")));
    }
    Ok(())
}

impl ChebyshevGram {
    pub fn assemble(alpha: u32, n: usize) -> Result<Self> {
        check_args(alpha, n)?;
        Self::assemble_with(&cheb_integral_table(table_size_for(n)), alpha, n)
    }

    /// Assembly against a shared table, which must cover `2N + 2`.
    pub fn assemble_with(table: &ChebyshevTable, alpha: u32, n: usize) -> Result<Self> {
        check_args(alpha, n)?;
        if table.max_index() < table_size_for(n) - 1 {
            return Err(Error::InvalidArgument(format!(
                "Chebyshev table up to index {} is too small for N={n}",
                table.max_index()
            )));
        }
        let dim = n - 1;
        let g = |p: usize, q: usize| table.weighted(alpha, p, q);
        let mut a = DMatrix::zeros(dim, dim);
        let mut b = DMatrix::zeros(dim, dim);
        for p in 0..dim {
            for q in 0..=p {
                let gpq = g(p, q);
                // T_2N = 2 T_N^2 - 1 and T_p T_N = (T_{p+N} + T_{|p-N|}) / 2
                let (pu, pd) = (p + n, p.abs_diff(n));
                let (qu, qd) = (q + n, q.abs_diff(n));
                let bpq = 0.5 * (g(pu, qu) + g(pd, qu) + g(pu, qd) + g(pd, qd)) - gpq;
                a[(p, q)] = gpq;
                a[(q, p)] = gpq;
                b[(p, q)] = bpq;
                b[(q, p)] = bpq;
            }
        }
        Ok(ChebyshevGram { alpha, n, a, b })
    }

    /// `-2 lambda_min(L^-1 B L^-T)`.
    pub fn c_h(&self) -> Result<f64> {
        let chol = Cholesky::new(self.a.clone()).ok_or(Error::Indefinite {
            alpha: self.alpha,
            n: self.n,
        })?;
        let l = chol.l();
        let x = l.solve_lower_triangular(&self.b).ok_or(Error::Indefinite {
            alpha: self.alpha,
            n: self.n,
        })?;
        let y = l
            .solve_lower_triangular(&x.transpose())
            .ok_or(Error::Indefinite {
                alpha: self.alpha,
                n: self.n,
            })?;
        let sym = (&y + y.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let lambda = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        Ok(-2.0 * lambda)
    }
}

/// `c_H(N; alpha)`.
pub fn c_h(alpha: u32, n: usize) -> Result<f64> {
    ChebyshevGram::assemble(alpha, n)?.c_h()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HypothesisRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub alpha: u32,
    pub c_h: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct HypothesisReport {
    pub rows: Vec<HypothesisRow>,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn first_failure(&self) -> Option<&HypothesisRow> {
        self.rows.iter().find(|r| !r.pass)
    }

    /// `N,alpha,c_H,pass`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,alpha,c_H,pass\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{:.16e},{}\n", r.n, r.alpha, r.c_h, r.pass));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// `c_H` for `N = 2..=n_max` and each `alpha`, ordered by `N` then by the
/// order of `alphas`. One Chebyshev table is shared by all cells.
pub fn verify_range(n_max: usize, alphas: &[u32]) -> Result<HypothesisReport> {
    check_args(alphas.iter().copied().max().unwrap_or(0), n_max.max(2))?;
    if n_max < 2 {
        return Ok(HypothesisReport::default());
    }
    let table = cheb_integral_table(table_size_for(n_max));
    let cells: Vec<(usize, u32)> = (2..=n_max)
        .flat_map(|n| alphas.iter().map(move |&a| (n, a)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(n, alpha)| {
            let c = ChebyshevGram::assemble_with(&table, alpha, n)?.c_h()?;
            Ok(HypothesisRow {
                n,
                alpha,
                c_h: c,
                pass: c < 1.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HypothesisReport { rows })
}
