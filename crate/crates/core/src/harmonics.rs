//! Normalized associated Legendre functions and spherical harmonics.
//!
//! `Q_n^m(theta) = sqrt((2n+1)/2 (n-m)!/(n+m)!) P_n^|m|(cos theta)` with the
//! Condon-Shortley phase inside `P_n^m`, so that
//! `int_0^pi Q_n^m Q_n'^m sin(theta) dtheta = delta_{n n'}`, and
//! `Y_n^m = (-1)^((m+|m|)/2) Q_n^m(theta) e^{i m phi} / sqrt(2 pi)`.
//!
//! Values come from the fully normalized upward recurrence in `n`, seeded by
//! the sectoral terms. `sin(theta)` and `cos(theta)` enter separately, never
//! through `sqrt(1 - x^2)`, which keeps the poles accurate and makes negative
//! `theta` behave as the parametrization requires.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Degree/order pair with `|m| <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HarmonicIndex {
    n: u32,
    m: i32,
}

impl HarmonicIndex {
    pub fn new(n: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > n {
            return Err(Error::InvalidArgument(format!(
                "harmonic order |m|={} exceeds degree n={n}",
                m.unsigned_abs()
            )));
        }
        Ok(HarmonicIndex { n, m })
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> i32 {
        self.m
    }

    /// All indices with degree `<= max_degree`, ordered by `n` then `m`.
    pub fn up_to(max_degree: u32) -> impl Iterator<Item = HarmonicIndex> {
        (0..=max_degree).flat_map(|n| (-(n as i32)..=n as i32).map(move |m| HarmonicIndex { n, m }))
    }
}

/// `Q_{|m|}^{|m|}, ..., Q_{n_max}^{|m|}` at `theta`.
pub fn legendre_q_column(m: u32, n_max: u32, theta: f64) -> Vec<f64> {
    if m > n_max {
        return Vec::new();
    }
    let (s, c) = theta.sin_cos();
    let mut qmm = std::f64::consts::FRAC_1_SQRT_2;
    for k in 1..=m {
        let k = k as f64;
        qmm *= -((2.0 * k + 1.0) / (2.0 * k)).sqrt() * s;
    }
    let mut out = Vec::with_capacity((n_max - m + 1) as usize);
    out.push(qmm);
    if n_max == m {
        return out;
    }
    let mf = m as f64;
    let mut prev = qmm;
    let mut cur = (2.0 * mf + 3.0).sqrt() * c * qmm;
    out.push(cur);
    for n in (m + 2)..=n_max {
        let nf = n as f64;
        let a = ((4.0 * nf * nf - 1.0) / (nf * nf - mf * mf)).sqrt();
        let b = (((nf - 1.0).powi(2) - mf * mf) / (4.0 * (nf - 1.0).powi(2) - 1.0)).sqrt();
        let next = a * (c * cur - b * prev);
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// `Q_n^m(theta)`; `Q_n^{-m} = Q_n^m`.
pub fn legendre_q(n: u32, m: i32, theta: f64) -> Result<f64> {
    let idx = HarmonicIndex::new(n, m)?;
    let am = idx.m.unsigned_abs();
    Ok(*legendre_q_column(am, n, theta).last().unwrap())
}

/// `Y_n^m(theta, phi)`.
pub fn spherical_harmonic(n: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    let q = legendre_q(n, m, theta)?;
    Ok(harmonic_from_q(m, q, phi))
}

fn harmonic_from_q(m: i32, q: f64, phi: f64) -> Complex64 {
    let sign = if m > 0 && m % 2 == 1 { -1.0 } else { 1.0 };
    Complex64::from_polar(sign * q / (2.0 * PI).sqrt(), m as f64 * phi)
}

/// `sum c_i Y_i` for a set of harmonic coefficients.
pub fn eval_combination(terms: &[(HarmonicIndex, Complex64)], theta: f64, phi: f64) -> Complex64 {
    terms
        .iter()
        .map(|(idx, c)| {
            let q = *legendre_q_column(idx.m.unsigned_abs(), idx.n, theta)
                .last()
                .unwrap();
            c * harmonic_from_q(idx.m, q, phi)
        })
        .sum()
}

/// Analytic `d/dtheta` of `Y_n^m`, via central recurrences on `Q`.
///
/// Uses `dQ_n^m/dtheta = (n cos Q_n^m - sqrt((n^2-m^2)(2n+1)/(2n-1)) Q_{n-1}^m) / sin`
/// away from the poles; at the poles falls back to a symmetric difference.
pub fn spherical_harmonic_d_theta(n: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    let idx = HarmonicIndex::new(n, m)?;
    let am = idx.m.unsigned_abs();
    let (s, c) = theta.sin_cos();
    let dq = if s.abs() < 1e-6 {
        let h = 1e-5;
        (legendre_q(n, m, theta + h)? - legendre_q(n, m, theta - h)?) / (2.0 * h)
    } else {
        let col = legendre_q_column(am, n, theta);
        let q = col[col.len() - 1];
        let q_prev = if n > am { col[col.len() - 2] } else { 0.0 };
        let nf = n as f64;
        let mf = am as f64;
        let k = if n > am {
            ((nf * nf - mf * mf) * (2.0 * nf + 1.0) / (2.0 * nf - 1.0)).sqrt()
        } else {
            0.0
        };
        (nf * c * q - k * q_prev) / s
    };
    Ok(harmonic_from_q(m, dq, phi))
}
