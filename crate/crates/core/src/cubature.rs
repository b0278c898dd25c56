//! Filon-type cubature for `int_S F(x) exp(i kappa x_3) dS`.
//!
//! Only the zonal (`phi`-independent) part of the interpolant survives the
//! azimuthal integral, so the rule needs the row means of the samples, one
//! DCT-I and the Chebyshev moments
//!
//! ```text
//! omega_l(kappa) = 2 pi int_{-1}^{1} T_l(x) exp(i kappa x) dx.
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sphere_grid::{sample, SphericalSamples, TestFunction};
use crate::transforms::dct1;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Extra unknowns carried past the requested degree in the backward sweep.
const TAIL: usize = 64;

/// `omega_l(kappa)` for `l = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    pub kappa: f64,
    pub omega: Vec<Complex64>,
}

/// Value of the cubature rule for one `(N, kappa)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubatureResult {
    #[serde(serialize_with = "serialize_complex")]
    pub value: Complex64,
    #[serde(rename = "N")]
    pub n: usize,
    pub kappa: f64,
}

fn serialize_complex<S: serde::Serializer>(
    z: &Complex64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// `int_{-1}^{1} T_l(x) exp(i kappa x) dx` for `l = 0..=l_max`.
///
/// Forward three-term recurrence while `l <= |kappa|`, where it is neutrally
/// stable; beyond that the moments are the minimal-growth solution and come
/// from a diagonally dominant tridiagonal solve closed by the large-`l`
/// asymptotics.
pub fn chebyshev_moments(kappa: f64, l_max: usize) -> Vec<Complex64> {
    if kappa < 0.0 {
        return chebyshev_moments(-kappa, l_max)
            .into_iter()
            .map(|z| z.conj())
            .collect();
    }
    if kappa == 0.0 {
        return (0..=l_max)
            .map(|l| {
                if l % 2 == 1 {
                    Complex64::default()
                } else {
                    let l = l as f64;
                    Complex64::new(-2.0 / (l * l - 1.0), 0.0)
                }
            })
            .collect();
    }

    let (s, c) = kappa.sin_cos();
    let edge = |l: usize| -> Complex64 {
        // exp(i kappa) - (-1)^l exp(-i kappa)
        if l.is_multiple_of(2) {
            Complex64::new(0.0, 2.0 * s)
        } else {
            Complex64::new(2.0 * c, 0.0)
        }
    };
    // coefficients of a_l M_{l-1} + 2 M_l + c_l M_{l+1} = r_l, valid for l >= 2
    let lower = |l: usize| -I * (kappa / (l as f64 - 1.0));
    let upper = |l: usize| I * (kappa / (l as f64 + 1.0));
    let rhs = |l: usize| edge(l + 1) / (l as f64 + 1.0) - edge(l - 1) / (l as f64 - 1.0);

    let mut m = vec![Complex64::default(); l_max + 1];
    m[0] = Complex64::new(2.0 * s / kappa, 0.0);
    if l_max == 0 {
        return m;
    }
    m[1] = Complex64::new(0.0, moment_one(kappa));
    if l_max == 1 {
        return m;
    }

    let forward_end = (kappa.floor() as usize).min(l_max);
    if forward_end >= 2 {
        // l = 1 relation: M_1 = (E_2 - i kappa M_2) / 4
        m[2] = (edge(2) - 4.0 * m[1]) / (I * kappa);
        for l in 2..forward_end {
            m[l + 1] = (rhs(l) - 2.0 * m[l] - lower(l) * m[l - 1]) / upper(l);
        }
    }

    let start = forward_end.max(1) + 1;
    if start > l_max {
        return m;
    }
    let end = l_max.max(2 * kappa.ceil() as usize) + TAIL;
    let lf = (end + 1) as f64;
    let sign = if (end + 1).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    let closing = -(Complex64::from_polar(1.0, kappa) + sign * Complex64::from_polar(1.0, -kappa))
        / (lf * lf);

    // Thomas algorithm on rows start..=end
    let len = end - start + 1;
    let mut cp = vec![Complex64::default(); len];
    let mut dp = vec![Complex64::default(); len];
    for i in 0..len {
        let l = start + i;
        let mut r = rhs(l);
        if i == 0 {
            r -= lower(l) * m[start - 1];
        }
        if i == len - 1 {
            r -= upper(l) * closing;
        }
        let (denom, r) = if i == 0 {
            (Complex64::new(2.0, 0.0), r)
        } else {
            let a = lower(l);
            (2.0 - a * cp[i - 1], r - a * dp[i - 1])
        };
        cp[i] = upper(l) / denom;
        dp[i] = r / denom;
    }
    let mut x = dp[len - 1];
    let mut tail = vec![Complex64::default(); len];
    tail[len - 1] = x;
    for i in (0..len - 1).rev() {
        x = dp[i] - cp[i] * x;
        tail[i] = x;
    }
    m[start..=l_max].copy_from_slice(&tail[..=l_max - start]);
    m
}

/// `Im M_1 = 2 (sin k - k cos k) / k^2`, by series near zero.
fn moment_one(kappa: f64) -> f64 {
    if kappa.abs() < 1.0 {
        // sum_{n>=1} (-1)^{n+1} 2n k^{2n-1} / (2n+1)!, doubled
        let k2 = kappa * kappa;
        let mut term = kappa / 3.0; // n = 1: 2 k / 3! = k / 3
        let mut sum = term;
        for n in 2..30 {
            let nf = n as f64;
            // ratio of consecutive terms
            term *= -k2 * nf / ((nf - 1.0) * (2.0 * nf) * (2.0 * nf + 1.0));
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        2.0 * sum
    } else {
        let (s, c) = kappa.sin_cos();
        2.0 * (s - kappa * c) / (kappa * kappa)
    }
}

/// `omega_l(kappa) = 2 pi int T_l exp(i kappa x)` for `l = 0..=N`.
pub fn moments(kappa: f64, n: usize) -> MomentVector {
    let omega = chebyshev_moments(kappa, n)
        .into_iter()
        .map(|z| 2.0 * PI * z)
        .collect();
    MomentVector { kappa, omega }
}

/// Row means `f_{j,0}` and their DCT-I.
fn zonal_coefficients(samples: &SphericalSamples) -> Result<Vec<Complex64>> {
    let n = samples.order();
    let means: Vec<Complex64> = (0..=n)
        .map(|j| samples.row(j).iter().sum::<Complex64>() / (2 * n) as f64)
        .collect();
    dct1(&means, n)
}

fn apply_weights(alpha: &[Complex64], omega: &[Complex64]) -> Complex64 {
    let n = alpha.len() - 1;
    let mut acc: Complex64 = (1..n).map(|l| alpha[l] * omega[l]).sum();
    acc += 0.5 * (alpha[0] * omega[0] + alpha[n] * omega[n]);
    acc * (2.0 / n as f64)
}

fn checked(value: Complex64, samples: &SphericalSamples, kappa: f64) -> Result<CubatureResult> {
    let bound = 10.0 * 4.0 * PI * samples.max_abs();
    if value.norm().is_nan() || value.norm() > bound {
        return Err(Error::BoundExceeded {
            value: value.norm(),
            bound,
        });
    }
    Ok(CubatureResult {
        value,
        n: samples.order(),
        kappa,
    })
}

/// `I_{N,kappa} F = int_S (Q_N F)(x) exp(i kappa x_3) dS`.
pub fn integrate(samples: &SphericalSamples, kappa: f64) -> Result<CubatureResult> {
    if !kappa.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "wavenumber must be finite, got {kappa}"
        )));
    }
    let alpha = zonal_coefficients(samples)?;
    let omega = moments(kappa, samples.order()).omega;
    checked(apply_weights(&alpha, &omega), samples, kappa)
}

/// Absolute cubature errors against a high-order self reference.
#[derive(Debug, Clone, Serialize)]
pub struct RateTable {
    pub function: String,
    #[serde(rename = "N")]
    pub ns: Vec<usize>,
    pub kappas: Vec<f64>,
    /// `errors[i][j]` for `ns[i]`, `kappas[j]`.
    pub errors: Vec<Vec<f64>>,
    pub n_ref: usize,
}

impl RateTable {
    pub fn error(&self, n: usize, kappa: f64) -> Option<f64> {
        let i = self.ns.iter().position(|&v| v == n)?;
        let j = self.kappas.iter().position(|&v| v == kappa)?;
        Some(self.errors[i][j])
    }

    /// First row `N,kappa_1,...`, then one row per `N`; scientific notation.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N");
        for k in &self.kappas {
            out.push_str(&format!(",{k:e}"));
        }
        out.push('\n');
        for (n, row) in self.ns.iter().zip(&self.errors) {
            out.push_str(&n.to_string());
            for e in row {
                out.push_str(&format!(",{e:.3e}"));
            }
            out.push('\n');
        }
        out
    }
}

/// `|I_kappa F - I_{N,kappa} F|` for every `(N, kappa)`, with the reference
/// taken as the rule at `4 * max(ns)`.
pub fn rate_table(f: &TestFunction, ns: &[usize], kappas: &[f64]) -> Result<RateTable> {
    let n_max = *ns
        .iter()
        .max()
        .ok_or_else(|| Error::InvalidArgument("empty N list".into()))?;
    if let Some(k) = kappas.iter().find(|k| !k.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "wavenumber must be finite, got {k}"
        )));
    }
    let n_ref = 4 * n_max;
    let reference_samples = sample(f, n_ref)?;
    let reference_alpha = zonal_coefficients(&reference_samples)?;
    let reference: Vec<Complex64> = kappas
        .par_iter()
        .map(|&k| apply_weights(&reference_alpha, &moments(k, n_ref).omega))
        .collect();

    let errors = ns
        .par_iter()
        .map(|&n| {
            let samples = sample(f, n)?;
            let alpha = zonal_coefficients(&samples)?;
            kappas
                .iter()
                .zip(&reference)
                .map(|(&k, r)| {
                    let v = checked(apply_weights(&alpha, &moments(k, n).omega), &samples, k)?;
                    Ok((v.value - r).norm())
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateTable {
        function: f.name().to_string(),
        ns: ns.to_vec(),
        kappas: kappas.to_vec(),
        errors,
        n_ref,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere_grid::builtin;

    #[test]
    fn zero_wavenumber_moments() {
        let w = moments(0.0, 9).omega;
        assert!((w[0].re - 4.0 * PI).abs() < 1e-14);
        assert!((w[2].re + 4.0 * PI / 3.0).abs() < 1e-14);
        for l in (1..=9).step_by(2) {
            assert_eq!(w[l], Complex64::default());
        }
    }

    #[test]
    fn first_two_moments() {
        let (x, w) = crate::quadrature::gauss_legendre(40);
        for k in [1e-9, 1e-3, 0.4, 0.99, 1.0, 3.0] {
            let m = chebyshev_moments(k, 1);
            assert!((m[0].re - 2.0 * k.sin() / k).abs() < 1e-15);
            // int x exp(i k x) = i int x sin(k x)
            let im: f64 = x.iter().zip(&w).map(|(x, w)| w * x * (k * x).sin()).sum();
            assert!(
                (m[1].im - im).abs() < 1e-15 * im.abs().max(1e-300) + 1e-16,
                "k={k}"
            );
        }
        for k in [250.0f64, 1e6] {
            let closed = 2.0 * (k.sin() - k * k.cos()) / (k * k);
            assert!((chebyshev_moments(k, 1)[1].im - closed).abs() < 1e-15);
        }
    }

    #[test]
    fn parity_structure() {
        for k in [0.5, 10.0, 1e3] {
            for (l, z) in chebyshev_moments(k, 40).iter().enumerate() {
                if l.is_multiple_of(2) {
                    assert!(z.im.abs() < 1e-15, "l={l}");
                } else {
                    assert!(z.re.abs() < 1e-15, "l={l}");
                }
            }
        }
    }

    #[test]
    fn negative_wavenumber_conjugates() {
        let a = chebyshev_moments(7.3, 30);
        let b = chebyshev_moments(-7.3, 30);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(*x, y.conj());
        }
    }

    #[test]
    fn prefix_independent_of_length() {
        let short = chebyshev_moments(12.5, 20);
        let long = chebyshev_moments(12.5, 300);
        for (a, b) in short.iter().zip(&long) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn constant_function() {
        let one = builtin("one").unwrap();
        for n in [2, 3, 8] {
            let s = sample(&one, n).unwrap();
            for k in [0.0, 1e-7, 0.3, 1.0, 10.0, 1e3, 1e6] {
                let v = integrate(&s, k).unwrap().value;
                let exact = if k == 0.0 {
                    4.0 * PI
                } else {
                    4.0 * PI * k.sin() / k
                };
                assert!((v - exact).norm() < 1e-12, "N={n} k={k}: {v}");
            }
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let f = builtin("F1").unwrap();
        let s = sample(&f, 8).unwrap();
        let cs = s.conj();
        for k in [0.7, 25.0] {
            let a = integrate(&s, -k).unwrap().value;
            let b = integrate(&cs, k).unwrap().value.conj();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_finite_wavenumber() {
        let s = sample(&builtin("one").unwrap(), 4).unwrap();
        assert!(integrate(&s, f64::NAN).is_err());
    }

    #[test]
    fn csv_layout() {
        let t = RateTable {
            function: "F1".into(),
            ns: vec![8, 16],
            kappas: vec![1.0, 1000.0],
            errors: vec![vec![1e-6, 2e-8], vec![3e-12, 4e-14]],
            n_ref: 64,
        };
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "N,1e0,1e3");
        assert_eq!(lines[1], "8,1.000e-6,2.000e-8");
        assert_eq!(t.error(16, 1000.0), Some(4e-14));
    }
}
