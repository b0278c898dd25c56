//! Independent reference computations shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spherefft_core::quadrature::{composite_gauss_legendre, gauss_legendre};
use spherefft_core::{InterpolantCoefficients, SphericalSamples};

pub fn random_samples(n: usize, seed: u64) -> SphericalSamples {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cols = 2 * n;
    let mut v: Vec<Complex64> = (0..(n + 1) * cols)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let (north, south) = (v[0], v[n * cols]);
    v[..cols].fill(north);
    v[n * cols..].fill(south);
    SphericalSamples::from_values(n, v).unwrap()
}

pub fn random_vector(len: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

pub fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn rel_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let d = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    d / max_abs(b).max(f64::MIN_POSITIVE)
}

/// `int_{-1}^{1} T_l(x) exp(i kappa x) dx` by composite Gauss-Legendre in
/// `t` after `x = cos t`; suitable for moderate `kappa`.
pub fn moments_by_quadrature(kappa: f64, l_max: usize) -> Vec<Complex64> {
    let panels = 8 + ((kappa.abs() + l_max as f64) / 2.0).ceil() as usize;
    let (t, w) = composite_gauss_legendre(0.0, PI, panels, 24);
    let mut out = vec![Complex64::default(); l_max + 1];
    for (ti, wi) in t.iter().zip(&w) {
        let (s, c) = ti.sin_cos();
        let e = Complex64::from_polar(wi * s, kappa * c);
        for (l, slot) in out.iter_mut().enumerate() {
            *slot += e * (l as f64 * ti).cos();
        }
    }
    out
}

/// The same moments by repeated integration by parts, which terminates for
/// polynomials; `T_l^(n)(1) = prod_{k<n} (l^2 - k^2)/(2k+1)` and
/// `T_l^(n)(-1) = (-1)^(l+n) T_l^(n)(1)`. Accurate when `kappa >> l`.
pub fn moments_by_parts(kappa: f64, l_max: usize) -> Vec<Complex64> {
    let ep = Complex64::from_polar(1.0, kappa);
    let em = Complex64::from_polar(1.0, -kappa);
    let ik = Complex64::new(0.0, kappa);
    (0..=l_max)
        .map(|l| {
            let lf = l as f64;
            // T_l^(n)(1) / (i kappa)^(n+1), updated as one factor to avoid overflow
            let mut factor = 1.0 / ik;
            let mut sum = Complex64::default();
            for n in 0..=l {
                let sign_n = if n % 2 == 0 { 1.0 } else { -1.0 };
                let sign_ln = if (l + n) % 2 == 0 { 1.0 } else { -1.0 };
                sum += sign_n * factor * (ep - sign_ln * em);
                let k = n as f64;
                factor *= (lf * lf - k * k) / ((2.0 * k + 1.0) * ik);
                if factor == Complex64::default() {
                    break;
                }
            }
            sum
        })
        .collect()
}

/// `int_S Q(x) exp(i kappa x_3) dS` by composite Gauss-Legendre in theta and
/// the trapezoid rule in phi, evaluating the interpolant pointwise.
pub fn dense_cubature(q: &InterpolantCoefficients, kappa: f64) -> Complex64 {
    let n = q.order();
    let panels = 16 + (kappa.abs() / 2.0).ceil() as usize + n;
    let (t, w) = composite_gauss_legendre(0.0, PI, panels, 20);
    let n_phi = 4 * n + 4;
    let dphi = 2.0 * PI / n_phi as f64;
    let mut total = Complex64::default();
    for (ti, wi) in t.iter().zip(&w) {
        let profiles = q.profiles(*ti);
        let mut row = Complex64::default();
        for k in 0..n_phi {
            let phi = k as f64 * dphi;
            row += profiles
                .iter()
                .map(|p| p.value * Complex64::from_polar(1.0, p.frequency as f64 * phi))
                .sum::<Complex64>();
        }
        let (s, c) = ti.sin_cos();
        total += row * dphi * wi * s * Complex64::from_polar(1.0, kappa * c);
    }
    total
}

/// Gram matrices `int T_p T_q w` and `int T_p T_q w T_2N` by Gauss-Legendre,
/// with `w = (1-x^2)^alpha`, `p, q < N-1`.
pub fn gram_by_quadrature(alpha: u32, n: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let (x, wts) = gauss_legendre(4 * n + 16);
    let dim = n - 1;
    let cheb = |k: usize, x: f64| (k as f64 * x.acos()).cos();
    let mut a = vec![vec![0.0; dim]; dim];
    let mut b = vec![vec![0.0; dim]; dim];
    for (xi, wi) in x.iter().zip(&wts) {
        let w = wi * (1.0 - xi * xi).powi(alpha as i32);
        let t2n = cheb(2 * n, *xi);
        for p in 0..dim {
            for q in 0..dim {
                let v = w * cheb(p, *xi) * cheb(q, *xi);
                a[p][q] += v;
                b[p][q] += v * t2n;
            }
        }
    }
    (a, b)
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
fn jacobi_eigenvalues(mut s: Vec<Vec<f64>>) -> Vec<f64> {
    let n = s.len();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s[i][j] * s[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if s[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let (skp, skq) = (s[k][p], s[k][q]);
                    s[k][p] = c * skp - sn * skq;
                    s[k][q] = sn * skp + c * skq;
                }
                for k in 0..n {
                    let (spk, sqk) = (s[p][k], s[q][k]);
                    s[p][k] = c * spk - sn * sqk;
                    s[q][k] = sn * spk + c * sqk;
                }
            }
        }
    }
    (0..n).map(|i| s[i][i]).collect()
}

/// `min_b (b'Bb)/(b'Ab)` by random restarts of a locally optimal block
/// descent: Rayleigh-Ritz on `span{x, r, x_prev}` with `r = Bx - rho Ax`.
pub fn min_rayleigh_quotient(a: &[Vec<f64>], b: &[Vec<f64>], restarts: usize, seed: u64) -> f64 {
    let dim = a.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rq = |x: &[f64]| dot(x, &mat_vec(b, x)) / dot(x, &mat_vec(a, x));
    let mut best = f64::INFINITY;
    for _ in 0..restarts {
        let mut x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut prev: Option<Vec<f64>> = None;
        for _ in 0..500 {
            let rho = rq(&x);
            let ax = mat_vec(a, &x);
            let bx = mat_vec(b, &x);
            let r: Vec<f64> = bx.iter().zip(&ax).map(|(b, a)| b - rho * a).collect();
            if r.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-15 {
                break;
            }
            // A-orthonormal basis of the search space
            let mut basis: Vec<Vec<f64>> = Vec::new();
            for v in std::iter::once(x.clone())
                .chain(std::iter::once(r))
                .chain(prev.clone())
            {
                let mut v = v;
                for u in &basis {
                    let proj = dot(&v, &mat_vec(a, u));
                    v.iter_mut().zip(u).for_each(|(vi, ui)| *vi -= proj * ui);
                }
                let norm = dot(&v, &mat_vec(a, &v)).sqrt();
                if norm > 1e-10 * dot(&x, &ax).sqrt() {
                    basis.push(v.iter().map(|vi| vi / norm).collect());
                }
            }
            let k = basis.len();
            let bu: Vec<Vec<f64>> = basis.iter().map(|u| mat_vec(b, u)).collect();
            let s: Vec<Vec<f64>> = (0..k)
                .map(|i| (0..k).map(|j| dot(&basis[i], &bu[j])).collect())
                .collect();
            // smallest Ritz pair: eigenvector from inverse iteration on the small matrix
            let lambda = jacobi_eigenvalues(s.clone())
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            let coeffs = small_eigenvector(&s, lambda);
            let next: Vec<f64> = (0..dim)
                .map(|d| (0..k).map(|i| coeffs[i] * basis[i][d]).sum())
                .collect();
            prev = Some(x);
            x = next;
            if (rho - lambda).abs() < 1e-16 * rho.abs().max(1e-300) {
                break;
            }
        }
        best = best.min(rq(&x));
    }
    best
}

fn small_eigenvector(s: &[Vec<f64>], lambda: f64) -> Vec<f64> {
    let k = s.len();
    let shift = lambda - 1e-10 * (1.0 + lambda.abs());
    let mut v = vec![1.0; k];
    for _ in 0..20 {
        // solve (S - shift I) y = v by Gaussian elimination with pivoting
        let mut m: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let mut row: Vec<f64> = (0..k)
                    .map(|j| s[i][j] - if i == j { shift } else { 0.0 })
                    .collect();
                row.push(v[i]);
                row
            })
            .collect();
        for col in 0..k {
            let piv = (col..k)
                .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
                .unwrap();
            m.swap(col, piv);
            for r in col + 1..k {
                let f = m[r][col] / m[col][col];
                for c in col..=k {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
        let mut y = vec![0.0; k];
        for r in (0..k).rev() {
            let mut acc = m[r][k];
            for c in r + 1..k {
                acc -= m[r][c] * y[c];
            }
            y[r] = acc / m[r][r];
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        v = y.iter().map(|v| v / norm).collect();
    }
    v
}
