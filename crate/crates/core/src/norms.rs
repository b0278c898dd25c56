//! H0/H1 norms on the sphere by product quadrature, interpolation error
//! tables and estimated orders of convergence.
//!
//! ```text
//! ||F||_H0^2 = int_0^pi int_0^2pi |F|^2 sin(theta) dphi dtheta
//! ||F||_H1^2 = 1/4 ||F||_H0^2 + int int |F_phi|^2 / sin(theta) + int int |F_theta|^2 sin(theta)
//! ```
//!
//! Integrals are taken in `x = cos(theta)` with Gauss-Legendre nodes (interior,
//! so the `1/sin` weight never meets a pole) times the trapezoid rule in `phi`.
//! Row sums are reduced in node order, so results do not depend on the number
//! of worker threads.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interpolant::InterpolantCoefficients;
use crate::quadrature::gauss_legendre;
use crate::sphere_grid::{sample, TestFunction};

/// Default resolution: 400 x 1200 = 480 000 nodes. The azimuthal count is the
/// one that matters for low-regularity errors: at `N = 128` the error of `F3`
/// is concentrated within about `1/N` of its singular points, which 400
/// uniform azimuthal nodes do not resolve.
pub const DEFAULT_N_THETA: usize = 400;
pub const DEFAULT_N_PHI: usize = 1200;

/// Gauss-Legendre (in `cos theta`) x trapezoid (in `phi`) product rule.
#[derive(Debug, Clone)]
pub struct NormQuadrature {
    x: Vec<f64>,
    w: Vec<f64>,
    n_phi: usize,
}

impl Default for NormQuadrature {
    fn default() -> Self {
        NormQuadrature::new(DEFAULT_N_THETA, DEFAULT_N_PHI).expect("default rule is valid")
    }
}

impl NormQuadrature {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 2 || n_phi < 2 {
            return Err(Error::InvalidArgument(format!(
                "quadrature needs at least 2 x 2 nodes, got {n_theta} x {n_phi}"
            )));
        }
        let (x, w) = gauss_legendre(n_theta);
        Ok(NormQuadrature { x, w, n_phi })
    }

    pub fn n_theta(&self) -> usize {
        self.x.len()
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn node_count(&self) -> usize {
        self.n_theta() * self.n_phi
    }

    pub fn theta(&self, i: usize) -> f64 {
        self.x[i].acos()
    }

    pub fn phi(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.n_phi as f64
    }

    /// `sin^2(theta_i)` computed as `(1 - x)(1 + x)`.
    fn sin_sq(&self, i: usize) -> f64 {
        let x = self.x[i];
        (1.0 - x) * (1.0 + x)
    }

    /// Integrates per-latitude row sums. `row(i)` returns the unweighted phi
    /// sums of `|g|^2`, `|g_phi|^2` and `|g_theta|^2` on latitude `i`.
    fn integrate<F>(&self, row: F) -> Result<Integrals>
    where
        F: Fn(usize) -> Result<RowSums> + Sync,
    {
        let rows: Vec<RowSums> = (0..self.n_theta())
            .into_par_iter()
            .map(&row)
            .collect::<Result<_>>()?;
        let dphi = 2.0 * PI / self.n_phi as f64;
        let mut h0 = Neumaier::default();
        let mut phi = Neumaier::default();
        let mut theta = Neumaier::default();
        for (i, r) in rows.iter().enumerate() {
            let w = self.w[i] * dphi;
            h0.add(w * r.value);
            phi.add(w * r.d_phi / self.sin_sq(i));
            theta.add(w * r.d_theta);
        }
        Ok(Integrals {
            value: h0.sum(),
            d_phi: phi.sum(),
            d_theta: theta.sum(),
        })
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct RowSums {
    value: f64,
    d_phi: f64,
    d_theta: f64,
}

#[derive(Debug, Clone, Copy)]
struct Integrals {
    value: f64,
    d_phi: f64,
    d_theta: f64,
}

impl Integrals {
    fn h0(&self) -> f64 {
        self.value.sqrt()
    }

    fn h1(&self) -> f64 {
        (0.25 * self.value + self.d_phi + self.d_theta).sqrt()
    }
}

/// Compensated summation.
#[derive(Debug, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

fn finite(z: Complex64, i: usize, k: usize) -> Result<f64> {
    let v = z.norm_sqr();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { j: i, k })
    }
}

/// `||g||_H0`.
pub fn h0_norm<G>(g: G, quad: &NormQuadrature) -> Result<f64>
where
    G: Fn(f64, f64) -> Complex64 + Sync,
{
    let integrals = quad.integrate(|i| {
        let t = quad.theta(i);
        let mut s = RowSums::default();
        for k in 0..quad.n_phi {
            s.value += finite(g(t, quad.phi(k)), i, k)?;
        }
        Ok(s)
    })?;
    Ok(integrals.h0())
}

fn h1_integrals<G, Gt, Gp>(
    g: &G,
    g_theta: &Gt,
    g_phi: &Gp,
    quad: &NormQuadrature,
) -> Result<Integrals>
where
    G: Fn(f64, f64) -> Complex64 + Sync,
    Gt: Fn(f64, f64) -> Complex64 + Sync,
    Gp: Fn(f64, f64) -> Complex64 + Sync,
{
    quad.integrate(|i| {
        let t = quad.theta(i);
        let mut s = RowSums::default();
        for k in 0..quad.n_phi {
            let p = quad.phi(k);
            s.value += finite(g(t, p), i, k)?;
            s.d_phi += finite(g_phi(t, p), i, k)?;
            s.d_theta += finite(g_theta(t, p), i, k)?;
        }
        Ok(s)
    })
}

/// `||g||_H1` from `g` and its partials.
///
/// The `1/sin` term is also integrated with half the latitude nodes; a
/// warning is logged when the two disagree beyond `1e-6` relative, which
/// flags integrands too rough for the chosen rule.
pub fn h1_norm<G, Gt, Gp>(g: G, g_theta: Gt, g_phi: Gp, quad: &NormQuadrature) -> Result<f64>
where
    G: Fn(f64, f64) -> Complex64 + Sync,
    Gt: Fn(f64, f64) -> Complex64 + Sync,
    Gp: Fn(f64, f64) -> Complex64 + Sync,
{
    let fine = h1_integrals(&g, &g_theta, &g_phi, quad)?;
    if quad.n_theta() >= 8 {
        let coarse_rule = NormQuadrature::new(quad.n_theta() / 2, quad.n_phi)?;
        let coarse = h1_integrals(&g, &g_theta, &g_phi, &coarse_rule)?;
        let scale = fine.d_phi.abs().max(f64::MIN_POSITIVE);
        let drift = (fine.d_phi - coarse.d_phi).abs() / scale;
        if drift > 1e-6 {
            log::warn!(
                "1/sin(theta) term of the H1 norm not self-converged: relative change {drift:.2e} \
                 between {} and {} latitude nodes",
                coarse_rule.n_theta(),
                quad.n_theta()
            );
        }
    }
    Ok(fine.h1())
}

/// Which norm to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    H0,
    H1,
}

/// `||F - Q_N F||` in H0 and, when `with_h1`, in H1.
///
/// The interpolant is differentiated analytically term by term; the function
/// must supply its own partials for the H1 error.
pub fn interpolation_errors(
    f: &TestFunction,
    n: usize,
    quad: &NormQuadrature,
    with_h1: bool,
) -> Result<(f64, Option<f64>)> {
    if with_h1 && !f.has_partials() {
        return Err(Error::InvalidArgument(format!(
            "H1 error needs analytic partials, `{}` has none",
            f.name()
        )));
    }
    let coeffs = InterpolantCoefficients::build(&sample(f, n)?)?;
    let n_phi = quad.n_phi;
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(n_phi);

    let integrals = quad.integrate(|i| {
        let t = quad.theta(i);
        // azimuthal synthesis of Q_N F, d_theta Q_N F and d_phi Q_N F on the phi nodes
        let mut value = vec![Complex64::default(); n_phi];
        let mut d_theta = vec![Complex64::default(); n_phi];
        let mut d_phi = vec![Complex64::default(); n_phi];
        for p in coeffs.profiles(t) {
            let slot = p.frequency.rem_euclid(n_phi as i64) as usize;
            value[slot] += p.value;
            d_theta[slot] += p.d_theta;
            d_phi[slot] += p.value * Complex64::new(0.0, p.frequency as f64);
        }
        fft.process(&mut value);
        if with_h1 {
            fft.process(&mut d_theta);
            fft.process(&mut d_phi);
        }
        let mut s = RowSums::default();
        for k in 0..n_phi {
            let phi = quad.phi(k);
            s.value += finite(f.eval(t, phi) - value[k], i, k)?;
            if with_h1 {
                let ft = f.d_theta(t, phi).unwrap_or_default();
                let fp = f.d_phi(t, phi).unwrap_or_default();
                s.d_theta += finite(ft - d_theta[k], i, k)?;
                s.d_phi += finite(fp - d_phi[k], i, k)?;
            }
        }
        Ok(s)
    })?;
    Ok((integrals.h0(), with_h1.then(|| integrals.h1())))
}

/// `||F - Q_N F||` in the requested norm.
pub fn interpolation_error(
    f: &TestFunction,
    n: usize,
    quad: &NormQuadrature,
    which: Norm,
) -> Result<f64> {
    let (h0, h1) = interpolation_errors(f, n, quad, which == Norm::H1)?;
    Ok(match which {
        Norm::H0 => h0,
        Norm::H1 => h1.expect("requested"),
    })
}

/// Estimated orders of convergence `log(e_1/e_2) / log(N_2/N_1)` for each
/// consecutive pair; `log2(e_N / e_2N)` under doubling.
pub fn eoc(errors: &[(usize, f64)]) -> Vec<f64> {
    errors
        .windows(2)
        .map(|w| {
            let (n1, e1) = w[0];
            let (n2, e2) = w[1];
            (e1 / e2).ln() / (n2 as f64 / n1 as f64).ln()
        })
        .collect()
}

/// One row of a convergence table.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorRecord {
    #[serde(rename = "N")]
    pub n: usize,
    pub error_h0: f64,
    pub eoc_h0: Option<f64>,
    pub error_h1: Option<f64>,
    pub eoc_h1: Option<f64>,
}

/// Errors of `Q_N F` for each `N` in `ns`, with EoC against the previous row.
pub fn convergence_table(
    f: &TestFunction,
    ns: &[usize],
    quad: &NormQuadrature,
    with_h1: bool,
) -> Result<Vec<ErrorRecord>> {
    let mut rows: Vec<ErrorRecord> = Vec::with_capacity(ns.len());
    for &n in ns {
        let (h0, h1) = interpolation_errors(f, n, quad, with_h1)?;
        let prev = rows.last();
        let eoc_h0 = prev.map(|p| eoc(&[(p.n, p.error_h0), (n, h0)])[0]);
        let eoc_h1 = match (prev.and_then(|p| p.error_h1.map(|e| (p.n, e))), h1) {
            (Some(a), Some(e)) => Some(eoc(&[a, (n, e)])[0]),
            _ => None,
        };
        rows.push(ErrorRecord {
            n,
            error_h0: h0,
            eoc_h0,
            error_h1: h1,
            eoc_h1,
        });
    }
    Ok(rows)
}

fn cell(v: Option<f64>, fmt: impl Fn(f64) -> String) -> String {
    v.map(fmt).unwrap_or_default()
}

/// CSV with header `N,error_h0,eoc_h0,error_h1,eoc_h1`; absent values are empty cells.
pub fn error_table_csv(rows: &[ErrorRecord]) -> String {
    let mut out = String::from("N,error_h0,eoc_h0,error_h1,eoc_h1\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:.6e},{},{},{}\n",
            r.n,
            r.error_h0,
            cell(r.eoc_h0, |v| format!("{v:.4}")),
            cell(r.error_h1, |v| format!("{v:.6e}")),
            cell(r.eoc_h1, |v| format!("{v:.4}")),
        ));
    }
    out
}
