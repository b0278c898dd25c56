//! Type-I sine/cosine transforms and the discrete Fourier pair used by the
//! interpolant.
//!
//! Conventions (all normative, the interpolation identities rely on them):
//!
//! * `dst1(y)_j = sum_{k=1}^{N-1} y_k sin(k j pi / N)`, `j = 1..N-1`
//! * `dct1(x)_j = sum''_{k=0}^{N} x_k cos(k j pi / N)`, `j = 0..N`, where
//!   `sum''` halves the first and last terms
//! * `ifft(z)_j = (1/M) sum_k z_k exp(-2 pi i k j / M)`
//! * `fft(f)_k  = sum_j f_j exp(+2 pi i k j / M)`
//!
//! Note that `ifft` carries the negative exponent. In `rustfft` terms it is a
//! forward transform followed by a `1/M` scaling, and `fft` is the
//! unnormalized inverse.
//!
//! The type-I transforms fold their even/odd extension into a length-`N`
//! complex FFT, so every `N >= 2` is supported (`rustfft` picks mixed-radix,
//! Rader or Bluestein kernels as needed).

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

fn check_len(what: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::LengthMismatch {
            what,
            expected,
            actual,
        });
    }
    Ok(())
}

fn check_order(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "transform order N must be >= 2, got {n}"
        )));
    }
    Ok(())
}

fn check_finite(what: &'static str, v: &[Complex64]) -> Result<()> {
    if let Some(pos) = v
        .iter()
        .position(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(Error::InvalidArgument(format!(
            "{what}: non-finite entry at position {pos}"
        )));
    }
    Ok(())
}

/// A reusable plan for the order-`N` type-I transforms.
///
/// Holds a length-`N` FFT, its scratch and the `sin/cos(pi j / N)` tables so that
/// batches of DCT-I/DST-I calls (one per Fourier mode in the interpolant) do
/// not re-plan.
///
/// Both transforms fold the symmetric extension into a length-`N` complex
/// sequence `y`. With `Y` its DFT, `(Y_k + Y_{N-k}) / 2` and
/// `(Y_k - Y_{N-k}) / 2` separate the cosine and sine sums, which give the
/// even outputs directly and the odd outputs as a running sum.
pub struct TypeOnePlan {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
    sin: Vec<f64>,
    cos: Vec<f64>,
    work: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl std::fmt::Debug for TypeOnePlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TypeOnePlan").field("n", &self.n).finish()
    }
}

impl TypeOnePlan {
    pub fn new(n: usize) -> Result<Self> {
        check_order(n)?;
        let fft = FftPlanner::new().plan_fft_forward(n);
        let scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        let step = std::f64::consts::PI / n as f64;
        Ok(TypeOnePlan {
            n,
            fft,
            sin: (0..n).map(|j| (j as f64 * step).sin()).collect(),
            cos: (0..n).map(|j| (j as f64 * step).cos()).collect(),
            work: vec![Complex64::default(); n],
            scratch,
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// DCT-I of `input` (length `N+1`) written to `out` (length `N+1`).
    pub fn dct1_into(&mut self, input: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        check_len("DCT-I input", self.n + 1, input.len())?;
        check_len("DCT-I output", self.n + 1, out.len())?;
        out.copy_from_slice(input);
        self.dct1_inplace(out)
    }

    /// DCT-I of `data` (length `N+1`), overwriting it.
    pub fn dct1_inplace(&mut self, data: &mut [Complex64]) -> Result<()> {
        let n = self.n;
        check_len("DCT-I input", n + 1, data.len())?;
        // y_j = (x_j + x_{N-j}) / 2 - sin(pi j / N) (x_j - x_{N-j})
        let mut first = (data[0] - data[n]) * 0.5;
        self.work[0] = (data[0] + data[n]) * 0.5;
        for j in 1..n {
            let (a, b) = (data[j], data[n - j]);
            self.work[j] = (a + b) * 0.5 - (a - b) * self.sin[j];
            first += a * self.cos[j];
        }
        self.fft
            .process_with_scratch(&mut self.work, &mut self.scratch);
        let y = &self.work;
        data[0] = y[0];
        data[1] = first;
        let mut odd = first;
        for k in 1..=n / 2 {
            let (p, q) = (y[k], y[n - k]);
            data[2 * k] = (p + q) * 0.5;
            if 2 * k < n {
                // sine part (Y_k - Y_{N-k}) / 2i
                let s = (p - q) * Complex64::new(0.0, -0.5);
                odd -= s;
                data[2 * k + 1] = odd;
            }
        }
        Ok(())
    }

    /// DST-I of `input` (length `N-1`) written to `out` (length `N-1`).
    pub fn dst1_into(&mut self, input: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        check_len("DST-I input", self.n - 1, input.len())?;
        check_len("DST-I output", self.n - 1, out.len())?;
        out.copy_from_slice(input);
        self.dst1_inplace(out)
    }

    /// DST-I of `data` (length `N-1`), overwriting it.
    pub fn dst1_inplace(&mut self, data: &mut [Complex64]) -> Result<()> {
        let n = self.n;
        check_len("DST-I input", n - 1, data.len())?;
        // x_j = data[j - 1] with x_0 = x_N = 0;
        // y_j = sin(pi j / N) (x_j + x_{N-j}) + (x_j - x_{N-j}) / 2
        self.work[0] = Complex64::default();
        for j in 1..n {
            let (a, b) = (data[j - 1], data[n - j - 1]);
            self.work[j] = (a + b) * self.sin[j] + (a - b) * 0.5;
        }
        self.fft
            .process_with_scratch(&mut self.work, &mut self.scratch);
        let y = &self.work;
        let mut odd = y[0] * 0.5;
        data[0] = odd;
        for k in 1..=n / 2 {
            let (p, q) = (y[k], y[n - k]);
            if 2 * k < n {
                data[2 * k - 1] = (p - q) * Complex64::new(0.0, 0.5);
            }
            if 2 * k + 1 < n {
                odd += (p + q) * 0.5;
                data[2 * k] = odd;
            }
        }
        Ok(())
    }
}

/// DST-I of order `n`; `y` holds `y_1..y_{N-1}`.
pub fn dst1(y: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    check_order(n)?;
    check_len("DST-I input", n - 1, y.len())?;
    check_finite("DST-I input", y)?;
    let mut out = vec![Complex64::default(); n - 1];
    TypeOnePlan::new(n)?.dst1_into(y, &mut out)?;
    Ok(out)
}

/// Inverse DST-I, `(2/N) dst1`.
pub fn idst1(b: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    let scale = 2.0 / n as f64;
    let mut out = dst1(b, n)?;
    out.iter_mut().for_each(|z| *z *= scale);
    Ok(out)
}

/// DCT-I of order `n`; `x` holds `x_0..x_N`.
pub fn dct1(x: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    check_order(n)?;
    check_len("DCT-I input", n + 1, x.len())?;
    check_finite("DCT-I input", x)?;
    let mut out = vec![Complex64::default(); n + 1];
    TypeOnePlan::new(n)?.dct1_into(x, &mut out)?;
    Ok(out)
}

/// Inverse DCT-I, `(2/N) dct1`.
pub fn idct1(a: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    let scale = 2.0 / n as f64;
    let mut out = dct1(a, n)?;
    out.iter_mut().for_each(|z| *z *= scale);
    Ok(out)
}

fn real_in(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

fn real_out(z: Vec<Complex64>) -> Vec<f64> {
    z.into_iter().map(|v| v.re).collect()
}

pub fn dst1_real(y: &[f64], n: usize) -> Result<Vec<f64>> {
    dst1(&real_in(y), n).map(real_out)
}

pub fn idst1_real(b: &[f64], n: usize) -> Result<Vec<f64>> {
    idst1(&real_in(b), n).map(real_out)
}

pub fn dct1_real(x: &[f64], n: usize) -> Result<Vec<f64>> {
    dct1(&real_in(x), n).map(real_out)
}

pub fn idct1_real(a: &[f64], n: usize) -> Result<Vec<f64>> {
    idct1(&real_in(a), n).map(real_out)
}

/// `(1/M) sum_k z_k exp(-2 pi i k j / M)`.
pub fn ifft(z: &[Complex64]) -> Result<Vec<Complex64>> {
    if z.is_empty() {
        return Err(Error::InvalidArgument("ifft of an empty vector".into()));
    }
    check_finite("ifft input", z)?;
    let m = z.len();
    let mut buf = z.to_vec();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
    Ok(buf)
}

/// `sum_j f_j exp(+2 pi i k j / M)`, the inverse of [`ifft`].
pub fn fft(f: &[Complex64]) -> Result<Vec<Complex64>> {
    if f.is_empty() {
        return Err(Error::InvalidArgument("fft of an empty vector".into()));
    }
    check_finite("fft input", f)?;
    let mut buf = f.to_vec();
    FftPlanner::new()
        .plan_fft_inverse(f.len())
        .process(&mut buf);
    Ok(buf)
}

/// O(n^2) reference implementations written straight from the defining sums.
pub mod direct {
    use std::f64::consts::PI;

    use num_complex::Complex64;

    pub fn dst1(y: &[Complex64], n: usize) -> Vec<Complex64> {
        (1..n)
            .map(|j| {
                (1..n)
                    .map(|k| y[k - 1] * (PI * (k * j) as f64 / n as f64).sin())
                    .sum()
            })
            .collect()
    }

    pub fn dct1(x: &[Complex64], n: usize) -> Vec<Complex64> {
        (0..=n)
            .map(|j| {
                (0..=n)
                    .map(|k| {
                        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                        // reduce k*j mod 2N before the cosine to keep the argument small
                        let arg = PI * ((k * j) % (2 * n)) as f64 / n as f64;
                        x[k] * (w * arg.cos())
                    })
                    .sum()
            })
            .collect()
    }

    pub fn ifft(z: &[Complex64]) -> Vec<Complex64> {
        let m = z.len();
        (0..m)
            .map(|j| {
                let s: Complex64 = (0..m)
                    .map(|k| {
                        let arg = -2.0 * PI * ((k * j) % m) as f64 / m as f64;
                        z[k] * Complex64::from_polar(1.0, arg)
                    })
                    .sum();
                s / m as f64
            })
            .collect()
    }

    pub fn fft(f: &[Complex64]) -> Vec<Complex64> {
        let m = f.len();
        (0..m)
            .map(|k| {
                (0..m)
                    .map(|j| {
                        let arg = 2.0 * PI * ((k * j) % m) as f64 / m as f64;
                        f[j] * Complex64::from_polar(1.0, arg)
                    })
                    .sum()
            })
            .collect()
    }
}
