//! The FFT-based spherical interpolant.
//!
//! Given samples `F_{j,k}` on the order-`N` grid, the interpolant is
//!
//! ```text
//! Q_N F(theta, phi) = sum_{b=0}^{2N-1} p_b(theta) exp(i freq(b) phi)
//! ```
//!
//! where `freq(b) = b` for `b <= N` and `b - 2N` otherwise, so frequencies run
//! over `-N < freq <= N`. Even bins carry cosine profiles
//! `p_b = (2/N) sum''_l alpha^b_l cos(l theta)`, odd bins sine profiles
//! `p_b = (2/N) sum_l beta^b_l sin(l theta)`.
//!
//! Construction is one inverse FFT per latitude row followed by one DCT-I per
//! even bin and one DST-I per odd bin. The coefficients are stored by bin,
//! `N + 1` slots each: `alpha^{2r}_0..alpha^{2r}_N` for even bins and
//! `0, beta^{2r+1}_1..beta^{2r+1}_{N-1}, 0` for odd ones, so the column
//! transforms run in place on the array the row transforms fill.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{eval_combination, HarmonicIndex};
use crate::sphere_grid::SphericalSamples;
use crate::transforms::TypeOnePlan;

const ROW_BLOCK: usize = 32;

/// Coefficients of `Q_N F`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolantCoefficients {
    n: usize,
    /// `2N x (N+1)`, one slot row per bin.
    data: Vec<Complex64>,
}

/// Value and theta-derivative of one latitudinal profile `p_b`.
#[derive(Debug, Clone, Copy)]
pub struct ModeProfile {
    pub frequency: i64,
    pub value: Complex64,
    pub d_theta: Complex64,
}

/// `cos(l theta)` and `sin(l theta)` for `l = 0..=N`.
struct TrigTable {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigTable {
    fn new(theta: f64, n: usize) -> Self {
        let (sin, cos) = (0..=n).map(|l| (l as f64 * theta).sin_cos()).unzip();
        TrigTable { cos, sin }
    }
}

/// Frequency represented by FFT bin `b` of a length-`2N` transform.
pub fn bin_frequency(bin: usize, n: usize) -> i64 {
    if bin <= n {
        bin as i64
    } else {
        bin as i64 - 2 * n as i64
    }
}

/// Plans and workspace for building order-`N` interpolants.
pub struct InterpolantBuilder {
    n: usize,
    row_fft: Arc<dyn Fft<f64>>,
    plan: TypeOnePlan,
    scratch: Vec<Complex64>,
    /// A block of transformed latitude rows.
    rows: Vec<Complex64>,
}

impl std::fmt::Debug for InterpolantBuilder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InterpolantBuilder")
            .field("n", &self.n)
            .finish()
    }
}

impl InterpolantBuilder {
    pub fn new(n: usize) -> Result<Self> {
        let plan = TypeOnePlan::new(n)?;
        let m = 2 * n;
        let row_fft = FftPlanner::<f64>::new().plan_fft_forward(m);
        let scratch = vec![Complex64::default(); row_fft.get_inplace_scratch_len()];
        Ok(InterpolantBuilder {
            n,
            row_fft,
            plan,
            scratch,
            rows: vec![Complex64::default(); ROW_BLOCK * m],
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn build(&mut self, samples: &SphericalSamples) -> Result<InterpolantCoefficients> {
        let n = self.n;
        let mut out = InterpolantCoefficients {
            n,
            data: vec![Complex64::default(); 2 * n * (n + 1)],
        };
        self.build_into(samples, &mut out)?;
        Ok(out)
    }

    /// Overwrites `out` (which must have the builder's order) with the
    /// coefficients of `samples`.
    pub fn build_into(
        &mut self,
        samples: &SphericalSamples,
        out: &mut InterpolantCoefficients,
    ) -> Result<()> {
        let n = self.n;
        if samples.order() != n || out.n != n {
            return Err(Error::InvalidArgument(format!(
                "builder of order {n} given samples of order {} and output of order {}",
                samples.order(),
                out.n
            )));
        }
        let m = 2 * n;
        let stride = n + 1;
        let data = &mut out.data;

        // f_{j,b} = iFFT_{2N}(F_{j,.})_b, written transposed (bin-major) a
        // block of rows at a time
        let scale = 1.0 / m as f64;
        for j0 in (0..=n).step_by(ROW_BLOCK) {
            let height = ROW_BLOCK.min(n + 1 - j0);
            let block = &mut self.rows[..height * m];
            block.copy_from_slice(&samples.values()[j0 * m..(j0 + height) * m]);
            for row in block.chunks_exact_mut(m) {
                self.row_fft.process_with_scratch(row, &mut self.scratch);
            }
            for b in 0..m {
                let dst = &mut data[b * stride + j0..b * stride + j0 + height];
                for (r, d) in dst.iter_mut().enumerate() {
                    *d = block[r * m + b] * scale;
                }
            }
        }

        for (b, column) in data.chunks_exact_mut(stride).enumerate() {
            if b % 2 == 0 {
                self.plan.dct1_inplace(column)?;
            } else {
                self.plan.dst1_inplace(&mut column[1..n])?;
                column[0] = Complex64::default();
                column[n] = Complex64::default();
            }
        }
        Ok(())
    }
}

impl InterpolantCoefficients {
    /// Builds the coefficients from grid samples in `O(N^2 log N)`.
    ///
    /// For repeated builds at one order, [`InterpolantBuilder`] keeps the
    /// plans and the work array alive between calls.
    pub fn build(samples: &SphericalSamples) -> Result<Self> {
        InterpolantBuilder::new(samples.order())?.build(samples)
    }

    /// Coefficients from `alpha` (`N x (N+1)`, row `r` for bin `2r`) and
    /// `beta` (`N x (N-1)`, row `r` for bin `2r+1`), both row-major.
    pub fn from_parts(n: usize, alpha: Vec<Complex64>, beta: Vec<Complex64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("N must be >= 2, got {n}")));
        }
        if alpha.len() != n * (n + 1) {
            return Err(Error::LengthMismatch {
                what: "alpha coefficients",
                expected: n * (n + 1),
                actual: alpha.len(),
            });
        }
        if beta.len() != n * (n - 1) {
            return Err(Error::LengthMismatch {
                what: "beta coefficients",
                expected: n * (n - 1),
                actual: beta.len(),
            });
        }
        let stride = n + 1;
        let mut data = vec![Complex64::default(); 2 * n * stride];
        for r in 0..n {
            data[2 * r * stride..(2 * r + 1) * stride]
                .copy_from_slice(&alpha[r * stride..(r + 1) * stride]);
            let odd = (2 * r + 1) * stride;
            data[odd + 1..odd + n].copy_from_slice(&beta[r * (n - 1)..(r + 1) * (n - 1)]);
        }
        Ok(InterpolantCoefficients { n, data })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// `alpha^{2r}_l`, `l = 0..=N`.
    pub fn alpha_row(&self, r: usize) -> &[Complex64] {
        let start = 2 * r * (self.n + 1);
        &self.data[start..start + self.n + 1]
    }

    /// `beta^{2r+1}_l`, `l = 1..N` (stored from index 0).
    pub fn beta_row(&self, r: usize) -> &[Complex64] {
        let start = (2 * r + 1) * (self.n + 1) + 1;
        &self.data[start..start + self.n - 1]
    }

    pub fn even_frequency(&self, r: usize) -> i64 {
        bin_frequency(2 * r, self.n)
    }

    pub fn odd_frequency(&self, r: usize) -> i64 {
        bin_frequency(2 * r + 1, self.n)
    }

    fn even_profile(&self, r: usize, trig: &TrigTable) -> (Complex64, Complex64) {
        let n = self.n;
        let row = self.alpha_row(r);
        let mut v = Complex64::default();
        let mut d = Complex64::default();
        for (l, a) in row.iter().enumerate() {
            let w = if l == 0 || l == n { 0.5 } else { 1.0 };
            v += a * (w * trig.cos[l]);
            d -= a * (w * l as f64 * trig.sin[l]);
        }
        let s = 2.0 / n as f64;
        (v * s, d * s)
    }

    fn odd_profile(&self, r: usize, trig: &TrigTable) -> (Complex64, Complex64) {
        let row = self.beta_row(r);
        let mut v = Complex64::default();
        let mut d = Complex64::default();
        for (i, b) in row.iter().enumerate() {
            let l = i + 1;
            v += b * trig.sin[l];
            d += b * (l as f64 * trig.cos[l]);
        }
        let s = 2.0 / self.n as f64;
        (v * s, d * s)
    }

    /// All `2N` latitudinal profiles at `theta`, in bin order.
    pub fn profiles(&self, theta: f64) -> Vec<ModeProfile> {
        let n = self.n;
        let trig = TrigTable::new(theta, n);
        (0..2 * n)
            .map(|bin| {
                let r = bin / 2;
                let (value, d_theta) = if bin % 2 == 0 {
                    self.even_profile(r, &trig)
                } else {
                    self.odd_profile(r, &trig)
                };
                ModeProfile {
                    frequency: bin_frequency(bin, n),
                    value,
                    d_theta,
                }
            })
            .collect()
    }

    /// `Q_N F(theta, phi)`; `O(N^2)` per point.
    pub fn evaluate(&self, theta: f64, phi: f64) -> Complex64 {
        self.profiles(theta)
            .iter()
            .map(|p| p.value * Complex64::from_polar(1.0, p.frequency as f64 * phi))
            .sum()
    }

    /// Value together with the theta- and phi-partials.
    pub fn evaluate_with_partials(
        &self,
        theta: f64,
        phi: f64,
    ) -> (Complex64, Complex64, Complex64) {
        let mut v = Complex64::default();
        let mut dt = Complex64::default();
        let mut dp = Complex64::default();
        for p in self.profiles(theta) {
            let e = Complex64::from_polar(1.0, p.frequency as f64 * phi);
            v += p.value * e;
            dt += p.d_theta * e;
            dp += p.value * e * Complex64::new(0.0, p.frequency as f64);
        }
        (v, dt, dp)
    }

    /// Values on the refined grid `theta'_j = j pi/(MN)`, `phi'_k = k pi/(MN)`,
    /// returned as samples of order `MN`.
    pub fn evaluate_grid(&self, refine: usize) -> Result<SphericalSamples> {
        if refine < 1 {
            return Err(Error::InvalidArgument(
                "refinement factor must be >= 1".into(),
            ));
        }
        let n = self.n;
        let big = refine * n;
        let cols = 2 * big;
        let scale = 2.0 / n as f64;
        let mut plan = TypeOnePlan::new(big)?;

        // profiles[b][j] = p_b(theta'_j)
        let mut profiles = vec![vec![Complex64::default(); big + 1]; 2 * n];
        let mut padded_cos = vec![Complex64::default(); big + 1];
        let mut padded_sin = vec![Complex64::default(); big - 1];
        let mut sin_out = vec![Complex64::default(); big - 1];
        for r in 0..n {
            padded_cos.fill(Complex64::default());
            padded_cos[..=n].copy_from_slice(self.alpha_row(r));
            if refine > 1 {
                // alpha_N loses its end-point weight once it is no longer last
                padded_cos[n] *= 0.5;
            }
            let out = &mut profiles[2 * r];
            plan.dct1_into(&padded_cos, out)?;
            out.iter_mut().for_each(|z| *z *= scale);

            padded_sin.fill(Complex64::default());
            padded_sin[..n - 1].copy_from_slice(self.beta_row(r));
            plan.dst1_into(&padded_sin, &mut sin_out)?;
            let out = &mut profiles[2 * r + 1];
            out[0] = Complex64::default();
            out[big] = Complex64::default();
            for (o, v) in out[1..big].iter_mut().zip(&sin_out) {
                *o = v * scale;
            }
        }

        let fft = FftPlanner::<f64>::new().plan_fft_inverse(cols);
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        let mut values = vec![Complex64::default(); (big + 1) * cols];
        for j in 0..=big {
            let row = &mut values[j * cols..(j + 1) * cols];
            for (bin, prof) in profiles.iter().enumerate() {
                let slot = bin_frequency(bin, n).rem_euclid(cols as i64) as usize;
                row[slot] += prof[j];
            }
            fft.process_with_scratch(row, &mut scratch);
        }
        SphericalSamples::from_values(big, values)
    }

    /// Largest `|p_b(0)|`, `|p_b(pi)|` over the even bins with nonzero
    /// frequency. Zero (up to rounding) means the interpolant is continuous
    /// at the poles.
    pub fn pole_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 1..self.n {
            let row = self.alpha_row(r);
            let mut north = Complex64::default();
            let mut south = Complex64::default();
            for (l, a) in row.iter().enumerate() {
                let w = if l == 0 || l == self.n { 0.5 } else { 1.0 };
                north += a * w;
                south += a * (w * if l % 2 == 0 { 1.0 } else { -1.0 });
            }
            let s = 2.0 / self.n as f64;
            worst = worst.max((north * s).norm()).max((south * s).norm());
        }
        worst
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CoefficientDump::from(self)).expect("coefficient dump serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let dump: CoefficientDump = serde_json::from_str(s)?;
        dump.try_into()
    }
}

/// JSON layout: `{"N": n, "alpha": [[[re, im], ...], ...], "beta": [...]}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct CoefficientDump {
    #[serde(rename = "N")]
    pub n: usize,
    pub alpha: Vec<Vec<[f64; 2]>>,
    pub beta: Vec<Vec<[f64; 2]>>,
}

impl From<&InterpolantCoefficients> for CoefficientDump {
    fn from(c: &InterpolantCoefficients) -> Self {
        let pairs = |row: &[Complex64]| row.iter().map(|z| [z.re, z.im]).collect();
        CoefficientDump {
            n: c.n,
            alpha: (0..c.n).map(|r| pairs(c.alpha_row(r))).collect(),
            beta: (0..c.n).map(|r| pairs(c.beta_row(r))).collect(),
        }
    }
}

impl TryFrom<CoefficientDump> for InterpolantCoefficients {
    type Error = Error;

    fn try_from(d: CoefficientDump) -> Result<Self> {
        let flat = |rows: Vec<Vec<[f64; 2]>>| {
            rows.into_iter()
                .flatten()
                .map(|[re, im]| Complex64::new(re, im))
                .collect::<Vec<_>>()
        };
        if d.alpha.len() != d.n || d.beta.len() != d.n {
            return Err(Error::InvalidArgument(format!(
                "coefficient dump for N={} must have {} alpha and beta rows",
                d.n, d.n
            )));
        }
        let n = d.n;
        InterpolantCoefficients::from_parts(n, flat(d.alpha), flat(d.beta))
    }
}

/// Outcome of a spherical-polynomial reproduction trial.
#[derive(Debug, Clone, Copy)]
pub struct ReproduceReport {
    pub max_deviation: f64,
    /// Largest modulus among the random harmonic coefficients.
    pub coefficient_scale: f64,
}

/// A uniformly distributed point on the sphere as `(theta, phi)`.
pub fn random_sphere_point<R: Rng>(rng: &mut R) -> (f64, f64) {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    (z.acos(), rng.gen_range(0.0..2.0 * PI))
}

/// Interpolates a random combination of `Y_n^m` (`n <= degree`) on the
/// order-`n` grid and reports the worst deviation at `trials` random points.
pub fn reproduce_check(n: usize, degree: u32, trials: usize, seed: u64) -> Result<ReproduceReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms: Vec<(HarmonicIndex, Complex64)> = HarmonicIndex::up_to(degree)
        .map(|idx| {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (idx, c)
        })
        .collect();
    let coefficient_scale = terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
    let samples = SphericalSamples::from_fn(n, |t, p| eval_combination(&terms, t, p))?;
    let coeffs = InterpolantCoefficients::build(&samples)?;
    let mut max_deviation: f64 = 0.0;
    for _ in 0..trials {
        let (t, p) = random_sphere_point(&mut rng);
        let dev = (coeffs.evaluate(t, p) - eval_combination(&terms, t, p)).norm();
        max_deviation = max_deviation.max(dev);
    }
    Ok(ReproduceReport {
        max_deviation,
        coefficient_scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn random_valid_samples(n: usize, seed: u64) -> SphericalSamples {
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

    fn max_rel_grid_error(s: &SphericalSamples, q: &InterpolantCoefficients) -> f64 {
        let g = s.grid();
        let mut worst: f64 = 0.0;
        for j in 0..g.n_theta() {
            for k in 0..g.n_phi() {
                let e = (q.evaluate(g.theta(j), g.phi(k)) - s.get(j, k)).norm();
                worst = worst.max(e);
            }
        }
        worst / s.max_abs()
    }

    #[test]
    fn constant_function() {
        let s = SphericalSamples::from_fn(6, |_, _| c(2.5)).unwrap();
        let q = InterpolantCoefficients::build(&s).unwrap();
        assert!((q.alpha_row(0)[0] - c(2.5 * 6.0)).norm() < 1e-13);
        let rest_alpha = (0..6)
            .flat_map(|r| q.alpha_row(r).iter().skip(if r == 0 { 1 } else { 0 }))
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let all_beta = (0..6)
            .flat_map(|r| q.beta_row(r))
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(rest_alpha < 1e-13 && all_beta < 1e-13);
        for (t, p) in [(0.0, 0.0), (0.3, 4.0), (2.0, -1.0), (PI, 1.0)] {
            assert!((q.evaluate(t, p) - c(2.5)).norm() < 1e-13);
        }
    }

    #[test]
    fn degree_one_polynomial_is_exact() {
        let s = SphericalSamples::from_fn(5, |t, p| c(t.sin() * p.sin())).unwrap();
        let q = InterpolantCoefficients::build(&s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let (t, p) = random_sphere_point(&mut rng);
            assert!((q.evaluate(t, p) - c(t.sin() * p.sin())).norm() < 1e-12);
        }
    }

    #[test]
    fn interpolation_condition_even_and_odd_orders() {
        for n in [2, 3, 4, 5, 6, 7, 12, 13] {
            let s = random_valid_samples(n, n as u64);
            let q = InterpolantCoefficients::build(&s).unwrap();
            assert!(max_rel_grid_error(&s, &q) < 1e-11, "N={n}");
            assert!(q.pole_defect() < 1e-12, "N={n}");
        }
    }

    #[test]
    fn sphere_well_defined() {
        let s = random_valid_samples(9, 11);
        let q = InterpolantCoefficients::build(&s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let t = rng.gen_range(-4.0..4.0);
            let p = rng.gen_range(-7.0..7.0);
            assert!((q.evaluate(t, p) - q.evaluate(-t, p + PI)).norm() < 1e-12);
        }
    }

    #[test]
    fn bin_frequencies_cover_the_band() {
        for n in [2usize, 3, 8, 9] {
            let mut f: Vec<i64> = (0..2 * n).map(|b| bin_frequency(b, n)).collect();
            f.sort();
            let expected: Vec<i64> = (-(n as i64) + 1..=n as i64).collect();
            assert_eq!(f, expected);
        }
    }

    #[test]
    fn refined_grid_matches_pointwise() {
        let s = random_valid_samples(4, 21);
        let q = InterpolantCoefficients::build(&s).unwrap();
        let same = q.evaluate_grid(1).unwrap();
        for (a, b) in same.values().iter().zip(s.values()) {
            assert!((a - b).norm() < 1e-12);
        }
        for m in [2, 3] {
            let fine = q.evaluate_grid(m).unwrap();
            let g = fine.grid();
            for j in 0..g.n_theta() {
                for k in 0..g.n_phi() {
                    let e = (fine.get(j, k) - q.evaluate(g.theta(j), g.phi(k))).norm();
                    assert!(e < 1e-11, "M={m} ({j},{k}) err {e}");
                }
            }
        }
        let one = SphericalSamples::from_fn(5, |_, _| c(-1.0)).unwrap();
        let fine = InterpolantCoefficients::build(&one)
            .unwrap()
            .evaluate_grid(3)
            .unwrap();
        assert!(fine.values().iter().all(|z| (z - c(-1.0)).norm() < 1e-13));
        assert!(q.evaluate_grid(0).is_err());
    }

    #[test]
    fn partials_match_finite_differences() {
        let s = random_valid_samples(6, 2);
        let q = InterpolantCoefficients::build(&s).unwrap();
        let h = 1e-6;
        for (t, p) in [(0.4, 1.1), (1.7, 5.0), (2.9, 0.2)] {
            let (_, dt, dp) = q.evaluate_with_partials(t, p);
            let fdt = (q.evaluate(t + h, p) - q.evaluate(t - h, p)) / (2.0 * h);
            let fdp = (q.evaluate(t, p + h) - q.evaluate(t, p - h)) / (2.0 * h);
            assert!((dt - fdt).norm() < 1e-6 && (dp - fdp).norm() < 1e-6);
        }
    }

    #[test]
    fn json_dump_shape_and_round_trip() {
        let s = random_valid_samples(16, 4);
        let q = InterpolantCoefficients::build(&s).unwrap();
        let json = q.to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["N"], 16);
        assert_eq!(v["alpha"].as_array().unwrap().len(), 16);
        assert_eq!(v["alpha"][0].as_array().unwrap().len(), 17);
        assert_eq!(v["beta"][3].as_array().unwrap().len(), 15);
        assert_eq!(InterpolantCoefficients::from_json(&json).unwrap(), q);
    }

    #[test]
    fn reproduction_low_degree() {
        let r = reproduce_check(4, 0, 100, 1).unwrap();
        assert!(r.max_deviation < 1e-15 * r.coefficient_scale.max(1.0) * 10.0);
        let r = reproduce_check(8, 7, 300, 2).unwrap();
        assert!(r.max_deviation < 1e-10 * r.coefficient_scale);
        // degree N aliases: not reproduced
        let r = reproduce_check(8, 8, 300, 2).unwrap();
        assert!(r.max_deviation > 1e-6);
    }
}
