//! The uniform latitude/longitude grid, sample containers and test functions.

mod functions;
mod io;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use functions::{builtin, builtin_names, Evaluator, TestFunction};
pub use io::{read_samples, read_samples_from, write_samples, write_samples_to, SampleFormat};

/// Relative tolerance for pole-row consistency, scaled by `max |F|`.
pub const POLE_RTOL: f64 = 1e-12;

/// Cartesian image of the parametrization `(sin t cos p, sin t sin p, cos t)`.
pub fn to_cartesian(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Grid `theta_j = j pi / N` (`j = 0..=N`), `phi_k = k pi / N` (`k = 0..2N`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphericalGrid {
    n: usize,
}

impl SphericalGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid order N must be >= 2, got {n}"
            )));
        }
        Ok(SphericalGrid { n })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn n_theta(&self) -> usize {
        self.n + 1
    }

    pub fn n_phi(&self) -> usize {
        2 * self.n
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * PI / self.n as f64
    }

    pub fn phi(&self, k: usize) -> f64 {
        k as f64 * PI / self.n as f64
    }

    pub fn point(&self, j: usize, k: usize) -> [f64; 3] {
        to_cartesian(self.theta(j), self.phi(k))
    }

    /// Number of distinct sphere points: both pole rows collapse to one point.
    pub fn distinct_points(&self) -> usize {
        2 * self.n * (self.n - 1) + 2
    }

    /// Dimension of the interpolation space; equals [`Self::distinct_points`].
    pub fn space_dimension(&self) -> usize {
        2 * self.n * self.n - 2 * self.n + 2
    }
}

/// Complex samples `F(theta_j, phi_k)` stored row-major, `(N+1) x 2N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalSamples {
    n: usize,
    values: Vec<Complex64>,
}

impl SphericalSamples {
    /// Wraps a row-major value array. Pole consistency is not checked here,
    /// see [`Self::check_poles`].
    pub fn from_values(n: usize, values: Vec<Complex64>) -> Result<Self> {
        SphericalGrid::new(n)?;
        let expected = (n + 1) * 2 * n;
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                what: "sample matrix",
                expected,
                actual: values.len(),
            });
        }
        if let Some(pos) = values
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite {
                j: pos / (2 * n),
                k: pos % (2 * n),
            });
        }
        Ok(SphericalSamples { n, values })
    }

    /// Pole-consistent samples with real and imaginary parts uniform in
    /// `[-1, 1)`, reproducible from `seed`.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        let grid = SphericalGrid::new(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let cols = grid.n_phi();
        let mut values = Vec::with_capacity(grid.n_theta() * cols);
        values.extend(std::iter::repeat_n(draw(), cols));
        values.extend((0..(n - 1) * cols).map(|_| draw()));
        values.extend(std::iter::repeat_n(draw(), cols));
        Ok(SphericalSamples { n, values })
    }

    /// Samples an arbitrary function on the grid. Each pole is evaluated once
    /// (at `phi = 0`) and broadcast across its row.
    pub fn from_fn<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Complex64,
    {
        let grid = SphericalGrid::new(n)?;
        let cols = grid.n_phi();
        let mut values = Vec::with_capacity(grid.n_theta() * cols);
        for j in 0..=n {
            if j == 0 || j == n {
                let v = f(grid.theta(j), 0.0);
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::NonFinite { j, k: 0 });
                }
                values.extend(std::iter::repeat_n(v, cols));
                continue;
            }
            let theta = grid.theta(j);
            for k in 0..cols {
                let v = f(theta, grid.phi(k));
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::NonFinite { j, k });
                }
                values.push(v);
            }
        }
        Ok(SphericalSamples { n, values })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> SphericalGrid {
        SphericalGrid { n: self.n }
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.values[j * 2 * self.n + k]
    }

    pub fn row(&self, j: usize) -> &[Complex64] {
        let cols = 2 * self.n;
        &self.values[j * cols..(j + 1) * cols]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation from the first entry along the north and south pole rows.
    pub fn pole_deviation(&self) -> (f64, f64) {
        let dev = |row: &[Complex64]| row.iter().map(|z| (z - row[0]).norm()).fold(0.0, f64::max);
        (dev(self.row(0)), dev(self.row(self.n)))
    }

    pub fn default_pole_tolerance(&self) -> f64 {
        POLE_RTOL * self.max_abs()
    }

    /// Checks both pole rows against `tolerance`.
    pub fn check_poles(&self, tolerance: f64) -> Result<()> {
        let (north, south) = self.pole_deviation();
        for (row, deviation) in [(0, north), (self.n, south)] {
            if deviation > tolerance {
                return Err(Error::PoleInconsistent {
                    row,
                    deviation,
                    tolerance,
                });
            }
        }
        Ok(())
    }

    pub fn conj(&self) -> Self {
        SphericalSamples {
            n: self.n,
            values: self.values.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale_add(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::InvalidArgument(format!(
                "sample orders differ: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(SphericalSamples {
            n: self.n,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }
}

/// Samples `f` on the order-`n` grid.
pub fn sample(f: &TestFunction, n: usize) -> Result<SphericalSamples> {
    SphericalSamples::from_fn(n, |t, p| f.eval(t, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_samples_are_reproducible_and_pole_consistent() {
        let a = SphericalSamples::random(6, 3).unwrap();
        assert_eq!(a.values(), SphericalSamples::random(6, 3).unwrap().values());
        assert_ne!(a.values(), SphericalSamples::random(6, 4).unwrap().values());
        assert_eq!(a.pole_deviation(), (0.0, 0.0));
        assert!(SphericalSamples::random(1, 0).is_err());
    }

    #[test]
    fn grid_nodes() {
        let g = SphericalGrid::new(4).unwrap();
        assert_eq!(g.theta(0), 0.0);
        assert!((g.theta(4) - PI).abs() < 1e-15);
        assert_eq!(g.n_phi(), 8);
        assert_eq!(g.distinct_points(), g.space_dimension());
        assert!(SphericalGrid::new(1).is_err());
    }

    #[test]
    fn distinct_point_count_by_dedup() {
        for n in 2..=16 {
            let g = SphericalGrid::new(n).unwrap();
            let mut pts: Vec<[f64; 3]> = Vec::new();
            for j in 0..=n {
                for k in 0..2 * n {
                    let p = g.point(j, k);
                    let dup = pts
                        .iter()
                        .any(|q| (0..3).map(|i| (p[i] - q[i]).abs()).fold(0.0, f64::max) < 1e-12);
                    if !dup {
                        pts.push(p);
                    }
                }
            }
            assert_eq!(pts.len(), g.distinct_points(), "N={n}");
        }
    }

    #[test]
    fn constant_sampling() {
        let s = SphericalSamples::from_fn(4, |_, _| Complex64::new(1.0, 0.0)).unwrap();
        assert!(s.values().iter().all(|z| *z == Complex64::new(1.0, 0.0)));
        assert_eq!(s.values().len(), 5 * 8);
    }

    #[test]
    fn pole_rows_are_broadcast() {
        // phi-dependent at the pole on purpose; sampling must still give constant rows
        let s = SphericalSamples::from_fn(6, |t, p| Complex64::new(t.cos() + p, 0.0)).unwrap();
        assert_eq!(s.pole_deviation(), (0.0, 0.0));
    }

    #[test]
    fn non_finite_reports_position() {
        let err = SphericalSamples::from_fn(4, |t, p| {
            if t > 0.5 && p > 1.0 {
                Complex64::new(f64::NAN, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap_err();
        assert!(matches!(err, Error::NonFinite { j: 1, k: 2 }), "{err:?}");
    }

    #[test]
    fn inconsistent_pole_detected() {
        let mut values = vec![Complex64::new(1.0, 0.0); 3 * 4];
        values[1] = Complex64::new(1.001, 0.0);
        let s = SphericalSamples::from_values(2, values).unwrap();
        let err = s.check_poles(s.default_pole_tolerance()).unwrap_err();
        assert!(matches!(err, Error::PoleInconsistent { row: 0, .. }));
    }

    #[test]
    fn f1_on_equator() {
        let f = builtin("F1").unwrap();
        let s = sample(&f, 4).unwrap();
        // theta_2 = pi/2, phi_0 = 0
        assert!((s.get(2, 0).re - 0.2).abs() < 1e-15);
    }
}
