//! FFT-based interpolation and oscillatory cubature on the unit sphere.
//!
//! Functions sampled on the uniform grid `theta_j = j pi / N`,
//! `phi_k = k pi / N` are interpolated by a trigonometric ansatz whose
//! coefficients come from one FFT per latitude and one DCT-I/DST-I per
//! azimuthal mode, in `O(N^2 log N)` and without forming a matrix.
//!
//! ```
//! use spherefft_core::{builtin, sample, InterpolantCoefficients};
//!
//! let f = builtin("F1").unwrap();
//! let q = InterpolantCoefficients::build(&sample(&f, 16).unwrap()).unwrap();
//! let (t, p) = (0.7, 2.1);
//! assert!((q.evaluate(t, p) - f.eval(t, p)).norm() < 1e-8);
//! ```

pub mod cubature;
pub mod error;
pub mod harmonics;
pub mod hypothesis;
pub mod interpolant;
pub mod norms;
pub mod quadrature;
pub mod sphere_grid;
pub mod transforms;

pub use num_complex::Complex64;

pub use cubature::{integrate, moments, rate_table, CubatureResult, MomentVector, RateTable};
pub use error::{Error, Result};
pub use harmonics::{spherical_harmonic, HarmonicIndex};
pub use hypothesis::{c_h, verify_range, ChebyshevGram, HypothesisReport, HypothesisRow};
pub use interpolant::{InterpolantBuilder, InterpolantCoefficients, ModeProfile};
pub use norms::{
    convergence_table, eoc, h0_norm, h1_norm, interpolation_error, interpolation_errors,
    ErrorRecord, Norm, NormQuadrature,
};
pub use sphere_grid::{
    builtin, builtin_names, read_samples, sample, write_samples, SampleFormat, SphericalGrid,
    SphericalSamples, TestFunction,
};
