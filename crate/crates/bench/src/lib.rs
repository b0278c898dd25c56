//! Benchmark fixtures shared by the criterion targets.

use spherefft_core::{builtin, sample, SphericalSamples};

/// Samples of the smooth test function on the order-`n` grid.
pub fn smooth_samples(n: usize) -> SphericalSamples {
    sample(&builtin("F1").expect("built-in"), n).expect("valid order")
}
