//! Scalar abstraction for correlation scores and classifier log-probabilities.

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar used for all score math: `f32` or `f64`.
///
/// Count tables stay integral everywhere; only the derived statistics
/// (correlations, log-likelihoods, accuracies) are generic over this trait.
pub trait Real: Float + FromPrimitive + std::fmt::Debug + Send + Sync + 'static {
    /// Lossless for counts below the mantissa width; callers that pick `f32`
    /// accept rounding above 2^24.
    fn from_count(count: u64) -> Self {
        Self::from_u64(count).unwrap_or_else(Self::max_value)
    }
}

impl Real for f32 {}
impl Real for f64 {}
