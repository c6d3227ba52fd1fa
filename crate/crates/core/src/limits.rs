//! Size guards shared by the enumeration kernels.

/// Environment variable that overrides [`Limits::max_points`].
pub const MAX_POINTS_ENV: &str = "ORTHOINV_MAX_POINTS";

/// Caps on problem sizes. Every enumeration checks its cap up front and fails
/// with [`crate::Error::CapExceeded`] instead of running for hours.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest `2m` for which matchings are enumerated.
    pub max_points: usize,
    /// Largest `2m` for the Burnside brute-force oracle.
    pub brute_points: usize,
    /// Largest `2m` for the fully naive (every permutation) Burnside mode.
    pub naive_points: usize,
    /// Largest `2m` accepted by canonicalisation.
    pub canonical_points: usize,
    /// Largest number of tuples canonicalised by orbit enumeration.
    pub max_tuples: u128,
    /// Scalar multiplies allowed in one polynomial evaluation.
    pub eval_budget: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_points: 16,
            brute_points: 8,
            naive_points: 8,
            canonical_points: 12,
            max_tuples: 20_000_000,
            eval_budget: 100_000_000,
        }
    }
}

impl Limits {
    /// Defaults, with `max_points` taken from `ORTHOINV_MAX_POINTS` when set.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Some(v) = std::env::var(MAX_POINTS_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
        {
            limits.max_points = v;
        }
        limits
    }
}
