//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Resource states are defined for even photon-pair counts n ≥ 2.
    #[error("resource size must be a positive even integer, got {0}")]
    InvalidResourceSize(usize),

    /// Geometric-family ratio must be strictly positive.
    #[error("geometric ratio must be > 0, got {0}")]
    NonPositiveRatio(f64),

    /// Amplitudes failed the nonnegativity or normalization invariant.
    #[error("invalid resource amplitudes: {0}")]
    InvalidAmplitudes(String),

    /// Qubit amplitudes do not satisfy |amp_h|^2 + |amp_v|^2 = 1.
    #[error("qubit state not normalized: |amp|^2 sums to {0}")]
    NotNormalized(f64),

    /// Both rail weights of a filter were zero; no state survives.
    #[error("degenerate state: both rail weights are zero")]
    DegenerateState,

    /// A computed probability left [0, 1] by more than the clamping slack.
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    /// A strategy was queried past the number of steps it defines.
    #[error("history of length {len} exceeds strategy horizon of {horizon} steps")]
    HistoryTooLong { len: usize, horizon: usize },

    /// An outcome in a history is outside the success range 1..=n.
    #[error("outcome {m} outside success range 1..={n}")]
    OutcomeOutOfRange { m: usize, n: usize },

    /// Resource sizes along a chain (or against a history) disagree.
    #[error("resource size mismatch: expected {expected}, got {got}")]
    ResourceSizeMismatch { expected: usize, got: usize },

    /// Chain weights collapsed to zero; no adapted resource exists.
    #[error("degenerate chain weights: a(1) = {a1}, a(0) = {a0}")]
    DegenerateWeights { a1: f64, a0: f64 },

    /// A chain was declared with zero steps or zero resources.
    #[error("chain must have at least one step")]
    EmptyChain,

    /// Exact enumeration would visit more paths than the configured cap.
    #[error("enumeration of {paths} paths exceeds cap of {cap}")]
    EnumerationTooLarge { paths: u128, cap: u64 },

    /// A chain evaluated without filtering hit a non-faithful success path.
    #[error("success path {path:?} is not faithful: rail weights {a1} vs {a0}")]
    UnfaithfulPath { path: Vec<usize>, a1: f64, a0: f64 },

    /// The objective returned NaN or infinity during optimization.
    #[error("objective is not finite at q = {0}")]
    NonFiniteObjective(f64),

    /// The chain-length sweep must reach past the q = 1 regime.
    #[error("crossover sweep needs max_m >= 6, got {0}")]
    CrossoverTooShort(usize),

    /// A simulation was requested with zero samples.
    #[error("simulation needs at least one sample")]
    NoSamples,

    /// The full Fock-space model is capped at small resource sizes.
    #[error("Fock-space model supports n <= {cap}, got {n}")]
    FockTooLarge { n: usize, cap: usize },

    /// Bob's conditional state did not have the expected single-qubit form.
    #[error("qubit extraction failed for pattern {pattern:?}: {reason}")]
    ExtractionFailed { pattern: Vec<(u8, u8)>, reason: String },

    /// The Fock-space model disagreed with the amplitude-level model.
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

/// Clamps a probability to [0, 1] when it is within `1e-12` of the interval,
/// and errors when it strays further.
pub(crate) fn clamp_probability(p: f64) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else if (-SLACK..0.0).contains(&p) {
        Ok(0.0)
    } else if p > 1.0 && p <= 1.0 + SLACK {
        Ok(1.0)
    } else {
        Err(Error::InvalidProbability(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamp_accepts_interior_and_near_boundary() {
        assert_eq!(clamp_probability(0.5).unwrap(), 0.5);
        assert_eq!(clamp_probability(-5e-13).unwrap(), 0.0);
        assert_eq!(clamp_probability(1.0 + 5e-13).unwrap(), 1.0);
    }

    #[test]
    fn clamp_rejects_out_of_range() {
        assert!(matches!(
            clamp_probability(1.1),
            Err(Error::InvalidProbability(_))
        ));
        assert!(matches!(
            clamp_probability(-1e-6),
            Err(Error::InvalidProbability(_))
        ));
    }
}
