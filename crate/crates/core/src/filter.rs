//! Local filtering: the two-outcome generalized measurement that undoes an
//! amplitude distortion.
//!
//! A chain of steps leaves the qubit in the unnormalized state
//! (A·α, B·β) with accumulated rail weights A, B. The success Kraus operator
//! attenuates the heavier rail down to the lighter one, e.g. for A > B it is
//! (B/A)|H⟩⟨H| + |V⟩⟨V|, restoring the original qubit exactly. The failure
//! operator destroys the state. The joint probability of reaching the
//! distorted state *and* passing the filter is min{A², B²}, independent of
//! the input qubit.

use crate::error::{Error, Result};
use crate::qubit::{QubitState, Rail};

/// Outcome of applying the recovery filter.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterResult {
    /// Joint probability of the distortion occurring and the filter
    /// succeeding: min{A², B²}.
    pub success_prob: f64,
    /// State after a successful filter; the original qubit up to global phase.
    pub post_on_success: QubitState,
    /// Which rail the success operator attenuated, if any.
    pub attenuated: Option<Rail>,
}

/// Filters the distorted state (A·α, B·β) back to the original qubit.
///
/// `weight_h` is A, `weight_v` is B; both must be nonnegative and not both
/// zero. The returned probability is the squared norm of the success Kraus
/// operator applied to the unnormalized state, which collapses to
/// min{A², B²} for any normalized input.
pub fn filter_to_target(
    original: &QubitState,
    weight_h: f64,
    weight_v: f64,
) -> Result<FilterResult> {
    if weight_h < 0.0 || weight_v < 0.0 || !weight_h.is_finite() || !weight_v.is_finite() {
        return Err(Error::InvalidAmplitudes(format!(
            "rail weights must be finite and nonnegative, got ({weight_h}, {weight_v})"
        )));
    }
    if weight_h == 0.0 && weight_v == 0.0 {
        return Err(Error::DegenerateState);
    }
    let (scale, attenuated) = if weight_h > weight_v {
        (weight_v, Some(Rail::Horizontal))
    } else if weight_v > weight_h {
        (weight_h, Some(Rail::Vertical))
    } else {
        (weight_h, None)
    };
    // E_S maps (A·α, B·β) to scale·(α, β); renormalizing recovers the input.
    let post_h = original.amp_h() * scale;
    let post_v = original.amp_v() * scale;
    let success_prob = post_h.norm_sqr() + post_v.norm_sqr();
    let post_on_success = if success_prob > 0.0 {
        QubitState::normalized(post_h, post_v)?
    } else {
        // min rail weight is zero: the filter never succeeds.
        *original
    };
    Ok(FilterResult {
        success_prob,
        post_on_success,
        attenuated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    #[test]
    fn equal_weights_are_identity() {
        let q = QubitState::plus();
        let r = filter_to_target(&q, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(r.success_prob, 1.0, epsilon = 1e-15);
        assert_eq!(r.attenuated, None);
        assert_abs_diff_eq!(r.post_on_success.fidelity(&q), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn success_prob_is_min_weight_for_every_input() {
        // A² = 2/3, B² = 1/3 gives 1/3 regardless of the qubit.
        let (a, b) = ((2.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt());
        for k in 0..25 {
            let theta = 0.13 * k as f64;
            let phi = 0.71 * k as f64;
            let q = QubitState::new(
                Complex64::new(theta.cos(), 0.0),
                Complex64::from_polar(theta.sin(), phi),
            )
            .unwrap();
            let r = filter_to_target(&q, a, b).unwrap();
            assert_abs_diff_eq!(r.success_prob, 1.0 / 3.0, epsilon = 1e-13);
            assert_eq!(r.attenuated, Some(Rail::Horizontal));
            assert_abs_diff_eq!(r.post_on_success.fidelity(&q), 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn mirror_case_attenuates_vertical() {
        let (a, b) = ((1.0f64 / 3.0).sqrt(), (2.0f64 / 3.0).sqrt());
        let r = filter_to_target(&QubitState::plus(), a, b).unwrap();
        assert_abs_diff_eq!(r.success_prob, 1.0 / 3.0, epsilon = 1e-13);
        assert_eq!(r.attenuated, Some(Rail::Vertical));
    }

    #[test]
    fn both_zero_weights_rejected() {
        assert_eq!(
            filter_to_target(&QubitState::plus(), 0.0, 0.0),
            Err(Error::DegenerateState)
        );
    }

    #[test]
    fn one_zero_weight_never_succeeds() {
        let r = filter_to_target(&QubitState::plus(), 0.0, 1.0).unwrap();
        assert_eq!(r.success_prob, 0.0);
    }
}
