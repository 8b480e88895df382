//! The amplitude-level model of one teleportation step.
//!
//! A step consumes the input qubit and an entangled resource of size `n`, and
//! produces one of `n + 2` classical outcomes: the number m of vertically
//! polarized photons the sender detects. For 1 ≤ m ≤ n the (phase-corrected)
//! qubit reappears in the receiver's mode n + m with amplitudes
//! (α c(m), β c(m−1))/√p(m); m = 0 and m = n+1 collapse the qubit onto a
//! single rail and the step fails.

use num_complex::Complex64;

use crate::error::{clamp_probability, Result};
use crate::qubit::{QubitState, Rail};
use crate::resource::ResourceSpec;

/// What a single outcome leaves the receiver with.
#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    /// Teleportation succeeded; the renormalized post-measurement qubit.
    Success(QubitState),
    /// m = 0 or m = n+1: the input collapsed onto the given rail.
    Failed(Rail),
}

impl StepOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, StepOutcome::Success(_))
    }
}

/// One row of the outcome distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeEntry {
    /// Detected count of vertically polarized photons, 0..=n+1.
    pub m: usize,
    /// p(m) = |α c(m)|² + |β c(m−1)|².
    pub prob: f64,
    /// Post-measurement state, or the collapsed rail on failure.
    pub outcome: StepOutcome,
    /// Mode n + m where the qubit reappears on success.
    pub bob_mode_index: usize,
}

/// The full distribution over the n + 2 outcomes of one step.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    n: usize,
    entries: Vec<OutcomeEntry>,
}

impl OutcomeDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[OutcomeEntry] {
        &self.entries
    }

    pub fn entry(&self, m: usize) -> &OutcomeEntry {
        &self.entries[m]
    }

    /// Total probability mass of the success outcomes 1..=n.
    pub fn success_probability(&self) -> f64 {
        self.entries[1..=self.n].iter().map(|e| e.prob).sum()
    }

    /// Total probability over all outcomes; 1 up to rounding.
    pub fn total_probability(&self) -> f64 {
        self.entries.iter().map(|e| e.prob).sum()
    }
}

/// Performs one teleportation step, returning the exact distribution over
/// the sender's measurement outcomes together with the conditional states.
pub fn teleport_step(input: &QubitState, res: &ResourceSpec) -> Result<OutcomeDistribution> {
    let n = res.n();
    let (alpha, beta) = (input.amp_h(), input.amp_v());
    let mut entries = Vec::with_capacity(n + 2);
    for m in 0..=(n + 1) {
        let c_m = res.amp_or_zero(m as isize);
        let c_m1 = res.amp_or_zero(m as isize - 1);
        let amp_h = alpha * c_m;
        let amp_v = beta * c_m1;
        let prob = clamp_probability(amp_h.norm_sqr() + amp_v.norm_sqr())?;
        let outcome = if m == 0 {
            StepOutcome::Failed(Rail::Horizontal)
        } else if m == n + 1 {
            StepOutcome::Failed(Rail::Vertical)
        } else {
            StepOutcome::Success(post_state(amp_h, amp_v, input))
        };
        entries.push(OutcomeEntry {
            m,
            prob,
            outcome,
            bob_mode_index: n + m,
        });
    }
    Ok(OutcomeDistribution { n, entries })
}

/// Renormalizes the conditional amplitudes. A zero-probability success
/// branch never occurs; its reported state defaults to the input.
fn post_state(amp_h: Complex64, amp_v: Complex64, input: &QubitState) -> QubitState {
    QubitState::normalized(amp_h, amp_v).unwrap_or(*input)
}
