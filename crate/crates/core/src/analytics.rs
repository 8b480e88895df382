//! Closed-form success probabilities and exact enumeration of outcome
//! sequences.
//!
//! The enumerator walks every all-success outcome sequence of a chain and
//! accumulates exact path weights; the closed forms are independent algebraic
//! routes to the same numbers. Keeping both allows each to check the other to
//! full double precision.

use rayon::prelude::*;

use crate::error::{clamp_probability, Error, Result};
use crate::resource::{ResourceSpec, UNIT_RATIO_TOL};
use crate::strategies::{History, StepPlan, StrategyKind};

/// Hard cap on the number of enumerated success paths (nᴹ).
pub const MAX_ENUMERATION_PATHS: u64 = 10_000_000;

/// Relative tolerance when checking that an unfiltered success path is
/// faithful (equal rail weights).
const FAITHFUL_REL_TOL: f64 = 1e-9;

/// Probability of faithful adaptive double teleportation with the peaked
/// first resource of ratio q, maximized resource pairing on the second step.
///
/// Returns the q → 1 limit (n/(n+1))² within [`UNIT_RATIO_TOL`] of 1, where
/// the closed form is 0/0.
pub fn p_adaptive_double(n: usize, q: f64) -> Result<f64> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidResourceSize(n));
    }
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::NonPositiveRatio(q));
    }
    if (q - 1.0).abs() < UNIT_RATIO_TOL {
        let r = n as f64 / (n as f64 + 1.0);
        return Ok(r * r);
    }
    let half = (n / 2) as i32;
    let p = 2.0 * (q - q.powi(half + 1)) / (2.0 - q.powi(half) * (1.0 + q))
        * (q.powi(n as i32) - 1.0)
        / (q.powi(n as i32 + 1) - 1.0);
    clamp_probability(p)
}

/// Probability of faithful teleportation through `m_steps` identical steps
/// with the symmetric n = 2 resource of ratio q, errors corrected by a final
/// filter:
///
/// p = (2+q)⁻ᴹ Σᵢ C(M, i) · min{q^(M−i), q^i}
///
/// Evaluated term-wise in log space so that large M neither underflows nor
/// overflows.
pub fn p_identical_chain_closed(m_steps: usize, q: f64) -> Result<f64> {
    if m_steps == 0 {
        return Err(Error::EmptyChain);
    }
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::NonPositiveRatio(q));
    }
    let ln_q = q.ln();
    let ln_norm = (2.0 + q).ln() * m_steps as f64;
    let mut ln_terms = Vec::with_capacity(m_steps + 1);
    let mut ln_binom = 0.0;
    for i in 0..=m_steps {
        if i > 0 {
            ln_binom += ((m_steps - i + 1) as f64).ln() - (i as f64).ln();
        }
        let ln_min = ((m_steps - i) as f64 * ln_q).min(i as f64 * ln_q);
        ln_terms.push(ln_binom + ln_min - ln_norm);
    }
    let max = ln_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = ln_terms.iter().map(|t| (t - max).exp()).sum();
    clamp_probability((max + sum.ln()).exp())
}

/// Maximal last-step success contribution with a rail-symmetric final
/// resource, given accumulated weights |a(1)|² = q·|a(0)|²:
/// |a(0)|²·(1+q)/(2+q) for q ≥ 1; q < 1 is handled by swapping rails.
pub fn p_last_step_sym(a0_sq: f64, q: f64) -> Result<f64> {
    check_last_step_args(a0_sq, q)?;
    if q < 1.0 {
        // Mirror case: the V rail is the heavy one.
        return p_last_step_sym(a0_sq * q, 1.0 / q);
    }
    clamp_probability(a0_sq * (1.0 + q) / (2.0 + q))
}

/// Last-step success contribution with the adapted monotone resource
/// (|b(n−1)|² = q·|b(n)|²): |a(0)|²·(1+q)/(1+q⁻¹+q). Meets the symmetric
/// value at q = 1 and exceeds it for q > 1.
pub fn p_last_step_adaptive(a0_sq: f64, q: f64) -> Result<f64> {
    check_last_step_args(a0_sq, q)?;
    if q < 1.0 {
        return p_last_step_adaptive(a0_sq * q, 1.0 / q);
    }
    clamp_probability(a0_sq * (1.0 + q) / (1.0 + 1.0 / q + q))
}

fn check_last_step_args(a0_sq: f64, q: f64) -> Result<()> {
    if !(a0_sq >= 0.0) || !a0_sq.is_finite() {
        return Err(Error::InvalidAmplitudes(format!(
            "squared rail weight must be finite and nonnegative, got {a0_sq}"
        )));
    }
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::NonPositiveRatio(q));
    }
    Ok(())
}

/// Where the chain's per-step resources come from.
#[derive(Debug, Clone, PartialEq)]
pub enum ResourceSource {
    /// Explicit resource per step.
    Fixed(Vec<ResourceSpec>),
    /// Resources chosen step by step from the measurement history.
    Strategy(StrategyKind),
}

/// A chain of teleportations to evaluate exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub steps: usize,
    pub source: ResourceSource,
    /// Apply the recovery filter after the last step. Without it every
    /// success path must already be faithful.
    pub final_filter: bool,
}

impl ChainSpec {
    /// Chain of `steps` identical copies of one resource.
    pub fn identical(resource: ResourceSpec, steps: usize, final_filter: bool) -> Self {
        Self {
            steps,
            source: ResourceSource::Strategy(StrategyKind::Identical { resource }),
            final_filter,
        }
    }

    /// Chain driven by a strategy, filtered exactly when the strategy
    /// requires it.
    pub fn for_strategy(kind: StrategyKind, steps: usize) -> Self {
        let final_filter = kind.requires_final_filter();
        Self {
            steps,
            source: ResourceSource::Strategy(kind),
            final_filter,
        }
    }

    fn n(&self) -> Result<usize> {
        match &self.source {
            ResourceSource::Fixed(list) => match list.first() {
                Some(first) => Ok(first.n()),
                None => Err(Error::EmptyChain),
            },
            ResourceSource::Strategy(kind) => Ok(kind.n()),
        }
    }

    fn validate(&self) -> Result<usize> {
        if self.steps == 0 {
            return Err(Error::EmptyChain);
        }
        let n = self.n()?;
        match &self.source {
            ResourceSource::Fixed(list) => {
                if list.len() != self.steps {
                    return Err(Error::ResourceSizeMismatch {
                        expected: self.steps,
                        got: list.len(),
                    });
                }
                for res in list {
                    if res.n() != n {
                        return Err(Error::ResourceSizeMismatch {
                            expected: n,
                            got: res.n(),
                        });
                    }
                }
            }
            ResourceSource::Strategy(kind) => {
                if let Some(h) = kind.horizon() {
                    if self.steps > h {
                        return Err(Error::HistoryTooLong {
                            len: self.steps,
                            horizon: h,
                        });
                    }
                }
            }
        }
        Ok(n)
    }

    fn plan_for(&self, hist: &History) -> Result<StepPlan> {
        match &self.source {
            ResourceSource::Fixed(list) => Ok(StepPlan {
                resource: list[hist.len()].clone(),
                pre_not: false,
                post_not: false,
            }),
            ResourceSource::Strategy(kind) => kind.next_resource(hist),
        }
    }
}

/// Exact probability that the chain succeeds faithfully: the sum over all
/// all-success outcome sequences of the path weight.
///
/// With `final_filter` each path contributes min of the two squared rail
/// weights; without it every success path must be faithful (equal rails) and
/// contributes the squared common weight. Paths are summed in a fixed order,
/// so the result is bit-stable across thread counts.
pub fn exact_chain_success(spec: &ChainSpec) -> Result<f64> {
    let n = spec.validate()?;
    let paths = (n as u128).pow(spec.steps as u32);
    if paths > MAX_ENUMERATION_PATHS as u128 {
        return Err(Error::EnumerationTooLarge {
            paths,
            cap: MAX_ENUMERATION_PATHS,
        });
    }
    // Parallelize over the first outcome; each branch walks sequentially and
    // branch totals are added in outcome order.
    let branch_totals: Vec<Result<f64>> = (1..=n)
        .into_par_iter()
        .map(|m1| {
            let mut hist = History::empty(n);
            let plan = spec.plan_for(&hist)?;
            let state = PathState::initial().through_step(&plan, m1);
            hist.push(m1)?;
            walk(spec, &mut hist, state)
        })
        .collect();
    let mut total = 0.0;
    for branch in branch_totals {
        total += branch?;
    }
    clamp_probability(total)
}

/// Rail weights carried along one enumeration path. `swapped` records NOT
/// gate parity: when true, the H-rail weight multiplies the input's β.
#[derive(Debug, Clone, Copy)]
struct PathState {
    f_h: f64,
    f_v: f64,
    swapped: bool,
}

impl PathState {
    fn initial() -> Self {
        Self {
            f_h: 1.0,
            f_v: 1.0,
            swapped: false,
        }
    }

    fn through_step(mut self, plan: &StepPlan, m: usize) -> Self {
        if plan.pre_not {
            self = self.swap();
        }
        self.f_h *= plan.resource.amp(m);
        self.f_v *= plan.resource.amp(m - 1);
        if plan.post_not {
            self = self.swap();
        }
        self
    }

    fn swap(self) -> Self {
        Self {
            f_h: self.f_v,
            f_v: self.f_h,
            swapped: !self.swapped,
        }
    }
}

fn walk(spec: &ChainSpec, hist: &mut History, state: PathState) -> Result<f64> {
    if hist.len() == spec.steps {
        return leaf_weight(spec, hist, state);
    }
    let n = hist.n();
    let plan = spec.plan_for(hist)?;
    let mut sum = 0.0;
    for m in 1..=n {
        hist.push(m)?;
        sum += walk(spec, hist, state.through_step(&plan, m))?;
        hist.pop();
    }
    Ok(sum)
}

fn leaf_weight(spec: &ChainSpec, hist: &History, state: PathState) -> Result<f64> {
    if spec.final_filter {
        let min = state.f_h.min(state.f_v);
        return Ok(min * min);
    }
    let scale = state.f_h.abs().max(state.f_v.abs()).max(f64::MIN_POSITIVE);
    if state.swapped || (state.f_h - state.f_v).abs() > FAITHFUL_REL_TOL * scale {
        return Err(Error::UnfaithfulPath {
            path: hist.outcomes().to_vec(),
            a1: state.f_h,
            a0: state.f_v,
        });
    }
    Ok(state.f_h * state.f_v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resource::{geometric_peak_resource, uniform_resource};
    use approx::assert_abs_diff_eq;

    #[test]
    fn adaptive_double_closed_form_values() {
        assert_abs_diff_eq!(
            p_adaptive_double(2, 1.29663).unwrap(),
            0.454167,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            p_adaptive_double(2, 1.0).unwrap(),
            4.0 / 9.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            p_adaptive_double(10, 1.10569).unwrap(),
            0.835820,
            epsilon = 1e-6
        );
    }

    #[test]
    fn adaptive_double_rejects_bad_ratio() {
        assert!(p_adaptive_double(2, 0.0).is_err());
        assert!(p_adaptive_double(2, -2.0).is_err());
        assert!(p_adaptive_double(3, 1.5).is_err());
    }

    #[test]
    fn identical_chain_closed_values() {
        assert_abs_diff_eq!(
            p_identical_chain_closed(1, 1.0).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            p_identical_chain_closed(2, 1.0).unwrap(),
            4.0 / 9.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            p_identical_chain_closed(2, 2.0).unwrap(),
            0.375,
            epsilon = 1e-14
        );
    }

    #[test]
    fn identical_chain_survives_large_m() {
        let p = p_identical_chain_closed(200, 1.3).unwrap();
        assert!(p > 0.0 && p < 1e-30);
    }

    #[test]
    fn last_step_formulas() {
        assert_abs_diff_eq!(p_last_step_sym(1.0, 1.0).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p_last_step_sym(1.0, 2.0).unwrap(), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(p_last_step_sym(0.5, 2.0).unwrap(), 0.375, epsilon = 1e-15);
        assert_abs_diff_eq!(
            p_last_step_adaptive(1.0, 1.0).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            p_last_step_adaptive(1.0, 2.0).unwrap(),
            1.0 / 3.5 * 3.0,
            epsilon = 1e-15
        );
        assert_eq!(p_last_step_adaptive(0.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn last_step_mirror_case_swaps_rails() {
        // q < 1 must agree with the swapped-rail evaluation.
        let direct = p_last_step_sym(1.0, 0.25).unwrap();
        let swapped = p_last_step_sym(0.25, 4.0).unwrap();
        assert_abs_diff_eq!(direct, swapped, epsilon = 1e-15);
    }

    #[test]
    fn enumeration_matches_adaptive_closed_form() {
        let spec = ChainSpec::for_strategy(StrategyKind::AdaptiveDouble { n: 2, q1: 1.29663 }, 2);
        let p = exact_chain_success(&spec).unwrap();
        assert_abs_diff_eq!(p, 0.454167, epsilon = 1e-6);
        assert_abs_diff_eq!(p, p_adaptive_double(2, 1.29663).unwrap(), epsilon = 1e-14);
    }

    #[test]
    fn enumeration_uniform_identical_two_steps() {
        let spec = ChainSpec::identical(uniform_resource(2).unwrap(), 2, true);
        assert_abs_diff_eq!(exact_chain_success(&spec).unwrap(), 4.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn enumeration_symmetric_identical_matches_closed_form() {
        let spec = ChainSpec::identical(geometric_peak_resource(2, 2.0).unwrap(), 2, true);
        let p = exact_chain_success(&spec).unwrap();
        assert_abs_diff_eq!(p, 0.375, epsilon = 1e-14);
        assert_abs_diff_eq!(p, p_identical_chain_closed(2, 2.0).unwrap(), epsilon = 1e-14);
    }

    #[test]
    fn unfiltered_nonuniform_identical_chain_is_unfaithful() {
        let spec = ChainSpec::identical(geometric_peak_resource(2, 2.0).unwrap(), 2, false);
        assert!(matches!(
            exact_chain_success(&spec),
            Err(Error::UnfaithfulPath { .. })
        ));
    }

    #[test]
    fn enumeration_cap_enforced() {
        let spec = ChainSpec::identical(uniform_resource(10).unwrap(), 8, true);
        assert!(matches!(
            exact_chain_success(&spec),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn fixed_list_length_must_match_steps() {
        let res = uniform_resource(2).unwrap();
        let spec = ChainSpec {
            steps: 3,
            source: ResourceSource::Fixed(vec![res.clone(), res]),
            final_filter: true,
        };
        assert!(matches!(
            exact_chain_success(&spec),
            Err(Error::ResourceSizeMismatch { .. })
        ));
    }

    #[test]
    fn empty_chain_rejected() {
        let spec = ChainSpec::identical(uniform_resource(2).unwrap(), 0, true);
        assert_eq!(exact_chain_success(&spec), Err(Error::EmptyChain));
    }
}
