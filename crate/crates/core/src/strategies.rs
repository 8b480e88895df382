//! Policies that pick the entangled resource for each step of a chain from
//! the measurement history.
//!
//! The interesting policies are adaptive: the resource used next depends on
//! the vertical-photon counts observed so far. `AdaptiveDouble` switches
//! between two monotone resources in a two-step chain; `NotGateDouble`
//! trades that choice for a pair of NOT gates around a fixed resource; and
//! `LastStepAdaptive` shapes the final resource of a longer chain so that it
//! cancels the accumulated distortion outright.

use crate::error::{Error, Result};
use crate::resource::{
    geometric_monotone_resource, geometric_peak_resource, ResourceSpec,
};

/// Vertical-photon counts of the completed (successful) steps of a chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    outcomes: Vec<usize>,
    n: usize,
}

impl History {
    /// Empty history for a chain using resources of size `n`.
    pub fn empty(n: usize) -> Self {
        Self {
            outcomes: Vec::new(),
            n,
        }
    }

    /// History from explicit outcomes, each in the success range 1..=n.
    pub fn new(n: usize, outcomes: Vec<usize>) -> Result<Self> {
        for &m in &outcomes {
            if m < 1 || m > n {
                return Err(Error::OutcomeOutOfRange { m, n });
            }
        }
        Ok(Self { outcomes, n })
    }

    /// Appends one successful outcome.
    pub fn push(&mut self, m: usize) -> Result<()> {
        if m < 1 || m > self.n {
            return Err(Error::OutcomeOutOfRange { m, n: self.n });
        }
        self.outcomes.push(m);
        Ok(())
    }

    /// Removes the most recent outcome (backtracking during enumeration).
    pub(crate) fn pop(&mut self) -> Option<usize> {
        self.outcomes.pop()
    }

    /// Drops all outcomes, keeping the resource size.
    pub(crate) fn clear(&mut self) {
        self.outcomes.clear();
    }

    pub fn outcomes(&self) -> &[usize] {
        &self.outcomes
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

/// Accumulated rail weights along a history: a(1) = Π c(mₖ) multiplies the
/// H rail, a(0) = Π c(mₖ − 1) the V rail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainWeights {
    pub a1: f64,
    pub a0: f64,
}

impl ChainWeights {
    /// Empty-product weights.
    pub fn unit() -> Self {
        Self { a1: 1.0, a0: 1.0 }
    }
}

/// Products of the realized resource amplitudes along a history.
pub fn chain_weights(hist: &History, resources: &[ResourceSpec]) -> Result<ChainWeights> {
    if resources.len() != hist.len() {
        return Err(Error::ResourceSizeMismatch {
            expected: hist.len(),
            got: resources.len(),
        });
    }
    let mut w = ChainWeights::unit();
    for (&m, res) in hist.outcomes().iter().zip(resources) {
        if res.n() != hist.n() {
            return Err(Error::ResourceSizeMismatch {
                expected: hist.n(),
                got: res.n(),
            });
        }
        w.a1 *= res.amp(m);
        w.a0 *= res.amp(m - 1);
    }
    Ok(w)
}

/// Resource-selection policy for a teleportation chain.
#[derive(Debug, Clone, PartialEq)]
pub enum StrategyKind {
    /// The same resource for every step; faithfulness is recovered by a
    /// final filter when the resource is not uniform.
    Identical { resource: ResourceSpec },
    /// Two steps: a peaked resource with ratio q1, then the monotone
    /// resource with ratio 1/q1 or q1 depending on the first outcome.
    AdaptiveDouble { n: usize, q1: f64 },
    /// Two steps: same first resource, but the second is always the
    /// decreasing one; outcomes above n/2 are compensated by NOT gates
    /// before and after the second step.
    NotGateDouble { n: usize, q1: f64 },
    /// `steps − 1` copies of `base`, then a monotone resource whose ratio
    /// cancels the accumulated rail distortion.
    LastStepAdaptive { base: ResourceSpec, steps: usize },
}

/// What a strategy prescribes for one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepPlan {
    pub resource: ResourceSpec,
    /// Apply NOT to the qubit before this step.
    pub pre_not: bool,
    /// Apply NOT to the qubit after this step.
    pub post_not: bool,
}

impl StepPlan {
    fn plain(resource: ResourceSpec) -> Self {
        Self {
            resource,
            pre_not: false,
            post_not: false,
        }
    }
}

impl StrategyKind {
    /// Resource size used by every step of this strategy.
    pub fn n(&self) -> usize {
        match self {
            StrategyKind::Identical { resource } => resource.n(),
            StrategyKind::AdaptiveDouble { n, .. } | StrategyKind::NotGateDouble { n, .. } => *n,
            StrategyKind::LastStepAdaptive { base, .. } => base.n(),
        }
    }

    /// Maximum number of steps the strategy defines, if bounded.
    pub fn horizon(&self) -> Option<usize> {
        match self {
            StrategyKind::Identical { .. } => None,
            StrategyKind::AdaptiveDouble { .. } | StrategyKind::NotGateDouble { .. } => Some(2),
            StrategyKind::LastStepAdaptive { steps, .. } => Some(*steps),
        }
    }

    /// Whether a chain run under this strategy ends with the recovery
    /// filter. Only the identical chain accumulates distortion; the
    /// adaptive strategies are faithful by construction. (For the uniform
    /// identical chain the filter is the identity.)
    pub fn requires_final_filter(&self) -> bool {
        matches!(self, StrategyKind::Identical { .. })
    }

    /// Plan for the step following `hist`.
    pub fn next_resource(&self, hist: &History) -> Result<StepPlan> {
        if hist.n() != self.n() {
            return Err(Error::ResourceSizeMismatch {
                expected: self.n(),
                got: hist.n(),
            });
        }
        let step = hist.len() + 1;
        if let Some(h) = self.horizon() {
            if step > h {
                return Err(Error::HistoryTooLong {
                    len: hist.len(),
                    horizon: h,
                });
            }
        }
        match self {
            StrategyKind::Identical { resource } => Ok(StepPlan::plain(resource.clone())),
            StrategyKind::AdaptiveDouble { n, q1 } => {
                if step == 1 {
                    Ok(StepPlan::plain(geometric_peak_resource(*n, *q1)?))
                } else {
                    let m = hist.outcomes()[0];
                    let q2 = if m <= n / 2 { 1.0 / q1 } else { *q1 };
                    Ok(StepPlan::plain(geometric_monotone_resource(*n, q2)?))
                }
            }
            StrategyKind::NotGateDouble { n, q1 } => {
                if step == 1 {
                    Ok(StepPlan::plain(geometric_peak_resource(*n, *q1)?))
                } else {
                    let m = hist.outcomes()[0];
                    let resource = geometric_monotone_resource(*n, 1.0 / q1)?;
                    let compensate = m > n / 2;
                    Ok(StepPlan {
                        resource,
                        pre_not: compensate,
                        post_not: compensate,
                    })
                }
            }
            StrategyKind::LastStepAdaptive { base, steps } => {
                if step < *steps {
                    Ok(StepPlan::plain(base.clone()))
                } else {
                    let resources = vec![base.clone(); hist.len()];
                    let w = chain_weights(hist, &resources)?;
                    if w.a1 <= 0.0 || w.a0 <= 0.0 {
                        return Err(Error::DegenerateWeights { a1: w.a1, a0: w.a0 });
                    }
                    // |b(n−1)|² = (a1/a0)² |b(n)|², i.e. ratio q2 = (a0/a1)²:
                    // decreasing when a(1) > a(0), increasing when a(1) < a(0),
                    // uniform when they agree.
                    let q2 = (w.a0 / w.a1).powi(2);
                    Ok(StepPlan::plain(geometric_monotone_resource(base.n(), q2)?))
                }
            }
        }
    }
}
