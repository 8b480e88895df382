//! Seeded stochastic simulation of teleportation chains.
//!
//! Each sample draws the per-step outcome from the exact distribution by
//! inverse CDF, follows the strategy's resources and gates, and applies the
//! recovery filter when the strategy calls for one. Samples are processed in
//! fixed-size batches, one ChaCha stream per batch, so reports are
//! bit-identical for a given seed regardless of thread count.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{clamp_probability, Error, Result};
use crate::qubit::QubitState;
use crate::strategies::{History, StepPlan, StrategyKind};

/// Samples per RNG stream. Part of the reproducibility contract: changing it
/// changes which stream serves which sample.
pub const BATCH_SIZE: u64 = 1 << 16;

/// Summary of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub samples: u64,
    pub successes: u64,
    pub success_rate: f64,
    /// Binomial standard error √(p̂(1−p̂)/samples).
    pub rate_stderr: f64,
    /// Worst fidelity of the output state against the input over all
    /// successful trajectories; absent when nothing succeeded.
    pub min_fidelity_on_success: Option<f64>,
    pub seed: u64,
}

/// Plans resolved ahead of the sample loop. Only the adapted last step of
/// [`StrategyKind::LastStepAdaptive`] must be computed per trajectory.
enum CachedPlans {
    Identical(StepPlan),
    TwoStep { first: StepPlan, second: Vec<StepPlan> },
    LastStep { base: StepPlan },
}

impl CachedPlans {
    fn build(kind: &StrategyKind, steps: usize) -> Result<Self> {
        if let Some(h) = kind.horizon() {
            if steps > h {
                return Err(Error::HistoryTooLong {
                    len: steps,
                    horizon: h,
                });
            }
        }
        let n = kind.n();
        match kind {
            StrategyKind::Identical { .. } => {
                Ok(CachedPlans::Identical(kind.next_resource(&History::empty(n))?))
            }
            StrategyKind::AdaptiveDouble { .. } | StrategyKind::NotGateDouble { .. } => {
                let first = kind.next_resource(&History::empty(n))?;
                let second = (1..=n)
                    .map(|m| kind.next_resource(&History::new(n, vec![m])?))
                    .collect::<Result<Vec<_>>>()?;
                Ok(CachedPlans::TwoStep { first, second })
            }
            StrategyKind::LastStepAdaptive { .. } => Ok(CachedPlans::LastStep {
                base: kind.next_resource(&History::empty(n))?,
            }),
        }
    }
}

/// Runs `samples` trajectories of an `steps`-step chain under `kind`,
/// starting from `input`, with outcomes drawn from the exact per-step
/// distribution. Identical seeds give bit-identical reports.
pub fn simulate_chain(
    kind: &StrategyKind,
    input: &QubitState,
    steps: usize,
    samples: u64,
    seed: u64,
) -> Result<SimReport> {
    if steps == 0 {
        return Err(Error::EmptyChain);
    }
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let plans = CachedPlans::build(kind, steps)?;
    let n = kind.n();
    let apply_filter = kind.requires_final_filter();
    let batches = samples.div_ceil(BATCH_SIZE);

    let batch_results: Vec<Result<(u64, f64)>> = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch);
            let batch_samples = BATCH_SIZE.min(samples - batch * BATCH_SIZE);
            let mut successes = 0u64;
            let mut min_fid = f64::INFINITY;
            let mut weights = vec![0.0f64; n + 2];
            let mut hist = History::empty(n);
            for _ in 0..batch_samples {
                if let Some(fid) = run_trajectory(
                    kind,
                    &plans,
                    input,
                    steps,
                    apply_filter,
                    &mut rng,
                    &mut weights,
                    &mut hist,
                )? {
                    successes += 1;
                    min_fid = min_fid.min(fid);
                }
            }
            Ok((successes, min_fid))
        })
        .collect();

    let mut successes = 0u64;
    let mut min_fid = f64::INFINITY;
    for res in batch_results {
        let (s, f) = res?;
        successes += s;
        min_fid = min_fid.min(f);
    }
    let rate = successes as f64 / samples as f64;
    Ok(SimReport {
        samples,
        successes,
        success_rate: rate,
        rate_stderr: (rate * (1.0 - rate) / samples as f64).sqrt(),
        min_fidelity_on_success: (successes > 0).then_some(min_fid),
        seed,
    })
}

/// One trajectory; Some(fidelity) on success, None on failure.
#[allow(clippy::too_many_arguments)]
fn run_trajectory(
    kind: &StrategyKind,
    plans: &CachedPlans,
    input: &QubitState,
    steps: usize,
    apply_filter: bool,
    rng: &mut ChaCha8Rng,
    weights: &mut [f64],
    hist: &mut History,
) -> Result<Option<f64>> {
    let (alpha, beta) = (input.amp_h(), input.amp_v());
    let mut f_h = 1.0f64;
    let mut f_v = 1.0f64;
    let mut swapped = false;
    let mut first_m = 0usize;
    if matches!(plans, CachedPlans::LastStep { .. }) {
        hist.clear();
    }

    for step in 0..steps {
        let adapted;
        let plan: &StepPlan = match plans {
            CachedPlans::Identical(p) => p,
            CachedPlans::TwoStep { first, second } => {
                if step == 0 {
                    first
                } else {
                    &second[first_m - 1]
                }
            }
            CachedPlans::LastStep { base } => {
                if step + 1 < steps {
                    base
                } else {
                    adapted = kind.next_resource(hist)?;
                    &adapted
                }
            }
        };
        if plan.pre_not {
            std::mem::swap(&mut f_h, &mut f_v);
            swapped = !swapped;
        }
        let (ah, av) = if swapped { (beta, alpha) } else { (alpha, beta) };
        let res = &plan.resource;
        let n = res.n();
        let mut total = 0.0;
        for (m, w) in weights.iter_mut().enumerate() {
            let wh = ah.norm_sqr() * f_h * f_h * sq(res.amp_or_zero(m as isize));
            let wv = av.norm_sqr() * f_v * f_v * sq(res.amp_or_zero(m as isize - 1));
            *w = wh + wv;
            total += *w;
        }
        let target = rng.random::<f64>() * total;
        let mut cum = 0.0;
        let mut m = n + 1;
        for (i, w) in weights.iter().enumerate() {
            cum += w;
            if cum > target {
                m = i;
                break;
            }
        }
        if m == 0 || m == n + 1 {
            return Ok(None);
        }
        if step == 0 {
            first_m = m;
        }
        f_h *= res.amp(m);
        f_v *= res.amp(m - 1);
        if plan.post_not {
            std::mem::swap(&mut f_h, &mut f_v);
            swapped = !swapped;
        }
        if matches!(plans, CachedPlans::LastStep { .. }) {
            hist.push(m)?;
        }
    }

    let (ah, av) = if swapped { (beta, alpha) } else { (alpha, beta) };
    let u_h = ah * f_h;
    let u_v = av * f_v;
    let final_state = if apply_filter {
        let min_sq = (f_h * f_h).min(f_v * f_v);
        let norm_sq = u_h.norm_sqr() + u_v.norm_sqr();
        let cond = clamp_probability(min_sq / norm_sq)?;
        if rng.random::<f64>() >= cond {
            return Ok(None);
        }
        // The success Kraus operator rescales the heavy rail; what remains
        // is proportional to the undistorted amplitudes.
        QubitState::normalized(ah, av)?
    } else {
        QubitState::normalized(u_h, u_v)?
    };
    Ok(Some(input.fidelity(&final_state)))
}

#[inline]
fn sq(x: f64) -> f64 {
    x * x
}
