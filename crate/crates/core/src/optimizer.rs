//! One-dimensional maximization of success probability over the geometric
//! ratio q.
//!
//! Unimodality of the objectives is not guaranteed, so refinement is always
//! preceded by a coarse log-spaced grid scan that locates the best cell;
//! golden-section search then polishes within that cell.

use crate::analytics::{p_adaptive_double, p_identical_chain_closed};
use crate::error::{Error, Result};

/// Minimum number of points in the pre-scan grid.
pub const GRID_POINTS: usize = 257;

/// Default search bracket for the ratio q. The q ↔ 1/q symmetry of the
/// identical chain and the q > 1 regime of the peaked family keep all
/// interesting optima here.
pub const DEFAULT_BRACKET: (f64, f64) = (1.0, 4.0);

/// Default convergence tolerance on q.
pub const DEFAULT_TOL_Q: f64 = 1e-6;

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (√5 − 1)/2
const MAX_GOLDEN_ITERS: usize = 200;

/// Outcome of a 1-D maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub q_opt: f64,
    pub p_opt: f64,
    /// Total number of objective evaluations.
    pub iterations: usize,
    /// The search bracket that was scanned.
    pub bracket: (f64, f64),
    /// Whether the refinement interval shrank below the tolerance.
    pub converged: bool,
}

/// Maximizes `objective` over q in [lo, hi]: a log-spaced grid scan of at
/// least [`GRID_POINTS`] points picks the best cell, then golden-section
/// search refines until the interval width drops below `tol`.
pub fn maximize_over_q<F>(objective: F, lo: f64, hi: f64, tol: f64) -> Result<OptimizationResult>
where
    F: Fn(f64) -> f64,
{
    if !(lo > 0.0) || !(hi > lo) || !tol.is_finite() || tol <= 0.0 {
        return Err(Error::NonPositiveRatio(lo.min(hi).min(tol)));
    }
    let mut evals = 0usize;
    let mut check = |q: f64| -> Result<f64> {
        let v = objective(q);
        evals += 1;
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective(q));
        }
        Ok(v)
    };

    // Coarse scan.
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    let mut best_idx = 0usize;
    let mut best_q = lo;
    let mut best_p = f64::NEG_INFINITY;
    let mut grid = Vec::with_capacity(GRID_POINTS);
    for i in 0..GRID_POINTS {
        let t = i as f64 / (GRID_POINTS - 1) as f64;
        let q = (ln_lo + t * (ln_hi - ln_lo)).exp();
        let p = check(q)?;
        if p > best_p {
            best_p = p;
            best_q = q;
            best_idx = i;
        }
        grid.push(q);
    }

    // Golden-section refinement across the two cells adjacent to the best
    // grid point.
    let mut a = grid[best_idx.saturating_sub(1)];
    let mut b = grid[(best_idx + 1).min(GRID_POINTS - 1)];
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = check(x1)?;
    let mut f2 = check(x2)?;
    let mut converged = false;
    for _ in 0..MAX_GOLDEN_ITERS {
        if f1 > best_p {
            best_p = f1;
            best_q = x1;
        }
        if f2 > best_p {
            best_p = f2;
            best_q = x2;
        }
        if b - a < tol {
            converged = true;
            break;
        }
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = check(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = check(x2)?;
        }
    }

    Ok(OptimizationResult {
        q_opt: best_q,
        p_opt: best_p,
        iterations: evals,
        bracket: (lo, hi),
        converged,
    })
}

/// One row of the double-teleportation optimum table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub n: usize,
    /// Success probability with the maximally entangled resource, (n/(n+1))².
    pub p_maximal: f64,
    /// Ratio maximizing the adaptive double-teleportation probability.
    pub q_opt: f64,
    pub p_opt: f64,
}

/// Optimal adaptive double teleportation for each requested resource size.
pub fn table1(n_values: &[usize]) -> Result<Vec<Table1Row>> {
    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        if n < 2 || n > 32 || n % 2 != 0 {
            return Err(Error::InvalidResourceSize(n));
        }
        let opt = maximize_over_q(
            |q| p_adaptive_double(n, q).unwrap_or(f64::NAN),
            DEFAULT_BRACKET.0,
            DEFAULT_BRACKET.1,
            DEFAULT_TOL_Q,
        )?;
        let r = n as f64 / (n as f64 + 1.0);
        rows.push(Table1Row {
            n,
            p_maximal: r * r,
            q_opt: opt.q_opt,
            p_opt: opt.p_opt,
        });
    }
    Ok(rows)
}

/// One row of the identical-chain sweep over the number of teleportations.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverRow {
    pub m_steps: usize,
    pub q_opt: f64,
    pub p_opt: f64,
}

/// Optimizes the identical symmetric chain over q for every M = 1..=max_m,
/// exposing where the optimum departs from the maximally entangled q = 1.
/// Requires `max_m >= 6` so the sweep always spans the transition.
pub fn crossover_m(max_m: usize) -> Result<Vec<CrossoverRow>> {
    if max_m < 6 {
        return Err(Error::CrossoverTooShort(max_m));
    }
    let mut rows = Vec::with_capacity(max_m);
    for m_steps in 1..=max_m {
        let opt = maximize_over_q(
            |q| p_identical_chain_closed(m_steps, q).unwrap_or(f64::NAN),
            DEFAULT_BRACKET.0,
            DEFAULT_BRACKET.1,
            DEFAULT_TOL_Q,
        )?;
        rows.push(CrossoverRow {
            m_steps,
            q_opt: opt.q_opt,
            p_opt: opt.p_opt,
        });
    }
    Ok(rows)
}
