//! Simulation and analysis of multiple linear-optical (KLM-style) quantum
//! teleportation with adaptive entangled-resource selection.
//!
//! A teleportation step consumes an entangled resource of n photon pairs and
//! succeeds with probability n/(n+1) when the resource is maximally
//! entangled. Chaining several steps changes the picture: shaping the
//! resource amplitudes and *adapting* later resources to earlier measurement
//! outcomes yields strictly higher probabilities of faithful delivery. This
//! crate models the step exactly at the amplitude level, evaluates chains
//! both in closed form and by exact enumeration, simulates them with seeded
//! Monte Carlo, and independently verifies the step model from first
//! principles in the full multi-mode Fock space.
//!
//! Modules:
//! - [`qubit`], [`resource`], [`step`], [`filter`] — the single-step model:
//!   states, resource families, the outcome law, and the recovery filter.
//! - [`strategies`] — resource-selection policies over measurement history.
//! - [`analytics`] — closed-form chain probabilities and exact enumeration.
//! - [`optimizer`] — maximization over the geometric ratio q.
//! - [`montecarlo`] — reproducible stochastic simulation.
//! - [`fock`] — the full-state oracle for the effective step model.

pub mod analytics;
pub mod error;
pub mod filter;
pub mod fock;
pub mod montecarlo;
pub mod optimizer;
pub mod qubit;
pub mod resource;
pub mod step;
pub mod strategies;

pub use analytics::{
    exact_chain_success, p_adaptive_double, p_identical_chain_closed, p_last_step_adaptive,
    p_last_step_sym, ChainSpec, ResourceSource,
};
pub use error::{Error, Result};
pub use filter::{filter_to_target, FilterResult};
pub use fock::{
    apply_fourier, build_joint_state, check_phase_consistency, measure_and_extract,
    verify_effective_step, FockState, ModeOccupation, PatternResult, VerificationReport,
};
pub use montecarlo::{simulate_chain, SimReport};
pub use optimizer::{
    crossover_m, maximize_over_q, table1, CrossoverRow, OptimizationResult, Table1Row,
};
pub use qubit::{QubitState, Rail};
pub use resource::{
    geometric_monotone_resource, geometric_peak_resource, uniform_resource, ResourceSpec,
};
pub use step::{teleport_step, OutcomeDistribution, OutcomeEntry, StepOutcome};
pub use strategies::{chain_weights, ChainWeights, History, StepPlan, StrategyKind};
