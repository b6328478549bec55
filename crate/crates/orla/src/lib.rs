//! Multi-object tabletop rearrangement planning for a mobile manipulator.
//!
//! A pick-n-place plan moves every object from an initial arrangement to a
//! goal arrangement while minimizing travel (end-effector distance on small
//! tables, mobile-base track distance on large ones) plus a fixed charge per
//! manipulation. The main planner is a lazy A* that defers committing buffer
//! poses until the surrounding visits are known; ablation baselines, a
//! brute-force optimality oracle, a placement-stability oracle, and a
//! benchmark harness round out the crate.
//!
//! Entry points:
//! - [`search::plan_search`] — the full planner.
//! - [`baselines`] — action-count-only and greedy-sampling variants, plus
//!   the small-instance oracle.
//! - [`harness`] — instance generation, plan verification, benchmarking.
//!
//! See the `examples/` directory for one runnable program per capability.

// Failure values deliberately carry full search statistics.
#![allow(clippy::result_large_err)]

pub mod baselines;
pub mod buffer;
pub mod cost;
pub mod files;
pub mod geometry;
pub mod harness;
pub mod model;
pub mod search;
pub mod stability;

pub use cost::{plan_cost, CostBreakdown};
pub use model::{
    Action, Arrangement, Instance, ObjId, ObjectShape, ObjectState, Plan, Pose, Scenario, Support,
    Table,
};
pub use search::{plan_search, PlannerConfig, PlanOutcome};
