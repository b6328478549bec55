//! A small seeded benchmark sweep over the three planners, printed as CSV
//! with the commonly-solved summary lines appended.
//!
//!     cargo run --release -p orla --example ablation_bench

use orla::harness::{benchmark_csv, generate_disc_instance, run_benchmark};
use orla::search::{PlannerConfig, PlannerKind};
use orla::stability::AlwaysStable;
use orla::Scenario;
use std::time::Duration;

fn main() {
    let instances: Vec<_> = (0..6u64)
        .map(|seed| generate_disc_instance(5, 0.2, Scenario::Ee, seed).expect("generator"))
        .collect();
    let base = PlannerConfig { timeout: Duration::from_secs(30), ..PlannerConfig::default() };
    let planners: Vec<(String, PlannerConfig)> = [
        PlannerKind::OrlaFull,
        PlannerKind::OrlaAction,
        PlannerKind::GreedySampling,
    ]
    .into_iter()
    .map(|kind| (kind.as_str().to_string(), PlannerConfig { planner: kind, ..base.clone() }))
    .collect();

    let report = run_benchmark(&instances, &planners, &AlwaysStable, 1);
    print!("{}", benchmark_csv(&report, true));
}
