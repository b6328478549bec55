//! Cross-check the planner against the brute-force oracle on small
//! instances: uniform-cost search over every start/goal/lattice joint pose
//! is provably minimal, so action counts must match and travel must agree
//! up to the lattice spacing.
//!
//!     cargo run --release -p orla --example oracle_check

use orla::baselines::{brute_force_oracle, OracleConfig};
use orla::harness::generate_disc_instance;
use orla::search::{AllocatorKind, PlannerConfig};
use orla::stability::AlwaysStable;
use orla::Scenario;

fn main() {
    let cfg = PlannerConfig { allocator: AllocatorKind::GridOptimal, ..PlannerConfig::default() };
    for seed in 0..10u64 {
        let n = if seed % 2 == 0 { 2 } else { 3 };
        let instance = generate_disc_instance(n, 0.2, Scenario::Ee, seed).expect("generator");
        let ours = orla::plan_search(&instance, &cfg, &AlwaysStable).expect("planner");
        let oracle =
            brute_force_oracle(&instance, &OracleConfig::default(), &AlwaysStable).expect("oracle");
        println!(
            "{}: planner {} actions / {:.4} travel | oracle {} actions / {:.4} travel ({} expansions)",
            instance.id,
            ours.plan.len(),
            ours.cost.travel,
            oracle.plan.len(),
            oracle.cost.travel,
            oracle.expansions
        );
        assert_eq!(ours.plan.len(), oracle.plan.len(), "action counts must match");
        assert!(ours.cost.travel <= oracle.cost.travel + 0.075, "travel within one grid diagonal");
    }
    println!("all seeds match the oracle");
}
