//! Plan a small end-effector-scenario instance end to end: generate random
//! discs on a 1x1 table, search, verify, and print the plan.
//!
//!     cargo run --release -p orla --example solve_ee

use orla::harness::{generate_disc_instance, verify_plan};
use orla::search::PlannerConfig;
use orla::stability::AlwaysStable;
use orla::Scenario;

fn main() {
    let instance = generate_disc_instance(6, 0.2, Scenario::Ee, 7).expect("generator");
    println!("instance {} ({} discs, density {:.3})", instance.id, instance.object_count(), instance.density());

    let outcome = orla::plan_search(&instance, &PlannerConfig::default(), &AlwaysStable)
        .expect("solvable instance");
    for (i, action) in outcome.plan.actions.iter().enumerate() {
        println!(
            "  {i:2}: move {}  ({:+.3}, {:+.3}) -> ({:+.3}, {:+.3})",
            instance.name(action.object),
            action.from.x,
            action.from.y,
            action.to.x,
            action.to.y
        );
    }
    println!(
        "cost: travel {:.4} m + manipulation {} = {:.4}",
        outcome.cost.travel, outcome.cost.manipulation, outcome.cost.total
    );
    println!(
        "search: {} DS / {} NDS expanded, {} buffer allocations, {:.3}s",
        outcome.stats.ds_expanded,
        outcome.stats.nds_expanded,
        outcome.stats.allocation_runs,
        outcome.stats.wall_time_s
    );

    let report = verify_plan(&instance, &outcome.plan, Some(&outcome.cost));
    println!("verifier: pass = {}", report.pass);
}
