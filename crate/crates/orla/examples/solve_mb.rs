//! Mobile-base scenario: the robot travels on the table boundary track, so
//! travel is arc distance between projected stops. Compares the full cost
//! function against the action-count-only ablation on one 3x1 instance.
//!
//!     cargo run --release -p orla --example solve_mb

use orla::harness::generate_disc_instance;
use orla::search::{PlannerConfig, PlannerKind};
use orla::stability::AlwaysStable;
use orla::Scenario;

fn main() {
    let instance = generate_disc_instance(8, 0.2, Scenario::Mb, 3).expect("generator");
    println!(
        "instance {} on a {}x{} m table, perimeter track {} m",
        instance.id,
        instance.table.width,
        instance.table.depth,
        2.0 * (instance.table.width + instance.table.depth)
    );

    for kind in [PlannerKind::OrlaFull, PlannerKind::OrlaAction] {
        let cfg = PlannerConfig { planner: kind, ..PlannerConfig::default() };
        match orla::plan_search(&instance, &cfg, &AlwaysStable) {
            Ok(out) => println!(
                "{:>12}: {} actions, base travel {:.3} m, total {:.3} ({:.3}s)",
                kind.as_str(),
                out.plan.len(),
                out.cost.travel,
                out.cost.total,
                out.stats.wall_time_s
            ),
            Err(e) => println!("{:>12}: {e}", kind.as_str()),
        }
    }
}
