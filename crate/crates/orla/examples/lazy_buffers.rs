//! Deferred buffer allocation on the classic two-disc deadlock: each disc
//! starts on the other's goal, so one must wait at a buffer whose pose is
//! committed only when the surrounding visits are known.
//!
//!     cargo run --release -p orla --example lazy_buffers

use orla::model::{Arrangement, Instance, ObjectShape, Pose, Scenario, Table};
use orla::search::{distance_refinement, AllocatorKind, PlannerConfig};
use orla::stability::AlwaysStable;

fn main() {
    let instance = Instance {
        id: "deadlock".into(),
        scenario: Scenario::Ee,
        table: Table { width: 1.0, depth: 1.0 },
        manipulation_cost: 10.0,
        names: vec!["red".into(), "blue".into()],
        shapes: vec![ObjectShape::Disc { radius: 0.1, height: 0.05 }; 2],
        initial: Arrangement::flat(vec![Pose::flat(-0.1, 0.0), Pose::flat(0.1, 0.0)]),
        goal: Arrangement::flat(vec![Pose::flat(0.1, 0.0), Pose::flat(-0.1, 0.0)]),
    };

    // The refinement term prices a pending buffer before any pose exists:
    // best three-point star minus the baseline leg. Collinear stops cost
    // nothing.
    let r = distance_refinement(
        Scenario::Ee,
        &instance.table,
        &Pose::flat(0.0, 0.0),
        Some(&Pose::flat(0.4, 0.0)),
        &Pose::flat(0.2, 0.0),
    );
    println!("refinement for collinear stops: {r:.6} (buffer rides the baseline)");

    for allocator in [AllocatorKind::Sampling, AllocatorKind::GridOptimal] {
        let cfg = PlannerConfig { allocator, ..PlannerConfig::default() };
        let out = orla::plan_search(&instance, &cfg, &AlwaysStable).expect("solvable");
        println!("\nallocator {}:", allocator.as_str());
        for action in &out.plan.actions {
            println!(
                "  move {}  ({:+.3}, {:+.3}) -> ({:+.3}, {:+.3})",
                instance.name(action.object),
                action.from.x,
                action.from.y,
                action.to.x,
                action.to.y
            );
        }
        println!(
            "  3 actions = buffer + swap-in + retrieval; travel {:.4}, buffers sampled {}",
            out.cost.travel, out.stats.buffers_sampled
        );
    }
}
