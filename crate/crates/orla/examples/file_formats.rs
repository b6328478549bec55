//! The on-disk interfaces: instance files and plan files (JSON). Writes
//! both to a temp directory, reads them back, and verifies the plan —
//! the same path an external planner would use to interoperate.
//!
//!     cargo run --release -p orla --example file_formats

use orla::files::{read_instance, read_plan, write_instance, write_plan};
use orla::harness::{generate_disc_instance, verify_plan};
use orla::search::PlannerConfig;
use orla::stability::AlwaysStable;
use orla::Scenario;

fn main() {
    let dir = std::env::temp_dir().join("orla-file-formats");
    std::fs::create_dir_all(&dir).expect("temp dir");

    let instance = generate_disc_instance(3, 0.2, Scenario::Ee, 42).expect("generator");
    let instance_path = dir.join("instance.json");
    std::fs::write(&instance_path, write_instance(&instance)).expect("write instance");
    println!("wrote {}", instance_path.display());

    let loaded = read_instance(&std::fs::read(&instance_path).unwrap()).expect("parse instance");
    assert_eq!(loaded.object_count(), instance.object_count());

    let outcome =
        orla::plan_search(&loaded, &PlannerConfig::default(), &AlwaysStable).expect("plan");
    let plan_path = dir.join("plan.json");
    std::fs::write(&plan_path, write_plan(&loaded, "orla-full", &outcome.plan, &outcome.cost))
        .expect("write plan");
    println!("wrote {}", plan_path.display());

    let plan_file = read_plan(&std::fs::read(&plan_path).unwrap(), &loaded).expect("parse plan");
    let report = verify_plan(&loaded, &plan_file.plan, Some(&plan_file.cost));
    println!(
        "plan by {:?} for instance {:?}: {} actions, verifies = {}, recomputed total {:.6}",
        plan_file.planner,
        plan_file.instance_id,
        plan_file.plan.len(),
        report.pass,
        report.recomputed.total
    );
}
