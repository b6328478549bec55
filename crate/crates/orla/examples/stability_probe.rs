//! Probe the support-polygon stability oracle on synthetic scenes: full
//! table contact, a cup on a plate, and an overhanging placement.
//!
//!     cargo run --release -p orla --example stability_probe

use orla::stability::{build_query, StabilityOracle, SupportPolygonOracle};
use orla::{ObjectShape, Pose};

type Scene<'a> = (&'a str, Pose, Vec<(&'a ObjectShape, Pose)>);

fn main() {
    let oracle = SupportPolygonOracle::default();
    let cup = ObjectShape::Disc { radius: 0.03, height: 0.08 };
    let plate = ObjectShape::Disc { radius: 0.1, height: 0.02 };
    let apple = ObjectShape::Disc { radius: 0.035, height: 0.07 };

    let scenes: Vec<Scene> = vec![
        ("cup on bare table", Pose::flat(0.0, 0.0), vec![]),
        (
            "cup centered on plate",
            Pose::flat(0.3, 0.0),
            vec![(&plate, Pose::flat(0.3, 0.0))],
        ),
        (
            "cup on plate rim",
            Pose::flat(0.395, 0.0),
            vec![(&plate, Pose::flat(0.3, 0.0))],
        ),
        (
            "cup on top of apple",
            Pose::flat(0.0, 0.0),
            vec![(&apple, Pose::flat(0.0, 0.0))],
        ),
        (
            "cup half off the apple",
            Pose::flat(0.05, 0.0),
            vec![(&apple, Pose::flat(0.0, 0.0))],
        ),
    ];

    for (label, pose, env) in scenes {
        let query = build_query(&cup, &pose, &env);
        let verdict = oracle.assess(&query).expect("well-formed query");
        println!(
            "{label:>24}: probability {:.4} -> {}",
            verdict.probability,
            if verdict.stable { "stable" } else { "unstable" }
        );
    }
}
