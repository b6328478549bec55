//! Plan cost: travel plus manipulation, and the per-leg distances used by
//! the search. Travel is end-effector x-y distance (EE) or mobile-base arc
//! distance along the boundary track (MB). Transit legs between consecutive
//! actions are charged; there is no lead-in to the first pick and no return
//! leg.

use crate::geometry::{dist_ee, Track};
use crate::model::{Instance, Plan, Pose, Scenario, Table};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CostBreakdown {
    pub travel: f64,
    pub manipulation: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn new(travel: f64, manipulation: f64) -> Self {
        CostBreakdown { travel, manipulation, total: travel + manipulation }
    }
}

/// Travel between two stops under the given scenario.
pub fn leg_distance(scenario: Scenario, from: &Pose, to: &Pose, table: &Table) -> f64 {
    match scenario {
        Scenario::Ee => dist_ee(from, to),
        Scenario::Mb => {
            let track = Track::new(table.rect());
            let a = track.project(from.xy()).expect("pose inside table");
            let b = track.project(to.xy()).expect("pose inside table");
            track.distance(a, b)
        }
    }
}

/// Travel along a waypoint chain, optionally preceded by a start position.
pub fn chain_travel(scenario: Scenario, table: &Table, start: Option<&Pose>, waypoints: &[Pose]) -> f64 {
    let mut total = 0.0;
    let mut prev = start;
    for wp in waypoints {
        if let Some(p) = prev {
            total += leg_distance(scenario, p, wp, table);
        }
        prev = Some(wp);
    }
    total
}

/// Cost of a path segment: travel along its concrete waypoints plus the
/// per-action manipulation charge.
pub fn segment_cost(
    scenario: Scenario,
    table: &Table,
    manipulation_cost: f64,
    start: Option<&Pose>,
    waypoints: &[Pose],
    actions: usize,
) -> f64 {
    chain_travel(scenario, table, start, waypoints) + manipulation_cost * actions as f64
}

/// Total plan cost. The robot starts at the first pick pose; each action
/// contributes its pick then place waypoint.
pub fn plan_cost(plan: &Plan, instance: &Instance) -> CostBreakdown {
    let mut waypoints = Vec::with_capacity(plan.len() * 2);
    for action in &plan.actions {
        waypoints.push(action.from);
        waypoints.push(action.to);
    }
    let travel = chain_travel(instance.scenario, &instance.table, None, &waypoints);
    let manipulation = instance.manipulation_cost * plan.len() as f64;
    CostBreakdown::new(travel, manipulation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Action, Arrangement, ObjId, ObjectShape, Scenario};

    fn ee_instance(n: usize) -> Instance {
        let poses = (0..n).map(|i| Pose::flat(-0.4 + 0.2 * i as f64, -0.3)).collect::<Vec<_>>();
        let goals = (0..n).map(|i| Pose::flat(-0.4 + 0.2 * i as f64, 0.3)).collect::<Vec<_>>();
        Instance {
            id: "cost-ee".into(),
            scenario: Scenario::Ee,
            table: Table { width: 1.0, depth: 1.0 },
            manipulation_cost: 10.0,
            names: (0..n).map(|i| format!("o{i}")).collect(),
            shapes: vec![ObjectShape::Disc { radius: 0.05, height: 0.05 }; n],
            initial: Arrangement::flat(poses),
            goal: Arrangement::flat(goals),
        }
    }

    #[test]
    fn leg_distance_examples() {
        let table = Table { width: 1.0, depth: 1.0 };
        assert_eq!(
            leg_distance(Scenario::Ee, &Pose::flat(0.0, 0.0), &Pose::flat(1.0, 0.0), &table),
            1.0
        );
        let p = Pose::flat(0.2, 0.2);
        assert_eq!(leg_distance(Scenario::Mb, &p, &p, &Table { width: 3.0, depth: 1.0 }), 0.0);
        // Two poses projecting to s = 1.5 and s = 2.5 on the 3x1 track:
        // (0, -0.5) hits the bottom edge at s = 1.5, (1, -0.5) at s = 2.5.
        let table = Table { width: 3.0, depth: 1.0 };
        let a = Pose::flat(0.0, -0.5);
        let b = Pose::flat(1.0, -0.5);
        assert!((leg_distance(Scenario::Mb, &a, &b, &table) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_plan_costs_nothing() {
        let inst = ee_instance(1);
        let c = plan_cost(&Plan::default(), &inst);
        assert_eq!((c.travel, c.manipulation, c.total), (0.0, 0.0, 0.0));
    }

    #[test]
    fn single_action_cost() {
        let inst = ee_instance(1);
        let plan = Plan {
            actions: vec![Action { object: ObjId(0), from: Pose::flat(0.0, 0.0), to: Pose::flat(1.0, 0.0) }],
        };
        let c = plan_cost(&plan, &inst);
        assert_eq!(c.travel, 1.0);
        assert_eq!(c.manipulation, 10.0);
        assert_eq!(c.total, 11.0);
    }

    #[test]
    fn transit_leg_charged_between_actions() {
        // Place at (1,0), then pick at (1,1): the empty-handed leg of length
        // one is part of the travel (hand-summed waypoint legs).
        let inst = ee_instance(2);
        let plan = Plan {
            actions: vec![
                Action { object: ObjId(0), from: Pose::flat(0.0, 0.0), to: Pose::flat(1.0, 0.0) },
                Action { object: ObjId(1), from: Pose::flat(1.0, 1.0), to: Pose::flat(0.0, 1.0) },
            ],
        };
        let c = plan_cost(&plan, &inst);
        assert!((c.travel - 3.0).abs() < 1e-12);
        assert_eq!(c.manipulation, 20.0);
    }

    #[test]
    fn segment_cost_identity_and_single_action() {
        let table = Table { width: 1.0, depth: 1.0 };
        assert_eq!(segment_cost(Scenario::Ee, &table, 10.0, None, &[], 0), 0.0);
        let wps = [Pose::flat(0.0, 0.0), Pose::flat(0.3, 0.4)];
        let c = segment_cost(Scenario::Ee, &table, 10.0, None, &wps, 1);
        assert!((c - 10.5).abs() < 1e-12);
    }

    #[test]
    fn appending_actions_never_decreases_cost() {
        let inst = ee_instance(3);
        let actions = [
            Action { object: ObjId(0), from: Pose::flat(-0.4, -0.3), to: Pose::flat(-0.4, 0.3) },
            Action { object: ObjId(1), from: Pose::flat(-0.2, -0.3), to: Pose::flat(-0.2, 0.3) },
            Action { object: ObjId(2), from: Pose::flat(0.0, -0.3), to: Pose::flat(0.0, 0.3) },
        ];
        let mut prev = 0.0;
        for k in 0..=actions.len() {
            let plan = Plan { actions: actions[..k].to_vec() };
            let c = plan_cost(&plan, &inst);
            assert!(c.total >= prev);
            assert!(c.total >= inst.manipulation_cost * k as f64);
            prev = c.total;
        }
    }

    #[test]
    fn mb_cost_reflection_invariant() {
        let table = Table { width: 3.0, depth: 1.0 };
        let actions = vec![
            Action { object: ObjId(0), from: Pose::flat(-1.0, -0.3), to: Pose::flat(1.2, 0.4) },
            Action { object: ObjId(1), from: Pose::flat(0.3, 0.1), to: Pose::flat(-0.7, -0.2) },
        ];
        let mirror = |p: &Pose| Pose::new(-p.x, p.y, p.z, p.theta);
        let mirrored: Vec<Action> = actions
            .iter()
            .map(|a| Action { object: a.object, from: mirror(&a.from), to: mirror(&a.to) })
            .collect();
        let mut inst = ee_instance(2);
        inst.scenario = Scenario::Mb;
        inst.table = table;
        let c1 = plan_cost(&Plan { actions }, &inst);
        let c2 = plan_cost(&Plan { actions: mirrored }, &inst);
        assert!((c1.total - c2.total).abs() < 1e-9);
    }
}
