//! Instance generation, plan verification, and the benchmark runner.

use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;

use crate::cost::{plan_cost, CostBreakdown};
use crate::geometry;
use crate::model::{
    Arrangement, Instance, ObjId, ObjectShape, Plan, Pose, Scenario, Support, Table, POSE_TOL,
    SUPPORT_TOL,
};
use crate::search::{plan_search, PlanFailure, PlannerConfig};
use crate::stability::StabilityOracle;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

const SAMPLING_BUDGET: usize = 100_000;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("bad generator parameters: {0}")]
    BadParams(String),
    #[error("sampling budget exhausted while placing object {0} (density too high)")]
    SamplingBudget(String),
}

/// Equal discs on the scenario's table, radius chosen so the footprint
/// density hits `rho`; start and goal poses rejection-sampled independently.
pub fn generate_disc_instance(
    n: usize,
    rho: f64,
    scenario: Scenario,
    seed: u64,
) -> Result<Instance, GenError> {
    if n == 0 {
        return Err(GenError::BadParams("n must be at least 1".into()));
    }
    if !(0.0..0.5).contains(&rho) || rho <= 0.0 {
        return Err(GenError::BadParams(format!("rho must lie in (0, 0.5), got {rho}")));
    }
    let table = match scenario {
        Scenario::Ee => Table { width: 1.0, depth: 1.0 },
        Scenario::Mb => Table { width: 3.0, depth: 1.0 },
    };
    let area = table.width * table.depth;
    let radius = (rho * area / (n as f64 * std::f64::consts::PI)).sqrt();
    if 2.0 * radius > table.width.min(table.depth) {
        return Err(GenError::BadParams(format!("discs of radius {radius} cannot fit the table")));
    }
    let shapes = vec![ObjectShape::Disc { radius, height: 0.05 }; n];
    let names: Vec<String> = (0..n).map(|i| format!("o{}", i + 1)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts = sample_flat_poses(&shapes, &table, &mut rng)?;
    let goals = sample_flat_poses(&shapes, &table, &mut rng)?;
    let id = format!(
        "{}-disc-n{}-rho{}-seed{}",
        scenario.as_str().to_lowercase(),
        n,
        rho,
        seed
    );
    Ok(Instance {
        id,
        scenario,
        table,
        manipulation_cost: 10.0,
        names,
        shapes,
        initial: Arrangement::flat(starts),
        goal: Arrangement::flat(goals),
    })
}

fn sample_flat_poses(
    shapes: &[ObjectShape],
    table: &Table,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Pose>, GenError> {
    let rect = table.rect();
    let mut poses: Vec<Pose> = Vec::with_capacity(shapes.len());
    for (i, shape) in shapes.iter().enumerate() {
        let mut placed = false;
        for _ in 0..SAMPLING_BUDGET {
            let theta = if shape.theta_invariant() {
                0.0
            } else {
                rng.gen::<f64>() * std::f64::consts::TAU
            };
            let x = rect.min.x + rng.gen::<f64>() * rect.width();
            let y = rect.min.y + rng.gen::<f64>() * rect.depth();
            let pose = Pose::new(x, y, 0.0, theta);
            if !geometry::footprint_in_rect(shape, &pose, &rect) {
                continue;
            }
            if poses
                .iter()
                .enumerate()
                .any(|(j, p)| geometry::footprints_collide(&shapes[j], p, shape, &pose))
            {
                continue;
            }
            poses.push(pose);
            placed = true;
            break;
        }
        if !placed {
            return Err(GenError::SamplingBudget(format!("o{}", i + 1)));
        }
    }
    Ok(poses)
}

/// One shape template of a catalog; `stack_on` points at another catalog
/// entry whose instance (same catalog cycle) supports this one's goal.
#[derive(Clone, Debug)]
pub struct ShapeCatalogEntry {
    pub shape: ObjectShape,
    pub stack_on: Option<usize>,
}

/// Objects cycled from a shape catalog on a table scaled so the footprint
/// density hits `rho` (aspect 1:1 for EE, 3:1 for MB). Goal arrangements may
/// stack objects per the catalog's relations; starts are flat.
pub fn generate_shape_instance(
    catalog: &[ShapeCatalogEntry],
    n: usize,
    rho: f64,
    scenario: Scenario,
    seed: u64,
) -> Result<Instance, GenError> {
    if catalog.is_empty() {
        return Err(GenError::BadParams("shape catalog is empty".into()));
    }
    if n == 0 {
        return Err(GenError::BadParams("n must be at least 1".into()));
    }
    if rho <= 0.0 || rho >= 0.5 {
        return Err(GenError::BadParams(format!("rho must lie in (0, 0.5), got {rho}")));
    }
    let len = catalog.len();
    let shapes: Vec<ObjectShape> = (0..n).map(|i| catalog[i % len].shape.clone()).collect();
    for (i, s) in shapes.iter().enumerate() {
        s.validate().map_err(|e| GenError::BadParams(format!("catalog entry {}: {e}", i % len)))?;
    }
    let total_area: f64 = shapes.iter().map(|s| s.footprint_area()).sum();
    let table_area = total_area / rho;
    let table = match scenario {
        Scenario::Ee => {
            let side = table_area.sqrt();
            Table { width: side, depth: side }
        }
        Scenario::Mb => {
            let depth = (table_area / 3.0).sqrt();
            Table { width: 3.0 * depth, depth }
        }
    };
    // Goal stacking: object i sits on the object of the same cycle holding
    // catalog entry `stack_on`.
    let parent_of = |i: usize| -> Option<usize> {
        let entry = i % len;
        catalog[entry].stack_on.and_then(|target| {
            if target == entry || target >= len {
                return None;
            }
            let p = i - entry + target;
            (p < n).then_some(p)
        })
    };

    let names: Vec<String> = (0..n).map(|i| format!("o{}", i + 1)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts = sample_flat_poses(&shapes, &table, &mut rng)?;

    // Goal placement: roots sampled flat, children centered on their parent.
    let rect = table.rect();
    let mut goal_poses: Vec<Option<Pose>> = vec![None; n];
    let mut goal_support = vec![Support::Table; n];
    let order: Vec<usize> = {
        let mut roots: Vec<usize> = (0..n).filter(|&i| parent_of(i).is_none()).collect();
        let mut children: Vec<usize> = (0..n).filter(|&i| parent_of(i).is_some()).collect();
        roots.append(&mut children);
        roots
    };
    for &i in &order {
        match parent_of(i) {
            None => {
                let mut placed = false;
                for _ in 0..SAMPLING_BUDGET {
                    let theta = if shapes[i].theta_invariant() {
                        0.0
                    } else {
                        rng.gen::<f64>() * std::f64::consts::TAU
                    };
                    let x = rect.min.x + rng.gen::<f64>() * rect.width();
                    let y = rect.min.y + rng.gen::<f64>() * rect.depth();
                    let pose = Pose::new(x, y, 0.0, theta);
                    if !geometry::footprint_in_rect(&shapes[i], &pose, &rect) {
                        continue;
                    }
                    let collides = goal_poses.iter().enumerate().any(|(j, p)| match p {
                        Some(p) => geometry::footprints_collide(&shapes[j], p, &shapes[i], &pose),
                        None => false,
                    });
                    if collides {
                        continue;
                    }
                    goal_poses[i] = Some(pose);
                    placed = true;
                    break;
                }
                if !placed {
                    return Err(GenError::SamplingBudget(names[i].clone()));
                }
            }
            Some(parent) => {
                let base = goal_poses[parent].ok_or_else(|| {
                    GenError::BadParams("catalog stacking references an unplaced parent".into())
                })?;
                let theta = if shapes[i].theta_invariant() {
                    0.0
                } else {
                    rng.gen::<f64>() * std::f64::consts::TAU
                };
                let pose = Pose::new(base.x, base.y, base.z + shapes[parent].height(), theta);
                if !geometry::footprint_in_rect(&shapes[i], &pose, &rect) {
                    return Err(GenError::SamplingBudget(names[i].clone()));
                }
                let collides = goal_poses.iter().enumerate().any(|(j, p)| match p {
                    Some(p) => geometry::footprints_collide(&shapes[j], p, &shapes[i], &pose),
                    None => false,
                });
                if collides {
                    return Err(GenError::SamplingBudget(names[i].clone()));
                }
                goal_poses[i] = Some(pose);
                goal_support[i] = Support::On(ObjId(parent));
            }
        }
    }
    let goals: Vec<Pose> = goal_poses.into_iter().map(|p| p.unwrap()).collect();
    let id = format!(
        "{}-shapes-n{}-rho{}-seed{}",
        scenario.as_str().to_lowercase(),
        n,
        rho,
        seed
    );
    Ok(Instance {
        id,
        scenario,
        table,
        manipulation_cost: 10.0,
        names,
        shapes,
        initial: Arrangement::flat(starts),
        goal: Arrangement { states: goals.into_iter().map(crate::model::ObjectState::AtPose).collect(), support: goal_support },
    })
}

// ---------------------------------------------------------------------------
// Plan verification
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub pass: bool,
    /// First violated step and the reason.
    pub failure: Option<(usize, String)>,
    pub final_state_ok: bool,
    pub recomputed: CostBreakdown,
    /// Absolute gap between the claimed and recomputed totals, when a claim
    /// was given and the gap exceeds 1e-9. The plan still passes.
    pub cost_mismatch: Option<f64>,
}

/// Replays the plan from the initial arrangement, checking graspability,
/// collision-freedom, containment, and support at every step, and goal
/// equality at the end. Recomputes the cost and compares it with the claim.
pub fn verify_plan(
    instance: &Instance,
    plan: &Plan,
    claimed: Option<&CostBreakdown>,
) -> VerificationReport {
    let n = instance.object_count();
    let mut poses: Vec<Pose> = (0..n).map(|i| instance.initial_pose(ObjId(i))).collect();
    let rect = instance.table.rect();
    let mut failure: Option<(usize, String)> = None;

    'steps: for (step, action) in plan.actions.iter().enumerate() {
        let obj = action.object;
        if obj.0 >= n {
            failure = Some((step, "unknown object".into()));
            break;
        }
        if !instance.same_place(obj, &poses[obj.0], &action.from) {
            failure = Some((step, format!("object {} is not at the action's from pose", instance.name(obj))));
            break;
        }
        if instance.same_place(obj, &action.from, &action.to) {
            failure = Some((step, "degenerate action: from equals to".into()));
            break;
        }
        // Graspable: nothing rests on it.
        let top = poses[obj.0].z + instance.shape(obj).height();
        for other in instance.objects() {
            if other == obj {
                continue;
            }
            if (poses[other.0].z - top).abs() <= SUPPORT_TOL
                && geometry::footprints_overlap_xy(
                    instance.shape(other),
                    &poses[other.0],
                    instance.shape(obj),
                    &poses[obj.0],
                )
            {
                failure = Some((step, format!(
                    "object {} is not graspable: {} rests on it",
                    instance.name(obj),
                    instance.name(other)
                )));
                break 'steps;
            }
        }
        // Placement.
        if !geometry::footprint_in_rect(instance.shape(obj), &action.to, &rect) {
            failure = Some((step, format!("placement of {} leaves the table", instance.name(obj))));
            break;
        }
        for other in instance.objects() {
            if other == obj {
                continue;
            }
            if geometry::footprints_collide(
                instance.shape(obj),
                &action.to,
                instance.shape(other),
                &poses[other.0],
            ) {
                failure = Some((step, format!(
                    "placement of {} collides with {}",
                    instance.name(obj),
                    instance.name(other)
                )));
                break 'steps;
            }
        }
        if action.to.z.abs() > POSE_TOL {
            let supported = instance.objects().filter(|o| *o != obj).any(|o| {
                let top = poses[o.0].z + instance.shape(o).height();
                (action.to.z - top).abs() <= SUPPORT_TOL
                    && geometry::footprints_overlap_xy(
                        instance.shape(obj),
                        &action.to,
                        instance.shape(o),
                        &poses[o.0],
                    )
            });
            if !supported {
                failure = Some((step, format!(
                    "placement of {} floats unsupported at z={}",
                    instance.name(obj),
                    action.to.z
                )));
                break;
            }
        }
        poses[obj.0] = action.to;
    }

    let final_state_ok = failure.is_none()
        && (0..n).all(|i| instance.same_place(ObjId(i), &poses[i], &instance.goal_pose(ObjId(i))));
    if failure.is_none() && !final_state_ok {
        failure = Some((plan.len(), "final arrangement differs from the goal".into()));
    }
    let recomputed = plan_cost(plan, instance);
    let cost_mismatch = claimed.and_then(|c| {
        let gap = (c.total - recomputed.total)
            .abs()
            .max((c.travel - recomputed.travel).abs())
            .max((c.manipulation - recomputed.manipulation).abs());
        (gap > 1e-9).then_some(gap)
    });
    VerificationReport {
        pass: failure.is_none() && final_state_ok,
        failure,
        final_state_ok,
        recomputed,
        cost_mismatch,
    }
}

// ---------------------------------------------------------------------------
// Benchmarking
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct BenchmarkRow {
    pub instance_id: String,
    pub n: usize,
    pub rho: f64,
    pub scenario: Scenario,
    pub planner: String,
    pub success: bool,
    pub actions: usize,
    pub actions_per_object: f64,
    pub travel: f64,
    pub manipulation: f64,
    pub total: f64,
    pub wall_time_s: f64,
    pub nodes_expanded: u64,
}

#[derive(Clone, Debug)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchmarkRow>,
    pub summary: Vec<String>,
}

/// Runs every (instance, planner) pair under its timeout, in parallel worker
/// threads when `jobs > 1`. Failures become `success=false` rows; output
/// order is by (instance, planner) regardless of scheduling.
pub fn run_benchmark(
    instances: &[Instance],
    planners: &[(String, PlannerConfig)],
    oracle: &dyn StabilityOracle,
    jobs: usize,
) -> BenchmarkReport {
    let tasks: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..planners.len()).map(move |p| (i, p)))
        .collect();
    let results: Mutex<Vec<Option<BenchmarkRow>>> = Mutex::new(vec![None; tasks.len()]);
    let cursor = AtomicUsize::new(0);

    let worker = || loop {
        let t = cursor.fetch_add(1, AtomicOrdering::SeqCst);
        if t >= tasks.len() {
            break;
        }
        let (ii, pi) = tasks[t];
        let row = run_single(&instances[ii], &planners[pi].0, &planners[pi].1, oracle);
        results.lock().unwrap()[t] = Some(row);
    };

    if jobs <= 1 {
        worker();
    } else {
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(worker);
            }
        });
    }

    let rows: Vec<BenchmarkRow> =
        results.into_inner().unwrap().into_iter().map(|r| r.unwrap()).collect();
    let summary = summarize(&rows, planners);
    BenchmarkReport { rows, summary }
}

fn run_single(
    instance: &Instance,
    planner_name: &str,
    cfg: &PlannerConfig,
    oracle: &dyn StabilityOracle,
) -> BenchmarkRow {
    let n = instance.object_count();
    let base = BenchmarkRow {
        instance_id: instance.id.clone(),
        n,
        rho: instance.density(),
        scenario: instance.scenario,
        planner: planner_name.to_string(),
        success: false,
        actions: 0,
        actions_per_object: 0.0,
        travel: 0.0,
        manipulation: 0.0,
        total: 0.0,
        wall_time_s: 0.0,
        nodes_expanded: 0,
    };
    match plan_search(instance, cfg, oracle) {
        Ok(outcome) => {
            let verified = verify_plan(instance, &outcome.plan, Some(&outcome.cost));
            let stats = &outcome.stats;
            BenchmarkRow {
                success: verified.pass,
                actions: outcome.plan.len(),
                actions_per_object: outcome.plan.len() as f64 / n as f64,
                travel: outcome.cost.travel,
                manipulation: outcome.cost.manipulation,
                total: outcome.cost.total,
                wall_time_s: stats.wall_time_s,
                nodes_expanded: stats.ds_expanded + stats.nds_expanded,
                ..base
            }
        }
        Err(PlanFailure::Timeout(stats))
        | Err(PlanFailure::Exhausted(stats))
        | Err(PlanFailure::Budget(stats)) => BenchmarkRow {
            wall_time_s: stats.wall_time_s,
            nodes_expanded: stats.ds_expanded + stats.nds_expanded,
            ..base
        },
        Err(PlanFailure::InvalidInstance(_)) => base,
    }
}

/// Success rates per planner and commonly-solved means per planner pair.
fn summarize(rows: &[BenchmarkRow], planners: &[(String, PlannerConfig)]) -> Vec<String> {
    let mut lines = Vec::new();
    let total_instances = rows.len() / planners.len().max(1);
    for (name, _) in planners {
        let solved = rows.iter().filter(|r| r.planner == *name && r.success).count();
        let rate = if total_instances > 0 { solved as f64 / total_instances as f64 } else { 0.0 };
        lines.push(format!("# success,{name},{solved},{total_instances},{rate}"));
    }
    for i in 0..planners.len() {
        for j in (i + 1)..planners.len() {
            let (pa, pb) = (&planners[i].0, &planners[j].0);
            let mut travel = (0.0, 0.0);
            let mut actions = (0.0, 0.0);
            let mut total = (0.0, 0.0);
            let mut count = 0usize;
            let by_id = |planner: &str, id: &str| {
                rows.iter().find(|r| r.planner == planner && r.instance_id == id)
            };
            let mut ids: Vec<&str> = rows
                .iter()
                .filter(|r| r.planner == *pa)
                .map(|r| r.instance_id.as_str())
                .collect();
            ids.dedup();
            for id in ids {
                let (Some(a), Some(b)) = (by_id(pa, id), by_id(pb, id)) else { continue };
                if a.success && b.success {
                    count += 1;
                    travel.0 += a.travel;
                    travel.1 += b.travel;
                    actions.0 += a.actions as f64;
                    actions.1 += b.actions as f64;
                    total.0 += a.total;
                    total.1 += b.total;
                }
            }
            let k = count.max(1) as f64;
            lines.push(format!(
                "# common,{pa},{pb},{count},{},{},{},{},{},{}",
                travel.0 / k,
                travel.1 / k,
                actions.0 / k,
                actions.1 / k,
                total.0 / k,
                total.1 / k
            ));
        }
    }
    lines
}

/// Renders the report as CSV. Wall-clock columns are emitted only when
/// `include_timing` is set, keeping seeded reruns byte-identical.
pub fn benchmark_csv(report: &BenchmarkReport, include_timing: bool) -> String {
    let mut out = String::new();
    out.push_str(
        "instance,n,rho,scenario,planner,success,actions,actions_per_object,travel,manipulation,total,wall_time_s,nodes_expanded\n",
    );
    for r in &report.rows {
        let wall = if include_timing { r.wall_time_s.to_string() } else { String::new() };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.instance_id,
            r.n,
            r.rho,
            r.scenario.as_str(),
            r.planner,
            r.success,
            r.actions,
            r.actions_per_object,
            r.travel,
            r.manipulation,
            r.total,
            wall,
            r.nodes_expanded
        ));
    }
    for line in &report.summary {
        out.push_str(line);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_arrangement, Action};
    use crate::stability::AlwaysStable;

    #[test]
    fn disc_radius_matches_density_formula() {
        let ee = generate_disc_instance(5, 0.2, Scenario::Ee, 1).unwrap();
        match ee.shapes[0] {
            ObjectShape::Disc { radius, .. } => {
                assert!((radius - 0.11283791670955126).abs() < 1e-12)
            }
            _ => unreachable!(),
        }
        assert!((ee.density() - 0.2).abs() < 1e-9);
        let mb = generate_disc_instance(5, 0.2, Scenario::Mb, 1).unwrap();
        match mb.shapes[0] {
            ObjectShape::Disc { radius, .. } => {
                assert!((radius - (0.2 * 3.0 / (5.0 * std::f64::consts::PI)).sqrt()).abs() < 1e-12)
            }
            _ => unreachable!(),
        }
        assert_eq!(mb.table.width, 3.0);
    }

    #[test]
    fn generated_instances_are_feasible_and_deterministic() {
        for seed in 0..5 {
            let a = generate_disc_instance(6, 0.2, Scenario::Ee, seed).unwrap();
            let b = generate_disc_instance(6, 0.2, Scenario::Ee, seed).unwrap();
            assert_eq!(a.initial, b.initial);
            assert_eq!(a.goal, b.goal);
            assert!(validate_arrangement(&a.initial, &a).unwrap().valid());
            assert!(validate_arrangement(&a.goal, &a).unwrap().valid());
        }
    }

    #[test]
    fn over_dense_generation_fails() {
        // rho out of range.
        assert!(matches!(
            generate_disc_instance(1, 0.6, Scenario::Ee, 0),
            Err(GenError::BadParams(_))
        ));
        // A single disc wider than the short table side.
        assert!(matches!(
            generate_disc_instance(1, 0.3, Scenario::Mb, 0),
            Err(GenError::BadParams(_))
        ));
    }

    #[test]
    fn shape_instance_area_scaling_and_stacking() {
        let square = ObjectShape::Prism {
            footprint: vec![
                geometry::Point2::new(-0.5, -0.5),
                geometry::Point2::new(0.5, -0.5),
                geometry::Point2::new(0.5, 0.5),
                geometry::Point2::new(-0.5, 0.5),
            ],
            height: 0.1,
        };
        let catalog = vec![ShapeCatalogEntry { shape: square, stack_on: None }];
        let inst = generate_shape_instance(&catalog, 4, 0.25, Scenario::Ee, 3).unwrap();
        assert!((inst.table.width * inst.table.depth - 16.0).abs() < 1e-9);
        assert!((inst.density() - 0.25).abs() < 1e-9);

        // Cup-on-plate goal stacking survives validation.
        let plate = ObjectShape::Disc { radius: 0.12, height: 0.02 };
        let cup = ObjectShape::Disc { radius: 0.04, height: 0.08 };
        let catalog = vec![
            ShapeCatalogEntry { shape: plate, stack_on: None },
            ShapeCatalogEntry { shape: cup, stack_on: Some(0) },
        ];
        let inst = generate_shape_instance(&catalog, 2, 0.05, Scenario::Ee, 4).unwrap();
        assert_eq!(inst.goal.support[1], Support::On(ObjId(0)));
        assert!(validate_arrangement(&inst.goal, &inst).unwrap().valid());
        let again = generate_shape_instance(
            &[
                ShapeCatalogEntry { shape: ObjectShape::Disc { radius: 0.12, height: 0.02 }, stack_on: None },
                ShapeCatalogEntry { shape: ObjectShape::Disc { radius: 0.04, height: 0.08 }, stack_on: Some(0) },
            ],
            2,
            0.05,
            Scenario::Ee,
            4,
        )
        .unwrap();
        assert_eq!(inst.goal, again.goal);
    }

    #[test]
    fn verify_empty_plan_on_solved_instance() {
        let mut inst = generate_disc_instance(2, 0.1, Scenario::Ee, 7).unwrap();
        inst.goal = inst.initial.clone();
        let report = verify_plan(&inst, &Plan::default(), None);
        assert!(report.pass);
    }

    #[test]
    fn verify_rejects_covered_pick() {
        // Apple on plate: moving the plate first is not executable.
        let plate = ObjectShape::Disc { radius: 0.12, height: 0.02 };
        let apple = ObjectShape::Disc { radius: 0.04, height: 0.07 };
        let inst = Instance {
            id: "verify".into(),
            scenario: Scenario::Ee,
            table: Table { width: 1.0, depth: 1.0 },
            manipulation_cost: 10.0,
            names: vec!["plate".into(), "apple".into()],
            shapes: vec![plate, apple],
            initial: Arrangement::from_poses(
                vec![Pose::flat(0.0, 0.0), Pose::new(0.0, 0.0, 0.02, 0.0)],
                vec![Support::Table, Support::On(ObjId(0))],
            ),
            goal: Arrangement::flat(vec![Pose::flat(-0.3, 0.0), Pose::flat(0.3, 0.0)]),
        };
        let plan = Plan {
            actions: vec![Action {
                object: ObjId(0),
                from: Pose::flat(0.0, 0.0),
                to: Pose::flat(-0.3, 0.0),
            }],
        };
        let report = verify_plan(&inst, &plan, None);
        assert!(!report.pass);
        assert_eq!(report.failure.as_ref().unwrap().0, 0);
        assert!(report.failure.unwrap().1.contains("not graspable"));
    }

    #[test]
    fn verify_flags_stale_cost_but_passes() {
        let inst = generate_disc_instance(1, 0.1, Scenario::Ee, 9).unwrap();
        let out = plan_search(&inst, &PlannerConfig::default(), &AlwaysStable).unwrap();
        let stale = CostBreakdown::new(out.cost.travel + 1.0, out.cost.manipulation);
        let report = verify_plan(&inst, &out.plan, Some(&stale));
        assert!(report.pass);
        assert!(report.cost_mismatch.is_some());
    }

    #[test]
    fn benchmark_rows_and_summary() {
        let instances = vec![generate_disc_instance(2, 0.15, Scenario::Ee, 11).unwrap()];
        let planners = vec![
            ("orla-full".to_string(), PlannerConfig::default()),
            (
                "orla-action".to_string(),
                PlannerConfig {
                    planner: crate::search::PlannerKind::OrlaAction,
                    ..PlannerConfig::default()
                },
            ),
            (
                "greedy-sampling".to_string(),
                PlannerConfig {
                    planner: crate::search::PlannerKind::GreedySampling,
                    ..PlannerConfig::default()
                },
            ),
        ];
        let report = run_benchmark(&instances, &planners, &AlwaysStable, 1);
        assert_eq!(report.rows.len(), 3);
        assert!(report.rows.iter().all(|r| r.success));
        assert_eq!(report.summary.len(), 3 + 3);
        let text = benchmark_csv(&report, false);
        let again = benchmark_csv(&run_benchmark(&instances, &planners, &AlwaysStable, 1), false);
        assert_eq!(text, again, "seeded reruns must be byte-identical");
        // Parallel execution returns the same rows in the same order.
        let parallel = benchmark_csv(&run_benchmark(&instances, &planners, &AlwaysStable, 3), false);
        assert_eq!(text, parallel);
    }
}
