//! Domain types for objects, poses, arrangements, plans, and instances,
//! plus the feasibility / graspability / goal-availability predicates.

use crate::geometry::{self, Grid, Point2, Rect};
use thiserror::Error;

/// Tolerance for "same pose" comparisons (positions and angles are copied,
/// never computed, so this can be tight).
pub const POSE_TOL: f64 = 1e-9;
/// An object at `z > 0` must sit on a support whose top surface matches its
/// `z` within this tolerance.
pub const SUPPORT_TOL: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed instance: {0}")]
    MalformedInstance(String),
    #[error("object {0} is at a buffer; query requires a concrete pose")]
    QueryOnBuffer(String),
}

/// A placement `(x, y, z, theta)` on or above the table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub theta: f64,
}

impl Pose {
    /// Builds a pose with `theta` normalized into `[0, 2*pi)`.
    pub fn new(x: f64, y: f64, z: f64, theta: f64) -> Self {
        Pose { x, y, z, theta: normalize_angle(theta) }
    }

    pub fn flat(x: f64, y: f64) -> Self {
        Pose::new(x, y, 0.0, 0.0)
    }

    pub fn xy(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

pub fn normalize_angle(theta: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut t = theta % two_pi;
    if t < 0.0 {
        t += two_pi;
    }
    // The remainder can land exactly on 2*pi after the correction.
    if t >= two_pi {
        t = 0.0;
    }
    t
}

/// Angular distance on the circle, in `[0, pi]`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (normalize_angle(a) - normalize_angle(b)).abs();
    d.min(std::f64::consts::TAU - d)
}

/// Identifier of an object inside one instance (dense index).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjId(pub usize);

/// Object geometry: an extruded footprint.
#[derive(Clone, Debug, PartialEq)]
pub enum ObjectShape {
    Disc {
        radius: f64,
        height: f64,
    },
    /// Convex polygon footprint, counterclockwise, in the object frame.
    Prism {
        footprint: Vec<Point2>,
        height: f64,
    },
    /// Bottom-surface depth grid plus footprint mask at a fixed resolution.
    /// Depths are nonnegative offsets from the object's lowest point. The
    /// grid is centered on the object frame origin.
    Gridded {
        resolution: f64,
        mask: Grid<bool>,
        bottom: Grid<f64>,
        height: f64,
    },
}

impl ObjectShape {
    pub fn height(&self) -> f64 {
        match self {
            ObjectShape::Disc { height, .. } => *height,
            ObjectShape::Prism { height, .. } => *height,
            ObjectShape::Gridded { height, .. } => *height,
        }
    }

    /// Footprint area `S(o)`.
    pub fn footprint_area(&self) -> f64 {
        match self {
            ObjectShape::Disc { radius, .. } => std::f64::consts::PI * radius * radius,
            ObjectShape::Prism { footprint, .. } => geometry::polygon_area(footprint),
            ObjectShape::Gridded { resolution, mask, .. } => {
                let cells = mask.iter().filter(|&&m| m).count();
                cells as f64 * resolution * resolution
            }
        }
    }

    /// Radius of the smallest origin-centered disc containing the footprint.
    pub fn circumradius(&self) -> f64 {
        match self {
            ObjectShape::Disc { radius, .. } => *radius,
            ObjectShape::Prism { footprint, .. } => footprint
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max),
            ObjectShape::Gridded { resolution, mask, .. } => {
                let mut r: f64 = 0.0;
                for (row, col, &m) in mask.iter_indexed() {
                    if m {
                        let c = geometry::grid_cell_center(mask, *resolution, row, col);
                        // Corner of the cell, conservatively.
                        r = r.max(c.norm() + resolution * std::f64::consts::SQRT_2 / 2.0);
                    }
                }
                r
            }
        }
    }

    /// Goal equality ignores theta for rotation-invariant footprints.
    pub fn theta_invariant(&self) -> bool {
        matches!(self, ObjectShape::Disc { .. })
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            ObjectShape::Disc { radius, height } => {
                if *radius <= 0.0 {
                    return Err(ModelError::MalformedInstance("disc radius must be > 0".into()));
                }
                if *height <= 0.0 {
                    return Err(ModelError::MalformedInstance("disc height must be > 0".into()));
                }
            }
            ObjectShape::Prism { footprint, height } => {
                if *height <= 0.0 {
                    return Err(ModelError::MalformedInstance("prism height must be > 0".into()));
                }
                if !geometry::is_convex_ccw(footprint) {
                    return Err(ModelError::MalformedInstance(
                        "prism footprint must be a non-degenerate counterclockwise convex polygon".into(),
                    ));
                }
            }
            ObjectShape::Gridded { resolution, mask, bottom, height } => {
                if *resolution <= 0.0 {
                    return Err(ModelError::MalformedInstance("gridded resolution must be > 0".into()));
                }
                if *height <= 0.0 {
                    return Err(ModelError::MalformedInstance("gridded height must be > 0".into()));
                }
                if mask.rows() != bottom.rows() || mask.cols() != bottom.cols() {
                    return Err(ModelError::MalformedInstance(
                        "gridded mask and bottom grids must share dimensions".into(),
                    ));
                }
                if !mask.iter().any(|&m| m) {
                    return Err(ModelError::MalformedInstance("gridded mask is empty".into()));
                }
                if bottom.iter().any(|&d| d < 0.0 || !d.is_finite()) {
                    return Err(ModelError::MalformedInstance(
                        "gridded bottom depths must be finite and nonnegative".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Where an object currently is: a concrete pose, or a symbolic buffer that
/// has not been allocated yet. Buffers appear only inside search states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ObjectState {
    AtPose(Pose),
    AtBuffer(u64),
}

/// What an object rests on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    Table,
    On(ObjId),
}

/// Assignment of every object to a state, plus the support relation for
/// objects at poses.
#[derive(Clone, Debug, PartialEq)]
pub struct Arrangement {
    pub states: Vec<ObjectState>,
    pub support: Vec<Support>,
}

impl Arrangement {
    pub fn from_poses(poses: Vec<Pose>, support: Vec<Support>) -> Self {
        Arrangement { states: poses.into_iter().map(ObjectState::AtPose).collect(), support }
    }

    pub fn flat(poses: Vec<Pose>) -> Self {
        let n = poses.len();
        Arrangement::from_poses(poses, vec![Support::Table; n])
    }

    pub fn pose(&self, obj: ObjId) -> Option<Pose> {
        match self.states.get(obj.0) {
            Some(ObjectState::AtPose(p)) => Some(*p),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Small table; travel is end-effector Euclidean distance in x-y.
    Ee,
    /// Large table; travel is mobile-base distance along the boundary track.
    Mb,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Ee => "EE",
            Scenario::Mb => "MB",
        }
    }
}

/// Axis-aligned table rectangle centered at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Table {
    pub width: f64,
    pub depth: f64,
}

impl Table {
    pub fn rect(&self) -> Rect {
        Rect::centered(self.width, self.depth)
    }
}

/// One pick-n-place.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Action {
    pub object: ObjId,
    pub from: Pose,
    pub to: Pose,
}

/// An ordered action sequence.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Plan {
    pub actions: Vec<Action>,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// A rearrangement problem: shapes, initial and goal arrangements, table
/// geometry, scenario kind, and the per-action manipulation constant.
#[derive(Clone, Debug)]
pub struct Instance {
    pub id: String,
    pub scenario: Scenario,
    pub table: Table,
    /// Cost charged per pick-n-place (`C`).
    pub manipulation_cost: f64,
    pub names: Vec<String>,
    pub shapes: Vec<ObjectShape>,
    pub initial: Arrangement,
    pub goal: Arrangement,
}

impl Instance {
    pub fn object_count(&self) -> usize {
        self.shapes.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> {
        (0..self.shapes.len()).map(ObjId)
    }

    pub fn shape(&self, obj: ObjId) -> &ObjectShape {
        &self.shapes[obj.0]
    }

    pub fn name(&self, obj: ObjId) -> &str {
        &self.names[obj.0]
    }

    pub fn index_of(&self, name: &str) -> Option<ObjId> {
        self.names.iter().position(|n| n == name).map(ObjId)
    }

    /// The goal pose of an object (goal arrangements are always concrete).
    pub fn goal_pose(&self, obj: ObjId) -> Pose {
        self.goal.pose(obj).expect("goal arrangement must be concrete")
    }

    pub fn initial_pose(&self, obj: ObjId) -> Pose {
        self.initial.pose(obj).expect("initial arrangement must be concrete")
    }

    /// Pose equality at the instance's tolerance; discs ignore theta.
    pub fn same_place(&self, obj: ObjId, a: &Pose, b: &Pose) -> bool {
        let pos_ok = (a.x - b.x).abs() <= POSE_TOL
            && (a.y - b.y).abs() <= POSE_TOL
            && (a.z - b.z).abs() <= POSE_TOL;
        if !pos_ok {
            return false;
        }
        self.shape(obj).theta_invariant() || angle_distance(a.theta, b.theta) <= POSE_TOL
    }

    /// Density level: total footprint area over table area.
    pub fn density(&self) -> f64 {
        let area: f64 = self.shapes.iter().map(|s| s.footprint_area()).sum();
        area / (self.table.width * self.table.depth)
    }

    /// Structural checks: shapes valid, arrangements sized to the object
    /// set, goal concrete. Does not check geometric feasibility.
    pub fn check_structure(&self) -> Result<(), ModelError> {
        let n = self.shapes.len();
        if self.names.len() != n {
            return Err(ModelError::MalformedInstance("names and shapes length mismatch".into()));
        }
        for (i, name) in self.names.iter().enumerate() {
            if name == "table" {
                return Err(ModelError::MalformedInstance("object id \"table\" is reserved".into()));
            }
            if self.names[..i].contains(name) {
                return Err(ModelError::MalformedInstance(format!("duplicate object id {name:?}")));
            }
        }
        for shape in &self.shapes {
            shape.validate()?;
        }
        for (label, arr) in [("initial", &self.initial), ("goal", &self.goal)] {
            if arr.states.len() != n || arr.support.len() != n {
                return Err(ModelError::MalformedInstance(format!(
                    "{label} arrangement does not cover the object set"
                )));
            }
            for (i, st) in arr.states.iter().enumerate() {
                match st {
                    ObjectState::AtPose(p) => {
                        if p.z < 0.0 {
                            return Err(ModelError::MalformedInstance(format!(
                                "{label} pose of {} has z < 0",
                                self.names[i]
                            )));
                        }
                    }
                    ObjectState::AtBuffer(_) => {
                        return Err(ModelError::MalformedInstance(format!(
                            "{label} arrangement contains a buffer state for {}",
                            self.names[i]
                        )));
                    }
                }
                if let Support::On(parent) = arr.support[i] {
                    if parent.0 >= n {
                        return Err(ModelError::MalformedInstance(format!(
                            "{label} support of {} references an unknown object",
                            self.names[i]
                        )));
                    }
                    if parent.0 == i {
                        return Err(ModelError::MalformedInstance(format!(
                            "{label} support of {} references itself",
                            self.names[i]
                        )));
                    }
                }
            }
        }
        if self.table.width <= 0.0 || self.table.depth <= 0.0 {
            return Err(ModelError::MalformedInstance("table dimensions must be positive".into()));
        }
        if self.manipulation_cost < 0.0 {
            return Err(ModelError::MalformedInstance("manipulation constant must be >= 0".into()));
        }
        Ok(())
    }
}

/// One violated condition found by [`validate_arrangement`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    OutOfRegion(ObjId),
    Collision(ObjId, ObjId),
    Unsupported(ObjId),
    SupportCycle(ObjId),
}

#[derive(Clone, Debug, Default)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks containment, pairwise collision-freedom, support consistency, and
/// acyclicity of the support relation. All states must be concrete.
pub fn validate_arrangement(
    arrangement: &Arrangement,
    instance: &Instance,
) -> Result<ValidityReport, ModelError> {
    let n = instance.object_count();
    if arrangement.states.len() != n || arrangement.support.len() != n {
        return Err(ModelError::MalformedInstance(
            "arrangement does not match the instance object set".into(),
        ));
    }
    let mut poses = Vec::with_capacity(n);
    for (i, st) in arrangement.states.iter().enumerate() {
        match st {
            ObjectState::AtPose(p) => poses.push(*p),
            ObjectState::AtBuffer(_) => {
                return Err(ModelError::QueryOnBuffer(instance.names[i].clone()))
            }
        }
    }

    let mut report = ValidityReport::default();
    let rect = instance.table.rect();
    for (i, pose) in poses.iter().enumerate() {
        if !geometry::footprint_in_rect(instance.shape(ObjId(i)), pose, &rect) {
            report.violations.push(Violation::OutOfRegion(ObjId(i)));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if geometry::footprints_collide(
                instance.shape(ObjId(i)),
                &poses[i],
                instance.shape(ObjId(j)),
                &poses[j],
            ) {
                report.violations.push(Violation::Collision(ObjId(i), ObjId(j)));
            }
        }
    }
    for (i, support) in arrangement.support.iter().enumerate() {
        match *support {
            Support::Table => {
                if poses[i].z.abs() > POSE_TOL {
                    report.violations.push(Violation::Unsupported(ObjId(i)));
                }
            }
            Support::On(parent) => {
                let top = poses[parent.0].z + instance.shape(parent).height();
                let touching = (poses[i].z - top).abs() <= SUPPORT_TOL;
                let overlapping = geometry::footprints_overlap_xy(
                    instance.shape(ObjId(i)),
                    &poses[i],
                    instance.shape(parent),
                    &poses[parent.0],
                );
                if !touching || !overlapping {
                    report.violations.push(Violation::Unsupported(ObjId(i)));
                }
            }
        }
    }
    // Support acyclicity.
    for start in 0..n {
        let mut seen = 0usize;
        let mut cur = start;
        loop {
            match arrangement.support[cur] {
                Support::Table => break,
                Support::On(p) => {
                    cur = p.0;
                    seen += 1;
                    if seen > n {
                        report.violations.push(Violation::SupportCycle(ObjId(start)));
                        break;
                    }
                }
            }
        }
    }
    Ok(report)
}

/// True iff nothing rests on the object (directly or through a stack).
pub fn is_graspable(
    obj: ObjId,
    arrangement: &Arrangement,
    instance: &Instance,
) -> Result<bool, ModelError> {
    match arrangement.states.get(obj.0) {
        Some(ObjectState::AtPose(_)) => {}
        Some(ObjectState::AtBuffer(_)) => {
            return Err(ModelError::QueryOnBuffer(instance.names[obj.0].clone()))
        }
        None => return Err(ModelError::MalformedInstance("unknown object id".into())),
    }
    for other in instance.objects() {
        if other == obj {
            continue;
        }
        if matches!(arrangement.states[other.0], ObjectState::AtBuffer(_)) {
            continue;
        }
        // Walk the support chain of `other` downward.
        let mut cur = other;
        let mut hops = 0;
        loop {
            match arrangement.support[cur.0] {
                Support::Table => break,
                Support::On(p) => {
                    if p == obj {
                        return Ok(false);
                    }
                    cur = p;
                    hops += 1;
                    if hops > instance.object_count() {
                        break;
                    }
                }
            }
        }
    }
    Ok(true)
}

/// True iff the object's goal pose is free of every object currently at a
/// pose (the object itself is in hand), and every object whose goal lies
/// beneath it in the goal stacking is already placed.
pub fn is_goal_available(obj: ObjId, arrangement: &Arrangement, instance: &Instance) -> bool {
    let goal = instance.goal_pose(obj);
    for other in instance.objects() {
        if other == obj {
            continue;
        }
        if let ObjectState::AtPose(p) = &arrangement.states[other.0] {
            if geometry::footprints_collide(instance.shape(obj), &goal, instance.shape(other), p) {
                return false;
            }
        }
    }
    // Goal-stack parents beneath this object must already be at their goals.
    let mut cur = obj;
    let mut hops = 0;
    while let Support::On(parent) = instance.goal.support[cur.0] {
        match &arrangement.states[parent.0] {
            ObjectState::AtPose(p) => {
                let pg = instance.goal_pose(parent);
                if !instance.same_place(parent, p, &pg) {
                    return false;
                }
            }
            ObjectState::AtBuffer(_) => return false,
        }
        cur = parent;
        hops += 1;
        if hops > instance.object_count() {
            break;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(radius: f64, height: f64) -> ObjectShape {
        ObjectShape::Disc { radius, height }
    }

    fn one_object_instance(shape: ObjectShape, start: Pose, goal: Pose) -> Instance {
        Instance {
            id: "t".into(),
            scenario: Scenario::Ee,
            table: Table { width: 1.0, depth: 1.0 },
            manipulation_cost: 10.0,
            names: vec!["o1".into()],
            shapes: vec![shape],
            initial: Arrangement::flat(vec![start]),
            goal: Arrangement::flat(vec![goal]),
        }
    }

    fn two_disc_instance(r: f64, starts: [Pose; 2], goals: [Pose; 2]) -> Instance {
        Instance {
            id: "t2".into(),
            scenario: Scenario::Ee,
            table: Table { width: 1.0, depth: 1.0 },
            manipulation_cost: 10.0,
            names: vec!["o1".into(), "o2".into()],
            shapes: vec![disc(r, 0.05), disc(r, 0.05)],
            initial: Arrangement::flat(starts.to_vec()),
            goal: Arrangement::flat(goals.to_vec()),
        }
    }

    #[test]
    fn valid_single_disc_centered() {
        let inst = one_object_instance(disc(0.1, 0.05), Pose::flat(0.0, 0.0), Pose::flat(0.2, 0.2));
        let report = validate_arrangement(&inst.initial, &inst).unwrap();
        assert!(report.valid(), "{:?}", report.violations);
    }

    #[test]
    fn colliding_discs_reported() {
        let inst = two_disc_instance(
            0.1,
            [Pose::flat(0.0, 0.0), Pose::flat(0.05, 0.0)],
            [Pose::flat(-0.3, 0.0), Pose::flat(0.3, 0.0)],
        );
        let report = validate_arrangement(&inst.initial, &inst).unwrap();
        assert_eq!(report.violations, vec![Violation::Collision(ObjId(0), ObjId(1))]);
    }

    #[test]
    fn out_of_region_disc() {
        let inst = one_object_instance(disc(0.1, 0.05), Pose::flat(0.48, 0.0), Pose::flat(0.0, 0.0));
        let report = validate_arrangement(&inst.initial, &inst).unwrap();
        assert_eq!(report.violations, vec![Violation::OutOfRegion(ObjId(0))]);
    }

    #[test]
    fn unsupported_floating_object() {
        let mut inst = one_object_instance(disc(0.1, 0.05), Pose::flat(0.0, 0.0), Pose::flat(0.2, 0.2));
        inst.initial = Arrangement::flat(vec![Pose::new(0.0, 0.0, 0.3, 0.0)]);
        let report = validate_arrangement(&inst.initial, &inst).unwrap();
        assert_eq!(report.violations, vec![Violation::Unsupported(ObjId(0))]);
    }

    #[test]
    fn graspability_of_stacked_pair() {
        // Apple (o2) resting on plate (o1).
        let plate = disc(0.12, 0.02);
        let apple = disc(0.04, 0.07);
        let inst = Instance {
            id: "stack".into(),
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
        assert!(validate_arrangement(&inst.initial, &inst).unwrap().valid());
        assert!(!is_graspable(ObjId(0), &inst.initial, &inst).unwrap());
        assert!(is_graspable(ObjId(1), &inst.initial, &inst).unwrap());
    }

    #[test]
    fn side_by_side_discs_both_graspable() {
        let inst = two_disc_instance(
            0.1,
            [Pose::flat(-0.25, 0.0), Pose::flat(0.25, 0.0)],
            [Pose::flat(-0.25, 0.3), Pose::flat(0.25, 0.3)],
        );
        assert!(is_graspable(ObjId(0), &inst.initial, &inst).unwrap());
        assert!(is_graspable(ObjId(1), &inst.initial, &inst).unwrap());
    }

    #[test]
    fn graspable_query_on_buffer_errors() {
        let mut inst = two_disc_instance(
            0.1,
            [Pose::flat(-0.25, 0.0), Pose::flat(0.25, 0.0)],
            [Pose::flat(-0.25, 0.3), Pose::flat(0.25, 0.3)],
        );
        inst.initial.states[0] = ObjectState::AtBuffer(0);
        assert!(matches!(
            is_graspable(ObjId(0), &inst.initial, &inst),
            Err(ModelError::QueryOnBuffer(_))
        ));
    }

    #[test]
    fn goal_availability_free_space() {
        let inst = two_disc_instance(
            0.1,
            [Pose::flat(-0.25, 0.0), Pose::flat(0.25, 0.0)],
            [Pose::flat(-0.25, 0.3), Pose::flat(0.25, 0.3)],
        );
        assert!(is_goal_available(ObjId(0), &inst.initial, &inst));
        assert!(is_goal_available(ObjId(1), &inst.initial, &inst));
    }

    #[test]
    fn goal_blocked_by_other_object() {
        // Mutual deadlock: each goal overlaps the other object's start.
        let inst = two_disc_instance(
            0.1,
            [Pose::flat(-0.1, 0.0), Pose::flat(0.1, 0.0)],
            [Pose::flat(0.1, 0.0), Pose::flat(-0.1, 0.0)],
        );
        assert!(!is_goal_available(ObjId(0), &inst.initial, &inst));
        assert!(!is_goal_available(ObjId(1), &inst.initial, &inst));
    }

    #[test]
    fn goal_on_unplaced_parent_unavailable() {
        // Cup's goal sits on the plate; the plate is not at its goal yet.
        let plate = disc(0.12, 0.02);
        let cup = disc(0.04, 0.1);
        let inst = Instance {
            id: "stackgoal".into(),
            scenario: Scenario::Ee,
            table: Table { width: 1.0, depth: 1.0 },
            manipulation_cost: 10.0,
            names: vec!["plate".into(), "cup".into()],
            shapes: vec![plate, cup],
            initial: Arrangement::flat(vec![Pose::flat(-0.3, 0.0), Pose::flat(0.3, 0.0)]),
            goal: Arrangement::from_poses(
                vec![Pose::flat(0.0, 0.0), Pose::new(0.0, 0.0, 0.02, 0.0)],
                vec![Support::Table, Support::On(ObjId(0))],
            ),
        };
        assert!(!is_goal_available(ObjId(1), &inst.initial, &inst));
        assert!(is_goal_available(ObjId(0), &inst.initial, &inst));
    }

    #[test]
    fn angle_normalization() {
        assert!((normalize_angle(-0.5) - (std::f64::consts::TAU - 0.5)).abs() < 1e-12);
        assert_eq!(normalize_angle(0.0), 0.0);
        assert!(normalize_angle(std::f64::consts::TAU) < 1e-12);
        assert!(angle_distance(0.01, std::f64::consts::TAU - 0.01) - 0.02 < 1e-12);
    }
}
