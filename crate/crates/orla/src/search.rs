//! Lazy A* over rearrangement states.
//!
//! States are deterministic (DS: every object at a concrete pose) or
//! non-deterministic (NDS: at least one object parked at a buffer whose pose
//! is not committed yet). Expansion follows two rules: move a graspable
//! object to its available goal, or move a graspable blocker to a buffer.
//! Buffer poses are allocated only when a DS is popped; until then NDS nodes
//! carry a lower-bound `f` that assumes buffers cost nothing beyond an
//! optimally placed detour.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::time::{Duration, Instant};

use crate::buffer::{self, RecordInfo, Resolution, SegmentCtx};
use crate::cost::{chain_travel, leg_distance, plan_cost, CostBreakdown};
use crate::geometry::{self, Track};
use crate::model::{
    validate_arrangement, Action, Instance, ObjId, Plan, Pose, Scenario, SUPPORT_TOL,
};
use crate::stability::StabilityOracle;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlannerKind {
    OrlaFull,
    OrlaAction,
    GreedySampling,
}

impl PlannerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PlannerKind::OrlaFull => "orla-full",
            PlannerKind::OrlaAction => "orla-action",
            PlannerKind::GreedySampling => "greedy-sampling",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "orla-full" => Some(PlannerKind::OrlaFull),
            "orla-action" => Some(PlannerKind::OrlaAction),
            "greedy-sampling" => Some(PlannerKind::GreedySampling),
            _ => None,
        }
    }

    /// Weight of travel terms in g/h/f. The action-only ablation zeroes
    /// travel and minimizes pick-n-place count alone.
    pub fn travel_weight(&self) -> f64 {
        match self {
            PlannerKind::OrlaAction => 0.0,
            _ => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AllocatorKind {
    /// Sample poses from the optimal region, expanding it on failure.
    Sampling,
    /// Scan a fixed pose lattice and take the feasible pose with minimal
    /// four-visit travel.
    GridOptimal,
}

impl AllocatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AllocatorKind::Sampling => "sampling",
            AllocatorKind::GridOptimal => "grid-optimal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sampling" => Some(AllocatorKind::Sampling),
            "grid-optimal" => Some(AllocatorKind::GridOptimal),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlannerConfig {
    pub planner: PlannerKind,
    pub allocator: AllocatorKind,
    /// Poses sampled per round before the region expands.
    pub samples_per_round: usize,
    /// Region growth per failed round; defaults to the largest footprint
    /// radius of the instance.
    pub expansion_step: Option<f64>,
    /// Orientations tried per sampled position for non-disc shapes.
    pub orientation_count: usize,
    /// Lattice spacing of the grid-optimal allocator; also the ring-sweep
    /// step of the greedy baseline.
    pub grid_resolution: f64,
    pub seed: u64,
    pub timeout: Duration,
    /// Search-tree size cap; exceeding it fails the run (memory guard).
    pub max_nodes: usize,
    /// Record per-node data used by the admissibility test suites.
    pub record_trace: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            planner: PlannerKind::OrlaFull,
            allocator: AllocatorKind::Sampling,
            samples_per_round: 10,
            expansion_step: None,
            orientation_count: 8,
            grid_resolution: 0.05,
            seed: 0,
            timeout: Duration::from_secs(300),
            max_nodes: 2_000_000,
            record_trace: false,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchStats {
    pub ds_expanded: u64,
    pub nds_expanded: u64,
    pub nodes_generated: u64,
    pub buffers_sampled: u64,
    pub allocation_runs: u64,
    pub repairs: u64,
    pub wall_time_s: f64,
    pub trace: Option<SearchTrace>,
}

/// Optional instrumentation for the optimality test suites.
#[derive(Clone, Debug, Default)]
pub struct SearchTrace {
    /// Every expanded DS: concrete poses, robot position, g, h.
    pub expanded_ds: Vec<DsTraceEntry>,
    /// For each resolved DS, one pair per bounded ancestor on its segment:
    /// (ancestor lower-bound f, resolved g + h).
    pub bound_pairs: Vec<(f64, f64)>,
    /// f values of popped DS nodes in pop order (resolved pops only).
    pub popped_ds_f: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct DsTraceEntry {
    pub poses: Vec<Pose>,
    pub robot: Option<Pose>,
    pub g: f64,
    pub h: f64,
}

#[derive(Clone, Debug)]
pub struct PlanOutcome {
    pub plan: Plan,
    pub cost: CostBreakdown,
    pub stats: SearchStats,
}

#[derive(Debug)]
pub enum PlanFailure {
    Timeout(SearchStats),
    /// The open list ran dry without reaching the goal.
    Exhausted(SearchStats),
    /// The search tree outgrew the configured node budget.
    Budget(SearchStats),
    InvalidInstance(String),
}

impl std::fmt::Display for PlanFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PlanFailure::Timeout(_) => write!(f, "planning timed out"),
            PlanFailure::Exhausted(_) => write!(f, "search space exhausted without a plan"),
            PlanFailure::Budget(_) => write!(f, "search tree exceeded the node budget"),
            PlanFailure::InvalidInstance(msg) => write!(f, "invalid instance: {msg}"),
        }
    }
}

// ---------------------------------------------------------------------------
// World predicates shared by all planners
// ---------------------------------------------------------------------------

/// Concrete object poses of a search state; buffered objects are absent.
pub(crate) struct World<'a> {
    pub instance: &'a Instance,
    pub poses: Vec<Option<Pose>>,
}

impl<'a> World<'a> {
    pub fn misplaced(&self, obj: ObjId) -> bool {
        match &self.poses[obj.0] {
            None => true,
            Some(p) => !self.instance.same_place(obj, p, &self.instance.goal_pose(obj)),
        }
    }

    /// Nothing rests on the object (geometric contact test).
    pub fn graspable(&self, obj: ObjId) -> bool {
        let Some(pose) = self.poses[obj.0] else { return true };
        let top = pose.z + self.instance.shape(obj).height();
        for other in self.instance.objects() {
            if other == obj {
                continue;
            }
            if let Some(p) = &self.poses[other.0] {
                if (p.z - top).abs() <= SUPPORT_TOL
                    && geometry::footprints_overlap_xy(
                        self.instance.shape(other),
                        p,
                        self.instance.shape(obj),
                        &pose,
                    )
                {
                    return false;
                }
            }
        }
        true
    }

    /// Goal pose collision-free against every present object, and every
    /// goal-stack parent beneath it already placed.
    pub fn goal_available(&self, obj: ObjId) -> bool {
        let goal = self.instance.goal_pose(obj);
        for other in self.instance.objects() {
            if other == obj {
                continue;
            }
            if let Some(p) = &self.poses[other.0] {
                if geometry::footprints_collide(
                    self.instance.shape(obj),
                    &goal,
                    self.instance.shape(other),
                    p,
                ) {
                    return false;
                }
            }
        }
        let mut cur = obj;
        let mut hops = 0;
        while let crate::model::Support::On(parent) = self.instance.goal.support[cur.0] {
            match &self.poses[parent.0] {
                Some(p) => {
                    if !self.instance.same_place(parent, p, &self.instance.goal_pose(parent)) {
                        return false;
                    }
                }
                None => return false,
            }
            cur = parent;
            hops += 1;
            if hops > self.instance.object_count() {
                break;
            }
        }
        true
    }

    /// Whether the object contributes to some other misplaced object's rule
    /// violation: it overlaps that object's goal placement, or it weighs
    /// down that object's stack.
    pub fn blocks_someone(&self, obj: ObjId) -> bool {
        let Some(pose) = self.poses[obj.0] else { return false };
        for other in self.instance.objects() {
            if other == obj || !self.misplaced(other) {
                continue;
            }
            let goal = self.instance.goal_pose(other);
            if geometry::footprints_collide(
                self.instance.shape(obj),
                &pose,
                self.instance.shape(other),
                &goal,
            ) {
                return true;
            }
            if self.poses[other.0].is_some() && self.rests_above(obj, other) {
                return true;
            }
        }
        false
    }

    /// Direct geometric contact: `upper` rests on `lower`.
    fn directly_on(&self, upper: ObjId, lower: ObjId) -> bool {
        let (Some(u), Some(l)) = (self.poses[upper.0], self.poses[lower.0]) else {
            return false;
        };
        let top = l.z + self.instance.shape(lower).height();
        (u.z - top).abs() <= SUPPORT_TOL
            && geometry::footprints_overlap_xy(
                self.instance.shape(upper),
                &u,
                self.instance.shape(lower),
                &l,
            )
    }

    /// `upper` sits (directly or through a stack) on top of `lower`.
    fn rests_above(&self, upper: ObjId, lower: ObjId) -> bool {
        let n = self.instance.object_count();
        let mut seen = vec![false; n];
        let mut stack = vec![upper];
        seen[upper.0] = true;
        while let Some(u) = stack.pop() {
            for v in self.instance.objects() {
                if v == u || self.poses[v.0].is_none() {
                    continue;
                }
                if self.directly_on(u, v) {
                    if v == lower {
                        return true;
                    }
                    if !seen[v.0] {
                        seen[v.0] = true;
                        stack.push(v);
                    }
                }
            }
        }
        false
    }
}

/// Cost-to-go of a concrete state: one transfer leg plus one manipulation
/// charge per object away from its goal. Transit legs are excluded.
pub(crate) fn heuristic(instance: &Instance, poses: &[Pose], travel_weight: f64) -> f64 {
    let mut h = 0.0;
    for obj in instance.objects() {
        let goal = instance.goal_pose(obj);
        if !instance.same_place(obj, &poses[obj.0], &goal) {
            h += instance.manipulation_cost
                + travel_weight * leg_distance(instance.scenario, &poses[obj.0], &goal, &instance.table);
        }
    }
    h
}

/// Spec-facing wrapper of [`heuristic`] for deterministic states.
pub fn h_of_ds(instance: &Instance, poses: &[Pose]) -> f64 {
    heuristic(instance, poses, 1.0)
}

/// Travel added by parking an object at the best buffer given the poses
/// before (`ps`) and after (`pn`) the buffering placement and the object's
/// goal (`pg`): the minimal three-point star distance minus the baseline leg
/// between the neighbors. An unknown `pn` (frontier state) collapses onto
/// `ps`, preserving the lower bound.
pub fn distance_refinement(
    scenario: Scenario,
    table: &crate::model::Table,
    ps: &Pose,
    pn: Option<&Pose>,
    pg: &Pose,
) -> f64 {
    let pn = pn.unwrap_or(ps);
    match scenario {
        Scenario::Ee => {
            let fp = geometry::fermat_point(ps.xy(), pn.xy(), pg.xy());
            fp.dist(ps.xy()) + fp.dist(pn.xy()) + fp.dist(pg.xy()) - ps.xy().dist(pn.xy())
        }
        Scenario::Mb => {
            let track = Track::new(table.rect());
            let bs = track.project(ps.xy()).expect("pose inside table");
            let bn = track.project(pn.xy()).expect("pose inside table");
            let bg = track.project(pg.xy()).expect("pose inside table");
            let sum_at = |b: f64| track.distance(b, bs) + track.distance(b, bn) + track.distance(b, bg);
            let best = sum_at(bs).min(sum_at(bn)).min(sum_at(bg));
            best - track.distance(bs, bn)
        }
    }
}

// ---------------------------------------------------------------------------
// Node arena
// ---------------------------------------------------------------------------

/// Abstract destination of a search action.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dest {
    Goal,
    Buffer,
}

#[derive(Clone, Copy, Debug)]
enum Loc {
    At(Pose),
    Buffered(usize),
}

#[derive(Clone, Debug)]
struct Rec {
    obj: ObjId,
    /// Pose the object was picked from when buffered (`p_s`).
    ps: Pose,
    /// First concrete waypoint visited after the buffering placement
    /// (`p_n`), once known.
    pn: Option<Pose>,
    place_time: u32,
    pick_time: Option<u32>,
}

#[derive(Clone, Debug)]
struct Node {
    locs: Vec<Loc>,
    records: Vec<Rec>,
    parent: Option<usize>,
    action: Option<(ObjId, Dest)>,
    /// Arena index of the owning resolved-DS ancestor (self once resolved).
    last_ds: usize,
    /// Unweighted travel along the segment's concrete waypoints, entry leg
    /// included.
    seg_travel: f64,
    /// Most recent concrete waypoint of the segment.
    last_concrete: Option<Pose>,
    seg_actions: u32,
    pending: u32,
    f: f64,
    g: f64,
    resolved: bool,
    /// Concrete actions from `prev_ds` to this node (resolved DS only).
    seg_plan: Vec<Action>,
    prev_ds: Option<usize>,
    last_waypoint: Option<Pose>,
}

#[derive(Clone, Copy)]
struct QueueEntry {
    f: f64,
    pending: u32,
    seq: u64,
    node: usize,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for QueueEntry {}
impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; reverse for min-f ordering with ties
        // broken toward fewer pending buffers, then FIFO.
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.pending.cmp(&self.pending))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

type PoseBits = (u64, u64, u64, u64);
type DsKey = (Vec<PoseBits>, Option<PoseBits>);

fn pose_bits(p: &Pose) -> PoseBits {
    (p.x.to_bits(), p.y.to_bits(), p.z.to_bits(), p.theta.to_bits())
}

fn ds_key(locs: &[Loc], last_waypoint: &Option<Pose>) -> DsKey {
    let poses = locs
        .iter()
        .map(|l| match l {
            Loc::At(p) => pose_bits(p),
            Loc::Buffered(_) => unreachable!("DS keys require concrete states"),
        })
        .collect();
    (poses, last_waypoint.as_ref().map(pose_bits))
}

// ---------------------------------------------------------------------------
// The planner
// ---------------------------------------------------------------------------

struct Search<'a> {
    instance: &'a Instance,
    cfg: &'a PlannerConfig,
    oracle: &'a dyn StabilityOracle,
    weight: f64,
    arena: Vec<Node>,
    heap: BinaryHeap<QueueEntry>,
    best_g: HashMap<DsKey, (f64, usize)>,
    seq: u64,
    stats: SearchStats,
    deadline: Instant,
    /// Cost of the best resolved goal state so far; nodes bounded above it
    /// are pruned.
    incumbent: f64,
}

pub fn plan_search(
    instance: &Instance,
    cfg: &PlannerConfig,
    oracle: &dyn StabilityOracle,
) -> Result<PlanOutcome, PlanFailure> {
    if cfg.planner == PlannerKind::GreedySampling {
        return crate::baselines::greedy_sampling_search(instance, cfg, oracle);
    }
    validate_instance(instance)?;

    let started = Instant::now();
    let mut search = Search {
        instance,
        cfg,
        oracle,
        weight: cfg.planner.travel_weight(),
        arena: Vec::new(),
        heap: BinaryHeap::new(),
        best_g: HashMap::new(),
        seq: 0,
        stats: SearchStats {
            trace: cfg.record_trace.then(SearchTrace::default),
            ..SearchStats::default()
        },
        deadline: started + cfg.timeout,
        incumbent: f64::INFINITY,
    };
    let result = search.run();
    let wall = started.elapsed().as_secs_f64();
    match result {
        RunResult::Goal(node) => {
            let plan = search.reconstruct(node);
            let cost = plan_cost(&plan, instance);
            let mut stats = search.stats;
            stats.wall_time_s = wall;
            Ok(PlanOutcome { plan, cost, stats })
        }
        RunResult::Timeout => {
            let mut stats = search.stats;
            stats.wall_time_s = wall;
            Err(PlanFailure::Timeout(stats))
        }
        RunResult::Budget => {
            let mut stats = search.stats;
            stats.wall_time_s = wall;
            Err(PlanFailure::Budget(stats))
        }
        RunResult::Exhausted => {
            let mut stats = search.stats;
            stats.wall_time_s = wall;
            Err(PlanFailure::Exhausted(stats))
        }
    }
}

pub(crate) fn validate_instance(instance: &Instance) -> Result<(), PlanFailure> {
    instance
        .check_structure()
        .map_err(|e| PlanFailure::InvalidInstance(e.to_string()))?;
    for (label, arr) in [("initial", &instance.initial), ("goal", &instance.goal)] {
        let report = validate_arrangement(arr, instance)
            .map_err(|e| PlanFailure::InvalidInstance(e.to_string()))?;
        if !report.valid() {
            return Err(PlanFailure::InvalidInstance(format!(
                "{label} arrangement is infeasible: {:?}",
                report.violations
            )));
        }
    }
    Ok(())
}

enum RunResult {
    Goal(usize),
    Timeout,
    Budget,
    Exhausted,
}

impl<'a> Search<'a> {
    fn run(&mut self) -> RunResult {
        let n = self.instance.object_count();
        let root_locs: Vec<Loc> =
            (0..n).map(|i| Loc::At(self.instance.initial_pose(ObjId(i)))).collect();
        let root_poses: Vec<Pose> =
            (0..n).map(|i| self.instance.initial_pose(ObjId(i))).collect();
        let h0 = heuristic(self.instance, &root_poses, self.weight);
        let root = Node {
            locs: root_locs,
            records: Vec::new(),
            parent: None,
            action: None,
            last_ds: 0,
            seg_travel: 0.0,
            last_concrete: None,
            seg_actions: 0,
            pending: 0,
            f: h0,
            g: 0.0,
            resolved: true,
            seg_plan: Vec::new(),
            prev_ds: None,
            last_waypoint: None,
        };
        self.arena.push(root);
        let key = ds_key(&self.arena[0].locs, &None);
        self.best_g.insert(key, (0.0, 0));
        self.push(0);

        while let Some(entry) = self.heap.pop() {
            if Instant::now() > self.deadline {
                return RunResult::Timeout;
            }
            if self.arena.len() > self.cfg.max_nodes {
                return RunResult::Budget;
            }
            let idx = entry.node;
            if self.arena[idx].resolved {
                // A better duplicate may have superseded this node.
                let key = ds_key(&self.arena[idx].locs, &self.arena[idx].last_waypoint);
                if let Some(&(_, holder)) = self.best_g.get(&key) {
                    if holder != idx {
                        continue;
                    }
                }
                if self.is_goal(idx) {
                    if let Some(trace) = &mut self.stats.trace {
                        trace.popped_ds_f.push(self.arena[idx].f);
                    }
                    return RunResult::Goal(idx);
                }
                self.stats.ds_expanded += 1;
                if self.cfg.record_trace {
                    self.trace_ds(idx);
                }
                self.expand(idx);
            } else if self.arena[idx].pending == 0 {
                // An unresolved DS: allocate its buffers, then re-queue with
                // the exact cost.
                self.resolve(idx);
            } else {
                self.stats.nds_expanded += 1;
                self.expand(idx);
            }
        }
        RunResult::Exhausted
    }

    fn push(&mut self, idx: usize) {
        let node = &self.arena[idx];
        if node.f > self.incumbent + 1e-12 {
            return;
        }
        let entry = QueueEntry { f: node.f, pending: node.pending, seq: self.seq, node: idx };
        self.seq += 1;
        self.heap.push(entry);
    }

    fn is_goal(&self, idx: usize) -> bool {
        let node = &self.arena[idx];
        node.locs.iter().enumerate().all(|(i, loc)| match loc {
            Loc::At(p) => self.instance.same_place(ObjId(i), p, &self.instance.goal_pose(ObjId(i))),
            Loc::Buffered(_) => false,
        })
    }

    fn world(&self, idx: usize) -> World<'a> {
        World {
            instance: self.instance,
            poses: self.arena[idx]
                .locs
                .iter()
                .map(|l| match l {
                    Loc::At(p) => Some(*p),
                    Loc::Buffered(_) => None,
                })
                .collect(),
        }
    }

    fn trace_ds(&mut self, idx: usize) {
        let node = &self.arena[idx];
        let poses: Vec<Pose> = node
            .locs
            .iter()
            .map(|l| match l {
                Loc::At(p) => *p,
                Loc::Buffered(_) => unreachable!("expanded DS is concrete"),
            })
            .collect();
        let h = heuristic(self.instance, &poses, self.weight);
        let entry = DsTraceEntry { poses, robot: node.last_waypoint, g: node.g, h };
        if let Some(trace) = &mut self.stats.trace {
            trace.expanded_ds.push(entry);
            trace.popped_ds_f.push(node.g + h);
        }
    }

    /// Rules R1 and R2 over every object, in index order.
    fn expand(&mut self, idx: usize) {
        let world = self.world(idx);
        let n = self.instance.object_count();
        for i in 0..n {
            let obj = ObjId(i);
            if !world.misplaced(obj) {
                continue;
            }
            match self.arena[idx].locs[i] {
                Loc::Buffered(_) => {
                    if world.goal_available(obj) {
                        self.make_child(idx, obj, Dest::Goal);
                    }
                }
                Loc::At(_) => {
                    if !world.graspable(obj) {
                        continue;
                    }
                    if world.goal_available(obj) {
                        self.make_child(idx, obj, Dest::Goal);
                    } else if world.blocks_someone(obj) {
                        self.make_child(idx, obj, Dest::Buffer);
                    }
                }
            }
        }
    }

    fn make_child(&mut self, parent_idx: usize, obj: ObjId, dest: Dest) {
        let parent = &self.arena[parent_idx];
        let last_ds = if parent.resolved { parent_idx } else { parent.last_ds };
        let mut locs = parent.locs.clone();
        let mut records = parent.records.clone();
        let (mut seg_travel, mut last_concrete) = if parent.resolved {
            (0.0, parent.last_waypoint)
        } else {
            (parent.seg_travel, parent.last_concrete)
        };
        let seg_actions = if parent.resolved { 1 } else { parent.seg_actions + 1 };
        let action_index = seg_actions - 1;

        // New concrete waypoints visited by this action, in order.
        let mut appended: [Option<Pose>; 2] = [None, None];
        match (dest, locs[obj.0]) {
            (Dest::Goal, Loc::At(p)) => {
                appended = [Some(p), Some(self.instance.goal_pose(obj))];
                locs[obj.0] = Loc::At(self.instance.goal_pose(obj));
            }
            (Dest::Goal, Loc::Buffered(ri)) => {
                appended[0] = Some(self.instance.goal_pose(obj));
                records[ri].pick_time = Some(action_index);
                locs[obj.0] = Loc::At(self.instance.goal_pose(obj));
            }
            (Dest::Buffer, Loc::At(p)) => {
                appended[0] = Some(p);
                records.push(Rec {
                    obj,
                    ps: p,
                    pn: None,
                    place_time: action_index,
                    pick_time: None,
                });
                locs[obj.0] = Loc::Buffered(records.len() - 1);
            }
            (Dest::Buffer, Loc::Buffered(_)) => unreachable!("buffered objects are never re-buffered"),
        }
        // The first newly visited concrete pose closes any open `p_n`.
        if let Some(first) = appended[0] {
            for rec in records.iter_mut() {
                if rec.pn.is_none() && !(dest == Dest::Buffer && rec.place_time == action_index) {
                    rec.pn = Some(first);
                }
            }
        }
        for wp in appended.into_iter().flatten() {
            if let Some(prev) = last_concrete {
                seg_travel += leg_distance(self.instance.scenario, &prev, &wp, &self.instance.table);
            }
            last_concrete = Some(wp);
        }

        let pending = records.iter().filter(|r| r.pick_time.is_none()).count() as u32;
        let is_ds = pending == 0;

        if is_ds && records.is_empty() {
            // Pure direct action from a resolved DS: exact cost immediately.
            let anchor_g = self.arena[last_ds].g;
            let g = anchor_g
                + self.weight * seg_travel
                + self.instance.manipulation_cost * seg_actions as f64;
            let poses: Vec<Pose> = locs
                .iter()
                .map(|l| match l {
                    Loc::At(p) => *p,
                    Loc::Buffered(_) => unreachable!(),
                })
                .collect();
            let h = heuristic(self.instance, &poses, self.weight);
            let from = appended[0].unwrap();
            let to = appended[1].unwrap();
            let node = Node {
                locs,
                records: Vec::new(),
                parent: Some(parent_idx),
                action: Some((obj, dest)),
                last_ds: self.arena.len(),
                seg_travel: 0.0,
                last_concrete: Some(to),
                seg_actions: 0,
                pending: 0,
                f: g + h,
                g,
                resolved: true,
                seg_plan: vec![Action { object: obj, from, to }],
                prev_ds: Some(last_ds),
                last_waypoint: Some(to),
            };
            self.insert_resolved(node);
        } else {
            let f = self.lower_bound_f(last_ds, &locs, &records, seg_travel, seg_actions);
            let node = Node {
                locs,
                records,
                parent: Some(parent_idx),
                action: Some((obj, dest)),
                last_ds,
                seg_travel,
                last_concrete,
                seg_actions,
                pending,
                f,
                g: f64::NAN,
                resolved: false,
                seg_plan: Vec::new(),
                prev_ds: None,
                last_waypoint: None,
            };
            if f > self.incumbent + 1e-12 {
                return;
            }
            let idx = self.arena.len();
            self.arena.push(node);
            self.stats.nodes_generated += 1;
            self.push(idx);
        }
    }

    /// Dedup-checked insertion of a resolved DS node.
    fn insert_resolved(&mut self, node: Node) {
        let key = ds_key(&node.locs, &node.last_waypoint);
        if let Some(&(g, _)) = self.best_g.get(&key) {
            if g <= node.g + 1e-12 {
                return;
            }
        }
        let idx = self.arena.len();
        let mut node = node;
        node.last_ds = idx;
        self.note_goal(&node);
        self.best_g.insert(key, (node.g, idx));
        self.arena.push(node);
        self.stats.nodes_generated += 1;
        self.push(idx);
    }

    /// Records a resolved goal state as the incumbent upper bound.
    fn note_goal(&mut self, node: &Node) {
        let at_goal = node.locs.iter().enumerate().all(|(i, loc)| match loc {
            Loc::At(p) => self.instance.same_place(ObjId(i), p, &self.instance.goal_pose(ObjId(i))),
            Loc::Buffered(_) => false,
        });
        if at_goal && node.g < self.incumbent {
            self.incumbent = node.g;
        }
    }

    /// The Algorithm-1 style bound for states whose segment carries buffers:
    /// exact manipulation counts, travel along the known concrete waypoints,
    /// plus per-object completion terms (refined detours for buffered
    /// objects, transfer legs for the rest).
    fn lower_bound_f(
        &self,
        last_ds: usize,
        locs: &[Loc],
        records: &[Rec],
        seg_travel: f64,
        seg_actions: u32,
    ) -> f64 {
        let anchor = &self.arena[last_ds];
        let mut f = anchor.g
            + self.instance.manipulation_cost * seg_actions as f64
            + self.weight * seg_travel;
        for (i, loc) in locs.iter().enumerate() {
            let obj = ObjId(i);
            let goal = self.instance.goal_pose(obj);
            match loc {
                Loc::Buffered(ri) => {
                    let rec = &records[*ri];
                    f += self.instance.manipulation_cost
                        + self.weight
                            * distance_refinement(
                                self.instance.scenario,
                                &self.instance.table,
                                &rec.ps,
                                rec.pn.as_ref(),
                                &goal,
                            );
                }
                Loc::At(p) => {
                    if !self.instance.same_place(obj, p, &goal) {
                        f += self.instance.manipulation_cost
                            + self.weight
                                * leg_distance(self.instance.scenario, p, &goal, &self.instance.table);
                    }
                }
            }
        }
        f
    }

    /// Allocates buffer poses for an unresolved DS (popped with its bound),
    /// turning it into an exact node, or repairing the tree on failure.
    fn resolve(&mut self, idx: usize) {
        // The closing action of a segment is a retrieval, so the final
        // waypoint is already concrete: the node's DS key is known before
        // allocation. If a resolved duplicate beats this node's lower bound,
        // allocation cannot improve on it.
        {
            let node = &self.arena[idx];
            if node.f > self.incumbent + 1e-12 {
                return;
            }
            let last = node.last_concrete.expect("closing segments visit a concrete pose");
            let key = ds_key(&node.locs, &Some(last));
            if let Some(&(g, _)) = self.best_g.get(&key) {
                let poses: Vec<Pose> = node
                    .locs
                    .iter()
                    .map(|l| match l {
                        Loc::At(p) => *p,
                        Loc::Buffered(_) => unreachable!("resolving a DS"),
                    })
                    .collect();
                let h = heuristic(self.instance, &poses, self.weight);
                if g + h <= node.f + 1e-12 {
                    return;
                }
            }
        }
        self.stats.allocation_runs += 1;
        let anchor_idx = self.arena[idx].last_ds;

        // Abstract actions from the anchor to this node.
        let mut actions: Vec<(ObjId, Dest)> = Vec::new();
        let mut cursor = idx;
        while cursor != anchor_idx {
            let node = &self.arena[cursor];
            actions.push(node.action.expect("non-root node has an action"));
            cursor = node.parent.expect("non-root node has a parent");
        }
        actions.reverse();

        let anchor = &self.arena[anchor_idx];
        let base_poses: Vec<Pose> = anchor
            .locs
            .iter()
            .map(|l| match l {
                Loc::At(p) => *p,
                Loc::Buffered(_) => unreachable!("anchor DS is concrete"),
            })
            .collect();
        let records: Vec<RecordInfo> = self.arena[idx]
            .records
            .iter()
            .map(|r| RecordInfo {
                obj: r.obj,
                place_time: r.place_time as usize,
                pick_time: r.pick_time.expect("DS records are closed") as usize,
            })
            .collect();
        let ctx = SegmentCtx {
            instance: self.instance,
            cfg: self.cfg,
            oracle: self.oracle,
            base_poses,
            entry_waypoint: anchor.last_waypoint,
            actions,
            records,
            node_id: idx as u64,
        };
        let anchor_g = anchor.g;
        let anchor_last_waypoint = anchor.last_waypoint;

        match buffer::resolve_segment(&ctx, &mut self.stats.buffers_sampled) {
            Resolution::Resolved { poses } => {
                let (seg_plan, waypoints) = buffer::concretize(&ctx, &poses, ctx.actions.len());
                let g = anchor_g
                    + self.weight
                        * chain_travel(
                            self.instance.scenario,
                            &self.instance.table,
                            anchor_last_waypoint.as_ref(),
                            &waypoints,
                        )
                    + self.instance.manipulation_cost * ctx.actions.len() as f64;
                let node = &self.arena[idx];
                let concrete: Vec<Pose> = node
                    .locs
                    .iter()
                    .map(|l| match l {
                        Loc::At(p) => *p,
                        Loc::Buffered(_) => unreachable!("resolving a DS"),
                    })
                    .collect();
                let h = heuristic(self.instance, &concrete, self.weight);

                if self.cfg.record_trace {
                    let mut pairs = Vec::new();
                    let mut cursor = idx;
                    while cursor != anchor_idx {
                        pairs.push((self.arena[cursor].f, g + h));
                        cursor = self.arena[cursor].parent.unwrap();
                    }
                    if let Some(trace) = &mut self.stats.trace {
                        trace.bound_pairs.extend(pairs);
                    }
                }

                let key = ds_key(&self.arena[idx].locs, &Some(*waypoints.last().unwrap()));
                if let Some(&(best, _)) = self.best_g.get(&key) {
                    if best <= g + 1e-12 {
                        return;
                    }
                }
                let node = &mut self.arena[idx];
                node.g = g;
                node.f = g + h;
                node.resolved = true;
                node.prev_ds = Some(anchor_idx);
                node.last_ds = idx;
                node.seg_plan = seg_plan;
                node.last_waypoint = Some(*waypoints.last().unwrap());
                node.seg_travel = 0.0;
                node.last_concrete = node.last_waypoint;
                node.records = Vec::new();
                let snapshot = self.arena[idx].clone();
                self.note_goal(&snapshot);
                self.best_g.insert(key, (g, idx));
                self.push(idx);
            }
            Resolution::Failed { failing_place_time, resolved_prefix } => {
                self.stats.repairs += 1;
                // Rebuild the state just before the failing buffering action;
                // earlier buffers keep their resolved poses.
                let (seg_plan, waypoints) =
                    buffer::concretize(&ctx, &resolved_prefix, failing_place_time);
                let mut poses = ctx.base_poses.clone();
                for action in &seg_plan {
                    poses[action.object.0] = action.to;
                }
                let g = anchor_g
                    + self.weight
                        * chain_travel(
                            self.instance.scenario,
                            &self.instance.table,
                            anchor_last_waypoint.as_ref(),
                            &waypoints,
                        )
                    + self.instance.manipulation_cost * seg_plan.len() as f64;
                let h = heuristic(self.instance, &poses, self.weight);
                let last_waypoint = waypoints.last().copied().or(anchor_last_waypoint);
                let node = Node {
                    locs: poses.into_iter().map(Loc::At).collect(),
                    records: Vec::new(),
                    parent: Some(anchor_idx),
                    action: None,
                    last_ds: self.arena.len(),
                    seg_travel: 0.0,
                    last_concrete: last_waypoint,
                    seg_actions: 0,
                    pending: 0,
                    f: g + h,
                    g,
                    resolved: true,
                    seg_plan,
                    prev_ds: Some(anchor_idx),
                    last_waypoint,
                };
                self.insert_resolved(node);
            }
        }
    }

    fn reconstruct(&self, goal_idx: usize) -> Plan {
        let mut segments: Vec<&Vec<Action>> = Vec::new();
        let mut cursor = Some(goal_idx);
        while let Some(idx) = cursor {
            let node = &self.arena[idx];
            segments.push(&node.seg_plan);
            cursor = node.prev_ds;
        }
        let mut actions = Vec::new();
        for seg in segments.into_iter().rev() {
            actions.extend(seg.iter().copied());
        }
        Plan { actions }
    }
}
