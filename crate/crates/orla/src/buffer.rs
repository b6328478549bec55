//! Buffer allocation. When a DS is popped, every buffer opened on its
//! segment is committed: the cost-optimal placing region is computed from
//! the four deterministic visits surrounding the buffer's place and pick,
//! poses are sampled (or lattice-scanned) inside it, the region grows on
//! failure, and an unplaceable buffer repairs the search tree at the failing
//! step.

use crate::geometry::{
    self, ee_optimal_buffer_region, landing_height, mb_optimal_buffer_region, Point2, Track,
};
use crate::model::{Instance, ObjId, ObjectShape, Pose};
use crate::search::{Dest, PlannerConfig};
use crate::stability::{build_query, StabilityOracle};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A buffer opened and closed within one segment.
#[derive(Clone, Copy, Debug)]
pub struct RecordInfo {
    pub obj: ObjId,
    /// Index of the buffering action within the segment.
    pub place_time: usize,
    /// Index of the retrieval action within the segment.
    pub pick_time: usize,
}

/// Everything the allocator needs to know about a segment: the concrete
/// arrangement at its anchor DS, the robot's entry position, and the
/// abstract action sequence.
pub struct SegmentCtx<'a> {
    pub instance: &'a Instance,
    pub cfg: &'a PlannerConfig,
    pub oracle: &'a dyn StabilityOracle,
    pub base_poses: Vec<Pose>,
    pub entry_waypoint: Option<Pose>,
    pub actions: Vec<(ObjId, Dest)>,
    /// Sorted by `place_time`.
    pub records: Vec<RecordInfo>,
    /// Arena id of the DS being resolved; part of the sampling seed.
    pub node_id: u64,
}

pub enum Resolution {
    Resolved {
        /// One pose per record, in record order.
        poses: Vec<Pose>,
    },
    Failed {
        failing_place_time: usize,
        /// Poses of the records resolved before the failure.
        resolved_prefix: Vec<Pose>,
    },
}

/// One pending buffer with its surrounding context, ready for sampling.
#[derive(Clone, Debug)]
pub struct BufferRequest {
    pub object: ObjId,
    pub place_time: usize,
    pub pick_time: usize,
    /// Deterministic visits around the place and pick of the buffer: last
    /// pose before placing, first after placing, last before picking, first
    /// after picking.
    pub visits: [Pose; 4],
    /// Objects present (and where) at the moment of placement.
    pub environment: Vec<(ObjId, Pose)>,
    /// Action endpoints the object must stay clear of during its stay.
    pub avoid: Vec<(ObjId, Pose)>,
}

/// The sampling region for a buffer pose.
#[derive(Clone, Debug)]
pub enum Region {
    /// Union of discs of the given radius around the core minimizers.
    Ee { cores: Vec<Point2>, radius: f64 },
    /// Track points and counterclockwise arcs, each widened by `widen`
    /// arclength on both sides.
    Mb { points: Vec<f64>, segments: Vec<(f64, f64)>, widen: f64 },
}

#[derive(Clone, Copy)]
enum WpRef {
    Concrete(Pose),
    Rec(usize),
}

struct TimedAction {
    obj: ObjId,
    pick: WpRef,
    place: WpRef,
}

fn build_timeline(ctx: &SegmentCtx) -> Vec<TimedAction> {
    #[derive(Clone, Copy)]
    enum Sim {
        At(Pose),
        Buffered(usize),
    }
    let mut locs: Vec<Sim> = ctx.base_poses.iter().map(|p| Sim::At(*p)).collect();
    let mut timeline = Vec::with_capacity(ctx.actions.len());
    for (t, &(obj, dest)) in ctx.actions.iter().enumerate() {
        let (pick, place) = match dest {
            Dest::Goal => {
                let pick = match locs[obj.0] {
                    Sim::At(p) => WpRef::Concrete(p),
                    Sim::Buffered(ri) => WpRef::Rec(ri),
                };
                let goal = ctx.instance.goal_pose(obj);
                locs[obj.0] = Sim::At(goal);
                (pick, WpRef::Concrete(goal))
            }
            Dest::Buffer => {
                let ri = ctx
                    .records
                    .iter()
                    .position(|r| r.place_time == t)
                    .expect("every buffering action has a record");
                let pick = match locs[obj.0] {
                    Sim::At(p) => WpRef::Concrete(p),
                    Sim::Buffered(_) => unreachable!("buffered objects are never re-buffered"),
                };
                locs[obj.0] = Sim::Buffered(ri);
                (pick, WpRef::Rec(ri))
            }
        };
        timeline.push(TimedAction { obj, pick, place });
    }
    timeline
}

fn resolve_ref(r: WpRef, resolved: &[Option<Pose>]) -> Option<Pose> {
    match r {
        WpRef::Concrete(p) => Some(p),
        WpRef::Rec(ri) => resolved[ri],
    }
}

/// Concrete actions and waypoints of the first `action_count` segment
/// actions, with buffer placeholders substituted from `poses` (aligned with
/// the record list).
pub fn concretize(
    ctx: &SegmentCtx,
    poses: &[Pose],
    action_count: usize,
) -> (Vec<crate::model::Action>, Vec<Pose>) {
    let timeline = build_timeline(ctx);
    let resolved: Vec<Option<Pose>> = {
        let mut v = vec![None; ctx.records.len()];
        for (i, p) in poses.iter().enumerate() {
            v[i] = Some(*p);
        }
        v
    };
    let mut actions = Vec::with_capacity(action_count);
    let mut waypoints = Vec::with_capacity(action_count * 2);
    for ta in timeline.iter().take(action_count) {
        let from = resolve_ref(ta.pick, &resolved).expect("prefix picks are resolvable");
        let to = resolve_ref(ta.place, &resolved).expect("prefix places are resolvable");
        actions.push(crate::model::Action { object: ta.obj, from, to });
        waypoints.push(from);
        waypoints.push(to);
    }
    (actions, waypoints)
}

/// Builds the request for record `ri` given the already-resolved earlier
/// buffers: visits skip symbolic waypoints, the environment snapshot places
/// earlier buffers at their committed poses, and the avoid list collects the
/// concrete endpoints of every action during the stay.
fn build_request(
    ctx: &SegmentCtx,
    timeline: &[TimedAction],
    ri: usize,
    resolved: &[Option<Pose>],
) -> BufferRequest {
    let rec = ctx.records[ri];
    let flat = |pos: usize| -> WpRef {
        let ta = &timeline[pos / 2];
        if pos.is_multiple_of(2) {
            ta.pick
        } else {
            ta.place
        }
    };
    let place_flat = 2 * rec.place_time + 1;
    let pick_flat = 2 * rec.pick_time;
    let total = 2 * timeline.len();

    let v1 = resolve_ref(flat(place_flat - 1), resolved).expect("buffering picks are concrete");
    let v4 = resolve_ref(flat(pick_flat + 1), resolved).expect("retrieval places are concrete");
    let mut v2 = v4;
    for pos in (place_flat + 1)..total {
        if let WpRef::Rec(rj) = flat(pos) {
            if rj == ri {
                continue;
            }
        }
        if let Some(p) = resolve_ref(flat(pos), resolved) {
            v2 = p;
            break;
        }
    }
    let mut v3 = ctx.entry_waypoint.unwrap_or(v1);
    for pos in (0..pick_flat).rev() {
        if let WpRef::Rec(rj) = flat(pos) {
            if rj == ri {
                continue;
            }
        }
        if let Some(p) = resolve_ref(flat(pos), resolved) {
            v3 = p;
            break;
        }
    }

    // Environment when the buffer is placed: replay the prefix, drop the
    // object in hand.
    let mut poses: Vec<Option<Pose>> = ctx.base_poses.iter().map(|p| Some(*p)).collect();
    for (t, ta) in timeline.iter().enumerate() {
        if t >= rec.place_time {
            break;
        }
        poses[ta.obj.0] = resolve_ref(ta.place, resolved);
    }
    poses[rec.obj.0] = None;
    let environment: Vec<(ObjId, Pose)> = poses
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.map(|p| (ObjId(i), p)))
        .collect();

    // Stay-avoidance: both endpoints of every action between placement and
    // retrieval, where concrete. Later unresolved buffers check against this
    // object's committed pose when their own turn comes.
    let mut avoid = Vec::new();
    for (t, ta) in timeline.iter().enumerate() {
        if t <= rec.place_time || t >= rec.pick_time {
            continue;
        }
        for wp in [ta.pick, ta.place] {
            if let WpRef::Rec(rj) = wp {
                if rj == ri {
                    continue;
                }
            }
            if let Some(p) = resolve_ref(wp, resolved) {
                avoid.push((ta.obj, p));
            }
        }
    }

    BufferRequest {
        object: rec.obj,
        place_time: rec.place_time,
        pick_time: rec.pick_time,
        visits: [v1, v2, v3, v4],
        environment,
        avoid,
    }
}

/// The cost-optimal placing region for a request.
pub fn compute_pb_star(request: &BufferRequest, instance: &Instance) -> Region {
    match instance.scenario {
        crate::model::Scenario::Ee => {
            let visits = [
                request.visits[0].xy(),
                request.visits[1].xy(),
                request.visits[2].xy(),
                request.visits[3].xy(),
            ];
            Region::Ee { cores: ee_optimal_buffer_region(&visits), radius: 0.0 }
        }
        crate::model::Scenario::Mb => {
            let track = Track::new(instance.table.rect());
            let anchors: Vec<f64> = request
                .visits
                .iter()
                .map(|p| track.project(p.xy()).expect("visit inside table"))
                .collect();
            let region = mb_optimal_buffer_region(&anchors, &track);
            Region::Mb { points: region.points, segments: region.segments, widen: 0.0 }
        }
    }
}

/// Minkowski growth of the region by `step`, clipped to the table only at
/// sampling time.
pub fn expand_region(region: &Region, step: f64) -> Region {
    match region {
        Region::Ee { cores, radius } => Region::Ee { cores: cores.clone(), radius: radius + step },
        Region::Mb { points, segments, widen } => Region::Mb {
            points: points.clone(),
            segments: segments.clone(),
            widen: widen + step,
        },
    }
}

/// Whether the region covers the whole table (EE) or the whole track (MB).
pub fn region_covers_table(region: &Region, instance: &Instance) -> bool {
    match region {
        Region::Ee { cores, radius } => {
            let rect = instance.table.rect();
            let corners = [
                rect.min,
                Point2::new(rect.max.x, rect.min.y),
                rect.max,
                Point2::new(rect.min.x, rect.max.y),
            ];
            corners
                .iter()
                .all(|c| cores.iter().any(|core| core.dist(*c) <= *radius + 1e-9))
        }
        Region::Mb { points, segments, widen } => {
            let track = Track::new(instance.table.rect());
            let mut intervals: Vec<(f64, f64)> = Vec::new();
            for &p in points {
                intervals.push((p - widen, p + widen));
            }
            for &(a, b) in segments {
                let len = wrap_len(b - a, track.perimeter);
                intervals.push((a - widen, a + len + widen));
            }
            covered_measure(&intervals, track.perimeter) >= track.perimeter - 1e-9
        }
    }
}

fn wrap_len(len: f64, perimeter: f64) -> f64 {
    let mut l = len % perimeter;
    if l < 0.0 {
        l += perimeter;
    }
    l
}

fn covered_measure(intervals: &[(f64, f64)], perimeter: f64) -> f64 {
    // Normalize to [start, start+len] with start in [0, P), split wraps.
    let mut spans: Vec<(f64, f64)> = Vec::new();
    for &(a, b) in intervals {
        let len = (b - a).max(0.0);
        if len >= perimeter {
            return perimeter;
        }
        let mut start = a % perimeter;
        if start < 0.0 {
            start += perimeter;
        }
        if start + len <= perimeter {
            spans.push((start, start + len));
        } else {
            spans.push((start, perimeter));
            spans.push((0.0, start + len - perimeter));
        }
    }
    spans.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (s, e) in spans {
        match cur {
            None => cur = Some((s, e)),
            Some((cs, ce)) => {
                if s <= ce {
                    cur = Some((cs, ce.max(e)));
                } else {
                    total += ce - cs;
                    cur = Some((s, e));
                }
            }
        }
    }
    if let Some((cs, ce)) = cur {
        total += ce - cs;
    }
    total
}

/// Feasibility of a concrete buffer pose: inside the table, collision-free
/// against the placement-time environment, clear of every avoid pose
/// (touching counts, since resting on or under a moving object blocks it),
/// and accepted by the stability oracle.
pub fn pose_feasible(
    pose: &Pose,
    object: ObjId,
    request: &BufferRequest,
    instance: &Instance,
    oracle: &dyn StabilityOracle,
) -> bool {
    let shape = instance.shape(object);
    if !geometry::footprint_in_rect(shape, pose, &instance.table.rect()) {
        return false;
    }
    for (other, p) in &request.environment {
        if geometry::footprints_collide(shape, pose, instance.shape(*other), p) {
            return false;
        }
    }
    for (other, p) in &request.avoid {
        if geometry::z_intervals_touch_or_overlap(
            pose.z,
            shape.height(),
            p.z,
            instance.shape(*other).height(),
        ) && geometry::footprints_overlap_xy(shape, pose, instance.shape(*other), p)
        {
            return false;
        }
    }
    if oracle.vacuous() {
        return true;
    }
    let env: Vec<(&ObjectShape, Pose)> = request
        .environment
        .iter()
        .map(|(o, p)| (instance.shape(*o), *p))
        .collect();
    let query = build_query(shape, pose, &env);
    match oracle.assess(&query) {
        Ok(verdict) => verdict.stable,
        Err(_) => false,
    }
}

/// Candidate pose at a position/orientation: the object lands on the highest
/// surface beneath its footprint.
fn candidate_pose(
    shape: &ObjectShape,
    x: f64,
    y: f64,
    theta: f64,
    request: &BufferRequest,
    instance: &Instance,
) -> Pose {
    let probe = Pose::new(x, y, 0.0, theta);
    let env: Vec<(&ObjectShape, Pose)> = request
        .environment
        .iter()
        .map(|(o, p)| (instance.shape(*o), *p))
        .collect();
    let z = landing_height(shape, &probe, &env);
    Pose::new(x, y, z, theta)
}

fn orientations(shape: &ObjectShape, count: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if shape.theta_invariant() {
        return vec![0.0];
    }
    let base: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
    (0..count.max(1))
        .map(|k| crate::model::normalize_angle(base + k as f64 * std::f64::consts::TAU / count.max(1) as f64))
        .collect()
}

fn sample_position(
    region: &Region,
    instance: &Instance,
    covered: bool,
    rng: &mut ChaCha8Rng,
) -> Option<(f64, f64)> {
    if covered {
        // The region is the whole tabletop; sample it directly.
        let rect = instance.table.rect();
        return Some((
            rect.min.x + rng.gen::<f64>() * rect.width(),
            rect.min.y + rng.gen::<f64>() * rect.depth(),
        ));
    }
    match region {
        Region::Ee { cores, radius } => {
            let core = cores[rng.gen_range(0..cores.len())];
            if *radius <= 0.0 {
                return Some((core.x, core.y));
            }
            let r = radius * rng.gen::<f64>().sqrt();
            let phi = rng.gen::<f64>() * std::f64::consts::TAU;
            Some((core.x + r * phi.cos(), core.y + r * phi.sin()))
        }
        Region::Mb { points, segments, widen } => {
            let track = Track::new(instance.table.rect());
            let mut intervals: Vec<(f64, f64)> = Vec::new();
            for &p in points {
                intervals.push((p - widen, 2.0 * widen));
            }
            for &(a, b) in segments {
                intervals.push((a - widen, wrap_len(b - a, track.perimeter) + 2.0 * widen));
            }
            let total: f64 = intervals.iter().map(|(_, len)| len).sum();
            let s = if total <= 1e-12 {
                let idx = rng.gen_range(0..intervals.len());
                intervals[idx].0
            } else {
                let mut u = rng.gen::<f64>() * total;
                let mut s = intervals[0].0;
                for (start, len) in &intervals {
                    if u <= *len {
                        s = start + u;
                        break;
                    }
                    u -= len;
                }
                s
            };
            // Lift the track point to a tabletop position along the inward
            // normal, keeping `s` the nearest boundary point.
            let reach = track.inward_reach(s);
            let p = track.point_at(s);
            let normal = track.inward_normal(s);
            let lo = 1e-6;
            if reach <= lo {
                return None;
            }
            let t = lo + rng.gen::<f64>() * (reach - lo);
            Some((p.x + normal.x * t, p.y + normal.y * t))
        }
    }
}

fn mix_seed(parts: [u64; 4]) -> u64 {
    let mut h = 0x9e3779b97f4a7c15_u64;
    for p in parts {
        h ^= p;
        h = h.wrapping_mul(0xbf58476d1ce4e5b9);
        h ^= h >> 27;
        h = h.wrapping_mul(0x94d049bb133111eb);
        h ^= h >> 31;
    }
    h
}

fn hash_str(s: &str) -> u64 {
    let mut h = 0xcbf29ce484222325_u64;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Lattice positions shared by the grid-optimal allocator and the
/// brute-force oracle. Spacing is exactly `resolution` starting at the
/// table's minimum corner.
pub fn lattice_positions(table: &crate::model::Table, resolution: f64) -> Vec<Point2> {
    let rect = table.rect();
    let nx = (rect.width() / resolution).round() as usize;
    let ny = (rect.depth() / resolution).round() as usize;
    let mut out = Vec::with_capacity((nx + 1) * (ny + 1));
    for i in 0..=nx {
        for j in 0..=ny {
            out.push(Point2::new(rect.min.x + i as f64 * resolution, rect.min.y + j as f64 * resolution));
        }
    }
    out
}

fn four_visit_travel(pose: &Pose, request: &BufferRequest, instance: &Instance) -> f64 {
    match instance.scenario {
        crate::model::Scenario::Ee => {
            request.visits.iter().map(|v| pose.xy().dist(v.xy())).sum()
        }
        crate::model::Scenario::Mb => {
            let track = Track::new(instance.table.rect());
            let b = track.project(pose.xy()).expect("pose inside table");
            request
                .visits
                .iter()
                .map(|v| track.distance(b, track.project(v.xy()).expect("visit inside table")))
                .sum()
        }
    }
}

fn sampling_allocate(
    ctx: &SegmentCtx,
    request: &BufferRequest,
    ri: usize,
    sampled: &mut u64,
) -> Option<Pose> {
    let instance = ctx.instance;
    let shape = instance.shape(request.object);
    let step = ctx.cfg.expansion_step.unwrap_or_else(|| {
        instance.shapes.iter().map(|s| s.circumradius()).fold(0.05, f64::max)
    });
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed([
        ctx.cfg.seed,
        hash_str(&instance.id),
        ctx.node_id,
        ri as u64,
    ]));
    let mut region = compute_pb_star(request, instance);
    loop {
        let covered = region_covers_table(&region, instance);
        for _ in 0..ctx.cfg.samples_per_round.max(1) {
            *sampled += 1;
            let Some((x, y)) = sample_position(&region, instance, covered, &mut rng) else {
                continue;
            };
            for theta in orientations(shape, ctx.cfg.orientation_count, &mut rng) {
                let pose = candidate_pose(shape, x, y, theta, request, instance);
                if pose_feasible(&pose, request.object, request, instance, ctx.oracle) {
                    return Some(pose);
                }
            }
        }
        if covered {
            // Last resort before declaring the buffer unplaceable: a
            // deterministic lattice sweep, so failure really means no room
            // at lattice granularity rather than sampling bad luck.
            for p in lattice_positions(&instance.table, ctx.cfg.grid_resolution) {
                *sampled += 1;
                for theta in orientations(shape, ctx.cfg.orientation_count, &mut rng) {
                    let pose = candidate_pose(shape, p.x, p.y, theta, request, instance);
                    if pose_feasible(&pose, request.object, request, instance, ctx.oracle) {
                        return Some(pose);
                    }
                }
            }
            return None;
        }
        region = expand_region(&region, step);
    }
}

fn grid_allocate(
    ctx: &SegmentCtx,
    request: &BufferRequest,
    sampled: &mut u64,
) -> Option<Pose> {
    let instance = ctx.instance;
    let shape = instance.shape(request.object);
    let thetas: Vec<f64> = if shape.theta_invariant() {
        vec![0.0]
    } else {
        let count = ctx.cfg.orientation_count.max(1);
        (0..count).map(|k| k as f64 * std::f64::consts::TAU / count as f64).collect()
    };
    let mut best: Option<(f64, Pose)> = None;
    for p in lattice_positions(&instance.table, ctx.cfg.grid_resolution) {
        for &theta in &thetas {
            *sampled += 1;
            let pose = candidate_pose(shape, p.x, p.y, theta, request, instance);
            if !pose_feasible(&pose, request.object, request, instance, ctx.oracle) {
                continue;
            }
            let cost = four_visit_travel(&pose, request, instance);
            if best.as_ref().is_none_or(|(c, _)| cost < c - 1e-15) {
                best = Some((cost, pose));
            }
        }
    }
    best.map(|(_, pose)| pose)
}

/// Resolves every record of a segment in placement order. Requests later in
/// the order see earlier buffers at their committed poses.
pub fn resolve_segment(ctx: &SegmentCtx, sampled: &mut u64) -> Resolution {
    debug_assert!(ctx.records.windows(2).all(|w| w[0].place_time < w[1].place_time));
    let timeline = build_timeline(ctx);
    let mut resolved: Vec<Option<Pose>> = vec![None; ctx.records.len()];
    for ri in 0..ctx.records.len() {
        let request = build_request(ctx, &timeline, ri, &resolved);
        let pose = match ctx.cfg.allocator {
            crate::search::AllocatorKind::Sampling => sampling_allocate(ctx, &request, ri, sampled),
            crate::search::AllocatorKind::GridOptimal => grid_allocate(ctx, &request, sampled),
        };
        match pose {
            Some(p) => resolved[ri] = Some(p),
            None => {
                return Resolution::Failed {
                    failing_place_time: ctx.records[ri].place_time,
                    resolved_prefix: resolved[..ri].iter().map(|p| p.unwrap()).collect(),
                }
            }
        }
    }
    Resolution::Resolved { poses: resolved.into_iter().map(|p| p.unwrap()).collect() }
}
