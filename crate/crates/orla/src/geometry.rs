//! Distance metrics for both scenarios, boundary-track parameterization,
//! Fermat-point and track extreme-point optimizers, collision primitives,
//! and heightmap synthesis.

use crate::model::{Arrangement, Instance, ObjectShape, ObjectState, Pose};
use thiserror::Error;

/// Slack below which two height intervals are considered merely touching
/// (stacked), not colliding.
const Z_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("point ({0}, {1}) lies outside the table")]
    OutsideTable(f64, f64),
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dist(&self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn sub(&self, other: Point2) -> Point2 {
        Point2::new(self.x - other.x, self.y - other.y)
    }

    pub fn add(&self, other: Point2) -> Point2 {
        Point2::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(&self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }

    pub fn dot(&self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(&self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn rotate(&self, theta: f64) -> Point2 {
        let (s, c) = theta.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub min: Point2,
    pub max: Point2,
}

impl Rect {
    pub fn new(min: Point2, max: Point2) -> Self {
        Rect { min, max }
    }

    /// Width x depth rectangle centered at the origin.
    pub fn centered(width: f64, depth: f64) -> Self {
        Rect {
            min: Point2::new(-width / 2.0, -depth / 2.0),
            max: Point2::new(width / 2.0, depth / 2.0),
        }
    }

    pub fn centered_at(center: Point2, width: f64, depth: f64) -> Self {
        Rect {
            min: Point2::new(center.x - width / 2.0, center.y - depth / 2.0),
            max: Point2::new(center.x + width / 2.0, center.y + depth / 2.0),
        }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn depth(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point2 {
        Point2::new((self.min.x + self.max.x) / 2.0, (self.min.y + self.max.y) / 2.0)
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.depth())
    }
}

/// Dense row-major 2D array.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn new(rows: usize, cols: usize, fill: T) -> Self {
        Grid { rows, cols, data: vec![fill; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(Grid { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.cols + col] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn iter_indexed(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        let cols = self.cols;
        self.data.iter().enumerate().map(move |(i, v)| (i / cols, i % cols, v))
    }
}

/// Center of a grid cell in the object frame, for grids centered on the
/// frame origin (used by gridded shapes).
pub fn grid_cell_center<T>(grid: &Grid<T>, resolution: f64, row: usize, col: usize) -> Point2 {
    let cx = (col as f64 + 0.5 - grid.cols as f64 / 2.0) * resolution;
    let cy = (row as f64 + 0.5 - grid.rows as f64 / 2.0) * resolution;
    Point2::new(cx, cy)
}

// ---------------------------------------------------------------------------
// Track
// ---------------------------------------------------------------------------

/// The closed boundary curve of the table on which the mobile base moves,
/// parameterized by arclength counterclockwise from the (-w/2, -d/2) corner.
#[derive(Clone, Copy, Debug)]
pub struct Track {
    pub rect: Rect,
    pub perimeter: f64,
}

impl Track {
    pub fn new(rect: Rect) -> Self {
        Track { rect, perimeter: 2.0 * (rect.width() + rect.depth()) }
    }

    fn wrap(&self, s: f64) -> f64 {
        let mut t = s % self.perimeter;
        if t < 0.0 {
            t += self.perimeter;
        }
        if t >= self.perimeter {
            t = 0.0;
        }
        t
    }

    /// Arclength of the boundary point nearest to `p`; ties break toward the
    /// smallest arclength. `p` must lie inside or on the rectangle.
    pub fn project(&self, p: Point2) -> Result<f64, GeometryError> {
        if !self.rect.contains(p) {
            return Err(GeometryError::OutsideTable(p.x, p.y));
        }
        let w = self.rect.width();
        let d = self.rect.depth();
        // (distance-to-edge, arclength-of-projection) for the four edges,
        // counterclockwise from the start corner.
        let bottom = (p.y - self.rect.min.y, self.wrap(p.x - self.rect.min.x));
        let right = (self.rect.max.x - p.x, self.wrap(w + (p.y - self.rect.min.y)));
        let top = (self.rect.max.y - p.y, self.wrap(w + d + (self.rect.max.x - p.x)));
        let left = (p.x - self.rect.min.x, self.wrap(w + d + w + (self.rect.max.y - p.y)));
        let mut best = bottom;
        for cand in [right, top, left] {
            if cand.0 < best.0 - 1e-12 || ((cand.0 - best.0).abs() <= 1e-12 && cand.1 < best.1) {
                best = cand;
            }
        }
        Ok(best.1)
    }

    /// Boundary point at arclength `s`.
    pub fn point_at(&self, s: f64) -> Point2 {
        let w = self.rect.width();
        let d = self.rect.depth();
        let mut t = self.wrap(s);
        if t < w {
            return Point2::new(self.rect.min.x + t, self.rect.min.y);
        }
        t -= w;
        if t < d {
            return Point2::new(self.rect.max.x, self.rect.min.y + t);
        }
        t -= d;
        if t < w {
            return Point2::new(self.rect.max.x - t, self.rect.max.y);
        }
        t -= w;
        Point2::new(self.rect.min.x, self.rect.max.y - t)
    }

    /// Shorter-arc distance between two arclengths.
    pub fn distance(&self, s1: f64, s2: f64) -> f64 {
        let d = (self.wrap(s1) - self.wrap(s2)).abs();
        d.min(self.perimeter - d)
    }

    /// The point half a perimeter away.
    pub fn opposite(&self, s: f64) -> f64 {
        self.wrap(s + self.perimeter / 2.0)
    }

    /// Maximum inward travel from boundary point `s` along the inward normal
    /// for which `s` remains the nearest boundary point.
    pub fn inward_reach(&self, s: f64) -> f64 {
        let p = self.point_at(s);
        let w = self.rect.width();
        let d = self.rect.depth();
        let t = self.wrap(s);
        if t < w || (t >= w + d && t < w + d + w) {
            // Bottom or top edge: limited by the opposite edge's bisector and
            // the two side edges.
            (d / 2.0).min(p.x - self.rect.min.x).min(self.rect.max.x - p.x)
        } else {
            (w / 2.0).min(p.y - self.rect.min.y).min(self.rect.max.y - p.y)
        }
    }

    /// Inward unit normal of the edge containing arclength `s`.
    pub fn inward_normal(&self, s: f64) -> Point2 {
        let w = self.rect.width();
        let d = self.rect.depth();
        let t = self.wrap(s);
        if t < w {
            Point2::new(0.0, 1.0)
        } else if t < w + d {
            Point2::new(-1.0, 0.0)
        } else if t < w + d + w {
            Point2::new(0.0, -1.0)
        } else {
            Point2::new(1.0, 0.0)
        }
    }
}

/// Euclidean travel distance of the end effector in the x-y plane.
pub fn dist_ee(p: &Pose, q: &Pose) -> f64 {
    p.xy().dist(q.xy())
}

// ---------------------------------------------------------------------------
// Convex hulls and small polygon utilities
// ---------------------------------------------------------------------------

/// Shoelace area of a simple polygon (positive for counterclockwise).
pub fn polygon_area(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        acc += a.cross(b);
    }
    acc.abs() / 2.0
}

pub fn polygon_centroid(vertices: &[Point2]) -> Point2 {
    let n = vertices.len();
    let mut area2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let w = a.cross(b);
        area2 += w;
        cx += (a.x + b.x) * w;
        cy += (a.y + b.y) * w;
    }
    if area2.abs() < 1e-30 {
        let k = 1.0 / n as f64;
        return Point2::new(
            vertices.iter().map(|v| v.x).sum::<f64>() * k,
            vertices.iter().map(|v| v.y).sum::<f64>() * k,
        );
    }
    Point2::new(cx / (3.0 * area2), cy / (3.0 * area2))
}

pub fn is_convex_ccw(vertices: &[Point2]) -> bool {
    let n = vertices.len();
    if n < 3 {
        return false;
    }
    let mut area2 = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let c = vertices[(i + 2) % n];
        if b.sub(a).cross(c.sub(b)) < -1e-12 {
            return false;
        }
        area2 += a.cross(b);
    }
    area2 > 1e-12
}

/// Strict convex hull (counterclockwise, collinear boundary points dropped).
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap()));
    pts.dedup_by(|a, b| a.dist(*b) < 1e-12);
    let n = pts.len();
    if n <= 2 {
        return pts;
    }
    let chain = |iter: &mut dyn Iterator<Item = Point2>| -> Vec<Point2> {
        let mut half: Vec<Point2> = Vec::new();
        for p in iter {
            while half.len() >= 2 {
                let a = half[half.len() - 2];
                let b = half[half.len() - 1];
                if b.sub(a).cross(p.sub(a)) <= 1e-15 {
                    half.pop();
                } else {
                    break;
                }
            }
            half.push(p);
        }
        half
    };
    let mut lower = chain(&mut pts.iter().copied());
    let mut upper = chain(&mut pts.iter().rev().copied());
    lower.pop();
    upper.pop();
    lower.append(&mut upper);
    if lower.len() < 3 {
        // All input points collinear: return the two extremes.
        return vec![pts[0], pts[n - 1]];
    }
    lower
}

fn point_in_convex(p: Point2, hull: &[Point2]) -> bool {
    let n = hull.len();
    for i in 0..n {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        if b.sub(a).cross(p.sub(a)) < -1e-12 {
            return false;
        }
    }
    true
}

fn dist_point_segment(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 < 1e-30 {
        return p.dist(a);
    }
    let t = (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a.add(ab.scale(t)))
}

/// Signed distance from `p` to the boundary of a convex hull: positive
/// inside, negative outside. Degenerate hulls (point, segment) have empty
/// interior, hence nonpositive distance.
pub fn signed_distance_to_hull(p: Point2, hull: &[Point2]) -> f64 {
    match hull.len() {
        0 => f64::NEG_INFINITY,
        1 => -p.dist(hull[0]),
        2 => -dist_point_segment(p, hull[0], hull[1]),
        _ => {
            let n = hull.len();
            let mut boundary = f64::INFINITY;
            for i in 0..n {
                boundary = boundary.min(dist_point_segment(p, hull[i], hull[(i + 1) % n]));
            }
            if point_in_convex(p, hull) {
                boundary
            } else {
                -boundary
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Fermat point and buffer-region optimizers
// ---------------------------------------------------------------------------

/// The point minimizing the sum of Euclidean distances to `{a, b, c}`.
/// An interior angle of 120 degrees or more wins the vertex; collinear
/// triples take the middle point; otherwise the interior optimum is found by
/// re-weighted iteration.
pub fn fermat_point(a: Point2, b: Point2, c: Point2) -> Point2 {
    let pts = [a, b, c];
    // Coincident pairs: the doubled point always wins.
    for i in 0..3 {
        for j in (i + 1)..3 {
            if pts[i].dist(pts[j]) < 1e-12 {
                return pts[i];
            }
        }
    }
    let scale = a.dist(b).max(b.dist(c)).max(a.dist(c));
    if b.sub(a).cross(c.sub(a)).abs() <= 1e-12 * scale * scale {
        // Collinear: the middle point sees the other two in opposite
        // directions.
        for i in 0..3 {
            let u = pts[(i + 1) % 3].sub(pts[i]);
            let v = pts[(i + 2) % 3].sub(pts[i]);
            if u.dot(v) <= 0.0 {
                return pts[i];
            }
        }
    }
    // Vertex with interior angle >= 120 degrees.
    for i in 0..3 {
        let u = pts[(i + 1) % 3].sub(pts[i]);
        let v = pts[(i + 2) % 3].sub(pts[i]);
        let cos = u.dot(v) / (u.norm() * v.norm());
        if cos <= -0.5 {
            return pts[i];
        }
    }
    // Weiszfeld iteration from the centroid.
    let mut x = Point2::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0);
    for _ in 0..10_000 {
        let mut num = Point2::default();
        let mut den = 0.0;
        for p in pts {
            let w = 1.0 / x.dist(p).max(1e-15);
            num = num.add(p.scale(w));
            den += w;
        }
        let next = num.scale(1.0 / den);
        let step = x.dist(next);
        x = next;
        if step < 1e-12 {
            break;
        }
    }
    x
}

fn sum_of_distances(p: Point2, pts: &[Point2]) -> f64 {
    pts.iter().map(|q| p.dist(*q)).sum()
}

fn segment_intersection(a: Point2, b: Point2, c: Point2, d: Point2) -> Option<Point2> {
    let r = b.sub(a);
    let s = d.sub(c);
    let denom = r.cross(s);
    if denom.abs() < 1e-30 {
        return None;
    }
    let t = c.sub(a).cross(s) / denom;
    Some(a.add(r.scale(t)))
}

/// The set of x-y points minimizing the sum of distances to four points:
/// the diagonal intersection when the points are in convex position, the
/// interior point when one lies inside the others' triangle, and the best of
/// the four in degenerate configurations.
pub fn ee_optimal_buffer_region(visits: &[Point2; 4]) -> Vec<Point2> {
    let mut distinct: Vec<Point2> = Vec::new();
    for &v in visits {
        if !distinct.iter().any(|d| d.dist(v) < 1e-12) {
            distinct.push(v);
        }
    }
    let hull = convex_hull(&distinct);
    if distinct.len() == 4 && hull.len() == 4 {
        let p = segment_intersection(hull[0], hull[2], hull[1], hull[3])
            .expect("diagonals of a strictly convex quadrilateral intersect");
        return vec![p];
    }
    if distinct.len() == 4 && hull.len() == 3 {
        // One point lies (weakly) inside the triangle of the others; it is
        // the minimizer.
        let inner = distinct
            .iter()
            .find(|p| !hull.iter().any(|h| h.dist(**p) < 1e-12))
            .copied()
            .expect("a non-hull point exists");
        return vec![inner];
    }
    // Coincident or collinear: the minimum over the plane is attained among
    // the four points.
    let sums: Vec<f64> = distinct.iter().map(|p| sum_of_distances(*p, visits)).collect();
    let best = sums.iter().cloned().fold(f64::INFINITY, f64::min);
    distinct
        .into_iter()
        .zip(sums)
        .filter(|(_, s)| *s <= best + 1e-12)
        .map(|(p, _)| p)
        .collect()
}

/// Minimizers of the track-distance sum to a set of anchor arclengths;
/// points plus whole arcs where the sum is constant at the minimum.
#[derive(Clone, Debug)]
pub struct TrackRegion {
    pub points: Vec<f64>,
    /// Counterclockwise arcs `(from, to)`; may wrap past zero.
    pub segments: Vec<(f64, f64)>,
    pub min_sum: f64,
}

impl TrackRegion {
    pub fn contains(&self, s: f64, track: &Track) -> bool {
        if self.points.iter().any(|&p| track.distance(p, s) < 1e-9) {
            return true;
        }
        self.segments.iter().any(|&(a, b)| {
            let len = track.wrap(b - a);
            track.wrap(s - a) <= len + 1e-9
        })
    }
}

/// Evaluates the distance sum at the anchors and their opposite points (the
/// extreme points of the piecewise-linear sum) and returns every minimizer;
/// arcs between consecutive candidates that both achieve the minimum are
/// constant and included whole.
pub fn mb_optimal_buffer_region(anchors: &[f64], track: &Track) -> TrackRegion {
    let mut candidates: Vec<f64> = Vec::with_capacity(anchors.len() * 2);
    for &b in anchors {
        candidates.push(track.wrap(b));
        candidates.push(track.opposite(b));
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let sum_at = |s: f64| -> f64 { anchors.iter().map(|&b| track.distance(s, b)).sum() };
    let sums: Vec<f64> = candidates.iter().map(|&s| sum_at(s)).collect();
    let min_sum = sums.iter().cloned().fold(f64::INFINITY, f64::min);
    let minimal: Vec<bool> = sums.iter().map(|&v| v <= min_sum + 1e-9).collect();

    let points: Vec<f64> = candidates
        .iter()
        .zip(&minimal)
        .filter(|(_, &m)| m)
        .map(|(&s, _)| s)
        .collect();
    let mut segments = Vec::new();
    let k = candidates.len();
    if k >= 2 {
        for i in 0..k {
            let j = (i + 1) % k;
            if minimal[i] && minimal[j] {
                segments.push((candidates[i], candidates[j]));
            }
        }
    }
    TrackRegion { points, segments, min_sum }
}

// ---------------------------------------------------------------------------
// Footprint collision and containment
// ---------------------------------------------------------------------------

fn z_intervals_overlap(z1: f64, h1: f64, z2: f64, h2: f64) -> bool {
    (z1 + h1).min(z2 + h2) - z1.max(z2) > Z_EPS
}

/// Height intervals overlapping or merely touching (used by stay-avoidance
/// checks, where resting on a moving object also counts as a conflict).
pub fn z_intervals_touch_or_overlap(z1: f64, h1: f64, z2: f64, h2: f64) -> bool {
    (z1 + h1).min(z2 + h2) - z1.max(z2) >= -SUPPORT_CONTACT
}

const SUPPORT_CONTACT: f64 = 1e-3;

fn prism_world(footprint: &[Point2], pose: &Pose) -> Vec<Point2> {
    footprint
        .iter()
        .map(|v| v.rotate(pose.theta).add(pose.xy()))
        .collect()
}

fn polygons_overlap_sat(a: &[Point2], b: &[Point2]) -> bool {
    for (first, second) in [(a, b), (b, a)] {
        let n = first.len();
        for i in 0..n {
            let edge = first[(i + 1) % n].sub(first[i]);
            let axis = Point2::new(-edge.y, edge.x);
            let (mut min_a, mut max_a) = (f64::INFINITY, f64::NEG_INFINITY);
            for p in first {
                let q = p.dot(axis);
                min_a = min_a.min(q);
                max_a = max_a.max(q);
            }
            let (mut min_b, mut max_b) = (f64::INFINITY, f64::NEG_INFINITY);
            for p in second {
                let q = p.dot(axis);
                min_b = min_b.min(q);
                max_b = max_b.max(q);
            }
            if max_a <= min_b + 1e-12 || max_b <= min_a + 1e-12 {
                return false;
            }
        }
    }
    true
}

fn dist_point_polygon(p: Point2, poly: &[Point2]) -> f64 {
    if point_in_convex(p, poly) {
        return 0.0;
    }
    let n = poly.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        best = best.min(dist_point_segment(p, poly[i], poly[(i + 1) % n]));
    }
    best
}

fn gridded_cells_world<'a>(
    resolution: f64,
    mask: &'a Grid<bool>,
    pose: &Pose,
) -> impl Iterator<Item = Point2> + 'a {
    let pose = *pose;
    let res = resolution;
    mask.iter_indexed().filter(|(_, _, &m)| m).map(move |(r, c, _)| {
        grid_cell_center_raw(mask.rows(), mask.cols(), res, r, c)
            .rotate(pose.theta)
            .add(pose.xy())
    })
}

fn grid_cell_center_raw(rows: usize, cols: usize, resolution: f64, row: usize, col: usize) -> Point2 {
    Point2::new(
        (col as f64 + 0.5 - cols as f64 / 2.0) * resolution,
        (row as f64 + 0.5 - rows as f64 / 2.0) * resolution,
    )
}

/// Whether a world point falls on a covered cell of a gridded footprint,
/// counting partial cells as covered (half-cell slack).
fn gridded_covers_point(resolution: f64, mask: &Grid<bool>, pose: &Pose, p: Point2, slack: f64) -> bool {
    let local = p.sub(pose.xy()).rotate(-pose.theta);
    let cx = local.x / resolution + mask.cols() as f64 / 2.0;
    let cy = local.y / resolution + mask.rows() as f64 / 2.0;
    let reach = (slack / resolution).ceil() as isize;
    let col0 = cx.floor() as isize;
    let row0 = cy.floor() as isize;
    for dr in -reach..=reach {
        for dc in -reach..=reach {
            let (row, col) = (row0 + dr, col0 + dc);
            if row < 0 || col < 0 || row as usize >= mask.rows() || col as usize >= mask.cols() {
                continue;
            }
            if *mask.get(row as usize, col as usize) {
                let center = grid_cell_center_raw(mask.rows(), mask.cols(), resolution, row as usize, col as usize);
                let world = center.rotate(pose.theta).add(pose.xy());
                if (world.x - p.x).abs() <= resolution / 2.0 + slack
                    && (world.y - p.y).abs() <= resolution / 2.0 + slack
                {
                    return true;
                }
            }
        }
    }
    false
}

/// Two footprints intersecting in the x-y plane, ignoring heights.
pub fn footprints_overlap_xy(sa: &ObjectShape, pa: &Pose, sb: &ObjectShape, pb: &Pose) -> bool {
    use ObjectShape::*;
    // Cheap circumradius reject.
    let gap = pa.xy().dist(pb.xy());
    if gap > sa.circumradius() + sb.circumradius() {
        return false;
    }
    match (sa, sb) {
        (Disc { radius: ra, .. }, Disc { radius: rb, .. }) => gap < ra + rb,
        (Disc { radius, .. }, Prism { footprint, .. }) => {
            dist_point_polygon(pa.xy(), &prism_world(footprint, pb)) < *radius
        }
        (Prism { footprint, .. }, Disc { radius, .. }) => {
            dist_point_polygon(pb.xy(), &prism_world(footprint, pa)) < *radius
        }
        (Prism { footprint: fa, .. }, Prism { footprint: fb, .. }) => {
            polygons_overlap_sat(&prism_world(fa, pa), &prism_world(fb, pb))
        }
        (Gridded { resolution, mask, .. }, _) => {
            let half = resolution / 2.0;
            gridded_cells_world(*resolution, mask, pa).any(|cell| match sb {
                Disc { radius, .. } => cell.dist(pb.xy()) < radius + half,
                Prism { footprint, .. } => {
                    dist_point_polygon(cell, &prism_world(footprint, pb)) < half
                }
                Gridded { resolution: rb, mask: mb, .. } => {
                    gridded_covers_point(*rb, mb, pb, cell, half)
                }
            })
        }
        (_, Gridded { .. }) => footprints_overlap_xy(sb, pb, sa, pa),
    }
}

/// Full collision test: x-y footprints intersect and height intervals
/// overlap (touching intervals stack rather than collide).
pub fn footprints_collide(sa: &ObjectShape, pa: &Pose, sb: &ObjectShape, pb: &Pose) -> bool {
    z_intervals_overlap(pa.z, sa.height(), pb.z, sb.height()) && footprints_overlap_xy(sa, pa, sb, pb)
}

/// Footprint fully inside an axis-aligned rectangle.
pub fn footprint_in_rect(shape: &ObjectShape, pose: &Pose, rect: &Rect) -> bool {
    match shape {
        ObjectShape::Disc { radius, .. } => {
            pose.x - radius >= rect.min.x
                && pose.x + radius <= rect.max.x
                && pose.y - radius >= rect.min.y
                && pose.y + radius <= rect.max.y
        }
        ObjectShape::Prism { footprint, .. } => {
            prism_world(footprint, pose).into_iter().all(|v| rect.contains(v))
        }
        ObjectShape::Gridded { resolution, mask, .. } => {
            let half = resolution * std::f64::consts::SQRT_2 / 2.0;
            gridded_cells_world(*resolution, mask, pose).all(|c| {
                c.x - half >= rect.min.x
                    && c.x + half <= rect.max.x
                    && c.y - half >= rect.min.y
                    && c.y + half <= rect.max.y
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Heightmaps
// ---------------------------------------------------------------------------

/// Top-surface height field over a rectangular window. Uncovered cells are
/// exactly zero.
#[derive(Clone, Debug)]
pub struct Heightmap {
    /// World position of the minimum corner of cell (0, 0).
    pub origin: Point2,
    pub resolution: f64,
    pub heights: Grid<f64>,
}

impl Heightmap {
    pub fn cell_center(&self, row: usize, col: usize) -> Point2 {
        Point2::new(
            self.origin.x + (col as f64 + 0.5) * self.resolution,
            self.origin.y + (row as f64 + 0.5) * self.resolution,
        )
    }
}

/// Whether a shape at a pose covers a world point (cell-center convention).
pub fn footprint_covers_point(shape: &ObjectShape, pose: &Pose, p: Point2) -> bool {
    match shape {
        ObjectShape::Disc { radius, .. } => p.dist(pose.xy()) <= *radius + 1e-12,
        ObjectShape::Prism { footprint, .. } => point_in_convex(p, &prism_world(footprint, pose)),
        ObjectShape::Gridded { resolution, mask, .. } => {
            gridded_covers_point(*resolution, mask, pose, p, 0.0)
        }
    }
}

/// Synthesizes a heightmap from explicit (shape, pose) entries.
pub fn heightmap_of(entries: &[(&ObjectShape, Pose)], window: Rect, resolution: f64) -> Heightmap {
    let cols = (window.width() / resolution).round().max(1.0) as usize;
    let rows = (window.depth() / resolution).round().max(1.0) as usize;
    let mut heights = Grid::new(rows, cols, 0.0_f64);
    for (shape, pose) in entries {
        let top = pose.z + shape.height();
        let reach = shape.circumradius();
        let col_lo = (((pose.x - reach - window.min.x) / resolution).floor().max(0.0)) as usize;
        let row_lo = (((pose.y - reach - window.min.y) / resolution).floor().max(0.0)) as usize;
        let col_hi = (((pose.x + reach - window.min.x) / resolution).ceil()).min(cols as f64) as usize;
        let row_hi = (((pose.y + reach - window.min.y) / resolution).ceil()).min(rows as f64) as usize;
        for row in row_lo..row_hi {
            for col in col_lo..col_hi {
                let center = Point2::new(
                    window.min.x + (col as f64 + 0.5) * resolution,
                    window.min.y + (row as f64 + 0.5) * resolution,
                );
                if footprint_covers_point(shape, pose, center) && *heights.get(row, col) < top {
                    heights.set(row, col, top);
                }
            }
        }
    }
    Heightmap { origin: window.min, resolution, heights }
}

/// Per-cell maximum top-surface height of an arrangement over a window.
pub fn synthesize_heightmap(
    arrangement: &Arrangement,
    instance: &Instance,
    window: Rect,
    resolution: f64,
) -> Heightmap {
    let entries: Vec<(&ObjectShape, Pose)> = instance
        .objects()
        .filter_map(|o| match &arrangement.states[o.0] {
            ObjectState::AtPose(p) => Some((instance.shape(o), *p)),
            ObjectState::AtBuffer(_) => None,
        })
        .collect();
    heightmap_of(&entries, window, resolution)
}

/// Height at which a flat query footprint comes to rest over the given
/// environment entries: the maximum top surface among overlapping objects,
/// or the table plane.
pub fn landing_height(
    shape: &ObjectShape,
    pose_xy_theta: &Pose,
    env: &[(&ObjectShape, Pose)],
) -> f64 {
    let mut z = 0.0_f64;
    for (other, p) in env {
        if footprints_overlap_xy(shape, pose_xy_theta, other, p) {
            z = z.max(p.z + other.height());
        }
    }
    z
}
