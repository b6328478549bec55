//! Pluggable placement-stability oracle. Queries carry a top-view heightmap
//! of the surroundings and a bottom-view depth grid of the placed object;
//! implementations answer with a probability of a successful placement.
//!
//! Two deterministic implementations ship here: [`AlwaysStable`] for flat
//! disc benchmarks, and [`SupportPolygonOracle`], a geometric stand-in that
//! checks the mass-center projection against the convex hull of the contact
//! region.

use crate::geometry::{
    self, convex_hull, footprint_covers_point, heightmap_of, Grid, Heightmap, Point2, Rect,
};
use crate::model::{ObjectShape, Pose};
use serde::Deserialize;
use thiserror::Error;

/// Side length, in cells, of the square stability window.
pub const STABILITY_GRID: usize = 200;
/// Cell size of the stability window, meters.
pub const STABILITY_RESOLUTION: f64 = 0.005;

#[derive(Debug, Error)]
pub enum StabilityError {
    #[error("grid shape mismatch: environment {0}x{1}, object {2}x{3}, expected {4}x{4}")]
    GridMismatch(usize, usize, usize, usize, usize),
    #[error("malformed query: {0}")]
    MalformedQuery(String),
}

/// Bottom view of the object to place, in the same window frame as the
/// environment heightmap.
#[derive(Clone, Debug)]
pub struct ObjectBottom {
    pub mask: Grid<bool>,
    /// Nonnegative clearance from the object's lowest point, per cell.
    pub depth: Grid<f64>,
    /// Mass-center x-y offset from the window center, meters.
    pub mass_center: Point2,
}

#[derive(Clone, Debug)]
pub struct StabilityQuery {
    pub environment: Heightmap,
    pub bottom: ObjectBottom,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityVerdict {
    pub probability: f64,
    pub stable: bool,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(default)]
pub struct StabilityConfig {
    /// Decision threshold on the probability.
    pub threshold: f64,
    /// Cells within this height of the landing plane count as contact.
    pub contact_tol: f64,
    /// Contact area fraction above which raw hull membership suffices.
    pub min_contact_fraction: f64,
    /// Hull erosion margin for the small-contact case; also the logistic
    /// scale of the probability mapping.
    pub erosion_margin: f64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            threshold: 0.5,
            contact_tol: 0.002,
            min_contact_fraction: 0.3,
            erosion_margin: 0.005,
        }
    }
}

pub trait StabilityOracle: Sync {
    fn assess(&self, query: &StabilityQuery) -> Result<StabilityVerdict, StabilityError>;

    /// True for oracles that accept every placement; planners may then skip
    /// query synthesis entirely.
    fn vacuous(&self) -> bool {
        false
    }
}

fn check_shapes(query: &StabilityQuery) -> Result<(), StabilityError> {
    let e = &query.environment.heights;
    let m = &query.bottom.mask;
    let d = &query.bottom.depth;
    let ok = e.rows() == STABILITY_GRID
        && e.cols() == STABILITY_GRID
        && m.rows() == STABILITY_GRID
        && m.cols() == STABILITY_GRID
        && d.rows() == STABILITY_GRID
        && d.cols() == STABILITY_GRID;
    if !ok {
        return Err(StabilityError::GridMismatch(e.rows(), e.cols(), m.rows(), m.cols(), STABILITY_GRID));
    }
    Ok(())
}

/// Accepts every placement; reproduces the all-poses-stable disc setting.
pub struct AlwaysStable;

impl StabilityOracle for AlwaysStable {
    fn assess(&self, query: &StabilityQuery) -> Result<StabilityVerdict, StabilityError> {
        check_shapes(query)?;
        Ok(StabilityVerdict { probability: 1.0, stable: true })
    }

    fn vacuous(&self) -> bool {
        true
    }
}

/// Geometric stand-in for a learned stability model: lands the object,
/// collects contact cells, and maps the mass-center margin inside the
/// contact hull through a logistic squashing.
pub struct SupportPolygonOracle {
    pub config: StabilityConfig,
}

impl SupportPolygonOracle {
    pub fn new(config: StabilityConfig) -> Self {
        SupportPolygonOracle { config }
    }
}

impl Default for SupportPolygonOracle {
    fn default() -> Self {
        SupportPolygonOracle::new(StabilityConfig::default())
    }
}

impl StabilityOracle for SupportPolygonOracle {
    fn assess(&self, query: &StabilityQuery) -> Result<StabilityVerdict, StabilityError> {
        check_shapes(query)?;
        support_polygon_assess(query, &self.config)
    }
}

/// The support-polygon check. Landing height is the highest cell-wise
/// `environment - depth` over the footprint; contact cells are those within
/// `contact_tol` of achieving it. The placement is stable when the mass
/// center lies inside the contact hull, robustly so (hull eroded by the
/// margin) unless the contact area fraction already clears
/// `min_contact_fraction`.
pub fn support_polygon_assess(
    query: &StabilityQuery,
    config: &StabilityConfig,
) -> Result<StabilityVerdict, StabilityError> {
    let env = &query.environment;
    let mask = &query.bottom.mask;
    let depth = &query.bottom.depth;
    let res = env.resolution;
    let half_extent = res * STABILITY_GRID as f64 / 2.0;

    let mut footprint_cells = 0usize;
    let mut landing = f64::NEG_INFINITY;
    for (row, col, &m) in mask.iter_indexed() {
        if m {
            footprint_cells += 1;
            let z = env.heights.get(row, col) - depth.get(row, col);
            if z > landing {
                landing = z;
            }
        }
    }
    if footprint_cells == 0 {
        return Err(StabilityError::MalformedQuery("empty footprint".into()));
    }

    let mut contact: Vec<Point2> = Vec::new();
    for (row, col, &m) in mask.iter_indexed() {
        if m {
            let z = env.heights.get(row, col) - depth.get(row, col);
            if z >= landing - config.contact_tol {
                // Cell center relative to the window center.
                contact.push(Point2::new(
                    (col as f64 + 0.5) * res - half_extent,
                    (row as f64 + 0.5) * res - half_extent,
                ));
            }
        }
    }
    let area_fraction = contact.len() as f64 / footprint_cells as f64;
    let hull = convex_hull(&contact);
    let raw = geometry::signed_distance_to_hull(query.bottom.mass_center, hull.as_slice());
    let margin = if area_fraction >= config.min_contact_fraction {
        raw
    } else {
        raw - config.erosion_margin
    };
    let probability = logistic(margin / config.erosion_margin);
    Ok(StabilityVerdict { probability, stable: probability >= config.threshold })
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Synthesizes the query for placing `shape` at `pose` (window centered on
/// the pose) over the given environment objects.
pub fn build_query(shape: &ObjectShape, pose: &Pose, env: &[(&ObjectShape, Pose)]) -> StabilityQuery {
    let extent = STABILITY_GRID as f64 * STABILITY_RESOLUTION;
    let window = Rect::centered_at(pose.xy(), extent, extent);
    let environment = heightmap_of(env, window, STABILITY_RESOLUTION);

    let mut mask = Grid::new(STABILITY_GRID, STABILITY_GRID, false);
    let mut depth = Grid::new(STABILITY_GRID, STABILITY_GRID, 0.0_f64);
    let mut sum = Point2::default();
    let mut count = 0usize;
    for row in 0..STABILITY_GRID {
        for col in 0..STABILITY_GRID {
            let world = environment.cell_center(row, col);
            if footprint_covers_point(shape, pose, world) {
                mask.set(row, col, true);
                depth.set(row, col, bottom_depth_at(shape, pose, world));
                let rel = world.sub(pose.xy());
                sum = sum.add(rel);
                count += 1;
            }
        }
    }
    let mass_center = if count > 0 { sum.scale(1.0 / count as f64) } else { Point2::default() };
    StabilityQuery { environment, bottom: ObjectBottom { mask, depth, mass_center } }
}

fn bottom_depth_at(shape: &ObjectShape, pose: &Pose, world: Point2) -> f64 {
    match shape {
        ObjectShape::Disc { .. } | ObjectShape::Prism { .. } => 0.0,
        ObjectShape::Gridded { resolution, bottom, .. } => {
            let local = world.sub(pose.xy()).rotate(-pose.theta);
            let col = (local.x / resolution + bottom.cols() as f64 / 2.0).floor();
            let row = (local.y / resolution + bottom.rows() as f64 / 2.0).floor();
            if row >= 0.0 && col >= 0.0 && (row as usize) < bottom.rows() && (col as usize) < bottom.cols()
            {
                *bottom.get(row as usize, col as usize)
            } else {
                0.0
            }
        }
    }
}
