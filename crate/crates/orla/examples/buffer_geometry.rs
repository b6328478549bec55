//! The geometric optimizers behind buffer placement: Fermat points for
//! three-stop stars, diagonal intersections for four visits, and track
//! extreme points for the mobile-base scenario.
//!
//!     cargo run --release -p orla --example buffer_geometry

use orla::geometry::{
    ee_optimal_buffer_region, fermat_point, mb_optimal_buffer_region, Point2, Rect, Track,
};

fn main() {
    // Equilateral triangle: the Fermat point is the centroid.
    let fp = fermat_point(
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(0.5, 3.0_f64.sqrt() / 2.0),
    );
    println!("fermat(equilateral) = ({:.5}, {:.5})", fp.x, fp.y);

    // Obtuse (>= 120 degrees): the wide vertex itself wins.
    let fp = fermat_point(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.5, 0.1));
    println!("fermat(obtuse)      = ({:.5}, {:.5})", fp.x, fp.y);

    // Four visits in convex position: the diagonal intersection.
    let region = ee_optimal_buffer_region(&[
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(1.0, 1.0),
        Point2::new(0.0, 1.0),
    ]);
    println!("EE region (square visits) = ({:.3}, {:.3})", region[0].x, region[0].y);

    // One visit inside the others' triangle: that visit is the minimizer.
    let region = ee_optimal_buffer_region(&[
        Point2::new(0.0, 0.0),
        Point2::new(2.0, 0.0),
        Point2::new(1.0, 0.1),
        Point2::new(1.0, 5.0),
    ]);
    println!("EE region (interior visit) = ({:.3}, {:.3})", region[0].x, region[0].y);

    // Mobile base on a 3x1 table: anchors {0, 0, 4, 4} make the distance sum
    // constant, so the whole track is optimal.
    let track = Track::new(Rect::centered(3.0, 1.0));
    let region = mb_optimal_buffer_region(&[0.0, 0.0, 4.0, 4.0], &track);
    println!(
        "MB region (antipodal anchors): min sum {}, {} candidate points, {} constant arcs",
        region.min_sum,
        region.points.len(),
        region.segments.len()
    );

    // Distinct anchors: isolated minimizers on the track.
    let region = mb_optimal_buffer_region(&[0.0, 2.0, 6.0], &track);
    println!(
        "MB region (anchors 0,2,6): min sum {}, minimizers at {:?}",
        region.min_sum, region.points
    );
}
