//! Deviation-ratio floors of two regular meshes of the unit square.
//!
//! Structured meshes cannot approximate all path directions: the
//! same-diagonal grid bottoms out at sqrt 2 and the cross-triangle mesh
//! at about 1.082 no matter how fine they get. Compare with the
//! decreasing pinwheel values from `classic_deviation_table`.
//!
//! Run: `cargo run --release --example baseline_limits`

use pinwheel_mesh::geom::{Point, Polygon};
use pinwheel_mesh::metrics::{self, SkeletonGraph};

fn main() {
    let unit = Polygon::new(vec![
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(1.0, 1.0),
        Point::new(0.0, 1.0),
    ])
    .unwrap();
    println!("mesh        n   vertices  deviation(l=1)   limit");
    for n in [8, 16, 32, 64] {
        let skel = SkeletonGraph::from_mesh(&metrics::grid_mesh(n));
        let rep = metrics::deviation_ratio(&skel, 1.0, &unit, None).unwrap();
        println!(
            "grid   {n:>6}  {:>9}  {:>13.6}   sqrt2 = {:.6}",
            skel.vertex_count(),
            rep.ratio,
            2f64.sqrt()
        );
    }
    for n in [8, 16, 32, 64] {
        let skel = SkeletonGraph::from_mesh(&metrics::cross_triangle_mesh(n));
        let rep = metrics::deviation_ratio(&skel, 1.0, &unit, None).unwrap();
        println!(
            "cross  {n:>6}  {:>9}  {:>13.6}   ~1.082",
            skel.vertex_count(),
            rep.ratio
        );
    }
}
