//! Element-quality statistics of a generated mesh, and the effect of the
//! collapse-node passes on aspect ratio (bounded by a factor 1.22).
//!
//! Run: `cargo run --release --example quality_report`

use pinwheel_mesh::forest::CoarseMesh;
use pinwheel_mesh::geom::Point;
use pinwheel_mesh::meshgen::{generate_mesh, GenerateOptions};
use pinwheel_mesh::metrics;

fn main() {
    let coarse = CoarseMesh::new(
        vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(2.0, 1.0),
            Point::new(0.0, 1.0),
        ],
        vec![[0, 1, 2], [0, 2, 3]],
    );
    let result = generate_mesh(&coarse, 0.05, &GenerateOptions::default()).unwrap();
    result.mesh.validate().unwrap();

    let mut worst_growth = 0.0f64;
    for lq in &result.pre_collapse {
        let t = result.forest.triangle(lq.tile).unwrap();
        worst_growth = worst_growth.max(t.aspect_ratio() / lq.aspect);
    }
    println!(
        "{} leaves, {} collapses, worst aspect growth across collapse {:.6} (bound 1.22)",
        result.forest.leaves().len(),
        result.collapse.direct,
        worst_growth
    );

    let report = metrics::quality_report(&result.mesh);
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
}
