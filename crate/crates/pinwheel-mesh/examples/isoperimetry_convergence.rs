//! Deviation ratios of final meshes under size-target halving: for a
//! fixed polygon, the worst path-length overhead shrinks as the mesh is
//! refined, which is the property structured grids lack.
//!
//! Run: `cargo run --release --example isoperimetry_convergence`

use pinwheel_mesh::forest::CoarseMesh;
use pinwheel_mesh::geom::{Point, Polygon};
use pinwheel_mesh::meshgen::{generate_mesh, GenerateOptions};
use pinwheel_mesh::metrics::{self, SkeletonGraph};

fn main() {
    let pts = vec![Point::new(0.0, 0.0), Point::new(3.0, 0.0), Point::new(0.8, 2.2)];
    let coarse = CoarseMesh::new(pts.clone(), vec![[0, 1, 2]]);
    let domain = Polygon::new(pts).unwrap();
    println!("h        leaves   collapses  nodes   deviation(l=1)");
    let mut h = 0.4;
    for _ in 0..4 {
        let r = generate_mesh(&coarse, h, &GenerateOptions::default()).unwrap();
        let skel = SkeletonGraph::from_mesh(&r.mesh);
        let rep = metrics::deviation_ratio(&skel, 1.0, &domain, None).unwrap();
        println!(
            "{h:<7.4}  {:>6}  {:>9}  {:>6}  {:>13.4}",
            r.forest.leaves().len(),
            r.collapse.direct,
            r.mesh.nodes.len(),
            rep.ratio
        );
        h /= 2.0;
    }
}
