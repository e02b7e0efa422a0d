//! Deviation ratios of the classic 1:2 rectangle family.
//!
//! Builds the uniform level-n subdivision of the 1:2 rectangle (two 1:2
//! right-triangle roots), finishes it into a mesh by medium-vertex
//! splits, and evaluates the 1-path deviation ratio per level. The ratios
//! decrease toward 1, unlike structured grids.
//!
//! Run: `cargo run --release --example classic_deviation_table`

use pinwheel_mesh::geom::{Point, Polygon};
use pinwheel_mesh::meshgen::classic;
use pinwheel_mesh::metrics::{self, SkeletonGraph};

fn main() {
    let domain = Polygon::new(vec![
        Point::new(0.0, 0.0),
        Point::new(2.0, 0.0),
        Point::new(2.0, 1.0),
        Point::new(0.0, 1.0),
    ])
    .unwrap();
    println!("level  tiles   vertices  edges   deviation(l=1)  tiling-only");
    for n in 1..=5u32 {
        let b = classic::classic_build(&classic::rect12_roots(1.0), n);
        let mesh_skel = SkeletonGraph::from_mesh(&b.mesh);
        let mesh_rep = metrics::deviation_ratio(&mesh_skel, 1.0, &domain, None).unwrap();
        let tiling_skel = SkeletonGraph::new(&b.verts, b.tiling_edges.iter().copied());
        let tiling_rep = metrics::deviation_ratio(&tiling_skel, 1.0, &domain, None).unwrap();
        println!(
            "{n:>5}  {:>6}  {:>8}  {:>6}  {:>13.4}  {:>11.4}",
            b.leaves.len(),
            mesh_skel.vertex_count(),
            mesh_skel.edge_count(),
            mesh_rep.ratio,
            tiling_rep.ratio,
        );
    }
}
