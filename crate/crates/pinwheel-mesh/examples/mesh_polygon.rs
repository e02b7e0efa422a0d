//! End-to-end pipeline on a polygon: built-in coarse triangulation,
//! pinwheel refinement to a size target, collapse-node passes, per-leaf
//! Delaunay, and file output.
//!
//! Run: `cargo run --release --example mesh_polygon`

use pinwheel_mesh::forest::CoarseMesh;
use pinwheel_mesh::geom::{Point, Polygon};
use pinwheel_mesh::mesh::SvgOptions;
use pinwheel_mesh::meshgen::{generate_mesh, GenerateOptions};
use pinwheel_mesh::metrics;

fn main() {
    let polygon = Polygon::new(vec![
        Point::new(0.0, 0.0),
        Point::new(2.6, -0.3),
        Point::new(3.4, 1.5),
        Point::new(1.6, 2.6),
        Point::new(-0.6, 1.7),
    ])
    .expect("simple polygon");

    let coarse = CoarseMesh::from_polygon(&polygon).expect("triangulates");
    println!(
        "coarse: {} nodes, {} triangles",
        coarse.nodes.len(),
        coarse.triangles.len()
    );

    let result = generate_mesh(&coarse, 0.08, &GenerateOptions::default()).expect("pipeline");
    result.mesh.validate().expect("conforming");
    println!(
        "roots {} | tiles {} | leaves {} | delta {:.3e} | direct collapses {}",
        result.forest.roots().len(),
        result.forest.tiles().len(),
        result.forest.leaves().len(),
        result.delta.value.unwrap(),
        result.collapse.direct,
    );
    println!(
        "mesh: {} nodes, {} triangles, area {:.6}",
        result.mesh.nodes.len(),
        result.mesh.triangles.len(),
        result.mesh.area()
    );
    let report = metrics::quality_report(&result.mesh);
    println!(
        "quality: min angle {:.4} rad, max aspect {:.3}",
        report.min_angle, report.max_aspect_ratio
    );

    let dir = std::path::Path::new("target/example-output");
    std::fs::create_dir_all(dir).unwrap();
    result.mesh.write_node_ele(&dir.join("polygon.node")).unwrap();
    result.mesh.write_off(&dir.join("polygon.off")).unwrap();
    result
        .mesh
        .write_svg(&dir.join("polygon.svg"), &SvgOptions::default())
        .unwrap();
    println!("wrote {}/polygon.{{node,off,svg}}", dir.display());
}
