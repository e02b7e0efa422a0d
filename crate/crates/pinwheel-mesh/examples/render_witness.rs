//! Renders a mesh with its worst-deviation shortest path overlaid: the
//! pair of nodes whose skeleton path is longest relative to their
//! straight-line distance, and the path itself as a highlighted polyline.
//!
//! Run: `cargo run --release --example render_witness`

use pinwheel_mesh::geom::{Point, Polygon};
use pinwheel_mesh::mesh::SvgOptions;
use pinwheel_mesh::meshgen::classic;
use pinwheel_mesh::metrics::{self, SkeletonGraph};

fn main() {
    let build = classic::classic_build(&classic::rect12_roots(1.0), 4);
    let domain = Polygon::new(vec![
        Point::new(0.0, 0.0),
        Point::new(2.0, 0.0),
        Point::new(2.0, 1.0),
        Point::new(0.0, 1.0),
    ])
    .unwrap();
    let skel = SkeletonGraph::from_mesh(&build.mesh);
    let rep = metrics::deviation_ratio(&skel, 1.0, &domain, None).unwrap();
    println!(
        "worst pair: nodes {} and {}, ratio {:.4}, path of {} vertices",
        rep.witness_p,
        rep.witness_q,
        rep.ratio,
        rep.path.len()
    );

    let dir = std::path::Path::new("target/example-output");
    std::fs::create_dir_all(dir).unwrap();
    let opts = SvgOptions {
        stroke_width: 0.6,
        highlight_path: rep.path.iter().map(|&v| v as usize).collect(),
        ..Default::default()
    };
    build.mesh.write_svg(&dir.join("witness.svg"), &opts).unwrap();
    println!("wrote {}/witness.svg", dir.display());
}
