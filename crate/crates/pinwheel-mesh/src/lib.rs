//! Triangular mesh generation by generalized pinwheel subdivision.
//!
//! The library subdivides a coarse triangulation of a polygon by pinwheel
//! rules (five children per tile, three similar to the parent and two
//! similar to its conjugate), converts the resulting tiling into a
//! hanging-node-free simplicial mesh via collapse-node operations and
//! per-leaf Delaunay triangulation, and measures the isoperimetric quality
//! of the result (how well shortest edge paths track straight-line
//! distances) alongside classical element-quality statistics.
//!
//! Modules follow the pipeline order:
//!
//! - [`geom`]: planar kernel (triangles, affine maps, exact predicates,
//!   geodesic distances in polygons).
//! - [`pinwheel`]: the subdivision rules themselves.
//! - [`forest`]: the tile hierarchy, coarse-mesh ingestion and heap-driven
//!   refinement to a size target.
//! - [`meshgen`]: tiling-to-mesh conversion (big edges, collapse-node
//!   passes, leaf Delaunay) plus the classic 1:2 finishing mode.
//! - [`mesh`]: the final simplicial mesh, validation and file formats.
//! - [`metrics`]: 1-skeleton graphs, path deviation ratios, baseline
//!   meshes and quality reports.
//! - [`cli`]: the command-line front end used by the `pinwheel-mesh` binary.
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! - **`subdivision_rules`** - the split, conjugacy, tripartition and
//!   rational-angle-guard primitives on their own
//! - **`mesh_polygon`** - polygon to conforming mesh, end to end
//! - **`classic_deviation_table`** - deviation ratios of the 1:2
//!   rectangle family over five levels
//! - **`baseline_limits`** - the sqrt-2 and 1.082 deviation floors of
//!   two structured meshes
//! - **`isoperimetry_convergence`** - deviation under size-target halving
//! - **`quality_report`** - element-quality statistics and the bounded
//!   aspect-ratio cost of the collapse passes
//! - **`render_witness`** - SVG render with the worst shortest path
//!   overlaid
//!
//! ```bash
//! cargo run --release --example classic_deviation_table
//! ```

pub mod cli;
pub mod forest;
pub mod geom;
pub mod mesh;
pub mod meshgen;
pub mod metrics;
pub mod pinwheel;

pub use geom::{Point, Polygon, Triangle};
pub use mesh::SimplicialMesh;
