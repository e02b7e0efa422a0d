//! Command-line front end.
//!
//! Subcommands: `mesh` (run the pipeline and write mesh files, an SVG
//! render and a quality report), `measure` (deviation ratios as CSV plus
//! an optional witness overlay), `render` (mesh file to SVG) and
//! `validate` (conformity checks). Exit codes: 0 success, 2 validation
//! failure, 3 internal invariant violation.
//!
//! Outputs are byte-reproducible for a fixed config and seed; measured
//! timings are only written when `--timings` is passed.

use crate::forest::{BuildOptions, CoarseMesh, GuardOptions};
use crate::geom::{Point, Polygon};
use crate::mesh::{SimplicialMesh, SvgOptions};
use crate::meshgen::{self, classic, DeltaPolicy, GenerateOptions, MeshgenError};
use crate::metrics::{self, MeasureRow, SkeletonGraph};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pinwheel-mesh", version, about = "Pinwheel-subdivision mesh generation and isoperimetric measurement")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a mesh from a coarse triangulation, a polygon, or the
    /// classic 1:2 family.
    Mesh(MeshArgs),
    /// Measure l-path deviation ratios.
    Measure(MeasureArgs),
    /// Render a mesh file as SVG.
    Render(RenderArgs),
    /// Validate a coarse triangulation or a mesh file.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    /// Coarse triangulation file (node/ele text format).
    #[arg(long, conflicts_with_all = ["polygon", "classic"])]
    pub coarse: Option<PathBuf>,
    /// Polygon file (first line N, then N lines "x y"); triangulated by
    /// the built-in fallback (no aspect-ratio guarantee).
    #[arg(long, conflicts_with = "classic")]
    pub polygon: Option<PathBuf>,
    /// Classic mode: uniform 1:2 subdivision with medium-vertex finishing.
    #[arg(long)]
    pub classic: bool,
    /// Subdivision levels (classic mode only).
    #[arg(long)]
    pub levels: Option<u32>,
    /// Classic mode domain: the 1:2 rectangle split into two 1:2 roots.
    #[arg(long)]
    pub rect12: bool,
    /// Classic mode domain: a single 1:2 triangle.
    #[arg(long, conflicts_with = "rect12")]
    pub single12: bool,
    /// Mesh size target: refine until every leaf minimum altitude is
    /// below this.
    #[arg(long)]
    pub h: Option<f64>,
    /// Collapse tolerance policy: "theoretical" or "dynamic:ETA".
    #[arg(long, default_value = "theoretical")]
    pub delta_mode: String,
    /// Rational-angle guard: "off" or "on" or "on:MAXDEN:TOL".
    #[arg(long, default_value = "off")]
    pub rational_guard: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output basename; writes BASE.node, BASE.off, BASE.svg,
    /// BASE.report.json per --formats.
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated outputs: node-ele,off,svg,report.
    #[arg(long, default_value = "node-ele,svg,report")]
    pub formats: String,
    #[arg(long, default_value_t = 1.0)]
    pub stroke_width: f64,
    /// Thread cap for the parallel stages.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Classic family deviation over a level range, e.g. "1..5" or "3".
    #[arg(long)]
    pub classic: bool,
    #[arg(long)]
    pub levels: Option<String>,
    /// Baseline family: "grid" or "cross".
    #[arg(long, conflicts_with = "classic")]
    pub baseline: Option<String>,
    /// Baseline subdivision count.
    #[arg(long)]
    pub n: Option<usize>,
    /// Measure an existing mesh file.
    #[arg(long, conflicts_with_all = ["classic", "baseline"])]
    pub mesh: Option<PathBuf>,
    /// Domain polygon file for geodesic distances; defaults to the
    /// convex hull of the mesh nodes.
    #[arg(long)]
    pub domain: Option<PathBuf>,
    /// Deviation length parameter.
    #[arg(long, default_value_t = 1.0)]
    pub l: f64,
    /// Also report tiling-only skeleton rows in classic mode.
    #[arg(long)]
    pub tiling: bool,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the worst-pair shortest path over the measured mesh as SVG.
    #[arg(long)]
    pub witness_svg: Option<PathBuf>,
    /// Include measured seconds in the CSV (breaks byte reproducibility).
    #[arg(long)]
    pub timings: bool,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Highlight the shortest skeleton path between two node indices
    /// "P,Q".
    #[arg(long)]
    pub highlight_path: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub stroke_width: f64,
    #[arg(long, default_value_t = 800.0)]
    pub width: f64,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, conflicts_with = "mesh")]
    pub coarse: Option<PathBuf>,
    #[arg(long)]
    pub mesh: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Forest(#[from] crate::forest::ForestError),
    #[error(transparent)]
    Mesh(#[from] crate::mesh::MeshError),
    #[error(transparent)]
    Metrics(#[from] metrics::MetricsError),
    #[error(transparent)]
    Geom(#[from] crate::geom::GeomError),
    #[error(transparent)]
    Meshgen(#[from] MeshgenError),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Meshgen(
                MeshgenError::DeltaProperty1 { .. }
                | MeshgenError::DeltaProperty2 { .. }
                | MeshgenError::HangingOffEdge { .. }
                | MeshgenError::LeafTriangulation(..),
            ) => EXIT_INVARIANT,
            _ => EXIT_VALIDATION,
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Mesh(a) => with_threads(a.threads, || cmd_mesh(&a)),
        Command::Measure(a) => with_threads(a.threads, || cmd_measure(&a)),
        Command::Render(a) => cmd_render(&a),
        Command::Validate(a) => cmd_validate(&a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn with_threads<T>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T
where
    T: Send,
{
    match threads {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        _ => f(),
    }
}

fn parse_delta_mode(s: &str) -> Result<DeltaPolicy, CliError> {
    if s == "theoretical" {
        return Ok(DeltaPolicy::Theoretical);
    }
    if s == "dynamic" {
        return Ok(DeltaPolicy::Dynamic { eta: meshgen::DEFAULT_DYNAMIC_ETA });
    }
    if let Some(rest) = s.strip_prefix("dynamic:") {
        let eta: f64 = rest
            .parse()
            .map_err(|_| CliError::Config(format!("bad dynamic eta: {rest}")))?;
        if !(0.0..1.0).contains(&eta) {
            return Err(CliError::Config("dynamic eta must be in [0, 1)".into()));
        }
        return Ok(DeltaPolicy::Dynamic { eta });
    }
    Err(CliError::Config(format!(
        "unknown delta mode {s:?} (expected theoretical or dynamic:ETA)"
    )))
}

fn parse_guard(s: &str) -> Result<Option<GuardOptions>, CliError> {
    if s == "off" {
        return Ok(None);
    }
    if s == "on" {
        return Ok(Some(GuardOptions::default()));
    }
    if let Some(rest) = s.strip_prefix("on:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() == 2 {
            let max_denominator = parts[0]
                .parse()
                .map_err(|_| CliError::Config("bad guard denominator".into()))?;
            let tol = parts[1]
                .parse()
                .map_err(|_| CliError::Config("bad guard tolerance".into()))?;
            return Ok(Some(GuardOptions { max_denominator, tol }));
        }
    }
    Err(CliError::Config(format!(
        "unknown rational-guard spec {s:?} (expected off or on[:MAXDEN:TOL])"
    )))
}

fn parse_polygon_file(path: &Path) -> Result<Polygon, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let n: usize = lines
        .next()
        .and_then(|l| l.parse().ok())
        .ok_or_else(|| CliError::Config("polygon file: expected vertex count".into()))?;
    let mut pts = Vec::with_capacity(n);
    for _ in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| CliError::Config("polygon file: missing vertex line".into()))?;
        let mut w = line.split_whitespace();
        let x: f64 = w
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| CliError::Config("polygon file: bad x".into()))?;
        let y: f64 = w
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| CliError::Config("polygon file: bad y".into()))?;
        pts.push(Point::new(x, y));
    }
    Ok(Polygon::new(pts)?)
}

fn parse_levels(s: &str) -> Result<(u32, u32), CliError> {
    if let Some((a, b)) = s.split_once("..") {
        let lo = a.parse().map_err(|_| CliError::Config("bad level range".into()))?;
        let hi = b.parse().map_err(|_| CliError::Config("bad level range".into()))?;
        if lo == 0 || hi < lo {
            return Err(CliError::Config("level range must be 1-based and increasing".into()));
        }
        Ok((lo, hi))
    } else {
        let v = s.parse().map_err(|_| CliError::Config("bad level".into()))?;
        if v == 0 {
            return Err(CliError::Config("levels are 1-based".into()));
        }
        Ok((v, v))
    }
}

/// Pipeline counters written alongside the quality statistics.
#[derive(Debug, Default, serde::Serialize)]
struct RunStats {
    roots: usize,
    tiles: usize,
    leaves: usize,
    finishing_splits: Option<usize>,
    delta: Option<f64>,
    collapses_accepted: usize,
    collapses_rejected: usize,
}

#[derive(Debug, serde::Serialize)]
struct RunReport {
    run: RunStats,
    quality: metrics::QualityReport,
}

fn write_outputs(
    mesh: &SimplicialMesh,
    args: &MeshArgs,
    report: &RunReport,
) -> Result<(), CliError> {
    let base = args.out.to_string_lossy();
    for fmt in args.formats.split(',') {
        match fmt.trim() {
            "node-ele" => mesh.write_node_ele(Path::new(&format!("{base}.node")))?,
            "off" => mesh.write_off(Path::new(&format!("{base}.off")))?,
            "svg" => mesh.write_svg(
                Path::new(&format!("{base}.svg")),
                &SvgOptions { stroke_width: args.stroke_width, ..Default::default() },
            )?,
            "report" => std::fs::write(
                format!("{base}.report.json"),
                serde_json::to_string_pretty(report).expect("report serializes"),
            )?,
            other => return Err(CliError::Config(format!("unknown format {other:?}"))),
        }
    }
    Ok(())
}

fn cmd_mesh(args: &MeshArgs) -> Result<(), CliError> {
    if args.classic {
        let levels = args
            .levels
            .ok_or_else(|| CliError::Config("--classic requires --levels".into()))?;
        let build = if args.single12 {
            classic::classic_build(&[classic::single12_root()], levels)
        } else {
            classic::classic_build(&classic::rect12_roots(1.0), levels)
        };
        build.mesh.validate().map_err(CliError::Mesh)?;
        let mut quality = metrics::quality_report(&build.mesh);
        if build.irregular_leaves > 0 {
            quality
                .warnings
                .push(format!("{} leaves needed a local Delaunay fallback", build.irregular_leaves));
        }
        eprintln!(
            "classic level {}: {} tiles, {} finishing splits, {} mesh triangles",
            levels,
            build.leaves.len(),
            build.finishing_splits,
            build.mesh.triangles.len()
        );
        let report = RunReport {
            run: RunStats {
                roots: 2,
                tiles: build.leaves.len(),
                leaves: build.leaves.len(),
                finishing_splits: Some(build.finishing_splits),
                ..Default::default()
            },
            quality,
        };
        return write_outputs(&build.mesh, args, &report);
    }

    let coarse = match (&args.coarse, &args.polygon) {
        (Some(path), _) => {
            let c = CoarseMesh::parse(&std::fs::read_to_string(path)?)?;
            c.validate()?;
            c
        }
        (None, Some(path)) => CoarseMesh::from_polygon(&parse_polygon_file(path)?)?,
        (None, None) => {
            return Err(CliError::Config(
                "mesh needs --coarse, --polygon or --classic".into(),
            ))
        }
    };
    let h = args
        .h
        .ok_or_else(|| CliError::Config("mesh needs a size target --h".into()))?;
    let opts = GenerateOptions {
        delta: parse_delta_mode(&args.delta_mode)?,
        build: BuildOptions { rational_guard: parse_guard(&args.rational_guard)?, seed: args.seed },
    };
    let result = meshgen::generate_mesh(&coarse, h, &opts)?;
    result.mesh.validate().map_err(|e| {
        CliError::Meshgen(MeshgenError::Mesh(e))
    })?;
    let mut quality = metrics::quality_report(&result.mesh);
    let r1 = result
        .forest
        .roots()
        .iter()
        .map(|&r| result.forest.triangle(r).map(|t| t.aspect_ratio()).unwrap_or(f64::INFINITY))
        .fold(0.0f64, f64::max);
    if r1 > 20.0 {
        quality.warnings.push(format!(
            "root aspect ratio {r1:.2} exceeds 20; built-in triangulation has no quality guarantee"
        ));
    }
    eprintln!(
        "{} roots, {} tiles, {} leaves; delta {}; {} collapses ({} rejected); {} nodes, {} triangles",
        result.forest.roots().len(),
        result.forest.tiles().len(),
        result.forest.leaves().len(),
        result
            .delta
            .value
            .map_or_else(|| format!("dynamic (eta {})", result.delta.eta.unwrap_or(0.0)), |d| format!("{d:.3e}")),
        result.collapse.direct,
        result.collapse.rejected,
        result.mesh.nodes.len(),
        result.mesh.triangles.len()
    );
    let report = RunReport {
        run: RunStats {
            roots: result.forest.roots().len(),
            tiles: result.forest.tiles().len(),
            leaves: result.forest.leaves().len(),
            finishing_splits: None,
            delta: result.delta.value,
            collapses_accepted: result.collapse.direct,
            collapses_rejected: result.collapse.rejected,
        },
        quality,
    };
    write_outputs(&result.mesh, args, &report)
}

fn hull_polygon(nodes: &[Point]) -> Result<Polygon, CliError> {
    // Andrew monotone chain
    let mut pts: Vec<Point> = nodes.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| a.x == b.x && a.y == b.y);
    if pts.len() < 3 {
        return Err(CliError::Config("mesh has fewer than 3 distinct nodes".into()));
    }
    let cross =
        |o: Point, a: Point, b: Point| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    let mut hull: Vec<Point> = Vec::new();
    for &p in pts.iter().chain(pts.iter().rev().skip(1)) {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            if hull.len() == pts.len() {
                break;
            }
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    Ok(Polygon::new(hull)?)
}

fn cmd_measure(args: &MeasureArgs) -> Result<(), CliError> {
    let mut rows: Vec<MeasureRow> = Vec::new();
    let mut witness: Option<(SimplicialMesh, Vec<usize>)> = None;

    if args.classic {
        let (lo, hi) = parse_levels(args.levels.as_deref().unwrap_or("1..5"))?;
        let domain = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(2.0, 1.0),
            Point::new(0.0, 1.0),
        ])?;
        for n in lo..=hi {
            let build = classic::classic_build(&classic::rect12_roots(1.0), n);
            let skel = SkeletonGraph::from_mesh(&build.mesh);
            let rep = metrics::deviation_ratio(&skel, args.l, &domain, None)?;
            rows.push(MeasureRow {
                label: n.to_string(),
                vertices: skel.vertex_count(),
                edges: skel.edge_count(),
                deviation_ratio: rep.ratio,
                witness_p: rep.witness_p,
                witness_q: rep.witness_q,
                seconds: args.timings.then_some(rep.elapsed_secs),
            });
            if args.tiling {
                let tskel = SkeletonGraph::new(
                    &build.verts,
                    build.tiling_edges.iter().copied(),
                );
                let trep = metrics::deviation_ratio(&tskel, args.l, &domain, None)?;
                rows.push(MeasureRow {
                    label: format!("{n}-tiling"),
                    vertices: tskel.vertex_count(),
                    edges: tskel.edge_count(),
                    deviation_ratio: trep.ratio,
                    witness_p: trep.witness_p,
                    witness_q: trep.witness_q,
                    seconds: args.timings.then_some(trep.elapsed_secs),
                });
            }
            if n == hi {
                witness = Some((
                    build.mesh.clone(),
                    rep.path.iter().map(|&v| v as usize).collect(),
                ));
            }
        }
    } else if let Some(kind) = &args.baseline {
        let n = args.n.unwrap_or(64);
        let mesh = match kind.as_str() {
            "grid" => metrics::grid_mesh(n),
            "cross" => metrics::cross_triangle_mesh(n),
            other => return Err(CliError::Config(format!("unknown baseline {other:?}"))),
        };
        let domain = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])?;
        let skel = SkeletonGraph::from_mesh(&mesh);
        let rep = metrics::deviation_ratio(&skel, args.l, &domain, None)?;
        rows.push(MeasureRow {
            label: format!("{kind}-{n}"),
            vertices: skel.vertex_count(),
            edges: skel.edge_count(),
            deviation_ratio: rep.ratio,
            witness_p: rep.witness_p,
            witness_q: rep.witness_q,
            seconds: args.timings.then_some(rep.elapsed_secs),
        });
        witness = Some((mesh, rep.path.iter().map(|&v| v as usize).collect()));
    } else if let Some(path) = &args.mesh {
        let mesh = SimplicialMesh::from_node_ele(&std::fs::read_to_string(path)?)?;
        mesh.validate()?;
        let domain = match &args.domain {
            Some(p) => parse_polygon_file(p)?,
            None => hull_polygon(&mesh.nodes)?,
        };
        let skel = SkeletonGraph::from_mesh(&mesh);
        let rep = metrics::deviation_ratio(&skel, args.l, &domain, None)?;
        rows.push(MeasureRow {
            label: path.to_string_lossy().into_owned(),
            vertices: skel.vertex_count(),
            edges: skel.edge_count(),
            deviation_ratio: rep.ratio,
            witness_p: rep.witness_p,
            witness_q: rep.witness_q,
            seconds: args.timings.then_some(rep.elapsed_secs),
        });
        witness = Some((mesh, rep.path.iter().map(|&v| v as usize).collect()));
    } else {
        return Err(CliError::Config(
            "measure needs --classic, --baseline or --mesh".into(),
        ));
    }

    let csv = metrics::measure_csv(&rows);
    match &args.out {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    if let (Some(path), Some((mesh, highlight))) = (&args.witness_svg, witness) {
        mesh.write_svg(
            path,
            &SvgOptions { highlight_path: highlight, ..Default::default() },
        )?;
    }
    Ok(())
}

fn cmd_render(args: &RenderArgs) -> Result<(), CliError> {
    let mesh = SimplicialMesh::from_node_ele(&std::fs::read_to_string(&args.mesh)?)?;
    let highlight_path = match &args.highlight_path {
        Some(spec) => {
            let (p, q) = spec
                .split_once(',')
                .ok_or_else(|| CliError::Config("highlight path must be P,Q".into()))?;
            let p: usize = p.trim().parse().map_err(|_| CliError::Config("bad node index".into()))?;
            let q: usize = q.trim().parse().map_err(|_| CliError::Config("bad node index".into()))?;
            if p >= mesh.nodes.len() || q >= mesh.nodes.len() {
                return Err(CliError::Config("highlight node index out of range".into()));
            }
            let skel = SkeletonGraph::from_mesh(&mesh);
            let (_, pred) = skel.dijkstra_with_pred(p as u32);
            let mut path = vec![q as u32];
            let mut cur = q as u32;
            while cur != p as u32 {
                cur = pred[cur as usize];
                if cur == u32::MAX {
                    return Err(CliError::Config("nodes are not connected".into()));
                }
                path.push(cur);
            }
            path.reverse();
            path.into_iter().map(|v| v as usize).collect()
        }
        None => Vec::new(),
    };
    mesh.write_svg(
        &args.out,
        &SvgOptions {
            width: args.width,
            stroke_width: args.stroke_width,
            highlight_path,
        },
    )?;
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), CliError> {
    match (&args.coarse, &args.mesh) {
        (Some(path), None) => {
            let coarse = CoarseMesh::parse(&std::fs::read_to_string(path)?)?;
            coarse.validate()?;
            println!(
                "ok: {} nodes, {} triangles, conforming",
                coarse.nodes.len(),
                coarse.triangles.len()
            );
            Ok(())
        }
        (None, Some(path)) => {
            let mesh = SimplicialMesh::from_node_ele(&std::fs::read_to_string(path)?)?;
            mesh.validate()?;
            println!(
                "ok: {} nodes, {} triangles, conforming",
                mesh.nodes.len(),
                mesh.triangles.len()
            );
            Ok(())
        }
        _ => Err(CliError::Config("validate needs exactly one of --coarse or --mesh".into())),
    }
}
