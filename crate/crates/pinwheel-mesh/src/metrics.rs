//! Isoperimetric and element-quality measurement.
//!
//! The 1-skeleton of a tiling or mesh is the union of all edges viewed as
//! a weighted graph; a tile edge carrying hanging nodes contributes its
//! subsegments, so paths may turn at hanging nodes. The l-path deviation
//! ratio is the maximum over vertex pairs at Euclidean distance at least
//! `l` of skeleton shortest-path length over geodesic distance in the
//! domain; it is computed exactly with one shortest-path tree per source
//! vertex (sources run in parallel, merged deterministically).

use crate::forest::{Forest, VertexId};
use crate::geom::{geodesic_distance, GeomError, Point, Polygon, Triangle};
use crate::mesh::SimplicialMesh;
use crate::meshgen::{BigEdgeTable, MeshgenError};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("l_too_large: no vertex pair at Euclidean distance >= {0}")]
    LTooLarge(f64),
    #[error("skeleton is disconnected between witness candidates")]
    Disconnected,
    #[error("parameter out of range: {0}")]
    BadParameter(&'static str),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Meshgen(#[from] MeshgenError),
}

/// A 1-skeleton: deduplicated vertices and Euclidean-weighted edges.
#[derive(Debug, Clone)]
pub struct SkeletonGraph {
    pub verts: Vec<Point>,
    pub edges: Vec<(u32, u32, f64)>,
    adj: Vec<Vec<(u32, f64)>>,
}

impl SkeletonGraph {
    /// Builds from vertex positions and undirected index pairs; edge
    /// weights are Euclidean lengths. Vertices closer than `1e-12 x
    /// diameter` are merged.
    pub fn new(verts: &[Point], pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        // dedup by quantized position
        let diam = {
            let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
            let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
            for p in verts {
                lo.x = lo.x.min(p.x);
                lo.y = lo.y.min(p.y);
                hi.x = hi.x.max(p.x);
                hi.y = hi.y.max(p.y);
            }
            (hi - lo).norm().max(1e-300)
        };
        let tol = 1e-12 * diam;
        let mut remap = vec![u32::MAX; verts.len()];
        let mut cells: std::collections::HashMap<(i64, i64), Vec<u32>> =
            std::collections::HashMap::new();
        let mut uniq: Vec<Point> = Vec::new();
        for (i, p) in verts.iter().enumerate() {
            let key = ((p.x / tol).round() as i64, (p.y / tol).round() as i64);
            let mut found = None;
            'scan: for dx in -1..=1i64 {
                for dy in -1..=1i64 {
                    if let Some(ids) = cells.get(&(key.0 + dx, key.1 + dy)) {
                        for &u in ids {
                            if uniq[u as usize].dist(*p) <= tol {
                                found = Some(u);
                                break 'scan;
                            }
                        }
                    }
                }
            }
            remap[i] = found.unwrap_or_else(|| {
                let u = uniq.len() as u32;
                uniq.push(*p);
                cells.entry(key).or_default().push(u);
                u
            });
        }
        let mut set: std::collections::BTreeSet<(u32, u32)> = std::collections::BTreeSet::new();
        for (u, v) in pairs {
            let (a, b) = (remap[u], remap[v]);
            if a != b {
                set.insert((a.min(b), a.max(b)));
            }
        }
        let edges: Vec<(u32, u32, f64)> = set
            .into_iter()
            .map(|(a, b)| (a, b, uniq[a as usize].dist(uniq[b as usize])))
            .collect();
        let mut adj = vec![Vec::new(); uniq.len()];
        for &(a, b, w) in &edges {
            adj[a as usize].push((b, w));
            adj[b as usize].push((a, w));
        }
        SkeletonGraph { verts: uniq, edges, adj }
    }

    /// Skeleton of a mesh: all triangle edges.
    pub fn from_mesh(mesh: &SimplicialMesh) -> Self {
        SkeletonGraph::new(&mesh.nodes, mesh.edges())
    }

    /// Skeleton of the refined (possibly collapsed) tiling: each leaf edge
    /// contributes its subsegments between consecutive corner and hanging
    /// nodes.
    pub fn from_forest_leaves(
        forest: &Forest,
        table: &BigEdgeTable,
    ) -> Result<Self, MetricsError> {
        let chains = crate::meshgen::leaf_boundary_chains(forest, table)?;
        let mut ids: BTreeMap<VertexId, usize> = BTreeMap::new();
        let mut pairs = Vec::new();
        for (_, chain) in &chains {
            for k in 0..chain.len() {
                let (u, v) = (chain[k], chain[(k + 1) % chain.len()]);
                let next = ids.len();
                let iu = *ids.entry(u).or_insert(next);
                let next = ids.len();
                let iv = *ids.entry(v).or_insert(next);
                pairs.push((iu, iv));
            }
        }
        let mut verts = vec![Point::default(); ids.len()];
        for (&vid, &i) in &ids {
            verts[i] = forest.verts.pos(vid);
        }
        Ok(SkeletonGraph::new(&verts, pairs))
    }

    pub fn vertex_count(&self) -> usize {
        self.verts.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn dijkstra(&self, src: u32) -> Vec<f64> {
        self.dijkstra_impl(src).0
    }

    pub fn dijkstra_with_pred(&self, src: u32) -> (Vec<f64>, Vec<u32>) {
        self.dijkstra_impl(src)
    }

    fn dijkstra_impl(&self, src: u32) -> (Vec<f64>, Vec<u32>) {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;

        #[derive(PartialEq)]
        struct K(f64);
        impl Eq for K {}
        impl PartialOrd for K {
            fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(o))
            }
        }
        impl Ord for K {
            fn cmp(&self, o: &Self) -> std::cmp::Ordering {
                self.0.total_cmp(&o.0)
            }
        }

        let n = self.verts.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![u32::MAX; n];
        let mut heap = BinaryHeap::new();
        dist[src as usize] = 0.0;
        heap.push(Reverse((K(0.0), src)));
        while let Some(Reverse((K(d), u))) = heap.pop() {
            if d > dist[u as usize] {
                continue;
            }
            for &(v, w) in &self.adj[u as usize] {
                let nd = d + w;
                if nd < dist[v as usize] {
                    dist[v as usize] = nd;
                    pred[v as usize] = u;
                    heap.push(Reverse((K(nd), v)));
                }
            }
        }
        (dist, pred)
    }
}

/// Worst path-deviation witness.
#[derive(Debug, Clone, Serialize)]
pub struct DeviationReport {
    pub ratio: f64,
    pub witness_p: u32,
    pub witness_q: u32,
    /// Vertex ids of the witness shortest path from p to q.
    pub path: Vec<u32>,
    pub l: f64,
    pub elapsed_secs: f64,
}

/// Exact maximum over vertex pairs with `|p - q| >= l` of skeleton
/// distance over geodesic distance. `subset`, when given, restricts both
/// endpoints to the listed vertices.
pub fn deviation_ratio(
    skel: &SkeletonGraph,
    l: f64,
    domain: &Polygon,
    subset: Option<&[u32]>,
) -> Result<DeviationReport, MetricsError> {
    let start = std::time::Instant::now();
    let all: Vec<u32>;
    let verts: &[u32] = match subset {
        Some(s) => s,
        None => {
            all = (0..skel.verts.len() as u32).collect();
            &all
        }
    };
    let convex = domain.is_convex();

    let best = verts
        .par_iter()
        .enumerate()
        .map(|(si, &s)| {
            let dist = skel.dijkstra(s);
            let mut local: Option<(f64, u32, u32)> = None;
            for &q in &verts[si + 1..] {
                let euclid = skel.verts[s as usize].dist(skel.verts[q as usize]);
                if euclid < l {
                    continue;
                }
                let d = dist[q as usize];
                if !d.is_finite() {
                    continue;
                }
                let geo = if convex {
                    euclid
                } else {
                    geodesic_distance(domain, skel.verts[s as usize], skel.verts[q as usize])
                        .unwrap_or(euclid)
                };
                let ratio = d / geo;
                let cand = (ratio, s.min(q), s.max(q));
                local = Some(match local {
                    None => cand,
                    Some(b) => pick(b, cand),
                });
            }
            local
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) => x,
                (x, None) => x,
                (Some(x), Some(y)) => Some(pick(x, y)),
            },
        );

    fn pick(a: (f64, u32, u32), b: (f64, u32, u32)) -> (f64, u32, u32) {
        // larger ratio wins; exact ties resolve to the lexicographically
        // smaller pair
        match a.0.total_cmp(&b.0) {
            std::cmp::Ordering::Greater => a,
            std::cmp::Ordering::Less => b,
            std::cmp::Ordering::Equal => {
                if (a.1, a.2) <= (b.1, b.2) {
                    a
                } else {
                    b
                }
            }
        }
    }

    let (ratio, p, q) = best.ok_or(MetricsError::LTooLarge(l))?;
    if !ratio.is_finite() {
        return Err(MetricsError::Disconnected);
    }
    let (_, pred) = skel.dijkstra_with_pred(p);
    let mut path = vec![q];
    let mut cur = q;
    while cur != p {
        cur = pred[cur as usize];
        if cur == u32::MAX {
            return Err(MetricsError::Disconnected);
        }
        path.push(cur);
    }
    path.reverse();
    Ok(DeviationReport {
        ratio,
        witness_p: p,
        witness_q: q,
        path,
        l,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

/// Unit-square mesh of n x n cells, each split by the same-direction
/// diagonal.
pub fn grid_mesh(n: usize) -> SimplicialMesh {
    assert!(n >= 1);
    let s = n + 1;
    let at = |i: usize, j: usize| i * s + j;
    let mut nodes = Vec::with_capacity(s * s);
    for i in 0..s {
        for j in 0..s {
            nodes.push(Point::new(i as f64 / n as f64, j as f64 / n as f64));
        }
    }
    let mut tris = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            let (p00, p10, p11, p01) = (at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
            tris.push([p00, p10, p11]);
            tris.push([p00, p11, p01]);
        }
    }
    SimplicialMesh::new(nodes, tris)
}

/// Unit-square mesh of n x n cells, each split into four triangles by
/// both diagonals meeting at the cell center.
pub fn cross_triangle_mesh(n: usize) -> SimplicialMesh {
    assert!(n >= 1);
    let s = n + 1;
    let at = |i: usize, j: usize| i * s + j;
    let mut nodes = Vec::with_capacity(s * s + n * n);
    for i in 0..s {
        for j in 0..s {
            nodes.push(Point::new(i as f64 / n as f64, j as f64 / n as f64));
        }
    }
    let center = |i: usize, j: usize| s * s + i * n + j;
    for i in 0..n {
        for j in 0..n {
            nodes.push(Point::new(
                (i as f64 + 0.5) / n as f64,
                (j as f64 + 0.5) / n as f64,
            ));
        }
    }
    let mut tris = Vec::with_capacity(4 * n * n);
    for i in 0..n {
        for j in 0..n {
            let c = center(i, j);
            let (p00, p10, p11, p01) = (at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
            tris.push([p00, p10, c]);
            tris.push([p10, p11, c]);
            tris.push([p11, p01, c]);
            tris.push([p01, p00, c]);
        }
    }
    SimplicialMesh::new(nodes, tris)
}

/// Aggregate element-quality statistics.
#[derive(Debug, Clone, Serialize)]
pub struct QualityReport {
    pub triangle_count: usize,
    pub node_count: usize,
    pub min_angle: f64,
    pub max_aspect_ratio: f64,
    pub min_min_altitude: f64,
    pub max_min_altitude: f64,
    /// Counts of triangles by smallest angle, 18 bins of 5 degrees.
    pub min_angle_histogram: Vec<usize>,
    pub warnings: Vec<String>,
}

pub fn quality_report(mesh: &SimplicialMesh) -> QualityReport {
    let mut min_angle = f64::INFINITY;
    let mut max_aspect = 0.0f64;
    let mut min_alt = f64::INFINITY;
    let mut max_alt = 0.0f64;
    let mut hist = vec![0usize; 18];
    for i in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.triangle_points(i);
        let t = Triangle::new(a, b, c).expect("mesh triangle degenerate");
        let ang = t.angles().into_iter().fold(f64::INFINITY, f64::min);
        min_angle = min_angle.min(ang);
        max_aspect = max_aspect.max(t.aspect_ratio());
        min_alt = min_alt.min(t.min_altitude());
        max_alt = max_alt.max(t.min_altitude());
        let bin = ((ang.to_degrees() / 5.0) as usize).min(17);
        hist[bin] += 1;
    }
    QualityReport {
        triangle_count: mesh.triangles.len(),
        node_count: mesh.nodes.len(),
        min_angle,
        max_aspect_ratio: max_aspect,
        min_min_altitude: min_alt,
        max_min_altitude: max_alt,
        min_angle_histogram: hist,
        warnings: Vec::new(),
    }
}

/// Bounds for infinite products of the form `prod (1 -+ s t^i)^k`:
/// returns `(1 - ks/(1-t), exp(ks/(1-t)))`.
pub fn product_bound(s: f64, t: f64, k: u32) -> Result<(f64, f64), MetricsError> {
    if !(s > 0.0 && s < 1.0) {
        return Err(MetricsError::BadParameter("s must be in (0,1)"));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(MetricsError::BadParameter("t must be in (0,1)"));
    }
    if k < 1 {
        return Err(MetricsError::BadParameter("k must be >= 1"));
    }
    let x = k as f64 * s / (1.0 - t);
    Ok((1.0 - x, x.exp()))
}

/// One row of the measurement report.
#[derive(Debug, Clone, Serialize)]
pub struct MeasureRow {
    pub label: String,
    pub vertices: usize,
    pub edges: usize,
    pub deviation_ratio: f64,
    pub witness_p: u32,
    pub witness_q: u32,
    /// Measured seconds; omitted from the CSV (written as 0.000) unless
    /// timings are requested, to keep outputs byte-reproducible.
    pub seconds: Option<f64>,
}

/// Renders measurement rows as CSV with a fixed header.
pub fn measure_csv(rows: &[MeasureRow]) -> String {
    let mut s = String::from("level_or_target,vertices,edges,deviation_ratio,witness_p,witness_q,seconds\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{:.6},{},{},{:.3}\n",
            r.label,
            r.vertices,
            r.edges,
            r.deviation_ratio,
            r.witness_p,
            r.witness_q,
            r.seconds.unwrap_or(0.0)
        ));
    }
    s
}
