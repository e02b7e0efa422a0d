//! Classic 1:2 pinwheel meshes.
//!
//! A 1:2 right triangle subdivides into five congruent copies of itself,
//! and the uniform level-n subdivision is almost a triangulation: the only
//! mismatches are hanging nodes sitting at midpoints of medium edges
//! (child V hosts the created vertex G there, and across edges shared by
//! mirror-image neighbors the foreign subdivision points land at medium
//! midpoints too). Joining each hosting tile's medium vertex to the
//! hanging node therefore yields a conforming mesh without any collapse
//! machinery. Interior coincidences (a deeper split recreating an existing
//! vertex) are unified by position.
//!
//! This bespoke path exists for the deviation-ratio experiment on the 1:2
//! rectangle; the general pipeline handles these inputs too, at the cost
//! of collapse-node bookkeeping.

use crate::geom::{signed_area2, Point};
use crate::mesh::SimplicialMesh;
use crate::pinwheel::{pinwheel_split, AngleClass, ClassKind};
use std::collections::HashMap;

/// A classic uniform subdivision, unified and finished.
#[derive(Debug, Clone)]
pub struct ClassicBuild {
    /// Unified vertex positions.
    pub verts: Vec<Point>,
    /// Leaf tiles as role-ordered vertex indices.
    pub leaves: Vec<[usize; 3]>,
    /// Tiling 1-skeleton edges: every leaf edge split at its hanging
    /// nodes into subsegments (paths may turn at hanging nodes).
    pub tiling_edges: Vec<(usize, usize)>,
    /// The conforming mesh after medium-vertex finishing.
    pub mesh: SimplicialMesh,
    /// Number of leaves split by the finishing step.
    pub finishing_splits: usize,
    /// Hanging nodes that did not match the medium-midpoint pattern and
    /// were resolved by a local Delaunay fan instead (0 for 1:2 inputs).
    pub irregular_leaves: usize,
}

fn angles_12() -> [f64; 3] {
    [0.5f64.atan(), 2f64.atan(), std::f64::consts::FRAC_PI_2]
}

/// Role corners (A, B, C) of the two 1:2 triangles tiling the rectangle
/// `[0, 2w] x [0, w]`, related by a half-turn about the center.
pub fn rect12_roots(w: f64) -> [[Point; 3]; 2] {
    [
        [Point::new(0.0, 0.0), Point::new(2.0 * w, w), Point::new(2.0 * w, 0.0)],
        [Point::new(2.0 * w, w), Point::new(0.0, 0.0), Point::new(0.0, w)],
    ]
}

/// Role corners of a single 1:2 triangle with legs 1 and 2.
pub fn single12_root() -> [Point; 3] {
    [Point::new(0.0, 0.0), Point::new(2.0, 1.0), Point::new(2.0, 0.0)]
}

struct Unifier {
    tol: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
    pts: Vec<Point>,
}

impl Unifier {
    fn new(tol: f64) -> Self {
        Unifier { tol, cells: HashMap::new(), pts: Vec::new() }
    }

    fn key(&self, p: Point) -> (i64, i64) {
        ((p.x / self.tol).round() as i64, (p.y / self.tol).round() as i64)
    }

    fn id(&mut self, p: Point) -> usize {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.cells.get(&(kx + dx, ky + dy)) {
                    for &i in ids {
                        if self.pts[i].dist(p) <= self.tol {
                            return i;
                        }
                    }
                }
            }
        }
        let i = self.pts.len();
        self.pts.push(p);
        self.cells.entry((kx, ky)).or_default().push(i);
        i
    }
}

/// Uniform level-`n` classic subdivision of the given 1:2 root tiles,
/// with medium-vertex finishing.
pub fn classic_build(roots: &[[Point; 3]], levels: u32) -> ClassicBuild {
    let cls = AngleClass { kind: ClassKind::RootSimilar, angles: angles_12() };
    let mut frontier: Vec<[Point; 3]> = roots.to_vec();
    for _ in 0..levels {
        let mut next = Vec::with_capacity(frontier.len() * 5);
        for corners in frontier {
            let sub = pinwheel_split(corners, &cls).expect("classic split");
            for ch in sub.children {
                next.push(ch.corners);
            }
        }
        frontier = next;
    }

    let diam = roots
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, p| m.max(p.norm()))
        .max(1.0);
    let mut uni = Unifier::new(1e-9 * diam);
    let leaves: Vec<[usize; 3]> = frontier
        .iter()
        .map(|c| [uni.id(c[0]), uni.id(c[1]), uni.id(c[2])])
        .collect();
    let verts = uni.pts.clone();

    // hanging-node detection against a vertex bucket grid
    let mut max_edge = 0.0f64;
    for l in &leaves {
        for k in 0..3 {
            max_edge = max_edge.max(verts[l[k]].dist(verts[l[(k + 1) % 3]]));
        }
    }
    let cell = max_edge.max(1e-12);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in verts.iter().enumerate() {
        grid.entry(((p.x / cell).floor() as i64, (p.y / cell).floor() as i64))
            .or_default()
            .push(i);
    }
    let hangs_on = |u: usize, v: usize| -> Vec<usize> {
        let (a, b) = (verts[u], verts[v]);
        let len = a.dist(b);
        let (x0, x1) = ((a.x.min(b.x) / cell).floor() as i64, (a.x.max(b.x) / cell).floor() as i64);
        let (y0, y1) = ((a.y.min(b.y) / cell).floor() as i64, (a.y.max(b.y) / cell).floor() as i64);
        let mut out: Vec<(f64, usize)> = Vec::new();
        for gx in x0 - 1..=x1 + 1 {
            for gy in y0 - 1..=y1 + 1 {
                let Some(ids) = grid.get(&(gx, gy)) else { continue };
                for &i in ids {
                    if i == u || i == v {
                        continue;
                    }
                    let p = verts[i];
                    let t = (p - a).dot(b - a) / (len * len);
                    if t <= 1e-9 || t >= 1.0 - 1e-9 {
                        continue;
                    }
                    let off = (b - a).cross(p - a).abs() / len;
                    if off <= 1e-9 * len {
                        out.push((t, i));
                    }
                }
            }
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out.into_iter().map(|(_, i)| i).collect()
    };

    let mut tiling_edges: std::collections::BTreeSet<(usize, usize)> =
        std::collections::BTreeSet::new();
    let mut mesh_tris: Vec<[usize; 3]> = Vec::new();
    let mut provenance: Vec<Option<u32>> = Vec::new();
    let mut finishing_splits = 0usize;
    let mut irregular = 0usize;

    let push_ccw = |tri: [usize; 3], leaf: u32, tris: &mut Vec<[usize; 3]>, prov: &mut Vec<Option<u32>>| {
        let [a, b, c] = tri;
        if signed_area2(verts[a], verts[b], verts[c]) > 0.0 {
            tris.push([a, b, c]);
        } else {
            tris.push([a, c, b]);
        }
        prov.push(Some(leaf));
    };

    for (li, leaf) in leaves.iter().enumerate() {
        let [a, b, c] = *leaf;
        let per_edge = [hangs_on(a, b), hangs_on(a, c), hangs_on(b, c)];
        let ends = [(a, b), (a, c), (b, c)];
        for (hs, (u, v)) in per_edge.iter().zip(ends) {
            let mut prev = u;
            for &h in hs {
                tiling_edges.insert((prev.min(h), prev.max(h)));
                prev = h;
            }
            tiling_edges.insert((prev.min(v), prev.max(v)));
        }
        let total: usize = per_edge.iter().map(|h| h.len()).sum();
        if total == 0 {
            push_ccw([a, b, c], li as u32, &mut mesh_tris, &mut provenance);
            continue;
        }
        // single hanging node at the midpoint of the medium edge (A-C):
        // join the medium vertex B to it
        let medium = &per_edge[1];
        if total == 1 && medium.len() == 1 {
            let m = medium[0];
            let mid = verts[a].lerp(verts[c], 0.5);
            if verts[m].dist(mid) <= 1e-6 * verts[a].dist(verts[c]) {
                finishing_splits += 1;
                push_ccw([a, b, m], li as u32, &mut mesh_tris, &mut provenance);
                push_ccw([m, b, c], li as u32, &mut mesh_tris, &mut provenance);
                continue;
            }
        }
        // unexpected pattern: local Delaunay over the full chain
        irregular += 1;
        let mut chain: Vec<usize> = Vec::new();
        chain.push(a);
        chain.extend(per_edge[0].iter());
        chain.push(b);
        let mut bc = per_edge[2].clone();
        bc.reverse();
        chain.extend(bc); // b -> c
        chain.push(c);
        let mut ca = per_edge[1].clone();
        ca.reverse();
        chain.extend(ca); // c -> a
        let pts: Vec<Point> = chain.iter().map(|&i| verts[i]).collect();
        if let Ok(local) = super::triangulate_leaf(&pts) {
            for t in local {
                push_ccw(
                    [chain[t[0]], chain[t[1]], chain[t[2]]],
                    li as u32,
                    &mut mesh_tris,
                    &mut provenance,
                );
            }
        }
    }

    let mesh = SimplicialMesh { nodes: verts.clone(), triangles: mesh_tris, provenance };
    ClassicBuild {
        verts,
        leaves,
        tiling_edges: tiling_edges.into_iter().collect(),
        mesh,
        finishing_splits,
        irregular_leaves: irregular,
    }
}
