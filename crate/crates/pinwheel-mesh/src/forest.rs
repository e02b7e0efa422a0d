//! The tile hierarchy: coarse-mesh ingestion, root-tile preparation and
//! heap-driven refinement.
//!
//! Root tiles come from a conforming coarse triangulation. Near-equilateral
//! triangles (angle spread under 0.4 rad) are split once about their
//! in-center; when the rational-angle guard is enabled, triangles whose
//! smallest angle sits too close to a small rational multiple of pi are
//! split about a seeded perturbed interior point instead, retrying until
//! all three children pass the guard.
//!
//! Refinement pops the leaf with the largest minimum altitude off a
//! max-heap and replaces it with its five pinwheel children until every
//! leaf is below the size target. Ties are broken toward the smaller tile
//! id for reproducibility.
//!
//! Vertices live in a shared table referenced by id, so a later
//! collapse-node displacement updates every incident tile at once.

use crate::geom::{GeomError, Point, Polygon, Triangle};
use crate::mesh::{parse_node_ele, MeshError};
use crate::pinwheel::{
    self, needs_tripartition, pinwheel_split, AngleClass, ChildRole, ClassKind, PinwheelError,
    RationalCheck,
};
use rand::SeedableRng;
use std::collections::HashMap;
use thiserror::Error;

pub type VertexId = u32;
pub type TileId = u32;

#[derive(Debug, Error)]
pub enum ForestError {
    #[error("non-conforming coarse mesh at edge {0}-{1}: {2}")]
    NonConforming(usize, usize, String),
    #[error("degenerate coarse triangle {0}")]
    DegenerateInput(usize),
    #[error("coarse triangle {0} is not counterclockwise")]
    NotCounterclockwise(usize),
    #[error("h_target must be positive")]
    BadTarget,
    #[error("refinement_too_deep: h_target {0:e} is below 1e-9 x domain diameter {1:e}")]
    RefinementTooDeep(f64, f64),
    #[error("no tripartition point of coarse triangle {0} passes the rational-angle guard")]
    GuardExhausted(usize),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Pinwheel(#[from] PinwheelError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// A conforming coarse triangulation (the refinement input).
#[derive(Debug, Clone)]
pub struct CoarseMesh {
    pub nodes: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
}

impl CoarseMesh {
    pub fn new(nodes: Vec<Point>, triangles: Vec<[usize; 3]>) -> Self {
        CoarseMesh { nodes, triangles }
    }

    /// Parses the `N M` / nodes / triangles text format.
    pub fn parse(text: &str) -> Result<Self, ForestError> {
        let (nodes, triangles) = parse_node_ele(text)?;
        Ok(CoarseMesh { nodes, triangles })
    }

    /// Built-in fallback triangulator for simple polygons (ear clipping
    /// followed by Delaunay edge flips). Does not guarantee bounded aspect
    /// ratio.
    pub fn from_polygon(poly: &Polygon) -> Result<Self, ForestError> {
        let pts = poly.vertices().to_vec();
        let mut tris = crate::meshgen::delaunay::ear_clip(&pts)
            .map_err(|_| ForestError::DegenerateInput(0))?;
        crate::meshgen::delaunay::lawson_flips(&pts, &mut tris);
        Ok(CoarseMesh { nodes: pts, triangles: tris })
    }

    pub fn diameter(&self) -> f64 {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.nodes {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (hi - lo).norm()
    }

    /// Conformity validation: indices in range, counterclockwise and
    /// nondegenerate triangles, every edge shared by at most two triangles
    /// in opposite directions, and no node lying in the interior of
    /// another triangle's edge (hanging node).
    pub fn validate(&self) -> Result<(), ForestError> {
        let n = self.nodes.len();
        let mut edges: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for (i, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= n) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(ForestError::DegenerateInput(i));
            }
            let tri = Triangle::new(self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]])
                .map_err(|_| ForestError::DegenerateInput(i))?;
            if crate::geom::signed_area2(self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]])
                <= 0.0
            {
                return Err(ForestError::NotCounterclockwise(i));
            }
            let _ = tri;
            for k in 0..3 {
                let (u, v) = (t[k], t[(k + 1) % 3]);
                let key = (u.min(v), u.max(v));
                let e = edges.entry(key).or_insert((0, 0));
                if u < v {
                    e.0 += 1;
                } else {
                    e.1 += 1;
                }
            }
        }
        for (&(u, v), &(fwd, rev)) in &edges {
            if fwd + rev > 2 {
                return Err(ForestError::NonConforming(
                    u,
                    v,
                    format!("incident to {} triangles", fwd + rev),
                ));
            }
            if fwd + rev == 2 && (fwd != 1 || rev != 1) {
                return Err(ForestError::NonConforming(
                    u,
                    v,
                    "traversed twice in the same direction".into(),
                ));
            }
        }
        for (p_idx, p) in self.nodes.iter().enumerate() {
            for &(u, v) in edges.keys() {
                if p_idx == u || p_idx == v {
                    continue;
                }
                let (a, b) = (self.nodes[u], self.nodes[v]);
                let len = a.dist(b);
                let along = (*p - a).dot(b - a) / (len * len);
                if along <= 1e-12 || along >= 1.0 - 1e-12 {
                    continue;
                }
                let off = (b - a).cross(*p - a).abs() / len;
                if off < 1e-12 * len {
                    return Err(ForestError::NonConforming(
                        u,
                        v,
                        format!("node {p_idx} hangs on this edge"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Rational-angle guard parameters.
#[derive(Debug, Clone, Copy)]
pub struct GuardOptions {
    pub max_denominator: u32,
    pub tol: f64,
}

impl Default for GuardOptions {
    fn default() -> Self {
        GuardOptions { max_denominator: 20, tol: 5e-3 }
    }
}

/// Root-tile construction options.
#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    pub rational_guard: Option<GuardOptions>,
    pub seed: u64,
}

/// Where a tile came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TileRole {
    /// A coarse triangle taken as-is.
    Root,
    /// A root produced by tripartition of a coarse triangle.
    Tripart,
    /// A pinwheel child.
    Child(ChildRole),
}

/// Vertex ids created by a pinwheel split: `d` on the parent's A-C edge,
/// `e` and `f` on A-B, `g` on the new interior C-F segment.
#[derive(Debug, Clone, Copy)]
pub struct SplitVertices {
    pub d: VertexId,
    pub e: VertexId,
    pub f: VertexId,
    pub g: VertexId,
}

#[derive(Debug, Clone)]
pub struct Tile {
    /// Corner vertex ids in role order (A, B, C).
    pub corners: [VertexId; 3],
    pub cls: AngleClass,
    pub parent: Option<TileId>,
    /// Pinwheel children in role order [I, II, III, IV, V].
    pub children: Option<[TileId; 5]>,
    pub depth: u16,
    pub role: TileRole,
    pub split: Option<SplitVertices>,
}

impl Tile {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

/// Shared vertex store with union-find style aliasing: collapsing a node
/// onto another redirects its id, so every incident tile sees the merge.
#[derive(Debug, Clone, Default)]
pub struct VertexTable {
    pos: Vec<Point>,
    alias: Vec<VertexId>,
}

impl VertexTable {
    pub fn add(&mut self, p: Point) -> VertexId {
        let id = self.pos.len() as VertexId;
        self.pos.push(p);
        self.alias.push(id);
        id
    }

    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    pub fn resolve(&self, mut id: VertexId) -> VertexId {
        while self.alias[id as usize] != id {
            id = self.alias[id as usize];
        }
        id
    }

    pub fn pos(&self, id: VertexId) -> Point {
        self.pos[self.resolve(id) as usize]
    }

    pub fn set_pos(&mut self, id: VertexId, p: Point) {
        let r = self.resolve(id);
        self.pos[r as usize] = p;
    }

    /// Redirects `from` onto `into`.
    pub fn merge(&mut self, from: VertexId, into: VertexId) {
        let r = self.resolve(from);
        let t = self.resolve(into);
        if r != t {
            self.alias[r as usize] = t;
        }
    }

    pub fn is_merged(&self, id: VertexId) -> bool {
        self.alias[id as usize] != id
    }
}

/// Statistics from one refinement run.
#[derive(Debug, Clone, Default)]
pub struct RefineStats {
    pub splits: usize,
    /// Heap key (minimum altitude) of every split, in pop order.
    pub split_keys: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct DepthStats {
    pub min_leaf_depth: u16,
    pub max_leaf_depth: u16,
    pub tile_count: usize,
}

/// The tile hierarchy over a shared vertex table.
#[derive(Debug, Clone)]
pub struct Forest {
    pub verts: VertexTable,
    tiles: Vec<Tile>,
    roots: Vec<TileId>,
    /// Count of coarse triangles that were tripartitioned at build time.
    pub tripartitions: usize,
    refined: bool,
    diameter: f64,
}

impl Forest {
    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn tile(&self, id: TileId) -> &Tile {
        &self.tiles[id as usize]
    }

    pub fn roots(&self) -> &[TileId] {
        &self.roots
    }

    pub fn is_refined(&self) -> bool {
        self.refined
    }

    pub fn domain_diameter(&self) -> f64 {
        self.diameter
    }

    /// Current corner positions of a tile in role order.
    pub fn corner_points(&self, id: TileId) -> [Point; 3] {
        let t = &self.tiles[id as usize];
        [
            self.verts.pos(t.corners[0]),
            self.verts.pos(t.corners[1]),
            self.verts.pos(t.corners[2]),
        ]
    }

    pub fn triangle(&self, id: TileId) -> Result<Triangle, GeomError> {
        let [a, b, c] = self.corner_points(id);
        Triangle::new(a, b, c)
    }

    pub fn min_altitude(&self, id: TileId) -> f64 {
        let [a, b, c] = self.corner_points(id);
        let t = Triangle::new(a, b, c).expect("tile degenerate");
        t.min_altitude()
    }

    /// Leaf tile ids in ascending order.
    pub fn leaves(&self) -> Vec<TileId> {
        (0..self.tiles.len() as TileId)
            .filter(|&i| self.tiles[i as usize].is_leaf())
            .collect()
    }

    pub fn depth_stats(&self) -> DepthStats {
        let mut min_d = u16::MAX;
        let mut max_d = 0u16;
        for t in &self.tiles {
            if t.is_leaf() {
                min_d = min_d.min(t.depth);
                max_d = max_d.max(t.depth);
            }
        }
        DepthStats {
            min_leaf_depth: min_d,
            max_leaf_depth: max_d,
            tile_count: self.tiles.len(),
        }
    }

    /// Smallest minimum altitude over all tiles (attained at a leaf).
    pub fn global_min_altitude(&self) -> f64 {
        (0..self.tiles.len() as TileId)
            .map(|i| self.min_altitude(i))
            .fold(f64::INFINITY, f64::min)
    }

    /// Assigns role order (A, B, C) by ascending angle and returns the
    /// permuted vertex ids plus the class.
    fn role_order(
        nodes: &[Point],
        idx: [usize; 3],
    ) -> Result<([VertexId; 3], AngleClass), ForestError> {
        let tri = [nodes[idx[0]], nodes[idx[1]], nodes[idx[2]]];
        let angles = pinwheel::measured_role_angles(tri);
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| angles[i].total_cmp(&angles[j]).then(idx[i].cmp(&idx[j])));
        let corners = [
            idx[order[0]] as VertexId,
            idx[order[1]] as VertexId,
            idx[order[2]] as VertexId,
        ];
        let cls = AngleClass {
            kind: ClassKind::RootSimilar,
            angles: [angles[order[0]], angles[order[1]], angles[order[2]]],
        };
        Ok((corners, cls))
    }

    /// Builds the root tiles from a validated coarse mesh, applying the
    /// preliminary in-center and rational-angle splits.
    pub fn build_root_tiles(coarse: &CoarseMesh, opts: &BuildOptions) -> Result<Forest, ForestError> {
        coarse.validate()?;
        let mut verts = VertexTable::default();
        for &p in &coarse.nodes {
            verts.add(p);
        }
        let mut tiles: Vec<Tile> = Vec::new();
        let mut roots: Vec<TileId> = Vec::new();
        let mut tripartitions = 0usize;

        let flagged = |angle: f64| -> bool {
            match opts.rational_guard {
                Some(g) => matches!(
                    pinwheel::rational_angle_guard(angle, g.max_denominator, g.tol),
                    RationalCheck::Flagged { .. }
                ),
                None => false,
            }
        };

        for (ci, t) in coarse.triangles.iter().enumerate() {
            let tri = Triangle::new(
                coarse.nodes[t[0]],
                coarse.nodes[t[1]],
                coarse.nodes[t[2]],
            )
            .map_err(|_| ForestError::DegenerateInput(ci))?;
            let (_, cls) = Self::role_order(&coarse.nodes, *t)?;
            let near_equilateral = needs_tripartition(cls.a(), cls.c());
            let parent_flagged = flagged(cls.a());

            if !near_equilateral && !parent_flagged {
                let (corners, cls) = Self::role_order(&coarse.nodes, *t)?;
                roots.push(tiles.len() as TileId);
                tiles.push(Tile {
                    corners,
                    cls,
                    parent: None,
                    children: None,
                    depth: 0,
                    role: TileRole::Root,
                    split: None,
                });
                continue;
            }

            // tripartition, retrying the split point until every child
            // passes the guard (when enabled)
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
                opts.seed ^ (ci as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
            );
            type TripartChildren = [([VertexId; 3], AngleClass); 3];
            let mut chosen: Option<(Point, TripartChildren)> = None;
            for attempt in 0..200 {
                // the exact in-center halves every angle, so it is only a
                // valid choice when the parent is not rational-flagged
                let p = if attempt == 0 && !parent_flagged {
                    tri.in_center()
                } else {
                    pinwheel::perturbed_center(&tri, &mut rng)
                };
                let pid_probe = verts.len() as VertexId; // allocated on success
                let mut kids = Vec::with_capacity(3);
                let mut ok = true;
                for k in 0..3 {
                    let (u, v) = (t[k], t[(k + 1) % 3]);
                    if Triangle::new(coarse.nodes[u], coarse.nodes[v], p).is_err() {
                        ok = false;
                        break;
                    }
                    let corners_pts = [coarse.nodes[u], coarse.nodes[v], p];
                    let angles = pinwheel::measured_role_angles(corners_pts);
                    let mut order = [0usize, 1, 2];
                    order.sort_by(|&i, &j| angles[i].total_cmp(&angles[j]));
                    let ids = [u as VertexId, v as VertexId, pid_probe];
                    let corners = [ids[order[0]], ids[order[1]], ids[order[2]]];
                    let cls = AngleClass {
                        kind: ClassKind::RootSimilar,
                        angles: [angles[order[0]], angles[order[1]], angles[order[2]]],
                    };
                    if opts.rational_guard.is_some() && flagged(cls.a()) {
                        ok = false;
                        break;
                    }
                    kids.push((corners, cls));
                }
                if ok {
                    chosen = Some((p, [kids[0], kids[1], kids[2]]));
                    break;
                }
            }
            let (p, kids) = chosen.ok_or(ForestError::GuardExhausted(ci))?;
            let pid = verts.add(p);
            debug_assert!(kids.iter().all(|(c, _)| c.contains(&pid)));
            tripartitions += 1;
            for (corners, cls) in kids {
                roots.push(tiles.len() as TileId);
                tiles.push(Tile {
                    corners,
                    cls,
                    parent: None,
                    children: None,
                    depth: 0,
                    role: TileRole::Tripart,
                    split: None,
                });
            }
        }

        Ok(Forest {
            verts,
            tiles,
            roots,
            tripartitions,
            refined: false,
            diameter: coarse.diameter(),
        })
    }

    /// Splits leaves in max-min-altitude order until every leaf's minimum
    /// altitude is below `h_target`.
    pub fn refine(&mut self, h_target: f64) -> Result<RefineStats, ForestError> {
        use std::cmp::Ordering;
        use std::collections::BinaryHeap;

        if !(h_target > 0.0) {
            return Err(ForestError::BadTarget);
        }
        if h_target < 1e-9 * self.diameter {
            return Err(ForestError::RefinementTooDeep(h_target, self.diameter));
        }

        #[derive(PartialEq)]
        struct Key {
            minalt: f64,
            id: TileId,
        }
        impl Eq for Key {}
        impl Ord for Key {
            fn cmp(&self, o: &Self) -> Ordering {
                // max-heap on minalt; ties go to the smaller id
                self.minalt
                    .total_cmp(&o.minalt)
                    .then_with(|| o.id.cmp(&self.id))
            }
        }
        impl PartialOrd for Key {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }

        let mut heap: BinaryHeap<Key> = BinaryHeap::new();
        for id in self.leaves() {
            heap.push(Key { minalt: self.min_altitude(id), id });
        }
        let mut stats = RefineStats::default();
        while let Some(top) = heap.peek() {
            if top.minalt < h_target {
                break;
            }
            let Key { minalt, id } = heap.pop().unwrap();
            stats.splits += 1;
            stats.split_keys.push(minalt);
            let corners = self.corner_points(id);
            let cls = self.tiles[id as usize].cls;
            let sub = pinwheel_split(corners, &cls)?;
            let dv = self.verts.add(sub.d);
            let ev = self.verts.add(sub.e);
            let fv = self.verts.add(sub.f);
            let gv = self.verts.add(sub.g);
            let [a, b, c] = self.tiles[id as usize].corners;
            let child_corners: [[VertexId; 3]; 5] = [
                [a, dv, ev],  // I
                [fv, dv, ev], // II
                [dv, fv, gv], // III
                [dv, c, gv],  // IV
                [c, b, fv],   // V
            ];
            let depth = self.tiles[id as usize].depth + 1;
            let mut child_ids = [0 as TileId; 5];
            for (k, ch) in sub.children.iter().enumerate() {
                let cid = self.tiles.len() as TileId;
                child_ids[k] = cid;
                self.tiles.push(Tile {
                    corners: child_corners[k],
                    cls: ch.cls,
                    parent: Some(id),
                    children: None,
                    depth,
                    role: TileRole::Child(ch.role),
                    split: None,
                });
                heap.push(Key { minalt: self.min_altitude(cid), id: cid });
            }
            self.tiles[id as usize].children = Some(child_ids);
            self.tiles[id as usize].split = Some(SplitVertices { d: dv, e: ev, f: fv, g: gv });
        }
        self.refined = true;
        Ok(stats)
    }

    /// Tile ids sorted coarsest-first (by depth, then id).
    pub fn tiles_coarsest_first(&self) -> Vec<TileId> {
        let mut ids: Vec<TileId> = (0..self.tiles.len() as TileId).collect();
        ids.sort_by_key(|&i| (self.tiles[i as usize].depth, i));
        ids
    }
}
