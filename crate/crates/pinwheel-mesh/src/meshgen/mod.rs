//! Tiling-to-mesh conversion.
//!
//! After refinement the tiling carries hanging nodes. Conversion runs in
//! four stages:
//!
//! 1. big-edge computation: for every tile edge, the maximal ancestor edge
//!    containing it, determined from the parent in constant time;
//! 2. side assignment: each big edge gets a staying and a moving side
//!    (domain-boundary edges keep their interior staying; edges playing
//!    the CF role have the side facing role vertex B moving; everything
//!    else stays on the side of the smaller adjacent tile id), and the
//!    staying-side nodes of each big edge are sorted by edge parameter;
//! 3. collapse-node passes: walking tiles coarsest-first, each split
//!    vertex D, E, F on the moving side of its big edge is displaced onto
//!    the nearest staying-side node within tolerance, and the induced
//!    affine maps are applied to the affected sub-triangles, transforming
//!    every descendant vertex while preserving collinearity along the
//!    figure's segments;
//! 4. per-leaf Delaunay triangulation of the distorted leaves with their
//!    surviving hanging nodes, assembled into one conforming mesh.

pub mod classic;
pub mod delaunay;

use crate::forest::{
    BuildOptions, CoarseMesh, Forest, ForestError, RefineStats, TileId, VertexId,
};
use crate::geom::{
    affine_fixing_two, signed_area2, AffineMap2, GeomError, Point,
};
use crate::mesh::{MeshError, SimplicialMesh};
use delaunay::TriangulateError;
use std::collections::{BTreeMap, HashSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshgenError {
    #[error("big edges requested before refinement")]
    BeforeRefinement,
    #[error("sides not assigned yet")]
    SidesUnassigned,
    #[error("delta_property1_violation: moving vertex {moving} on big edge {edge} has two staying candidates within delta")]
    DeltaProperty1 { edge: u32, moving: VertexId },
    #[error("delta_property2_violation: staying vertex {target} is the target of two collapses")]
    DeltaProperty2 { target: VertexId },
    #[error("hanging node {vertex} lies off the edge of leaf {leaf} beyond tolerance")]
    HangingOffEdge { leaf: TileId, vertex: VertexId },
    #[error("leaf {0} triangulation failed: {1}")]
    LeafTriangulation(TileId, TriangulateError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// How big-edge identity was inherited; only `Cf` carries a side
/// stipulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BigEdgeKind {
    /// Root edge on the domain boundary.
    Boundary,
    /// Root edge shared by two root tiles.
    CoarseInterior,
    /// The C-F segment of a split (hosts the hanging node G).
    Cf,
    /// The D-E segment (between children I and II).
    De,
    /// The F-D segment (between children II and III).
    Df,
    /// The D-G segment (between children III and IV).
    Dg,
}

#[derive(Debug, Clone)]
pub struct BigEdge {
    pub e0: VertexId,
    pub e1: VertexId,
    pub kind: BigEdgeKind,
    /// (tile, corner off the edge) pairs known at creation, one per side.
    adj: Vec<(TileId, VertexId)>,
    /// For `Cf` edges: the splitting tile's (A, B) corners; the A side
    /// stays, the B side moves.
    cf_witness: Option<(VertexId, VertexId)>,
    /// Sign of `orient2d(e0, e1, x)` for points x on the staying side;
    /// 0 until sides are assigned.
    pub staying_sign: i8,
}

/// A vertex recorded on a big edge with the side its creating subtree
/// occupies.
#[derive(Debug, Clone, Copy)]
pub struct OnEdgeNode {
    pub v: VertexId,
    pub side: i8,
}

/// Big edges plus the tile-edge-to-big-edge map and per-edge node lists.
#[derive(Debug, Clone)]
pub struct BigEdgeTable {
    pub edges: Vec<BigEdge>,
    /// Per tile: big edge id of the role edges [A-B, A-C, B-C].
    tile_edges: Vec<[u32; 3]>,
    /// Per big edge: nodes created on it during refinement.
    on_edge: Vec<Vec<OnEdgeNode>>,
    /// Per big edge: staying-side nodes sorted by edge parameter.
    staying: Vec<Vec<VertexId>>,
    /// Per vertex: (big edge it lies on, side), or `NO_EDGE`.
    vertex_home: Vec<(u32, i8)>,
    assigned: bool,
}

const NO_EDGE: u32 = u32::MAX;

impl BigEdgeTable {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Big edge ids of a tile's role edges [A-B, A-C, B-C].
    pub fn tile_edges(&self, t: TileId) -> [u32; 3] {
        self.tile_edges[t as usize]
    }

    /// Home big edge and side of a created vertex.
    pub fn vertex_home(&self, v: VertexId) -> Option<(u32, i8)> {
        let (e, s) = self.vertex_home[v as usize];
        (e != NO_EDGE).then_some((e, s))
    }

    pub fn staying_nodes(&self, edge: u32) -> &[VertexId] {
        &self.staying[edge as usize]
    }

    pub fn nodes_on(&self, edge: u32) -> &[OnEdgeNode] {
        &self.on_edge[edge as usize]
    }

    /// Edge parameter of `p` along the edge's current geometry.
    pub fn param(&self, forest: &Forest, edge: u32, p: Point) -> f64 {
        let e = &self.edges[edge as usize];
        let a = forest.verts.pos(e.e0);
        let b = forest.verts.pos(e.e1);
        let d = b - a;
        (p - a).dot(d) / d.dot(d)
    }
}

fn orient_sign(a: Point, b: Point, c: Point) -> i8 {
    let s = crate::geom::orient2d(a, b, c);
    if s > 0.0 {
        1
    } else if s < 0.0 {
        -1
    } else {
        0
    }
}

/// Determines the big edge of every tile edge, coarsest-first: root edges
/// are their own big edges; child edges inherit from the parent except the
/// four fresh interior segments CF, FD, DE, DG. Also records every created
/// vertex on its host big edge.
pub fn compute_big_edges(forest: &Forest) -> Result<BigEdgeTable, MeshgenError> {
    if !forest.is_refined() {
        return Err(MeshgenError::BeforeRefinement);
    }
    let nt = forest.tiles().len();
    let mut table = BigEdgeTable {
        edges: Vec::new(),
        tile_edges: vec![[NO_EDGE; 3]; nt],
        on_edge: Vec::new(),
        staying: Vec::new(),
        vertex_home: vec![(NO_EDGE, 0); forest.verts.len()],
        assigned: false,
    };

    // root edges, unified across adjacent roots by vertex pair
    let mut root_map: BTreeMap<(VertexId, VertexId), u32> = BTreeMap::new();
    for &r in forest.roots() {
        let t = forest.tile(r);
        // role edge slots [A-B, A-C, B-C] with the off-edge corner
        let slots = [(0usize, 1usize, 2usize), (0, 2, 1), (1, 2, 0)];
        for (slot, (i, j, opp)) in slots.into_iter().enumerate() {
            let (u, v) = (t.corners[i], t.corners[j]);
            let key = (u.min(v), u.max(v));
            let eid = *root_map.entry(key).or_insert_with(|| {
                let id = table.edges.len() as u32;
                table.edges.push(BigEdge {
                    e0: key.0,
                    e1: key.1,
                    kind: BigEdgeKind::Boundary,
                    adj: Vec::new(),
                    cf_witness: None,
                    staying_sign: 0,
                });
                table.on_edge.push(Vec::new());
                id
            });
            table.edges[eid as usize].adj.push((r, t.corners[opp]));
            table.tile_edges[r as usize][slot] = eid;
        }
    }
    for e in table.edges.iter_mut() {
        if e.adj.len() == 2 {
            e.kind = BigEdgeKind::CoarseInterior;
        }
    }

    // children inherit; ascending id order guarantees parents come first
    for id in 0..nt as TileId {
        let tile = forest.tile(id);
        let (Some(ch), Some(sv)) = (tile.children, tile.split) else {
            continue;
        };
        let [ab, ac, bc] = table.tile_edges[id as usize];
        debug_assert!(ab != NO_EDGE && ac != NO_EDGE && bc != NO_EDGE);
        let [a, b, c] = tile.corners;
        let push = |e0: VertexId,
                        e1: VertexId,
                        kind: BigEdgeKind,
                        adj: Vec<(TileId, VertexId)>,
                        cf_witness: Option<(VertexId, VertexId)>,
                        table: &mut BigEdgeTable| {
            let id = table.edges.len() as u32;
            table.edges.push(BigEdge { e0, e1, kind, adj, cf_witness, staying_sign: 0 });
            table.on_edge.push(Vec::new());
            id
        };
        let cf = push(c, sv.f, BigEdgeKind::Cf, Vec::new(), Some((a, b)), &mut table);
        let fd = push(
            sv.f,
            sv.d,
            BigEdgeKind::Df,
            vec![(ch[1], sv.e), (ch[2], sv.g)],
            None,
            &mut table,
        );
        let de = push(
            sv.d,
            sv.e,
            BigEdgeKind::De,
            vec![(ch[0], a), (ch[1], sv.f)],
            None,
            &mut table,
        );
        let dg = push(
            sv.d,
            sv.g,
            BigEdgeKind::Dg,
            vec![(ch[2], sv.f), (ch[3], c)],
            None,
            &mut table,
        );
        table.tile_edges[ch[0] as usize] = [ac, ab, de]; // I
        table.tile_edges[ch[1] as usize] = [fd, ab, de]; // II
        table.tile_edges[ch[2] as usize] = [fd, dg, cf]; // III
        table.tile_edges[ch[3] as usize] = [ac, dg, cf]; // IV
        table.tile_edges[ch[4] as usize] = [bc, cf, ab]; // V

        // record created vertices on their host big edges
        let record = |vid: VertexId, eid: u32, witness: VertexId, table: &mut BigEdgeTable| {
            let e = &table.edges[eid as usize];
            let side = orient_sign(
                forest.verts.pos(e.e0),
                forest.verts.pos(e.e1),
                forest.verts.pos(witness),
            );
            table.on_edge[eid as usize].push(OnEdgeNode { v: vid, side });
            table.vertex_home[vid as usize] = (eid, side);
        };
        record(sv.d, ac, b, &mut table);
        record(sv.e, ab, c, &mut table);
        record(sv.f, ab, c, &mut table);
        record(sv.g, cf, a, &mut table);
    }
    Ok(table)
}

/// Assigns moving/staying sides and builds the sorted staying-node lists.
pub fn assign_sides(forest: &Forest, table: &mut BigEdgeTable) {
    for eid in 0..table.edges.len() {
        let e = &table.edges[eid];
        let a = forest.verts.pos(e.e0);
        let b = forest.verts.pos(e.e1);
        let witness = match e.kind {
            BigEdgeKind::Boundary => e.adj[0].1,
            BigEdgeKind::Cf => e.cf_witness.expect("cf edge carries witnesses").0,
            _ => {
                // the side of the smaller adjacent tile id stays
                e.adj
                    .iter()
                    .min_by_key(|(t, _)| *t)
                    .expect("interior edge has adjacency")
                    .1
            }
        };
        table.edges[eid].staying_sign = orient_sign(a, b, forest.verts.pos(witness));
    }
    table.staying = table
        .on_edge
        .iter()
        .enumerate()
        .map(|(eid, nodes)| {
            let sign = table.edges[eid].staying_sign;
            let mut ids: Vec<VertexId> =
                nodes.iter().filter(|n| n.side == sign).map(|n| n.v).collect();
            ids.sort_by(|&x, &y| {
                table
                    .param(forest, eid as u32, forest.verts.pos(x))
                    .total_cmp(&table.param(forest, eid as u32, forest.verts.pos(y)))
                    .then(x.cmp(&y))
            });
            ids
        })
        .collect();
    table.assigned = true;
}

/// Default distortion cap for the dynamic collapse tolerance.
pub const DEFAULT_DYNAMIC_ETA: f64 = 0.05;

/// Collapse tolerance policy.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DeltaPolicy {
    /// Global tolerance: smallest tile minimum altitude over 1460,
    /// measured before any collapse begins.
    #[default]
    Theoretical,
    /// Accept a move only while every induced affine map's singular
    /// values (compounded per tile) stay within `[1 - eta, 1 + eta]`.
    Dynamic { eta: f64 },
}

/// Resolved collapse tolerance.
#[derive(Debug, Clone, Copy)]
pub struct Delta {
    /// Distance tolerance (theoretical mode).
    pub value: Option<f64>,
    /// Distortion cap (dynamic mode).
    pub eta: Option<f64>,
}

/// Computes the collapse tolerance for the forest under `policy`.
pub fn compute_delta(forest: &Forest, policy: DeltaPolicy) -> Result<Delta, MeshgenError> {
    if !forest.is_refined() {
        return Err(MeshgenError::BeforeRefinement);
    }
    Ok(match policy {
        DeltaPolicy::Theoretical => Delta {
            value: Some(forest.global_min_altitude() / 1460.0),
            eta: None,
        },
        DeltaPolicy::Dynamic { eta } => Delta { value: None, eta: Some(eta) },
    })
}

#[derive(Debug, Clone, Default)]
pub struct CollapseStats {
    /// Direct displacements performed.
    pub direct: usize,
    /// Candidate moves rejected by the dynamic distortion cap.
    pub rejected: usize,
}

enum MoveKind {
    D,
    E,
    F,
}

/// Runs all collapse-node operations in deterministic coarsest-first
/// order. Returns the number of direct displacements.
pub fn collapse_pass(
    forest: &mut Forest,
    table: &BigEdgeTable,
    delta: &Delta,
) -> Result<CollapseStats, MeshgenError> {
    if !table.assigned {
        return Err(MeshgenError::SidesUnassigned);
    }
    let mut stats = CollapseStats::default();
    let mut collapsed_targets: HashSet<VertexId> = HashSet::new();
    // per-tile accumulated distortion bracket (dynamic-mode compounding)
    let mut acc: Vec<(f64, f64)> = vec![(1.0, 1.0); forest.tiles().len()];

    for id in forest.tiles_coarsest_first() {
        let (corners, children, split) = {
            let t = forest.tile(id);
            (t.corners, t.children, t.split)
        };
        let (Some(ch), Some(sv)) = (children, split) else {
            continue;
        };
        for kind in [MoveKind::D, MoveKind::E, MoveKind::F] {
            let vid = match kind {
                MoveKind::D => sv.d,
                MoveKind::E => sv.e,
                MoveKind::F => sv.f,
            };
            let (eid, side) = table.vertex_home[vid as usize];
            debug_assert!(eid != NO_EDGE);
            let edge = &table.edges[eid as usize];
            if side == edge.staying_sign {
                continue;
            }
            let stay = &table.staying[eid as usize];
            if stay.is_empty() {
                continue;
            }
            let vpos = forest.verts.pos(vid);
            let pv = table.param(forest, eid, vpos);
            let k = stay.partition_point(|&s| {
                table.param(forest, eid, forest.verts.pos(s)) < pv
            });
            let mut cands: Vec<(f64, VertexId)> = Vec::with_capacity(2);
            if k > 0 {
                let s = stay[k - 1];
                cands.push((vpos.dist(forest.verts.pos(s)), s));
            }
            if k < stay.len() {
                let s = stay[k];
                cands.push((vpos.dist(forest.verts.pos(s)), s));
            }
            cands.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

            let target = match (delta.value, delta.eta) {
                (Some(d), _) => {
                    let within: Vec<_> = cands.iter().filter(|(dist, _)| *dist <= d).collect();
                    match within.len() {
                        0 => continue,
                        1 => within[0].1,
                        _ => {
                            return Err(MeshgenError::DeltaProperty1 { edge: eid, moving: vid })
                        }
                    }
                }
                (None, Some(_)) => cands[0].1,
                _ => continue,
            };
            let target = forest.verts.resolve(target);
            if collapsed_targets.contains(&target) {
                if delta.value.is_some() {
                    return Err(MeshgenError::DeltaProperty2 { target });
                }
                stats.rejected += 1;
                continue;
            }

            // induced affine maps and the sub-regions they act on
            let pa = forest.verts.pos(corners[0]);
            let pb = forest.verts.pos(corners[1]);
            let pc = forest.verts.pos(corners[2]);
            let dp = forest.verts.pos(sv.d);
            let ep = forest.verts.pos(sv.e);
            let fp = forest.verts.pos(sv.f);
            let tp = forest.verts.pos(target);
            let regions: Vec<(AffineMap2, Vec<TileId>)> = match kind {
                MoveKind::D => vec![
                    (affine_fixing_two(pa, fp, dp, tp)?, vec![ch[0], ch[1]]),
                    (affine_fixing_two(pc, fp, dp, tp)?, vec![ch[2], ch[3]]),
                ],
                MoveKind::E => vec![
                    (affine_fixing_two(pa, dp, ep, tp)?, vec![ch[0]]),
                    (affine_fixing_two(dp, fp, ep, tp)?, vec![ch[1]]),
                ],
                MoveKind::F => vec![
                    (affine_fixing_two(dp, ep, fp, tp)?, vec![ch[1]]),
                    (affine_fixing_two(pc, dp, fp, tp)?, vec![ch[2], ch[3]]),
                    (affine_fixing_two(pb, pc, fp, tp)?, vec![ch[4]]),
                ],
            };

            // dynamic acceptance: compounded singular values stay in band
            if let Some(eta) = delta.eta {
                let mut ok = true;
                'check: for (map, tops) in &regions {
                    let (smin, smax) = map.singular_values();
                    for &top in tops {
                        let mut stack = vec![top];
                        while let Some(t) = stack.pop() {
                            let (lo, hi) = acc[t as usize];
                            if lo * smin < 1.0 - eta || hi * smax > 1.0 + eta {
                                ok = false;
                                break 'check;
                            }
                            if let Some(kids) = forest.tile(t).children {
                                stack.extend(kids);
                            }
                        }
                    }
                }
                if !ok {
                    stats.rejected += 1;
                    continue;
                }
            }

            let mut exclude: HashSet<VertexId> = HashSet::new();
            for &cid in &corners {
                exclude.insert(forest.verts.resolve(cid));
            }
            for v in [sv.d, sv.e, sv.f] {
                exclude.insert(forest.verts.resolve(v));
            }
            exclude.insert(target);

            let mut done: HashSet<VertexId> = HashSet::new();
            for (map, tops) in &regions {
                let (smin, smax) = map.singular_values();
                // gather the region's vertex set: top corners plus every
                // split vertex below
                let mut verts_in: Vec<VertexId> = Vec::new();
                let mut stack: Vec<TileId> = tops.clone();
                for &top in tops {
                    for &cid in &forest.tile(top).corners {
                        verts_in.push(forest.verts.resolve(cid));
                    }
                }
                while let Some(t) = stack.pop() {
                    let (lo, hi) = acc[t as usize];
                    acc[t as usize] = (lo * smin, hi * smax);
                    if let Some(svk) = forest.tile(t).split {
                        for v in [svk.d, svk.e, svk.f, svk.g] {
                            verts_in.push(forest.verts.resolve(v));
                        }
                    }
                    if let Some(kids) = forest.tile(t).children {
                        stack.extend(kids);
                    }
                }
                for w in verts_in {
                    if exclude.contains(&w) || !done.insert(w) {
                        continue;
                    }
                    let p = forest.verts.pos(w);
                    forest.verts.set_pos(w, map.apply(p));
                }
            }
            forest.verts.merge(vid, target);
            collapsed_targets.insert(target);
            stats.direct += 1;
        }
    }
    Ok(stats)
}

/// Boundary chain of a leaf: corner ids and the surviving hanging nodes
/// along each edge, counterclockwise.
fn leaf_chain(
    forest: &Forest,
    table: &BigEdgeTable,
    sorted_on_edge: &[Vec<(f64, VertexId)>],
    leaf: TileId,
) -> Result<Vec<VertexId>, MeshgenError> {
    let tile = forest.tile(leaf);
    let corners: Vec<VertexId> = tile
        .corners
        .iter()
        .map(|&c| forest.verts.resolve(c))
        .collect();
    let [ab, ac, bc] = table.tile_edges[leaf as usize];
    // perimeter: A -> B (edge ab), B -> C (edge bc), C -> A (edge ac)
    let walk = [
        (corners[0], corners[1], ab),
        (corners[1], corners[2], bc),
        (corners[2], corners[0], ac),
    ];
    let mut chain: Vec<VertexId> = Vec::new();
    for (u, v, eid) in walk {
        chain.push(u);
        let upos = forest.verts.pos(u);
        let vpos = forest.verts.pos(v);
        let (tu, tv) = (
            table.param(forest, eid, upos),
            table.param(forest, eid, vpos),
        );
        let (lo, hi) = (tu.min(tv), tu.max(tv));
        let span = hi - lo;
        let nodes = &sorted_on_edge[eid as usize];
        let from = nodes.partition_point(|&(t, _)| t <= lo + 1e-12 * span);
        let mut picked: Vec<(f64, VertexId)> = Vec::new();
        for &(t, w) in &nodes[from..] {
            if t >= hi - 1e-12 * span {
                break;
            }
            if corners.contains(&w) {
                continue;
            }
            if picked.last().is_some_and(|&(_, prev)| prev == w) {
                continue;
            }
            // off-line guard: the collapse machinery must have kept the
            // node collinear with the (possibly distorted) edge
            let p = forest.verts.pos(w);
            let evec = vpos - upos;
            let off = evec.cross(p - upos).abs() / evec.norm();
            if off > 1e-9 * evec.norm() {
                return Err(MeshgenError::HangingOffEdge { leaf, vertex: w });
            }
            picked.push((t, w));
        }
        // duplicate-position safety (uncollapsed coincidences)
        picked.dedup_by(|a, b| {
            let pa = forest.verts.pos(a.1);
            let pb = forest.verts.pos(b.1);
            pa.x.to_bits() == pb.x.to_bits() && pa.y.to_bits() == pb.y.to_bits()
        });
        if tu > tv {
            picked.reverse();
        }
        chain.extend(picked.into_iter().map(|(_, w)| w));
    }
    // counterclockwise for the triangulator
    let [pa, pb, pc] = forest.corner_points(leaf);
    if signed_area2(pa, pb, pc) < 0.0 {
        chain.reverse();
    }
    Ok(chain)
}

/// Delaunay triangulation of one leaf boundary chain (positions in
/// counterclockwise order, hanging nodes included). Returns local index
/// triples; vertex set is exactly the input (no Steiner points).
pub fn triangulate_leaf(points: &[Point]) -> Result<Vec<[usize; 3]>, TriangulateError> {
    let mut tris = delaunay::ear_clip(points)?;
    delaunay::lawson_flips(points, &mut tris);
    delaunay::canonicalize_cocircular(points, &mut tris);
    Ok(tris)
}

/// Boundary chains (corners plus surviving hanging nodes, in
/// counterclockwise order) of every leaf.
pub fn leaf_boundary_chains(
    forest: &Forest,
    table: &BigEdgeTable,
) -> Result<Vec<(TileId, Vec<VertexId>)>, MeshgenError> {
    if !table.assigned {
        return Err(MeshgenError::SidesUnassigned);
    }
    // per-edge nodes sorted by final edge parameter (dedup by resolved id)
    let mut sorted_on_edge: Vec<Vec<(f64, VertexId)>> = Vec::with_capacity(table.edges.len());
    for eid in 0..table.edges.len() as u32 {
        let mut v: Vec<(f64, VertexId)> = table.on_edge[eid as usize]
            .iter()
            .map(|n| forest.verts.resolve(n.v))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .map(|w| (table.param(forest, eid, forest.verts.pos(w)), w))
            .collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        sorted_on_edge.push(v);
    }
    forest
        .leaves()
        .into_iter()
        .map(|leaf| Ok((leaf, leaf_chain(forest, table, &sorted_on_edge, leaf)?)))
        .collect()
}

/// Triangulates every leaf and assembles the conforming mesh. The
/// per-leaf Delaunay runs are independent and execute in parallel; the
/// merge is deterministic (leaf id order).
pub fn assemble_mesh(forest: &Forest, table: &BigEdgeTable) -> Result<SimplicialMesh, MeshgenError> {
    use rayon::prelude::*;
    let chains = leaf_boundary_chains(forest, table)?;
    let leaf_tris: Vec<(TileId, Vec<[VertexId; 3]>)> = chains
        .into_par_iter()
        .map(|(leaf, chain)| {
            let pts: Vec<Point> = chain.iter().map(|&w| forest.verts.pos(w)).collect();
            let local = triangulate_leaf(&pts)
                .map_err(|e| MeshgenError::LeafTriangulation(leaf, e))?;
            Ok((
                leaf,
                local
                    .iter()
                    .map(|t| [chain[t[0]], chain[t[1]], chain[t[2]]])
                    .collect::<Vec<_>>(),
            ))
        })
        .collect::<Result<_, MeshgenError>>()?;
    let mut used: std::collections::BTreeSet<VertexId> = std::collections::BTreeSet::new();
    for (_, tris) in &leaf_tris {
        for t in tris {
            used.extend(t.iter().copied());
        }
    }
    let index: BTreeMap<VertexId, usize> =
        used.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let nodes: Vec<Point> = used.iter().map(|&v| forest.verts.pos(v)).collect();
    let mut triangles = Vec::new();
    let mut provenance = Vec::new();
    for (leaf, tris) in leaf_tris {
        for t in tris {
            triangles.push([index[&t[0]], index[&t[1]], index[&t[2]]]);
            provenance.push(Some(leaf));
        }
    }
    Ok(SimplicialMesh { nodes, triangles, provenance })
}

/// Per-leaf quality snapshot taken before the collapse passes.
#[derive(Debug, Clone, Copy)]
pub struct LeafQuality {
    pub tile: TileId,
    pub aspect: f64,
    pub min_altitude: f64,
}

/// Options for the full pipeline.
#[derive(Debug, Clone, Copy, Default)]
pub struct GenerateOptions {
    pub delta: DeltaPolicy,
    pub build: BuildOptions,
}

/// Everything the pipeline produced, kept for inspection and tests.
#[derive(Debug)]
pub struct PipelineResult {
    pub mesh: SimplicialMesh,
    pub forest: Forest,
    pub bigedges: BigEdgeTable,
    pub delta: Delta,
    pub refine: RefineStats,
    pub collapse: CollapseStats,
    pub pre_collapse: Vec<LeafQuality>,
}

/// Runs the whole pipeline: root construction, refinement, big edges,
/// side assignment, collapse passes, per-leaf Delaunay and assembly.
pub fn generate_mesh(
    coarse: &CoarseMesh,
    h_target: f64,
    opts: &GenerateOptions,
) -> Result<PipelineResult, MeshgenError> {
    let mut forest = Forest::build_root_tiles(coarse, &opts.build)?;
    let refine = forest.refine(h_target)?;
    let mut table = compute_big_edges(&forest)?;
    assign_sides(&forest, &mut table);
    let delta = compute_delta(&forest, opts.delta)?;
    let pre_collapse: Vec<LeafQuality> = forest
        .leaves()
        .into_iter()
        .map(|l| {
            let t = forest.triangle(l).expect("leaf degenerate");
            LeafQuality { tile: l, aspect: t.aspect_ratio(), min_altitude: t.min_altitude() }
        })
        .collect();
    let collapse = collapse_pass(&mut forest, &table, &delta)?;
    let mesh = assemble_mesh(&forest, &table)?;
    Ok(PipelineResult { mesh, forest, bigedges: table, delta, refine, collapse, pre_collapse })
}
