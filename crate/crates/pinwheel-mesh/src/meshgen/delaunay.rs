//! Polygon triangulation and Delaunay flipping with exact predicates.
//!
//! `ear_clip` handles simple polygons including weakly-convex loops with
//! collinear runs (leaf boundaries carrying hanging nodes). `lawson_flips`
//! then flips strictly illegal interior edges until the empty-circumcircle
//! property holds; exactly cocircular quads are never flipped, which
//! guarantees termination, and `canonicalize_cocircular` afterwards picks
//! the lexicographically smallest triangle list among cocircular choices
//! so output is independent of construction order.

use crate::geom::{in_circle, orient2d, Point};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TriangulateError {
    #[error("polygon has fewer than 3 vertices")]
    TooFew,
    #[error("no clippable ear found (polygon not simple?)")]
    NoEar,
}

/// Triangulates a simple polygon given as a vertex loop (either
/// orientation). Returns counterclockwise index triples.
pub fn ear_clip(pts: &[Point]) -> Result<Vec<[usize; 3]>, TriangulateError> {
    let n = pts.len();
    if n < 3 {
        return Err(TriangulateError::TooFew);
    }
    let mut order: Vec<usize> = (0..n).collect();
    let area2: f64 = (0..n)
        .map(|i| pts[i].cross(pts[(i + 1) % n]))
        .sum();
    if area2 < 0.0 {
        order.reverse();
    }
    let mut tris = Vec::with_capacity(n - 2);
    let mut active = order;
    while active.len() > 3 {
        let m = active.len();
        let mut clipped = false;
        for k in 0..m {
            let prev = pts[active[(k + m - 1) % m]];
            let cur = pts[active[k]];
            let next = pts[active[(k + 1) % m]];
            if orient2d(prev, cur, next) <= 0.0 {
                continue; // reflex or flat
            }
            // the closed ear must not contain any other active vertex
            let mut blocked = false;
            for (j, &vj) in active.iter().enumerate() {
                if j == k || j == (k + m - 1) % m || j == (k + 1) % m {
                    continue;
                }
                let p = pts[vj];
                if orient2d(prev, cur, p) >= 0.0
                    && orient2d(cur, next, p) >= 0.0
                    && orient2d(next, prev, p) >= 0.0
                {
                    blocked = true;
                    break;
                }
            }
            if blocked {
                continue;
            }
            tris.push([active[(k + m - 1) % m], active[k], active[(k + 1) % m]]);
            active.remove(k);
            clipped = true;
            break;
        }
        if !clipped {
            return Err(TriangulateError::NoEar);
        }
    }
    if orient2d(pts[active[0]], pts[active[1]], pts[active[2]]) <= 0.0 {
        return Err(TriangulateError::NoEar);
    }
    tris.push([active[0], active[1], active[2]]);
    Ok(tris)
}

/// Undirected edge -> the one or two (triangle index, opposite vertex)
/// pairs incident to it.
type EdgeMap = std::collections::BTreeMap<(usize, usize), Vec<(usize, usize)>>;

fn edge_map(tris: &[[usize; 3]]) -> EdgeMap {
    let mut map = EdgeMap::new();
    for (ti, t) in tris.iter().enumerate() {
        for k in 0..3 {
            let (u, v, w) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
            map.entry((u.min(v), u.max(v))).or_default().push((ti, w));
        }
    }
    map
}

/// Lawson flip pass: flips interior edges whose opposite vertex lies
/// strictly inside the circumcircle, until none remain. Triangles must be
/// counterclockwise. Cocircular (sign zero) quads are left alone.
pub fn lawson_flips(pts: &[Point], tris: &mut [[usize; 3]]) {
    // generous cap; each flip strictly improves the angle vector
    let cap = 4 * tris.len() * tris.len() + 64;
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut flipped_any = false;
        let map = edge_map(&*tris);
        for (&(u, v), inc) in &map {
            if inc.len() != 2 {
                continue;
            }
            let (t1, w1) = inc[0];
            let (t2, w2) = inc[1];
            // skip entries gone stale after an earlier flip this round
            let fresh = |ti: usize, w: usize| {
                tris[ti].contains(&u) && tris[ti].contains(&v) && tris[ti].contains(&w)
            };
            if !fresh(t1, w1) || !fresh(t2, w2) {
                continue;
            }
            // orient (u, v, w1) ccw for the predicate
            let (a, b) = if orient2d(pts[u], pts[v], pts[w1]) > 0.0 {
                (u, v)
            } else {
                (v, u)
            };
            if in_circle(pts[a], pts[b], pts[w1], pts[w2]) <= 0.0 {
                continue;
            }
            // flip validity: the quad must be strictly convex
            if orient2d(pts[w1], pts[w2], pts[a]) >= 0.0
                || orient2d(pts[w1], pts[w2], pts[b]) <= 0.0
            {
                continue;
            }
            tris[t1] = [w1, w2, b];
            tris[t2] = [w2, w1, a];
            ensure_ccw(pts, &mut tris[t1]);
            ensure_ccw(pts, &mut tris[t2]);
            flipped_any = true;
        }
        if !flipped_any || rounds > cap {
            break;
        }
    }
}

fn ensure_ccw(pts: &[Point], t: &mut [usize; 3]) {
    if orient2d(pts[t[0]], pts[t[1]], pts[t[2]]) < 0.0 {
        t.swap(1, 2);
    }
}

fn normalized(mut t: [usize; 3]) -> [usize; 3] {
    t.sort_unstable();
    t
}

/// Among exactly-cocircular quads the Delaunay triangulation is not
/// unique; this pass deterministically picks, per such edge, the diagonal
/// whose two triangles are lexicographically smaller.
pub fn canonicalize_cocircular(pts: &[Point], tris: &mut [[usize; 3]]) {
    for _ in 0..16 {
        let mut changed = false;
        let map = edge_map(&*tris);
        for (&(u, v), inc) in &map {
            if inc.len() != 2 {
                continue;
            }
            let (t1, w1) = inc[0];
            let (t2, w2) = inc[1];
            let fresh = |ti: usize, w: usize| {
                tris[ti].contains(&u) && tris[ti].contains(&v) && tris[ti].contains(&w)
            };
            if !fresh(t1, w1) || !fresh(t2, w2) {
                continue;
            }
            let (a, b) = if orient2d(pts[u], pts[v], pts[w1]) > 0.0 {
                (u, v)
            } else {
                (v, u)
            };
            if in_circle(pts[a], pts[b], pts[w1], pts[w2]) != 0.0 {
                continue;
            }
            if orient2d(pts[w1], pts[w2], pts[a]) >= 0.0
                || orient2d(pts[w1], pts[w2], pts[b]) <= 0.0
            {
                continue;
            }
            let cur = (normalized(tris[t1]).min(normalized(tris[t2])), normalized(tris[t1]).max(normalized(tris[t2])));
            let f1 = normalized([w1, w2, b]);
            let f2 = normalized([w2, w1, a]);
            let flip = (f1.min(f2), f1.max(f2));
            if flip < cur {
                tris[t1] = [w1, w2, b];
                tris[t2] = [w2, w1, a];
                ensure_ccw(pts, &mut tris[t1]);
                ensure_ccw(pts, &mut tris[t2]);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

/// Brute-force empty-circumcircle verification: no vertex lies strictly
/// inside any triangle's circumcircle.
pub fn verify_delaunay_brute(pts: &[Point], tris: &[[usize; 3]]) -> bool {
    for t in tris {
        let (a, b) = if orient2d(pts[t[0]], pts[t[1]], pts[t[2]]) > 0.0 {
            (t[0], t[1])
        } else {
            (t[1], t[0])
        };
        for (vi, v) in pts.iter().enumerate() {
            if t.contains(&vi) {
                continue;
            }
            if in_circle(pts[a], pts[b], pts[t[2]], *v) > 0.0 {
                return false;
            }
        }
    }
    true
}
