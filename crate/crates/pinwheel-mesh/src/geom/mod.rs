//! Planar geometry kernel.
//!
//! Coordinates are `f64`; geometric predicates ([`orient2d`], [`in_circle`])
//! are exact-sign via adaptive-precision evaluation, so downstream stages
//! (side assignment, Delaunay) never see an inconsistent orientation.

mod polygon;
mod predicates;

pub use polygon::{geodesic_distance, Polygon};
pub use predicates::{in_circle, orient2d};

use thiserror::Error;

/// Relative area cutoff below which a triangle counts as degenerate:
/// a triangle is rejected when `area < DEGENERACY_EPS * longest_side^2`.
pub const DEGENERACY_EPS: f64 = 1e-14;

#[derive(Debug, Error, PartialEq)]
pub enum GeomError {
    #[error("degenerate triangle (area below {DEGENERACY_EPS} x longest side squared)")]
    Degenerate,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("collapse_to_segment: moved vertex makes the triangle degenerate")]
    CollapseToSegment,
    #[error("point lies outside the domain polygon")]
    OutsideDomain,
    #[error("polygon is not simple or has fewer than 3 vertices")]
    BadPolygon,
}

/// A point in the plane. Doubles as a 2-vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product, treating both as vectors.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn normalized(self) -> Point {
        let n = self.norm();
        Point::new(self.x / n, self.y / n)
    }

    /// Rotate by `angle` radians counterclockwise about the origin.
    pub fn rotated(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        Point::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

/// Twice the signed area of the triangle `a b c` (positive when
/// counterclockwise). Plain floating evaluation; use [`orient2d`] when only
/// the sign matters near degeneracy.
pub fn signed_area2(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

/// A nondegenerate triangle, normalized to counterclockwise orientation on
/// construction (vertices 1 and 2 are swapped if the input is clockwise).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    v: [Point; 3],
}

impl Triangle {
    pub fn new(v0: Point, v1: Point, v2: Point) -> Result<Self, GeomError> {
        if !(v0.is_finite() && v1.is_finite() && v2.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        let area2 = signed_area2(v0, v1, v2);
        let longest = v0
            .dist(v1)
            .max(v1.dist(v2))
            .max(v2.dist(v0));
        if area2.abs() < 2.0 * DEGENERACY_EPS * longest * longest {
            return Err(GeomError::Degenerate);
        }
        let v = if area2 > 0.0 { [v0, v1, v2] } else { [v0, v2, v1] };
        Ok(Triangle { v })
    }

    pub fn vertices(&self) -> [Point; 3] {
        self.v
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.v[i]
    }

    /// Side lengths indexed opposite their vertex: `side(i) = |v[i+1] v[i+2]|`.
    pub fn side(&self, i: usize) -> f64 {
        self.v[(i + 1) % 3].dist(self.v[(i + 2) % 3])
    }

    pub fn longest_side(&self) -> f64 {
        self.side(0).max(self.side(1)).max(self.side(2))
    }

    pub fn shortest_side(&self) -> f64 {
        self.side(0).min(self.side(1)).min(self.side(2))
    }

    pub fn area(&self) -> f64 {
        0.5 * signed_area2(self.v[0], self.v[1], self.v[2])
    }

    /// Interior angles in radians, indexed by vertex. Computed from edge
    /// vectors with `atan2`, so each lies in (0, pi) and the three sum to pi
    /// up to rounding.
    pub fn angles(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..3 {
            let u = self.v[(i + 1) % 3] - self.v[i];
            let w = self.v[(i + 2) % 3] - self.v[i];
            out[i] = u.cross(w).abs().atan2(u.dot(w));
        }
        out
    }

    /// Smallest of the three altitudes: `2 area / longest side`.
    pub fn min_altitude(&self) -> f64 {
        2.0 * self.area() / self.longest_side()
    }

    /// Longest side squared over area; equivalently twice the longest side
    /// over the minimum altitude.
    pub fn aspect_ratio(&self) -> f64 {
        let l = self.longest_side();
        l * l / self.area()
    }

    /// Center of the inscribed circle, located as the intersection of two
    /// angle bisectors.
    pub fn in_center(&self) -> Point {
        let [a, b, c] = self.v;
        let bis_a = (b - a).normalized() + (c - a).normalized();
        let bis_b = (a - b).normalized() + (c - b).normalized();
        // a + s*bis_a = b + t*bis_b
        let rhs = b - a;
        let det = bis_a.cross(bis_b.scale(-1.0));
        let s = rhs.cross(bis_b.scale(-1.0)) / det;
        a + bis_a.scale(s)
    }

    pub fn in_radius(&self) -> f64 {
        2.0 * self.area() / (self.side(0) + self.side(1) + self.side(2))
    }

    pub fn centroid(&self) -> Point {
        Point::new(
            (self.v[0].x + self.v[1].x + self.v[2].x) / 3.0,
            (self.v[0].y + self.v[1].y + self.v[2].y) / 3.0,
        )
    }

    /// Distance from `p` to the side opposite vertex `i`.
    pub fn dist_to_side(&self, i: usize, p: Point) -> f64 {
        let a = self.v[(i + 1) % 3];
        let b = self.v[(i + 2) % 3];
        ((b - a).cross(p - a) / a.dist(b)).abs()
    }

    pub fn contains(&self, p: Point) -> bool {
        let [a, b, c] = self.v;
        orient2d(a, b, p) >= 0.0 && orient2d(b, c, p) >= 0.0 && orient2d(c, a, p) >= 0.0
    }
}

/// An affine map `x -> L x + t` of the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap2 {
    /// Row-major 2x2 linear part.
    pub linear: [[f64; 2]; 2],
    pub translation: [f64; 2],
}

impl AffineMap2 {
    pub fn identity() -> Self {
        AffineMap2 {
            linear: [[1.0, 0.0], [0.0, 1.0]],
            translation: [0.0, 0.0],
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        Point::new(
            self.linear[0][0] * p.x + self.linear[0][1] * p.y + self.translation[0],
            self.linear[1][0] * p.x + self.linear[1][1] * p.y + self.translation[1],
        )
    }

    pub fn det(&self) -> f64 {
        self.linear[0][0] * self.linear[1][1] - self.linear[0][1] * self.linear[1][0]
    }

    /// Singular values of the linear part as `(sigma_min, sigma_max)`,
    /// by the closed form for 2x2 matrices.
    pub fn singular_values(&self) -> (f64, f64) {
        let [[a, b], [c, d]] = self.linear;
        let e = (a + d) * 0.5;
        let f = (a - d) * 0.5;
        let g = (c + b) * 0.5;
        let h = (c - b) * 0.5;
        let q = e.hypot(h);
        let r = f.hypot(g);
        ((q - r).abs(), q + r)
    }
}

/// Minimum and maximum singular values of the linear part of `m`.
pub fn distortion_bounds(m: &AffineMap2) -> (f64, f64) {
    m.singular_values()
}

/// The unique affine map fixing `p` and `q` pointwise and carrying `from`
/// to `to`. Errors if `(p, q, to)` is degenerate (the image collapses onto
/// the segment).
pub fn affine_fixing_two(
    p: Point,
    q: Point,
    from: Point,
    to: Point,
) -> Result<AffineMap2, GeomError> {
    let u = q - p;
    let r = from - p;
    let r2 = to - p;
    let det = u.cross(r);
    if det == 0.0 {
        return Err(GeomError::Degenerate);
    }
    let longest = u.norm().max(r2.norm()).max(q.dist(to));
    if u.cross(r2).abs() < 2.0 * DEGENERACY_EPS * longest * longest {
        return Err(GeomError::CollapseToSegment);
    }
    // L * [u r] = [u r2]  =>  L = [u r2] * [u r]^-1
    let inv = [
        [r.y / det, -r.x / det],
        [-u.y / det, u.x / det],
    ];
    let cols = [[u.x, r2.x], [u.y, r2.y]];
    let mut linear = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            linear[i][j] = cols[i][0] * inv[0][j] + cols[i][1] * inv[1][j];
        }
    }
    let lp = Point::new(
        linear[0][0] * p.x + linear[0][1] * p.y,
        linear[1][0] * p.x + linear[1][1] * p.y,
    );
    Ok(AffineMap2 {
        linear,
        translation: [p.x - lp.x, p.y - lp.y],
    })
}

/// The unique affine map fixing the two vertices of `t` other than
/// `moving_vertex` and carrying that vertex to `target`.
pub fn vertex_move_affine(
    t: &Triangle,
    moving_vertex: usize,
    target: Point,
) -> Result<AffineMap2, GeomError> {
    let v = t.vertices();
    affine_fixing_two(
        v[(moving_vertex + 1) % 3],
        v[(moving_vertex + 2) % 3],
        v[moving_vertex],
        target,
    )
}
