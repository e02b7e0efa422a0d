//! Exact-sign geometric predicates.
//!
//! Thin wrappers over adaptive-precision determinant evaluation: the
//! returned magnitude is only approximate near zero but the sign is always
//! exact, which is what side assignment and Delaunay flipping rely on.

use super::Point;

fn coord(p: Point) -> robust::Coord<f64> {
    robust::Coord { x: p.x, y: p.y }
}

/// Sign of the orientation determinant: positive if `p`, `q`, `r` occur in
/// counterclockwise order, negative if clockwise, zero if collinear.
pub fn orient2d(p: Point, q: Point, r: Point) -> f64 {
    robust::orient2d(coord(p), coord(q), coord(r))
}

/// Sign of the in-circle determinant: positive if `s` lies strictly inside
/// the circle through `p`, `q`, `r` when those are in counterclockwise
/// order (the sign flips with their orientation), zero if cocircular.
pub fn in_circle(p: Point, q: Point, r: Point, s: Point) -> f64 {
    robust::incircle(coord(p), coord(q), coord(r), coord(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::{Signed, Zero};
    use rand::{Rng, SeedableRng};

    fn rat(x: f64) -> BigRational {
        BigRational::from_float(x).unwrap()
    }

    fn sign_of(r: &BigRational) -> i32 {
        if r.is_zero() {
            0
        } else if r.is_positive() {
            1
        } else {
            -1
        }
    }

    fn fsign(x: f64) -> i32 {
        if x > 0.0 {
            1
        } else if x < 0.0 {
            -1
        } else {
            0
        }
    }

    /// Exact rational orientation determinant.
    fn orient2d_exact(p: Point, q: Point, r: Point) -> i32 {
        let det = (rat(q.x) - rat(p.x)) * (rat(r.y) - rat(p.y))
            - (rat(q.y) - rat(p.y)) * (rat(r.x) - rat(p.x));
        sign_of(&det)
    }

    /// Exact rational in-circle determinant (3x3 expansion).
    fn in_circle_exact(p: Point, q: Point, r: Point, s: Point) -> i32 {
        let ax = rat(p.x) - rat(s.x);
        let ay = rat(p.y) - rat(s.y);
        let bx = rat(q.x) - rat(s.x);
        let by = rat(q.y) - rat(s.y);
        let cx = rat(r.x) - rat(s.x);
        let cy = rat(r.y) - rat(s.y);
        let al = &ax * &ax + &ay * &ay;
        let bl = &bx * &bx + &by * &by;
        let cl = &cx * &cx + &cy * &cy;
        let det = al * (&bx * &cy - &cx * &by) + bl * (&cx * &ay - &ax * &cy)
            + cl * (&ax * &by - &bx * &ay);
        sign_of(&det)
    }

    #[test]
    fn collinear_is_zero() {
        let p = Point::new(0.0, 0.0);
        let q = Point::new(1.0, 1.0);
        let r = Point::new(3.0, 3.0);
        assert_eq!(orient2d(p, q, r), 0.0);
    }

    #[test]
    fn square_corners_cocircular() {
        let v = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
        ];
        assert_eq!(in_circle(v[0], v[1], v[3], v[2]), 0.0);
    }

    #[test]
    fn in_circle_sign_convention() {
        // ccw triangle, center of its circumcircle is inside
        let a = Point::new(0.0, 0.0);
        let b = Point::new(1.0, 0.0);
        let c = Point::new(1.0, 1.0);
        assert!(orient2d(a, b, c) > 0.0);
        assert!(in_circle(a, b, c, Point::new(0.5, 0.5)) > 0.0);
        assert!(in_circle(a, b, c, Point::new(2.0, 2.0)) < 0.0);
    }

    #[test]
    fn orient2d_antisymmetric() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let p = Point::new(rng.gen(), rng.gen());
            let q = Point::new(rng.gen(), rng.gen());
            let r = Point::new(rng.gen(), rng.gen());
            assert_eq!(fsign(orient2d(p, q, r)), -fsign(orient2d(q, p, r)));
            assert_eq!(fsign(orient2d(p, q, r)), fsign(orient2d(q, r, p)));
        }
    }

    #[test]
    fn near_degenerate_matches_rational_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let eps_scales = [1e-18, 1e-16, 1e-14, 0.0];
        let center = Point::new(0.3, 0.7);
        for i in 0..2000 {
            let base = Point::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0);
            let dir = Point::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0);
            let eps = eps_scales[i % eps_scales.len()];
            // nearly-collinear triple
            let p = base;
            let q = base + dir.scale(0.5);
            let mut r = base + dir;
            r.y += eps * (rng.gen::<f64>() - 0.5);
            assert_eq!(fsign(orient2d(p, q, r)), orient2d_exact(p, q, r));

            // nearly-cocircular quadruple on a common circle, one point
            // perturbed radially by ~eps
            let radial = eps * (rng.gen::<f64>() - 0.5);
            let mut on_circle = |r: f64| {
                let t = rng.gen::<f64>() * std::f64::consts::TAU;
                center + Point::new(t.cos(), t.sin()).scale(1.0 + r)
            };
            let a = on_circle(0.0);
            let b = on_circle(0.0);
            let c = on_circle(0.0);
            let d = on_circle(radial);
            assert_eq!(fsign(in_circle(a, b, c, d)), in_circle_exact(a, b, c, d));
        }
    }
}
