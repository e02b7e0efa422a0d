//! The subdivision primitives on their own: one pinwheel split of a
//! scalene triangle, the conjugate angle set, the near-equilateral
//! tripartition, and the rational-angle guard.
//!
//! Run: `cargo run --example subdivision_rules`

use pinwheel_mesh::geom::{Point, Triangle};
use pinwheel_mesh::pinwheel::{
    conjugate_angles, needs_tripartition, pinwheel_split, rational_angle_guard, tripartition,
    AngleClass, ClassKind, RationalCheck,
};

fn main() {
    let (a, b) = (0.5f64, 1.0f64);
    let c = std::f64::consts::PI - a - b;
    println!("root angles (a, b, c) = ({a:.4}, {b:.4}, {c:.4})");
    let (x, y, z) = conjugate_angles(a, b, c).unwrap();
    println!("conjugate angles       = ({x:.4}, {y:.4}, {z:.4})");
    let (u, v, w) = conjugate_angles(x, y, z).unwrap();
    println!("conjugate of conjugate = ({u:.4}, {v:.4}, {w:.4})  (involution)");

    // role corners with A at the origin and B on the x axis
    let ab = 2.0;
    let ac = ab * b.sin() / c.sin();
    let corners = [
        Point::new(0.0, 0.0),
        Point::new(ab, 0.0),
        Point::new(ac * a.cos(), ac * a.sin()),
    ];
    let cls = AngleClass { kind: ClassKind::RootSimilar, angles: [a, b, c] };
    let sub = pinwheel_split(corners, &cls).unwrap();
    println!("\nfive children of one split:");
    for ch in &sub.children {
        let t = Triangle::new(ch.corners[0], ch.corners[1], ch.corners[2]).unwrap();
        let mut ang = t.angles();
        ang.sort_by(f64::total_cmp);
        println!(
            "  {:?}  class {:?}  angles ({:.4}, {:.4}, {:.4})  area {:.5}",
            ch.role, ch.cls.kind, ang[0], ang[1], ang[2], t.area()
        );
    }
    println!(
        "created vertices: D {:?}  E {:?}  F {:?}  G {:?} (G hangs on child V's C-F edge)",
        (sub.d.x, sub.d.y),
        (sub.e.x, sub.e.y),
        (sub.f.x, sub.f.y),
        (sub.g.x, sub.g.y)
    );

    // near-equilateral triangles are cut about the in-center instead
    let eq = Triangle::new(
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(0.52, 0.85),
    )
    .unwrap();
    let mut ang = eq.angles();
    ang.sort_by(f64::total_cmp);
    println!(
        "\nnear-equilateral ({:.3}, {:.3}, {:.3}): spread {:.3} -> tripartition? {}",
        ang[0],
        ang[1],
        ang[2],
        ang[2] - ang[0],
        needs_tripartition(ang[0], ang[2])
    );
    for (i, kid) in tripartition(&eq).unwrap().iter().enumerate() {
        let mut ka = kid.angles();
        ka.sort_by(f64::total_cmp);
        println!("  child {i}: angles ({:.4}, {:.4}, {:.4})", ka[0], ka[1], ka[2]);
    }

    // angles too close to small rational multiples of pi cluster the
    // available edge directions; the guard flags them
    for angle in [std::f64::consts::FRAC_PI_4, 0.5f64.atan(), 0.4712] {
        match rational_angle_guard(angle, 20, 1e-3) {
            RationalCheck::Ok => println!("guard({angle:.5}) -> ok"),
            RationalCheck::Flagged { m, n } => {
                println!("guard({angle:.5}) -> flagged, close to {m} pi / {n}")
            }
        }
    }
}
