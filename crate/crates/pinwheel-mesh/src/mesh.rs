//! The final simplicial mesh: storage, validation and file formats.
//!
//! Formats:
//! - node/ele text: first line `N M`, then `N` lines `x y`, then `M` lines
//!   `i j k` with 0-based counterclockwise node indices. Coordinates are
//!   written with 17 significant digits so a write/read round trip is
//!   bit-exact.
//! - OFF.
//! - SVG rendering with configurable stroke width and an optional
//!   highlighted vertex path, deterministic element ordering.

use crate::geom::{signed_area2, Point};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("edge {0}-{1} is incident to {2} triangles (expected 1 or 2)")]
    NonConforming(usize, usize, usize),
    #[error("edge {0}-{1} is traversed twice in the same direction (inconsistent orientation)")]
    BadEdgeOrientation(usize, usize),
    #[error("triangle {0} is not positively oriented")]
    BadOrientation(usize),
    #[error("triangle {0} references node {1} out of range")]
    BadIndex(usize, usize),
    #[error("parse error at line {0}: {1}")]
    Parse(usize, String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A conforming triangle mesh: nodes, positively oriented index triples,
/// and (when produced by the tiling pipeline) the id of the leaf tile each
/// triangle came from.
#[derive(Debug, Clone, Default)]
pub struct SimplicialMesh {
    pub nodes: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    /// Per-triangle provenance: leaf tile id, when applicable.
    pub provenance: Vec<Option<u32>>,
}

impl SimplicialMesh {
    pub fn new(nodes: Vec<Point>, triangles: Vec<[usize; 3]>) -> Self {
        let provenance = vec![None; triangles.len()];
        SimplicialMesh { nodes, triangles, provenance }
    }

    pub fn triangle_points(&self, i: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[i];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|i| {
                let [a, b, c] = self.triangle_points(i);
                0.5 * signed_area2(a, b, c)
            })
            .sum()
    }

    /// Bounding box as (min, max) corners.
    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.nodes {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// Conformity validation: every node index in range, every triangle
    /// positively oriented, every edge incident to exactly one or two
    /// triangles, and shared edges traversed once in each direction.
    pub fn validate(&self) -> Result<(), MeshError> {
        use std::collections::HashMap;
        for (i, t) in self.triangles.iter().enumerate() {
            for &v in t {
                if v >= self.nodes.len() {
                    return Err(MeshError::BadIndex(i, v));
                }
            }
            let [a, b, c] = self.triangle_points(i);
            if crate::geom::orient2d(a, b, c) <= 0.0 {
                return Err(MeshError::BadOrientation(i));
            }
        }
        // (directed-count, reverse-count) per undirected edge
        let mut edges: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for t in &self.triangles {
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
            let n = fwd + rev;
            if n > 2 || n == 0 {
                return Err(MeshError::NonConforming(u, v, n));
            }
            if n == 2 && (fwd != 1 || rev != 1) {
                return Err(MeshError::BadEdgeOrientation(u, v));
            }
        }
        Ok(())
    }

    /// Undirected edge list (each edge once, endpoints sorted).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut set = std::collections::BTreeSet::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (u, v) = (t[k], t[(k + 1) % 3]);
                set.insert((u.min(v), u.max(v)));
            }
        }
        set.into_iter().collect()
    }

    pub fn to_node_ele(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.nodes.len(), self.triangles.len());
        for p in &self.nodes {
            let _ = writeln!(s, "{:.16e} {:.16e}", p.x, p.y);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        s
    }

    pub fn from_node_ele(text: &str) -> Result<Self, MeshError> {
        let (nodes, triangles) = parse_node_ele(text)?;
        Ok(SimplicialMesh::new(nodes, triangles))
    }

    pub fn write_node_ele(&self, path: &Path) -> Result<(), MeshError> {
        std::fs::write(path, self.to_node_ele())?;
        Ok(())
    }

    pub fn to_off(&self) -> String {
        let mut s = String::from("OFF\n");
        let _ = writeln!(s, "{} {} 0", self.nodes.len(), self.triangles.len());
        for p in &self.nodes {
            let _ = writeln!(s, "{:.16e} {:.16e} 0", p.x, p.y);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
        }
        s
    }

    pub fn write_off(&self, path: &Path) -> Result<(), MeshError> {
        std::fs::write(path, self.to_off())?;
        Ok(())
    }

    pub fn to_svg(&self, opts: &SvgOptions) -> String {
        render_svg(self, opts)
    }

    pub fn write_svg(&self, path: &Path, opts: &SvgOptions) -> Result<(), MeshError> {
        std::fs::write(path, self.to_svg(opts))?;
        Ok(())
    }
}

/// Parses the `N M` / nodes / triangles text format.
pub fn parse_node_ele(text: &str) -> Result<(Vec<Point>, Vec<[usize; 3]>), MeshError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (ln, header) = lines
        .next()
        .ok_or_else(|| MeshError::Parse(0, "empty file".into()))?;
    let mut it = header.split_whitespace();
    let n: usize = it
        .next()
        .and_then(|w| w.parse().ok())
        .ok_or_else(|| MeshError::Parse(ln, "expected node count".into()))?;
    let m: usize = it
        .next()
        .and_then(|w| w.parse().ok())
        .ok_or_else(|| MeshError::Parse(ln, "expected triangle count".into()))?;
    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| MeshError::Parse(0, "missing node line".into()))?;
        let mut w = line.split_whitespace();
        let x: f64 = w
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| MeshError::Parse(ln, "bad x coordinate".into()))?;
        let y: f64 = w
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| MeshError::Parse(ln, "bad y coordinate".into()))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(MeshError::Parse(ln, "non-finite coordinate".into()));
        }
        nodes.push(Point::new(x, y));
    }
    let mut tris = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| MeshError::Parse(0, "missing triangle line".into()))?;
        let mut w = line.split_whitespace();
        let mut t = [0usize; 3];
        for v in t.iter_mut() {
            *v = w
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| MeshError::Parse(ln, "bad node index".into()))?;
            if *v >= n {
                return Err(MeshError::Parse(ln, format!("node index {v} out of range")));
            }
        }
        tris.push(t);
    }
    Ok((nodes, tris))
}

/// SVG rendering options.
#[derive(Debug, Clone)]
pub struct SvgOptions {
    /// Output width in pixels; height follows the aspect ratio.
    pub width: f64,
    /// Stroke width in pixels.
    pub stroke_width: f64,
    /// Optional node-index path drawn as a highlighted polyline.
    pub highlight_path: Vec<usize>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { width: 800.0, stroke_width: 1.0, highlight_path: Vec::new() }
    }
}

fn render_svg(mesh: &SimplicialMesh, opts: &SvgOptions) -> String {
    let (lo, hi) = mesh.bbox();
    let w = (hi.x - lo.x).max(1e-300);
    let h = (hi.y - lo.y).max(1e-300);
    let scale = opts.width / w;
    let height = h * scale;
    let pad = 0.01 * opts.width;
    let tx = |p: Point| (pad + (p.x - lo.x) * scale, pad + (hi.y - p.y) * scale);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.2}\" height=\"{:.2}\" viewBox=\"0 0 {:.2} {:.2}\">",
        opts.width + 2.0 * pad,
        height + 2.0 * pad,
        opts.width + 2.0 * pad,
        height + 2.0 * pad
    );
    let _ = writeln!(
        s,
        "<g fill=\"none\" stroke=\"#333333\" stroke-width=\"{}\" stroke-linejoin=\"round\">",
        opts.stroke_width
    );
    for i in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.triangle_points(i);
        let (ax, ay) = tx(a);
        let (bx, by) = tx(b);
        let (cx, cy) = tx(c);
        let _ = writeln!(
            s,
            "<polygon points=\"{ax:.4},{ay:.4} {bx:.4},{by:.4} {cx:.4},{cy:.4}\"/>"
        );
    }
    let _ = writeln!(s, "</g>");
    if opts.highlight_path.len() >= 2 {
        let pts: Vec<String> = opts
            .highlight_path
            .iter()
            .map(|&i| {
                let (x, y) = tx(mesh.nodes[i]);
                format!("{x:.4},{y:.4}")
            })
            .collect();
        let _ = writeln!(
            s,
            "<polyline fill=\"none\" stroke=\"#cc2222\" stroke-width=\"{}\" points=\"{}\"/>",
            3.0 * opts.stroke_width,
            pts.join(" ")
        );
    }
    let _ = writeln!(s, "</svg>");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangle_mesh() -> SimplicialMesh {
        SimplicialMesh::new(
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 1.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
    }

    #[test]
    fn validate_accepts_conforming() {
        two_triangle_mesh().validate().unwrap();
    }

    #[test]
    fn validate_rejects_triple_edge() {
        let mut m = two_triangle_mesh();
        m.nodes.push(Point::new(2.0, 0.5));
        m.triangles.push([0, 2, 4]);
        // edge 0-2 now incident to 3 triangles
        assert!(m.validate().is_err());
    }

    #[test]
    fn validate_rejects_flipped_triangle() {
        let mut m = two_triangle_mesh();
        m.triangles[1] = [0, 3, 2];
        assert!(matches!(m.validate(), Err(MeshError::BadOrientation(1))));
    }

    #[test]
    fn node_ele_round_trip_is_bit_exact() {
        let m = SimplicialMesh::new(
            vec![
                Point::new(0.1 + 0.2, -1.0 / 3.0),
                Point::new(std::f64::consts::PI, 1e-17),
                Point::new(2f64.sqrt(), 5f64.sqrt()),
            ],
            vec![[0, 1, 2]],
        );
        let text = m.to_node_ele();
        let back = SimplicialMesh::from_node_ele(&text).unwrap();
        for (p, q) in m.nodes.iter().zip(&back.nodes) {
            assert_eq!(p.x.to_bits(), q.x.to_bits());
            assert_eq!(p.y.to_bits(), q.y.to_bits());
        }
        assert_eq!(m.triangles, back.triangles);
        assert_eq!(text, back.to_node_ele());
    }

    #[test]
    fn parse_rejects_bad_index() {
        let text = "3 1\n0 0\n1 0\n0 1\n0 1 7\n";
        assert!(SimplicialMesh::from_node_ele(text).is_err());
    }

    #[test]
    fn svg_is_deterministic_and_contains_polygons() {
        let m = two_triangle_mesh();
        let opts = SvgOptions { highlight_path: vec![0, 2], ..Default::default() };
        let a = m.to_svg(&opts);
        let b = m.to_svg(&opts);
        assert_eq!(a, b);
        assert_eq!(a.matches("<polygon").count(), 2);
        assert_eq!(a.matches("<polyline").count(), 1);
    }
}
