//! Convex polygons with interior origin and antipodal symmetry, built as
//! Wulff shapes `[h] = {x : |x . v_i| <= h_i}` of prescribed support
//! numbers, plus the exact edge-merge Minkowski combination.

use crate::{Error, Result};

use super::{Body, Direction, HBody, DEGENERACY_TOL};

/// Two adjacent clippings must produce the same corner within this bound.
const VERTEX_MATCH_TOL: f64 = 1e-9;
/// Antipodal symmetry bound on the vertex set.
const SYMMETRY_TOL: f64 = 1e-10;

#[inline]
fn rot90(v: [f64; 2]) -> [f64; 2] {
    [-v[1], v[0]]
}
#[inline]
fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}
#[inline]
fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}
#[inline]
fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}
#[inline]
fn neg(a: [f64; 2]) -> [f64; 2] {
    [-a[0], -a[1]]
}
#[inline]
fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

/// Origin-symmetric convex polygon. Facet `i` runs counterclockwise from
/// `vertices[i]` to `vertices[i+1 mod m]`; normals are unit and outward;
/// the facet count is even and facet `i + m/2` is the antipode of facet `i`.
#[derive(Debug, Clone)]
pub struct Polytope2 {
    vertices: Vec<[f64; 2]>,
    facet_normals: Vec<[f64; 2]>,
    facet_support: Vec<f64>,
}

impl Polytope2 {
    /// Build from a counterclockwise, strictly convex, origin-symmetric
    /// vertex chain; facet data is recomputed from the edges.
    pub fn from_vertices(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let m = vertices.len();
        if m < 4 || !m.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "symmetric polygon needs an even vertex count >= 4, got {m}"
            )));
        }
        let mut facet_normals = Vec::with_capacity(m);
        let mut facet_support = Vec::with_capacity(m);
        for i in 0..m {
            let e = sub(vertices[(i + 1) % m], vertices[i]);
            let len = norm(e);
            if len < DEGENERACY_TOL {
                return Err(Error::InvalidInput(format!("edge {i} is degenerate")));
            }
            let n = [e[1] / len, -e[0] / len];
            facet_normals.push(n);
            facet_support.push(dot(n, vertices[i]));
        }
        let p = Self { vertices, facet_normals, facet_support };
        p.validate()?;
        Ok(p)
    }

    /// Structural invariants: strict convexity, interior origin, antipodal
    /// symmetry, and vertices sitting on their facet lines.
    pub fn validate(&self) -> Result<()> {
        let m = self.len();
        let scale = self.vertices.iter().map(|v| norm(*v)).fold(1.0, f64::max);
        for i in 0..m {
            let prev = sub(self.vertices[i], self.vertices[(i + m - 1) % m]);
            let next = sub(self.vertices[(i + 1) % m], self.vertices[i]);
            if cross(prev, next) <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "vertex chain is not strictly convex and counterclockwise at vertex {i}"
                )));
            }
            if self.facet_support[i] <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "facet {i} has nonpositive support; origin not interior"
                )));
            }
            let on_line = (dot(self.facet_normals[i], self.vertices[(i + 1) % m])
                - self.facet_support[i])
                .abs();
            if on_line > VERTEX_MATCH_TOL * scale {
                return Err(Error::InvalidInput(format!(
                    "vertex {} misses facet line {i} by {on_line:e}",
                    (i + 1) % m
                )));
            }
        }
        for i in 0..m / 2 {
            let d = norm(sub(self.vertices[i], neg(self.vertices[i + m / 2])));
            if d > SYMMETRY_TOL * scale.max(1.0) {
                return Err(Error::InvalidInput(format!(
                    "vertices {i} and {} are not antipodal (gap {d:e})",
                    i + m / 2
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        2
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn facet_normals(&self) -> &[[f64; 2]] {
        &self.facet_normals
    }

    pub fn facet_support(&self) -> &[f64] {
        &self.facet_support
    }

    /// Endpoints of facet `i` in counterclockwise order.
    pub fn edge_endpoints(&self, i: usize) -> ([f64; 2], [f64; 2]) {
        (self.vertices[i], self.vertices[(i + 1) % self.len()])
    }

    pub fn antipodal_facet(&self, i: usize) -> usize {
        (i + self.len() / 2) % self.len()
    }

    pub fn area(&self) -> f64 {
        let m = self.len();
        0.5 * (0..m).map(|i| cross(self.vertices[i], self.vertices[(i + 1) % m])).sum::<f64>()
    }

    /// The polygon's facet data as pair-representative support numbers
    /// (normals with angle in [0, pi)).
    pub fn to_hbody(&self) -> Result<HBody> {
        let mut dirs = Vec::with_capacity(self.len() / 2);
        let mut sup = Vec::with_capacity(self.len() / 2);
        for i in 0..self.len() {
            let n = self.facet_normals[i];
            if n[1] > 0.0 || (n[1] == 0.0 && n[0] > 0.0) {
                dirs.push(Direction::new(vec![n[0], n[1]])?);
                sup.push(self.facet_support[i]);
            }
        }
        HBody::new(dirs, sup)
    }
}

impl Body for Polytope2 {
    fn dim(&self) -> usize {
        2
    }
    fn support(&self, u: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| v[0] * u[0] + v[1] * u[1])
            .fold(f64::NEG_INFINITY, f64::max)
    }
    fn radial(&self, u: &[f64]) -> f64 {
        let mut r = f64::INFINITY;
        for (n, h) in self.facet_normals.iter().zip(&self.facet_support) {
            let d = n[0] * u[0] + n[1] * u[1];
            if d > 0.0 {
                r = r.min(h / d);
            }
        }
        r
    }
    fn contains(&self, x: &[f64]) -> bool {
        self.facet_normals
            .iter()
            .zip(&self.facet_support)
            .all(|(n, h)| n[0] * x[0] + n[1] * x[1] <= *h)
    }
}

/// Result of a 2D Wulff shape construction, keeping the map between input
/// pairs and surviving facets.
#[derive(Debug, Clone)]
pub struct Wulff2 {
    pub polytope: Polytope2,
    /// For each input pair, the facet index carrying `+v_i` (None if the
    /// constraint is redundant or its edge degenerated).
    pub facet_of: Vec<Option<usize>>,
    /// For each facet, the input pair it came from.
    pub pair_of_facet: Vec<usize>,
    /// Input pairs whose facet vanished (edge shorter than 1e-12).
    pub vanished: Vec<usize>,
}

struct ClippedEdge {
    pair: usize,
    normal: [f64; 2],
    support: f64,
    start: [f64; 2],
    end: [f64; 2],
    mirror: bool,
}

/// Intersect the slabs `|x . v_i| <= h_i`.
///
/// Each representative line is clipped against every other constraint; the
/// surviving edges are mirrored through the origin (so the vertex set is
/// exactly antipodal) and stitched in normal-angle order.
pub fn wulff_shape_2d(hb: &HBody) -> Result<Wulff2> {
    if hb.dim() != 2 {
        return Err(Error::InvalidInput(format!("wulff_shape_2d got dimension {}", hb.dim())));
    }
    let k = hb.len();
    let dirs: Vec<[f64; 2]> = hb.directions().iter().map(|d| d.as2()).collect();
    let sup = hb.support();
    if !(0..k).any(|i| (0..k).any(|j| j != i && cross(dirs[i], dirs[j]).abs() > 1e-12)) {
        return Err(Error::Unbounded);
    }

    // Full constraint set, both members of every pair.
    let mut constraints: Vec<([f64; 2], f64)> = Vec::with_capacity(2 * k);
    for i in 0..k {
        constraints.push((dirs[i], sup[i]));
        constraints.push((neg(dirs[i]), sup[i]));
    }

    let mut edges: Vec<ClippedEdge> = Vec::with_capacity(2 * k);
    let mut vanished = Vec::new();
    for i in 0..k {
        let v = dirs[i];
        let h = sup[i];
        let t = rot90(v);
        let mut s_lo = f64::NEG_INFINITY;
        let mut s_hi = f64::INFINITY;
        for &(w, b) in &constraints {
            let coef = dot(t, w);
            let rhs = b - h * dot(v, w);
            if coef.abs() <= 1e-14 {
                if rhs < -DEGENERACY_TOL {
                    s_lo = f64::INFINITY;
                    break;
                }
            } else if coef > 0.0 {
                s_hi = s_hi.min(rhs / coef);
            } else {
                s_lo = s_lo.max(rhs / coef);
            }
        }
        if !s_lo.is_finite() || !s_hi.is_finite() {
            if s_lo == f64::INFINITY {
                vanished.push(i);
                continue;
            }
            return Err(Error::Unbounded);
        }
        if s_hi - s_lo >= DEGENERACY_TOL {
            let start = [h * v[0] + s_lo * t[0], h * v[1] + s_lo * t[1]];
            let end = [h * v[0] + s_hi * t[0], h * v[1] + s_hi * t[1]];
            edges.push(ClippedEdge { pair: i, normal: v, support: h, start, end, mirror: false });
            edges.push(ClippedEdge {
                pair: i,
                normal: neg(v),
                support: h,
                start: neg(start),
                end: neg(end),
                mirror: true,
            });
        } else {
            vanished.push(i);
        }
    }
    if edges.len() < 4 {
        return Err(Error::InvalidInput(
            "fewer than two facet pairs survive; the prescribed body is degenerate".into(),
        ));
    }
    edges.sort_by(|a, b| {
        let ta = a.normal[1].atan2(a.normal[0]);
        let tb = b.normal[1].atan2(b.normal[0]);
        ta.total_cmp(&tb)
    });

    let m = edges.len();
    let scale = edges.iter().map(|e| norm(e.start)).fold(1.0, f64::max);
    let mut vertices = Vec::with_capacity(m);
    for j in 0..m {
        let gap = norm(sub(edges[j].end, edges[(j + 1) % m].start));
        if gap > VERTEX_MATCH_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "adjacent clipped edges disagree on their shared corner by {gap:e}"
            )));
        }
        vertices.push(edges[j].start);
    }
    let polytope = Polytope2 {
        vertices,
        facet_normals: edges.iter().map(|e| e.normal).collect(),
        facet_support: edges.iter().map(|e| e.support).collect(),
    };
    polytope.validate()?;

    let mut facet_of = vec![None; k];
    for (j, e) in edges.iter().enumerate() {
        if !e.mirror {
            facet_of[e.pair] = Some(j);
        }
    }
    Ok(Wulff2 {
        polytope,
        facet_of,
        pair_of_facet: edges.iter().map(|e| e.pair).collect(),
        vanished,
    })
}

/// Exact Minkowski combination `(1-t) K + t L` by merging the scaled edge
/// vectors of both polygons in angular order.
pub fn minkowski_combination_2d(k: &Polytope2, l: &Polytope2, t: f64) -> Result<Polytope2> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("combination parameter must be in [0, 1], got {t}")));
    }
    if t == 0.0 {
        return Ok(k.clone());
    }
    if t == 1.0 {
        return Ok(l.clone());
    }

    fn scaled_edges(p: &Polytope2, s: f64) -> Vec<(f64, [f64; 2])> {
        let m = p.len();
        (0..m)
            .filter_map(|i| {
                let e = sub(p.vertices[(i + 1) % m], p.vertices[i]);
                let e = [s * e[0], s * e[1]];
                if norm(e) < 1e-14 {
                    None
                } else {
                    let mut ang = e[1].atan2(e[0]);
                    if ang < 0.0 {
                        ang += 2.0 * std::f64::consts::PI;
                    }
                    Some((ang, e))
                }
            })
            .collect()
    }
    fn bottom_vertex(p: &Polytope2) -> [f64; 2] {
        *p.vertices
            .iter()
            .min_by(|a, b| (a[1], a[0]).partial_cmp(&(b[1], b[0])).unwrap())
            .unwrap()
    }

    let mut edges = scaled_edges(k, 1.0 - t);
    edges.extend(scaled_edges(l, t));
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Collapse edges sharing a direction (a facet common to both bodies).
    let mut merged: Vec<(f64, [f64; 2])> = Vec::with_capacity(edges.len());
    for (ang, e) in edges {
        match merged.last_mut() {
            Some((pa, pe)) if (ang - *pa).abs() < 1e-12 => {
                pe[0] += e[0];
                pe[1] += e[1];
            }
            _ => merged.push((ang, e)),
        }
    }

    let bk = bottom_vertex(k);
    let bl = bottom_vertex(l);
    let mut p = [(1.0 - t) * bk[0] + t * bl[0], (1.0 - t) * bk[1] + t * bl[1]];
    let mut vertices = Vec::with_capacity(merged.len());
    for (_, e) in &merged {
        vertices.push(p);
        p = [p[0] + e[0], p[1] + e[1]];
    }
    let closure_gap = norm(sub(p, vertices[0]));
    let scale = vertices.iter().map(|v| norm(*v)).fold(1.0, f64::max);
    if closure_gap > VERTEX_MATCH_TOL * scale {
        return Err(Error::InvalidInput(format!(
            "edge merge failed to close the polygon (gap {closure_gap:e})"
        )));
    }
    Polytope2::from_vertices(vertices)
}
