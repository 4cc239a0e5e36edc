//! Origin-symmetric convex 3-polytopes as halfspace intersections.
//!
//! Each prescribed facet plane is clipped inside its own plane by all other
//! constraints (a 2D halfspace intersection via candidate vertices), so a
//! constraint is either redundant, degenerate (face area below 1e-12), or
//! contributes one facet polygon. Representatives are mirrored through the
//! origin to keep the vertex set exactly antipodal.

use crate::{Error, Result};

use super::{Body, HBody, DEGENERACY_TOL};

const CLIP_TOL: f64 = 1e-9;
const WELD_TOL: f64 = 1e-8;

#[inline]
fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
#[inline]
fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}
#[inline]
fn neg3(a: [f64; 3]) -> [f64; 3] {
    [-a[0], -a[1], -a[2]]
}
#[inline]
fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// Right-handed orthonormal basis (t1, t2) of the plane with unit normal
/// `v`, chosen deterministically so t1 x t2 = v.
pub(crate) fn in_plane_basis(v: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let axis = if v[0].abs() <= v[1].abs() && v[0].abs() <= v[2].abs() {
        [1.0, 0.0, 0.0]
    } else if v[1].abs() <= v[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let mut t1 = cross3(axis, v);
    let n = norm3(t1);
    t1 = [t1[0] / n, t1[1] / n, t1[2] / n];
    let t2 = cross3(v, t1);
    (t1, t2)
}

/// One facet: outward unit normal, support number, and the vertex ring in
/// counterclockwise order as seen from outside.
#[derive(Debug, Clone)]
pub struct Facet3 {
    pub normal: [f64; 3],
    pub support: f64,
    pub ring: Vec<usize>,
}

/// Origin-symmetric convex 3-polytope.
#[derive(Debug, Clone)]
pub struct Polytope3 {
    vertices: Vec<[f64; 3]>,
    facets: Vec<Facet3>,
}

impl Polytope3 {
    pub fn dim(&self) -> usize {
        3
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet3] {
        &self.facets
    }

    pub fn facet_area(&self, i: usize) -> f64 {
        let f = &self.facets[i];
        let (t1, t2) = in_plane_basis(f.normal);
        let foot =
            [f.support * f.normal[0], f.support * f.normal[1], f.support * f.normal[2]];
        let ys: Vec<[f64; 2]> = f
            .ring
            .iter()
            .map(|&k| {
                let d = [
                    self.vertices[k][0] - foot[0],
                    self.vertices[k][1] - foot[1],
                    self.vertices[k][2] - foot[2],
                ];
                [dot3(d, t1), dot3(d, t2)]
            })
            .collect();
        let m = ys.len();
        0.5 * (0..m)
            .map(|j| {
                let a = ys[j];
                let b = ys[(j + 1) % m];
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
    }

    /// Index of the facet antipodal to facet `i`.
    pub fn antipodal_facet(&self, i: usize) -> Result<usize> {
        let n = self.facets[i].normal;
        for (j, f) in self.facets.iter().enumerate() {
            if norm3([n[0] + f.normal[0], n[1] + f.normal[1], n[2] + f.normal[2]]) < 1e-9 {
                return Ok(j);
            }
        }
        Err(Error::InvalidInput(format!("facet {i} has no antipodal facet")))
    }

    /// Facet data as pair-representative support numbers. The
    /// representative of each pair is the normal whose first component
    /// larger than 1e-12 in absolute value is positive.
    pub fn to_hbody(&self) -> Result<HBody> {
        let mut dirs = Vec::new();
        let mut sup = Vec::new();
        for f in &self.facets {
            let lead = f.normal.iter().find(|c| c.abs() > 1e-12).copied().unwrap_or(0.0);
            if lead > 0.0 {
                dirs.push(super::Direction::new(f.normal.to_vec())?);
                sup.push(f.support);
            }
        }
        HBody::new(dirs, sup)
    }

    /// Structural invariants: closed edge pairing, Euler relation,
    /// antipodal symmetry, and every vertex on its facet planes and inside
    /// all others.
    pub fn validate(&self) -> Result<()> {
        let scale = self.vertices.iter().map(|v| norm3(*v)).fold(1.0, f64::max);
        let mut edge_count = std::collections::HashMap::<(usize, usize), usize>::new();
        for (i, f) in self.facets.iter().enumerate() {
            if f.ring.len() < 3 {
                return Err(Error::InvalidInput(format!("facet {i} has fewer than 3 vertices")));
            }
            for w in 0..f.ring.len() {
                let (a, b) = (f.ring[w], f.ring[(w + 1) % f.ring.len()]);
                *edge_count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
            for (k, x) in self.vertices.iter().enumerate() {
                let slack = dot3(f.normal, *x) - f.support;
                if f.ring.contains(&k) {
                    if slack.abs() > WELD_TOL * scale {
                        return Err(Error::InvalidInput(format!(
                            "vertex {k} misses facet plane {i} by {slack:e}"
                        )));
                    }
                } else if slack > WELD_TOL * scale {
                    return Err(Error::InvalidInput(format!(
                        "vertex {k} lies outside facet plane {i} by {slack:e}"
                    )));
                }
            }
        }
        if edge_count.values().any(|c| *c != 2) {
            return Err(Error::InvalidInput("an edge is not shared by exactly two facets".into()));
        }
        let (v, e, f) = (self.vertices.len(), edge_count.len(), self.facets.len());
        if v + f != e + 2 {
            return Err(Error::InvalidInput(format!(
                "euler relation violated: V={v}, E={e}, F={f}"
            )));
        }
        for i in 0..self.facets.len() {
            self.antipodal_facet(i)?;
        }
        Ok(())
    }
}

impl Body for Polytope3 {
    fn dim(&self) -> usize {
        3
    }
    fn support(&self, u: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| v[0] * u[0] + v[1] * u[1] + v[2] * u[2])
            .fold(f64::NEG_INFINITY, f64::max)
    }
    fn radial(&self, u: &[f64]) -> f64 {
        let mut r = f64::INFINITY;
        for f in &self.facets {
            let d = f.normal[0] * u[0] + f.normal[1] * u[1] + f.normal[2] * u[2];
            if d > 0.0 {
                r = r.min(f.support / d);
            }
        }
        r
    }
    fn contains(&self, x: &[f64]) -> bool {
        self.facets
            .iter()
            .all(|f| f.normal[0] * x[0] + f.normal[1] * x[1] + f.normal[2] * x[2] <= f.support)
    }
}

/// Result of a 3D Wulff shape construction.
#[derive(Debug, Clone)]
pub struct Wulff3 {
    pub polytope: Polytope3,
    pub facet_of: Vec<Option<usize>>,
    pub pair_of_facet: Vec<usize>,
    pub vanished: Vec<usize>,
}

/// Clip one facet plane by the in-plane traces of all other constraints;
/// returns the face polygon in plane coordinates, or None if it is
/// redundant or degenerate.
fn clip_face(
    v: [f64; 3],
    h: f64,
    constraints: &[([f64; 3], f64)],
    t1: [f64; 3],
    t2: [f64; 3],
) -> Option<Vec<[f64; 2]>> {
    let mut lines: Vec<([f64; 2], f64)> = Vec::with_capacity(constraints.len());
    for &(u, b) in constraints {
        let w = [dot3(t1, u), dot3(t2, u)];
        let c = b - h * dot3(v, u);
        if w[0].hypot(w[1]) <= 1e-14 {
            if c < -DEGENERACY_TOL {
                return None;
            }
        } else {
            lines.push((w, c));
        }
    }
    let mut cands: Vec<[f64; 2]> = Vec::new();
    for a in 0..lines.len() {
        for b in (a + 1)..lines.len() {
            let (wa, ca) = lines[a];
            let (wb, cb) = lines[b];
            let det = wa[0] * wb[1] - wa[1] * wb[0];
            if det.abs() <= 1e-14 {
                continue;
            }
            let y = [(ca * wb[1] - cb * wa[1]) / det, (wa[0] * cb - wb[0] * ca) / det];
            let tol = CLIP_TOL * (1.0 + y[0].hypot(y[1]));
            if lines.iter().all(|(w, c)| w[0] * y[0] + w[1] * y[1] <= c + tol) {
                let dup = cands
                    .iter()
                    .any(|p| (p[0] - y[0]).hypot(p[1] - y[1]) < WELD_TOL * (1.0 + y[0].hypot(y[1])));
                if !dup {
                    cands.push(y);
                }
            }
        }
    }
    if cands.len() < 3 {
        return None;
    }
    let cx = cands.iter().map(|p| p[0]).sum::<f64>() / cands.len() as f64;
    let cy = cands.iter().map(|p| p[1]).sum::<f64>() / cands.len() as f64;
    cands.sort_by(|p, q| {
        (p[1] - cy).atan2(p[0] - cx).total_cmp(&(q[1] - cy).atan2(q[0] - cx))
    });
    let m = cands.len();
    let area = 0.5
        * (0..m)
            .map(|j| {
                let a = cands[j];
                let b = cands[(j + 1) % m];
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>();
    if area <= DEGENERACY_TOL {
        return None;
    }
    Some(cands)
}

/// Intersect the slabs `|x . v_i| <= h_i` in dimension 3.
pub fn wulff_shape_3d(hb: &HBody) -> Result<Wulff3> {
    if hb.dim() != 3 {
        return Err(Error::InvalidInput(format!("wulff_shape_3d got dimension {}", hb.dim())));
    }
    let k = hb.len();
    let dirs: Vec<[f64; 3]> = hb.directions().iter().map(|d| d.as3()).collect();
    let sup = hb.support();
    let mut spans = false;
    'outer: for a in 0..k {
        for b in (a + 1)..k {
            for c in (b + 1)..k {
                if dot3(dirs[a], cross3(dirs[b], dirs[c])).abs() > 1e-10 {
                    spans = true;
                    break 'outer;
                }
            }
        }
    }
    if !spans {
        return Err(Error::Unbounded);
    }

    let mut constraints: Vec<([f64; 3], f64)> = Vec::with_capacity(2 * k);
    for i in 0..k {
        constraints.push((dirs[i], sup[i]));
        constraints.push((neg3(dirs[i]), sup[i]));
    }

    // Facet candidates before vertex welding: outward normal, support
    // number, boundary loop, index of the originating direction pair.
    type RawFacet = ([f64; 3], f64, Vec<[f64; 3]>, usize);
    let mut raw: Vec<RawFacet> = Vec::new();
    let mut vanished = Vec::new();
    for i in 0..k {
        let v = dirs[i];
        let h = sup[i];
        let (t1, t2) = in_plane_basis(v);
        match clip_face(v, h, &constraints, t1, t2) {
            None => vanished.push(i),
            Some(ys) => {
                let pts: Vec<[f64; 3]> = ys
                    .iter()
                    .map(|y| {
                        [
                            h * v[0] + y[0] * t1[0] + y[1] * t2[0],
                            h * v[1] + y[0] * t1[1] + y[1] * t2[1],
                            h * v[2] + y[0] * t1[2] + y[1] * t2[2],
                        ]
                    })
                    .collect();
                let mut mirrored: Vec<[f64; 3]> = pts.iter().map(|p| neg3(*p)).collect();
                mirrored.reverse();
                raw.push((v, h, pts, i));
                raw.push((neg3(v), h, mirrored, i));
            }
        }
    }
    if raw.len() < 6 {
        return Err(Error::InvalidInput(
            "fewer than three facet pairs survive; the prescribed body is degenerate".into(),
        ));
    }

    let scale = raw
        .iter()
        .flat_map(|(_, _, pts, _)| pts.iter().map(|p| norm3(*p)))
        .fold(1.0, f64::max);
    let mut vertices: Vec<[f64; 3]> = Vec::new();
    let mut weld = |p: [f64; 3]| -> usize {
        for (idx, q) in vertices.iter().enumerate() {
            if norm3([p[0] - q[0], p[1] - q[1], p[2] - q[2]]) < WELD_TOL * scale {
                return idx;
            }
        }
        vertices.push(p);
        vertices.len() - 1
    };
    let mut facets = Vec::with_capacity(raw.len());
    let mut pair_of_facet = Vec::with_capacity(raw.len());
    let mut facet_of = vec![None; k];
    for (normal, support, pts, pair) in raw {
        let ring: Vec<usize> = pts.iter().map(|p| weld(*p)).collect();
        if normal == dirs[pair] {
            facet_of[pair] = Some(facets.len());
        }
        facets.push(Facet3 { normal, support, ring });
        pair_of_facet.push(pair);
    }
    let polytope = Polytope3 { vertices, facets };
    polytope.validate()?;
    Ok(Wulff3 { polytope, facet_of, pair_of_facet, vanished })
}
