//! Origin-symmetric convex bodies and the constructions the solvers need:
//! Wulff shapes (halfspace intersections) from prescribed support numbers,
//! Minkowski combinations, support evaluation, and support-grid Hausdorff
//! distance.
//!
//! Directions come one per antipodal pair throughout; evenness is implicit.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

mod polygon;
mod polytope3;

pub use polygon::{minkowski_combination_2d, wulff_shape_2d, Polytope2, Wulff2};
pub(crate) use polytope3::in_plane_basis as facet_basis;
pub use polytope3::{wulff_shape_3d, Facet3, Polytope3, Wulff3};

/// Unit tolerance for [`Direction`] validation.
pub const DIRECTION_UNIT_TOL: f64 = 1e-12;
/// Edges shorter (or faces smaller) than this are treated as degenerate and
/// reported as vanished constraints.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// Default support-grid size for 2D Hausdorff distance.
pub const HAUSDORFF_GRID_2D: usize = 720;
/// Default icosphere vertex count for 3D Hausdorff distance.
pub const HAUSDORFF_GRID_3D: usize = 2562;
/// Largest ambient dimension for boxes and balls.
pub const MAX_BOX_DIM: usize = 10;

/// A unit vector, validated to |v| = 1 within [`DIRECTION_UNIT_TOL`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Direction(Vec<f64>);

impl Direction {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.len() < 2 || v.len() > MAX_BOX_DIM {
            return Err(Error::InvalidInput(format!(
                "direction must have 2..={MAX_BOX_DIM} components, got {}",
                v.len()
            )));
        }
        let norm2: f64 = v.iter().map(|x| x * x).sum();
        if !norm2.is_finite() || (norm2.sqrt() - 1.0).abs() > DIRECTION_UNIT_TOL {
            return Err(Error::InvalidInput(format!(
                "direction {v:?} is not unit (|v| = {})",
                norm2.sqrt()
            )));
        }
        Ok(Self(v))
    }

    /// Rescale an arbitrary nonzero vector to a unit direction.
    pub fn normalized(v: Vec<f64>) -> Result<Self> {
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::InvalidInput("cannot normalize a zero vector".into()));
        }
        Self::new(v.into_iter().map(|x| x / norm).collect())
    }

    pub fn from_angle(theta: f64) -> Self {
        Self(vec![theta.cos(), theta.sin()])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }

    pub(crate) fn as2(&self) -> [f64; 2] {
        [self.0[0], self.0[1]]
    }

    pub(crate) fn as3(&self) -> [f64; 3] {
        [self.0[0], self.0[1], self.0[2]]
    }
}

/// Support numbers over a set of pair-representative directions: the body
/// `{x : |x . v_i| <= h_i}`. Directions must be pairwise distinct, also
/// after negation; supports strictly positive (origin interior).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HBody {
    dim: usize,
    directions: Vec<Direction>,
    support: Vec<f64>,
}

impl HBody {
    pub fn new(directions: Vec<Direction>, support: Vec<f64>) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::InvalidInput("hbody needs at least one direction".into()));
        }
        let dim = directions[0].dim();
        if !(dim == 2 || dim == 3) {
            return Err(Error::InvalidInput(format!("hbody dimension must be 2 or 3, got {dim}")));
        }
        if directions.iter().any(|d| d.dim() != dim) {
            return Err(Error::InvalidInput("hbody directions have mixed dimensions".into()));
        }
        if directions.len() != support.len() {
            return Err(Error::InvalidInput(format!(
                "hbody has {} directions but {} support values",
                directions.len(),
                support.len()
            )));
        }
        if support.iter().any(|h| !h.is_finite() || *h <= 0.0) {
            return Err(Error::InvalidInput("hbody support values must be finite and > 0".into()));
        }
        for i in 0..directions.len() {
            for j in (i + 1)..directions.len() {
                let d = directions[i].dot(directions[j].as_slice()).abs();
                if d >= 1.0 - DIRECTION_UNIT_TOL {
                    return Err(Error::InvalidInput(format!(
                        "directions {i} and {j} coincide or are antipodal"
                    )));
                }
            }
        }
        Ok(Self { dim, directions, support })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn with_support(&self, support: Vec<f64>) -> Result<Self> {
        Self::new(self.directions.clone(), support)
    }
}

/// Axis-aligned origin-symmetric box with the given half widths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymBox {
    half_widths: Vec<f64>,
}

impl SymBox {
    pub fn new(half_widths: Vec<f64>) -> Result<Self> {
        let n = half_widths.len();
        if !(1..=MAX_BOX_DIM).contains(&n) {
            return Err(Error::InvalidInput(format!(
                "box dimension must be 1..={MAX_BOX_DIM}, got {n}"
            )));
        }
        if half_widths.iter().any(|a| !a.is_finite() || *a <= 0.0) {
            return Err(Error::InvalidInput("box half widths must be finite and > 0".into()));
        }
        Ok(Self { half_widths })
    }

    pub fn dim(&self) -> usize {
        self.half_widths.len()
    }

    pub fn half_widths(&self) -> &[f64] {
        &self.half_widths
    }

    /// Exact polygon representation (dimension 2 only).
    pub fn to_polygon(&self) -> Result<Polytope2> {
        if self.dim() != 2 {
            return Err(Error::InvalidInput("to_polygon requires a 2D box".into()));
        }
        let (a, b) = (self.half_widths[0], self.half_widths[1]);
        Polytope2::from_vertices(vec![[a, b], [-a, b], [-a, -b], [a, -b]])
    }

    /// Exact 3-polytope representation (dimension 3 only).
    pub fn to_solid(&self) -> Result<Polytope3> {
        if self.dim() != 3 {
            return Err(Error::InvalidInput("to_solid requires a 3D box".into()));
        }
        let hb = self.to_hbody()?;
        Ok(wulff_shape_3d(&hb)?.polytope)
    }

    /// The box as prescribed support numbers on the coordinate axes
    /// (dimensions 2 and 3).
    pub fn to_hbody(&self) -> Result<HBody> {
        let n = self.dim();
        if !(n == 2 || n == 3) {
            return Err(Error::InvalidInput("to_hbody requires dimension 2 or 3".into()));
        }
        let dirs = (0..n)
            .map(|i| {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                Direction::new(v)
            })
            .collect::<Result<Vec<_>>>()?;
        HBody::new(dirs, self.half_widths.clone())
    }
}

/// Centered ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub radius: f64,
    pub dim: usize,
}

impl Ball {
    pub fn new(radius: f64, dim: usize) -> Result<Self> {
        if !(1..=MAX_BOX_DIM).contains(&dim) {
            return Err(Error::InvalidInput(format!(
                "ball dimension must be 1..={MAX_BOX_DIM}, got {dim}"
            )));
        }
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidInput("ball radius must be finite and > 0".into()));
        }
        Ok(Self { radius, dim })
    }
}

/// Common support-side interface of the concrete body types.
pub trait Body {
    fn dim(&self) -> usize;
    /// Support function, positively homogeneous in `u` (unnormalized
    /// queries allowed).
    fn support(&self, u: &[f64]) -> f64;
    /// Radial function along a unit direction.
    fn radial(&self, u: &[f64]) -> f64;
    fn contains(&self, x: &[f64]) -> bool;
}

impl Body for SymBox {
    fn dim(&self) -> usize {
        self.half_widths.len()
    }
    fn support(&self, u: &[f64]) -> f64 {
        self.half_widths.iter().zip(u).map(|(a, ui)| a * ui.abs()).sum()
    }
    fn radial(&self, u: &[f64]) -> f64 {
        self.half_widths
            .iter()
            .zip(u)
            .filter(|(_, ui)| ui.abs() > 0.0)
            .map(|(a, ui)| a / ui.abs())
            .fold(f64::INFINITY, f64::min)
    }
    fn contains(&self, x: &[f64]) -> bool {
        self.half_widths.iter().zip(x).all(|(a, xi)| xi.abs() <= *a)
    }
}

impl Body for Ball {
    fn dim(&self) -> usize {
        self.dim
    }
    fn support(&self, u: &[f64]) -> f64 {
        self.radius * u.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
    fn radial(&self, _u: &[f64]) -> f64 {
        self.radius
    }
    fn contains(&self, x: &[f64]) -> bool {
        x.iter().map(|v| v * v).sum::<f64>().sqrt() <= self.radius
    }
}

/// Runtime-dispatched body, mirroring the JSON `kind` field.
#[derive(Debug, Clone)]
pub enum AnyBody {
    Polygon(Polytope2),
    Solid(Polytope3),
    Box(SymBox),
    Ball(Ball),
}

impl Body for AnyBody {
    fn dim(&self) -> usize {
        match self {
            AnyBody::Polygon(p) => p.dim(),
            AnyBody::Solid(p) => p.dim(),
            AnyBody::Box(b) => b.dim(),
            AnyBody::Ball(b) => b.dim,
        }
    }
    fn support(&self, u: &[f64]) -> f64 {
        match self {
            AnyBody::Polygon(p) => p.support(u),
            AnyBody::Solid(p) => p.support(u),
            AnyBody::Box(b) => b.support(u),
            AnyBody::Ball(b) => b.support(u),
        }
    }
    fn radial(&self, u: &[f64]) -> f64 {
        match self {
            AnyBody::Polygon(p) => p.radial(u),
            AnyBody::Solid(p) => p.radial(u),
            AnyBody::Box(b) => b.radial(u),
            AnyBody::Ball(b) => b.radial(u),
        }
    }
    fn contains(&self, x: &[f64]) -> bool {
        match self {
            AnyBody::Polygon(p) => p.contains(x),
            AnyBody::Solid(p) => p.contains(x),
            AnyBody::Box(b) => b.contains(x),
            AnyBody::Ball(b) => b.contains(x),
        }
    }
}

/// `support_value(K, u) = max_{x in K} x . u`.
pub fn support_value(body: &dyn Body, u: &[f64]) -> Result<f64> {
    if u.len() != body.dim() {
        return Err(Error::InvalidInput(format!(
            "query dimension {} does not match body dimension {}",
            u.len(),
            body.dim()
        )));
    }
    Ok(body.support(u))
}

/// `radial_value(K, u)`: the boundary distance along a unit direction.
pub fn radial_value(body: &dyn Body, u: &[f64]) -> Result<f64> {
    if u.len() != body.dim() {
        return Err(Error::InvalidInput(format!(
            "query dimension {} does not match body dimension {}",
            u.len(),
            body.dim()
        )));
    }
    let norm: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput("radial_value requires a unit direction".into()));
    }
    Ok(body.radial(u))
}

/// Evenly spaced unit vectors on the circle.
pub fn circle_grid(m: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            vec![t.cos(), t.sin()]
        })
        .collect()
}

/// Quasi-uniform unit vectors on the sphere: icosahedron subdivided until
/// the vertex count reaches `min_count` (counts are 10*4^k + 2).
pub fn sphere_grid(min_count: usize) -> Vec<Vec<f64>> {
    let t = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    for v in verts.iter_mut() {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        *v = [v[0] / n, v[1] / n, v[2] / n];
    }
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    while verts.len() < min_count {
        let mut midpoint = std::collections::HashMap::<(usize, usize), usize>::new();
        let mut new_faces = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mid = [0usize; 3];
            for e in 0..3 {
                let (a, b) = (f[e], f[(e + 1) % 3]);
                let key = (a.min(b), a.max(b));
                mid[e] = *midpoint.entry(key).or_insert_with(|| {
                    let m = [
                        verts[a][0] + verts[b][0],
                        verts[a][1] + verts[b][1],
                        verts[a][2] + verts[b][2],
                    ];
                    let n = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
                    verts.push([m[0] / n, m[1] / n, m[2] / n]);
                    verts.len() - 1
                });
            }
            new_faces.push([f[0], mid[0], mid[2]]);
            new_faces.push([f[1], mid[1], mid[0]]);
            new_faces.push([f[2], mid[2], mid[1]]);
            new_faces.push([mid[0], mid[1], mid[2]]);
        }
        faces = new_faces;
    }
    verts.into_iter().map(|v| v.to_vec()).collect()
}

/// Grid sizes for the support-grid Hausdorff distance.
#[derive(Debug, Clone, Copy)]
pub struct HausdorffConfig {
    pub grid_2d: usize,
    pub grid_3d: usize,
}

impl Default for HausdorffConfig {
    fn default() -> Self {
        Self { grid_2d: HAUSDORFF_GRID_2D, grid_3d: HAUSDORFF_GRID_3D }
    }
}

/// Largest support gap over a fixed direction grid.
pub fn support_gap_on_grid(a: &dyn Body, b: &dyn Body, grid: &[Vec<f64>]) -> f64 {
    grid.iter().map(|u| (a.support(u) - b.support(u)).abs()).fold(0.0, f64::max)
}

/// Hausdorff distance between two bodies of equal dimension, evaluated as
/// the sup of |h_A - h_B| over a direction grid (exact for box pairs in any
/// dimension via the l2 norms of the positive and negative parts of the
/// half-width difference).
pub fn hausdorff_distance(a: &AnyBody, b: &AnyBody, cfg: &HausdorffConfig) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidInput(format!(
            "hausdorff_distance got dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    if let (AnyBody::Box(p), AnyBody::Box(q)) = (a, b) {
        let mut pos = 0.0;
        let mut neg = 0.0;
        for (x, y) in p.half_widths().iter().zip(q.half_widths()) {
            let d = x - y;
            if d > 0.0 {
                pos += d * d;
            } else {
                neg += d * d;
            }
        }
        return Ok(pos.sqrt().max(neg.sqrt()));
    }
    let grid = match a.dim() {
        2 => circle_grid(cfg.grid_2d),
        3 => sphere_grid(cfg.grid_3d),
        n => {
            return Err(Error::InvalidInput(format!(
                "hausdorff_distance supports grids in dimension 2 or 3, got {n}"
            )))
        }
    };
    Ok(support_gap_on_grid(a, b, &grid))
}

pub fn hausdorff_distance_default(a: &AnyBody, b: &AnyBody) -> Result<f64> {
    hausdorff_distance(a, b, &HausdorffConfig::default())
}

/// Componentwise Minkowski combination `(1-t) A + t B` of boxes.
pub fn minkowski_combination_box(a: &SymBox, b: &SymBox, t: f64) -> Result<SymBox> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidInput("box dimensions differ".into()));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("combination parameter must be in [0, 1], got {t}")));
    }
    SymBox::new(
        a.half_widths()
            .iter()
            .zip(b.half_widths())
            .map(|(x, y)| (1.0 - t) * x + t * y)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_validation() {
        assert!(Direction::new(vec![1.0, 0.0]).is_ok());
        assert!(Direction::new(vec![1.0, 1.0]).is_err());
        assert!(Direction::normalized(vec![1.0, 1.0]).is_ok());
        assert!(Direction::normalized(vec![0.0, 0.0]).is_err());
        let d = Direction::from_angle(0.7);
        assert!((d.dot(d.as_slice()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hbody_rejects_duplicates_and_nonpositive_support() {
        let e1 = Direction::new(vec![1.0, 0.0]).unwrap();
        let e2 = Direction::new(vec![0.0, 1.0]).unwrap();
        assert!(HBody::new(vec![e1.clone(), e2.clone()], vec![1.0, 2.0]).is_ok());
        assert!(HBody::new(vec![e1.clone(), e1.negated()], vec![1.0, 2.0]).is_err());
        assert!(HBody::new(vec![e1.clone(), e2.clone()], vec![1.0, 0.0]).is_err());
        assert!(HBody::new(vec![e1, e2], vec![1.0]).is_err());
    }

    #[test]
    fn box_and_ball_support_radial() {
        let b = SymBox::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(b.support(&[1.0, 0.0]), 1.0);
        assert_eq!(b.support(&[0.0, -1.0]), 2.0);
        // Positive homogeneity on an unnormalized query.
        assert!((b.support(&[3.0, 4.0]) - (3.0 + 8.0)).abs() < 1e-15);
        assert_eq!(b.radial(&[0.0, 1.0]), 2.0);
        assert!(b.contains(&[1.0, 2.0]));
        assert!(!b.contains(&[1.0001, 0.0]));

        let ball = Ball::new(1.5, 3).unwrap();
        assert!((ball.support(&[0.0, 1.0, 0.0]) - 1.5).abs() < 1e-15);
        assert_eq!(ball.radial(&[1.0, 0.0, 0.0]), 1.5);
        assert!(support_value(&ball, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn sphere_grid_counts_and_unit_norm() {
        let g = sphere_grid(2562);
        assert_eq!(g.len(), 2562);
        for v in g.iter().step_by(97) {
            let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn box_hausdorff_exact() {
        let a = SymBox::new(vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let b = SymBox::new(vec![1.3, 0.6, 1.0, 1.0]).unwrap();
        let d = hausdorff_distance_default(&AnyBody::Box(a), &AnyBody::Box(b)).unwrap();
        assert!((d - 0.4).abs() < 1e-15);
    }

    #[test]
    fn box_minkowski_combination() {
        let a = SymBox::new(vec![1.0, 2.0]).unwrap();
        let b = SymBox::new(vec![3.0, 1.0]).unwrap();
        let c = minkowski_combination_box(&a, &b, 0.25).unwrap();
        assert_eq!(c.half_widths(), &[1.5, 1.75]);
        assert!(minkowski_combination_box(&a, &b, 1.5).is_err());
    }
}
