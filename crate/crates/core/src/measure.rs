//! Gaussian volume and the Gaussian surface area measure.
//!
//! For a body K with interior origin, both quantities reduce to
//! one-dimensional angular integrals of radial kernels:
//!
//! - in the plane, the volume of a polygon is `(1/2pi) sum_edges
//!   int (1 - e^{-(d/cos phi)^2 / 2}) dphi`, one arc per edge;
//! - a 3D facet's Gaussian area is `(2pi)^{-3/2} e^{-h^2/2}` times the same
//!   angular kernel applied to the facet's in-plane fan around the foot
//!   point of its plane (signed, since the foot may fall outside the
//!   facet);
//! - the 3D volume integrates the radial antiderivative
//!   `W(u) = int_0^u e^{-t^2/2} t^2 dt` over centrally projected facets;
//!   the in-plane radial integral collapses in closed form via
//!   `d/du(-W(u)/u - e^{-u^2/2}) = W(u)/u^2`, leaving one angular
//!   quadrature per fan edge.
//!
//! Boxes and balls have closed forms and serve as cross-checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::gauss::{ball_density, big_phi, gauss_segment_integral, phi, SQRT_2PI};
use crate::geometry::{
    wulff_shape_2d, wulff_shape_3d, AnyBody, Ball, Body, Direction, HBody, Polytope2, Polytope3,
    SymBox, Wulff2, Wulff3,
};
use crate::{Error, Result};

/// Panel quadrature controls for the angular kernels.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadratureConfig {
    /// Initial panel count per edge arc.
    pub panels_per_arc: usize,
    /// Gauss-Legendre node count per panel.
    pub gauss_order: usize,
    /// Refinement stops when doubling the panel count moves the arc
    /// integral by less than this relative amount.
    pub target_rel_tol: f64,
    /// Cap on panel doublings per arc.
    pub max_refinements: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { panels_per_arc: 32, gauss_order: 16, target_rel_tol: 1e-9, max_refinements: 12 }
    }
}

impl QuadratureConfig {
    /// Tightened tolerance used inside Newton loops.
    pub fn solver() -> Self {
        Self { target_rel_tol: 1e-11, ..Self::default() }
    }
}

/// Gauss-Legendre rule on [-1, 1], nodes by Newton on the Legendre
/// recurrence.
struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn gauss_legendre(n: usize) -> GaussRule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x =
            (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut deriv = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            deriv = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / deriv;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    GaussRule { nodes, weights }
}

fn integrate_panels(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize, rule: &GaussRule) -> f64 {
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        let half = 0.5 * width;
        let mut s = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            s += w * f(mid + half * x);
        }
        total += s * half;
    }
    total
}

/// Adaptive panel quadrature over one arc with the error estimated by
/// refinement differencing. Returns (value, error bound); the sign follows
/// the orientation of the arc.
fn adaptive_arc(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
    rule: &GaussRule,
) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    if a > b {
        let (v, e) = adaptive_arc(f, b, a, cfg, rule)?;
        return Ok((-v, e));
    }
    let mut panels = cfg.panels_per_arc.max(1);
    let mut prev = integrate_panels(f, a, b, panels, rule);
    let mut err = f64::INFINITY;
    for _ in 0..cfg.max_refinements {
        panels *= 2;
        let cur = integrate_panels(f, a, b, panels, rule);
        err = (cur - prev).abs();
        if err <= cfg.target_rel_tol * cur.abs().max(1e-6) {
            return Ok((cur, err));
        }
        prev = cur;
    }
    Err(Error::QuadratureNoConvergence { estimate: prev, bound: err, tol: cfg.target_rel_tol })
}

/// One triangle of a fan decomposition, reduced to its angular data: the
/// distance `d` from the fan center to the edge line and the angle range
/// swept from the first to the second endpoint. A backwards sweep
/// (phi_a > phi_b) contributes negatively.
struct FanEdge {
    d: f64,
    phi_a: f64,
    phi_b: f64,
}

/// Fan decomposition of a polygon about the in-plane origin. Edges whose
/// line passes through the center contribute nothing and are dropped.
fn fan_edges(ys: &[[f64; 2]]) -> Vec<FanEdge> {
    let scale = ys.iter().map(|p| p[0].hypot(p[1])).fold(1.0, f64::max);
    let m = ys.len();
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let p = ys[j];
        let q = ys[(j + 1) % m];
        let e = [q[0] - p[0], q[1] - p[1]];
        let len = e[0].hypot(e[1]);
        if len < 1e-14 {
            continue;
        }
        let mut n = [e[1] / len, -e[0] / len];
        let mut d = n[0] * p[0] + n[1] * p[1];
        if d < 0.0 {
            n = [-n[0], -n[1]];
            d = -d;
        }
        if d < 1e-13 * scale {
            continue;
        }
        let t = [-n[1], n[0]];
        let phi_a = (p[0] * t[0] + p[1] * t[1]).atan2(p[0] * n[0] + p[1] * n[1]);
        let phi_b = (q[0] * t[0] + q[1] * t[1]).atan2(q[0] * n[0] + q[1] * n[1]);
        out.push(FanEdge { d, phi_a, phi_b });
    }
    out
}

/// `int_0^u e^{-t^2/2} t^2 dt`.
fn w_radial(u: f64) -> f64 {
    SQRT_2PI * (big_phi(u) - 0.5) - u * (-0.5 * u * u).exp()
}

/// Antiderivative of `W(u)/u^2` (up to sign), used to collapse the radial
/// integral of the 3D volume kernel.
fn v_radial(u: f64) -> f64 {
    -w_radial(u) / u - (-0.5 * u * u).exp()
}

/// A value with the quadrature error bound accumulated from refinement
/// differencing (zero for closed forms).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub error_bound: f64,
}

/// Gaussian measure of a centered ball: the chi distribution function,
/// i.e. the regularized lower incomplete gamma P(n/2, r^2/2).
pub fn gaussian_volume_ball(ball: &Ball) -> f64 {
    let x = 0.5 * ball.radius * ball.radius;
    let n = ball.dim;
    if n.is_multiple_of(2) {
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..n / 2 {
            term *= x / j as f64;
            sum += term;
        }
        1.0 - (-x).exp() * sum
    } else {
        let mut p = libm::erf(x.sqrt());
        let mut a = 0.5;
        let mut gamma_a1 = 0.5 * std::f64::consts::PI.sqrt();
        while 2.0 * a < n as f64 {
            p -= x.powf(a) * (-x).exp() / gamma_a1;
            a += 1.0;
            gamma_a1 *= a;
        }
        p
    }
}

/// Product closed form for an axis-aligned box.
pub fn gaussian_volume_box(b: &SymBox) -> f64 {
    b.half_widths()
        .iter()
        .map(|a| gauss_segment_integral(-a, *a).unwrap())
        .product()
}

/// Polygon volume through the angular kernel, one arc per edge.
pub fn gaussian_volume_polygon(p: &Polytope2, cfg: &QuadratureConfig) -> Result<VolumeEstimate> {
    let rule = gauss_legendre(cfg.gauss_order);
    let mut total = 0.0;
    let mut bound = 0.0;
    for edge in fan_edges(p.vertices()) {
        let d = edge.d;
        let f = move |phi: f64| {
            let r = d / phi.cos();
            1.0 - (-0.5 * r * r).exp()
        };
        let (v, e) = adaptive_arc(&f, edge.phi_a, edge.phi_b, cfg, &rule)?;
        total += v;
        bound += e;
    }
    let norm = 0.5 / std::f64::consts::PI;
    Ok(VolumeEstimate { value: norm * total, error_bound: norm * bound })
}

fn facet_plane_coords(p: &Polytope3, i: usize) -> (f64, Vec<[f64; 2]>) {
    let f = &p.facets()[i];
    let (t1, t2) = crate::geometry::facet_basis(f.normal);
    let foot = [f.support * f.normal[0], f.support * f.normal[1], f.support * f.normal[2]];
    let ys = f
        .ring
        .iter()
        .map(|&k| {
            let x = p.vertices()[k];
            let d = [x[0] - foot[0], x[1] - foot[1], x[2] - foot[2]];
            [
                d[0] * t1[0] + d[1] * t1[1] + d[2] * t1[2],
                d[0] * t2[0] + d[1] * t2[1] + d[2] * t2[2],
            ]
        })
        .collect();
    (f.support, ys)
}

/// 3-polytope volume: radial antiderivative over centrally projected
/// facets, fan-decomposed in each facet plane.
pub fn gaussian_volume_solid(p: &Polytope3, cfg: &QuadratureConfig) -> Result<VolumeEstimate> {
    let rule = gauss_legendre(cfg.gauss_order);
    let mut total = 0.0;
    let mut bound = 0.0;
    for i in 0..p.facets().len() {
        let (h, ys) = facet_plane_coords(p, i);
        let vh = v_radial(h);
        for edge in fan_edges(&ys) {
            let d = edge.d;
            let f = move |phi: f64| {
                let r = d / phi.cos();
                h * (v_radial((h * h + r * r).sqrt()) - vh)
            };
            let (v, e) = adaptive_arc(&f, edge.phi_a, edge.phi_b, cfg, &rule)?;
            total += v;
            bound += e;
        }
    }
    let norm = (2.0 * std::f64::consts::PI).powf(-1.5);
    Ok(VolumeEstimate { value: norm * total, error_bound: norm * bound })
}

/// Gaussian volume of any supported body.
pub fn gaussian_volume(body: &AnyBody, cfg: &QuadratureConfig) -> Result<VolumeEstimate> {
    match body {
        AnyBody::Polygon(p) => gaussian_volume_polygon(p, cfg),
        AnyBody::Solid(p) => gaussian_volume_solid(p, cfg),
        AnyBody::Box(b) => {
            let v = gaussian_volume_box(b);
            Ok(VolumeEstimate { value: v, error_bound: f64::EPSILON * v })
        }
        AnyBody::Ball(b) => {
            let v = gaussian_volume_ball(b);
            Ok(VolumeEstimate { value: v, error_bound: f64::EPSILON * v })
        }
    }
}

/// Even discrete measure: one weight per antipodal pair representative.
/// The reported total counts both atoms of every pair.
#[derive(Debug, Clone)]
pub struct MeasureVector {
    pub dim: usize,
    pub directions: Vec<Direction>,
    pub weights: Vec<f64>,
}

impl MeasureVector {
    pub fn new(dim: usize, directions: Vec<Direction>, weights: Vec<f64>) -> Result<Self> {
        if directions.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "measure has {} directions but {} weights",
                directions.len(),
                weights.len()
            )));
        }
        if directions.iter().any(|d| d.dim() != dim) {
            return Err(Error::InvalidInput("measure directions have mixed dimensions".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidInput("measure weights must be finite and >= 0".into()));
        }
        Ok(Self { dim, directions, weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Sum over all atoms, both members of each pair.
    pub fn total(&self) -> f64 {
        2.0 * self.weights.iter().sum::<f64>()
    }
}

/// Gaussian area of one polygon edge: the edge lies on `{x . v = h}` and
/// spans `[s_a, s_b]` in the tangential coordinate, so the atom is
/// `phi(h) (Phi(s_b) - Phi(s_a))`.
fn polygon_facet_atom(p: &Polytope2, i: usize) -> Result<f64> {
    let (a, b) = p.edge_endpoints(i);
    let n = p.facet_normals()[i];
    let t = [-n[1], n[0]];
    let sa = a[0] * t[0] + a[1] * t[1];
    let sb = b[0] * t[0] + b[1] * t[1];
    Ok(phi(p.facet_support()[i]) * gauss_segment_integral(sa, sb)?)
}

/// Gaussian area of one 3-polytope facet via the signed in-plane fan.
fn solid_facet_atom(p: &Polytope3, i: usize, cfg: &QuadratureConfig, rule: &GaussRule) -> Result<f64> {
    let (h, ys) = facet_plane_coords(p, i);
    let mut mass = 0.0;
    for edge in fan_edges(&ys) {
        let d = edge.d;
        let f = move |phi: f64| {
            let r = d / phi.cos();
            1.0 - (-0.5 * r * r).exp()
        };
        let (v, _) = adaptive_arc(&f, edge.phi_a, edge.phi_b, cfg, rule)?;
        mass += v;
    }
    let norm = (2.0 * std::f64::consts::PI).powf(-1.5);
    Ok(norm * (-0.5 * h * h).exp() * mass)
}

const EVENNESS_TOL: f64 = 1e-12;

fn fold_pair(a_plus: f64, a_minus: f64, what: &str) -> Result<f64> {
    if (a_plus - a_minus).abs() > EVENNESS_TOL * a_plus.abs().max(1.0) {
        return Err(Error::InvalidInput(format!(
            "{what}: antipodal facet weights differ by {:e}",
            (a_plus - a_minus).abs()
        )));
    }
    Ok(0.5 * (a_plus + a_minus))
}

/// The Gaussian surface area measure of a discrete body, one atom per
/// antipodal facet pair. Balls carry no atoms; see
/// [`total_gaussian_surface_area`] for their total.
pub fn facet_measures(body: &AnyBody, cfg: &QuadratureConfig) -> Result<MeasureVector> {
    match body {
        AnyBody::Polygon(p) => {
            let m = p.len();
            let mut dirs = Vec::with_capacity(m / 2);
            let mut weights = Vec::with_capacity(m / 2);
            for i in 0..m {
                let n = p.facet_normals()[i];
                if n[1] > 0.0 || (n[1] == 0.0 && n[0] > 0.0) {
                    let a_plus = polygon_facet_atom(p, i)?;
                    let a_minus = polygon_facet_atom(p, p.antipodal_facet(i))?;
                    dirs.push(Direction::new(vec![n[0], n[1]])?);
                    weights.push(fold_pair(a_plus, a_minus, "polygon measure")?);
                }
            }
            MeasureVector::new(2, dirs, weights)
        }
        AnyBody::Solid(p) => {
            let rule = gauss_legendre(cfg.gauss_order);
            let mut dirs = Vec::new();
            let mut weights = Vec::new();
            for (i, f) in p.facets().iter().enumerate() {
                let lead = f.normal.iter().find(|c| c.abs() > 1e-12).copied().unwrap_or(0.0);
                if lead > 0.0 {
                    let a_plus = solid_facet_atom(p, i, cfg, &rule)?;
                    let a_minus = solid_facet_atom(p, p.antipodal_facet(i)?, cfg, &rule)?;
                    dirs.push(Direction::new(f.normal.to_vec())?);
                    weights.push(fold_pair(a_plus, a_minus, "solid measure")?);
                }
            }
            MeasureVector::new(3, dirs, weights)
        }
        AnyBody::Box(b) => {
            let n = b.dim();
            let aw = b.half_widths();
            let mut dirs = Vec::with_capacity(n);
            let mut weights = Vec::with_capacity(n);
            for i in 0..n {
                let mut c = phi(aw[i]);
                for (j, a) in aw.iter().enumerate() {
                    if j != i {
                        c *= gauss_segment_integral(-a, *a)?;
                    }
                }
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                dirs.push(Direction::new(v)?);
                weights.push(c);
            }
            MeasureVector::new(n, dirs, weights)
        }
        AnyBody::Ball(_) => Err(Error::InvalidInput(
            "a ball has no facet atoms; use total_gaussian_surface_area".into(),
        )),
    }
}

fn gamma_half(n: usize) -> f64 {
    // Gamma(n/2) for n >= 1.
    if n.is_multiple_of(2) {
        (1..n / 2).map(|k| k as f64).product()
    } else {
        let mut g = std::f64::consts::PI.sqrt();
        for i in 0..(n - 1) / 2 {
            g *= 0.5 + i as f64;
        }
        g
    }
}

/// Surface area of the unit sphere in R^n.
fn sphere_area(n: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// Total Gaussian surface area |S(K)| of a body.
pub fn total_gaussian_surface_area(body: &AnyBody, cfg: &QuadratureConfig) -> Result<f64> {
    match body {
        AnyBody::Ball(b) => Ok(ball_density(b.radius, b.dim)? * sphere_area(b.dim)),
        _ => Ok(facet_measures(body, cfg)?.total()),
    }
}

/// Atoms aligned with the input pairs of a 2D Wulff construction
/// (vanished pairs get weight zero).
pub fn pair_atoms_2d(w: &Wulff2) -> Result<Vec<f64>> {
    w.facet_of
        .iter()
        .map(|of| match of {
            Some(i) => polygon_facet_atom(&w.polytope, *i),
            None => Ok(0.0),
        })
        .collect()
}

/// Atoms aligned with the input pairs of a 3D Wulff construction.
pub fn pair_atoms_3d(w: &Wulff3, cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    let rule = gauss_legendre(cfg.gauss_order);
    w.facet_of
        .iter()
        .map(|of| match of {
            Some(i) => solid_facet_atom(&w.polytope, *i, cfg, &rule),
            None => Ok(0.0),
        })
        .collect()
}

/// Monte Carlo estimate of the Gaussian volume.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct McVolume {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Sample standard Gaussians (Box-Muller over a seeded ChaCha stream; the
/// block-counter construction makes the stream reproducible everywhere)
/// and count membership.
pub fn monte_carlo_volume(body: &AnyBody, samples: u64, seed: u64) -> Result<McVolume> {
    if samples == 0 {
        return Err(Error::InvalidInput("monte_carlo_volume needs samples > 0".into()));
    }
    let dim = body.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spare: Option<f64> = None;
    let mut next_normal = move |rng: &mut ChaCha8Rng| -> f64 {
        if let Some(z) = spare.take() {
            return z;
        }
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
        spare = Some(r * s);
        r * c
    };
    let mut x = vec![0.0; dim];
    let mut hits: u64 = 0;
    for _ in 0..samples {
        for xi in x.iter_mut() {
            *xi = next_normal(&mut rng);
        }
        if body.contains(&x) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    Ok(McVolume {
        estimate: p,
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        seed,
    })
}

/// One slope sample of `t -> gamma_n([h + t f])`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlopeSample {
    pub t: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VariationalReport {
    /// `sum_i 2 f_i c_i`, the measure side of the first variation.
    pub measure_side: f64,
    pub slopes: Vec<SlopeSample>,
    /// Richardson extrapolation (in t^2) of the two smallest steps.
    pub extrapolated_slope: f64,
    pub relative_mismatch: f64,
}

/// Compare the central-difference derivative of the Gaussian volume along
/// a support perturbation with the integral of the perturbation against
/// the surface area measure.
pub fn variational_check(
    hb: &HBody,
    f: &[f64],
    t_values: &[f64],
    cfg: &QuadratureConfig,
) -> Result<VariationalReport> {
    if f.len() != hb.len() {
        return Err(Error::InvalidInput(format!(
            "perturbation has {} entries for {} directions",
            f.len(),
            hb.len()
        )));
    }
    if t_values.is_empty() {
        return Err(Error::InvalidInput("variational_check needs at least one step size".into()));
    }
    let volume_at = |support: Vec<f64>| -> Result<f64> {
        let hb_t = hb.with_support(support)?;
        match hb.dim() {
            2 => Ok(gaussian_volume_polygon(&wulff_shape_2d(&hb_t)?.polytope, cfg)?.value),
            _ => Ok(gaussian_volume_solid(&wulff_shape_3d(&hb_t)?.polytope, cfg)?.value),
        }
    };
    let atoms = match hb.dim() {
        2 => {
            let w = wulff_shape_2d(hb)?;
            if let Some(&i) = w.vanished.first() {
                return Err(Error::FacetCollapse { index: i });
            }
            pair_atoms_2d(&w)?
        }
        _ => {
            let w = wulff_shape_3d(hb)?;
            if let Some(&i) = w.vanished.first() {
                return Err(Error::FacetCollapse { index: i });
            }
            pair_atoms_3d(&w, cfg)?
        }
    };
    let measure_side: f64 = atoms.iter().zip(f).map(|(c, fi)| 2.0 * c * fi).sum();

    let mut slopes = Vec::with_capacity(t_values.len());
    for &t in t_values {
        if t <= 0.0 {
            return Err(Error::InvalidInput("step sizes must be positive".into()));
        }
        let plus: Vec<f64> = hb.support().iter().zip(f).map(|(h, fi)| h + t * fi).collect();
        let minus: Vec<f64> = hb.support().iter().zip(f).map(|(h, fi)| h - t * fi).collect();
        if minus.iter().any(|h| *h <= 0.0) {
            return Err(Error::InvalidInput(format!("step {t} drives a support number below 0")));
        }
        let slope = (volume_at(plus)? - volume_at(minus)?) / (2.0 * t);
        slopes.push(SlopeSample { t, slope });
    }
    let mut by_t: Vec<SlopeSample> = slopes.clone();
    by_t.sort_by(|a, b| a.t.total_cmp(&b.t));
    let extrapolated_slope = if by_t.len() >= 2 && (by_t[0].t - by_t[1].t).abs() > 0.0 {
        let (s2, t2) = (by_t[0].slope, by_t[0].t);
        let (s1, t1) = (by_t[1].slope, by_t[1].t);
        (t1 * t1 * s2 - t2 * t2 * s1) / (t1 * t1 - t2 * t2)
    } else {
        by_t[0].slope
    };
    let relative_mismatch =
        (extrapolated_slope - measure_side).abs() / measure_side.abs().max(1e-300);
    Ok(VariationalReport { measure_side, slopes, extrapolated_slope, relative_mismatch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn body_box(widths: &[f64]) -> AnyBody {
        AnyBody::Box(SymBox::new(widths.to_vec()).unwrap())
    }

    fn regular_polygon(pairs: usize, h: f64) -> Polytope2 {
        let dirs: Vec<Direction> = (0..pairs)
            .map(|j| Direction::from_angle(std::f64::consts::PI * j as f64 / pairs as f64))
            .collect();
        let hb = HBody::new(dirs, vec![h; pairs]).unwrap();
        wulff_shape_2d(&hb).unwrap().polytope
    }

    #[test]
    fn box_atoms_match_segment_form() {
        let cfg = QuadratureConfig::default();
        let mv = facet_measures(&body_box(&[1.0, 1.0]), &cfg).unwrap();
        assert_eq!(mv.len(), 2);
        for w in &mv.weights {
            assert_relative_eq!(*w, 0.165_190_871_034_016_7, max_relative = 1e-14);
        }
        assert_relative_eq!(mv.total(), 4.0 * 0.165_190_871_034_016_7, max_relative = 1e-14);
    }

    #[test]
    fn polygon_path_agrees_with_box_closed_form() {
        let cfg = QuadratureConfig::default();
        for (a, b) in [(1.0, 1.0), (0.4, 2.2), (1.75, 0.9)] {
            let sym = SymBox::new(vec![a, b]).unwrap();
            let poly = sym.to_polygon().unwrap();
            let via_poly = facet_measures(&AnyBody::Polygon(poly), &cfg).unwrap();
            let via_box = facet_measures(&AnyBody::Box(sym), &cfg).unwrap();
            for (d0, w0) in via_box.directions.iter().zip(&via_box.weights) {
                let mut found = false;
                for (d1, w1) in via_poly.directions.iter().zip(&via_poly.weights) {
                    if d0.dot(d1.as_slice()) > 1.0 - 1e-12 {
                        assert_relative_eq!(w0, w1, max_relative = 1e-12);
                        found = true;
                    }
                }
                assert!(found, "axis direction missing from polygon measure");
            }
        }
    }

    #[test]
    fn cube_atoms_and_total() {
        let cfg = QuadratureConfig::default();
        let cube = SymBox::new(vec![1.0, 1.0, 1.0]).unwrap();
        let via_box = facet_measures(&AnyBody::Box(cube.clone()), &cfg).unwrap();
        for w in &via_box.weights {
            assert_relative_eq!(*w, 0.11277407185189571, max_relative = 1e-14);
        }
        assert_relative_eq!(via_box.total(), 0.6766444311113743, max_relative = 1e-14);
        // Generic 3D fan path on the same cube.
        let solid = cube.to_solid().unwrap();
        let via_solid = facet_measures(&AnyBody::Solid(solid), &cfg).unwrap();
        assert_eq!(via_solid.len(), 3);
        for w in &via_solid.weights {
            assert_relative_eq!(*w, 0.11277407185189571, max_relative = 1e-11);
        }
    }

    #[test]
    fn octahedron_atoms_and_total() {
        let cfg = QuadratureConfig::default();
        let dirs: Vec<Direction> = [
            [1.0, 1.0, 1.0],
            [1.0, 1.0, -1.0],
            [1.0, -1.0, 1.0],
            [1.0, -1.0, -1.0],
        ]
        .iter()
        .map(|v| Direction::normalized(v.to_vec()).unwrap())
        .collect();
        let hb = HBody::new(dirs, vec![1.0; 4]).unwrap();
        let p = wulff_shape_3d(&hb).unwrap().polytope;
        let mv = facet_measures(&AnyBody::Solid(p), &cfg).unwrap();
        assert_eq!(mv.len(), 4);
        for w in &mv.weights {
            assert_relative_eq!(*w, 0.07929503700543698, max_relative = 1e-10);
        }
        assert_relative_eq!(mv.total(), 0.6343602960434959, max_relative = 1e-10);
    }

    #[test]
    fn volume_closed_forms() {
        let cfg = QuadratureConfig::default();
        let sq = gaussian_volume(&body_box(&[1.0, 1.0]), &cfg).unwrap();
        assert_relative_eq!(sq.value, 0.4660649426743923, max_relative = 1e-15);
        let cube = gaussian_volume(&body_box(&[1.0, 1.0, 1.0]), &cfg).unwrap();
        assert_relative_eq!(cube.value, 0.3181776390172809, max_relative = 1e-15);

        let b2 = Ball::new((2.0 * 2.0f64.ln()).sqrt(), 2).unwrap();
        assert_relative_eq!(gaussian_volume_ball(&b2), 0.5, max_relative = 1e-15);
        assert_relative_eq!(
            gaussian_volume_ball(&Ball::new(1.0, 3).unwrap()),
            0.1987480430987992,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            gaussian_volume_ball(&Ball::new(2.0, 4).unwrap()),
            0.5939941502901619,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            gaussian_volume_ball(&Ball::new(1.7, 5).unwrap()),
            0.28306013329973475,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            gaussian_volume_ball(&Ball::new(3.0, 10).unwrap()),
            0.467_896_423_625_284_5,
            max_relative = 1e-13
        );
    }

    #[test]
    fn polygon_volume_against_independent_oracles() {
        let cfg = QuadratureConfig::default();
        // Square via the kernel vs the product closed form.
        let sq = SymBox::new(vec![1.0, 1.0]).unwrap().to_polygon().unwrap();
        let v = gaussian_volume_polygon(&sq, &cfg).unwrap();
        assert_relative_eq!(v.value, 0.4660649426743923, max_relative = 1e-11);
        assert!(v.error_bound < 1e-9);
        // Regular hexagon with apothem 1, frozen from an arbitrary-precision
        // evaluation of the polar integral.
        let hexa = regular_polygon(3, 1.0);
        let v = gaussian_volume_polygon(&hexa, &cfg).unwrap();
        assert_relative_eq!(v.value, 0.4231530446692407, max_relative = 1e-11);
    }

    #[test]
    fn solid_volume_against_independent_oracles() {
        let cfg = QuadratureConfig::default();
        let cube = SymBox::new(vec![1.0, 1.0, 1.0]).unwrap().to_solid().unwrap();
        let v = gaussian_volume_solid(&cube, &cfg).unwrap();
        assert_relative_eq!(v.value, 0.3181776390172809, max_relative = 1e-11);
        // Octahedron |x|+|y|+|z| <= sqrt(3), frozen from an independent
        // arbitrary-precision triple integral.
        let dirs: Vec<Direction> = [
            [1.0, 1.0, 1.0],
            [1.0, 1.0, -1.0],
            [1.0, -1.0, 1.0],
            [1.0, -1.0, -1.0],
        ]
        .iter()
        .map(|v| Direction::normalized(v.to_vec()).unwrap())
        .collect();
        let hb = HBody::new(dirs, vec![1.0; 4]).unwrap();
        let p = wulff_shape_3d(&hb).unwrap().polytope;
        let v = gaussian_volume_solid(&p, &cfg).unwrap();
        assert_relative_eq!(v.value, 0.2879544734916105, max_relative = 1e-9);
        // Box with an off-center facet foot still integrates correctly.
        let slab = SymBox::new(vec![3.0, 0.4, 0.7]).unwrap();
        let direct = gaussian_volume_box(&slab);
        let via_solid = gaussian_volume_solid(&slab.to_solid().unwrap(), &cfg).unwrap();
        assert_relative_eq!(via_solid.value, direct, max_relative = 1e-10);
    }

    #[test]
    fn ball_total_surface_area() {
        let cfg = QuadratureConfig::default();
        let t = total_gaussian_surface_area(&AnyBody::Ball(Ball::new(1.0, 2).unwrap()), &cfg)
            .unwrap();
        assert_relative_eq!(t, (-0.5f64).exp(), max_relative = 1e-14);
        let t3 = total_gaussian_surface_area(&AnyBody::Ball(Ball::new(1.3, 3).unwrap()), &cfg)
            .unwrap();
        // 4 pi r^2 (2 pi)^{-3/2} e^{-r^2/2}
        let want = 4.0 * std::f64::consts::PI * 1.69 * (2.0 * std::f64::consts::PI).powf(-1.5)
            * (-0.5 * 1.69f64).exp();
        assert_relative_eq!(t3, want, max_relative = 1e-13);
    }

    #[test]
    fn tiny_and_huge_bodies_have_small_total_measure() {
        let cfg = QuadratureConfig::default();
        // A shrinking body's total tends to perimeter / 2 pi, a huge body's
        // to zero: intermediate totals are reached from both sides.
        let tiny = total_gaussian_surface_area(&body_box(&[0.01, 0.01]), &cfg).unwrap();
        let perimeter_limit = 0.08 / (2.0 * std::f64::consts::PI);
        assert_relative_eq!(tiny, perimeter_limit, max_relative = 1e-3);
        let huge = total_gaussian_surface_area(&body_box(&[10.0, 10.0]), &cfg).unwrap();
        assert!(huge < 1e-20);
    }

    #[test]
    fn polygonal_disks_approach_the_ball_total() {
        let cfg = QuadratureConfig::default();
        let ball_total = (-0.5f64).exp();
        let t48 = facet_measures(&AnyBody::Polygon(regular_polygon(48, 1.0)), &cfg)
            .unwrap()
            .total();
        let t96 = facet_measures(&AnyBody::Polygon(regular_polygon(96, 1.0)), &cfg)
            .unwrap()
            .total();
        let d48 = (t48 - ball_total).abs();
        let d96 = (t96 - ball_total).abs();
        assert!(d96 < d48);
        assert!(d48 <= std::f64::consts::PI / 48.0, "first-order bound violated: {d48}");
    }

    #[test]
    fn monte_carlo_is_reproducible_and_consistent() {
        let body = body_box(&[1.0, 1.0]);
        let a = monte_carlo_volume(&body, 100_000, 42).unwrap();
        let b = monte_carlo_volume(&body, 100_000, 42).unwrap();
        assert_eq!(a.estimate, b.estimate);
        let exact = 0.4660649426743923;
        assert!((a.estimate - exact).abs() <= 4.0 * a.std_error);
        let c = monte_carlo_volume(&body, 100_000, 7).unwrap();
        assert_ne!(a.estimate, c.estimate);
        // Gaussian halfspace mass through the same sampler.
        let slab = body_box(&[20.0, 0.6744897501960817]);
        let mc = monte_carlo_volume(&slab, 200_000, 3).unwrap();
        assert!((mc.estimate - 0.5).abs() <= 4.0 * mc.std_error);
    }

    #[test]
    fn variational_identity_on_a_hexagon() {
        let cfg = QuadratureConfig::solver();
        let dirs: Vec<Direction> = (0..3)
            .map(|j| Direction::from_angle(std::f64::consts::PI * j as f64 / 3.0))
            .collect();
        let hb = HBody::new(dirs, vec![1.4, 1.3, 1.5]).unwrap();
        let rep = variational_check(&hb, &[0.3, 1.0, 0.7], &[1e-3, 5e-4], &cfg).unwrap();
        assert!(rep.relative_mismatch < 1e-6, "mismatch {}", rep.relative_mismatch);
        assert!(rep.measure_side > 0.0);
    }

    #[test]
    fn variational_identity_on_a_cube() {
        let cfg = QuadratureConfig::solver();
        let hb = SymBox::new(vec![1.0, 1.1, 0.9]).unwrap().to_hbody().unwrap();
        let rep = variational_check(&hb, &[1.0, 0.5, 0.25], &[1e-3, 5e-4], &cfg).unwrap();
        assert!(rep.relative_mismatch < 1e-5, "mismatch {}", rep.relative_mismatch);
    }
}
