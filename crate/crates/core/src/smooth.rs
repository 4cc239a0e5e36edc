//! Smooth even Gaussian Minkowski problems in the plane.
//!
//! A smooth origin-symmetric convex body is described by its support
//! function h on the half circle (h is pi-periodic), and its Gaussian
//! surface area measure has the angular density
//!
//! ```text
//! (1/2pi) e^{-(h^2 + h'^2)/2} (h'' + h).
//! ```
//!
//! Prescribing a positive even density f therefore means solving the
//! second order ODE `h'' + h = 2 pi f e^{(h^2 + h'^2)/2}` with periodic
//! boundary conditions and the convexity constraint `h'' + h > 0`. The
//! solver discretizes on a uniform half-period grid with fourth order
//! central differences and runs a damped Newton iteration inside a
//! homotopy that starts from a constant density, where the solution is a
//! ball of known radius.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::gauss::{ball_roots, GaussScalarConfig, INV_SQRT_2PI};
use crate::{Error, Result};

/// Support function samples on the grid `theta_j = j pi / N`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupportProfile {
    pub values: Vec<f64>,
}

/// Even measure density samples on the same grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityProfile {
    pub values: Vec<f64>,
}

impl DensityProfile {
    pub fn constant(value: f64, n: usize) -> Self {
        Self { values: vec![value; n] }
    }

    /// `int_0^{2pi} f dtheta` under the rectangle rule (both half
    /// periods).
    pub fn total_mass(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.values.len() as f64
            * self.values.iter().sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SmoothOptions {
    pub residual_tol: f64,
    pub max_newton_iters: usize,
    pub homotopy_steps: usize,
}

impl Default for SmoothOptions {
    fn default() -> Self {
        Self { residual_tol: 1e-11, max_newton_iters: 50, homotopy_steps: 20 }
    }
}

/// Rolling-ball style bounds read off the density before solving.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AprioriDiagnostics {
    pub min_density: f64,
    pub max_density: f64,
    pub total_mass: f64,
    /// Whether the total mass sits below 1/sqrt(2 pi). The bound is
    /// sufficient for solvability with volume > 1/2, not necessary.
    pub subcritical: bool,
    /// Two-sided support bounds for solutions on the large branch,
    /// available when even the largest density value stays below the peak
    /// level of the ball density.
    pub support_bounds: Option<(f64, f64)>,
}

/// At an interior maximum of h the curvature radius is at most h and the
/// tangential derivative vanishes, so `h e^{-h^2/2} >= 2 pi f_min` there;
/// at a minimum the inequalities flip. On the branch `h >= 1` both
/// conditions invert through the outer root of the ball density.
pub fn apriori_diagnostics(f: &DensityProfile) -> Result<AprioriDiagnostics> {
    validate_density(f)?;
    let min_density = f.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_density = f.values.iter().cloned().fold(0.0f64, f64::max);
    let total_mass = f.total_mass();
    let cfg = GaussScalarConfig::default();
    let support_bounds = match (ball_roots(max_density, 2, &cfg)?, ball_roots(min_density, 2, &cfg)?)
    {
        (Some(hi_level), Some(lo_level)) => Some((hi_level.r_large, lo_level.r_large)),
        _ => None,
    };
    Ok(AprioriDiagnostics {
        min_density,
        max_density,
        total_mass,
        subcritical: total_mass < INV_SQRT_2PI,
        support_bounds,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SmoothStage {
    pub t: f64,
    pub newton_iters: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SmoothReport {
    pub profile: SupportProfile,
    /// `max_j |h''_j + h_j - 2 pi f_j e^{(h_j^2 + h'_j^2)/2}|`.
    pub residual: f64,
    pub gaussian_volume: f64,
    pub total_mass: f64,
    pub min_curvature_radius: f64,
    pub max_curvature_radius: f64,
    pub on_large_branch: bool,
    pub stages: Vec<SmoothStage>,
    pub diagnostics: AprioriDiagnostics,
}

/// Fourth order periodic differentiation matrices on N points spanning
/// one half period.
fn diff_matrices(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let delta = std::f64::consts::PI / n as f64;
    let mut d1 = DMatrix::zeros(n, n);
    let mut d2 = DMatrix::zeros(n, n);
    let s1 = 1.0 / (12.0 * delta);
    let s2 = 1.0 / (12.0 * delta * delta);
    for j in 0..n {
        d1[(j, (j + n - 2) % n)] += s1;
        d1[(j, (j + n - 1) % n)] += -8.0 * s1;
        d1[(j, (j + 1) % n)] += 8.0 * s1;
        d1[(j, (j + 2) % n)] += -s1;
        d2[(j, (j + n - 2) % n)] += -s2;
        d2[(j, (j + n - 1) % n)] += 16.0 * s2;
        d2[(j, j)] += -30.0 * s2;
        d2[(j, (j + 1) % n)] += 16.0 * s2;
        d2[(j, (j + 2) % n)] += -s2;
    }
    (d1, d2)
}

struct GridEval {
    residual: DVector<f64>,
    res_norm: f64,
    hp: DVector<f64>,
    rho: DVector<f64>,
    weight: DVector<f64>,
}

fn eval_grid(h: &DVector<f64>, f: &[f64], d1: &DMatrix<f64>, d2: &DMatrix<f64>) -> GridEval {
    let hp = d1 * h;
    let rho = d2 * h + h;
    let two_pi = 2.0 * std::f64::consts::PI;
    let weight = DVector::from_fn(h.len(), |j, _| {
        two_pi * f[j] * (0.5 * (h[j] * h[j] + hp[j] * hp[j])).exp()
    });
    let residual = &rho - &weight;
    let res_norm = residual.amax();
    GridEval { residual, res_norm, hp, rho, weight }
}

fn validate_density(f: &DensityProfile) -> Result<()> {
    if f.values.len() < 16 {
        return Err(Error::InvalidInput(format!(
            "density grid needs at least 16 points, got {}",
            f.values.len()
        )));
    }
    if f.values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::InvalidInput("density values must be finite and > 0".into()));
    }
    Ok(())
}

/// Tolerance enforced at grid size n with supports of the given scale:
/// the requested tolerance, or the rounding floor of the residual if that
/// is larger. Row sums of the second-difference stencil grow like
/// 16/(3 dth^2), which turns one ulp of h into that much residual noise,
/// so a fixed absolute tolerance becomes unreachable on fine grids.
fn effective_tol(n: usize, h_scale: f64, tol: f64) -> f64 {
    let dth = std::f64::consts::PI / n as f64;
    let amplification = 16.0 / (3.0 * dth * dth);
    tol.max(4.0 * f64::EPSILON * amplification * h_scale.max(1.0))
}

/// Damped Newton solve of the discretized curvature equation at a fixed
/// density, seeded by `h`. Steps that lose convexity, positivity, or fail
/// to reduce the residual are halved.
fn newton_smooth(
    h: &mut DVector<f64>,
    f: &[f64],
    d1: &DMatrix<f64>,
    d2: &DMatrix<f64>,
    opts: &SmoothOptions,
) -> Result<(usize, f64)> {
    let n = h.len();
    let mut cur = eval_grid(h, f, d1, d2);
    for iter in 0..opts.max_newton_iters {
        if cur.res_norm <= effective_tol(n, h.amax(), opts.residual_tol) {
            return Ok((iter, cur.res_norm));
        }
        // J = D2 + I - diag(w h') D1 - diag(w h).
        let mut jac = d2.clone();
        for j in 0..n {
            let wh = cur.weight[j] * cur.hp[j];
            for k in 0..n {
                jac[(j, k)] -= wh * d1[(j, k)];
            }
            jac[(j, j)] += 1.0 - cur.weight[j] * h[j];
        }
        let dh = jac.lu().solve(&(-&cur.residual)).ok_or(Error::StepCollapse)?;
        let mut lambda = 1.0;
        let mut full_step_curvature: Option<(f64, usize)> = None;
        loop {
            let h_try = &*h + lambda * &dh;
            let trial = eval_grid(&h_try, f, d1, d2);
            let min_h = h_try.min();
            let (min_rho, arg_rho) = trial
                .rho
                .iter()
                .enumerate()
                .fold((f64::INFINITY, 0), |(m, a), (j, r)| if *r < m { (*r, j) } else { (m, a) });
            if lambda == 1.0 {
                full_step_curvature = Some((min_rho, arg_rho));
            }
            if min_h > 0.0 && min_rho > 0.0 && trial.res_norm < cur.res_norm {
                *h = h_try;
                cur = trial;
                break;
            }
            lambda *= 0.5;
            if lambda < 2f64.powi(-30) {
                if let Some((min_curvature, index)) = full_step_curvature {
                    if min_curvature <= 0.0 {
                        return Err(Error::ConvexityLoss { min_curvature, index });
                    }
                }
                return Err(Error::StepCollapse);
            }
        }
    }
    let tol = effective_tol(n, h.amax(), opts.residual_tol);
    if cur.res_norm <= tol {
        return Ok((opts.max_newton_iters, cur.res_norm));
    }
    Err(Error::NoConvergence {
        residual: cur.res_norm,
        iterations: opts.max_newton_iters,
        tol,
        best: h.iter().cloned().collect(),
    })
}

/// Gaussian volume from the support samples through the divergence-form
/// boundary integral
/// `(1/2pi) oint h (h''+h) (1 - e^{-(h^2+h'^2)/2}) / (h^2+h'^2) dtheta`,
/// which the rectangle rule integrates exactly for a ball.
pub fn gaussian_volume_profile(h: &SupportProfile) -> Result<f64> {
    let n = h.values.len();
    if n < 16 {
        return Err(Error::InvalidInput("support grid needs at least 16 points".into()));
    }
    let (d1, d2) = diff_matrices(n);
    let hv = DVector::from_column_slice(&h.values);
    let hp = &d1 * &hv;
    let rho = &d2 * &hv + &hv;
    let mut acc = 0.0;
    for j in 0..n {
        let q = hv[j] * hv[j] + hp[j] * hp[j];
        acc += hv[j] * rho[j] * (1.0 - (-0.5 * q).exp()) / q;
    }
    // Two half periods, rectangle rule, normalized by 2 pi.
    Ok(acc / n as f64)
}

/// Curvature radii `h'' + h` at the grid points, by the same fourth order
/// periodic differences the solver uses.
pub fn curvature_radii(h: &SupportProfile) -> Result<Vec<f64>> {
    let n = h.values.len();
    if n < 16 {
        return Err(Error::InvalidInput("support grid needs at least 16 points".into()));
    }
    let (_, d2) = diff_matrices(n);
    let hv = DVector::from_column_slice(&h.values);
    let rho = &d2 * &hv + &hv;
    Ok(rho.iter().cloned().collect())
}

/// Solve the smooth even problem for the density `f`.
pub fn solve_smooth(f: &DensityProfile, opts: &SmoothOptions) -> Result<SmoothReport> {
    validate_density(f)?;
    let diagnostics = apriori_diagnostics(f)?;
    let n = f.values.len();
    let (d1, d2) = diff_matrices(n);
    let two_pi = 2.0 * std::f64::consts::PI;

    // Starting density: a constant low enough that the outer ball root
    // exists and sits safely away from the radius-one spectral
    // degeneracy of the linearized operator.
    let mut c0 = (0.5 * diagnostics.min_density).min(0.9 * INV_SQRT_2PI / two_pi);
    let cfg = GaussScalarConfig::default();
    let mut r0 = ball_roots(c0, 2, &cfg)?
        .ok_or_else(|| Error::Domain("starting density exceeds the ball peak".into()))?
        .r_large;
    if (r0 * r0 - 1.0).abs() <= 1e-8 {
        c0 *= 0.99;
        r0 = ball_roots(c0, 2, &cfg)?
            .ok_or_else(|| Error::Domain("starting density exceeds the ball peak".into()))?
            .r_large;
    }

    let mut h = DVector::from_element(n, r0);
    let steps = opts.homotopy_steps.max(1);
    let mut stages = Vec::new();
    let mut t_cur = 0.0;
    for j in 1..=steps {
        let t_goal = j as f64 / steps as f64;
        let mut t_hi = t_goal;
        let mut depth = 0;
        while t_cur < t_goal - 1e-15 {
            let blend: Vec<f64> =
                f.values.iter().map(|fj| (1.0 - t_hi) * c0 + t_hi * fj).collect();
            let mut h_try = h.clone();
            match newton_smooth(&mut h_try, &blend, &d1, &d2, opts) {
                Ok((iters, resid)) => {
                    h = h_try;
                    t_cur = t_hi;
                    stages.push(SmoothStage { t: t_cur, newton_iters: iters, residual: resid });
                    t_hi = t_goal;
                }
                Err(e)
                    if depth < 6
                        && matches!(
                            e,
                            Error::NoConvergence { .. }
                                | Error::StepCollapse
                                | Error::ConvexityLoss { .. }
                        ) =>
                {
                    t_hi = 0.5 * (t_cur + t_hi);
                    depth += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }

    let final_eval = eval_grid(&h, &f.values, &d1, &d2);
    let profile = SupportProfile { values: h.iter().cloned().collect() };
    let gaussian_volume = gaussian_volume_profile(&profile)?;
    let (min_rho, max_rho) = final_eval
        .rho
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(*r), hi.max(*r)));
    Ok(SmoothReport {
        profile,
        residual: final_eval.res_norm,
        gaussian_volume,
        total_mass: f.total_mass(),
        min_curvature_radius: min_rho,
        max_curvature_radius: max_rho,
        on_large_branch: gaussian_volume > 0.5,
        stages,
        diagnostics,
    })
}

/// Exact grid data of an origin-centered ellipse with semi-axes (a, b):
/// support function, curvature radius `a^2 b^2 / h^3`, and the measure
/// density it induces.
pub fn ellipse_density(a: f64, b: f64, n: usize) -> Result<(SupportProfile, DensityProfile)> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidInput("ellipse semi-axes must be > 0".into()));
    }
    let mut hs = Vec::with_capacity(n);
    let mut fs = Vec::with_capacity(n);
    let two_pi = 2.0 * std::f64::consts::PI;
    for j in 0..n {
        let th = std::f64::consts::PI * j as f64 / n as f64;
        let (s, c) = th.sin_cos();
        let h = (a * a * c * c + b * b * s * s).sqrt();
        let hp = (b * b - a * a) * s * c / h;
        let rho = a * a * b * b / (h * h * h);
        hs.push(h);
        fs.push(rho * (-0.5 * (h * h + hp * hp)).exp() / two_pi);
    }
    Ok((SupportProfile { values: hs }, DensityProfile { values: fs }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_density_yields_the_outer_ball() {
        let f = DensityProfile::constant(0.05, 64);
        let rep = solve_smooth(&f, &SmoothOptions::default()).unwrap();
        let r = 1.8961414598052869;
        for h in &rep.profile.values {
            assert!((h - r).abs() < 1e-9, "got {h}");
        }
        assert!(rep.residual <= 1e-11);
        assert!(rep.on_large_branch);
        // The divergence-form volume is exact for constants.
        assert_relative_eq!(
            rep.gaussian_volume,
            1.0 - (-0.5 * r * r).exp(),
            max_relative = 1e-12
        );
        let d = rep.diagnostics;
        assert!(d.subcritical);
        let (lo, hi) = d.support_bounds.unwrap();
        assert_relative_eq!(lo, r, max_relative = 1e-10);
        assert_relative_eq!(hi, r, max_relative = 1e-10);
    }

    #[test]
    fn ellipse_density_round_trip() {
        let (h_exact, f) = ellipse_density(1.3, 1.0, 128).unwrap();
        let rep = solve_smooth(&f, &SmoothOptions::default()).unwrap();
        let sup_err = rep
            .profile
            .values
            .iter()
            .zip(&h_exact.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(sup_err < 1e-5, "support error {sup_err}");
        assert!(rep.residual <= 1e-11);
        assert!(rep.min_curvature_radius > 0.0);
    }

    #[test]
    fn supercritical_mass_still_solves() {
        // Total mass 0.41 exceeds 1/sqrt(2 pi) ~ 0.3989, yet the constant
        // problem remains solvable with volume above 1/2: the mass bound
        // is not necessary.
        let c = 0.41 / (2.0 * std::f64::consts::PI);
        let f = DensityProfile::constant(c, 64);
        assert!(f.total_mass() > INV_SQRT_2PI);
        let rep = solve_smooth(&f, &SmoothOptions::default()).unwrap();
        assert!(!rep.diagnostics.subcritical);
        assert!(rep.on_large_branch);
        assert!(rep.gaussian_volume > 0.5);
    }

    #[test]
    fn homotopy_step_count_does_not_change_the_solution() {
        let (_, f) = ellipse_density(1.25, 0.95, 64).unwrap();
        let a = solve_smooth(&f, &SmoothOptions::default()).unwrap();
        let b = solve_smooth(
            &f,
            &SmoothOptions { homotopy_steps: 40, ..SmoothOptions::default() },
        )
        .unwrap();
        let gap = a
            .profile
            .values
            .iter()
            .zip(&b.profile.values)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(gap < 1e-8, "gap {gap}");
    }

    #[test]
    fn apriori_bounds_bracket_an_ellipse_solution() {
        let (h_exact, f) = ellipse_density(2.2, 2.0, 64).unwrap();
        let d = apriori_diagnostics(&f).unwrap();
        let (lo, hi) = d.support_bounds.unwrap();
        for h in &h_exact.values {
            assert!(lo <= *h + 1e-12 && *h <= hi + 1e-12, "{lo} <= {h} <= {hi}");
        }
    }

    #[test]
    fn invalid_densities_are_rejected() {
        let bad = DensityProfile { values: vec![0.05; 8] };
        assert!(matches!(
            solve_smooth(&bad, &SmoothOptions::default()),
            Err(Error::InvalidInput(_))
        ));
        let mut neg = DensityProfile::constant(0.05, 32);
        neg.values[3] = -0.01;
        assert!(matches!(
            solve_smooth(&neg, &SmoothOptions::default()),
            Err(Error::InvalidInput(_))
        ));
    }
}
