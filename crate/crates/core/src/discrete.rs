//! Discrete even Gaussian Minkowski problems.
//!
//! Given a target measure with one positive atom per antipodal direction
//! pair, find support numbers h so that the Wulff shape [h] has exactly
//! those facet weights. The map h -> G(h) is differentiated by forward
//! differences and inverted by a damped Newton iteration in log support
//! coordinates (which keeps h > 0 for free). Since the map is far from
//! affine, the target is reached along a homotopy from an easy
//! self-consistent measure.
//!
//! Two problem flavors:
//!
//! - [`solve_gaussian_minkowski`]: prescribe the measure exactly. The
//!   solution branch with Gaussian volume > 1/2 is the canonical one; it
//!   is monitored during continuation and losing it is an error unless
//!   the caller opts into the small branch.
//! - [`solve_normalized`]: prescribe the measure up to the volume factor
//!   `gamma([h])^(alpha-1)` by maximizing the concave-like functional
//!   `Gamma(h) = gamma([h])^alpha / alpha - sum_i 2 c_i h_i`; stationary
//!   points satisfy `gamma^(alpha-1) G_i = c_i`. This variant has no mass
//!   restriction on the target.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::gauss::INV_SQRT_2PI;
use crate::geometry::{wulff_shape_2d, wulff_shape_3d, Direction, HBody};
use crate::measure::{
    gaussian_volume_polygon, gaussian_volume_solid, pair_atoms_2d, pair_atoms_3d, MeasureVector,
    QuadratureConfig,
};
use crate::{Error, Result};

/// Controls for the discrete solvers.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolveOptions {
    /// Convergence threshold on `max_i |G_i(h) - c_i|`.
    pub residual_tol: f64,
    /// Newton iteration cap per continuation stage.
    pub max_newton_iters: usize,
    /// Relative forward-difference step for the Jacobian.
    pub fd_step_rel: f64,
    /// Continuation grid size between the starting measure and the target.
    pub continuation_steps: usize,
    /// All support numbers of the starting body.
    pub initial_support: f64,
    /// Accept solutions with Gaussian volume <= 1/2 instead of treating
    /// them as a lost branch.
    pub start_small: bool,
    /// Skip the total-mass admissibility check (the bound is sufficient
    /// for solvability, not necessary).
    pub force_mass: bool,
    pub quad: QuadratureConfig,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            max_newton_iters: 60,
            fd_step_rel: 1e-6,
            continuation_steps: 20,
            initial_support: 3.0,
            start_small: false,
            force_mass: false,
            quad: QuadratureConfig::solver(),
        }
    }
}

/// One accepted continuation stage.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StageTrace {
    pub t: f64,
    pub newton_iters: usize,
    pub residual: f64,
    pub gaussian_volume: f64,
}

/// Solution of the plain discrete problem.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub solution: HBody,
    pub gaussian_volume: f64,
    /// `max_i |G_i(h) - c_i|` at the solution.
    pub measure_residual: f64,
    pub on_large_branch: bool,
    pub stages: Vec<StageTrace>,
}

/// Solution of the normalized problem.
#[derive(Debug, Clone, Serialize)]
pub struct NormalizedReport {
    pub solution: HBody,
    pub alpha: f64,
    /// `Gamma(h)` at the solution (positive at an admissible maximizer).
    pub objective: f64,
    pub gaussian_volume: f64,
    /// `gamma^(alpha-1)`: the prescribed measure times this factor is the
    /// realized surface area measure of the solution.
    pub normalizer: f64,
    /// `max_i |gamma^(alpha-1) G_i - c_i|`.
    pub stationarity_residual: f64,
    /// Largest support-number disagreement between converged starts.
    pub multi_start_spread: f64,
    pub starts: usize,
}

struct Eval {
    atoms: Vec<f64>,
    vanished: Vec<usize>,
}

struct SolverCtx {
    dirs: Vec<Direction>,
    dim: usize,
    quad: QuadratureConfig,
}

impl SolverCtx {
    fn eval(&self, h: &[f64]) -> Result<Eval> {
        let hb = HBody::new(self.dirs.clone(), h.to_vec())?;
        match self.dim {
            2 => {
                let w = wulff_shape_2d(&hb)?;
                Ok(Eval { atoms: pair_atoms_2d(&w)?, vanished: w.vanished })
            }
            _ => {
                let w = wulff_shape_3d(&hb)?;
                Ok(Eval { atoms: pair_atoms_3d(&w, &self.quad)?, vanished: w.vanished })
            }
        }
    }

    fn volume(&self, h: &[f64]) -> Result<f64> {
        let hb = HBody::new(self.dirs.clone(), h.to_vec())?;
        match self.dim {
            2 => Ok(gaussian_volume_polygon(&wulff_shape_2d(&hb)?.polytope, &self.quad)?.value),
            _ => Ok(gaussian_volume_solid(&wulff_shape_3d(&hb)?.polytope, &self.quad)?.value),
        }
    }

    /// Forward-difference Jacobian `J[i][j] = dG_i/dh_j`, columns in
    /// parallel.
    fn jacobian_fd(&self, h: &[f64], atoms0: &[f64], fd_step_rel: f64) -> Result<DMatrix<f64>> {
        let k = h.len();
        let cols: Vec<Vec<f64>> = (0..k)
            .into_par_iter()
            .map(|j| -> Result<Vec<f64>> {
                let step = fd_step_rel * h[j].max(1e-8);
                let mut hp = h.to_vec();
                hp[j] += step;
                let pert = self.eval(&hp)?;
                Ok(pert.atoms.iter().zip(atoms0).map(|(a, b)| (a - b) / step).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DMatrix::from_fn(k, k, |i, j| cols[j][i]))
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn residual(atoms: &[f64], target: &[f64]) -> Vec<f64> {
    atoms.iter().zip(target).map(|(a, c)| a - c).collect()
}

/// Require the target directions to span: the second moment matrix
/// `sum_i c_i v_i v_i^T` of the measure must be positive definite.
fn spanning_check(measure: &MeasureVector) -> Result<()> {
    let n = measure.dim;
    let mut m = DMatrix::zeros(n, n);
    for (d, w) in measure.directions.iter().zip(&measure.weights) {
        let v = DVector::from_column_slice(d.as_slice());
        m += *w * &v * v.transpose();
    }
    let eig = SymmetricEigen::new(m);
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if min.is_nan() || min <= 1e-12 * max.max(1e-300) {
        return Err(Error::InvalidInput(
            "the measure is concentrated on a great subsphere: its directions do not span".into(),
        ));
    }
    Ok(())
}

fn validate_target(measure: &MeasureVector) -> Result<()> {
    if !(2..=3).contains(&measure.dim) {
        return Err(Error::InvalidInput(format!(
            "discrete solvers support dimensions 2 and 3, got {}",
            measure.dim
        )));
    }
    if measure.len() < measure.dim {
        return Err(Error::InvalidInput(format!(
            "need at least {} direction pairs in dimension {}",
            measure.dim, measure.dim
        )));
    }
    if measure.weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        return Err(Error::InvalidInput("all prescribed weights must be finite and > 0".into()));
    }
    spanning_check(measure)
}

/// One Newton solve of `G(h) = target` from the current h, in log support
/// coordinates with step damping. Mutates h only along accepted steps.
///
/// Unless `opts.start_small` is set, a trial step whose body falls to
/// volume <= 1/2 is rejected like a residual increase: the measure map is
/// two-to-one across that threshold, and an undamped step from a far
/// start can otherwise land on the small branch with a smaller residual.
fn newton_stage(
    ctx: &SolverCtx,
    h: &mut Vec<f64>,
    target: &[f64],
    opts: &SolveOptions,
) -> Result<(usize, f64)> {
    let mut cur = ctx.eval(h)?;
    let mut res = residual(&cur.atoms, target);
    let mut res_norm = inf_norm(&res);
    for iter in 0..opts.max_newton_iters {
        if res_norm <= opts.residual_tol && cur.vanished.is_empty() {
            return Ok((iter, res_norm));
        }
        let jac = ctx.jacobian_fd(h, &cur.atoms, opts.fd_step_rel)?;
        // d/du with u = ln h.
        let k = h.len();
        let jac_u = DMatrix::from_fn(k, k, |i, j| jac[(i, j)] * h[j]);
        let rhs = DVector::from_fn(k, |i, _| -res[i]);
        let du = jac_u.lu().solve(&rhs).ok_or(Error::StepCollapse)?;
        let mut lambda = 1.0;
        let mut crossed: Option<f64> = None;
        loop {
            let h_try: Vec<f64> =
                h.iter().zip(du.iter()).map(|(hi, d)| hi * (lambda * d).exp()).collect();
            if let Ok(trial) = ctx.eval(&h_try) {
                let res_try = residual(&trial.atoms, target);
                let norm_try = inf_norm(&res_try);
                let collapsed = !trial.vanished.is_empty();
                // A collapsed intermediate is allowed only if it improves
                // sharply (the facet can reopen on the next step).
                let improves =
                    (norm_try < res_norm && !collapsed) || norm_try < 0.5 * res_norm;
                let off_branch = if improves && !opts.start_small {
                    match ctx.volume(&h_try) {
                        Ok(vol) if vol <= 0.5 => {
                            crossed = Some(vol);
                            true
                        }
                        Ok(_) => false,
                        // The trial is too extreme for the volume rule to
                        // certify it; treat it like a residual increase.
                        Err(_) => true,
                    }
                } else {
                    false
                };
                if improves && !off_branch {
                    *h = h_try;
                    cur = trial;
                    res = res_try;
                    res_norm = norm_try;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 2f64.powi(-30) {
                return Err(match crossed {
                    // Every usable step left the branch: the residual can
                    // only keep shrinking on the other side of the fold.
                    Some(volume) => Error::BranchLoss { volume, last_good_t: f64::NAN },
                    None => Error::StepCollapse,
                });
            }
        }
    }
    if res_norm <= opts.residual_tol && cur.vanished.is_empty() {
        return Ok((opts.max_newton_iters, res_norm));
    }
    Err(Error::NoConvergence {
        residual: res_norm,
        iterations: opts.max_newton_iters,
        tol: opts.residual_tol,
        best: h.to_vec(),
    })
}

fn recoverable(e: &Error) -> bool {
    matches!(
        e,
        Error::NoConvergence { .. } | Error::StepCollapse | Error::FacetCollapse { .. }
    )
}

/// Solve `S(K) = measure` for an origin-symmetric polytope K.
///
/// The continuation starts from the self-consistent measure of a large
/// coordinate cross-polytope-like body (all supports equal) whose volume
/// is close to 1, and blends linearly toward the target; each stage is a
/// damped Newton solve seeded by the previous stage. Failed stages are
/// retried on bisected substeps, up to six halvings.
pub fn solve_gaussian_minkowski(
    measure: &MeasureVector,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    validate_target(measure)?;
    let total = measure.total();
    if total >= INV_SQRT_2PI && !opts.force_mass {
        return Err(Error::MassTooLarge { mass: total, bound: INV_SQRT_2PI });
    }
    let ctx = SolverCtx {
        dirs: measure.directions.clone(),
        dim: measure.dim,
        quad: opts.quad,
    };
    let mut h = vec![opts.initial_support; measure.len()];
    // Starting measure: the body [h_init] realizes it exactly.
    let c0 = ctx.eval(&h)?.atoms;
    let target = &measure.weights;
    let steps = opts.continuation_steps.max(1);
    let mut stages: Vec<StageTrace> = Vec::new();
    let mut t_cur = 0.0;
    let mut last_good_t = 0.0;
    for j in 1..=steps {
        let t_goal = j as f64 / steps as f64;
        let mut t_hi = t_goal;
        let mut depth = 0;
        while t_cur < t_goal - 1e-15 {
            let blend: Vec<f64> = c0
                .iter()
                .zip(target)
                .map(|(a, b)| (1.0 - t_hi) * a + t_hi * b)
                .collect();
            let mut h_try = h.clone();
            match newton_stage(&ctx, &mut h_try, &blend, opts) {
                Ok((iters, resid)) => {
                    let vol = ctx.volume(&h_try)?;
                    if !opts.start_small && vol <= 0.5 {
                        return Err(Error::BranchLoss { volume: vol, last_good_t });
                    }
                    h = h_try;
                    t_cur = t_hi;
                    last_good_t = t_cur;
                    stages.push(StageTrace {
                        t: t_cur,
                        newton_iters: iters,
                        residual: resid,
                        gaussian_volume: vol,
                    });
                    t_hi = t_goal;
                }
                Err(e) if recoverable(&e) && depth < 6 => {
                    t_hi = 0.5 * (t_cur + t_hi);
                    depth += 1;
                }
                Err(Error::BranchLoss { volume, .. }) => {
                    return Err(Error::BranchLoss { volume, last_good_t });
                }
                Err(e) => return Err(e),
            }
        }
    }
    let final_eval = ctx.eval(&h)?;
    let measure_residual = inf_norm(&residual(&final_eval.atoms, target));
    let gaussian_volume = ctx.volume(&h)?;
    Ok(SolveReport {
        solution: HBody::new(measure.directions.clone(), h)?,
        gaussian_volume,
        measure_residual,
        on_large_branch: gaussian_volume > 0.5,
        stages,
    })
}

/// `Gamma(h)` and its gradient in log support coordinates.
fn objective_and_grad(
    ctx: &SolverCtx,
    h: &[f64],
    c: &[f64],
    alpha: f64,
) -> Result<(f64, DVector<f64>, f64, Vec<f64>)> {
    let vol = ctx.volume(h)?;
    let atoms = ctx.eval(h)?.atoms;
    let obj = vol.powf(alpha) / alpha
        - 2.0 * h.iter().zip(c).map(|(hi, ci)| hi * ci).sum::<f64>();
    let va = vol.powf(alpha - 1.0);
    let grad = DVector::from_fn(h.len(), |i, _| 2.0 * h[i] * (va * atoms[i] - c[i]));
    Ok((obj, grad, vol, atoms))
}

/// Maximize `Gamma` from one start; returns (h, objective).
fn normalized_single_start(
    ctx: &SolverCtx,
    c: &[f64],
    alpha: f64,
    h0: &[f64],
    opts: &SolveOptions,
) -> Result<(Vec<f64>, f64)> {
    let k = c.len();
    let mut h = h0.to_vec();
    let (mut obj, mut grad, ..) = objective_and_grad(ctx, &h, c, alpha)?;
    let mut hmat = DMatrix::<f64>::identity(k, k);
    let grad_tol = 1e-8;
    for _ in 0..400 {
        if inf_norm(grad.as_slice()) <= grad_tol {
            break;
        }
        let mut p = &hmat * &grad;
        let mut slope = p.dot(&grad);
        if slope.is_nan() || slope <= 0.0 {
            hmat = DMatrix::identity(k, k);
            p = grad.clone();
            slope = p.dot(&grad);
        }
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..50 {
            let h_try: Vec<f64> =
                h.iter().zip(p.iter()).map(|(hi, d)| hi * (lambda * d).exp()).collect();
            if let Ok((obj_try, grad_try, ..)) = objective_and_grad(ctx, &h_try, c, alpha) {
                if obj_try >= obj + 1e-4 * lambda * slope {
                    accepted = Some((h_try, obj_try, grad_try));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((h_new, obj_new, grad_new)) = accepted else {
            break; // line search stalled; hand over to the polish phase
        };
        // Inverse BFGS update for the maximization (y uses the gradient
        // of -Gamma, i.e. old minus new).
        let s = DVector::from_fn(k, |i, _| (h_new[i] / h[i]).ln());
        let y = &grad - &grad_new;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            let rho = 1.0 / sy;
            let iden = DMatrix::<f64>::identity(k, k);
            let left = &iden - rho * &s * y.transpose();
            let right = &iden - rho * &y * s.transpose();
            hmat = &left * &hmat * &right + rho * &s * s.transpose();
        }
        h = h_new;
        obj = obj_new;
        grad = grad_new;
    }

    // Newton polish on the stationarity residual R = gamma^(alpha-1) G - c.
    let mut res_norm = f64::INFINITY;
    for _ in 0..40 {
        let vol = ctx.volume(&h)?;
        let atoms = ctx.eval(&h)?.atoms;
        let va = vol.powf(alpha - 1.0);
        let res: Vec<f64> = atoms.iter().zip(c).map(|(g, ci)| va * g - ci).collect();
        res_norm = inf_norm(&res);
        if res_norm <= opts.residual_tol {
            break;
        }
        let jac = ctx.jacobian_fd(&h, &atoms, opts.fd_step_rel)?;
        // dR_i/dh_j = gamma^(a-1) J_ij + (a-1) gamma^(a-2) (2 G_j) G_i.
        let vb = (alpha - 1.0) * vol.powf(alpha - 2.0);
        let jr = DMatrix::from_fn(k, k, |i, j| {
            (va * jac[(i, j)] + vb * 2.0 * atoms[j] * atoms[i]) * h[j]
        });
        let rhs = DVector::from_fn(k, |i, _| -res[i]);
        let du = jr.lu().solve(&rhs).ok_or(Error::StepCollapse)?;
        let mut lambda = 1.0;
        loop {
            let h_try: Vec<f64> =
                h.iter().zip(du.iter()).map(|(hi, d)| hi * (lambda * d).exp()).collect();
            let ok = (|| -> Result<Option<(Vec<f64>, f64)>> {
                let vol_t = ctx.volume(&h_try)?;
                let atoms_t = ctx.eval(&h_try)?.atoms;
                let vat = vol_t.powf(alpha - 1.0);
                let res_t: Vec<f64> =
                    atoms_t.iter().zip(c).map(|(g, ci)| vat * g - ci).collect();
                let n = inf_norm(&res_t);
                Ok(if n < res_norm { Some((h_try, n)) } else { None })
            })();
            match ok {
                Ok(Some((h_new, _))) => {
                    h = h_new;
                    break;
                }
                _ => {
                    lambda *= 0.5;
                    if lambda < 2f64.powi(-30) {
                        return Err(Error::StepCollapse);
                    }
                }
            }
        }
    }
    if res_norm > opts.residual_tol {
        return Err(Error::NoConvergence {
            residual: res_norm,
            iterations: 40,
            tol: opts.residual_tol,
            best: h.to_vec(),
        });
    }
    let (obj, ..) = objective_and_grad(ctx, &h, c, alpha)?;
    Ok((h, obj))
}

/// Solve the normalized problem `gamma(K)^(alpha-1) S(K) = measure` by
/// maximizing `Gamma` from several starting sizes.
pub fn solve_normalized(
    measure: &MeasureVector,
    alpha: f64,
    opts: &SolveOptions,
) -> Result<NormalizedReport> {
    validate_target(measure)?;
    let cap = 1.0 / measure.dim as f64;
    if !(alpha > 0.0 && alpha < cap) {
        return Err(Error::InvalidInput(format!(
            "alpha must lie in (0, {cap}) in dimension {}, got {alpha}",
            measure.dim
        )));
    }
    let ctx = SolverCtx {
        dirs: measure.directions.clone(),
        dim: measure.dim,
        quad: opts.quad,
    };
    let c = &measure.weights;
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut converged: Vec<Vec<f64>> = Vec::new();
    let mut last_err: Option<Error> = None;
    let scales = [0.5, 1.0, 2.0];
    for s in scales {
        let h0 = vec![s * opts.initial_support; measure.len()];
        match normalized_single_start(&ctx, c, alpha, &h0, opts) {
            Ok((h, obj)) => {
                if best.as_ref().is_none_or(|(_, b)| obj > *b) {
                    best = Some((h.clone(), obj));
                }
                converged.push(h);
            }
            Err(e) => last_err = Some(e),
        }
    }
    let (h, objective) =
        best.ok_or_else(|| last_err.unwrap_or(Error::StepCollapse))?;
    let mut spread = 0.0f64;
    for a in 0..converged.len() {
        for b in (a + 1)..converged.len() {
            let gap = converged[a]
                .iter()
                .zip(&converged[b])
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            spread = spread.max(gap);
        }
    }
    let vol = ctx.volume(&h)?;
    let atoms = ctx.eval(&h)?.atoms;
    let va = vol.powf(alpha - 1.0);
    let stationarity_residual = inf_norm(
        &atoms.iter().zip(c).map(|(g, ci)| va * g - ci).collect::<Vec<_>>(),
    );
    Ok(NormalizedReport {
        solution: HBody::new(measure.directions.clone(), h)?,
        alpha,
        objective,
        gaussian_volume: vol,
        normalizer: va,
        stationarity_residual,
        multi_start_spread: spread,
        starts: converged.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AnyBody, SymBox};
    use crate::measure::facet_measures;

    fn hexagon_measure() -> MeasureVector {
        let dirs: Vec<Direction> = (0..3)
            .map(|j| Direction::from_angle(std::f64::consts::PI * j as f64 / 3.0))
            .collect();
        let hb = HBody::new(dirs, vec![1.7, 1.9, 1.8]).unwrap();
        let p = wulff_shape_2d(&hb).unwrap().polytope;
        facet_measures(&AnyBody::Polygon(p), &QuadratureConfig::default()).unwrap()
    }

    #[test]
    fn hexagon_round_trip() {
        let target = hexagon_measure();
        let rep = solve_gaussian_minkowski(&target, &SolveOptions::default()).unwrap();
        assert!(rep.on_large_branch);
        assert!(rep.measure_residual <= 1e-10);
        let want = [1.7, 1.9, 1.8];
        // The measure's representatives may be reordered relative to the
        // original body; match by direction.
        for (d, h) in rep.solution.directions().iter().zip(rep.solution.support()) {
            let angle = d.as_slice()[1].atan2(d.as_slice()[0]);
            let j = (angle / (std::f64::consts::PI / 3.0)).round() as usize;
            assert!((h - want[j]).abs() < 1e-8, "pair {j}: got {h}, want {}", want[j]);
        }
        assert!(rep.stages.len() >= 20);
    }

    #[test]
    fn box_3d_round_trip() {
        let b = SymBox::new(vec![1.9, 2.0, 2.1]).unwrap();
        let target = facet_measures(&AnyBody::Box(b), &QuadratureConfig::default()).unwrap();
        let rep = solve_gaussian_minkowski(&target, &SolveOptions::default()).unwrap();
        assert!(rep.on_large_branch);
        let want = [1.9, 2.0, 2.1];
        for (d, h) in rep.solution.directions().iter().zip(rep.solution.support()) {
            let axis = d.as_slice().iter().position(|c| c.abs() > 0.5).unwrap();
            assert!(
                (h - want[axis]).abs() < 1e-7,
                "axis {axis}: got {h}, want {}",
                want[axis]
            );
        }
    }

    #[test]
    fn supercritical_mass_is_rejected_without_force() {
        let b = SymBox::new(vec![1.0, 1.0]).unwrap();
        let target = facet_measures(&AnyBody::Box(b), &QuadratureConfig::default()).unwrap();
        assert!(target.total() > INV_SQRT_2PI);
        match solve_gaussian_minkowski(&target, &SolveOptions::default()) {
            Err(Error::MassTooLarge { mass, bound }) => {
                assert!(mass > bound);
            }
            other => panic!("expected MassTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn branch_monitor_fires_on_supercritical_target() {
        // The unit square's measure can only be realized below volume 1/2,
        // so continuation from a large body must lose the branch.
        let b = SymBox::new(vec![1.0, 1.0]).unwrap();
        let target = facet_measures(&AnyBody::Box(b), &QuadratureConfig::default()).unwrap();
        let opts = SolveOptions { force_mass: true, ..SolveOptions::default() };
        match solve_gaussian_minkowski(&target, &opts) {
            Err(Error::BranchLoss { volume, last_good_t }) => {
                assert!(volume <= 0.5);
                assert!((0.0..1.0).contains(&last_good_t));
            }
            other => panic!("expected BranchLoss, got {other:?}"),
        }
    }

    #[test]
    fn small_branch_recovers_the_unit_square() {
        let b = SymBox::new(vec![1.0, 1.0]).unwrap();
        let target = facet_measures(&AnyBody::Box(b), &QuadratureConfig::default()).unwrap();
        let opts = SolveOptions {
            force_mass: true,
            start_small: true,
            initial_support: 1.05,
            ..SolveOptions::default()
        };
        let rep = solve_gaussian_minkowski(&target, &opts).unwrap();
        assert!(!rep.on_large_branch);
        for h in rep.solution.support() {
            assert!((h - 1.0).abs() < 1e-8, "got {h}");
        }
    }

    #[test]
    fn degenerate_targets_are_rejected() {
        let dirs = vec![
            Direction::new(vec![1.0, 0.0]).unwrap(),
            Direction::from_angle(0.01),
        ];
        let mv = MeasureVector::new(2, dirs, vec![0.05, 0.05]).unwrap();
        // Nearly parallel pairs span, but a single pair cannot.
        let lone = MeasureVector::new(
            2,
            vec![Direction::new(vec![1.0, 0.0]).unwrap()],
            vec![0.05],
        )
        .unwrap();
        assert!(matches!(
            solve_gaussian_minkowski(&lone, &SolveOptions::default()),
            Err(Error::InvalidInput(_))
        ));
        assert!(validate_target(&mv).is_ok());
    }

    #[test]
    fn normalized_square_target() {
        let dirs = vec![
            Direction::new(vec![1.0, 0.0]).unwrap(),
            Direction::new(vec![0.0, 1.0]).unwrap(),
        ];
        let mv = MeasureVector::new(2, dirs, vec![0.05, 0.05]).unwrap();
        let rep = solve_normalized(&mv, 0.3, &SolveOptions::default()).unwrap();
        assert!(rep.stationarity_residual <= 1e-9, "residual {}", rep.stationarity_residual);
        assert!(rep.objective > 0.0);
        let h = rep.solution.support();
        assert!((h[0] - h[1]).abs() < 1e-8, "asymmetric square: {h:?}");
        assert!(rep.multi_start_spread < 1e-7, "spread {}", rep.multi_start_spread);
        assert_eq!(rep.starts, 3);
        // The realized measure of the solution matches the target after
        // normalization.
        let realized = facet_measures(
            &AnyBody::Polygon(wulff_shape_2d(&rep.solution).unwrap().polytope),
            &QuadratureConfig::default(),
        )
        .unwrap();
        for w in &realized.weights {
            assert!((rep.normalizer * w - 0.05).abs() < 1e-9);
        }
        // Invalid alpha values are rejected.
        assert!(matches!(
            solve_normalized(&mv, 0.5, &SolveOptions::default()),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            solve_normalized(&mv, 0.0, &SolveOptions::default()),
            Err(Error::InvalidInput(_))
        ));
    }
}
