//! Numerical verification of the Gaussian inequality suite and the
//! uniqueness structure of the discrete problem.
//!
//! Everything here evaluates both sides of a known inequality (or a known
//! non-uniqueness construction) on concrete bodies, reporting the slack
//! rather than asserting, so callers can pick tolerances.

use serde::Serialize;

use crate::discrete::{solve_gaussian_minkowski, SolveOptions};
use crate::gauss::{gauss_segment_integral, inv_big_phi, phi, INV_SQRT_2PI, SQRT_2PI};
use crate::geometry::{
    minkowski_combination_2d, minkowski_combination_box, support_value, AnyBody, HBody,
};
use crate::measure::{
    facet_measures, gaussian_volume, total_gaussian_surface_area, MeasureVector, QuadratureConfig,
};
use crate::{Error, Result};

/// Both sides of one inequality instance; the claim is `lhs >= rhs`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl InequalityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, slack: lhs - rhs }
    }
}

/// One combination parameter of a two-body inequality.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CombinationSample {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// Minkowski combination `(1-t) K + t L` for the body kinds that support
/// it exactly.
pub fn combine(k: &AnyBody, l: &AnyBody, t: f64) -> Result<AnyBody> {
    match (k, l) {
        (AnyBody::Polygon(p), AnyBody::Polygon(q)) => {
            Ok(AnyBody::Polygon(minkowski_combination_2d(p, q, t)?))
        }
        (AnyBody::Box(a), AnyBody::Box(b)) => {
            Ok(AnyBody::Box(minkowski_combination_box(a, b, t)?))
        }
        _ => Err(Error::InvalidInput(
            "Minkowski combinations are supported for polygon pairs and box pairs".into(),
        )),
    }
}

/// The shifted volume comparison along Minkowski combinations: with
/// `Psi = Phi^{-1}`,
///
/// ```text
/// Psi(gamma((1-t)K + tL)) >= (1-t) Psi(gamma(K)) + t Psi(gamma(L)).
/// ```
pub fn check_ehrhard(
    k: &AnyBody,
    l: &AnyBody,
    ts: &[f64],
    quad: &QuadratureConfig,
) -> Result<Vec<CombinationSample>> {
    let gk = inv_big_phi(gaussian_volume(k, quad)?.value)?;
    let gl = inv_big_phi(gaussian_volume(l, quad)?.value)?;
    let mut out = Vec::with_capacity(ts.len());
    for &t in ts {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("combination parameter {t} outside [0, 1]")));
        }
        let mid = combine(k, l, t)?;
        let lhs = inv_big_phi(gaussian_volume(&mid, quad)?.value)?;
        let rhs = (1.0 - t) * gk + t * gl;
        out.push(CombinationSample { t, lhs, rhs, slack: lhs - rhs });
    }
    Ok(out)
}

/// The multiplicative form implied by the shifted comparison:
///
/// ```text
/// gamma((1-t)K + tL) >= gamma(K)^(1-t) gamma(L)^t,
/// ```
///
/// checked on logarithms.
pub fn check_log_concavity(
    k: &AnyBody,
    l: &AnyBody,
    ts: &[f64],
    quad: &QuadratureConfig,
) -> Result<Vec<CombinationSample>> {
    let gk = gaussian_volume(k, quad)?.value.ln();
    let gl = gaussian_volume(l, quad)?.value.ln();
    let mut out = Vec::with_capacity(ts.len());
    for &t in ts {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("combination parameter {t} outside [0, 1]")));
        }
        let mid = combine(k, l, t)?;
        let lhs = gaussian_volume(&mid, quad)?.value.ln();
        let rhs = (1.0 - t) * gk + t * gl;
        out.push(CombinationSample { t, lhs, rhs, slack: lhs - rhs });
    }
    Ok(out)
}

/// First-variation comparison: for bodies K (discrete) and L,
///
/// ```text
/// int (h_L - h_K) dS(K) >= gamma(K) ln(gamma(L) / gamma(K)),
/// ```
///
/// the derivative at t = 0 of the log-volume along the combination
/// dominating its chord. With equal volumes the right side vanishes,
/// giving the positivity of the mixed term.
pub fn check_minkowski(k: &AnyBody, l: &AnyBody, quad: &QuadratureConfig) -> Result<InequalityCheck> {
    let mv = facet_measures(k, quad)?;
    let gk = gaussian_volume(k, quad)?.value;
    let gl = gaussian_volume(l, quad)?.value;
    let mut lhs = 0.0;
    for (d, c) in mv.directions.iter().zip(&mv.weights) {
        let hl = support_value(l, d.as_slice())?;
        let hk = support_value(k, d.as_slice())?;
        lhs += 2.0 * c * (hl - hk);
    }
    Ok(InequalityCheck::new(lhs, gk * (gl / gk).ln()))
}

/// Total-measure lower bound: `|S(K)| >= phi(Psi(gamma(K)))`, with the
/// right side peaking at `1/sqrt(2 pi)` for volume 1/2.
pub fn check_isoperimetric(k: &AnyBody, quad: &QuadratureConfig) -> Result<InequalityCheck> {
    let total = total_gaussian_surface_area(k, quad)?;
    let vol = gaussian_volume(k, quad)?.value;
    Ok(InequalityCheck::new(total, phi(inv_big_phi(vol)?)))
}

/// Multi-start probe of the solution structure for one target measure.
#[derive(Debug, Clone, Serialize)]
pub struct UniquenessReport {
    pub large_solution: HBody,
    pub large_volume: f64,
    /// Number of starts that converged on the large branch.
    pub large_branch_solutions: usize,
    /// Largest support-number disagreement among them.
    pub large_branch_spread: f64,
    /// A second solution with volume <= 1/2 realizing the same measure,
    /// when a small start finds one.
    pub small_solution: Option<HBody>,
    pub small_volume: Option<f64>,
}

/// Solve the same discrete target from several start sizes. Starts in
/// `large_starts` must agree (volume > 1/2 uniqueness); starts in
/// `small_starts` run without the branch monitor and may exhibit a second
/// solution below volume 1/2.
pub fn uniqueness_experiment(
    measure: &MeasureVector,
    large_starts: &[f64],
    small_starts: &[f64],
    opts: &SolveOptions,
) -> Result<UniquenessReport> {
    if large_starts.is_empty() {
        return Err(Error::InvalidInput("need at least one large-branch start".into()));
    }
    let mut solutions: Vec<(Vec<f64>, f64)> = Vec::new();
    for &s in large_starts {
        let o = SolveOptions { initial_support: s, ..*opts };
        let rep = solve_gaussian_minkowski(measure, &o)?;
        solutions.push((rep.solution.support().to_vec(), rep.gaussian_volume));
    }
    let mut spread = 0.0f64;
    for a in 0..solutions.len() {
        for b in (a + 1)..solutions.len() {
            let gap = solutions[a]
                .0
                .iter()
                .zip(&solutions[b].0)
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            spread = spread.max(gap);
        }
    }
    let (h_large, vol_large) = solutions.swap_remove(0);

    let mut small_solution = None;
    let mut small_volume = None;
    for &s in small_starts {
        let o = SolveOptions { initial_support: s, start_small: true, ..*opts };
        if let Ok(rep) = solve_gaussian_minkowski(measure, &o) {
            let differs = rep
                .solution
                .support()
                .iter()
                .zip(&h_large)
                .any(|(x, y)| (x - y).abs() > 1e-6);
            if rep.gaussian_volume <= 0.5 && differs {
                small_volume = Some(rep.gaussian_volume);
                small_solution = Some(rep.solution);
                break;
            }
        }
    }
    Ok(UniquenessReport {
        large_solution: HBody::new(measure.directions.clone(), h_large)?,
        large_volume: vol_large,
        large_branch_solutions: large_starts.len(),
        large_branch_spread: spread,
        small_solution,
        small_volume,
    })
}

/// Closed forms for the axis rectangle `[-a1, a1] x [-a2, a2]`: the two
/// atom weights of its surface area measure and its Gaussian volume.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RectangleState {
    pub a1: f64,
    pub a2: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub gaussian_volume: f64,
}

pub fn rectangle_forward(a1: f64, a2: f64) -> Result<RectangleState> {
    if !(a1 > 0.0 && a2 > 0.0) {
        return Err(Error::Domain("rectangle half-widths must be > 0".into()));
    }
    let s1 = gauss_segment_integral(-a1, a1)?;
    let s2 = gauss_segment_integral(-a2, a2)?;
    Ok(RectangleState {
        a1,
        a2,
        mu1: phi(a1) * s2,
        mu2: phi(a2) * s1,
        gaussian_volume: s1 * s2,
    })
}

/// A one-parameter family of rectangles sharing the first atom weight
/// `mu1 = 1/sqrt(2 pi) - epsilon0`.
///
/// Feasibility demands `phi(a1) > mu1`, i.e. `a1 < delta0` with
/// `delta0 = sqrt(-2 ln(1 - sqrt(2 pi) epsilon0))`; the second weight
/// `mu2(a1)` then vanishes at both ends of `(0, delta0)` and has an
/// interior peak, so every level below the peak is attained by two
/// distinct rectangles with identical surface area measures.
#[derive(Debug, Clone, Serialize)]
pub struct RectangleSweep {
    pub epsilon0: f64,
    pub mu1: f64,
    pub delta0: f64,
    pub samples: Vec<RectangleState>,
    pub mu2_peak: f64,
    pub peak_a1: f64,
}

/// Largest feasible `a1` for the sweep level `mu1 = 1/sqrt(2 pi) - eps0`.
pub fn sweep_right_endpoint(epsilon0: f64) -> Result<f64> {
    if !(epsilon0 > 0.0 && epsilon0 < INV_SQRT_2PI) {
        return Err(Error::Domain(format!(
            "epsilon0 must lie in (0, {INV_SQRT_2PI}), got {epsilon0}"
        )));
    }
    Ok((-2.0 * (1.0 - SQRT_2PI * epsilon0).ln()).sqrt())
}

/// The rectangle with first weight `1/sqrt(2 pi) - epsilon0` and first
/// half-width `a1`.
pub fn rectangle_at(epsilon0: f64, a1: f64) -> Result<RectangleState> {
    let delta0 = sweep_right_endpoint(epsilon0)?;
    if !(a1 > 0.0 && a1 < delta0) {
        return Err(Error::Domain(format!(
            "a1 must lie in (0, {delta0}) for epsilon0 = {epsilon0}, got {a1}"
        )));
    }
    let mu1 = INV_SQRT_2PI - epsilon0;
    let a2 = inv_big_phi(0.5 * (1.0 + mu1 / phi(a1)))?;
    rectangle_forward(a1, a2)
}

pub fn rectangle_sweep(epsilon0: f64, count: usize) -> Result<RectangleSweep> {
    if count < 8 {
        return Err(Error::InvalidInput("sweep needs at least 8 samples".into()));
    }
    let delta0 = sweep_right_endpoint(epsilon0)?;
    let mu1 = INV_SQRT_2PI - epsilon0;
    let mut samples = Vec::with_capacity(count);
    let mut mu2_peak = 0.0f64;
    let mut peak_a1 = 0.0f64;
    for j in 1..=count {
        let a1 = delta0 * j as f64 / (count + 1) as f64;
        let st = rectangle_at(epsilon0, a1)?;
        if st.mu2 > mu2_peak {
            mu2_peak = st.mu2;
            peak_a1 = a1;
        }
        samples.push(st);
    }
    Ok(RectangleSweep { epsilon0, mu1, delta0, samples, mu2_peak, peak_a1 })
}

/// Two rectangles with the same surface area measure: bisect
/// `mu2(a1) = level` on both sides of the interior peak. `level_fraction`
/// picks the level as a fraction of the peak value.
pub fn rectangle_two_preimages(
    epsilon0: f64,
    level_fraction: f64,
) -> Result<(RectangleState, RectangleState)> {
    if !(level_fraction > 0.0 && level_fraction < 1.0) {
        return Err(Error::Domain("level_fraction must lie in (0, 1)".into()));
    }
    let sweep = rectangle_sweep(epsilon0, 512)?;
    let level = level_fraction * sweep.mu2_peak;
    let lo_end = sweep.delta0 * 1e-9;
    let hi_end = sweep.delta0 * (1.0 - 1e-12);
    let mu2_at = |a1: f64| -> Result<f64> { Ok(rectangle_at(epsilon0, a1)?.mu2) };
    let bisect = |mut lo: f64, mut hi: f64, rising: bool| -> Result<f64> {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let below = mu2_at(mid)? < level;
            if below == rising {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi.max(1.0) {
                break;
            }
        }
        let root = 0.5 * (lo + hi);
        if (mu2_at(root)? - level).abs() > 1e-12 {
            return Err(Error::BisectionNoConvergence { lo, hi });
        }
        Ok(root)
    };
    let left = bisect(lo_end, sweep.peak_a1, true)?;
    let right = bisect(sweep.peak_a1, hi_end, false)?;
    Ok((rectangle_at(epsilon0, left)?, rectangle_at(epsilon0, right)?))
}
