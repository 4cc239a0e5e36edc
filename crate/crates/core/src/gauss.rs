//! Scalar Gaussian primitives.
//!
//! Everything downstream reduces to the one-dimensional standard Gaussian:
//! the density `phi`, the distribution function `big_phi` (computed through
//! the complementary error function so the tails keep relative accuracy),
//! its inverse, segment integrals, and the radial density
//! `(2*pi)^{-n/2} e^{-r^2/2} r^{n-1}` that a centered ball of radius `r`
//! assigns to each unit normal direction.

use serde::Serialize;

use crate::{Error, Result};

/// 1/sqrt(2*pi).
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// sqrt(2*pi).
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Largest dimension the ball helpers accept.
pub const MAX_DIM: usize = 10;

/// Knobs for the scalar root finders.
#[derive(Debug, Clone, Copy)]
pub struct GaussScalarConfig {
    /// Absolute tolerance on |density - level| at a reported root.
    pub abs_tol: f64,
    /// Iteration cap for bracketing and bisection.
    pub max_iter: usize,
}

impl Default for GaussScalarConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-12, max_iter: 200 }
    }
}

/// Standard normal density.
pub fn phi(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal distribution function, `Phi(x) = erfc(-x/sqrt(2)) / 2`.
pub fn big_phi(x: f64) -> f64 {
    0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

// Coefficients of Acklam's rational initial guess for the normal quantile.
const ACKLAM_A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383_577_518_672_69e2,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const ACKLAM_B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const ACKLAM_C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const ACKLAM_D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];
const ACKLAM_P_LOW: f64 = 0.02425;

fn acklam_tail(q: f64) -> f64 {
    (((((ACKLAM_C[0] * q + ACKLAM_C[1]) * q + ACKLAM_C[2]) * q + ACKLAM_C[3]) * q + ACKLAM_C[4])
        * q
        + ACKLAM_C[5])
        / ((((ACKLAM_D[0] * q + ACKLAM_D[1]) * q + ACKLAM_D[2]) * q + ACKLAM_D[3]) * q + 1.0)
}

/// Inverse of [`big_phi`] on (0, 1).
///
/// Acklam's rational approximation seeds two Halley iterations on
/// `Phi(x) - p`, which lands within a few ulps everywhere the downstream
/// code queries (|x| up to about 8).
pub fn inv_big_phi(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("inv_big_phi requires p in (0, 1), got {p}")));
    }
    let mut x = if p < ACKLAM_P_LOW {
        acklam_tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - ACKLAM_P_LOW {
        -acklam_tail((-2.0 * (1.0 - p).ln()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((ACKLAM_A[0] * r + ACKLAM_A[1]) * r + ACKLAM_A[2]) * r + ACKLAM_A[3]) * r
            + ACKLAM_A[4])
            * r
            + ACKLAM_A[5])
            * q
            / (((((ACKLAM_B[0] * r + ACKLAM_B[1]) * r + ACKLAM_B[2]) * r + ACKLAM_B[3]) * r
                + ACKLAM_B[4])
                * r
                + 1.0)
    };
    for _ in 0..2 {
        let e = big_phi(x) - p;
        let u = e * SQRT_2PI * (0.5 * x * x).exp();
        x -= u / (1.0 + 0.5 * x * u);
    }
    Ok(x)
}

/// Gaussian mass of the segment `[a, b]`, i.e. `Phi(b) - Phi(a)`.
///
/// Endpoints may be infinite. The difference is formed on whichever side of
/// the origin keeps the erfc arguments positive, so segments deep in a tail
/// (endpoints up to |x| ~ 8 occur in facet measures) retain relative
/// accuracy instead of cancelling.
pub fn gauss_segment_integral(a: f64, b: f64) -> Result<f64> {
    if a.is_nan() || b.is_nan() {
        return Err(Error::Domain("gauss_segment_integral got a NaN endpoint".into()));
    }
    if a > b {
        return Err(Error::Domain(format!(
            "gauss_segment_integral requires a <= b, got a = {a}, b = {b}"
        )));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = if a >= 0.0 {
        // Both endpoints in the upper tail.
        0.5 * (libm::erfc(a * s) - if b.is_infinite() { 0.0 } else { libm::erfc(b * s) })
    } else if b <= 0.0 {
        // Mirror image of the previous case.
        0.5 * (libm::erfc(-b * s) - if a.is_infinite() { 0.0 } else { libm::erfc(-a * s) })
    } else {
        // Straddles the origin: the erf values add without cancellation.
        let ea = if a.is_infinite() { -1.0 } else { libm::erf(a * s) };
        let eb = if b.is_infinite() { 1.0 } else { libm::erf(b * s) };
        0.5 * (eb - ea)
    };
    Ok(v.max(0.0))
}

fn check_ball_dim(n: usize) -> Result<()> {
    if !(1..=MAX_DIM).contains(&n) {
        return Err(Error::Domain(format!("ball dimension must be in 1..={MAX_DIM}, got {n}")));
    }
    Ok(())
}

/// Density of the Gaussian surface area measure of a centered ball of
/// radius `r` in dimension `n`: `(2*pi)^{-n/2} e^{-r^2/2} r^{n-1}`.
pub fn ball_density(r: f64, n: usize) -> Result<f64> {
    check_ball_dim(n)?;
    if !r.is_finite() || r < 0.0 {
        return Err(Error::Domain(format!("ball_density requires a finite r >= 0, got {r}")));
    }
    let norm = (2.0 * std::f64::consts::PI).powf(-(n as f64) / 2.0);
    Ok(norm * (-0.5 * r * r).exp() * r.powi(n as i32 - 1))
}

/// The radii at which [`ball_density`] hits a prescribed level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallDensityRoots {
    pub r_small: f64,
    pub r_large: f64,
    /// Radius of the unique interior maximum, `sqrt(n - 1)`.
    pub r_peak: f64,
    /// True when the level sits at the peak and the two roots coincide.
    pub at_peak: bool,
}

/// Solve `ball_density(r, n) = c` for `r`.
///
/// The density vanishes at 0 and at infinity with a single interior peak at
/// `sqrt(n - 1)`, so a positive level below the peak is hit exactly twice,
/// the peak level once, and larger levels never (returned as `None`).
pub fn ball_roots(c: f64, n: usize, cfg: &GaussScalarConfig) -> Result<Option<BallDensityRoots>> {
    check_ball_dim(n)?;
    if n < 2 {
        return Err(Error::Domain(
            "ball_roots requires n >= 2 (no interior peak in dimension 1)".into(),
        ));
    }
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::Domain(format!("ball_roots requires a finite level c > 0, got {c}")));
    }
    let r_peak = ((n - 1) as f64).sqrt();
    let peak = ball_density(r_peak, n)?;
    if c > peak + cfg.abs_tol {
        return Ok(None);
    }
    if (c - peak).abs() <= cfg.abs_tol {
        return Ok(Some(BallDensityRoots { r_small: r_peak, r_large: r_peak, r_peak, at_peak: true }));
    }
    let r_small = bisect_density(c, n, 0.0, r_peak, cfg)?;
    // Bracket the outer root by doubling the distance from the peak.
    let mut hi = r_peak + 1.0;
    let mut guard = 0;
    while ball_density(hi, n)? >= c {
        hi = r_peak + 2.0 * (hi - r_peak);
        guard += 1;
        if guard > cfg.max_iter {
            return Err(Error::BisectionNoConvergence { lo: r_peak, hi });
        }
    }
    let r_large = bisect_density(c, n, r_peak, hi, cfg)?;
    Ok(Some(BallDensityRoots { r_small, r_large, r_peak, at_peak: false }))
}

/// Bisection for `ball_density(., n) = c` on a bracket where the density is
/// monotone. `lo` carries the sub-level side on [0, peak] brackets and the
/// super-level side on [peak, inf) brackets; the sign test below covers both.
fn bisect_density(c: f64, n: usize, mut lo: f64, mut hi: f64, cfg: &GaussScalarConfig) -> Result<f64> {
    let rising = ball_density(lo, n)? < c;
    for _ in 0..cfg.max_iter {
        let mid = 0.5 * (lo + hi);
        let below = ball_density(mid, n)? < c;
        if below == rising {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= f64::EPSILON * hi.max(1.0) {
            break;
        }
    }
    let root = 0.5 * (lo + hi);
    if (ball_density(root, n)? - c).abs() > cfg.abs_tol {
        return Err(Error::BisectionNoConvergence { lo, hi });
    }
    Ok(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn density_values() {
        assert_relative_eq!(phi(0.0), 0.3989422804014327, max_relative = 1e-15);
        assert_relative_eq!(phi(2.0), 0.05399096651318806, max_relative = 1e-15);
        assert_eq!(phi(3.0), phi(-3.0));
    }

    #[test]
    fn cdf_values_and_symmetry() {
        assert_eq!(big_phi(0.0), 0.5);
        assert_relative_eq!(big_phi(1.0), 0.8413447460685429, max_relative = 1e-15);
        assert_relative_eq!(big_phi(-3.0), 0.0013498980316300946, max_relative = 1e-14);
        assert_relative_eq!(big_phi(-8.0), 6.220960574271784e-16, max_relative = 1e-13);
        for k in 0..60 {
            let x = -6.0 + 0.2 * k as f64;
            assert!((big_phi(x) + big_phi(-x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn quantile_round_trip() {
        assert_relative_eq!(inv_big_phi(0.975).unwrap(), 1.9599639845400542, max_relative = 1e-12);
        for k in 0..=100 {
            let x = -5.0 + 0.1 * k as f64;
            let back = inv_big_phi(big_phi(x)).unwrap();
            assert!((back - x).abs() <= 1e-10, "round trip at {x}: {back}");
        }
        assert!(inv_big_phi(0.0).is_err());
        assert!(inv_big_phi(1.0).is_err());
        assert!(inv_big_phi(-0.3).is_err());
    }

    /// On [1/2, 1) the quantile and its derivative sqrt(2*pi) e^{Psi^2/2}
    /// are both strictly increasing; the derivative matches a central
    /// difference of the quantile itself.
    #[test]
    fn quantile_derivative_identity_and_monotonicity() {
        let psi = |p: f64| inv_big_phi(p).unwrap();
        let dpsi = |p: f64| SQRT_2PI * (0.5 * psi(p) * psi(p)).exp();
        assert_relative_eq!(dpsi(0.7), 2.876_103_659_264_292, max_relative = 1e-12);
        let delta = 1e-6;
        let fd = (psi(0.7 + delta) - psi(0.7 - delta)) / (2.0 * delta);
        assert_relative_eq!(fd, dpsi(0.7), max_relative = 1e-5);
        let mut prev_psi = f64::NEG_INFINITY;
        let mut prev_dpsi = 0.0;
        for k in 0..=48 {
            let p = 0.5 + 0.01 * k as f64;
            assert!(psi(p) > prev_psi);
            assert!(dpsi(p) > prev_dpsi);
            prev_psi = psi(p);
            prev_dpsi = dpsi(p);
        }
    }

    #[test]
    fn segment_integrals() {
        assert_relative_eq!(
            gauss_segment_integral(-1.0, 1.0).unwrap(),
            0.6826894921370859,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            gauss_segment_integral(2.0, 3.0).unwrap(),
            0.021400233916549112,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            gauss_segment_integral(8.0, f64::INFINITY).unwrap(),
            6.220960574271784e-16,
            max_relative = 1e-13
        );
        assert_eq!(gauss_segment_integral(f64::NEG_INFINITY, f64::INFINITY).unwrap(), 1.0);
        assert_eq!(gauss_segment_integral(1.3, 1.3).unwrap(), 0.0);
        assert_relative_eq!(
            gauss_segment_integral(f64::NEG_INFINITY, 0.0).unwrap(),
            0.5,
            max_relative = 1e-15
        );
        assert!(gauss_segment_integral(1.0, 0.0).is_err());
        assert!(gauss_segment_integral(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn segment_additivity() {
        for (a, b, c) in [(-3.0, -0.5, 2.0), (-1.0, 0.0, 1.0), (0.25, 1.5, 6.0)] {
            let ab = gauss_segment_integral(a, b).unwrap();
            let bc = gauss_segment_integral(b, c).unwrap();
            let ac = gauss_segment_integral(a, c).unwrap();
            assert!((ab + bc - ac).abs() < 1e-15);
        }
    }

    #[test]
    fn ball_density_values_and_peak() {
        assert_relative_eq!(ball_density(1.0, 2).unwrap(), 0.09653235263005391, max_relative = 1e-15);
        // Monotone increase below the peak, decrease above, for several n.
        for n in 2..=5 {
            let r_peak = ((n - 1) as f64).sqrt();
            let mut prev = 0.0;
            for k in 1..=20 {
                let r = r_peak * k as f64 / 20.0;
                let d = ball_density(r, n).unwrap();
                assert!(d > prev, "not increasing below peak at n={n}, r={r}");
                prev = d;
            }
            for k in 1..=20 {
                let r = r_peak + k as f64 / 4.0;
                let d = ball_density(r, n).unwrap();
                assert!(d < prev, "not decreasing above peak at n={n}, r={r}");
                prev = d;
            }
        }
        assert!(ball_density(-1.0, 2).is_err());
        assert!(ball_density(1.0, 0).is_err());
        assert!(ball_density(1.0, 11).is_err());
    }

    #[test]
    fn ball_roots_two_root_structure() {
        let cfg = GaussScalarConfig::default();
        let roots = ball_roots(0.05, 2, &cfg).unwrap().unwrap();
        assert!(!roots.at_peak);
        assert_relative_eq!(roots.r_small, 0.33195414765670296, max_relative = 1e-12);
        assert_relative_eq!(roots.r_large, 1.8961414598052869, max_relative = 1e-12);
        assert_eq!(roots.r_peak, 1.0);
        for r in [roots.r_small, roots.r_large] {
            assert!((ball_density(r, 2).unwrap() - 0.05).abs() <= 1e-10);
        }

        let peak = ball_density(1.0, 2).unwrap();
        assert!(ball_roots(peak * 1.001, 2, &cfg).unwrap().is_none());
        let at_peak = ball_roots(peak, 2, &cfg).unwrap().unwrap();
        assert!(at_peak.at_peak);
        assert_eq!(at_peak.r_small, at_peak.r_large);

        // Same structure in a higher dimension.
        let r5 = ball_roots(0.001, 5, &cfg).unwrap().unwrap();
        assert!(r5.r_small < 2.0 && r5.r_large > 2.0);
        assert!((ball_density(r5.r_small, 5).unwrap() - 0.001).abs() <= 1e-10);
        assert!((ball_density(r5.r_large, 5).unwrap() - 0.001).abs() <= 1e-10);

        assert!(ball_roots(0.05, 1, &cfg).is_err());
        assert!(ball_roots(0.0, 2, &cfg).is_err());
    }
}
