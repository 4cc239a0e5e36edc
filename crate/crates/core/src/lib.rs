//! Gaussian volumes, Gaussian surface area measures, and Minkowski-type
//! solvers for origin-symmetric convex bodies.
//!
//! The library is organized around a few small pillars:
//!
//! - [`gauss`]: scalar Gaussian primitives (density, CDF, quantile, segment
//!   integrals, and the radial density of centered balls).
//! - [`geometry`]: origin-symmetric bodies (polygons, 3-polytopes, boxes,
//!   balls), Wulff shapes built from support numbers, Minkowski combinations,
//!   and support-grid Hausdorff distance.
//! - [`measure`]: Gaussian volume and the Gaussian surface area measure of a
//!   body, plus Monte Carlo cross-checks and the variational identity
//!   linking the two.
//! - [`discrete`]: the discrete even Minkowski-type solver (prescribed facet
//!   weights, plain and normalized modes).
//! - [`smooth`]: the planar smooth solver (prescribed smooth density on the
//!   circle, Newton with homotopy continuation).
//! - [`inequalities`]: numeric checks of the Ehrhard, log-concavity,
//!   Minkowski-type, and isoperimetric inequalities, plus the rectangle and
//!   ball non-uniqueness constructions.
//! - [`formats`]: serde-facing input/output schemas shared with the CLI.

use thiserror::Error;

pub mod discrete;
pub mod formats;
pub mod gauss;
pub mod geometry;
pub mod inequalities;
pub mod measure;
pub mod smooth;

/// Unified error type for the whole library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (naming the offending field or value).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A scalar argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The prescribed directions do not span the ambient space, so the
    /// halfspace intersection is unbounded.
    #[error("unbounded body: directions do not span the ambient space")]
    Unbounded,
    /// Quadrature refinement hit its cap before reaching the target
    /// tolerance; carries the best estimate and its error bound.
    #[error("quadrature did not reach tolerance {tol:e}: best estimate {estimate}, error bound {bound:e}")]
    QuadratureNoConvergence { estimate: f64, bound: f64, tol: f64 },
    /// Root bracketing or bisection stalled; carries the best bracket.
    #[error("bisection did not converge: best bracket [{lo}, {hi}]")]
    BisectionNoConvergence { lo: f64, hi: f64 },
    /// A prescribed facet degenerated (edge length or face area below 1e-12).
    #[error("facet collapse at direction index {index}")]
    FacetCollapse { index: usize },
    /// The iterate left the large-volume branch.
    #[error("branch loss: gaussian volume {volume} <= 1/2 (last good continuation parameter {last_good_t})")]
    BranchLoss { volume: f64, last_good_t: f64 },
    /// Newton (or ascent) failed to reach the residual tolerance; carries
    /// the best iterate so callers can report partial progress.
    #[error("no convergence: residual {residual:e} after {iterations} iterations (tol {tol:e})")]
    NoConvergence { residual: f64, iterations: usize, tol: f64, best: Vec<f64> },
    /// Total measure mass violates the strict upper bound 1/sqrt(2*pi).
    #[error("total mass {mass} is not below 1/sqrt(2*pi) ~ {bound}; set force_mass to attempt anyway")]
    MassTooLarge { mass: f64, bound: f64 },
    /// Damping shrank a Newton step to nothing without residual decrease.
    #[error("step collapse: damping exhausted without residual decrease")]
    StepCollapse,
    /// The smooth iterate stopped being the support function of a convex body.
    #[error("convexity loss: min(h'' + h) = {min_curvature} at grid index {index}")]
    ConvexityLoss { min_curvature: f64, index: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
