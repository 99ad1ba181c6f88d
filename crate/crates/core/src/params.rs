//! Central numeric parameters: step sizes, tolerances and grid resolutions.
//!
//! Every threshold used by the library lives here so that no checker carries
//! ad-hoc magic numbers. Tolerances fall into three groups: machine-level
//! (quadrature and exact identities), finite-difference (limited by stencil
//! truncation), and verdict-level (slope and ratio bounds for the asymptotic
//! claims).

/// Guard band for the exponent pole of the radial bump.
///
/// The exponent 1/(s - 1) overflows as s -> 1; the bump is treated as zero
/// once s >= 1 - POLE_GUARD.
pub const POLE_GUARD: f64 = 1e-14;

/// Finite-difference step for order-k bump derivatives of radius-r bumps.
///
/// For orders 1-2 the step is `max(1e-5, 1e-5 * r)`. Composed central
/// stencils amplify rounding by (2h)^-k, so higher orders widen the step
/// toward the optimum h ~ eps_machine^(1/(k+2)); with the fixed 1e-5 step
/// a 4th derivative of an O(1) bump is pure rounding noise.
pub fn bump_fd_step(radius: f64, order: usize) -> f64 {
    let base = match order {
        0..=2 => 1e-5,
        k => f64::EPSILON.powf(1.0 / (k as f64 + 2.0)),
    };
    (base * radius).max(base)
}

/// Highest multi-index order supported by the finite-difference stencils.
pub const MAX_FD_ORDER: usize = 4;

/// Relative finite-difference step for kernel derivatives of composed order
/// m: h = kernel_fd_rel(m) * eps. Kernel features live at scale eps, so the
/// step must shrink with it; composed stencils divide rounding noise by
/// (2h)^m, so the constant widens with the order to keep the noise floor
/// below the O(eps) signals at eps = 2^-10.
pub fn kernel_fd_rel(order: usize) -> f64 {
    match order {
        0 | 1 => 1e-3,
        2 => 1e-2,
        _ => 2e-2,
    }
}

/// Central-difference step for the flow derivative in the base-slot Lie derivative.
pub const LIE_PRIME_STEP: f64 = 1e-4;

/// Maximum Runge-Kutta step for vector field flows.
pub const FLOW_MAX_STEP: f64 = 1e-3;

/// Finite-difference step for gradients, Jacobians and divergences of
/// scale-1 smooth maps.
pub const MAP_FD_STEP: f64 = 1e-6;

/// Finite-difference step for first derivatives of reference limits
/// (the targets the checkers compare against).
pub const TARGET_FD_STEP_1: f64 = 1e-5;

/// Finite-difference step for second derivatives of reference limits.
pub const TARGET_FD_STEP_2: f64 = 1e-4;

/// Default Gauss-Legendre nodes per axis by dimension (index 0 unused).
///
/// Chosen so quadrature error stays below the RATE_FLOOR so that the
/// smallest rate-test errors at eps = 2^-10 are still signal. In 1D the bump
/// is flat at the panel endpoints and 96 nodes reach ~1e-15; in 2D the
/// support circle crosses the box interior and convergence is much slower,
/// 160 nodes per axis reach ~1e-12. 3D sees spot checks only and stays
/// coarse.
pub const DEFAULT_NODES: [usize; 4] = [0, 96, 160, 32];

/// Nodes per axis used when constructing mollifiers (normalization and
/// moment systems); construction runs once per mollifier, so it can afford
/// a finer rule than the verification integrals.
pub const CONSTRUCTION_NODES: [usize; 4] = [0, 96, 200, 48];

/// Nodes per axis for the independent high-resolution quadrature oracle.
pub const ORACLE_NODES: usize = 200;

/// Tolerance for unit integrals of mollifiers.
pub const INTEGRAL_TOL: f64 = 1e-10;

/// Tolerance for vanishing moments of order-k mollifiers. Looser than
/// INTEGRAL_TOL: higher moments amplify quadrature error near the support
/// boundary.
pub const MOMENT_TOL: f64 = 1e-8;

/// Tolerance for unit integrals of kernels phi~(eps, x) across (eps, x).
pub const KERNEL_NORM_TOL: f64 = 1e-9;

/// Error floor below which rate samples are treated as exact reproduction
/// (quadrature noise) and excluded from slope fits.
pub const RATE_FLOOR: f64 = 1e-12;

/// Dimension-aware rate floor: the tensor rules leave more quadrature junk
/// per integral as the dimension grows, and samples below that junk level
/// carry no rate information.
pub fn rate_floor(dim: usize) -> f64 {
    match dim {
        1 => RATE_FLOOR,
        2 => 1e-10,
        _ => 1e-8,
    }
}

/// Error floor for checks built on nested kernel finite differences.
/// Rounding of the shifted arguments leaves residuals above RATE_FLOOR,
/// so diagonal-derivative integrals bottom out near this level instead.
/// The FD rate checks additionally trim the rising (noise-dominated) tail
/// of their error curves before fitting.
pub const DIAG_FLOOR: f64 = 1e-8;

/// Slack subtracted from the target slope of every Landau claim; absorbs
/// finite-difference and quadrature contamination at the smallest eps.
pub const SLOPE_TOL: f64 = 0.2;

/// Bound on max/min of the rescaled sup over an eps sweep for the derivative
/// scaling condition (flat trend, no growth).
pub const SCALING_RATIO_BOUND: f64 = 10.0;

/// Smallest eps at which second-order kernel derivatives are still
/// FD-conditioned: composed stencils amplify rounding like eps^-2, which
/// overtakes the O(eps) signals below 2^-8. Checks that differentiate the
/// kernel twice truncate their sweep here.
pub const MIN_EPS_SECOND_ORDER: f64 = 3.9e-3;

/// Condition-number limit above which the moment system is reported singular.
pub const COND_LIMIT: f64 = 1e12;

/// Largest supported mollifier order.
pub const MAX_MOLLIFIER_ORDER: usize = 6;

/// Multiplicative slack on the nominal support constant C when checking
/// that derivative supports stay inside eps*C' (one shared C' per kernel).
/// Covers the sampling-grid resolution of the radius scan plus the widening
/// of finite-difference stencils, both of which overshoot the true support
/// by a fixed fraction of eps*C.
pub const SUPPORT_CONST_SLACK: f64 = 1.3;

/// Sampling resolution per axis for sup-estimates, by dimension (index 0
/// unused). These grids under-estimate the true sup; all claims checked
/// against them are upper bounds, so sampling is conservative in the right
/// direction.
pub const SUP_GRID: [usize; 4] = [0, 41, 21, 9];

/// Grid points per axis for sampling compact subsets in rate checks.
pub const COMPACT_GRID: [usize; 4] = [0, 21, 11, 5];

/// Minimum number of above-floor samples required for a slope fit.
pub const MIN_FIT_SAMPLES: usize = 4;

/// Standard epsilon sweep: eps_i = 2^-i for i = 1..=10.
pub fn standard_sweep() -> Vec<f64> {
    (1..=10).map(|i| 0.5f64.powi(i)).collect()
}
