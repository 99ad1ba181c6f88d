//! Smooth compactly supported bump primitives.
//!
//! The radial exponential bump c * exp(1/(|p/r|^2 - 1)) on |p| < r is the raw
//! material for every mollifier in the crate: analytic where positive, exactly
//! zero outside the open ball, and infinitely flat at the boundary.

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use crate::params;
use crate::quad::{integrate_box, QuadratureRule};

/// Floor below which an integral no longer certifies a positive bump.
const POSITIVITY_FLOOR: f64 = 1e-12;

/// A radial exponential bump with support in the closed ball of radius
/// `radius` around the origin, scaled by `scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpFunction {
    dim: usize,
    radius: f64,
    scale: f64,
}

impl BumpFunction {
    pub fn new(dim: usize, radius: f64, scale: f64) -> Result<Self> {
        if dim == 0 || dim > 3 {
            return Err(Error::InvalidInput(format!("unsupported dimension {dim}")));
        }
        if !(radius > 0.0) || !(scale > 0.0) {
            return Err(Error::InvalidInput("radius and scale must be positive".into()));
        }
        Ok(BumpFunction { dim, radius, scale })
    }

    /// The standard bump: radius 1, scale 1.
    pub fn standard(dim: usize) -> Self {
        BumpFunction {
            dim,
            radius: 1.0,
            scale: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn with_scale(&self, scale: f64) -> Self {
        BumpFunction { scale, ..*self }
    }

    /// c * exp(1/(|p/r|^2 - 1)) for |p| < r, exactly 0 otherwise.
    ///
    /// The exponent is only evaluated while |p/r|^2 < 1 - 1e-14; beyond that
    /// the true value is below the smallest positive double anyway.
    pub fn eval(&self, p: &[f64]) -> f64 {
        debug_assert_eq!(p.len(), self.dim);
        let s: f64 = p.iter().map(|x| x * x).sum::<f64>() / (self.radius * self.radius);
        if s >= 1.0 - params::POLE_GUARD {
            return 0.0;
        }
        self.scale * (1.0 / (s - 1.0)).exp()
    }

    /// Central finite-difference approximation of the partial derivative
    /// d^beta at p, second-order stencils composed per index of beta.
    ///
    /// Exactly 0 when the whole stencil lies outside the support.
    pub fn partial(&self, beta: &MultiIndex, p: &[f64]) -> Result<f64> {
        if beta.order() > params::MAX_FD_ORDER {
            return Err(Error::OrderTooHigh {
                requested: beta.order(),
                max: params::MAX_FD_ORDER,
            });
        }
        if beta.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: beta.dim(),
                right: self.dim,
            });
        }
        let h = params::bump_fd_step(self.radius, beta.order());
        let axes = beta.axes();
        Ok(fd_compose(&|q| self.eval(q), p, &axes, h))
    }

    /// Quadrature of the bump over its support box.
    pub fn integral(&self, rule: &QuadratureRule) -> f64 {
        let support = BoxDomain::centered(self.dim, self.radius);
        integrate_box(|p| self.eval(p), &support, rule)
    }

    /// Rescale so the integral over the support equals 1.
    pub fn normalize(&self, rule: &QuadratureRule) -> Result<BumpFunction> {
        let total = self.integral(rule);
        if !(total > POSITIVITY_FLOOR) {
            return Err(Error::DegenerateBump { integral: total });
        }
        Ok(self.with_scale(self.scale / total))
    }
}

/// Composes central differences of `f` along `axes` with step `h`.
pub(crate) fn fd_compose<F>(f: &F, p: &[f64], axes: &[usize], h: f64) -> f64
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    match axes.split_first() {
        None => f(p),
        Some((&axis, rest)) => {
            let mut plus = p.to_vec();
            plus[axis] += h;
            let mut minus = p.to_vec();
            minus[axis] -= h;
            (fd_compose(f, &plus, rest, h) - fd_compose(f, &minus, rest, h)) / (2.0 * h)
        }
    }
}
