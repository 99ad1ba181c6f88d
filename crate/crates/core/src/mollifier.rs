//! Order-k mollifiers: test functions with unit integral and vanishing
//! moments up to order k.
//!
//! The construction multiplies a radial bump b by a polynomial p of total
//! degree <= k whose coefficients solve the moment system
//! integral(y^alpha p(y) b(y) dy) = delta_{alpha,0} for |alpha| <= k. Killing
//! the moments kills the corresponding Taylor terms of any smooth f, which is
//! what makes integrals against the scaled kernel reproduce f to O(eps^{k+1}).

use crate::approx_props::{two_point_order, TwoPointField};
use crate::bump::BumpFunction;
use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::kernel::LocalSmoothingKernel;
use crate::linalg::{solve_checked, Matrix};
use crate::multi_index::MultiIndex;
use crate::params;
use crate::quad::{integrate_box, QuadratureRule};
use crate::rate::RateReport;

/// A polynomial-corrected bump with unit integral and declared vanishing-
/// moment order.
#[derive(Debug, Clone)]
pub struct Mollifier {
    dim: usize,
    base: BumpFunction,
    /// Coefficients of the correction polynomial p, one per multi-index.
    coeffs: Vec<(MultiIndex, f64)>,
    order: usize,
}

impl Mollifier {
    /// Builds the order-k mollifier on `base` by solving the moment system
    /// with the construction-grade quadrature rule.
    ///
    /// The base is normalized first, so for symmetric bases and k = 0 the
    /// correction polynomial is identically 1.
    pub fn build_order_k(base: &BumpFunction, k: usize) -> Result<Mollifier> {
        Self::build_order_k_with_rule(base, k, &QuadratureRule::construction_for_dim(base.dim()))
    }

    pub fn build_order_k_with_rule(
        base: &BumpFunction,
        k: usize,
        rule: &QuadratureRule,
    ) -> Result<Mollifier> {
        if k > params::MAX_MOLLIFIER_ORDER {
            return Err(Error::OrderTooHigh {
                requested: k,
                max: params::MAX_MOLLIFIER_ORDER,
            });
        }
        let base = base.normalize(rule)?;
        let n = base.dim();
        let indices = MultiIndex::all_up_to(n, k);
        let m = indices.len();

        // Raw moments of the normalized base up to order 2k feed the Gram
        // matrix G[a][b] = integral(y^{a+b} base).
        let mut gram = Matrix::zeros(m);
        for (row, alpha) in indices.iter().enumerate() {
            for (col, beta) in indices.iter().enumerate() {
                let gamma = alpha.add(beta);
                gram.set(row, col, base_moment(&base, &gamma, rule));
            }
        }
        let mut rhs = vec![0.0; m];
        rhs[0] = 1.0;
        let solution = solve_checked(&gram, &rhs, params::COND_LIMIT)?;

        Ok(Mollifier {
            dim: n,
            base,
            coeffs: indices.into_iter().zip(solution).collect(),
            order: k,
        })
    }

    /// A mollifier with an explicit correction polynomial, rescaled to unit
    /// integral; declared order 0. Used for deliberately asymmetric kernels.
    pub fn with_polynomial(base: &BumpFunction, coeffs: Vec<(MultiIndex, f64)>) -> Result<Mollifier> {
        let rule = QuadratureRule::construction_for_dim(base.dim());
        let base = base.normalize(&rule)?;
        let unscaled = Mollifier {
            dim: base.dim(),
            base: base.clone(),
            coeffs,
            order: 0,
        };
        let total = unscaled.moment_with_rule(&MultiIndex::zero(base.dim()), &rule);
        if !(total.abs() > 1e-12) {
            return Err(Error::DegenerateBump { integral: total });
        }
        Ok(Mollifier {
            coeffs: unscaled
                .coeffs
                .into_iter()
                .map(|(mi, c)| (mi, c / total))
                .collect(),
            ..unscaled
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Declared vanishing-moment order k.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Support radius (that of the underlying bump).
    pub fn radius(&self) -> f64 {
        self.base.radius()
    }

    pub fn coefficients(&self) -> &[(MultiIndex, f64)] {
        &self.coeffs
    }

    /// p(y) * base(y); exactly 0 outside the support ball.
    pub fn eval(&self, y: &[f64]) -> f64 {
        let b = self.base.eval(y);
        if b == 0.0 {
            return 0.0;
        }
        let p: f64 = self.coeffs.iter().map(|(mi, c)| c * mi.monomial(y)).sum();
        p * b
    }

    /// Quadrature value of integral(y^alpha phi(y) dy) over the support,
    /// with the default verification rule.
    pub fn moment(&self, alpha: &MultiIndex) -> f64 {
        self.moment_with_rule(alpha, &QuadratureRule::default_for_dim(self.dim))
    }

    pub fn moment_with_rule(&self, alpha: &MultiIndex, rule: &QuadratureRule) -> f64 {
        let support = BoxDomain::centered(self.dim, self.radius());
        integrate_box(|y| alpha.monomial(y) * self.eval(y), &support, rule)
    }

    /// Largest deviation of the moments from their targets: |m_0 - 1| and
    /// |m_alpha| for 1 <= |alpha| <= k.
    pub fn max_moment_residual(&self, rule: &QuadratureRule) -> f64 {
        let mut worst: f64 = 0.0;
        for alpha in MultiIndex::all_up_to(self.dim, self.order) {
            let target = if alpha.is_zero() { 1.0 } else { 0.0 };
            worst = worst.max((self.moment_with_rule(&alpha, rule) - target).abs());
        }
        worst
    }
}

fn base_moment(base: &BumpFunction, gamma: &MultiIndex, rule: &QuadratureRule) -> f64 {
    let support = BoxDomain::centered(base.dim(), base.radius());
    integrate_box(|y| gamma.monomial(y) * base.eval(y), &support, rule)
}

/// Per-function outcome of [`verify_order`].
#[derive(Debug)]
pub struct OrderVerification {
    /// (function name, rate report with target (k+1) - 0.2).
    pub reports: Vec<(String, RateReport)>,
    /// True when every non-degenerate suite function meets the target slope;
    /// floor cases count as exact reproduction.
    pub pass: bool,
}

/// Checks the declared order through the canonical kernel built from `phi`:
/// for each f in the suite, fits the slope of
/// sup_x |f(x) - integral f(y) phi~(eps, x)(y) dy| over the sweep, and
/// demands slope >= (k+1) - 0.2 unless the errors sit at the floor.
pub fn verify_order(
    phi: &Mollifier,
    suite: &[(String, crate::ScalarFn)],
    sweep: &[f64],
) -> Result<OrderVerification> {
    if suite.is_empty() {
        return Err(Error::InvalidInput("empty test-function suite".into()));
    }
    let n = phi.dim();
    let domain = BoxDomain::centered(n, 5.0);
    let kernel = LocalSmoothingKernel::canonical(phi.clone(), domain)?;
    let rule = QuadratureRule::default_for_dim(n);
    let grid = BoxDomain::centered(n, 2.0).grid(params::COMPACT_GRID[n]);

    let mut reports = Vec::with_capacity(suite.len());
    let mut pass = true;
    for (name, f) in suite {
        let f = f.clone();
        let field = TwoPointField::new(n, move |_, y: &[f64]| f(y));
        let report = two_point_order(&field, &kernel, sweep, &grid, &rule)?;
        pass &= report.pass;
        reports.push((name.clone(), report));
    }
    Ok(OrderVerification { reports, pass })
}
