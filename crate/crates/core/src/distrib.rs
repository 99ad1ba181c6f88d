//! Embedding of sample distributions by pairing with smoothing kernels, and
//! weak-convergence checks for the resulting regularizations.
//!
//! The embedded image of t at (eps, x) is the pairing of t with phi~(eps, x).
//! Pairing the regularization against a fixed test function and driving
//! eps -> 0 must recover the original pairing; the rate checks measure how
//! fast.

use std::sync::Arc;

use crate::approx_props::{functional_y, Deriv, TwoPointField};
use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::kernel::{LocalSmoothingKernel, SupportGeometry};
use crate::multi_index::{MultiIndex, MultiIndexPair};
use crate::params;
use crate::quad::{integrate_box, QuadratureRule};
use crate::rate::{fit_rate_with_floor, RateReport};

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// The sample distributions: point mass, its derivative, a jump, a smooth
/// density, and linear combinations of these.
#[derive(Clone)]
pub enum Distribution {
    /// Point mass at `a`: pairing is psi(a).
    Delta(Vec<f64>),
    /// Derivative of the point mass at `a` along `axis`: pairing is
    /// -(d_axis psi)(a).
    DeltaPrime { at: Vec<f64>, axis: usize },
    /// 1D jump at `a`: pairing is the integral of psi over [a, infinity).
    Heaviside(f64),
    /// Smooth density g: pairing is the integral of g psi.
    Regular(ScalarFn),
    /// Formal linear combination.
    Combination(Vec<(f64, Distribution)>),
}

impl Distribution {
    pub fn regular<G>(g: G) -> Self
    where
        G: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Distribution::Regular(Arc::new(g))
    }

    /// The pairing with a test function psi supported in `support`.
    pub fn pairing(
        &self,
        psi: &dyn Fn(&[f64]) -> f64,
        support: &BoxDomain,
        rule: &QuadratureRule,
    ) -> f64 {
        match self {
            Distribution::Delta(a) => psi(a),
            Distribution::DeltaPrime { at, axis } => {
                let h = params::TARGET_FD_STEP_1;
                let mut plus = at.clone();
                plus[*axis] += h;
                let mut minus = at.clone();
                minus[*axis] -= h;
                -(psi(&plus) - psi(&minus)) / (2.0 * h)
            }
            Distribution::Heaviside(a) => {
                debug_assert_eq!(support.dim(), 1);
                if support.hi()[0] <= *a {
                    return 0.0;
                }
                let lo = support.lo()[0].max(*a);
                let clipped = BoxDomain::new(vec![lo], vec![support.hi()[0]])
                    .expect("clipped support non-degenerate");
                integrate_box(psi, &clipped, rule)
            }
            Distribution::Regular(g) => integrate_box(|p| g(p) * psi(p), support, rule),
            Distribution::Combination(terms) => terms
                .iter()
                .map(|(c, t)| c * t.pairing(psi, support, rule))
                .sum(),
        }
    }
}

/// The embedded image R(eps, x) = pairing of t with phi~(eps, x).
pub fn embed(
    t: &Distribution,
    kernel: &LocalSmoothingKernel,
    eps: f64,
    x: &[f64],
    rule: &QuadratureRule,
) -> Result<f64> {
    kernel.margin_ok(eps, x)?;
    match t {
        Distribution::Delta(a) => Ok(kernel.eval(eps, x, a)),
        Distribution::DeltaPrime { at, axis } => {
            // distributional derivative convention: <delta'_a, psi> = -psi'(a)
            let pair = MultiIndexPair::new(
                MultiIndex::zero(kernel.dim()),
                MultiIndex::unit(kernel.dim(), *axis),
            );
            Ok(-kernel.partial(&pair, eps, x, at)?)
        }
        Distribution::Heaviside(a) => {
            if kernel.dim() != 1 {
                return Err(Error::InvalidInput("heaviside embedding is 1D".into()));
            }
            let c = kernel.support_const();
            // support of phi~(eps, x) is [x - eps C, x + eps C]
            if *a <= x[0] - eps * c {
                return Ok(1.0);
            }
            if *a >= x[0] + eps * c {
                return Ok(0.0);
            }
            Ok(heaviside_tail(kernel, eps, x[0], *a, rule))
        }
        Distribution::Regular(g) => {
            // same code path as the two-point functionals
            let g = g.clone();
            let f = TwoPointField::new(kernel.dim(), move |_x: &[f64], y: &[f64]| g(y));
            functional_y(&f, kernel, &Deriv::None, eps, x, rule)
        }
        Distribution::Combination(terms) => {
            let mut acc = 0.0;
            for (c, t) in terms {
                acc += c * embed(t, kernel, eps, x, rule)?;
            }
            Ok(acc)
        }
    }
}

/// integral of phi~(eps, x) over [a, x + eps C], split at the kernel's
/// interior break radii so every panel is analytic inside.
fn heaviside_tail(
    kernel: &LocalSmoothingKernel,
    eps: f64,
    x: f64,
    a: f64,
    rule: &QuadratureRule,
) -> f64 {
    let c = kernel.support_const();
    let mut edges = vec![a, x + eps * c];
    if let SupportGeometry::Ball { breaks, .. } = kernel.geometry() {
        for &b in breaks {
            for edge in [x - eps * b, x + eps * b] {
                if edge > a && edge < x + eps * c {
                    edges.push(edge);
                }
            }
        }
    }
    edges.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let mut acc = 0.0;
    for w in edges.windows(2) {
        let panel = BoxDomain::new(vec![w[0]], vec![w[1]]).expect("panel non-degenerate");
        acc += integrate_box(|y| kernel.eval(eps, &[x], y), &panel, rule);
    }
    acc
}

/// Weak-convergence check: the pairing of the regularization against psi
/// must converge to the pairing of t, at O(eps) generally and at
/// O(eps^{k+1}) for regular densities under an order-k kernel.
pub fn check_weak_convergence(
    t: &Distribution,
    kernel: &LocalSmoothingKernel,
    psi: &(dyn Fn(&[f64]) -> f64 + Sync),
    psi_support: &BoxDomain,
    sweep: &[f64],
    rule: &QuadratureRule,
) -> Result<RateReport> {
    // psi must keep the support balls inside the domain across the sweep
    let eps_max = sweep.iter().copied().fold(0.0, f64::max);
    let margin = eps_max * kernel.support_const();
    for corner in psi_support.grid(2) {
        if !kernel.domain().contains_ball(&corner, margin) {
            return Err(Error::MarginViolation {
                eps: eps_max,
                detail: "test function support too close to the domain boundary".into(),
            });
        }
    }

    let reference = t.pairing(psi, psi_support, rule);
    let mut samples = Vec::with_capacity(sweep.len());
    for &eps in sweep {
        let value = pair_regularization(t, kernel, psi, psi_support, eps, rule)?;
        samples.push((eps, (value - reference).abs()));
    }

    let target = match t {
        Distribution::Regular(_) => kernel.order() as f64 + 0.8,
        _ => 0.8,
    };
    Ok(fit_rate_with_floor(&samples, params::rate_floor(kernel.dim()))?.with_target(target))
}

/// integral over x of R(eps, x) psi(x) dx, organized per distribution kind so
/// the eps-scale features are always integrated in scaled coordinates.
fn pair_regularization(
    t: &Distribution,
    kernel: &LocalSmoothingKernel,
    psi: &(dyn Fn(&[f64]) -> f64 + Sync),
    psi_support: &BoxDomain,
    eps: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    match t {
        Distribution::Delta(a) => {
            // integrand supported where phi~(eps, x)(a) != 0: x near a
            Ok(kernel.integrate_over_support(|x| kernel.eval(eps, x, a) * psi(x), eps, a, rule))
        }
        Distribution::DeltaPrime { at, axis } => {
            let pair = MultiIndexPair::new(
                MultiIndex::zero(kernel.dim()),
                MultiIndex::unit(kernel.dim(), *axis),
            );
            let err = std::cell::Cell::new(None);
            let v = kernel.integrate_over_support(
                |x| match kernel.partial(&pair, eps, x, at) {
                    Ok(d) => -d * psi(x),
                    Err(e) => {
                        err.set(Some(e));
                        f64::NAN
                    }
                },
                eps,
                at,
                rule,
            );
            match err.into_inner() {
                Some(e) => Err(e),
                None => Ok(v),
            }
        }
        Distribution::Heaviside(a) => {
            let c = kernel.support_const();
            let (lo, hi) = (psi_support.lo()[0], psi_support.hi()[0]);
            let mut acc = 0.0;
            // R = 1 for x >= a + eps C
            let plateau_lo = (a + eps * c).max(lo);
            if plateau_lo < hi {
                let plateau = BoxDomain::new(vec![plateau_lo], vec![hi])?;
                acc += integrate_box(&psi, &plateau, rule);
            }
            // transition band x in (a - eps C, a + eps C)
            let band_lo = (a - eps * c).max(lo);
            let band_hi = (a + eps * c).min(hi);
            if band_lo < band_hi {
                let band = BoxDomain::new(vec![band_lo], vec![band_hi])?;
                let err = std::cell::Cell::new(None);
                acc += integrate_box(
                    |x| match embed(t, kernel, eps, x, rule) {
                        Ok(r) => r * psi(x),
                        Err(e) => {
                            err.set(Some(e));
                            f64::NAN
                        }
                    },
                    &band,
                    rule,
                );
                if let Some(e) = err.into_inner() {
                    return Err(e);
                }
            }
            Ok(acc)
        }
        Distribution::Regular(_) => {
            let err = std::cell::Cell::new(None);
            let v = integrate_box(
                |x| match embed(t, kernel, eps, x, rule) {
                    Ok(r) => r * psi(x),
                    Err(e) => {
                        err.set(Some(e));
                        f64::NAN
                    }
                },
                psi_support,
                rule,
            );
            match err.into_inner() {
                Some(e) => Err(e),
                None => Ok(v),
            }
        }
        Distribution::Combination(terms) => {
            let mut acc = 0.0;
            for (coeff, term) in terms {
                acc += coeff * pair_regularization(term, kernel, psi, psi_support, eps, rule)?;
            }
            Ok(acc)
        }
    }
}
