//! Local smoothing kernels: families (eps, x) -> phi~(eps, x) of unit-mass
//! test functions supported in B_{eps C}(x), with numeric derivatives in the
//! x, y and x+y slots and checkers for the support and derivative-scaling
//! conditions.

use std::sync::Arc;

use crate::domain::{dist, BoxDomain};
use crate::error::{Error, Result};
use crate::mollifier::Mollifier;
use crate::multi_index::{MultiIndex, MultiIndexPair};
use crate::params;
use crate::quad::{integrate_scaled_with_breaks, QuadratureRule};

/// How the kernel was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// Pure convolution: phi~(eps, x) = eps^-n phi((. - x)/eps).
    Canonical,
    /// Genuinely x-dependent mollifier family.
    Varying,
    /// Transported from another domain by a diffeomorphism.
    Pullback,
}

pub type KernelEval = dyn Fn(f64, &[f64], &[f64]) -> f64 + Send + Sync;
type PointMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type ScalarMap = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Geometry of the support of phi~(eps, x): either a round ball around x
/// (with known interior break radii from blend components), or the preimage
/// of such a ball under a diffeomorphism. Functionals of the kernel integrate
/// through the map so the quadrature always sees a round, boundary-flat
/// integrand.
#[derive(Clone)]
pub enum SupportGeometry {
    Ball {
        /// Support radius in the scaled variable.
        radius: f64,
        /// Interior radii where blend components vanish (non-analytic points).
        breaks: Vec<f64>,
    },
    Mapped {
        /// Forward map mu into the inner kernel's domain.
        forward: PointMap,
        /// Inverse map mu^-1.
        inverse: PointMap,
        /// det(d mu) at a point of this kernel's domain; positive.
        det_forward: ScalarMap,
        inner: Box<SupportGeometry>,
    },
}

impl SupportGeometry {
    fn ball(radius: f64) -> Self {
        SupportGeometry::Ball {
            radius,
            breaks: Vec::new(),
        }
    }

    /// Integral of g over the support of phi~(eps, center), in the scaled
    /// variable; mapped supports substitute w = mu(y) recursively so the
    /// region of integration is always the round inner ball.
    pub fn integrate<G>(&self, g: G, eps: f64, center: &[f64], rule: &QuadratureRule) -> f64
    where
        G: Fn(&[f64]) -> f64,
    {
        self.integrate_dyn(&g, eps, center, rule)
    }

    fn integrate_dyn(
        &self,
        g: &dyn Fn(&[f64]) -> f64,
        eps: f64,
        center: &[f64],
        rule: &QuadratureRule,
    ) -> f64 {
        match self {
            SupportGeometry::Ball { radius, breaks } => {
                integrate_scaled_with_breaks(g, center, eps, *radius, breaks, rule)
            }
            SupportGeometry::Mapped {
                forward,
                inverse,
                det_forward,
                inner,
            } => {
                let target_center = forward(center);
                let transformed = |w: &[f64]| {
                    let y = inverse(w);
                    g(&y) / det_forward(&y)
                };
                inner.integrate_dyn(&transformed, eps, &target_center, rule)
            }
        }
    }
}

/// A family (eps, x) -> phi~(eps, x) realizing a local smoothing kernel in
/// coordinates on an open box domain.
pub struct LocalSmoothingKernel {
    dim: usize,
    domain: BoxDomain,
    eval: Box<KernelEval>,
    support_const: f64,
    eps0: f64,
    order: usize,
    kind: KernelKind,
    geometry: SupportGeometry,
}

impl LocalSmoothingKernel {
    /// The convolution kernel eps^-n phi((y - x)/eps) built from a mollifier.
    ///
    /// Support constant C is the mollifier radius, the declared order is the
    /// mollifier order, and translation covariance holds exactly.
    pub fn canonical(phi: Mollifier, domain: BoxDomain) -> Result<Self> {
        if phi.dim() != domain.dim() {
            return Err(Error::DimensionMismatch {
                left: phi.dim(),
                right: domain.dim(),
            });
        }
        let n = phi.dim();
        let radius = phi.radius();
        let order = phi.order();
        let eval = move |eps: f64, x: &[f64], y: &[f64]| {
            let mut z = [0.0f64; 3];
            for i in 0..n {
                z[i] = (y[i] - x[i]) / eps;
            }
            phi.eval(&z[..n]) / eps.powi(n as i32)
        };
        Ok(LocalSmoothingKernel {
            dim: n,
            domain,
            eval: Box::new(eval),
            support_const: radius,
            eps0: 0.5,
            order,
            kind: KernelKind::Canonical,
            geometry: SupportGeometry::ball(radius),
        })
    }

    /// A genuinely x-varying kernel: the smooth blend
    /// eps^-n [(1 - w(x)) phi0 + w(x) phi1]((y - x)/eps).
    ///
    /// The blend is affine, so the unit integral holds for every x; the
    /// support constant is the larger of the two radii.
    pub fn varying<W>(phi0: Mollifier, phi1: Mollifier, weight: W, domain: BoxDomain) -> Result<Self>
    where
        W: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if phi0.dim() != phi1.dim() {
            return Err(Error::DimensionMismatch {
                left: phi0.dim(),
                right: phi1.dim(),
            });
        }
        if phi0.order() != phi1.order() {
            return Err(Error::OrderMismatch {
                left: phi0.order(),
                right: phi1.order(),
            });
        }
        if phi0.dim() != domain.dim() {
            return Err(Error::DimensionMismatch {
                left: phi0.dim(),
                right: domain.dim(),
            });
        }
        let n = phi0.dim();
        let order = phi0.order();
        let (r0, r1) = (phi0.radius(), phi1.radius());
        let radius = r0.max(r1);
        let breaks = if (r0 - r1).abs() > 1e-15 {
            vec![r0.min(r1)]
        } else {
            Vec::new()
        };
        let eval = move |eps: f64, x: &[f64], y: &[f64]| {
            let mut z = [0.0f64; 3];
            for i in 0..n {
                z[i] = (y[i] - x[i]) / eps;
            }
            let w = weight(x);
            ((1.0 - w) * phi0.eval(&z[..n]) + w * phi1.eval(&z[..n])) / eps.powi(n as i32)
        };
        Ok(LocalSmoothingKernel {
            dim: n,
            domain,
            eval: Box::new(eval),
            support_const: radius,
            eps0: 0.5,
            order,
            kind: KernelKind::Varying,
            geometry: SupportGeometry::Ball { radius, breaks },
        })
    }

    /// Assembles a kernel from raw parts; used by the pullback construction.
    pub(crate) fn from_parts(
        dim: usize,
        domain: BoxDomain,
        eval: Box<KernelEval>,
        support_const: f64,
        eps0: f64,
        order: usize,
        kind: KernelKind,
        geometry: SupportGeometry,
    ) -> Self {
        LocalSmoothingKernel {
            dim,
            domain,
            eval,
            support_const,
            eps0,
            order,
            kind,
            geometry,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    /// Nominal support constant C: supp phi~(eps, x) lies in B_{eps C}(x).
    pub fn support_const(&self) -> f64 {
        self.support_const
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    /// Declared approximation order k.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Overrides the declared order; lets the CLI run deliberate-mismatch
    /// verifications.
    pub fn with_declared_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn geometry(&self) -> &SupportGeometry {
        &self.geometry
    }

    /// phi~(eps, x)(y).
    pub fn eval(&self, eps: f64, x: &[f64], y: &[f64]) -> f64 {
        (self.eval)(eps, x, y)
    }

    /// Checks eps <= eps0 and B_{eps C}(x) inside the domain.
    pub fn margin_ok(&self, eps: f64, x: &[f64]) -> Result<()> {
        if eps > self.eps0 {
            return Err(Error::MarginViolation {
                eps,
                detail: format!("eps exceeds eps0 = {}", self.eps0),
            });
        }
        if !self.domain.contains_ball(x, eps * self.support_const) {
            return Err(Error::MarginViolation {
                eps,
                detail: format!("support ball of radius {} at {:?} leaves the domain", eps * self.support_const, x),
            });
        }
        Ok(())
    }

    /// integral of phi~(eps, x) over its support.
    pub fn integral(&self, eps: f64, x: &[f64], rule: &QuadratureRule) -> f64 {
        self.geometry.integrate(|y| self.eval(eps, x, y), eps, x, rule)
    }

    /// Integral of g over the support of phi~(eps, x); the workhorse for all
    /// functionals against the kernel and its derivatives.
    pub fn integrate_over_support<G>(&self, g: G, eps: f64, x: &[f64], rule: &QuadratureRule) -> f64
    where
        G: Fn(&[f64]) -> f64,
    {
        self.geometry.integrate(g, eps, x, rule)
    }

    /// (d_x^alpha d_y^beta phi~)(eps, x)(y) by central differences with step
    /// h = 1e-3 * eps in both slots.
    pub fn partial(&self, pair: &MultiIndexPair, eps: f64, x: &[f64], y: &[f64]) -> Result<f64> {
        self.partial_mixed(&MultiIndex::zero(self.dim), &pair.alpha, &pair.beta, eps, x, y)
    }

    /// (d_{x+y}^alpha phi~)(eps, x)(y): derivative along simultaneous
    /// translation of both slots, composed per index of alpha.
    pub fn partial_diag(&self, alpha: &MultiIndex, eps: f64, x: &[f64], y: &[f64]) -> Result<f64> {
        self.partial_mixed(alpha, &MultiIndex::zero(self.dim), &MultiIndex::zero(self.dim), eps, x, y)
    }

    /// General mixed derivative d_{x+y}^diag d_x^alpha d_y^beta by composed
    /// central differences.
    pub fn partial_mixed(
        &self,
        diag: &MultiIndex,
        alpha: &MultiIndex,
        beta: &MultiIndex,
        eps: f64,
        x: &[f64],
        y: &[f64],
    ) -> Result<f64> {
        let total = diag.order() + alpha.order() + beta.order();
        if total > params::MAX_FD_ORDER {
            return Err(Error::OrderTooHigh {
                requested: total,
                max: params::MAX_FD_ORDER,
            });
        }
        let mut slots: Vec<(Slot, usize)> = Vec::with_capacity(total);
        slots.extend(diag.axes().into_iter().map(|a| (Slot::Diag, a)));
        slots.extend(alpha.axes().into_iter().map(|a| (Slot::X, a)));
        slots.extend(beta.axes().into_iter().map(|a| (Slot::Y, a)));
        let h = params::kernel_fd_rel(total) * eps;
        Ok(fd_kernel(&*self.eval, eps, x, y, &slots, h))
    }

    /// Smallest sampled radius rho such that |phi~(eps, x)(y)| < tol for all
    /// sampled y with |y - x| >= rho. Sampled on a box grid of half-width
    /// 1.2 * eps * C; by construction <= eps * C up to one grid step.
    pub fn support_radius(&self, eps: f64, x: &[f64], tol: f64) -> f64 {
        self.support_radius_of(|y| self.eval(eps, x, y), eps, x, tol)
    }

    /// Support radius of a derivative of the kernel (selected by `pair`).
    pub fn support_radius_of_derivative(
        &self,
        pair: &MultiIndexPair,
        eps: f64,
        x: &[f64],
        tol: f64,
    ) -> Result<f64> {
        Ok(self.support_radius_of(
            |y| self.partial(pair, eps, x, y).unwrap_or(f64::NAN),
            eps,
            x,
            tol,
        ))
    }

    fn support_radius_of<G>(&self, g: G, eps: f64, x: &[f64], tol: f64) -> f64
    where
        G: Fn(&[f64]) -> f64,
    {
        assert!(tol > 0.0);
        let half = 1.2 * eps * self.support_const;
        let per_axis = params::SUP_GRID[self.dim];
        let sample_box = BoxDomain::new(
            x.iter().map(|c| c - half).collect(),
            x.iter().map(|c| c + half).collect(),
        )
        .expect("non-degenerate sampling box");
        let step = 2.0 * half / (per_axis - 1) as f64;
        let mut rho: f64 = 0.0;
        for y in sample_box.grid(per_axis) {
            if g(&y).abs() >= tol {
                rho = rho.max(dist(&y, x));
            }
        }
        if rho == 0.0 {
            0.0
        } else {
            rho + step * (self.dim as f64).sqrt()
        }
    }

    /// Scaling check for Definition condition (ii): s(eps) =
    /// sup_{x in K0, y} |d_y^beta d_{x+y}^alpha phi~| * eps^{n + |beta|}
    /// must stay within a factor of SCALING_RATIO_BOUND across the sweep.
    pub fn check_scaling(
        &self,
        k0: &BoxDomain,
        alpha: &MultiIndex,
        beta: &MultiIndex,
        sweep: &[f64],
    ) -> Result<ScalingReport> {
        if alpha.order() + beta.order() > 3 {
            return Err(Error::OrderTooHigh {
                requested: alpha.order() + beta.order(),
                max: 3,
            });
        }
        let per_axis = params::SUP_GRID[self.dim];
        let x_grid = k0.grid(per_axis);
        // y sampled as x + eps*z with z on a fixed grid slightly past the
        // support; keeps the sup resolution eps-independent.
        let z_box = BoxDomain::centered(self.dim, 1.05 * self.support_const);
        let z_grid = z_box.grid(per_axis);
        let m = alpha.order() + beta.order();
        let power = (self.dim + beta.order()) as i32;

        // A derivative that vanishes identically (the diagonal derivative of
        // a convolution kernel) still measures nonzero through the rounding
        // noise of its stencil; estimate that noise per eps from the plain
        // kernel magnitude and treat sups below it as floor samples.
        let y_max = x_grid
            .iter()
            .chain(z_grid.iter())
            .flat_map(|p| p.iter().map(|v| v.abs()))
            .fold(0.0, f64::max);

        let mut sups = Vec::with_capacity(sweep.len());
        let mut noise = Vec::with_capacity(sweep.len());
        let mut y = vec![0.0; self.dim];
        for &eps in sweep {
            let mut sup: f64 = 0.0;
            let mut sup_plain: f64 = 0.0;
            for x in &x_grid {
                for z in &z_grid {
                    for i in 0..self.dim {
                        y[i] = x[i] + eps * z[i];
                    }
                    let v = self
                        .partial_mixed(alpha, &MultiIndex::zero(self.dim), beta, eps, x, &y)?
                        .abs();
                    sup = sup.max(v);
                    if m > 0 {
                        sup_plain = sup_plain.max(self.eval(eps, x, &y).abs());
                    }
                }
            }
            sups.push(sup * eps.powi(power));
            let h = params::kernel_fd_rel(m) * eps;
            let eps_noise = if m == 0 {
                0.0
            } else {
                4.0 * f64::EPSILON * sup_plain * (1.0 + y_max / eps) / h.powi(m as i32)
            };
            noise.push(eps_noise * eps.powi(power));
        }

        let usable: Vec<f64> = sups
            .iter()
            .zip(noise.iter())
            .filter(|&(s, nf)| *s > *nf && *s > 0.0)
            .map(|(s, _)| *s)
            .collect();
        let floor = usable.len() < 2;
        let ratio = if floor {
            1.0
        } else {
            let max = usable.iter().copied().fold(0.0, f64::max);
            let min = usable.iter().copied().fold(f64::INFINITY, f64::min);
            max / min
        };
        Ok(ScalingReport {
            alpha: alpha.clone(),
            beta: beta.clone(),
            eps: sweep.to_vec(),
            sup_scaled: sups,
            ratio,
            floor,
            pass: floor || ratio <= params::SCALING_RATIO_BOUND,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    X,
    Y,
    Diag,
}

/// Composed central differences expanded over sign patterns:
/// D f = (2h)^-m sum over s in {+-1}^m of (prod s_j) f(point shifted by s_j h).
fn fd_kernel(
    eval: &KernelEval,
    eps: f64,
    x: &[f64],
    y: &[f64],
    slots: &[(Slot, usize)],
    h: f64,
) -> f64 {
    let m = slots.len();
    if m == 0 {
        return eval(eps, x, y);
    }
    let n = x.len();
    let mut xs = [0.0f64; 3];
    let mut ys = [0.0f64; 3];
    let mut acc = 0.0;
    for mask in 0..(1usize << m) {
        xs[..n].copy_from_slice(x);
        ys[..n].copy_from_slice(y);
        let mut sign = 1.0;
        for (j, &(slot, axis)) in slots.iter().enumerate() {
            let s = if mask & (1 << j) != 0 { h } else { -h };
            if s < 0.0 {
                sign = -sign;
            }
            match slot {
                Slot::X => xs[axis] += s,
                Slot::Y => ys[axis] += s,
                Slot::Diag => {
                    xs[axis] += s;
                    ys[axis] += s;
                }
            }
        }
        acc += sign * eval(eps, &xs[..n], &ys[..n]);
    }
    acc / (2.0 * h).powi(m as i32)
}

/// Outcome of the derivative-scaling check across an eps sweep.
#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub eps: Vec<f64>,
    /// sup |d^beta_y d^alpha_{x+y} phi~| * eps^{n+|beta|} per eps.
    pub sup_scaled: Vec<f64>,
    /// max/min over the sweep (1.0 when at floor).
    pub ratio: f64,
    /// All sups below the FD noise floor (identically vanishing derivative).
    pub floor: bool,
    pub pass: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::BumpFunction;
    use crate::params::standard_sweep;

    fn order0() -> Mollifier {
        Mollifier::build_order_k(&BumpFunction::standard(1), 0).unwrap()
    }

    fn domain1() -> BoxDomain {
        BoxDomain::centered(1, 5.0)
    }

    fn canonical1() -> LocalSmoothingKernel {
        LocalSmoothingKernel::canonical(order0(), domain1()).unwrap()
    }

    fn blended1() -> LocalSmoothingKernel {
        let phi0 = Mollifier::build_order_k(&BumpFunction::standard(1), 2).unwrap();
        let phi1 =
            Mollifier::build_order_k(&BumpFunction::new(1, 0.8, 1.0).unwrap(), 2).unwrap();
        LocalSmoothingKernel::varying(
            phi0,
            phi1,
            |x: &[f64]| 0.5 * (1.0 + x[0].tanh()),
            domain1(),
        )
        .unwrap()
    }

    #[test]
    fn center_value_matches_scaling() {
        let phi = order0();
        let k = canonical1();
        for eps in [0.5, 0.125] {
            let v = k.eval(eps, &[0.7], &[0.7]);
            assert!((v - phi.eval(&[0.0]) / eps).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_integral_across_sweep() {
        let k = canonical1();
        let rule = QuadratureRule::default_for_dim(1);
        for &eps in &standard_sweep() {
            let v = k.integral(eps, &[1.3], &rule);
            assert!((v - 1.0).abs() < 1e-10, "eps={eps}: {v}");
        }
    }

    #[test]
    fn support_scales_exactly() {
        let k = canonical1();
        for eps in [0.5, 0.0625] {
            assert_eq!(k.eval(eps, &[0.0], &[eps]), 0.0);
            assert!(k.eval(eps, &[0.0], &[0.5 * eps]) > 0.0);
            let rho = k.support_radius(eps, &[0.0], 1e-12);
            assert!(rho <= 1.05 * eps, "eps={eps}, rho={rho}");
            assert!(rho >= 0.9 * eps, "eps={eps}, rho={rho}");
        }
    }

    #[test]
    fn translation_covariance_is_exact() {
        let k = canonical1();
        let (eps, h) = (0.25, 0.375);
        for (x, y) in [(0.1, 0.2), (-0.4, -0.3), (1.0, 1.1)] {
            assert_eq!(k.eval(eps, &[x + h], &[y + h]), k.eval(eps, &[x], &[y]));
        }
    }

    #[test]
    fn x_derivative_is_minus_y_derivative_for_canonical() {
        let k = canonical1();
        let (eps, x, y) = (0.25, 0.3, 0.45);
        let dx = k
            .partial(
                &MultiIndexPair::new(MultiIndex::unit(1, 0), MultiIndex::zero(1)),
                eps,
                &[x],
                &[y],
            )
            .unwrap();
        let dy = k
            .partial(
                &MultiIndexPair::new(MultiIndex::zero(1), MultiIndex::unit(1, 0)),
                eps,
                &[x],
                &[y],
            )
            .unwrap();
        assert!((dx + dy).abs() < 1e-9 * dx.abs().max(1.0), "dx={dx}, dy={dy}");
    }

    #[test]
    fn zero_pair_is_plain_evaluation() {
        let k = canonical1();
        let pair = MultiIndexPair::new(MultiIndex::zero(1), MultiIndex::zero(1));
        let v = k.partial(&pair, 0.25, &[0.1], &[0.2]).unwrap();
        assert_eq!(v, k.eval(0.25, &[0.1], &[0.2]));
    }

    #[test]
    fn y_derivative_matches_mollifier_oracle() {
        // d_y phi~ = eps^-2 phi'((y-x)/eps) in 1D; Richardson-extrapolated
        // differences of phi supply the reference.
        let phi = order0();
        let k = canonical1();
        let (eps, x, y) = (0.25, 0.0, 0.125); // u = 0.5
        let u = (y - x) / eps;
        let d = |h: f64| (phi.eval(&[u + h]) - phi.eval(&[u - h])) / (2.0 * h);
        let (h0, h1, h2) = (1e-3, 5e-4, 2.5e-4);
        let r1 = (4.0 * d(h1) - d(h0)) / 3.0;
        let r1b = (4.0 * d(h2) - d(h1)) / 3.0;
        let oracle = (16.0 * r1b - r1) / 15.0 / (eps * eps);

        let pair = MultiIndexPair::new(MultiIndex::zero(1), MultiIndex::unit(1, 0));
        let v = k.partial(&pair, eps, &[x], &[y]).unwrap();
        assert!(
            ((v - oracle) / oracle).abs() < 1e-4,
            "v={v}, oracle={oracle}"
        );
    }

    #[test]
    fn diagonal_derivative_vanishes_for_canonical() {
        let k = canonical1();
        for (eps, x, y) in [(0.5, 0.3, 0.4), (0.125, -0.7, -0.65), (0.03125, 1.0, 1.01)] {
            for order in [1u32, 2] {
                let alpha = MultiIndex::new(vec![order]);
                let v = k.partial_diag(&alpha, eps, &[x], &[y]).unwrap();
                let scale = eps.powi(-(1 + order as i32));
                assert!(
                    v.abs() <= 1e-9 * scale,
                    "eps={eps}, order={order}: {v} vs scale {scale}"
                );
            }
        }
    }

    #[test]
    fn diagonal_derivative_nonzero_for_blended() {
        let k = blended1();
        let sweep = standard_sweep();
        let alpha = MultiIndex::unit(1, 0);
        // magnitude O(eps^-n): eps^n * sup stays within a flat band
        let mut scaled = Vec::new();
        for &eps in &sweep {
            let mut sup: f64 = 0.0;
            for u in [-0.5, -0.2, 0.0, 0.2, 0.5] {
                let v = k.partial_diag(&alpha, eps, &[0.0], &[u * eps]).unwrap();
                sup = sup.max(v.abs());
            }
            assert!(sup > 0.0);
            scaled.push(sup * eps);
        }
        let max = scaled.iter().copied().fold(0.0, f64::max);
        let min = scaled.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(max / min < 2.0, "not flat: {scaled:?}");
    }

    #[test]
    fn order_cap_enforced() {
        let k = canonical1();
        let pair = MultiIndexPair::new(MultiIndex::new(vec![3]), MultiIndex::new(vec![2]));
        assert!(matches!(
            k.partial(&pair, 0.25, &[0.0], &[0.1]),
            Err(Error::OrderTooHigh { .. })
        ));
    }

    #[test]
    fn varying_requires_matching_orders() {
        let phi0 = Mollifier::build_order_k(&BumpFunction::standard(1), 0).unwrap();
        let phi1 = Mollifier::build_order_k(&BumpFunction::standard(1), 2).unwrap();
        assert!(matches!(
            LocalSmoothingKernel::varying(phi0, phi1, |_: &[f64]| 0.5, domain1()),
            Err(Error::OrderMismatch { .. })
        ));
    }

    #[test]
    fn zero_weight_blend_matches_canonical() {
        let phi0 = Mollifier::build_order_k(&BumpFunction::standard(1), 2).unwrap();
        let phi1 =
            Mollifier::build_order_k(&BumpFunction::new(1, 0.8, 1.0).unwrap(), 2).unwrap();
        let blend =
            LocalSmoothingKernel::varying(phi0.clone(), phi1, |_: &[f64]| 0.0, domain1()).unwrap();
        let canon = LocalSmoothingKernel::canonical(phi0, domain1()).unwrap();
        for (x, y) in [(0.0, 0.1), (0.5, 0.45), (-1.0, -1.2)] {
            let a = blend.eval(0.25, &[x], &[y]);
            let b = canon.eval(0.25, &[x], &[y]);
            assert!((a - b).abs() < 1e-15 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn blended_unit_integral_for_every_x() {
        let k = blended1();
        let rule = QuadratureRule::default_for_dim(1);
        for x in [-2.0, -0.5, 0.0, 1.0, 2.0] {
            for eps in [0.5, 0.0625] {
                let v = k.integral(eps, &[x], &rule);
                assert!((v - 1.0).abs() < 1e-10, "x={x}, eps={eps}: {v}");
            }
        }
    }

    #[test]
    fn blended_kernel_keeps_declared_order() {
        // both components have order 2, so the blend approximates to
        // O(eps^3) regardless of the x-dependent mixing
        let k = blended1();
        let f = crate::approx_props::TwoPointField::new(1, |x: &[f64], y: &[f64]| {
            (x[0] * y[0]).sin() + (0.5 * y[0]).exp()
        });
        let rule = QuadratureRule::default_for_dim(1);
        let grid = BoxDomain::centered(1, 2.0).grid(11);
        let report =
            crate::approx_props::two_point_order(&f, &k, &standard_sweep(), &grid, &rule).unwrap();
        assert!(report.slope >= 2.8, "slope {}", report.slope);
    }

    #[test]
    fn blended_support_within_max_radius() {
        let k = blended1();
        let eps = 0.25;
        let rho = k.support_radius(eps, &[0.0], 1e-12);
        assert!(rho <= 1.05 * eps * 1.0);
    }

    #[test]
    fn scaling_flat_for_canonical() {
        let k = canonical1();
        let k0 = BoxDomain::centered(1, 2.0);
        let sweep = standard_sweep();
        for beta_order in [0u32, 1] {
            let report = k
                .check_scaling(
                    &k0,
                    &MultiIndex::zero(1),
                    &MultiIndex::new(vec![beta_order]),
                    &sweep,
                )
                .unwrap();
            assert!(report.pass, "beta order {beta_order}: ratio {}", report.ratio);
            assert!(report.ratio < 1.01, "exact scaling: {}", report.ratio);
        }
    }

    #[test]
    fn scaling_bounded_for_blended_mixed_pair() {
        let k = blended1();
        let k0 = BoxDomain::centered(1, 2.0);
        let report = k
            .check_scaling(&k0, &MultiIndex::unit(1, 0), &MultiIndex::unit(1, 0), &standard_sweep())
            .unwrap();
        assert!(report.pass, "ratio {}", report.ratio);
        assert!(!report.floor);
    }

    #[test]
    fn margin_violation_detected() {
        let k = canonical1();
        assert!(k.margin_ok(0.25, &[4.9]).is_err());
        assert!(k.margin_ok(0.6, &[0.0]).is_err());
        assert!(k.margin_ok(0.25, &[4.0]).is_ok());
    }

    #[test]
    fn derivative_support_stays_in_scaled_ball() {
        let k = canonical1();
        let eps = 0.25;
        let c_prime = k.support_const() * params::SUPPORT_CONST_SLACK;
        for (a, b) in [(0u32, 1u32), (1, 0), (1, 1), (2, 1)] {
            let pair = MultiIndexPair::new(MultiIndex::new(vec![a]), MultiIndex::new(vec![b]));
            let rho = k
                .support_radius_of_derivative(&pair, eps, &[0.0], 1e-9)
                .unwrap();
            assert!(rho <= eps * c_prime, "({a},{b}): rho={rho}");
        }
    }
}
