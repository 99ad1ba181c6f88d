//! Coordinate realization of the geometric layer: diffeomorphisms, vector
//! fields and their flows, the two Lie derivatives on two-point functions,
//! pullback of test functions and smoothing kernels, and the checkers for
//! the commutation identities and pullback invariance.

use std::sync::Arc;

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::kernel::{KernelKind, LocalSmoothingKernel, ScalingReport, SupportGeometry};
use crate::multi_index::{MultiIndex, MultiIndexPair};
use crate::params;
use crate::quad::QuadratureRule;
use crate::rate::RateReport;

type PointMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type MatrixMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type ScalarField = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// An orientation-preserving diffeomorphism with explicit inverse and
/// Jacobian (row-major n x n).
#[derive(Clone)]
pub struct Diffeomorphism {
    dim: usize,
    name: String,
    forward: PointMap,
    inverse: PointMap,
    jacobian: MatrixMap,
}

impl Diffeomorphism {
    pub fn identity(dim: usize) -> Self {
        Diffeomorphism {
            dim,
            name: "identity".into(),
            forward: Arc::new(|x: &[f64]| x.to_vec()),
            inverse: Arc::new(|x: &[f64]| x.to_vec()),
            jacobian: Arc::new(move |x: &[f64]| identity_matrix(x.len())),
        }
    }

    /// x -> factor * x; factor > 0.
    pub fn scaling(dim: usize, factor: f64) -> Self {
        assert!(factor > 0.0);
        Diffeomorphism {
            dim,
            name: format!("scale({factor})"),
            forward: Arc::new(move |x: &[f64]| x.iter().map(|v| factor * v).collect()),
            inverse: Arc::new(move |x: &[f64]| x.iter().map(|v| v / factor).collect()),
            jacobian: Arc::new(move |x: &[f64]| {
                let n = x.len();
                let mut j = vec![0.0; n * n];
                for i in 0..n {
                    j[i * n + i] = factor;
                }
                j
            }),
        }
    }

    /// x -> A x + b with det A > 0; the inverse is computed at construction.
    pub fn affine(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let n = b.len();
        if a.len() != n * n {
            return Err(Error::DimensionMismatch {
                left: a.len(),
                right: n * n,
            });
        }
        let det = det_n(&a, n);
        if det <= 0.0 {
            return Err(Error::InvalidInput(
                "affine map must be orientation preserving (det > 0)".into(),
            ));
        }
        let a_inv = invert_n(&a, n).ok_or(Error::SingularSystem { cond: f64::INFINITY })?;
        let a_fwd = a.clone();
        let b_fwd = b.clone();
        let b_inv = b;
        Ok(Diffeomorphism {
            dim: n,
            name: "affine".into(),
            forward: Arc::new(move |x: &[f64]| {
                let mut out = b_fwd.clone();
                for r in 0..n {
                    for c in 0..n {
                        out[r] += a_fwd[r * n + c] * x[c];
                    }
                }
                out
            }),
            inverse: Arc::new(move |w: &[f64]| {
                let mut out = vec![0.0; n];
                for r in 0..n {
                    for c in 0..n {
                        out[r] += a_inv[r * n + c] * (w[c] - b_inv[c]);
                    }
                }
                out
            }),
            jacobian: Arc::new(move |_x: &[f64]| a.clone()),
        })
    }

    /// Plane rotation by `angle` (2D).
    pub fn rotation_2d(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let mut d = Self::affine(vec![c, -s, s, c], vec![0.0, 0.0]).expect("rotation is affine");
        d.name = format!("rot({angle:.3})");
        d
    }

    /// Componentwise x_i -> x_i + amplitude * sin(x_i); needs |amplitude| < 1,
    /// inverse by Newton iteration to 1e-12.
    pub fn sine(dim: usize, amplitude: f64) -> Result<Self> {
        if amplitude.abs() >= 1.0 {
            return Err(Error::InvalidInput(
                "sine map needs |amplitude| < 1 for invertibility".into(),
            ));
        }
        Ok(Diffeomorphism {
            dim,
            name: format!("sine({amplitude})"),
            forward: Arc::new(move |x: &[f64]| {
                x.iter().map(|&v| v + amplitude * v.sin()).collect()
            }),
            inverse: Arc::new(move |w: &[f64]| {
                w.iter()
                    .map(|&wi| {
                        let mut v = wi;
                        for _ in 0..60 {
                            let step = (v + amplitude * v.sin() - wi) / (1.0 + amplitude * v.cos());
                            v -= step;
                            if step.abs() < 1e-12 {
                                break;
                            }
                        }
                        v
                    })
                    .collect()
            }),
            jacobian: Arc::new(move |x: &[f64]| {
                let n = x.len();
                let mut j = vec![0.0; n * n];
                for i in 0..n {
                    j[i * n + i] = 1.0 + amplitude * x[i].cos();
                }
                j
            }),
        })
    }

    /// The composite x -> outer(inner(x)).
    pub fn compose(outer: &Diffeomorphism, inner: &Diffeomorphism) -> Result<Self> {
        if outer.dim != inner.dim {
            return Err(Error::DimensionMismatch {
                left: outer.dim,
                right: inner.dim,
            });
        }
        let n = outer.dim;
        let (of, inf) = (outer.forward.clone(), inner.forward.clone());
        let (oi, ini) = (outer.inverse.clone(), inner.inverse.clone());
        let (oj, ij) = (outer.jacobian.clone(), inner.jacobian.clone());
        let ifwd = inner.forward.clone();
        Ok(Diffeomorphism {
            dim: n,
            name: format!("{} . {}", outer.name, inner.name),
            forward: Arc::new(move |x: &[f64]| of(&inf(x))),
            inverse: Arc::new(move |w: &[f64]| ini(&oi(w))),
            jacobian: Arc::new(move |x: &[f64]| {
                let mid = ifwd(x);
                mat_mul(&oj(&mid), &ij(x), n)
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        (self.forward)(x)
    }

    pub fn inverse(&self, w: &[f64]) -> Vec<f64> {
        (self.inverse)(w)
    }

    /// Row-major Jacobian d mu at x.
    pub fn jacobian(&self, x: &[f64]) -> Vec<f64> {
        (self.jacobian)(x)
    }

    pub fn det_jacobian(&self, x: &[f64]) -> f64 {
        det_n(&self.jacobian(x), self.dim)
    }

    /// Frobenius bound for the Lipschitz constant of the inverse, sampled on
    /// a grid over `working_box`.
    pub fn inverse_lipschitz_bound(&self, working_box: &BoxDomain) -> f64 {
        let n = self.dim;
        let mut bound: f64 = 0.0;
        for x in working_box.grid(params::COMPACT_GRID[n]) {
            let j = self.jacobian(&x);
            if let Some(jinv) = invert_n(&j, n) {
                let frob = jinv.iter().map(|v| v * v).sum::<f64>().sqrt();
                bound = bound.max(frob);
            }
        }
        bound
    }
}

fn identity_matrix(n: usize) -> Vec<f64> {
    let mut j = vec![0.0; n * n];
    for i in 0..n {
        j[i * n + i] = 1.0;
    }
    j
}

fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for r in 0..n {
        for c in 0..n {
            for k in 0..n {
                out[r * n + c] += a[r * n + k] * b[k * n + c];
            }
        }
    }
    out
}

fn det_n(m: &[f64], n: usize) -> f64 {
    match n {
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        3 => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
        _ => panic!("determinant only for n <= 3"),
    }
}

fn invert_n(m: &[f64], n: usize) -> Option<Vec<f64>> {
    let det = det_n(m, n);
    if det == 0.0 {
        return None;
    }
    match n {
        1 => Some(vec![1.0 / m[0]]),
        2 => Some(vec![m[3] / det, -m[1] / det, -m[2] / det, m[0] / det]),
        3 => {
            let c = |r: usize, c: usize| m[r * 3 + c];
            let mut out = vec![0.0; 9];
            out[0] = (c(1, 1) * c(2, 2) - c(1, 2) * c(2, 1)) / det;
            out[1] = (c(0, 2) * c(2, 1) - c(0, 1) * c(2, 2)) / det;
            out[2] = (c(0, 1) * c(1, 2) - c(0, 2) * c(1, 1)) / det;
            out[3] = (c(1, 2) * c(2, 0) - c(1, 0) * c(2, 2)) / det;
            out[4] = (c(0, 0) * c(2, 2) - c(0, 2) * c(2, 0)) / det;
            out[5] = (c(0, 2) * c(1, 0) - c(0, 0) * c(1, 2)) / det;
            out[6] = (c(1, 0) * c(2, 1) - c(1, 1) * c(2, 0)) / det;
            out[7] = (c(0, 1) * c(2, 0) - c(0, 0) * c(2, 1)) / det;
            out[8] = (c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0)) / det;
            Some(out)
        }
        _ => None,
    }
}

/// A smooth vector field with analytic divergence where available, finite
/// differences otherwise.
#[derive(Clone)]
pub struct VectorField {
    dim: usize,
    name: String,
    eval: PointMap,
    divergence: Option<ScalarField>,
}

impl VectorField {
    pub fn new<F>(dim: usize, name: &str, eval: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        VectorField {
            dim,
            name: name.into(),
            eval: Arc::new(eval),
            divergence: None,
        }
    }

    pub fn with_divergence<D>(mut self, div: D) -> Self
    where
        D: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        self.divergence = Some(Arc::new(div));
        self
    }

    pub fn constant(c: Vec<f64>) -> Self {
        let n = c.len();
        VectorField::new(n, "constant", move |_x: &[f64]| c.clone()).with_divergence(|_| 0.0)
    }

    /// X(x) = x; divergence n.
    pub fn radial(dim: usize) -> Self {
        VectorField::new(dim, "radial", |x: &[f64]| x.to_vec())
            .with_divergence(move |x: &[f64]| x.len() as f64)
    }

    /// X(x, y) = (-y, x); divergence 0.
    pub fn rotation_2d() -> Self {
        VectorField::new(2, "rotation", |x: &[f64]| vec![-x[1], x[0]]).with_divergence(|_| 0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        (self.eval)(x)
    }

    /// Div X at x: analytic when supplied, else central differences.
    pub fn div(&self, x: &[f64]) -> f64 {
        if let Some(d) = &self.divergence {
            return d(x);
        }
        let h = params::MAP_FD_STEP;
        let mut acc = 0.0;
        let mut p = x.to_vec();
        for i in 0..self.dim {
            p[i] = x[i] + h;
            let plus = (self.eval)(&p)[i];
            p[i] = x[i] - h;
            let minus = (self.eval)(&p)[i];
            p[i] = x[i];
            acc += (plus - minus) / (2.0 * h);
        }
        acc
    }
}

/// (L_X f)(x) = (df)(x) . X(x) + Div X(x) f(x): the derivative acting as on
/// densities, with the divergence term.
pub fn lie_derivative(f: &dyn Fn(&[f64]) -> f64, field: &VectorField, x: &[f64]) -> f64 {
    let h = params::MAP_FD_STEP;
    let xv = field.eval(x);
    let mut directional = 0.0;
    let mut p = x.to_vec();
    for i in 0..x.len() {
        p[i] = x[i] + h;
        let plus = f(&p);
        p[i] = x[i] - h;
        let minus = f(&p);
        p[i] = x[i];
        directional += (plus - minus) / (2.0 * h) * xv[i];
    }
    directional + field.div(x) * f(x)
}

/// Flow of X from x for time t: classical fixed-step RK4 with step at most
/// FLOW_MAX_STEP; exact at t = 0. Fails if the trajectory leaves `domain`.
pub fn flow(field: &VectorField, x: &[f64], t: f64, domain: &BoxDomain) -> Result<Vec<f64>> {
    if t == 0.0 {
        return Ok(x.to_vec());
    }
    if !domain.contains(x) {
        return Err(Error::DomainExit { at: x.to_vec() });
    }
    let steps = (t.abs() / params::FLOW_MAX_STEP).ceil() as usize;
    let dt = t / steps as f64;
    let n = x.len();
    let mut p = x.to_vec();
    let mut scratch = vec![0.0; n];
    for _ in 0..steps {
        let k1 = field.eval(&p);
        for i in 0..n {
            scratch[i] = p[i] + 0.5 * dt * k1[i];
        }
        let k2 = field.eval(&scratch);
        for i in 0..n {
            scratch[i] = p[i] + 0.5 * dt * k2[i];
        }
        let k3 = field.eval(&scratch);
        for i in 0..n {
            scratch[i] = p[i] + dt * k3[i];
        }
        let k4 = field.eval(&scratch);
        for i in 0..n {
            p[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if !domain.contains(&p) {
            return Err(Error::DomainExit { at: p });
        }
    }
    Ok(p)
}

/// (L'_X Phi)(x): derivative of the base slot along the flow of X, as a
/// function of y, by central difference with step LIE_PRIME_STEP.
pub fn lie_prime<'a>(
    phi: &'a (dyn Fn(&[f64], &[f64]) -> f64 + Sync),
    field: &VectorField,
    x: &[f64],
    domain: &BoxDomain,
) -> Result<impl Fn(&[f64]) -> f64 + 'a> {
    let h = params::LIE_PRIME_STEP;
    let ahead = flow(field, x, h, domain)?;
    let behind = flow(field, x, -h, domain)?;
    Ok(move |y: &[f64]| (phi(&ahead, y) - phi(&behind, y)) / (2.0 * h))
}

/// The standard pushforward (mu_* X)(x) = d mu(mu^-1 x) . X(mu^-1 x);
/// divergence by finite differences.
pub fn pushforward_field(mu: &Diffeomorphism, field: &VectorField) -> VectorField {
    let n = mu.dim();
    let mu2 = mu.clone();
    let field2 = field.clone();
    VectorField::new(n, &format!("{}_*{}", mu.name(), field.name()), move |x: &[f64]| {
        let pre = mu2.inverse(x);
        let j = mu2.jacobian(&pre);
        let v = field2.eval(&pre);
        let mut out = vec![0.0; n];
        for r in 0..n {
            for c in 0..n {
                out[r] += j[r * n + c] * v[c];
            }
        }
        out
    })
}

/// Pullback of a test function in density guise:
/// (mu^* f)(x) = f(mu(x)) det(d mu(x)); preserves integrals.
pub fn pullback_testfn(mu: &Diffeomorphism, f: crate::ScalarFn) -> impl Fn(&[f64]) -> f64 {
    let mu = mu.clone();
    move |x: &[f64]| f(&mu.forward(x)) * mu.det_jacobian(x)
}

/// Pullback of a smoothing kernel: (mu^* K)(eps, x) = mu^*(K(eps, mu(x))),
/// i.e. evaluator (eps, x, y) -> K(eps, mu x)(mu y) det(d mu(y)).
///
/// The support constant is transported by the sampled Lipschitz bound of the
/// inverse; functionals of the pulled-back kernel integrate through mu so
/// quadrature always sees the round inner support.
pub fn pullback_kernel(
    mu: &Diffeomorphism,
    inner: Arc<LocalSmoothingKernel>,
    domain: BoxDomain,
) -> Result<LocalSmoothingKernel> {
    let n = mu.dim();
    if n != inner.dim() || n != domain.dim() {
        return Err(Error::DimensionMismatch {
            left: n,
            right: inner.dim(),
        });
    }
    // Transported margins: mu must carry the new domain into the inner one
    // with room for the support balls.
    let margin = inner.eps0() * inner.support_const();
    for x in domain.grid(params::COMPACT_GRID[n]) {
        let w = mu.forward(&x);
        if !inner.domain().contains(&w) {
            return Err(Error::MarginViolation {
                eps: inner.eps0(),
                detail: format!("mu({x:?}) = {w:?} outside the inner kernel domain"),
            });
        }
        let _ = margin;
    }

    let lipschitz = mu.inverse_lipschitz_bound(&domain);
    let support_const = inner.support_const() * lipschitz;

    let mu_eval = mu.clone();
    let inner_eval = inner.clone();
    let eval = move |eps: f64, x: &[f64], y: &[f64]| {
        let wx = mu_eval.forward(x);
        let wy = mu_eval.forward(y);
        inner_eval.eval(eps, &wx, &wy) * mu_eval.det_jacobian(y)
    };

    let mu_geo = mu.clone();
    let mu_geo_inv = mu.clone();
    let mu_geo_det = mu.clone();
    let geometry = SupportGeometry::Mapped {
        forward: Arc::new(move |p: &[f64]| mu_geo.forward(p)),
        inverse: Arc::new(move |w: &[f64]| mu_geo_inv.inverse(w)),
        det_forward: Arc::new(move |p: &[f64]| mu_geo_det.det_jacobian(p)),
        inner: Box::new(inner.geometry().clone()),
    };

    Ok(LocalSmoothingKernel::from_parts(
        n,
        domain,
        Box::new(eval),
        support_const,
        inner.eps0(),
        inner.order(),
        KernelKind::Pullback,
        geometry,
    ))
}

/// Max residual of the two commutation identities
///   L_X (mu^* Phi) = mu^* (L_{mu_* X} Phi)
///   L'_X (mu^* Phi) = mu^* (L'_{mu_* X} Phi)
/// over the sample pairs (x, y). `phi` is a two-point function on the target
/// domain of mu; `source` and `target` are the domains the flows must stay in.
pub fn check_commutation(
    mu: &Diffeomorphism,
    field: &VectorField,
    phi: &(dyn Fn(&[f64], &[f64]) -> f64 + Sync),
    samples: &[(Vec<f64>, Vec<f64>)],
    source: &BoxDomain,
    target: &BoxDomain,
) -> Result<f64> {
    let n = mu.dim();
    let pushed = pushforward_field(mu, field);
    let h = params::MAP_FD_STEP;
    let mut worst: f64 = 0.0;

    for (x, y) in samples {
        // pulled-back two-point function at fixed x, as a function of y
        let pulled_at_x = |yy: &[f64]| {
            let wx = mu.forward(x);
            let wy = mu.forward(yy);
            phi(&wx, &wy) * mu.det_jacobian(yy)
        };

        // identity 1, left: L_X acting on the y slot of the pullback
        let mut lhs1 = field.div(y) * pulled_at_x(y);
        let xv = field.eval(y);
        let mut p = y.clone();
        for i in 0..n {
            p[i] = y[i] + h;
            let plus = pulled_at_x(&p);
            p[i] = y[i] - h;
            let minus = pulled_at_x(&p);
            p[i] = y[i];
            lhs1 += (plus - minus) / (2.0 * h) * xv[i];
        }

        // identity 1, right: L_{mu_* X} Phi on the target, pulled back
        let wx = mu.forward(x);
        let wy = mu.forward(y);
        let phi_at_wx = |ww: &[f64]| phi(&wx, ww);
        let rhs1 = lie_derivative(&phi_at_wx, &pushed, &wy) * mu.det_jacobian(y);
        worst = worst.max((lhs1 - rhs1).abs());

        // identity 2, left: flow derivative of the base slot in the source
        let pulled = |xx: &[f64], yy: &[f64]| {
            let wx = mu.forward(xx);
            let wy = mu.forward(yy);
            phi(&wx, &wy) * mu.det_jacobian(yy)
        };
        let lhs2 = lie_prime(&pulled, field, x, source)?(y);

        // identity 2, right: flow derivative in the target, pulled back
        let rhs2 = lie_prime(phi, &pushed, &wx, target)?(&wy) * mu.det_jacobian(y);
        worst = worst.max((lhs2 - rhs2).abs());
    }
    Ok(worst)
}

/// Combined verdict for pullback invariance: the pulled-back kernel must
/// keep unit mass, eps-proportional supports (with its own constant), flat
/// derivative scaling, and the declared approximation order.
#[derive(Debug)]
pub struct PullbackReport {
    pub normalization_error: f64,
    pub normalization_ok: bool,
    /// (derivative pair tag, eps, measured support radius / eps, bound C').
    pub support_rows: Vec<(String, f64, f64, f64)>,
    pub support_ok: bool,
    pub scaling: Vec<ScalingReport>,
    pub scaling_ok: bool,
    pub order: RateReport,
    pub pass: bool,
}

/// Runs the support, scaling and order checks on mu^* K.
pub fn check_pullback_preserves(
    pulled: &LocalSmoothingKernel,
    k0: &BoxDomain,
    sweep: &[f64],
    rule: &QuadratureRule,
) -> Result<PullbackReport> {
    let n = pulled.dim();
    let grid = k0.grid(params::COMPACT_GRID[n]);

    // normalization across the sweep and grid
    let mut norm_err: f64 = 0.0;
    for &eps in sweep {
        for x in &grid {
            norm_err = norm_err.max((pulled.integral(eps, x, rule) - 1.0).abs());
        }
    }
    let normalization_ok = norm_err <= params::KERNEL_NORM_TOL;

    // supports of the kernel and a derivative set, one shared constant
    let c_prime = pulled.support_const() * params::SUPPORT_CONST_SLACK;
    let mut support_rows = Vec::new();
    let mut support_ok = true;
    let probe_x = &grid[grid.len() / 2];
    let pairs: Vec<(MultiIndex, MultiIndex)> = support_pairs(n);
    for &eps in &[sweep[0], sweep[sweep.len() / 2]] {
        for (a, b) in &pairs {
            let pair = MultiIndexPair::new(a.clone(), b.clone());
            let rho = pulled.support_radius_of_derivative(&pair, eps, probe_x, 1e-9)?;
            let ok = rho <= eps * c_prime;
            support_ok &= ok;
            support_rows.push((format!("a={a} b={b}"), eps, rho / eps, c_prime));
        }
    }

    // derivative scaling on a subset of index pairs
    let mut scaling = Vec::new();
    let mut scaling_ok = true;
    for (alpha, beta) in scaling_pairs(n) {
        let report = pulled.check_scaling(k0, &alpha, &beta, sweep)?;
        scaling_ok &= report.pass;
        scaling.push(report);
    }

    // approximation order through the two-point estimate
    let f = crate::approx_props::TwoPointField::new(n, |x: &[f64], y: &[f64]| {
        let sx: f64 = x.iter().sum();
        let sy: f64 = y.iter().sum();
        (sx * 0.5 + sy).sin() + 0.25 * (sy - sx).cos()
    });
    let order = crate::approx_props::two_point_order(&f, pulled, sweep, &grid, rule)?;

    let pass = normalization_ok && support_ok && scaling_ok && order.pass;
    Ok(PullbackReport {
        normalization_error: norm_err,
        normalization_ok,
        support_rows,
        support_ok,
        scaling,
        scaling_ok,
        order,
        pass,
    })
}

fn support_pairs(n: usize) -> Vec<(MultiIndex, MultiIndex)> {
    let zero = MultiIndex::zero(n);
    let e1 = MultiIndex::unit(n, 0);
    let e1_sq = MultiIndex::along_axis(n, 0, 2);
    vec![
        (zero.clone(), zero.clone()),
        (zero.clone(), e1.clone()),
        (e1.clone(), zero.clone()),
        (e1.clone(), e1.clone()),
        (zero.clone(), e1_sq.clone()),
        (e1.clone(), e1_sq),
    ]
}

fn scaling_pairs(n: usize) -> Vec<(MultiIndex, MultiIndex)> {
    let zero = MultiIndex::zero(n);
    let e1 = MultiIndex::unit(n, 0);
    vec![
        (zero.clone(), zero.clone()),
        (zero.clone(), e1.clone()),
        (e1.clone(), zero.clone()),
        (e1.clone(), e1.clone()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bump::BumpFunction;
    use crate::domain::dist;
    use crate::mollifier::Mollifier;
    use crate::quad::integrate_box;

    fn domain(half: f64) -> BoxDomain {
        BoxDomain::centered(1, half)
    }

    #[test]
    fn lie_derivative_constant_field() {
        // X = c, div 0: L_X f = c f'
        let field = VectorField::constant(vec![2.0]);
        let f = |x: &[f64]| (x[0] * 1.3).sin();
        let v = lie_derivative(&f, &field, &[0.4]);
        let expected = 2.0 * 1.3 * (0.4f64 * 1.3).cos();
        assert!((v - expected).abs() < 1e-8, "{v} vs {expected}");
    }

    #[test]
    fn lie_derivative_radial_field() {
        // X = x, div 1: L_X f = x f' + f
        let field = VectorField::radial(1);
        let f = |x: &[f64]| x[0] * x[0];
        let v = lie_derivative(&f, &field, &[0.7]);
        let expected = 0.7 * 1.4 + 0.49;
        assert!((v - expected).abs() < 1e-8);
    }

    #[test]
    fn lie_derivative_integrates_to_zero() {
        // L_X f is a total divergence, so it integrates to 0 over the
        // support of a compactly supported f
        let bump = BumpFunction::new(1, 2.0, 1.0).unwrap();
        let field = VectorField::new(1, "spatially varying", |x: &[f64]| vec![x[0].cos() + 0.5]);
        let f = move |x: &[f64]| bump.eval(x);
        let rule = QuadratureRule::gauss_legendre(128);
        let v = integrate_box(
            |x| lie_derivative(&f, &field, x),
            &BoxDomain::centered(1, 2.5),
            &rule,
        );
        assert!(v.abs() < 1e-8, "{v}");
    }

    #[test]
    fn flow_constant_field_is_exact() {
        let field = VectorField::constant(vec![1.5]);
        let p = flow(&field, &[0.2], 0.5, &domain(5.0)).unwrap();
        assert!((p[0] - 0.95).abs() < 1e-12);
        let q = flow(&field, &[0.2], 0.0, &domain(5.0)).unwrap();
        assert_eq!(q[0], 0.2);
    }

    #[test]
    fn flow_radial_matches_exponential() {
        let field = VectorField::radial(1);
        let p = flow(&field, &[0.3], 0.7, &domain(5.0)).unwrap();
        let expected = 0.3 * 0.7f64.exp();
        assert!((p[0] - expected).abs() < 1e-8, "{} vs {expected}", p[0]);
    }

    #[test]
    fn flow_group_property() {
        let field = VectorField::new(1, "nonlinear", |x: &[f64]| vec![(x[0]).sin() + 1.2]);
        let d = domain(5.0);
        let a = flow(&field, &[0.1], 0.3, &d).unwrap();
        let b = flow(&field, &a, 0.4, &d).unwrap();
        let c = flow(&field, &[0.1], 0.7, &d).unwrap();
        assert!((b[0] - c[0]).abs() < 1e-8);
    }

    #[test]
    fn flow_domain_exit_detected() {
        let field = VectorField::constant(vec![1.0]);
        assert!(matches!(
            flow(&field, &[4.9], 0.5, &domain(5.0)),
            Err(Error::DomainExit { .. })
        ));
    }

    #[test]
    fn lie_prime_zero_field_is_zero() {
        let phi = |_x: &[f64], y: &[f64]| (y[0]).cos();
        let field = VectorField::constant(vec![0.0]);
        let lp = lie_prime(&phi, &field, &[0.3], &domain(5.0)).unwrap();
        assert_eq!(lp(&[0.4]), 0.0);
    }

    #[test]
    fn lie_prime_on_canonical_slice_is_minus_y_derivative() {
        // the kernel slice depends on y - x only, so the base-slot derivative
        // along e_1 equals minus the y derivative
        let phi_m = Mollifier::build_order_k(&BumpFunction::standard(1), 0).unwrap();
        let eps = 0.5;
        let phi = move |x: &[f64], y: &[f64]| phi_m.eval(&[(y[0] - x[0]) / eps]) / eps;
        let field = VectorField::constant(vec![1.0]);
        let lp = lie_prime(&phi, &field, &[0.0], &domain(5.0)).unwrap();

        let phi_m2 = Mollifier::build_order_k(&BumpFunction::standard(1), 0).unwrap();
        let y = 0.2;
        let h = 1e-5;
        let dy = (phi_m2.eval(&[(y + h) / eps]) - phi_m2.eval(&[(y - h) / eps])) / (2.0 * h * eps);
        assert!((lp(&[y]) + dy).abs() < 1e-5, "{} vs {}", lp(&[y]), -dy);
    }

    #[test]
    fn lie_prime_product_rule() {
        // Phi(x) = m(x) psi: derivative is (dm . X) psi
        let psi = |y: f64| (y * 0.7).cos();
        let phi = move |x: &[f64], y: &[f64]| (x[0] * x[0] + 1.0) * psi(y[0]);
        let field = VectorField::constant(vec![1.0]);
        let x0 = 0.6;
        let lp = lie_prime(&phi, &field, &[x0], &domain(5.0)).unwrap();
        for y in [-0.3, 0.0, 0.9] {
            let expected = 2.0 * x0 * psi(y);
            assert!((lp(&[y]) - expected).abs() < 1e-6, "y={y}");
        }
    }

    #[test]
    fn pushforward_identity_keeps_field() {
        let mu = Diffeomorphism::identity(1);
        let field = VectorField::new(1, "f", |x: &[f64]| vec![x[0].sin()]);
        let pushed = pushforward_field(&mu, &field);
        assert!((pushed.eval(&[0.8])[0] - 0.8f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn pushforward_affine_constant() {
        // mu = A x + b, X constant c: mu_* X = A c
        let mu = Diffeomorphism::affine(vec![2.0], vec![1.0]).unwrap();
        let field = VectorField::constant(vec![3.0]);
        let pushed = pushforward_field(&mu, &field);
        assert!((pushed.eval(&[0.0])[0] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn flow_conjugacy() {
        // mu(Fl^X_t x) = Fl^{mu_* X}_t (mu x)
        let d_src = domain(5.0);
        let d_tgt = domain(8.0);
        let mu = Diffeomorphism::sine(1, 0.1).unwrap();
        let field = VectorField::new(1, "nl", |x: &[f64]| vec![0.8 + 0.3 * x[0].cos()]);
        let pushed = pushforward_field(&mu, &field);
        for (x0, t) in [(0.2, 0.4), (-1.0, 0.25), (1.5, -0.3)] {
            let lhs = mu.forward(&flow(&field, &[x0], t, &d_src).unwrap());
            let rhs = flow(&pushed, &mu.forward(&[x0]), t, &d_tgt).unwrap();
            assert!(
                dist(&lhs, &rhs) < 1e-6,
                "x0={x0}, t={t}: {lhs:?} vs {rhs:?}"
            );
        }
    }

    #[test]
    fn pullback_testfn_identity() {
        let mu = Diffeomorphism::identity(1);
        let f: crate::ScalarFn = Arc::new(|x: &[f64]| x[0].cos());
        let pulled = pullback_testfn(&mu, f);
        assert!((pulled(&[0.3]) - 0.3f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn pullback_testfn_preserves_integral_affine() {
        let mu = Diffeomorphism::affine(vec![2.0], vec![0.3]).unwrap();
        let bump = BumpFunction::standard(1);
        let f: crate::ScalarFn = Arc::new(move |x: &[f64]| bump.eval(x));
        let rule = QuadratureRule::gauss_legendre(200);
        let original = integrate_box(
            |x| {
                let b = BumpFunction::standard(1);
                b.eval(x)
            },
            &BoxDomain::centered(1, 1.0),
            &rule,
        );
        // integrate the pullback on a box whose edges meet the transported
        // support boundary mu^-1(+-1) = (-0.65, 0.35) exactly
        let pulled = pullback_testfn(&mu, f);
        let transported = integrate_box(
            &pulled,
            &BoxDomain::new(vec![-0.65], vec![0.35]).unwrap(),
            &rule,
        );
        assert!(
            (original - transported).abs() < 1e-10,
            "{transported} vs {original}"
        );
    }

    #[test]
    fn pullback_testfn_preserves_integral_sine_map() {
        let mu = Diffeomorphism::sine(1, 0.1).unwrap();
        let bump = BumpFunction::standard(1);
        let f: crate::ScalarFn = Arc::new(move |x: &[f64]| bump.eval(x));
        let rule = QuadratureRule::gauss_legendre(256);
        let original = 0.44399381616807944;
        let pulled = pullback_testfn(&mu, f);
        let transported = integrate_box(&pulled, &BoxDomain::centered(1, 1.5), &rule);
        assert!(
            (original - transported).abs() < 1e-8,
            "{transported} vs {original}"
        );
    }

    #[test]
    fn pullback_functoriality() {
        // (mu . nu)^* f = nu^* (mu^* f)
        let mu = Diffeomorphism::sine(1, 0.1).unwrap();
        let nu = Diffeomorphism::affine(vec![0.5], vec![0.2]).unwrap();
        let comp = Diffeomorphism::compose(&mu, &nu).unwrap();
        let f: crate::ScalarFn = Arc::new(|x: &[f64]| (x[0] * 1.7).sin() + 0.3);

        let direct = pullback_testfn(&comp, f.clone());
        let mu_f = pullback_testfn(&mu, f);
        let mu_f_arc: crate::ScalarFn = Arc::new(mu_f);
        let staged = pullback_testfn(&nu, mu_f_arc);
        for x in [-1.2, -0.1, 0.8, 2.0] {
            let a = direct(&[x]);
            let b = staged(&[x]);
            assert!((a - b).abs() < 1e-10, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn sine_inverse_roundtrip() {
        let mu = Diffeomorphism::sine(1, 0.1).unwrap();
        for x in [-3.0, -0.7, 0.0, 1.9, 4.2] {
            let w = mu.forward(&[x]);
            let back = mu.inverse(&w);
            assert!((back[0] - x).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn pullback_kernel_identity_matches() {
        let phi = Mollifier::build_order_k(&BumpFunction::standard(1), 0).unwrap();
        let inner = Arc::new(
            LocalSmoothingKernel::canonical(phi, BoxDomain::centered(1, 6.0)).unwrap(),
        );
        let pulled = pullback_kernel(
            &Diffeomorphism::identity(1),
            inner.clone(),
            BoxDomain::centered(1, 5.0),
        )
        .unwrap();
        for (eps, x, y) in [(0.5, 0.1, 0.3), (0.125, -0.4, -0.38)] {
            assert!((pulled.eval(eps, &[x], &[y]) - inner.eval(eps, &[x], &[y])).abs() < 1e-14);
        }
        assert_eq!(pulled.kind(), KernelKind::Pullback);
    }

    #[test]
    fn pullback_kernel_scaling_halves_support() {
        // mu = 2x: supp (mu^* K)(eps, x) within B_{eps C/2}(x)
        let phi = Mollifier::build_order_k(&BumpFunction::standard(1), 0).unwrap();
        let inner = Arc::new(
            LocalSmoothingKernel::canonical(phi, BoxDomain::centered(1, 12.0)).unwrap(),
        );
        let pulled = pullback_kernel(
            &Diffeomorphism::scaling(1, 2.0),
            inner,
            BoxDomain::centered(1, 5.0),
        )
        .unwrap();
        assert!((pulled.support_const() - 0.5).abs() < 1e-9);
        let eps = 0.25;
        assert_eq!(pulled.eval(eps, &[0.0], &[0.6 * eps]), 0.0);
        assert!(pulled.eval(eps, &[0.0], &[0.4 * eps]) != 0.0);
    }

    #[test]
    fn pullback_kernel_nonlinear_keeps_unit_mass() {
        let phi = Mollifier::build_order_k(&BumpFunction::standard(1), 2).unwrap();
        let inner = Arc::new(
            LocalSmoothingKernel::canonical(phi, BoxDomain::centered(1, 7.0)).unwrap(),
        );
        let mu = Diffeomorphism::sine(1, 0.1).unwrap();
        let pulled = pullback_kernel(&mu, inner, BoxDomain::centered(1, 5.0)).unwrap();
        let rule = QuadratureRule::default_for_dim(1);
        for &eps in &[0.5, 0.125, 0.03125] {
            for x in [-2.0, 0.0, 1.5] {
                let v = pulled.integral(eps, &[x], &rule);
                assert!((v - 1.0).abs() < 1e-8, "eps={eps}, x={x}: {v}");
            }
        }
    }

    #[test]
    fn pullback_kernel_domain_margin_error() {
        let phi = Mollifier::build_order_k(&BumpFunction::standard(1), 0).unwrap();
        let inner = Arc::new(
            LocalSmoothingKernel::canonical(phi, BoxDomain::centered(1, 4.0)).unwrap(),
        );
        // scaling 2x maps (-5,5) onto (-10,10), far outside the inner domain
        assert!(matches!(
            pullback_kernel(
                &Diffeomorphism::scaling(1, 2.0),
                inner,
                BoxDomain::centered(1, 5.0)
            ),
            Err(Error::MarginViolation { .. })
        ));
    }

    #[test]
    fn commutation_zero_field_is_exact() {
        let mu = Diffeomorphism::sine(1, 0.1).unwrap();
        let field = VectorField::constant(vec![0.0]);
        let bump = BumpFunction::new(1, 1.0, 1.0).unwrap();
        let phi = move |x: &[f64], y: &[f64]| bump.eval(&[y[0] - 0.3 * x[0]]);
        let samples = vec![(vec![0.2], vec![0.4]), (vec![-0.5], vec![-0.2])];
        let res = check_commutation(
            &mu,
            &field,
            &phi,
            &samples,
            &BoxDomain::centered(1, 5.0),
            &BoxDomain::centered(1, 6.0),
        )
        .unwrap();
        assert!(res < 1e-12, "{res}");
    }

    #[test]
    fn commutation_affine_battery_tight() {
        let mu = Diffeomorphism::affine(vec![2.0], vec![0.5]).unwrap();
        let field = VectorField::radial(1);
        let phi_m = Mollifier::build_order_k(&BumpFunction::standard(1), 0).unwrap();
        let eps = 1.0;
        let phi = move |x: &[f64], y: &[f64]| phi_m.eval(&[(y[0] - x[0]) / eps]) / eps;
        let samples = vec![
            (vec![0.2], vec![0.5]),
            (vec![-0.3], vec![-0.1]),
            (vec![0.8], vec![0.9]),
        ];
        let res = check_commutation(
            &mu,
            &field,
            &phi,
            &samples,
            &BoxDomain::centered(1, 5.0),
            &BoxDomain::centered(1, 12.0),
        )
        .unwrap();
        assert!(res < 1e-5, "{res}");
    }
}
