//! Deterministic Gauss-Legendre quadrature over boxes in R^n (n <= 3).
//!
//! All the integrals in the library run through the entry points here:
//! [`integrate_box`] for fixed domains and [`integrate_scaled`] /
//! [`integrate_scaled_with_breaks`] for integrals over shrinking balls
//! B_{eps r}(x). The scaled variants substitute y = x + eps z and integrate z
//! over the fixed box [-r, r]^n, so their accuracy does not degrade as
//! eps -> 0 for kernels of the canonical scaled form. Balls are integrated as
//! enclosing boxes; the integrands vanish identically outside their support,
//! so no geometric clipping is needed. When an integrand is non-analytic at
//! known interior radii (blends of bumps with different support radii), the
//! break variants split each axis there and integrate panel by panel.

use crate::domain::BoxDomain;
use crate::params;

/// Tensor-product Gauss-Legendre rule; nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Rule with `n` nodes per axis. Exact for per-axis polynomial degree
    /// <= 2n - 1 up to rounding.
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 2, "need at least 2 nodes per axis");
        let (nodes, weights) = gauss_legendre_table(n);
        QuadratureRule { nodes, weights }
    }

    /// The default verification rule for dimension `dim`.
    pub fn default_for_dim(dim: usize) -> Self {
        assert!((1..=3).contains(&dim));
        Self::gauss_legendre(params::DEFAULT_NODES[dim])
    }

    /// The finer rule used when constructing mollifiers.
    pub fn construction_for_dim(dim: usize) -> Self {
        assert!((1..=3).contains(&dim));
        Self::gauss_legendre(params::CONSTRUCTION_NODES[dim])
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], via
/// Newton iteration on the Legendre recurrence.
fn gauss_legendre_table(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n and its derivative at x by upward recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Kahan-compensated accumulator; the 3D rules sum ~3e4 terms and plain
/// summation alone eats into the 1e-14 exactness budget.
#[derive(Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Core tensor loop: integrates f over the panel with per-axis affine maps
/// z in [-1,1] -> mid + half*z.
fn tensor_panel<F>(f: &F, mid: &[f64], half: &[f64], rule: &QuadratureRule, acc: &mut Kahan)
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let n = mid.len();
    let npts = rule.nodes_per_axis();
    let jac: f64 = half.iter().product();
    let mut idx = vec![0usize; n];
    let mut point = vec![0.0; n];
    loop {
        let mut w = 1.0;
        for i in 0..n {
            point[i] = mid[i] + half[i] * rule.nodes()[idx[i]];
            w *= rule.weights()[idx[i]];
        }
        acc.add(w * jac * f(&point));
        let mut axis = 0;
        loop {
            idx[axis] += 1;
            if idx[axis] < npts {
                break;
            }
            idx[axis] = 0;
            axis += 1;
            if axis == n {
                return;
            }
        }
    }
}

/// Tensor-product Gauss-Legendre approximation of the integral of f over a box.
pub fn integrate_box<F>(f: F, domain: &BoxDomain, rule: &QuadratureRule) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let n = domain.dim();
    let mut half = vec![0.0; n];
    let mut mid = vec![0.0; n];
    for i in 0..n {
        half[i] = 0.5 * (domain.hi()[i] - domain.lo()[i]);
        mid[i] = 0.5 * (domain.hi()[i] + domain.lo()[i]);
    }
    let mut acc = Kahan::default();
    tensor_panel(&f, &mid, &half, rule, &mut acc);
    acc.sum
}

/// Integral of f over the ball/box of radius eps*r around x, computed in the
/// scaled variable: y = x + eps z with z over [-r, r]^n, times eps^n.
pub fn integrate_scaled<F>(f: F, center: &[f64], eps: f64, radius: f64, rule: &QuadratureRule) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    integrate_scaled_with_breaks(f, center, eps, radius, &[], rule)
}

/// Like [`integrate_scaled`], splitting every axis at +-b for each break
/// radius b in `breaks` (0 < b < radius). Panel edges then coincide with the
/// support boundaries of blend components, restoring fast convergence.
pub fn integrate_scaled_with_breaks<F>(
    f: F,
    center: &[f64],
    eps: f64,
    radius: f64,
    breaks: &[f64],
    rule: &QuadratureRule,
) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    assert!(eps > 0.0);
    let n = center.len();

    // Per-axis panel edges in the scaled variable, symmetric about 0.
    let mut edges: Vec<f64> = Vec::with_capacity(2 * breaks.len() + 2);
    edges.push(-radius);
    let mut sorted: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|b| *b > 0.0 && *b < radius)
        .collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted.dedup();
    for &b in sorted.iter().rev() {
        edges.insert(1, b);
        edges.insert(1, -b);
    }
    edges.push(radius);
    let panels = edges.len() - 1;

    let mut acc = Kahan::default();
    let mut panel_idx = vec![0usize; n];
    let mut mid = vec![0.0; n];
    let mut half = vec![0.0; n];
    loop {
        for i in 0..n {
            let (a, b) = (edges[panel_idx[i]], edges[panel_idx[i] + 1]);
            // y_i = center_i + eps * z_i with z_i over [a, b]
            mid[i] = center[i] + eps * 0.5 * (a + b);
            half[i] = eps * 0.5 * (b - a);
        }
        tensor_panel(&f, &mid, &half, rule, &mut acc);
        let mut axis = 0;
        loop {
            panel_idx[axis] += 1;
            if panel_idx[axis] < panels {
                break;
            }
            panel_idx[axis] = 0;
            axis += 1;
            if axis == n {
                return acc.sum;
            }
        }
    }
}
