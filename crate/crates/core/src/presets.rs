//! Standard kernels, test-function suites, two-point fields and
//! diffeomorphism batteries shared by the verification suites, the CLI and
//! the demo.

use std::sync::Arc;

use crate::approx_props::TwoPointField;
use crate::bump::BumpFunction;
use crate::domain::BoxDomain;
use crate::error::Result;
use crate::geometry::{Diffeomorphism, VectorField};
use crate::kernel::LocalSmoothingKernel;
use crate::mollifier::Mollifier;
use crate::multi_index::MultiIndex;
use crate::params;

pub use crate::ScalarFn;

/// The working domain Omega = (-5, 5)^n.
pub fn standard_domain(n: usize) -> BoxDomain {
    BoxDomain::centered(n, 5.0)
}

/// The compact sub-box K0 = [-2, 2]^n used for sup sampling.
pub fn standard_compact(n: usize) -> BoxDomain {
    BoxDomain::centered(n, 2.0)
}

/// Grid on K0 at the per-dimension compact resolution.
pub fn compact_grid(n: usize) -> Vec<Vec<f64>> {
    standard_compact(n).grid(params::COMPACT_GRID[n])
}

/// Grid spanning almost all of Omega, for the "uniformly for y in Omega"
/// claims.
pub fn omega_grid(n: usize) -> Vec<Vec<f64>> {
    BoxDomain::centered(n, 4.4).grid(params::COMPACT_GRID[n])
}

/// Order-k mollifier on the standard radius-1 bump.
pub fn standard_mollifier(n: usize, k: usize) -> Result<Mollifier> {
    Mollifier::build_order_k(&BumpFunction::standard(n), k)
}

/// Order-0 mollifier with a deliberately nonzero first moment; the sharp
/// O(eps) behaviour of the limit checks is only visible without symmetry.
pub fn asymmetric_mollifier(n: usize) -> Result<Mollifier> {
    Mollifier::with_polynomial(
        &BumpFunction::standard(n),
        vec![
            (MultiIndex::zero(n), 1.0),
            (MultiIndex::unit(n, 0), 0.5),
        ],
    )
}

/// Canonical kernel of order k on the standard domain.
pub fn canonical_kernel(n: usize, k: usize) -> Result<LocalSmoothingKernel> {
    LocalSmoothingKernel::canonical(standard_mollifier(n, k)?, standard_domain(n))
}

/// Canonical kernel from the asymmetric order-0 mollifier.
pub fn asymmetric_kernel(n: usize) -> Result<LocalSmoothingKernel> {
    LocalSmoothingKernel::canonical(asymmetric_mollifier(n)?, standard_domain(n))
}

/// Blended x-varying kernel: two order-k mollifiers with support radii 1 and
/// 0.8, mixed by the smooth weight w(x) = (1 + tanh x_1)/2.
pub fn blended_kernel(n: usize, k: usize) -> Result<LocalSmoothingKernel> {
    let phi0 = standard_mollifier(n, k)?;
    let phi1 = Mollifier::build_order_k(&BumpFunction::new(n, 0.8, 1.0)?, k)?;
    LocalSmoothingKernel::varying(
        phi0,
        phi1,
        |x: &[f64]| 0.5 * (1.0 + x[0].tanh()),
        standard_domain(n),
    )
}

/// The standard suite {sin, exp, runge} restricted to the working domain.
pub fn standard_suite(_n: usize) -> Vec<(String, ScalarFn)> {
    let sum = |y: &[f64]| y.iter().sum::<f64>();
    vec![
        (
            "sin".into(),
            Arc::new(move |y: &[f64]| sum(y).sin()) as ScalarFn,
        ),
        (
            "exp".into(),
            Arc::new(move |y: &[f64]| (0.5 * sum(y)).exp()) as ScalarFn,
        ),
        (
            "runge".into(),
            Arc::new(|y: &[f64]| 1.0 / (1.0 + y.iter().map(|v| v * v).sum::<f64>())) as ScalarFn,
        ),
    ]
}

/// Smooth two-point fields without compact support, for the y-integral cases.
pub fn free_fields(n: usize) -> Vec<(String, TwoPointField)> {
    vec![
        (
            "sin_mix".into(),
            TwoPointField::new(n, |x: &[f64], y: &[f64]| {
                let sx: f64 = x.iter().sum();
                let sy: f64 = y.iter().sum();
                (sx + 2.0 * sy).sin()
            }),
        ),
        (
            "exp_cos".into(),
            TwoPointField::new(n, |x: &[f64], y: &[f64]| {
                let sx: f64 = x.iter().sum();
                let sy: f64 = y.iter().sum();
                (0.3 * sx).exp() * (0.7 * sy).cos()
            }),
        ),
    ]
}

/// Two-point fields with the compact x-support descriptor, for the
/// x-integral cases: a bump profile in x times a smooth factor in y.
pub fn compactly_supported_fields(n: usize) -> Vec<(String, TwoPointField)> {
    let support = standard_compact(n);
    let mut out = Vec::new();

    let g = BumpFunction::new(n, 2.0, 1.0).expect("radius-2 bump");
    out.push((
        "bump_sin".into(),
        TwoPointField::new(n, move |x: &[f64], y: &[f64]| {
            let sy: f64 = y.iter().sum();
            g.eval(x) * (1.0 + 0.5 * sy.sin())
        })
        .with_x_support(support.clone()),
    ));

    let g = BumpFunction::new(n, 2.0, 1.0).expect("radius-2 bump");
    out.push((
        "bump_linear".into(),
        TwoPointField::new(n, move |x: &[f64], y: &[f64]| {
            let sy: f64 = y.iter().sum();
            let sx: f64 = x.iter().sum();
            g.eval(x) * (1.0 + 0.3 * sy + 0.1 * sx * sy)
        })
        .with_x_support(support.clone()),
    ));

    out
}

/// Diffeomorphisms with closed-form inverses: identity, dilation, a rotation
/// or affine map, and the componentwise sine perturbation.
pub fn diffeo_battery(n: usize) -> Vec<Diffeomorphism> {
    let mut out = vec![Diffeomorphism::identity(n), Diffeomorphism::scaling(n, 2.0)];
    match n {
        1 => {
            out.push(Diffeomorphism::affine(vec![1.5], vec![0.4]).expect("affine"));
        }
        2 => {
            out.push(Diffeomorphism::rotation_2d(0.5));
        }
        _ => {}
    }
    out.push(Diffeomorphism::sine(n, 0.1).expect("sine map"));
    out
}

/// Vector fields for the commutation battery.
pub fn field_battery(n: usize) -> Vec<VectorField> {
    let mut c = vec![0.0; n];
    c[0] = 1.0;
    let mut out = vec![VectorField::constant(c), VectorField::radial(n)];
    if n == 2 {
        out.push(VectorField::rotation_2d());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batteries_are_well_formed() {
        for n in 1..=2 {
            assert!(canonical_kernel(n, 0).is_ok());
            assert!(blended_kernel(n, 2).is_ok());
            assert!(asymmetric_kernel(n).is_ok());
            assert_eq!(standard_suite(n).len(), 3);
            assert!(diffeo_battery(n).len() >= 3);
            assert!(!field_battery(n).is_empty());
        }
    }

    #[test]
    fn asymmetric_mollifier_has_first_moment() {
        let phi = asymmetric_mollifier(1).unwrap();
        let m1 = phi.moment(&MultiIndex::unit(1, 0));
        assert!(m1.abs() > 1e-3, "{m1}");
    }

    #[test]
    fn compact_fields_carry_descriptor() {
        for (_, f) in compactly_supported_fields(1) {
            assert!(f.x_support().is_some());
            // vanishes outside the descriptor box
            assert_eq!(f.eval(&[2.5], &[0.0]), 0.0);
        }
    }
}
