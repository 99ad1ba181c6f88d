//! mollikit: order-k mollifiers, local smoothing kernels, and numeric
//! verification of their approximation, support, scaling and
//! diffeomorphism-transformation properties.
//!
//! The crate builds smooth compactly supported kernels phi~(eps, x) from
//! radial bumps, measures how fast integrals against them converge as
//! eps -> 0 (log-log slope fits over geometric sweeps), and checks the
//! support and derivative-scaling conditions that make such a family a
//! local smoothing kernel of a given order, including behaviour under
//! pullback along diffeomorphisms and pairing with distributions.

pub mod approx_props;
pub mod bump;
pub mod distrib;
pub mod domain;
pub mod error;
pub mod geometry;
pub mod kernel;
mod linalg;
pub mod mollifier;
pub mod multi_index;
pub mod params;
pub mod presets;
pub mod quad;
pub mod rate;

pub use approx_props::{Deriv, LimitCase, TwoPointField};
pub use bump::BumpFunction;
pub use distrib::Distribution;
pub use domain::BoxDomain;
pub use error::{Error, Result};
pub use geometry::{Diffeomorphism, VectorField};
pub use kernel::{KernelKind, LocalSmoothingKernel, ScalingReport};
pub use mollifier::Mollifier;
pub use multi_index::{MultiIndex, MultiIndexPair};
pub use quad::{integrate_box, integrate_scaled, QuadratureRule};
pub use rate::{fit_rate, RateReport};

/// Shared-ownership scalar function of a point, the common currency of the
/// test-function suites.
pub type ScalarFn = std::sync::Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
