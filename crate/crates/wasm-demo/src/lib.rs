//! Interactive browser demo for mollikit: mollifier shapes, convergence
//! sweeps and kernel pullbacks, exported through wasm-bindgen as JSON so the
//! page stays a single static file with a little plotting JavaScript.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use mollikit::approx_props::{two_point_order, TwoPointField};
use mollikit::distrib::{embed, Distribution};
use mollikit::geometry::{pullback_kernel, Diffeomorphism};
use mollikit::kernel::LocalSmoothingKernel;
use mollikit::multi_index::MultiIndex;
use mollikit::presets;
use mollikit::quad::QuadratureRule;
use mollikit::BoxDomain;

use std::sync::Arc;

#[derive(Serialize)]
struct MollifierProfile {
    order: usize,
    radius: f64,
    xs: Vec<f64>,
    ys: Vec<f64>,
    coefficients: Vec<(String, f64)>,
    moments: Vec<(String, f64)>,
}

/// Samples the order-k 1D mollifier on [-1.2, 1.2] together with its
/// correction coefficients and first moments.
#[wasm_bindgen]
pub fn mollifier_profile(k: usize, samples: usize) -> Result<String, JsError> {
    mollifier_profile_impl(k, samples).map_err(|e| JsError::new(&e))
}

fn mollifier_profile_impl(k: usize, samples: usize) -> Result<String, String> {
    let samples = samples.clamp(16, 2000);
    let phi = presets::standard_mollifier(1, k).map_err(stringify)?;
    let xs: Vec<f64> = (0..samples)
        .map(|i| -1.2 + 2.4 * i as f64 / (samples - 1) as f64)
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| phi.eval(&[x])).collect();
    let coefficients = phi
        .coefficients()
        .iter()
        .map(|(mi, c)| (mi.to_string(), *c))
        .collect();
    let moments = (0..=k.max(2) as u32 + 1)
        .map(|j| {
            let mi = MultiIndex::along_axis(1, 0, j);
            let m = phi.moment(&mi);
            (format!("m{j}"), m)
        })
        .collect();
    let profile = MollifierProfile {
        order: k,
        radius: phi.radius(),
        xs,
        ys,
        coefficients,
        moments,
    };
    serde_json::to_string(&profile).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct ConvergenceSweep {
    order: usize,
    function: String,
    eps: Vec<f64>,
    errors: Vec<f64>,
    slope: Option<f64>,
    r_squared: Option<f64>,
    floor: bool,
    target: f64,
    pass: bool,
}

/// Runs the order-k two-point sweep for one of the standard test functions
/// ("sin", "exp", "runge") and reports the fitted log-log slope.
#[wasm_bindgen]
pub fn convergence_sweep(k: usize, function: &str) -> Result<String, JsError> {
    convergence_sweep_impl(k, function).map_err(|e| JsError::new(&e))
}

fn convergence_sweep_impl(k: usize, function: &str) -> Result<String, String> {
    let kernel = presets::canonical_kernel(1, k).map_err(stringify)?;
    let rule = QuadratureRule::default_for_dim(1);
    let grid = BoxDomain::centered(1, 2.0).grid(11);
    let sweep: Vec<f64> = (1..=9).map(|i| 0.5f64.powi(i)).collect();

    let f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> = match function {
        "sin" => Arc::new(|y: &[f64]| y[0].sin()),
        "exp" => Arc::new(|y: &[f64]| (0.5 * y[0]).exp()),
        "runge" => Arc::new(|y: &[f64]| 1.0 / (1.0 + y[0] * y[0])),
        other => return Err(format!("unknown function {other}")),
    };
    let field = {
        let f = f.clone();
        TwoPointField::new(1, move |_x: &[f64], y: &[f64]| f(y))
    };
    let report = two_point_order(&field, &kernel, &sweep, &grid, &rule).map_err(stringify)?;

    let out = ConvergenceSweep {
        order: k,
        function: function.to_string(),
        eps: report.samples.iter().map(|&(e, _)| e).collect(),
        errors: report.samples.iter().map(|&(_, e)| e).collect(),
        slope: finite(report.slope),
        r_squared: finite(report.r_squared),
        floor: report.floor,
        target: report.target_slope.unwrap_or(f64::NAN),
        pass: report.pass,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct PullbackProfile {
    amplitude: f64,
    eps: f64,
    x0: f64,
    ys: Vec<f64>,
    original: Vec<f64>,
    pulled: Vec<f64>,
    original_mass: f64,
    pulled_mass: f64,
    support_const: f64,
    pulled_support_const: f64,
}

/// Profiles the canonical order-2 kernel slice phi~(eps, x0) against its
/// pullback under mu(x) = x + amplitude sin(x).
#[wasm_bindgen]
pub fn pullback_profile(
    amplitude: f64,
    eps: f64,
    x0: f64,
    samples: usize,
) -> Result<String, JsError> {
    pullback_profile_impl(amplitude, eps, x0, samples).map_err(|e| JsError::new(&e))
}

fn pullback_profile_impl(
    amplitude: f64,
    eps: f64,
    x0: f64,
    samples: usize,
) -> Result<String, String> {
    if amplitude.abs() >= 0.95 {
        return Err("amplitude must satisfy |a| < 0.95".into());
    }
    if !(0.01..=0.5).contains(&eps) {
        return Err("eps must lie in [0.01, 0.5]".into());
    }
    if x0.abs() > 3.0 {
        return Err("x0 must lie in [-3, 3]".into());
    }
    let samples = samples.clamp(32, 2000);

    let phi = presets::standard_mollifier(1, 2).map_err(stringify)?;
    let inner = Arc::new(
        LocalSmoothingKernel::canonical(phi.clone(), BoxDomain::centered(1, 16.0)).map_err(stringify)?,
    );
    let mu = Diffeomorphism::sine(1, amplitude).map_err(stringify)?;
    let pulled = pullback_kernel(&mu, inner, BoxDomain::centered(1, 5.0)).map_err(stringify)?;
    let original =
        LocalSmoothingKernel::canonical(phi, BoxDomain::centered(1, 5.0)).map_err(stringify)?;

    let half = 1.3 * eps * pulled.support_const().max(original.support_const());
    let ys: Vec<f64> = (0..samples)
        .map(|i| x0 - half + 2.0 * half * i as f64 / (samples - 1) as f64)
        .collect();
    let original_curve: Vec<f64> = ys.iter().map(|&y| original.eval(eps, &[x0], &[y])).collect();
    let pulled_curve: Vec<f64> = ys.iter().map(|&y| pulled.eval(eps, &[x0], &[y])).collect();

    let rule = QuadratureRule::default_for_dim(1);
    let out = PullbackProfile {
        amplitude,
        eps,
        x0,
        ys,
        original: original_curve,
        pulled: pulled_curve,
        original_mass: original.integral(eps, &[x0], &rule),
        pulled_mass: pulled.integral(eps, &[x0], &rule),
        support_const: original.support_const(),
        pulled_support_const: pulled.support_const(),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct EmbeddingProfile {
    eps: f64,
    xs: Vec<f64>,
    values: Vec<f64>,
    kind: String,
}

/// The regularization of a sample distribution at scale eps, as a curve in x.
#[wasm_bindgen]
pub fn embedding_profile(kind: &str, eps: f64, samples: usize) -> Result<String, JsError> {
    embedding_profile_impl(kind, eps, samples).map_err(|e| JsError::new(&e))
}

fn embedding_profile_impl(kind: &str, eps: f64, samples: usize) -> Result<String, String> {
    if !(0.01..=0.5).contains(&eps) {
        return Err("eps must lie in [0.01, 0.5]".into());
    }
    let samples = samples.clamp(32, 2000);
    let t = match kind {
        "delta" => Distribution::Delta(vec![0.0]),
        "delta_prime" => Distribution::DeltaPrime { at: vec![0.0], axis: 0 },
        "heaviside" => Distribution::Heaviside(0.0),
        "sin" => Distribution::regular(|y: &[f64]| y[0].sin()),
        other => return Err(format!("unknown distribution {other}")),
    };
    let kernel = presets::canonical_kernel(1, 0).map_err(stringify)?;
    let rule = QuadratureRule::default_for_dim(1);
    let xs: Vec<f64> = (0..samples)
        .map(|i| -2.0 + 4.0 * i as f64 / (samples - 1) as f64)
        .collect();
    let mut values = Vec::with_capacity(xs.len());
    for &x in &xs {
        values.push(embed(&t, &kernel, eps, &[x], &rule).map_err(stringify)?);
    }
    let out = EmbeddingProfile {
        eps,
        xs,
        values,
        kind: kind.to_string(),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

fn finite(v: f64) -> Option<f64> {
    if v.is_finite() {
        Some(v)
    } else {
        None
    }
}

fn stringify(err: mollikit::Error) -> String {
    err.to_string()
}
