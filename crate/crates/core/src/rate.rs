//! Log-log slope fitting: turns Landau claims O(eps^m) into measured rates.

use crate::error::{Error, Result};
use crate::params;

/// Samples (eps_i, error_i) over a geometric sweep together with the fitted
/// log-log slope, fit quality, and a verdict against a target slope.
#[derive(Debug, Clone)]
pub struct RateReport {
    /// (eps, error) pairs, eps strictly decreasing.
    pub samples: Vec<(f64, f64)>,
    /// Least-squares slope of log(error) vs log(eps) over above-floor samples.
    /// NaN when the floor flag is set.
    pub slope: f64,
    /// R^2 of the log-log fit.
    pub r_squared: f64,
    /// True when fewer than MIN_FIT_SAMPLES samples exceeded the error floor;
    /// the errors sit at quadrature/FD noise and no rate is defined.
    pub floor: bool,
    /// The slope the claim demands, if a verdict was requested.
    pub target_slope: Option<f64>,
    /// Verdict: floor cases pass (exact reproduction), otherwise
    /// slope >= target.
    pub pass: bool,
}

impl RateReport {
    /// Attach a verdict against `target`: floor cases pass, otherwise the
    /// fitted slope must reach the target.
    pub fn with_target(mut self, target: f64) -> Self {
        self.target_slope = Some(target);
        self.pass = self.floor || self.slope >= target;
        self
    }

    /// Worst usable error in the sweep.
    pub fn max_error(&self) -> f64 {
        self.samples.iter().map(|&(_, e)| e).fold(0.0, f64::max)
    }
}

/// Least-squares slope of log(error) vs log(eps), ignoring samples at or
/// below the default floor 1e-12.
pub fn fit_rate(samples: &[(f64, f64)]) -> Result<RateReport> {
    fit_rate_with_floor(samples, params::RATE_FLOOR)
}

/// [`fit_rate`] with an explicit error floor; checks built on noisier
/// primitives (nested kernel finite differences) pass a higher floor.
pub fn fit_rate_with_floor(samples: &[(f64, f64)], floor: f64) -> Result<RateReport> {
    if samples.len() < params::MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            got: samples.len(),
            need: params::MIN_FIT_SAMPLES,
        });
    }
    for w in samples.windows(2) {
        if w[1].0 >= w[0].0 {
            return Err(Error::InvalidInput(
                "eps samples must be strictly decreasing".into(),
            ));
        }
    }

    let usable: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|&(_, e)| e > floor)
        .collect();
    if usable.len() < params::MIN_FIT_SAMPLES {
        return Ok(RateReport {
            samples: samples.to_vec(),
            slope: f64::NAN,
            r_squared: f64::NAN,
            floor: true,
            target_slope: None,
            pass: true,
        });
    }

    let n = usable.len() as f64;
    let logs: Vec<(f64, f64)> = usable.iter().map(|&(x, e)| (x.ln(), e.ln())).collect();
    let sum_x: f64 = logs.iter().map(|&(x, _)| x).sum();
    let sum_y: f64 = logs.iter().map(|&(_, y)| y).sum();
    let mean_x = sum_x / n;
    let mean_y = sum_y / n;
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = logs.iter().map(|&(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;

    let ss_tot: f64 = logs.iter().map(|&(_, y)| (y - mean_y) * (y - mean_y)).sum();
    let ss_res: f64 = logs
        .iter()
        .map(|&(x, y)| {
            let d = y - (intercept + slope * x);
            d * d
        })
        .sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };

    Ok(RateReport {
        samples: samples.to_vec(),
        slope,
        r_squared,
        floor: false,
        target_slope: None,
        pass: true,
    })
}
