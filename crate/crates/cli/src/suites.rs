//! Suite runners: each produces report rows for the configured kernel.

use std::fmt::Write as _;
use std::sync::Arc;

use mollikit::approx_props::{
    check_corollary, check_diag_vanishing, check_limits_af, two_point_order, CorollaryCase,
    LimitCase, TwoPointField,
};
use mollikit::distrib::{check_weak_convergence, Distribution};
use mollikit::domain::BoxDomain;
use mollikit::geometry::{check_commutation, check_pullback_preserves, pullback_kernel};
use mollikit::kernel::LocalSmoothingKernel;
use mollikit::multi_index::{MultiIndex, MultiIndexPair};
use mollikit::params;
use mollikit::presets;
use mollikit::quad::QuadratureRule;
use mollikit::{BumpFunction, Mollifier};
use rayon::prelude::*;

use crate::config::{KernelChoice, RunConfig};
use crate::report::{bound_row, rows_from_rate, Row};

type SuiteResult = mollikit::Result<Vec<Row>>;

/// Prints mollifier coefficients and residual moments; passes when the
/// residuals meet the moment tolerance.
pub fn run_moments(cfg: &RunConfig) -> mollikit::Result<(bool, String)> {
    let mut text = String::new();
    let mut pass = true;
    let mollifiers: Vec<(String, Mollifier)> = match cfg.kind {
        KernelChoice::Canonical => vec![(
            format!("canonical order-{}", cfg.order),
            presets::standard_mollifier(cfg.dim, cfg.order)?,
        )],
        KernelChoice::Varying => vec![
            (
                format!("blend component r=1.0 order-{}", cfg.order),
                presets::standard_mollifier(cfg.dim, cfg.order)?,
            ),
            (
                format!("blend component r=0.8 order-{}", cfg.order),
                Mollifier::build_order_k(&BumpFunction::new(cfg.dim, 0.8, 1.0)?, cfg.order)?,
            ),
        ],
    };

    let rule = QuadratureRule::gauss_legendre(params::ORACLE_NODES);
    for (name, phi) in mollifiers {
        writeln!(text, "{name} (dim {}, support radius {}):", phi.dim(), phi.radius()).unwrap();
        writeln!(text, "  {:<12} {:>24} {:>14}", "multi-index", "coefficient", "moment").unwrap();
        for (mi, coeff) in phi.coefficients() {
            let moment = phi.moment_with_rule(mi, &rule);
            writeln!(text, "  {:<12} {:>24.16e} {:>14.6e}", mi.to_string(), coeff, moment).unwrap();
        }
        let residual = phi.max_moment_residual(&rule);
        let ok = residual <= params::MOMENT_TOL;
        pass &= ok;
        writeln!(
            text,
            "  residual {:.3e} vs tolerance {:.1e}: {}",
            residual,
            params::MOMENT_TOL,
            if ok { "pass" } else { "fail" }
        )
        .unwrap();
    }
    Ok((pass, text))
}

/// Definition conditions: unit mass, eps-proportional supports (one constant
/// per kernel, all derivative pairs up to order 3) and flat derivative
/// scaling.
pub fn run_verify(cfg: &RunConfig) -> SuiteResult {
    let kernel = cfg.kernel()?;
    let n = cfg.dim;
    let sweep = cfg.sweep();
    let rule = QuadratureRule::default_for_dim(n);
    let grid = presets::compact_grid(n);
    let mut rows = Vec::new();

    // normalization per eps (sup over the x grid)
    let per_eps: Vec<(f64, f64)> = sweep
        .par_iter()
        .map(|&eps| {
            let sup = grid
                .iter()
                .map(|x| (kernel.integral(eps, x, &rule) - 1.0).abs())
                .fold(0.0, f64::max);
            (eps, sup)
        })
        .collect();
    let stat = per_eps.iter().map(|&(_, e)| e).fold(0.0, f64::max);
    for (eps, err) in per_eps {
        rows.push(bound_row(
            "normalization",
            &format!("{}", cfg.kind),
            eps,
            err,
            stat,
            params::KERNEL_NORM_TOL,
        ));
    }

    // supports of the kernel and its derivatives
    let c_prime = kernel.support_const() * params::SUPPORT_CONST_SLACK;
    let probe = vec![0.3; n];
    let probe_eps = [sweep[0], sweep[sweep.len() / 2], sweep[sweep.len() - 1]];
    for (alpha, beta) in derivative_pairs(n) {
        let pair = MultiIndexPair::new(alpha.clone(), beta.clone());
        let mut stat: f64 = 0.0;
        let mut per_eps = Vec::new();
        for &eps in &probe_eps {
            let rho = kernel.support_radius_of_derivative(&pair, eps, &probe, 1e-9)?;
            stat = stat.max(rho / eps);
            per_eps.push((eps, rho / eps));
        }
        for (eps, v) in per_eps {
            rows.push(bound_row(
                "support",
                &format!("a={alpha} b={beta}"),
                eps,
                v,
                stat,
                c_prime,
            ));
        }
    }

    // derivative scaling (diagonal alpha, y-slot beta)
    let k0 = presets::standard_compact(n);
    for (alpha, beta) in scaling_pairs(n) {
        let rep = kernel.check_scaling(&k0, &alpha, &beta, &sweep)?;
        for (i, &eps) in rep.eps.iter().enumerate() {
            let mut row = bound_row(
                "scaling",
                &format!("a={alpha} b={beta}"),
                eps,
                rep.sup_scaled[i],
                rep.ratio,
                params::SCALING_RATIO_BOUND,
            );
            row.floor = rep.floor;
            row.verdict = rep.pass;
            rows.push(row);
        }
    }
    Ok(rows)
}

fn derivative_pairs(n: usize) -> Vec<(MultiIndex, MultiIndex)> {
    let zero = MultiIndex::zero(n);
    let e1 = MultiIndex::unit(n, 0);
    let e1_2 = MultiIndex::along_axis(n, 0, 2);
    let mut pairs = vec![
        (zero.clone(), zero.clone()),
        (zero.clone(), e1.clone()),
        (e1.clone(), zero.clone()),
        (e1.clone(), e1.clone()),
        (e1.clone(), e1_2.clone()),
        (e1_2, e1.clone()),
    ];
    if n >= 2 {
        pairs.push((MultiIndex::unit(n, 1), e1));
    }
    pairs
}

fn scaling_pairs(n: usize) -> Vec<(MultiIndex, MultiIndex)> {
    let zero = MultiIndex::zero(n);
    let e1 = MultiIndex::unit(n, 0);
    let mut pairs = vec![
        (zero.clone(), zero.clone()),
        (zero.clone(), e1.clone()),
        (e1.clone(), zero.clone()),
        (e1.clone(), e1.clone()),
        (zero, MultiIndex::along_axis(n, 0, 2)),
    ];
    if n >= 2 {
        pairs.push((MultiIndex::unit(n, 1), e1));
    }
    pairs
}

/// The approximation rates: six limits, diagonal vanishing, corollary, and
/// the order-k two-point estimate.
pub fn run_rates(cfg: &RunConfig) -> SuiteResult {
    let kernel = cfg.kernel()?;
    let n = cfg.dim;
    let sweep = cfg.sweep();
    let rule = QuadratureRule::default_for_dim(n);
    let x_grid = presets::compact_grid(n);
    let y_grid = presets::omega_grid(n);

    let mut jobs: Vec<Box<dyn Fn() -> SuiteResult + Send + Sync>> = Vec::new();

    // the six limits
    for case in LimitCase::all() {
        let fields = if case.integrates_over_x() {
            presets::compactly_supported_fields(n)
        } else {
            presets::free_fields(n)
        };
        for (fname, field) in fields {
            let kernel = &kernel;
            let sweep = sweep.clone();
            let grid = if case.integrates_over_x() {
                y_grid.clone()
            } else {
                x_grid.clone()
            };
            let rule = rule.clone();
            let field = Arc::new(field);
            jobs.push(Box::new(move || {
                let rep = check_limits_af(&field, kernel, case, 0, &sweep, &grid, &rule)?;
                Ok(rows_from_rate(
                    "limits",
                    &format!("{}/{fname}", case.label()),
                    &rep,
                ))
            }));
        }
    }

    // diagonal-derivative vanishing
    for order in [1u32, 2] {
        for (fname, field) in presets::compactly_supported_fields(n) {
            let kernel = &kernel;
            let sweep = sweep.clone();
            let grid = y_grid.clone();
            let rule = rule.clone();
            let alpha = MultiIndex::along_axis(n, 0, order);
            let field = Arc::new(field);
            jobs.push(Box::new(move || {
                let rep = check_diag_vanishing(&field, kernel, &alpha, &sweep, &grid, &rule)?;
                Ok(rows_from_rate(
                    "diag_vanishing",
                    &format!("|a|={order}/{fname}"),
                    &rep,
                ))
            }));
        }
    }

    // corollary, both cases
    for order in [1u32, 2] {
        let alpha = MultiIndex::along_axis(n, 0, order);
        for (fname, field) in presets::free_fields(n) {
            let kernel = &kernel;
            let sweep = sweep.clone();
            let grid = x_grid.clone();
            let rule = rule.clone();
            let alpha = alpha.clone();
            let field = Arc::new(field);
            jobs.push(Box::new(move || {
                let rep =
                    check_corollary(&field, kernel, &alpha, CorollaryCase::I, &sweep, &grid, &rule)?;
                Ok(rows_from_rate(
                    "corollary",
                    &format!("i/|a|={order}/{fname}"),
                    &rep,
                ))
            }));
        }
        for (fname, field) in presets::compactly_supported_fields(n) {
            let kernel = &kernel;
            let sweep = sweep.clone();
            let grid = y_grid.clone();
            let rule = rule.clone();
            let alpha = alpha.clone();
            let field = Arc::new(field);
            jobs.push(Box::new(move || {
                let rep = check_corollary(
                    &field,
                    kernel,
                    &alpha,
                    CorollaryCase::II,
                    &sweep,
                    &grid,
                    &rule,
                )?;
                Ok(rows_from_rate(
                    "corollary",
                    &format!("ii/|a|={order}/{fname}"),
                    &rep,
                ))
            }));
        }
    }

    // order-k two-point estimate against the declared order
    for (fname, f) in presets::standard_suite(n) {
        let kernel = &kernel;
        let sweep = sweep.clone();
        let grid = x_grid.clone();
        let rule = rule.clone();
        jobs.push(Box::new(move || {
            let f = f.clone();
            let field = TwoPointField::new(n, move |_x: &[f64], y: &[f64]| f(y));
            let rep = two_point_order(&field, kernel, &sweep, &grid, &rule)?;
            Ok(rows_from_rate("two_point", &fname, &rep))
        }));
    }

    let results: Vec<SuiteResult> = jobs.par_iter().map(|job| job()).collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Commutation residuals and pullback invariance over the diffeomorphism
/// battery.
pub fn run_pullback(cfg: &RunConfig) -> SuiteResult {
    let n = cfg.dim;
    let sweep = cfg.sweep();
    let rule = QuadratureRule::default_for_dim(n);
    let mut rows = Vec::new();

    // commutation identities on kernel slices
    let source = BoxDomain::centered(n, 5.0);
    let target = BoxDomain::centered(n, 16.0);
    let phi_m = presets::standard_mollifier(n, 0)?;
    let samples: Vec<(Vec<f64>, Vec<f64>)> = vec![
        (vec![0.2; n], vec![0.5; n]),
        (vec![-0.4; n], vec![-0.1; n]),
        (vec![0.9; n], vec![0.8; n]),
    ];
    for mu in presets::diffeo_battery(n) {
        let nonlinear = mu.name().starts_with("sine");
        let tol = if nonlinear { 1e-4 } else { 1e-5 };
        for field in presets::field_battery(n) {
            for eps in [1.0, 0.5] {
                let phi_m = phi_m.clone();
                let phi = move |x: &[f64], y: &[f64]| {
                    let mut z = [0.0f64; 3];
                    for i in 0..x.len() {
                        z[i] = (y[i] - x[i]) / eps;
                    }
                    phi_m.eval(&z[..x.len()]) / eps.powi(x.len() as i32)
                };
                let res = check_commutation(&mu, &field, &phi, &samples, &source, &target)?;
                rows.push(bound_row(
                    "commutation",
                    &format!("{}/{}/slice_eps={eps}", mu.name(), field.name()),
                    eps,
                    res,
                    res,
                    tol,
                ));
            }
        }
    }

    // pullback preserves the smoothing-kernel conditions and the order
    let inner_domain = BoxDomain::centered(n, 16.0);
    let outer_domain = BoxDomain::centered(n, 5.0);
    let k0 = presets::standard_compact(n);
    let inner: Arc<LocalSmoothingKernel> = Arc::new(match cfg.kind {
        KernelChoice::Canonical => LocalSmoothingKernel::canonical(
            presets::standard_mollifier(n, cfg.order)?,
            inner_domain,
        )?,
        KernelChoice::Varying => {
            let phi0 = presets::standard_mollifier(n, cfg.order)?;
            let phi1 = Mollifier::build_order_k(&BumpFunction::new(n, 0.8, 1.0)?, cfg.order)?;
            LocalSmoothingKernel::varying(
                phi0,
                phi1,
                |x: &[f64]| 0.5 * (1.0 + x[0].tanh()),
                inner_domain,
            )?
        }
    });

    for mu in presets::diffeo_battery(n) {
        let pulled = pullback_kernel(&mu, inner.clone(), outer_domain.clone())?;
        let rep = check_pullback_preserves(&pulled, &k0, &sweep, &rule)?;
        rows.push(bound_row(
            "pullback",
            &format!("{}/normalization", mu.name()),
            sweep[0],
            rep.normalization_error,
            rep.normalization_error,
            params::KERNEL_NORM_TOL,
        ));
        for (tag, eps, rho_over_eps, bound) in &rep.support_rows {
            rows.push(bound_row(
                "pullback",
                &format!("{}/support {tag}", mu.name()),
                *eps,
                *rho_over_eps,
                *rho_over_eps,
                *bound,
            ));
        }
        for sc in &rep.scaling {
            let mut row = bound_row(
                "pullback",
                &format!("{}/scaling a={} b={}", mu.name(), sc.alpha, sc.beta),
                sc.eps[0],
                sc.sup_scaled[0],
                sc.ratio,
                params::SCALING_RATIO_BOUND,
            );
            row.floor = sc.floor;
            row.verdict = sc.pass;
            rows.push(row);
        }
        rows.extend(rows_from_rate(
            "pullback_order",
            &format!("{}/two_point", mu.name()),
            &rep.order,
        ));
    }
    Ok(rows)
}

/// Distribution embedding: weak convergence of the regularizations.
pub fn run_embed(cfg: &RunConfig) -> SuiteResult {
    let kernel = cfg.kernel()?;
    let n = cfg.dim;
    let sweep = cfg.sweep();
    let rule = QuadratureRule::default_for_dim(n);
    let support = presets::standard_compact(n);
    let bump = BumpFunction::new(n, 2.0, 1.0)?;
    let psi = move |x: &[f64]| bump.eval(x) * (1.0 + 0.5 * x[0]);

    let mut cases: Vec<(String, Distribution)> = vec![
        ("delta".into(), Distribution::Delta(vec![0.2; n])),
        (
            "delta_prime".into(),
            Distribution::DeltaPrime {
                at: vec![0.2; n],
                axis: 0,
            },
        ),
        (
            "regular_sin".into(),
            Distribution::regular(|y: &[f64]| {
                let s: f64 = y.iter().sum();
                (0.9 * s).sin() + 0.2 * s
            }),
        ),
    ];
    if n == 1 {
        cases.push(("heaviside".into(), Distribution::Heaviside(0.0)));
    }

    let mut rows = Vec::new();
    for (name, t) in cases {
        let rep = check_weak_convergence(&t, &kernel, &psi, &support, &sweep, &rule)?;
        rows.extend(rows_from_rate("weak_convergence", &name, &rep));
    }
    Ok(rows)
}
