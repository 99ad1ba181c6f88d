//! mollikit: build order-k smoothing kernels and verify their approximation,
//! support, scaling and pullback properties; emit machine-readable reports.

mod config;
mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ConfigError, RunConfig};
use report::Summary;

#[derive(Parser)]
#[command(
    name = "mollikit",
    version,
    about = "Order-k smoothing kernels and numeric verification of their approximation properties"
)]
struct Cli {
    /// Config file (sectioned key = value); flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Space dimension (1, 2 or 3).
    #[arg(long, global = true)]
    dim: Option<usize>,

    /// Mollifier order k (vanishing moments up to k).
    #[arg(long, global = true)]
    order: Option<usize>,

    /// Declared order override for deliberate-mismatch runs.
    #[arg(long, global = true)]
    declared_order: Option<usize>,

    /// Kernel kind: canonical or varying.
    #[arg(long, global = true)]
    kind: Option<String>,

    /// Number of sweep points eps_i = eps_start * ratio^i.
    #[arg(long, global = true)]
    eps_count: Option<usize>,

    /// Output directory for CSV reports and the JSON summary.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Comma-separated suite selection for `all` (moments,verify,rates,pullback,embed).
    #[arg(long, global = true)]
    suite: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Print mollifier coefficients and residual moments.
    Moments,
    /// Check the kernel conditions: unit mass, supports, derivative scaling.
    Verify,
    /// Fit the convergence rates of every approximation claim.
    Rates,
    /// Run the diffeomorphism batteries: commutation and pullback invariance.
    Pullback,
    /// Check weak convergence of embedded distributions.
    Embed,
    /// Run every suite enabled in the config (or via --suite).
    All,
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<ExitCode, ConfigError> {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_str(&text)?
        }
        None => RunConfig::default(),
    };

    // flag overrides
    if let Some(dim) = cli.dim {
        cfg.dim = dim;
    }
    if let Some(order) = cli.order {
        cfg.order = order;
    }
    if let Some(declared) = cli.declared_order {
        cfg.declared_order = Some(declared);
    }
    if let Some(kind) = &cli.kind {
        cfg.kind = match kind.as_str() {
            "canonical" => config::KernelChoice::Canonical,
            "varying" => config::KernelChoice::Varying,
            other => return Err(ConfigError(format!("unknown kind {other}"))),
        };
    }
    if let Some(count) = cli.eps_count {
        cfg.eps_count = count;
    }
    if let Some(out) = cli.out {
        cfg.out = out;
    }
    if let Some(list) = &cli.suite {
        let mut sel = config::SuiteSelection {
            moments: false,
            verify: false,
            rates: false,
            pullback: false,
            embed: false,
        };
        for name in list.split(',') {
            match name.trim() {
                "moments" => sel.moments = true,
                "verify" => sel.verify = true,
                "rates" => sel.rates = true,
                "pullback" => sel.pullback = true,
                "embed" => sel.embed = true,
                other => return Err(ConfigError(format!("unknown suite {other}"))),
            }
        }
        cfg.suites = sel;
    }
    cfg.validate()?;

    init_thread_pool();

    let run_list: Vec<Command> = match cli.command {
        Command::All => {
            let mut list = Vec::new();
            if cfg.suites.moments {
                list.push(Command::Moments);
            }
            if cfg.suites.verify {
                list.push(Command::Verify);
            }
            if cfg.suites.rates {
                list.push(Command::Rates);
            }
            if cfg.suites.pullback {
                list.push(Command::Pullback);
            }
            if cfg.suites.embed {
                list.push(Command::Embed);
            }
            list
        }
        single => vec![single],
    };

    let mut summary = Summary::new();
    let mut all_rows = Vec::new();
    for command in run_list {
        let (name, pass) = match command {
            Command::Moments => {
                let (pass, text) = suites::run_moments(&cfg).map_err(checker_err)?;
                print!("{text}");
                ("moments", pass)
            }
            Command::Verify => {
                let rows = suites::run_verify(&cfg).map_err(checker_err)?;
                let pass = rows.iter().all(|r| r.verdict);
                summary.record_rows(&rows);
                all_rows.extend(rows);
                ("verify", pass)
            }
            Command::Rates => {
                let rows = suites::run_rates(&cfg).map_err(checker_err)?;
                let pass = rows.iter().all(|r| r.verdict);
                summary.record_rows(&rows);
                all_rows.extend(rows);
                ("rates", pass)
            }
            Command::Pullback => {
                let rows = suites::run_pullback(&cfg).map_err(checker_err)?;
                let pass = rows.iter().all(|r| r.verdict);
                summary.record_rows(&rows);
                all_rows.extend(rows);
                ("pullback", pass)
            }
            Command::Embed => {
                let rows = suites::run_embed(&cfg).map_err(checker_err)?;
                let pass = rows.iter().all(|r| r.verdict);
                summary.record_rows(&rows);
                all_rows.extend(rows);
                ("embed", pass)
            }
            Command::All => unreachable!("expanded above"),
        };
        summary.record_suite(name, pass);
        println!("suite {name}: {}", if pass { "pass" } else { "fail" });
    }

    report::write_csvs(&cfg.out, &all_rows)
        .map_err(|e| ConfigError(format!("cannot write reports: {e}")))?;
    summary
        .write(&cfg.out)
        .map_err(|e| ConfigError(format!("cannot write summary: {e}")))?;

    Ok(ExitCode::from(summary.exit_code as u8))
}

fn checker_err(err: mollikit::Error) -> ConfigError {
    ConfigError(format!("checker setup failed: {err}"))
}

/// MOLLIKIT_THREADS caps the rayon pool; unset means the rayon default.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("MOLLIKIT_THREADS") {
        if let Ok(threads) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build_global();
        }
    }
}
