//! Run configuration: a sectioned key-value file plus flag overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use mollikit::kernel::LocalSmoothingKernel;
use mollikit::presets;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelChoice {
    Canonical,
    Varying,
}

impl fmt::Display for KernelChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelChoice::Canonical => write!(f, "canonical"),
            KernelChoice::Varying => write!(f, "varying"),
        }
    }
}

/// Which suites a run executes.
#[derive(Debug, Clone)]
pub struct SuiteSelection {
    pub moments: bool,
    pub verify: bool,
    pub rates: bool,
    pub pullback: bool,
    pub embed: bool,
}

impl Default for SuiteSelection {
    fn default() -> Self {
        SuiteSelection {
            moments: true,
            verify: true,
            rates: true,
            pullback: true,
            embed: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dim: usize,
    pub order: usize,
    /// Order the kernel claims; differs from `order` only in deliberate
    /// mismatch runs.
    pub declared_order: Option<usize>,
    pub kind: KernelChoice,
    pub eps_start: f64,
    pub eps_ratio: f64,
    pub eps_count: usize,
    pub out: PathBuf,
    pub suites: SuiteSelection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dim: 1,
            order: 0,
            declared_order: None,
            kind: KernelChoice::Canonical,
            eps_start: 0.5,
            eps_ratio: 0.5,
            eps_count: 10,
            out: PathBuf::from("reports"),
            suites: SuiteSelection::default(),
        }
    }
}

/// Errors carrying the exit-code-2 contract.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    /// Parses the sectioned key-value format:
    ///
    /// ```text
    /// [run]
    /// dim = 1
    /// order = 2
    /// kind = canonical
    /// eps_start = 0.5
    /// eps_ratio = 0.5
    /// eps_count = 10
    /// out = reports
    /// [suites]
    /// rates = true
    /// ```
    pub fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut section = String::from("run");
        let mut entries: BTreeMap<(String, String), String> = BTreeMap::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError(format!("line {}: unterminated section", lineno + 1)))?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key = value", lineno + 1)))?;
            entries.insert(
                (section.clone(), key.trim().to_string()),
                value.trim().to_string(),
            );
        }

        for ((section, key), value) in entries {
            match (section.as_str(), key.as_str()) {
                ("run", "dim") => cfg.dim = parse(&key, &value)?,
                ("run", "order") => cfg.order = parse(&key, &value)?,
                ("run", "declared_order") => cfg.declared_order = Some(parse(&key, &value)?),
                ("run", "kind") => cfg.kind = parse_kind(&value)?,
                ("run", "eps_start") => cfg.eps_start = parse(&key, &value)?,
                ("run", "eps_ratio") => cfg.eps_ratio = parse(&key, &value)?,
                ("run", "eps_count") => cfg.eps_count = parse(&key, &value)?,
                ("run", "out") => cfg.out = PathBuf::from(value),
                ("suites", "moments") => cfg.suites.moments = parse(&key, &value)?,
                ("suites", "verify") => cfg.suites.verify = parse(&key, &value)?,
                ("suites", "rates") => cfg.suites.rates = parse(&key, &value)?,
                ("suites", "pullback") => cfg.suites.pullback = parse(&key, &value)?,
                ("suites", "embed") => cfg.suites.embed = parse(&key, &value)?,
                (s, k) => return Err(ConfigError(format!("unknown key [{s}] {k}"))),
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(1..=3).contains(&self.dim) {
            return Err(ConfigError(format!("dimension {} not in 1..=3", self.dim)));
        }
        if self.order > mollikit::params::MAX_MOLLIFIER_ORDER {
            return Err(ConfigError(format!(
                "order {} exceeds supported {}",
                self.order,
                mollikit::params::MAX_MOLLIFIER_ORDER
            )));
        }
        if let Some(d) = self.declared_order {
            if d > mollikit::params::MAX_MOLLIFIER_ORDER {
                return Err(ConfigError(format!("declared order {d} exceeds supported")));
            }
        }
        if !(self.eps_start > 0.0) || self.eps_start > 0.5 {
            return Err(ConfigError(format!(
                "eps_start {} must lie in (0, eps0 = 0.5]",
                self.eps_start
            )));
        }
        if !(self.eps_ratio > 0.0 && self.eps_ratio < 1.0) {
            return Err(ConfigError(format!(
                "eps_ratio {} must lie in (0, 1): the sweep must be strictly decreasing",
                self.eps_ratio
            )));
        }
        if self.eps_count < 4 {
            return Err(ConfigError(format!(
                "eps_count {} too small for a slope fit (need >= 4)",
                self.eps_count
            )));
        }
        Ok(())
    }

    /// Strictly decreasing geometric sweep.
    pub fn sweep(&self) -> Vec<f64> {
        (0..self.eps_count)
            .map(|i| self.eps_start * self.eps_ratio.powi(i as i32))
            .collect()
    }

    /// Builds the kernel under test, honoring the declared-order override.
    pub fn kernel(&self) -> mollikit::Result<LocalSmoothingKernel> {
        let kernel = match self.kind {
            KernelChoice::Canonical => presets::canonical_kernel(self.dim, self.order)?,
            KernelChoice::Varying => presets::blended_kernel(self.dim, self.order)?,
        };
        Ok(match self.declared_order {
            Some(d) => kernel.with_declared_order(d),
            None => kernel,
        })
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError(format!("cannot parse {key} = {value}")))
}

fn parse_kind(value: &str) -> Result<KernelChoice, ConfigError> {
    match value {
        "canonical" => Ok(KernelChoice::Canonical),
        "varying" => Ok(KernelChoice::Varying),
        other => Err(ConfigError(format!(
            "kind must be canonical or varying, got {other}"
        ))),
    }
}
