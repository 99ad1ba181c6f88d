//! Deterministic CSV and JSON reporting.
//!
//! Floats are written with 17 significant digits so doubles round-trip
//! losslessly; rows are sorted by (checker, case, epsilon descending) and
//! identical configs produce byte-identical files.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use mollikit::rate::RateReport;
use serde::Serialize;

/// One CSV row: a sweep sample together with the checker's decision
/// statistic, so the verdict is recomputable from the row alone.
#[derive(Debug, Clone)]
pub struct Row {
    pub checker: &'static str,
    pub case: String,
    pub epsilon: f64,
    pub error: f64,
    /// Decision statistic: fitted slope for rate checkers, measured bound
    /// for support/scaling/normalization checkers.
    pub slope: f64,
    pub r2: f64,
    pub floor: bool,
    pub target: f64,
    /// Rate rows pass when slope >= target (or at floor); bound rows pass
    /// when the statistic <= target.
    pub verdict: bool,
}

/// Expands a rate report into one row per sweep sample.
pub fn rows_from_rate(checker: &'static str, case: &str, report: &RateReport) -> Vec<Row> {
    report
        .samples
        .iter()
        .map(|&(eps, err)| Row {
            checker,
            case: case.to_string(),
            epsilon: eps,
            error: err,
            slope: report.slope,
            r2: report.r_squared,
            floor: report.floor,
            target: report.target_slope.unwrap_or(f64::NAN),
            verdict: report.pass,
        })
        .collect()
}

/// A bound-style row (support radius, scaling ratio, normalization error,
/// commutation residual).
pub fn bound_row(
    checker: &'static str,
    case: &str,
    epsilon: f64,
    error: f64,
    stat: f64,
    target: f64,
) -> Row {
    Row {
        checker,
        case: case.to_string(),
        epsilon,
        error,
        slope: stat,
        r2: f64::NAN,
        floor: false,
        target,
        verdict: stat <= target,
    }
}

/// 17 significant digits, `.` decimal separator; NaN spelled out.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

const HEADER: &str = "checker,case,epsilon,error,slope,r2,floor_flag,target,verdict\n";

/// Writes one CSV per checker into `out_dir`; returns the file names.
pub fn write_csvs(out_dir: &Path, rows: &[Row]) -> std::io::Result<Vec<String>> {
    fs::create_dir_all(out_dir)?;
    let mut by_checker: BTreeMap<&'static str, Vec<&Row>> = BTreeMap::new();
    for row in rows {
        by_checker.entry(row.checker).or_default().push(row);
    }

    let mut files = Vec::new();
    for (checker, mut rows) in by_checker {
        rows.sort_by(|a, b| a.case.cmp(&b.case).then(b.epsilon.total_cmp(&a.epsilon)));
        let path = out_dir.join(format!("{checker}.csv"));
        let mut file = fs::File::create(&path)?;
        file.write_all(HEADER.as_bytes())?;
        for row in rows {
            writeln!(
                file,
                "{},{},{},{},{},{},{},{},{}",
                row.checker,
                row.case,
                fmt_float(row.epsilon),
                fmt_float(row.error),
                fmt_float(row.slope),
                fmt_float(row.r2),
                row.floor,
                fmt_float(row.target),
                if row.verdict { "pass" } else { "fail" },
            )?;
        }
        files.push(format!("{checker}.csv"));
    }
    Ok(files)
}

#[derive(Debug, Serialize)]
pub struct Summary {
    /// suite name -> "pass" | "fail"
    pub suites: BTreeMap<String, String>,
    /// "<checker>/<case>" -> fitted slope (null when at floor)
    pub slopes: BTreeMap<String, Option<f64>>,
    pub exit_code: i32,
}

impl Summary {
    pub fn new() -> Self {
        Summary {
            suites: BTreeMap::new(),
            slopes: BTreeMap::new(),
            exit_code: 0,
        }
    }

    pub fn record_suite(&mut self, name: &str, pass: bool) {
        self.suites
            .insert(name.to_string(), if pass { "pass" } else { "fail" }.into());
        if !pass {
            self.exit_code = 1;
        }
    }

    pub fn record_rows(&mut self, rows: &[Row]) {
        for row in rows {
            let key = format!("{}/{}", row.checker, row.case);
            let slope = if row.slope.is_nan() { None } else { Some(row.slope) };
            self.slopes.insert(key, slope);
        }
    }

    pub fn write(&self, out_dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(out_dir)?;
        let file = fs::File::create(out_dir.join("summary.json"))?;
        serde_json::to_writer_pretty(file, self).map_err(std::io::Error::other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_lossless() {
        for v in [0.1, 2.0 / 3.0, 1e-12, 123456.789012345678] {
            let s = fmt_float(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, v, "{s}");
        }
        assert_eq!(fmt_float(f64::NAN), "nan");
    }

    #[test]
    fn bound_row_verdicts() {
        let ok = bound_row("support", "c", 0.5, 1.01, 1.01, 1.3);
        assert!(ok.verdict);
        let bad = bound_row("support", "c", 0.5, 1.5, 1.5, 1.3);
        assert!(!bad.verdict);
    }
}
