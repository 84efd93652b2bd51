//! Argument handling and report output for the `hyperlab` binary.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde::Serialize;
use thiserror::Error;

use hyperlab_core::audits::{curvature_table, geodesic_traces};
use hyperlab_core::{exit_code, run_audits, AuditConfig, AuditName, AuditReport, BackendChoice};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ASSERT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BACKEND_DISAGREEMENT: i32 = 3;

/// Duration of the geodesic traces written to the CSV directory.
const GEODESIC_TIME: f64 = 2.0;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] hyperlab_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Core(hyperlab_core::Error::InvalidParameter(_)) => {
                EXIT_CONFIG
            }
            _ => EXIT_ASSERT_FAILURE,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Numerical audits of the quaternionic Heisenberg group and the metrics `g_a` on ℍⁿ.
#[derive(Debug, Parser)]
#[command(name = "hyperlab", version, about)]
pub struct Args {
    /// Quaternionic dimension (repeatable) [default: 1 2]
    #[arg(long = "n", value_name = "N")]
    pub n: Vec<usize>,
    /// Deformation parameter a > 0 (repeatable) [default: 0.5 1 2]
    #[arg(long = "a", value_name = "A", allow_negative_numbers = true)]
    pub a: Vec<f64>,
    /// Samples per algebraic or form identity
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Samples per curvature-level measurement
    #[arg(long, default_value_t = 100)]
    pub curvature_samples: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Tolerance override, CLAIM=VALUE (repeatable)
    #[arg(long = "tolerance", value_name = "CLAIM=VALUE")]
    pub tolerance: Vec<String>,
    /// Audit to run (repeatable) [default: all]
    #[arg(long = "audit", value_name = "NAME")]
    pub audit: Vec<String>,
    /// Differentiation backend for derivative-based checks: fd, dual or both
    #[arg(long, default_value = "both")]
    pub backend: String,
    /// JSON report path; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for CSV tables
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Suppress the per-claim summary on stderr
    #[arg(long)]
    pub quiet: bool,
}

impl Args {
    pub fn config(&self) -> Result<AuditConfig, CliError> {
        let mut cfg = AuditConfig::default();
        if !self.n.is_empty() {
            cfg.n = self.n.clone();
        }
        if !self.a.is_empty() {
            cfg.a_values = self.a.clone();
        }
        cfg.samples = self.samples;
        cfg.curvature_samples = self.curvature_samples;
        cfg.seed = self.seed;
        cfg.backend = self.backend.parse::<BackendChoice>()?;
        if !self.audit.is_empty() {
            cfg.audits = self
                .audit
                .iter()
                .map(|s| s.parse::<AuditName>())
                .collect::<Result<_, _>>()?;
        }
        cfg.tolerances = self
            .tolerance
            .iter()
            .map(|t| parse_tolerance(t))
            .collect::<Result<BTreeMap<_, _>, _>>()?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_tolerance(s: &str) -> Result<(String, f64), CliError> {
    let (claim, value) = s
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("tolerance '{s}' is not CLAIM=VALUE")))?;
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("tolerance value '{value}' is not a number")))?;
    Ok((claim.trim().to_string(), v))
}

/// The canonical JSON document; contains nothing that varies between identical runs.
#[derive(Serialize)]
pub struct Report<'a> {
    pub config: &'a AuditConfig,
    pub exit_code: i32,
    pub reports: &'a [AuditReport],
}

#[derive(Serialize)]
struct TimingEntry<'a> {
    claim_id: &'a str,
    n: Option<usize>,
    a: Option<f64>,
    seconds: f64,
}

#[derive(Serialize)]
struct Timing<'a> {
    timestamp: u64,
    total_seconds: f64,
    claims: Vec<TimingEntry<'a>>,
}

pub fn report_json(cfg: &AuditConfig, reports: &[AuditReport]) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(&Report {
        config: cfg,
        exit_code: exit_code(reports),
        reports,
    })?;
    s.push('\n');
    Ok(s)
}

fn timing_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|s| s.to_os_string())
        .unwrap_or_default();
    name.push(".timing.json");
    out.with_file_name(name)
}

fn write_timing(out: &Path, reports: &[AuditReport], total: f64) -> Result<(), CliError> {
    let timing = Timing {
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        total_seconds: total,
        claims: reports
            .iter()
            .map(|r| TimingEntry {
                claim_id: &r.claim_id,
                n: r.n,
                a: r.a,
                seconds: r.wall_time,
            })
            .collect(),
    };
    let path = timing_path(out);
    fs::write(&path, serde_json::to_string_pretty(&timing)?).map_err(io_err(&path))
}

fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes `reports.csv`, `residuals.csv`, `curvature_vs_a.csv` and `geodesics.csv`.
pub fn write_csv(dir: &Path, cfg: &AuditConfig, reports: &[AuditReport]) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let mut w = csv::Writer::from_path(dir.join("reports.csv"))?;
    w.write_record([
        "claim_id",
        "class",
        "n",
        "a",
        "seed",
        "samples",
        "max_residual",
        "mean_residual",
        "tolerance",
        "backend_agreement",
        "status",
    ])?;
    for r in reports {
        let class = serde_json::to_value(r.class)?;
        let status = serde_json::to_value(r.status)?;
        w.write_record([
            r.claim_id.clone(),
            class.as_str().unwrap_or_default().to_string(),
            fmt_opt(r.n),
            fmt_opt(r.a),
            r.seed.to_string(),
            r.samples.to_string(),
            r.max_residual.to_string(),
            r.mean_residual.to_string(),
            fmt_opt(r.tolerance),
            fmt_opt(r.backend_agreement),
            status.as_str().unwrap_or_default().to_string(),
        ])?;
    }
    w.flush().map_err(io_err(dir))?;

    let mut w = csv::Writer::from_path(dir.join("residuals.csv"))?;
    w.write_record(["claim_id", "n", "a", "sample", "value"])?;
    for r in reports {
        for (i, v) in r.values.iter().enumerate() {
            w.write_record([
                r.claim_id.clone(),
                fmt_opt(r.n),
                fmt_opt(r.a),
                i.to_string(),
                v.to_string(),
            ])?;
        }
    }
    w.flush().map_err(io_err(dir))?;

    let mut w = csv::Writer::from_path(dir.join("curvature_vs_a.csv"))?;
    w.write_record([
        "a",
        "point",
        "x1",
        "x2",
        "x3",
        "x4",
        "riemann_sq_dual",
        "riemann_sq_fd",
    ])?;
    for row in curvature_table(&cfg.a_values)? {
        let mut rec = vec![row.a.to_string(), row.point.to_string()];
        rec.extend(row.x.iter().map(|c| c.to_string()));
        rec.push(row.dual.to_string());
        rec.push(row.fd.to_string());
        w.write_record(rec)?;
    }
    w.flush().map_err(io_err(dir))?;

    let mut w = csv::Writer::from_path(dir.join("geodesics.csv"))?;
    w.write_record(["a", "direction", "t", "x1", "x2", "x3", "x4"])?;
    for tr in geodesic_traces(&cfg.a_values, GEODESIC_TIME)? {
        for (t, p) in tr.times.iter().zip(&tr.points) {
            let mut rec = vec![tr.a.to_string(), tr.direction.to_string(), t.to_string()];
            rec.extend(p.iter().map(|c| c.to_string()));
            w.write_record(rec)?;
        }
    }
    w.flush().map_err(io_err(dir))?;
    Ok(())
}

fn summary_line(r: &AuditReport) -> String {
    let status = serde_json::to_value(r.status)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    let tol = r
        .tolerance
        .map(|t| format!(" tol {t:.0e}"))
        .unwrap_or_default();
    let agr = r
        .backend_agreement
        .map(|t| format!(" agree {t:.1e}"))
        .unwrap_or_default();
    format!(
        "{status:<20} {:<40} n={:<2} a={:<4} max {:.3e}{tol}{agr}",
        r.claim_id,
        fmt_opt(r.n),
        fmt_opt(r.a),
        r.max_residual
    )
}

/// Runs the configured audits, writes the outputs and returns the process exit code.
pub fn run(args: &Args) -> Result<i32, CliError> {
    let cfg = args.config()?;
    let t0 = Instant::now();
    let reports = run_audits(&cfg)?;
    let total = t0.elapsed().as_secs_f64();
    if !args.quiet {
        for r in &reports {
            eprintln!("{}", summary_line(r));
        }
    }
    let json = report_json(&cfg, &reports)?;
    match &args.out {
        Some(path) => {
            fs::write(path, &json).map_err(io_err(path))?;
            write_timing(path, &reports, total)?;
        }
        None => print!("{json}"),
    }
    if let Some(dir) = &args.csv {
        write_csv(dir, &cfg, &reports)?;
    }
    Ok(exit_code(&reports))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(v: &[&str]) -> Args {
        Args::try_parse_from(std::iter::once("hyperlab").chain(v.iter().copied())).unwrap()
    }

    #[test]
    fn defaults_match_core() {
        assert_eq!(args(&[]).config().unwrap(), AuditConfig::default());
    }

    #[test]
    fn repeatable_flags() {
        let cfg = args(&[
            "--n",
            "1",
            "--a",
            "0.5",
            "--a",
            "2",
            "--audit",
            "forms",
            "--tolerance",
            "forms.charaq=1e-9",
        ])
        .config()
        .unwrap();
        assert_eq!(cfg.n, vec![1]);
        assert_eq!(cfg.a_values, vec![0.5, 2.0]);
        assert_eq!(cfg.audits, vec![AuditName::Forms]);
        assert_eq!(cfg.tolerances.get("forms.charaq"), Some(&1e-9));
    }

    #[test]
    fn config_errors_map_to_exit_2() {
        for bad in [
            vec!["--a", "0"],
            vec!["--a", "-1"],
            vec!["--n", "0"],
            vec!["--samples", "0"],
            vec!["--audit", "nope"],
            vec!["--backend", "spectral"],
            vec!["--tolerance", "forms.charaq"],
            vec!["--tolerance", "forms.charaq=abc"],
            vec!["--tolerance", "forms.charaq=-1"],
        ] {
            let e = args(&bad).config().unwrap_err();
            assert_eq!(e.exit_code(), EXIT_CONFIG, "{bad:?}");
        }
    }

    #[test]
    fn timing_sidecar_name() {
        assert_eq!(
            timing_path(Path::new("/tmp/r.json")),
            PathBuf::from("/tmp/r.json.timing.json")
        );
    }
}
