//! Named, reproducible claim audits.
//!
//! Each claim is evaluated on seeded samples and produces one [`AuditReport`].
//! `Assert` claims are structural identities with a tolerance and gate the
//! exit status; `Measure` claims are computed with both differentiation
//! backends and recorded without a verdict.

mod algebra;
mod cc;
mod diffgeo;
mod forms;
mod hyperkahler;
mod invariance;
mod isometry;
mod lift;
mod metric;
mod quotients;
mod tables;

pub use cc::{horizontal_curve, radial_length, CCBound, CurveSample};
pub use tables::{curvature_table, geodesic_traces, CurvatureRow, GeodesicTrace};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffgeo::{agreement, Backend};
use crate::error::{Error, Result};
use crate::sampling::Stats;

/// Backend agreement threshold for every two-backend comparison.
pub const AGREEMENT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditClass {
    Assert,
    Measure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditStatus {
    Pass,
    Fail,
    /// A measured value, recorded without a verdict.
    Recorded,
    /// The two differentiation backends disagree beyond [`AGREEMENT_TOL`].
    BackendDisagreement,
}

/// How `max_residual` is compared with `tolerance`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Pass iff `max_residual < tolerance`.
    Below,
    /// Witness: pass iff `max_residual > tolerance`.
    Above,
}

/// Per-backend statistics of a claim evaluated with both backends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackendStats {
    pub dual: Stats,
    pub fd: Stats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub claim_id: String,
    pub paper_locus: String,
    pub class: AuditClass,
    pub n: Option<usize>,
    pub a: Option<f64>,
    pub seed: u64,
    pub samples: usize,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub backend_agreement: Option<f64>,
    pub status: AuditStatus,
    pub tolerance: Option<f64>,
    pub comparison: Option<Comparison>,
    pub backends: Option<BackendStats>,
    pub note: String,
    /// Seconds; excluded from the JSON so that reports are reproducible.
    #[serde(skip)]
    pub wall_time: f64,
    /// Per-sample values behind the summary, in sample order.
    #[serde(skip)]
    pub values: Vec<f64>,
}

impl AuditReport {
    pub fn is_assert_failure(&self) -> bool {
        self.class == AuditClass::Assert && self.status == AuditStatus::Fail
    }

    pub fn is_backend_disagreement(&self) -> bool {
        self.status == AuditStatus::BackendDisagreement
    }
}

/// Audit groups selectable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditName {
    Algebra,
    Forms,
    Invariance,
    Metric,
    Diffgeo,
    MetricIsometry,
    Hyperkahler,
    CcBounds,
    Lift,
    Quotients,
}

impl AuditName {
    pub const ALL: [AuditName; 10] = [
        AuditName::Algebra,
        AuditName::Forms,
        AuditName::Invariance,
        AuditName::Metric,
        AuditName::Diffgeo,
        AuditName::MetricIsometry,
        AuditName::Hyperkahler,
        AuditName::CcBounds,
        AuditName::Lift,
        AuditName::Quotients,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AuditName::Algebra => "algebra",
            AuditName::Forms => "forms",
            AuditName::Invariance => "invariance",
            AuditName::Metric => "metric",
            AuditName::Diffgeo => "diffgeo",
            AuditName::MetricIsometry => "metric_isometry",
            AuditName::Hyperkahler => "hyperkahler",
            AuditName::CcBounds => "cc_bounds",
            AuditName::Lift => "lift",
            AuditName::Quotients => "quotients",
        }
    }

    /// Whether the audit is repeated for every configured `a`.
    fn uses_a(self) -> bool {
        !matches!(self, AuditName::Algebra | AuditName::Diffgeo)
    }

    /// Whether the audit is repeated for every configured `n`.
    fn uses_n(self) -> bool {
        !matches!(self, AuditName::Diffgeo)
    }
}

impl fmt::Display for AuditName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AuditName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AuditName::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown audit '{s}'")))
    }
}

/// Which differentiation backends derivative-based claims use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendChoice {
    Fd,
    Dual,
    /// Dual numbers as primary, finite differences for cross-agreement.
    #[default]
    Both,
}

impl BackendChoice {
    fn primary(self) -> Backend {
        match self {
            BackendChoice::Fd => Backend::DEFAULT_FD,
            _ => Backend::Dual,
        }
    }
}

impl FromStr for BackendChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fd" => Ok(BackendChoice::Fd),
            "dual" => Ok(BackendChoice::Dual),
            "both" => Ok(BackendChoice::Both),
            _ => Err(Error::InvalidParameter(format!("unknown backend '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub n: Vec<usize>,
    pub a_values: Vec<f64>,
    pub seed: u64,
    /// Sample count for algebraic and form identities.
    pub samples: usize,
    /// Sample count for curvature-level measurements.
    pub curvature_samples: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub backend: BackendChoice,
    pub audits: Vec<AuditName>,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            n: vec![1, 2],
            a_values: vec![0.5, 1.0, 2.0],
            seed: 7,
            samples: 1000,
            curvature_samples: 100,
            tolerances: BTreeMap::new(),
            backend: BackendChoice::Both,
            audits: AuditName::ALL.to_vec(),
        }
    }
}

impl AuditConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n.is_empty() || self.n.contains(&0) {
            return bad("n must be at least 1".into());
        }
        if self.a_values.is_empty() {
            return bad("at least one value of a is required".into());
        }
        if let Some(a) = self.a_values.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return bad(format!("a = {a} must be positive"));
        }
        if self.samples == 0 || self.curvature_samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if let Some((k, v)) = self
            .tolerances
            .iter()
            .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return bad(format!("tolerance {k}={v} must be positive"));
        }
        if self.audits.is_empty() {
            return bad("no audits selected".into());
        }
        Ok(())
    }
}

/// Runs the selected audits; reports are sorted by `(claim_id, n, a)`.
pub fn run_audits(cfg: &AuditConfig) -> Result<Vec<AuditReport>> {
    cfg.validate()?;
    let audits: BTreeSet<AuditName> = cfg.audits.iter().copied().collect();
    let ns: BTreeSet<usize> = cfg.n.iter().copied().collect();
    let mut a_values = cfg.a_values.clone();
    a_values.sort_by(f64::total_cmp);
    a_values.dedup();
    let mut reports = Vec::new();
    for name in audits {
        let n_list: Vec<Option<usize>> = if name.uses_n() {
            ns.iter().map(|&n| Some(n)).collect()
        } else {
            vec![None]
        };
        let a_list: Vec<Option<f64>> = if name.uses_a() {
            a_values.iter().map(|&a| Some(a)).collect()
        } else {
            vec![None]
        };
        for &n in &n_list {
            for &a in &a_list {
                let job = Job {
                    cfg,
                    n,
                    a,
                    out: Mutex::new(Vec::new()),
                };
                match name {
                    AuditName::Algebra => algebra::run(&job),
                    AuditName::Forms => forms::run(&job),
                    AuditName::Invariance => invariance::run(&job),
                    AuditName::Metric => metric::run(&job),
                    AuditName::Diffgeo => diffgeo::run(&job),
                    AuditName::MetricIsometry => isometry::run(&job),
                    AuditName::Hyperkahler => hyperkahler::run(&job),
                    AuditName::CcBounds => cc::run(&job),
                    AuditName::Lift => lift::run(&job),
                    AuditName::Quotients => quotients::run(&job),
                }?;
                reports.extend(job.out.into_inner().expect("report sink poisoned"));
            }
        }
        // claims that compare several values of a run once per n
        match name {
            AuditName::MetricIsometry => {
                for &n in &n_list {
                    let job = Job {
                        cfg,
                        n,
                        a: None,
                        out: Mutex::new(Vec::new()),
                    };
                    isometry::run_cross_a(&job, &a_values)?;
                    reports.extend(job.out.into_inner().expect("report sink poisoned"));
                }
            }
            AuditName::CcBounds => {
                let job = Job {
                    cfg,
                    n: Some(1),
                    a: Some(1.0),
                    out: Mutex::new(Vec::new()),
                };
                cc::run_fixed(&job)?;
                reports.extend(job.out.into_inner().expect("report sink poisoned"));
            }
            _ => {}
        }
    }
    if let Some(k) = cfg
        .tolerances
        .keys()
        .find(|k| !reports.iter().any(|r| &r.claim_id == *k))
    {
        return Err(Error::InvalidParameter(format!(
            "tolerance override for unknown claim '{k}'"
        )));
    }
    reports.sort_by(|x, y| {
        x.claim_id
            .cmp(&y.claim_id)
            .then(x.n.cmp(&y.n))
            .then(x.a.unwrap_or(f64::NAN).total_cmp(&y.a.unwrap_or(f64::NAN)))
    });
    Ok(reports)
}

/// Exit status summary of a set of reports: `0` pass, `1` assert failure,
/// `3` backend disagreement (takes precedence).
pub fn exit_code(reports: &[AuditReport]) -> i32 {
    if reports.iter().any(AuditReport::is_backend_disagreement) {
        3
    } else if reports.iter().any(AuditReport::is_assert_failure) {
        1
    } else {
        0
    }
}

/// Seeded samples `0..count`, evaluated in parallel, collected in index order.
pub(crate) fn par_samples<R: Send>(count: usize, f: impl Fn(u64) -> R + Sync + Send) -> Vec<R> {
    (0..count as u64).into_par_iter().map(f).collect()
}

/// `|x − y| / max(1, |y|)`.
pub(crate) fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(1.0)
}

/// Entrywise [`rel`], maximized.
pub(crate) fn rel_vec(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| rel(*a, *b))
        .fold(0.0, f64::max)
}

/// One audit job: a fixed `(n, a)` and a sink for its reports.
pub(crate) struct Job<'a> {
    pub cfg: &'a AuditConfig,
    pub n: Option<usize>,
    pub a: Option<f64>,
    out: Mutex<Vec<AuditReport>>,
}

/// Static description of one claim.
pub(crate) struct Claim<'s> {
    pub id: &'s str,
    pub locus: &'s str,
    pub note: &'s str,
}

impl<'s> Claim<'s> {
    pub fn new(id: &'s str, locus: &'s str) -> Self {
        Claim {
            id,
            locus,
            note: "",
        }
    }

    pub fn note(mut self, note: &'s str) -> Self {
        self.note = note;
        self
    }
}

impl Job<'_> {
    pub fn n(&self) -> usize {
        self.n.expect("audit requires n")
    }

    pub fn a(&self) -> f64 {
        self.a.expect("audit requires a")
    }

    pub fn samples(&self) -> usize {
        self.cfg.samples
    }

    pub fn curvature_samples(&self) -> usize {
        self.cfg.curvature_samples
    }

    pub fn seed(&self) -> u64 {
        self.cfg.seed
    }

    pub fn primary(&self) -> Backend {
        self.cfg.backend.primary()
    }

    fn tol(&self, id: &str, default: f64) -> f64 {
        self.cfg.tolerances.get(id).copied().unwrap_or(default)
    }

    fn base(&self, c: &Claim, class: AuditClass, values: Vec<f64>, wall_time: f64) -> AuditReport {
        let stats = Stats::from_values(values.iter().copied());
        AuditReport {
            claim_id: c.id.to_string(),
            paper_locus: c.locus.to_string(),
            class,
            n: self.n,
            a: self.a,
            seed: self.cfg.seed,
            samples: stats.count,
            max_residual: stats.max,
            mean_residual: stats.mean,
            backend_agreement: None,
            status: AuditStatus::Recorded,
            tolerance: None,
            comparison: None,
            backends: None,
            note: c.note.to_string(),
            wall_time,
            values,
        }
    }

    pub fn push(&self, r: AuditReport) {
        self.out.lock().expect("report sink poisoned").push(r);
    }

    /// Assert-class claim: residuals must stay below the tolerance.
    pub fn check(&self, c: Claim, default_tol: f64, f: impl FnOnce() -> Vec<f64>) {
        let t0 = Instant::now();
        self.push(self.verdict(c, f(), None, default_tol, Comparison::Below, t0));
    }

    /// Assert-class witness: the largest value must exceed the threshold.
    pub fn witness(&self, c: Claim, default_threshold: f64, f: impl FnOnce() -> Vec<f64>) {
        let t0 = Instant::now();
        self.push(self.verdict(c, f(), None, default_threshold, Comparison::Above, t0));
    }

    /// Assert-class claim whose residual depends on the differentiation
    /// backend; with `both`, the finite-difference run supplies the agreement.
    pub fn check_backend(&self, c: Claim, default_tol: f64, f: impl Fn(Backend) -> Vec<f64>) {
        let t0 = Instant::now();
        let primary = f(self.primary());
        let both = if self.cfg.backend == BackendChoice::Both {
            let fd = f(Backend::DEFAULT_FD);
            Some(BackendStats {
                dual: Stats::from_values(primary.clone()),
                fd: Stats::from_values(fd.clone()),
            })
            .map(|b| (b, agreement(&fd, &primary)))
        } else {
            None
        };
        self.push(self.verdict(c, primary, both, default_tol, Comparison::Below, t0));
    }

    /// Assert-class oracle comparison with both backends: every value must
    /// match its oracle under either backend, and the backends must agree.
    pub fn check_oracle(&self, c: Claim, default_tol: f64, f: impl Fn(Backend) -> Vec<(f64, f64)>) {
        let t0 = Instant::now();
        let dual = f(Backend::Dual);
        let fd = f(Backend::DEFAULT_FD);
        let res = |v: &[(f64, f64)]| -> Vec<f64> { v.iter().map(|(x, o)| rel(*x, *o)).collect() };
        let vals = |v: &[(f64, f64)]| -> Vec<f64> { v.iter().map(|p| p.0).collect() };
        let (rd, rf) = (res(&dual), res(&fd));
        let agr = agreement(&vals(&fd), &vals(&dual));
        let values: Vec<f64> = rd
            .iter()
            .zip(&rf)
            .map(|(a, b)| {
                if a.is_nan() || b.is_nan() {
                    f64::NAN
                } else {
                    a.max(*b)
                }
            })
            .collect();
        let both = BackendStats {
            dual: Stats::from_values(rd),
            fd: Stats::from_values(rf),
        };
        self.push(self.verdict(
            c,
            values,
            Some((both, agr)),
            default_tol,
            Comparison::Below,
            t0,
        ));
    }

    fn verdict(
        &self,
        c: Claim,
        values: Vec<f64>,
        both: Option<(BackendStats, f64)>,
        default_tol: f64,
        cmp: Comparison,
        t0: Instant,
    ) -> AuditReport {
        let tol = self.tol(c.id, default_tol);
        let mut r = self.base(&c, AuditClass::Assert, values, t0.elapsed().as_secs_f64());
        let ok = match cmp {
            Comparison::Below => r.max_residual < tol,
            Comparison::Above => r.max_residual > tol,
        };
        r.status = if ok {
            AuditStatus::Pass
        } else {
            AuditStatus::Fail
        };
        if let Some((b, agr)) = both {
            r.backends = Some(b);
            r.backend_agreement = Some(agr);
            if agr.is_nan() || agr >= AGREEMENT_TOL {
                r.status = AuditStatus::BackendDisagreement;
            }
        }
        r.tolerance = Some(tol);
        r.comparison = Some(cmp);
        r
    }

    /// Measure-class claim: `f` is evaluated with both backends and returns
    /// the measured values; the report summarizes the dual-number values.
    pub fn measure(&self, c: Claim, f: impl Fn(Backend) -> Vec<f64>) {
        let t0 = Instant::now();
        let dual = f(Backend::Dual);
        let fd = f(Backend::DEFAULT_FD);
        let agr = agreement(&fd, &dual);
        let stats = Stats::from_values(dual.iter().copied());
        let mut r = self.base(&c, AuditClass::Measure, dual, t0.elapsed().as_secs_f64());
        r.backends = Some(BackendStats {
            dual: stats,
            fd: Stats::from_values(fd),
        });
        r.backend_agreement = Some(agr);
        r.status = if agr < AGREEMENT_TOL {
            AuditStatus::Recorded
        } else {
            AuditStatus::BackendDisagreement
        };
        self.push(r);
    }

    /// Measure-class claim for values that do not involve differentiation.
    pub fn record(&self, c: Claim, f: impl FnOnce() -> Vec<f64>) {
        let t0 = Instant::now();
        self.push(self.base(&c, AuditClass::Measure, f(), t0.elapsed().as_secs_f64()));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(AuditConfig::default().validate().is_ok());
        let c = AuditConfig {
            a_values: vec![0.0],
            ..AuditConfig::default()
        };
        assert!(c.validate().is_err());
        let c = AuditConfig {
            n: vec![0],
            ..AuditConfig::default()
        };
        assert!(c.validate().is_err());
        let c = AuditConfig {
            samples: 0,
            ..AuditConfig::default()
        };
        assert!(c.validate().is_err());
        let mut c = AuditConfig::default();
        c.tolerances.insert("forms.charaq".into(), -1.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn names_roundtrip() {
        for a in AuditName::ALL {
            assert_eq!(a.as_str().parse::<AuditName>().unwrap(), a);
        }
        assert!("nope".parse::<AuditName>().is_err());
        assert_eq!("fd".parse::<BackendChoice>().unwrap(), BackendChoice::Fd);
    }

    #[test]
    fn exit_codes() {
        let cfg = AuditConfig::default();
        let job = Job {
            cfg: &cfg,
            n: Some(1),
            a: Some(1.0),
            out: Mutex::new(Vec::new()),
        };
        job.check(Claim::new("x.pass", "here"), 1e-3, || vec![1e-6]);
        let ok = job.out.lock().unwrap().clone();
        assert_eq!(exit_code(&ok), 0);
        job.check(Claim::new("x.fail", "here"), 1e-3, || vec![1.0]);
        let bad = job.out.lock().unwrap().clone();
        assert_eq!(exit_code(&bad), 1);
        job.measure(Claim::new("x.disagree", "here"), |b| {
            vec![if b == Backend::Dual { 0.0 } else { 1.0 }]
        });
        let dis = job.out.into_inner().unwrap();
        assert_eq!(exit_code(&dis), 3);
    }

    #[test]
    fn nan_fails_a_check() {
        let cfg = AuditConfig::default();
        let job = Job {
            cfg: &cfg,
            n: Some(1),
            a: Some(1.0),
            out: Mutex::new(Vec::new()),
        };
        job.check(Claim::new("x.nan", "here"), 1e-3, || vec![0.0, f64::NAN]);
        job.witness(Claim::new("x.nanw", "here"), 1e-3, || vec![f64::NAN]);
        assert!(job
            .out
            .into_inner()
            .unwrap()
            .iter()
            .all(|r| r.status == AuditStatus::Fail));
    }
}
