//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criterion 8 contains the claim h̃_*𝖣 = 𝖣 for every h = (z ↦ Azᾱ), which does not hold
//! for α ≠ ±1 (ω(h̃_*V) = Im(αmᾱ − m), m = ⟨z, dz⟩). The criterion is evaluated as stated
//! and reported FAIL; the suite exits nonzero only if some other criterion fails or the
//! failure of criterion 8 differs from that shape.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::Instant;

use hyperlab_core::{run_audits, AuditClass, AuditConfig, AuditName, AuditReport, AuditStatus};

const AGREEMENT: f64 = 1e-6;

struct Run {
    reports: Vec<AuditReport>,
    seconds: f64,
}

fn run(audits: &[AuditName], n: &[usize]) -> Run {
    let cfg = AuditConfig {
        audits: audits.to_vec(),
        n: n.to_vec(),
        ..AuditConfig::default()
    };
    let start = Instant::now();
    let reports = run_audits(&cfg).expect("valid configuration");
    Run {
        reports,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Collects the reasons a criterion fails.
#[derive(Default)]
struct Verdict(Vec<String>);

impl Verdict {
    fn ensure(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.0.push(msg());
        }
    }

    fn passed(&self) -> bool {
        self.0.is_empty()
    }

    /// `id` is present for every expected `(n, a)` and passes at tolerance at most `tol`.
    fn asserted(&mut self, reports: &[AuditReport], id: &str, tol: f64, min_samples: usize) {
        let rs: Vec<&AuditReport> = reports.iter().filter(|r| r.claim_id == id).collect();
        self.ensure(!rs.is_empty(), || format!("{id}: missing"));
        for r in rs {
            let at = format!("{id} (n={:?}, a={:?})", r.n, r.a);
            self.ensure(r.class == AuditClass::Assert, || {
                format!("{at}: not an assertion")
            });
            self.ensure(r.status == AuditStatus::Pass, || {
                format!("{at}: {:?}, max {:.3e}", r.status, r.max_residual)
            });
            self.ensure(r.samples >= min_samples, || {
                format!("{at}: {} samples < {min_samples}", r.samples)
            });
            if r.comparison == Some(hyperlab_core::audits::Comparison::Below) {
                self.ensure(r.tolerance.is_some_and(|t| t <= tol), || {
                    format!("{at}: tolerance {:?} looser than {tol:e}", r.tolerance)
                });
            }
        }
    }

    /// Every report passes or is recorded.
    fn all_pass(&mut self, reports: &[AuditReport]) {
        for r in reports {
            self.ensure(
                matches!(r.status, AuditStatus::Pass | AuditStatus::Recorded),
                || format!("{} (n={:?}, a={:?}): {:?}", r.claim_id, r.n, r.a, r.status),
            );
        }
    }

    /// Every two-backend comparison agrees within [`AGREEMENT`].
    fn agreement(&mut self, reports: &[AuditReport]) {
        for r in reports {
            if let Some(agr) = r.backend_agreement {
                self.ensure(agr < AGREEMENT, || {
                    format!(
                        "{} (n={:?}, a={:?}): agreement {agr:.2e}",
                        r.claim_id, r.n, r.a
                    )
                });
            }
        }
    }

    fn within(&mut self, what: &str, seconds: f64, limit: f64) {
        self.ensure(seconds < limit, || {
            format!("{what}: {seconds:.1} s exceeds {limit} s")
        });
    }
}

fn measured(v: &mut Verdict, reports: &[AuditReport], id: &str, n: usize) {
    let rs: Vec<&AuditReport> = reports
        .iter()
        .filter(|r| r.claim_id == id && r.n == Some(n))
        .collect();
    v.ensure(rs.len() == 3, || {
        format!("{id} n={n}: {} reports, want 3", rs.len())
    });
    for r in rs {
        let at = format!("{id} (n={n}, a={:?})", r.a);
        v.ensure(r.class == AuditClass::Measure, || {
            format!("{at}: not a measurement")
        });
        v.ensure((100..=1000).contains(&r.samples), || {
            format!("{at}: {} samples", r.samples)
        });
        v.ensure(r.backend_agreement.is_some_and(|g| g < AGREEMENT), || {
            format!("{at}: agreement {:?}", r.backend_agreement)
        });
        v.ensure(r.max_residual.is_finite(), || {
            format!("{at}: non-finite value")
        });
    }
}

fn determinism() -> Verdict {
    let mut v = Verdict::default();
    let dir = tempfile::tempdir().expect("tempdir");
    let args = [
        "--n",
        "1",
        "--n",
        "2",
        "--a",
        "0.5",
        "--a",
        "2",
        "--samples",
        "200",
        "--curvature-samples",
        "10",
        "--seed",
        "11",
        "--quiet",
    ];
    let mut outputs = Vec::new();
    for (k, threads) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("run{k}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_hyperlab"))
            .args(args)
            .arg("--out")
            .arg(&out)
            .env("RAYON_NUM_THREADS", threads)
            .status()
            .expect("spawn hyperlab");
        v.ensure(status.code().is_some(), || {
            "hyperlab killed by a signal".into()
        });
        outputs.push(fs::read(&out).expect("report written"));
    }
    v.ensure(!outputs[0].is_empty(), || "empty report".into());
    v.ensure(outputs[0] == outputs[1], || {
        "reports differ between identical runs".into()
    });
    v
}

fn main() -> ExitCode {
    let start = Instant::now();
    let algebra = run(&[AuditName::Algebra], &[1, 2]);
    let forms = run(&[AuditName::Forms, AuditName::Invariance], &[1, 2]);
    let metric = run(&[AuditName::Metric], &[1, 2]);
    let diffgeo = run(&[AuditName::Diffgeo], &[1]);
    let measures = run(&[AuditName::Hyperkahler, AuditName::Quotients], &[1, 2]);
    let cc = run(&[AuditName::CcBounds], &[1]);
    let isometry = run(&[AuditName::MetricIsometry, AuditName::Lift], &[1, 2]);

    let mut verdicts: Vec<(&str, Verdict)> = Vec::new();

    let mut v = Verdict::default();
    v.all_pass(&algebra.reports);
    for id in [
        "algebra.quaternion_associativity",
        "algebra.quaternion_norm",
        "algebra.so3_homomorphism",
        "algebra.group_axioms",
        "algebra.center",
        "algebra.action_laws",
        "algebra.action_automorphism",
        "algebra.sp_n",
    ] {
        v.asserted(&algebra.reports, id, 1e-12, 1000);
    }
    v.asserted(&algebra.reports, "algebra.quaternion_units", 1e-12, 1);
    v.within("algebra", algebra.seconds, 5.0);
    verdicts.push(("algebraic layer", v));

    let mut v = Verdict::default();
    v.all_pass(&forms.reports);
    v.asserted(&forms.reports, "forms.uniformva", 1e-12, 1000);
    v.asserted(&forms.reports, "forms.charaq", 1e-10, 1000);
    v.asserted(&forms.reports, "forms.d_eta_on_d", 1e-12, 1000);
    v.asserted(&forms.reports, "forms.reciprocity", 1e-10, 1000);
    v.asserted(&forms.reports, "forms.j_invariance", 1e-10, 1000);
    v.asserted(&forms.reports, "forms.acw", 1e-10, 1000);
    v.asserted(&forms.reports, "forms.etaconj", 1e-10, 1000);
    v.ensure(
        forms
            .reports
            .iter()
            .filter(|r| r.claim_id == "forms.acw")
            .count()
            == 6,
        || "forms not run for every n ∈ {1, 2}, a ∈ {0.5, 1, 2}".into(),
    );
    v.within("forms", forms.seconds, 30.0);
    verdicts.push(("form identities", v));

    let mut v = Verdict::default();
    v.asserted(&metric.reports, "metric.conformal_identity", 1e-10, 1000);
    v.asserted(&metric.reports, "metric.lift_independence", 1e-10, 1000);
    verdicts.push(("conformal identity", v));

    let mut v = Verdict::default();
    v.asserted(&metric.reports, "metric.omega_well_defined", 1e-9, 1000);
    v.asserted(&metric.reports, "metric.omega_pullback", 1e-9, 1000);
    v.all_pass(&metric.reports);
    verdicts.push(("Ω_α well defined, π_α^*Ω_α = dη_α", v));

    let mut v = Verdict::default();
    v.all_pass(&diffgeo.reports);
    for id in [
        "diffgeo.conformal_oracle",
        "diffgeo.flat",
        "diffgeo.round_sphere",
        "diffgeo.fubini_study",
    ] {
        v.asserted(&diffgeo.reports, id, 1e-5, 1);
    }
    for r in [
        &algebra, &forms, &metric, &diffgeo, &measures, &cc, &isometry,
    ] {
        v.agreement(&r.reports);
    }
    verdicts.push(("numerical-geometry oracles and backend agreement", v));

    let mut v = Verdict::default();
    for n in [1, 2] {
        measured(&mut v, &measures.reports, "hyperkahler.d_theta_direct", n);
        measured(&mut v, &measures.reports, "hyperkahler.d_theta_pullback", n);
    }
    for id in [
        "hyperkahler.ricci_norm",
        "hyperkahler.nabla_j",
        "hyperkahler.holonomy",
        "quotients.bochner",
        "quotients.antimetric_plus",
        "quotients.antimetric_minus",
    ] {
        measured(&mut v, &measures.reports, id, 1);
    }
    v.within("measurements", measures.seconds, 300.0);
    verdicts.push(("measurement reports", v));

    let mut v = Verdict::default();
    v.all_pass(&cc.reports);
    v.asserted(&cc.reports, "cc.lower_bound", 1e-4, 1000);
    v.asserted(&cc.reports, "cc.curve_horizontal", 1e-4, 1000);
    v.asserted(&cc.reports, "cc.radial_upper_bound", 1e-4, 1000);
    v.ensure(
        cc.reports
            .iter()
            .filter(|r| r.claim_id == "cc.lower_bound")
            .count()
            == 3,
        || "lower bound not run for every a ∈ {0.5, 1, 2}".into(),
    );
    verdicts.push(("Carnot–Carathéodory bounds", v));

    let mut v = Verdict::default();
    v.asserted(&isometry.reports, "isometry.sp_invariance", 1e-10, 1000);
    v.asserted(
        &isometry.reports,
        "isometry.translation_witness",
        f64::INFINITY,
        1000,
    );
    v.asserted(
        &isometry.reports,
        "isometry.curvature_separation",
        f64::INFINITY,
        1,
    );
    v.asserted(&isometry.reports, "lift.diagram", 1e-12, 1000);
    v.asserted(&isometry.reports, "lift.preserves_d", 1e-9, 1000);
    let witness_ok = isometry
        .reports
        .iter()
        .filter(|r| r.claim_id == "isometry.translation_witness")
        .all(|r| r.tolerance.is_some_and(|t| t >= 0.01));
    v.ensure(witness_ok, || {
        "translation witness threshold below 0.01".into()
    });
    let isometry_verdict = v;

    // The documented shape: only the α ≠ ±1 lift claims fail, the Sp(n) case passes and
    // the defect matches Im(αmᾱ − m).
    let mut shape = Verdict::default();
    let expected_failures = ["lift.preserves_d", "lift.preserves_d_right"];
    let others: Vec<AuditReport> = isometry
        .reports
        .iter()
        .filter(|r| !expected_failures.contains(&r.claim_id.as_str()))
        .cloned()
        .collect();
    shape.all_pass(&others);
    shape.asserted(&isometry.reports, "lift.preserves_d_sp_n", 1e-9, 1000);
    shape.asserted(&isometry.reports, "lift.defect_formula", 1e-12, 1000);
    for id in expected_failures {
        shape.ensure(
            isometry
                .reports
                .iter()
                .filter(|r| r.claim_id == id)
                .all(|r| r.status == AuditStatus::Fail && r.max_residual > 0.1),
            || format!("{id}: expected a failure with an O(1) defect"),
        );
    }
    verdicts.push(("isometry audits and lift construction", isometry_verdict));

    let mut v = Verdict::default();
    let quotient_n1: Vec<AuditReport> = measures
        .reports
        .iter()
        .filter(|r| r.claim_id.starts_with("quotients.") && r.n == Some(1))
        .cloned()
        .collect();
    for id in [
        "quotients.phi_homomorphism",
        "quotients.phi_forms",
        "quotients.anti_holomorphy",
        "quotients.gn_unitary_invariance",
    ] {
        v.asserted(&quotient_n1, id, 1e-10, 1000);
    }
    v.all_pass(&quotient_n1);
    verdicts.push(("quotient by the solvable subgroup", v));

    verdicts.push(("determinism", determinism()));

    let mut unexpected = false;
    for (k, (name, v)) in verdicts.iter().enumerate() {
        let label = if v.passed() { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {label}  {name}", k + 1);
        for reason in &v.0 {
            println!("               {reason}");
        }
        let expected_fail = k + 1 == 8 && shape.passed();
        unexpected |= !v.passed() && !expected_fail;
    }
    if !shape.passed() {
        println!("criterion  8 failure does not match the known lift defect:");
        for reason in &shape.0 {
            println!("               {reason}");
        }
    }
    let passed = verdicts.iter().filter(|(_, v)| v.passed()).count();
    println!(
        "{passed}/{} criteria pass in {:.1} s",
        verdicts.len(),
        start.elapsed().as_secs_f64()
    );
    if unexpected {
        ExitCode::FAILURE
    } else {
        if passed < verdicts.len() {
            println!(
                "criterion 8 fails only on h̃_*𝖣 = 𝖣 for α ≠ ±1, where ω(h̃_*V) = Im(αmᾱ − m) ≠ 0"
            );
        }
        ExitCode::SUCCESS
    }
}
