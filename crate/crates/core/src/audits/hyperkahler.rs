use rand::Rng;

use super::forms::{mvec, DEtaForm};
use super::metric::omega_checks;
use super::{par_samples, Claim, Job};
use crate::diffgeo::{
    d_norm, holonomy_deviation, nabla_j, numeric_d, parallel_transport, riemann_ricci, ConstEndo,
    LoopSpec, MetricField,
};
use crate::error::Result;
use crate::metric::{
    tau, tau_diff, theta_eval, DescendedForm, DescendedJ, DescendedMetric, GaMetric, ThetaDirect,
    ThetaPullback,
};
use crate::quatlib::standard_j;
use crate::sampling::{gaussian_vec, sample_hvec, sample_point, sample_rng, sample_z};

/// Loop step; RK4 error is far below the measured deviations.
const LOOP_STEP: f64 = 1e-2;

/// A seeded square coordinate loop of side 0.5 in ℍ ≅ ℝ⁴.
fn sample_loop(seed: u64, s: u64) -> LoopSpec {
    let mut rng = sample_rng(seed, "hyperkahler.holonomy", s);
    let base: Vec<f64> = gaussian_vec(&mut rng, 4)
        .into_iter()
        .map(|v| 0.5 * v)
        .collect();
    let p = rng.random_range(0..4);
    let q = (p + rng.random_range(1..4)) % 4;
    LoopSpec {
        step: LOOP_STEP,
        ..LoopSpec::square(base, (p, q), 0.5)
    }
}

pub(super) fn run(job: &Job) -> Result<()> {
    let (n, a, seed) = (job.n(), job.a(), job.seed());
    let count = job.curvature_samples();
    let g = GaMetric::new(n, a)?;

    omega_checks(job, "hyperkahler", count);

    job.check_backend(
        Claim::new("hyperkahler.dd_eta", "d(dη_α) = 0"),
        1e-8,
        |b| {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "hyperkahler.dd_eta", s);
                let p = sample_point(&mut rng, n);
                let vecs = vec![
                    mvec(&mut rng, n).to_flat(),
                    mvec(&mut rng, n).to_flat(),
                    mvec(&mut rng, n).to_flat(),
                ];
                let scale: f64 = vecs
                    .iter()
                    .map(|v| v.iter().map(|c| c * c).sum::<f64>().sqrt())
                    .product();
                (1..=3)
                    .map(|al| {
                        numeric_d(&DEtaForm { n, a, alpha: al }, &p.to_flat(), &vecs, b).abs()
                            / scale.max(1.0)
                    })
                    .fold(0.0, f64::max)
            })
        },
    );

    let zs: Vec<Vec<f64>> = (0..count as u64)
        .map(|s| sample_z(&mut sample_rng(seed, "hyperkahler.points", s), n).to_reals())
        .collect();

    job.measure(
        Claim::new(
            "hyperkahler.d_theta_direct",
            "‖dΘ_α‖ for Θ_α = g_a(·, J_α·)",
        )
        .note("max over α of the component norm of dΘ_α"),
        |b| {
            par_samples(count, |s| {
                let x = &zs[s as usize];
                (1..=3)
                    .map(|al| d_norm(&ThetaDirect { g, alpha: al }, x, b))
                    .fold(0.0, f64::max)
            })
        },
    );

    job.measure(
        Claim::new(
            "hyperkahler.d_theta_pullback",
            "‖dΘ_α‖ for Θ_α = τ_α^*Ω_α / 2",
        )
        .note("max over α of the component norm of dΘ_α"),
        |b| {
            par_samples(count, |s| {
                let x = &zs[s as usize];
                (1..=3)
                    .map(|al| d_norm(&ThetaPullback { g, alpha: al }, x, b))
                    .fold(0.0, f64::max)
            })
        },
    );

    job.measure(
        Claim::new("hyperkahler.d_omega", "‖dΩ_α‖ on ℍⁿ"),
        |b| {
            par_samples(count, |s| {
                let x = &zs[s as usize];
                (1..=3)
                    .map(|al| {
                        d_norm(
                            &DescendedForm::new(n, al, a).expect("valid parameters"),
                            x,
                            b,
                        )
                    })
                    .fold(0.0, f64::max)
            })
        },
    );

    job.record(
        Claim::new(
            "hyperkahler.theta_routes",
            "Θ_α by the two routes, g_a(X̂, J_αŶ) against τ_α^*Ω_α / 2",
        )
        .note("max over α of |difference| / (|X̂||Ŷ|); no derivatives involved"),
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "hyperkahler.theta_routes", s);
                let z = sample_z(&mut rng, n);
                let (x, y) = (sample_hvec(&mut rng, n), sample_hvec(&mut rng, n));
                (1..=3)
                    .map(|al| {
                        let t = theta_eval(al, &g, &z, &x, &y);
                        (t.direct - t.pullback).abs() / (x.norm() * y.norm()).max(1e-300)
                    })
                    .fold(0.0, f64::max)
            })
        },
    );

    job.record(
        Claim::new(
            "hyperkahler.descended_vs_g",
            "τ_α^*ĝ_α against g_a, with ĝ_α = Ω_α(Ĵ_α·, ·) normalized to δ at the origin",
        )
        .note("max over α of |τ_α^*ĝ_α(X̂, Ŷ) − g_a(X̂, Ŷ)| / (|X̂||Ŷ|)"),
        || {
            let gh: Vec<DescendedMetric> = (1..=3)
                .map(|al| DescendedMetric::new(n, al, a).expect("valid parameters"))
                .collect();
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "hyperkahler.descended_vs_g", s);
                let z = sample_z(&mut rng, n);
                let (x, y) = (sample_hvec(&mut rng, n), sample_hvec(&mut rng, n));
                let rhs = g.eval(&z, &x, &y);
                gh.iter()
                    .map(|m| {
                        let al = m.alpha;
                        let lhs = m.eval(
                            &tau(al, a, &z),
                            &tau_diff(al, a, &z, &x),
                            &tau_diff(al, a, &z, &y),
                        );
                        (lhs - rhs).abs() / (x.norm() * y.norm()).max(1e-300)
                    })
                    .fold(0.0, f64::max)
            })
        },
    );

    if n != 1 {
        return Ok(());
    }

    job.measure(
        Claim::new(
            "hyperkahler.descended_nabla_j",
            "‖∇Ĵ_α‖ for the metric ĝ_α = Ω_α(Ĵ_α·, ·) on ℍⁿ = ℳ/ℛ_α",
        )
        .note("max over α; Ĵ_α(û) = L(J_α L⁻¹û) in the π_α chart"),
        |b| {
            par_samples(count, |s| {
                (1..=3)
                    .map(|al| {
                        let gh = DescendedMetric::new(n, al, a).expect("valid parameters");
                        let j = DescendedJ { n, alpha: al, a };
                        nabla_j(&gh, &j, &zs[s as usize], b).expect("positive definite")
                    })
                    .fold(0.0, f64::max)
            })
        },
    );

    job.measure(
        Claim::new(
            "hyperkahler.ricci_norm",
            "‖Ric(g_a)‖ = (Ric_{jk}Ric^{jk})^{1/2}",
        ),
        |b| {
            par_samples(count, |s| {
                let curv = riemann_ricci(&g, &zs[s as usize], b).expect("positive definite");
                curv.ricci_norm_sq().max(0.0).sqrt()
            })
        },
    );

    job.measure(
        Claim::new(
            "hyperkahler.nabla_j",
            "‖∇J_α‖ for the standard J_α = right multiplication by ī_α",
        )
        .note("max over α of the coordinate Frobenius norm"),
        |b| {
            par_samples(count, |s| {
                (1..=3)
                    .map(|al| {
                        nabla_j(&g, &ConstEndo(standard_j(al, 1)), &zs[s as usize], b)
                            .expect("positive definite")
                    })
                    .fold(0.0, f64::max)
            })
        },
    );

    job.measure(
        Claim::new(
            "hyperkahler.holonomy",
            "deviation of the holonomy of g_a from Sp(n)",
        )
        .note(
            "seeded square coordinate loops of side 0.5; value = orthogonality + max commutator with J_α",
        ),
        |b| {
            let js: Vec<Vec<f64>> = (1..=3).map(|al| standard_j(al, 1)).collect();
            par_samples(count, |s| {
                let spec = sample_loop(seed, s);
                match parallel_transport(&g, &spec, b) {
                    Ok(t) => holonomy_deviation(&t.map, &g.gram(&spec.base), &js, g.dim()).total,
                    Err(_) => f64::NAN,
                }
            })
        },
    );
    Ok(())
}
