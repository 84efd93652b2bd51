use super::forms::mvec;
use super::{par_samples, rel, rel_vec, Claim, Job};
use crate::diffgeo::min_eigenvalue;
use crate::dual::Dual;
use crate::error::Result;
use crate::forms::{d_eta_eval, f_eval, j_hat};
use crate::heisenberg::{pushforward, rho_act, MPoint, SolvableIndex};
use crate::metric::{
    descended_j, omega_descended, omega_descended_at, pi_alpha, tau, tau_diff, tau_diff_dual,
    tau_inv, DescendedForm, GaMetric,
};
use crate::quatlib::QVector;
use crate::sampling::{gaussian, sample_hvec, sample_point, sample_rng, sample_z};

fn scaled(x: &QVector<f64>, y: &QVector<f64>) -> f64 {
    (x.norm() * y.norm()).max(1e-300)
}

pub(super) fn run(job: &Job) -> Result<()> {
    let (n, a, seed, count) = (job.n(), job.a(), job.seed(), job.samples());
    let g = GaMetric::new(n, a)?;
    let d = 4 * n;

    job.check(
        Claim::new(
            "metric.conformal_identity",
            "g_a = f(z)·g_ℍ after global normalization",
        )
        .note("residual relative to |X̂||Ŷ|; normalization constant 2 fixed at the origin"),
        1e-10,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "metric.conformal_identity", s);
                let z = sample_z(&mut rng, n);
                let (x, y) = (sample_hvec(&mut rng, n), sample_hvec(&mut rng, n));
                (g.eval(&z, &x, &y) - g.closed_form(&z, &x, &y)).abs() / scaled(&x, &y)
            })
        },
    );

    job.check(
        Claim::new("metric.origin", "g_a at the origin is the euclidean metric"),
        1e-14,
        || {
            let gram = g.gram_at(&QVector::zeros(n));
            (0..d * d)
                .map(|k| (gram[k] - if k / d == k % d { 1.0 } else { 0.0 }).abs())
                .collect()
        },
    );

    job.check(
        Claim::new(
            "metric.symmetric_hermitian",
            "g_a is symmetric and J_α-Hermitian",
        ),
        1e-10,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "metric.symmetric_hermitian", s);
                let z = sample_z(&mut rng, n);
                let (x, y) = (sample_hvec(&mut rng, n), sample_hvec(&mut rng, n));
                let gxy = g.eval(&z, &x, &y);
                let mut r = (gxy - g.eval(&z, &y, &x)).abs();
                for al in 1..=3 {
                    r = r.max((g.eval(&z, &j_hat(al, &x), &j_hat(al, &y)) - gxy).abs());
                }
                r / scaled(&x, &y)
            })
        },
    );

    job.check(
        Claim::new(
            "metric.lift_independence",
            "the value does not depend on α or on the lift point over z",
        ),
        1e-10,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "metric.lift_independence", s);
                let p = sample_point(&mut rng, n);
                let (x, y) = (sample_hvec(&mut rng, n), sample_hvec(&mut rng, n));
                let base = g.eval(&p.z, &x, &y);
                (1..=3)
                    .map(|al| (g.eval_at(al, &p, &x, &y) - base).abs())
                    .fold(0.0, f64::max)
                    / scaled(&x, &y)
            })
        },
    );

    job.check(
        Claim::new(
            "metric.positive_definite",
            "g_a is positive definite; its eigenvalues all equal f(z)",
        ),
        1e-10,
        || {
            par_samples(count.min(200), |s| {
                let mut rng = sample_rng(seed, "metric.positive_definite", s);
                let z = sample_z(&mut rng, n);
                let gram = g.gram_at(&z);
                let neg: Vec<f64> = gram.iter().map(|v| -v).collect();
                let f = f_eval(a, &z);
                let (lo, hi) = (min_eigenvalue(&gram, d), -min_eigenvalue(&neg, d));
                if lo <= 0.0 {
                    f64::INFINITY
                } else {
                    ((lo - f).abs()).max((hi - f).abs()) / f
                }
            })
        },
    );

    job.check(
        Claim::new(
            "metric.tau",
            "τ_α(z) = z e^{i_α a|z|²/2}: norm preserving, invertible, analytic differential",
        ),
        1e-12,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "metric.tau", s);
                let z = sample_z(&mut rng, n);
                let x = sample_hvec(&mut rng, n);
                let mut r = 0.0f64;
                for al in 1..=3 {
                    let tz = tau(al, a, &z);
                    r = r.max(rel(tz.norm(), z.norm()));
                    r = r.max(rel_vec(&tau_inv(al, a, &tz).to_reals(), &z.to_reals()));
                    let lhs = tau_diff(al, a, &z, &x).to_reals();
                    r = r.max(rel_vec(&lhs, &tau_diff_dual(al, a, &z, &x).to_reals()));
                }
                r
            })
        },
    );

    omega_checks(job, "metric", count);

    job.record(
        Claim::new(
            "metric.j_hat_vs_standard",
            "descended Ĵ_α = L(J_α L⁻¹·) against the standard J_α on ℍⁿ",
        )
        .note("max over α of |Ĵ_α û − J_α û| / |û|"),
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "metric.j_hat_vs_standard", s);
                let w = sample_z(&mut rng, n);
                let u = sample_hvec(&mut rng, n);
                (1..=3)
                    .map(|al| descended_j(al, a, &w, &u).sub(&j_hat(al, &u)).norm() / u.norm())
                    .fold(0.0, f64::max)
            })
        },
    );

    job.check(
        Claim::new(
            "metric.omega_j_invariance",
            "Ω_α(Ĵ_αu, Ĵ_αv) = Ω_α(u, v) for the descended Ĵ_α",
        ),
        1e-9,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "metric.omega_j_invariance", s);
                let w = sample_z(&mut rng, n);
                let (u, v) = (sample_hvec(&mut rng, n), sample_hvec(&mut rng, n));
                (1..=3)
                    .map(|al| {
                        let form = DescendedForm::new(n, al, a).expect("valid parameters");
                        let jj = form.eval(&w, &form.j_hat(&w, &u), &form.j_hat(&w, &v));
                        rel(jj, form.eval(&w, &u, &v))
                    })
                    .fold(0.0, f64::max)
            })
        },
    );
    Ok(())
}

/// Well-definedness of `Ω_α` and `π_α^*Ω_α = dη_α`, under the claim-id prefix `group`.
pub(super) fn omega_checks(job: &Job, group: &str, count: usize) {
    let (n, a, seed) = (job.n(), job.a(), job.seed());
    let (wd, pb) = (
        format!("{group}.omega_well_defined"),
        format!("{group}.omega_pullback"),
    );
    job.check(
        Claim::new(&wd, "Ω_α is independent of the preimage in the ρ_α-orbit")
            .note("two preimages per sample: the lift point over w and a random ρ_α translate"),
        1e-9,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "omega_well_defined", s);
                let w = sample_z(&mut rng, n);
                let (u, v) = (sample_hvec(&mut rng, n), sample_hvec(&mut rng, n));
                (1..=3)
                    .map(|al| {
                        let p1 = MPoint::over(w.clone());
                        let t = [gaussian(&mut rng), gaussian(&mut rng), gaussian(&mut rng)];
                        let p2 = rho_act(a, SolvableIndex { alpha: al, t }, &p1);
                        let v1 = omega_descended_at(al, a, &p1, &u, &v);
                        let v2 = omega_descended_at(al, a, &p2, &u, &v);
                        (v1 - v2).abs() / scaled(&u, &v)
                    })
                    .fold(0.0, f64::max)
            })
        },
    );

    job.check(
        Claim::new(&pb, "π_α^*Ω_α = dη_α on all of Tℳ"),
        1e-9,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "omega_pullback", s);
                let p = sample_point(&mut rng, n);
                let (x, y) = (mvec(&mut rng, n), mvec(&mut rng, n));
                (1..=3)
                    .map(|al| {
                        let proj = |m: &MPoint<Dual<f64>>| {
                            let mut out = MPoint::identity(n);
                            out.z = pi_alpha(al, a, m);
                            out
                        };
                        let px = pushforward(proj, &p, &x).dz;
                        let py = pushforward(proj, &p, &y).dz;
                        let lhs = omega_descended(al, a, &pi_alpha(al, a, &p), &px, &py);
                        rel(lhs, d_eta_eval(a, al, &p, &x, &y))
                    })
                    .fold(0.0, f64::max)
            })
        },
    );
}
