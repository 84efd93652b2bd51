use super::{par_samples, rel_vec, Claim, Job};
use crate::diffgeo::{riemann_ricci, Backend};
use crate::error::Result;
use crate::metric::GaMetric;
use crate::quatlib::{random_sp_n, QVector, Quaternion, UnitQuaternion};
use crate::quotients::{HMap, LinearIsometry};
use crate::sampling::{sample_hvec, sample_rng, sample_z};

/// Points where curvature invariants are reported.
pub(super) fn curvature_points() -> Vec<Vec<f64>> {
    vec![
        vec![0.0, 0.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.5, -0.5, 0.5, 0.5],
        vec![0.0, 1.5, 0.0, 0.0],
        vec![0.3, 0.2, -1.1, 0.7],
    ]
}

pub(super) fn riemann_sq(a: f64, x: &[f64], b: Backend) -> f64 {
    let g = GaMetric::new(1, a).expect("a validated");
    riemann_ricci(&g, x, b)
        .expect("positive definite")
        .riemann_norm_sq()
}

fn sample_isometry<R: rand::Rng>(rng: &mut R, n: usize) -> LinearIsometry {
    LinearIsometry {
        a: random_sp_n(rng, n).expect("nondegenerate draw"),
        alpha: UnitQuaternion::random(rng),
    }
}

pub(super) fn run(job: &Job) -> Result<()> {
    let (n, a, seed, count) = (job.n(), job.a(), job.seed(), job.samples());
    let g = GaMetric::new(n, a)?;

    job.check(
        Claim::new(
            "isometry.sp_invariance",
            "z ↦ Azᾱ, A ∈ Sp(n), α ∈ Sp(1), is an isometry of g_a",
        )
        .note("residual relative to |X̂||Ŷ|"),
        1e-10,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "isometry.sp_invariance", s);
                let h = sample_isometry(&mut rng, n);
                let z = sample_z(&mut rng, n);
                let (x, y) = (sample_hvec(&mut rng, n), sample_hvec(&mut rng, n));
                let lhs = g.eval(&h.apply(&z), &h.apply(&x), &h.apply(&y));
                (lhs - g.eval(&z, &x, &y)).abs() / (x.norm() * y.norm()).max(1e-300)
            })
        },
    );

    job.check(
        Claim::new(
            "isometry.linear_orthogonal",
            "z ↦ Azᾱ is linear, euclidean-orthogonal and fixes the origin",
        ),
        1e-12,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "isometry.linear_orthogonal", s);
                let h = sample_isometry(&mut rng, n);
                let (z, w) = (sample_z(&mut rng, n), sample_z(&mut rng, n));
                let origin = h.apply(&QVector::<f64>::zeros(n)).norm();
                let norm = (h.apply(&z).norm() - z.norm()).abs();
                let lin = rel_vec(
                    &h.apply(&z.add(&w)).to_reals(),
                    &h.apply(&z).add(&h.apply(&w)).to_reals(),
                );
                origin.max(norm).max(lin)
            })
        },
    );

    job.witness(
        Claim::new(
            "isometry.translation_witness",
            "translations of ℍⁿ are not isometries of g_a",
        )
        .note("translation by e₁; the value is max |g(z + e₁)(X̂, Ŷ) − g(z)(X̂, Ŷ)| / (|X̂||Ŷ|)"),
        0.01,
        || {
            let mut u = QVector::zeros(n);
            u[0] = Quaternion::one();
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "isometry.translation_witness", s);
                let z = sample_z(&mut rng, n);
                let (x, y) = (sample_hvec(&mut rng, n), sample_hvec(&mut rng, n));
                (g.eval(&z.add(&u), &x, &y) - g.eval(&z, &x, &y)).abs()
                    / (x.norm() * y.norm()).max(1e-300)
            })
        },
    );

    if n == 1 {
        job.measure(
            Claim::new("isometry.riemann_norm", "curvature invariant ‖Riem(g_a)‖² at selected points")
                .note("points 0, (1,0,0,0), (½,−½,½,½), (0,1.5,0,0), (0.3,0.2,−1.1,0.7); max/mean over points"),
            |b| curvature_points().iter().map(|x| riemann_sq(a, x, b)).collect(),
        );
    }
    Ok(())
}

/// Claims comparing the smallest and largest configured values of `a`.
pub(super) fn run_cross_a(job: &Job, a_values: &[f64]) -> Result<()> {
    if job.n() != 1 || a_values.len() < 2 {
        return Ok(());
    }
    let (lo, hi) = (a_values[0], a_values[a_values.len() - 1]);
    let x = [1.0, 0.0, 0.0, 0.0];
    job.witness(
        Claim::new("isometry.curvature_separation", "g_a and g_{a′} are not isometric for a ≠ a′")
            .note("‖Riem‖² at z = (1,0,0,0) for the smallest and largest a; value = separation / backend noise"),
        10.0,
        || {
            let dual = [riemann_sq(lo, &x, Backend::Dual), riemann_sq(hi, &x, Backend::Dual)];
            let fd = [riemann_sq(lo, &x, Backend::DEFAULT_FD), riemann_sq(hi, &x, Backend::DEFAULT_FD)];
            let noise = (dual[0] - fd[0]).abs().max((dual[1] - fd[1]).abs());
            vec![(dual[0] - dual[1]).abs() / noise.max(f64::MIN_POSITIVE)]
        },
    );
    Ok(())
}
