use rand::Rng;

use super::forms::{hvec, mvec, push_em};
use super::{par_samples, rel, rel_vec, Claim, Job};
use crate::error::Result;
use crate::forms::{d_eta_eval, eta_vec, f_eval, j_lift};
use crate::heisenberg::{em_act, EMElement, MPoint, MTangent};
use crate::quatlib::{random_sp_n, QVector, Quaternion, UnitQuaternion};
use crate::sampling::{sample_isotropy, sample_point, sample_rng};

fn central<R: Rng>(rng: &mut R) -> [f64; 3] {
    [
        rng.random::<f64>() - 0.5,
        rng.random::<f64>() - 0.5,
        rng.random::<f64>() - 0.5,
    ]
    .map(|x| 4.0 * x)
}

/// `dη₁(J₁X, Y)` at `p`.
fn g1(a: f64, p: &MPoint<f64>, x: &MTangent<f64>, y: &MTangent<f64>) -> f64 {
    d_eta_eval(a, 1, p, &j_lift(1, p, x), y)
}

pub(super) fn run(job: &Job) -> Result<()> {
    let (n, a, seed, count) = (job.n(), job.a(), job.seed(), job.samples());

    job.check(
        Claim::new("invariance.f", "ℝ³⋊Sp(n)·Sp(1) leaves f invariant"),
        1e-12,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "invariance.f", s);
                let mut h = sample_isotropy(&mut rng, n);
                h.t = central(&mut rng);
                let p = sample_point(&mut rng, n);
                rel(
                    f_eval(a, &em_act(&h, &p).expect("same n").z),
                    f_eval(a, &p.z),
                )
            })
        },
    );

    job.check(
        Claim::new("invariance.eta", "h^*η_α = η_α for h ∈ ℝ³ × Sp(n)"),
        1e-10,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "invariance.eta", s);
                let am = random_sp_n(&mut rng, n).expect("nondegenerate draw");
                let h = EMElement::new(
                    central(&mut rng),
                    QVector::zeros(n),
                    am,
                    UnitQuaternion::identity(),
                )
                .expect("valid element");
                let p = sample_point(&mut rng, n);
                let v = mvec(&mut rng, n);
                let hp = em_act(&h, &p).expect("same n");
                rel_vec(&eta_vec(a, &hp, &push_em(&h, &p, &v)), &eta_vec(a, &p, &v))
            })
        },
    );

    job.check(
        Claim::new(
            "invariance.d_eta_j",
            "h^*(dη₁∘J₁) = dη₁∘J₁ on 𝖣 for h ∈ ℝ³⋊Sp(n)·Sp(1)",
        )
        .note("α is drawn uniformly from Sp(1), so α ≠ ±1 almost surely"),
        1e-10,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "invariance.d_eta_j", s);
                let mut h = sample_isotropy(&mut rng, n);
                h.t = central(&mut rng);
                let p = sample_point(&mut rng, n);
                let (x, y) = (hvec(&mut rng, &p), hvec(&mut rng, &p));
                let hp = em_act(&h, &p).expect("same n");
                rel(
                    g1(a, &hp, &push_em(&h, &p, &x), &push_em(&h, &p, &y)),
                    g1(a, &p, &x, &y),
                )
            })
        },
    );

    job.witness(
        Claim::new(
            "invariance.translation_witness",
            "left translation by (0, e₁) does not preserve dη₁∘J₁",
        )
        .note("the value is max |h^*(dη₁∘J₁)(X, Y) − dη₁∘J₁(X, Y)| over horizontal X, Y"),
        0.01,
        || {
            let mut u = QVector::zeros(n);
            u[0] = Quaternion::one();
            let h = EMElement::translation([0.0; 3], u);
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "invariance.translation_witness", s);
                let p = sample_point(&mut rng, n);
                let (x, y) = (hvec(&mut rng, &p), hvec(&mut rng, &p));
                let hp = em_act(&h, &p).expect("same n");
                (g1(a, &hp, &push_em(&h, &p, &x), &push_em(&h, &p, &y)) - g1(a, &p, &x, &y)).abs()
            })
        },
    );
    Ok(())
}
