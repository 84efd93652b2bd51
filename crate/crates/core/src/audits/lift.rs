use super::{par_samples, Claim, Job};
use crate::error::Result;
use crate::forms::{lift_components, omega_vec};
use crate::heisenberg::{pushforward, MPoint};
use crate::quatlib::{herm_inner, random_sp_n, QMatrix, QVector, UnitQuaternion};
use crate::quotients::{lift_map, HMap, LinearIsometry};
use crate::sampling::{sample_hvec, sample_point, sample_rng};

/// Max over the three components of `ω(h̃_*V)` for horizontal `V` over `p`, relative to `|z||dz|`,
/// together with the predicted value `Im(α m ᾱ − m)`, `m = ⟨z, dz⟩`.
fn d_defect(h: &LinearIsometry, p: &MPoint<f64>, dz: &QVector<f64>) -> (f64, f64) {
    let v = lift_components(p, dz);
    let pushed = pushforward(|m| lift_map(h, m), p, &v);
    let w = omega_vec(&lift_map(h, p), &pushed);
    let m = herm_inner(&p.z, dz).expect("same n");
    let al = h.alpha.get();
    let predicted = (al * m * al.conj() - m).im();
    let scale = (p.z.norm() * dz.norm()).max(1e-300);
    let defect = w.iter().map(|c| c.abs()).fold(0.0, f64::max) / scale;
    let formula = w
        .iter()
        .zip(predicted)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / scale;
    (defect, formula)
}

fn sample_h<R: rand::Rng>(
    rng: &mut R,
    n: usize,
    sp_only: bool,
    right_only: bool,
) -> LinearIsometry {
    let a = if right_only {
        QMatrix::identity(n)
    } else {
        random_sp_n(rng, n).expect("nondegenerate draw")
    };
    let alpha = if sp_only {
        UnitQuaternion::identity()
    } else {
        UnitQuaternion::random(rng)
    };
    LinearIsometry { a, alpha }
}

pub(super) fn run(job: &Job) -> Result<()> {
    let (n, seed, count) = (job.n(), job.seed(), job.samples());

    job.check(
        Claim::new(
            "lift.diagram",
            "the lift h̃ through the slice 𝒩₀ satisfies π∘h̃ = h∘π",
        )
        .note("h = (z ↦ Azᾱ), A ∈ Sp(n), α ∈ Sp(1)"),
        1e-12,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "lift.diagram", s);
                let h = sample_h(&mut rng, n, false, false);
                let p = sample_point(&mut rng, n);
                lift_map(&h, &p).z.sub(&h.apply(&p.z)).norm() / (1.0 + p.z.norm())
            })
        },
    );

    job.check(
        Claim::new("lift.identity", "the lift of the identity is the identity"),
        1e-12,
        || {
            let id = LinearIsometry {
                a: QMatrix::identity(n),
                alpha: UnitQuaternion::identity(),
            };
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "lift.identity", s);
                let p = sample_point(&mut rng, n);
                let q = lift_map(&id, &p);
                q.to_flat()
                    .iter()
                    .zip(p.to_flat())
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max)
                    / (1.0 + p.z.norm_sqr())
            })
        },
    );

    job.check(
        Claim::new("lift.preserves_d", "h̃_*𝖣 = 𝖣 for h = (z ↦ Azᾱ), A ∈ Sp(n), α ∈ Sp(1)")
            .note("value = |ω(h̃_*V)| / (|z||dz|) for horizontal V; ω(h̃_*V) = Im(αmᾱ − m), m = ⟨z, dz⟩, which vanishes only for α = ±1"),
        1e-9,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "lift.preserves_d", s);
                let h = sample_h(&mut rng, n, false, false);
                let p = sample_point(&mut rng, n);
                d_defect(&h, &p, &sample_hvec(&mut rng, n)).0
            })
        },
    );

    job.check(
        Claim::new(
            "lift.preserves_d_sp_n",
            "h̃_*𝖣 = 𝖣 for h = (z ↦ Az), A ∈ Sp(n)",
        ),
        1e-9,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "lift.preserves_d_sp_n", s);
                let h = sample_h(&mut rng, n, true, false);
                let p = sample_point(&mut rng, n);
                d_defect(&h, &p, &sample_hvec(&mut rng, n)).0
            })
        },
    );

    job.check(
        Claim::new(
            "lift.preserves_d_right",
            "h̃_*𝖣 = 𝖣 for h = (z ↦ zᾱ), α ∈ Sp(1)",
        )
        .note("same defect as lift.preserves_d with A = 1"),
        1e-9,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "lift.preserves_d_right", s);
                let h = sample_h(&mut rng, n, false, true);
                let p = sample_point(&mut rng, n);
                d_defect(&h, &p, &sample_hvec(&mut rng, n)).0
            })
        },
    );

    job.check(
        Claim::new(
            "lift.defect_formula",
            "ω(h̃_*V) = Im(αmᾱ − m), m = ⟨z, dz⟩, for horizontal V",
        )
        .note("residual relative to |z||dz|"),
        1e-12,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "lift.defect_formula", s);
                let h = sample_h(&mut rng, n, false, false);
                let p = sample_point(&mut rng, n);
                d_defect(&h, &p, &sample_hvec(&mut rng, n)).1
            })
        },
    );
    Ok(())
}
