use super::{par_samples, rel_vec, Claim, Job};
use crate::error::Result;
use crate::heisenberg::{em_act, m_inv, m_mul, EMElement, MPoint};
use crate::quatlib::{imag_unit, random_sp_n, so3_from_unit, Quaternion, UnitQuaternion};
use crate::sampling::{sample_em, sample_point, sample_quaternion, sample_rng};

const TOL: f64 = 1e-12;

fn q_rel(p: Quaternion, q: Quaternion) -> f64 {
    rel_vec(&p.to_array(), &q.to_array())
}

fn m_rel(p: &MPoint, q: &MPoint) -> f64 {
    rel_vec(&p.to_flat(), &q.to_flat())
}

pub(super) fn run(job: &Job) -> Result<()> {
    let n = job.n();
    let seed = job.seed();
    let count = job.samples();

    job.check(
        Claim::new(
            "algebra.quaternion_units",
            "defining relations i² = j² = k² = ijk = −1",
        ),
        TOL,
        || {
            let (i, j, k) = (imag_unit(1), imag_unit(2), imag_unit(3));
            let m1 = Quaternion::real(-1.0);
            vec![
                q_rel(i * i, m1),
                q_rel(j * j, m1),
                q_rel(k * k, m1),
                q_rel(i * j * k, m1),
            ]
        },
    );

    job.check(
        Claim::new(
            "algebra.quaternion_associativity",
            "quaternion product is associative",
        ),
        TOL,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "algebra.quaternion_associativity", s);
                let (p, q, r) = (
                    sample_quaternion(&mut rng),
                    sample_quaternion(&mut rng),
                    sample_quaternion(&mut rng),
                );
                q_rel((p * q) * r, p * (q * r))
            })
        },
    );

    job.check(
        Claim::new(
            "algebra.quaternion_norm",
            "|pq| = |p||q| and conj(pq) = q̄ p̄",
        ),
        TOL,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "algebra.quaternion_norm", s);
                let (p, q) = (sample_quaternion(&mut rng), sample_quaternion(&mut rng));
                let nm =
                    ((p * q).norm() - p.norm() * q.norm()).abs() / (p.norm() * q.norm()).max(1.0);
                nm.max(q_rel((p * q).conj(), q.conj() * p.conj()))
            })
        },
    );

    job.check(
        Claim::new(
            "algebra.so3_homomorphism",
            "Sp(1) → SO(3), α ↦ (a_{βγ}) with α i_β ᾱ = Σ a_{βγ} i_γ",
        )
        .note("rows hold the images of i_β, so the matrix of a product is M_b·M_a"),
        TOL,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "algebra.so3_homomorphism", s);
                let (a, b) = (
                    UnitQuaternion::random(&mut rng),
                    UnitQuaternion::random(&mut rng),
                );
                let (ma, mb, mab) = (so3_from_unit(a), so3_from_unit(b), so3_from_unit(a * b));
                let mut r = 0.0f64;
                for i in 0..3 {
                    for j in 0..3 {
                        let prod: f64 = (0..3).map(|k| mb[i][k] * ma[k][j]).sum();
                        let gram: f64 = (0..3).map(|k| ma[i][k] * ma[j][k]).sum();
                        let id = if i == j { 1.0 } else { 0.0 };
                        r = r.max((prod - mab[i][j]).abs()).max((gram - id).abs());
                    }
                }
                let det = ma[0][0] * (ma[1][1] * ma[2][2] - ma[1][2] * ma[2][1])
                    - ma[0][1] * (ma[1][0] * ma[2][2] - ma[1][2] * ma[2][0])
                    + ma[0][2] * (ma[1][0] * ma[2][1] - ma[1][1] * ma[2][0]);
                r.max((det - 1.0).abs())
            })
        },
    );

    job.check(
        Claim::new("algebra.sp_n", "sampled A satisfies A*A = I"),
        TOL,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "algebra.sp_n", s);
                random_sp_n(&mut rng, n)
                    .map(|a| a.symplectic_residual())
                    .unwrap_or(f64::INFINITY)
            })
        },
    );

    job.check(
        Claim::new(
            "algebra.group_axioms",
            "ℳ group law: associativity, identity, inverse",
        ),
        TOL,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "algebra.group_axioms", s);
                let (p, q, r) = (
                    sample_point(&mut rng, n),
                    sample_point(&mut rng, n),
                    sample_point(&mut rng, n),
                );
                let e = MPoint::identity(n);
                let mul = |x: &MPoint, y: &MPoint| m_mul(x, y).expect("same n");
                let assoc = m_rel(&mul(&mul(&p, &q), &r), &mul(&p, &mul(&q, &r)));
                let unit = m_rel(&mul(&e, &p), &p).max(m_rel(&mul(&p, &e), &p));
                let inv = m_rel(&mul(&p, &m_inv(&p)), &e).max(m_rel(&mul(&m_inv(&p), &p), &e));
                assoc.max(unit).max(inv)
            })
        },
    );

    job.check(
        Claim::new("algebra.center", "ℝ³ × {0} is central in ℳ"),
        TOL,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "algebra.center", s);
                let p = sample_point(&mut rng, n);
                let mut c = sample_point(&mut rng, n);
                c.z = crate::quatlib::QVector::zeros(n);
                m_rel(
                    &m_mul(&c, &p).expect("same n"),
                    &m_mul(&p, &c).expect("same n"),
                )
            })
        },
    );

    job.check(
        Claim::new(
            "algebra.action_laws",
            "E(ℳ) acts: identity acts trivially, h₁(h₂p) = (h₁h₂)p",
        ),
        TOL,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "algebra.action_laws", s);
                let (h1, h2) = (sample_em(&mut rng, n), sample_em(&mut rng, n));
                let p = sample_point(&mut rng, n);
                let act = |h: &EMElement, x: &MPoint| em_act(h, x).expect("same n");
                let comp = m_rel(&act(&h1, &act(&h2, &p)), &act(&h1.compose(&h2), &p));
                comp.max(m_rel(&act(&EMElement::identity(n), &p), &p))
            })
        },
    );

    job.check(
        Claim::new(
            "algebra.action_automorphism",
            "z ↦ Azᾱ, s ↦ αsᾱ is an automorphism of ℳ",
        ),
        TOL,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "algebra.action_automorphism", s);
                let h = sample_em(&mut rng, n);
                let (p, q) = (sample_point(&mut rng, n), sample_point(&mut rng, n));
                let pq = m_mul(&p, &q).expect("same n");
                let rhs = m_mul(&h.automorphism(&p), &h.automorphism(&q)).expect("same n");
                m_rel(&h.automorphism(&pq), &rhs)
            })
        },
    );
    Ok(())
}
