use num_complex::Complex64;

use super::{par_samples, rel, Claim, Job};
use crate::diffgeo::{bochner_tensor, nabla_j, Backend, MetricField};
use crate::error::Result;
use crate::heisenberg::{m_mul, rho_act, SolvableIndex};
use crate::metric::{pi_alpha, tau, tau_diff_dual, GaMetric};
use crate::quatlib::{imag_unit, QVector};
use crate::quotients::{
    apply_unitary, c_from_reals, eta_hat1, eta_n, j_prime_c, n_alpha_gap, n_mul, omega_hat1,
    omega_n, p1_n, p_alpha, phi_hat, phi_iso, phi_tangent, pi_hat, pi_hat_alpha, quotient_mul,
    random_unitary, rho_n, section_h, section_table_residual, xi_n, GNMetric, NComplexStructure,
    QuotientTangent,
};
use crate::sampling::{gaussian, gaussian_vec, sample_hvec, sample_point, sample_rng, sample_z};

fn bochner_point(seed: u64, s: u64) -> Vec<f64> {
    let mut rng = sample_rng(seed, "quotients.bochner", s);
    gaussian_vec(&mut rng, 4)
        .into_iter()
        .map(|v| 0.6 * v)
        .collect()
}

fn cnorm_sqr(u: &[Complex64]) -> f64 {
    u.iter().map(|c| c.norm_sqr()).sum()
}

fn cdist(u: &[Complex64], v: &[Complex64]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `dτ₁(X̂)` by the chosen backend.
fn tau_diff_by(b: Backend, a: f64, z: &QVector<f64>, x: &QVector<f64>) -> QVector<f64> {
    match b {
        Backend::Dual => tau_diff_dual(1, a, z, x),
        Backend::Fd { h, .. } => tau(1, a, &z.add(&x.scale(h)))
            .sub(&tau(1, a, &z.sub(&x.scale(h))))
            .scale(0.5 / h),
    }
}

pub(super) fn run(job: &Job) -> Result<()> {
    let (n, a, seed, count) = (job.n(), job.a(), job.seed(), job.samples());
    let gn = GNMetric::new(n, a)?;
    let g = GaMetric::new(n, a)?;

    job.check(
        Claim::new(
            "quotients.section_table",
            "𝗁_{α*}(J_β v_k) against the tabulated frame images, α = 1, 2, 3",
        ),
        1e-10,
        || {
            par_samples(count, |s| {
                let z = sample_z(&mut sample_rng(seed, "quotients.section_table", s), n);
                (1..=3)
                    .map(|al| section_table_residual(al, &z))
                    .fold(0.0, f64::max)
            })
        },
    );

    job.check(
        Claim::new(
            "quotients.section_image",
            "𝗁_α(z) = (−|z|²/2, z i_α) lies in 𝒩_α",
        )
        .note("value = |t_α + |z|²/2| / (1 + |z|²)"),
        1e-12,
        || {
            par_samples(count, |s| {
                let z = sample_z(&mut sample_rng(seed, "quotients.section_image", s), n);
                (1..=3)
                    .map(|al| n_alpha_gap(&section_h(al, &z)) / (1.0 + z.norm_sqr()))
                    .fold(0.0, f64::max)
            })
        },
    );

    job.check(
        Claim::new(
            "quotients.law_descends",
            "p_α is a homomorphism onto ℳ/ℝ² with its induced group law",
        ),
        1e-10,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "quotients.law_descends", s);
                let (p, q) = (sample_point(&mut rng, n), sample_point(&mut rng, n));
                let pq = m_mul(&p, &q).expect("same n");
                (1..=3)
                    .map(|al| {
                        let lhs = p_alpha(al, &pq);
                        let rhs = quotient_mul(&p_alpha(al, &p), &p_alpha(al, &q))
                            .expect("same quotient");
                        rel(lhs.t, rhs.t).max(lhs.z.sub(&rhs.z).norm())
                    })
                    .fold(0.0, f64::max)
            })
        },
    );

    job.check(
        Claim::new("quotients.projections", "π = π̂∘p_α and π_α = π̂_α∘p_α"),
        1e-12,
        || {
            par_samples(count, |s| {
                let p = sample_point(&mut sample_rng(seed, "quotients.projections", s), n);
                (1..=3)
                    .map(|al| {
                        let q = p_alpha(al, &p);
                        let r1 = pi_hat(&q).sub(&p.z).norm();
                        let r2 = pi_hat_alpha(a, &q).sub(&pi_alpha(al, a, &p)).norm();
                        r1.max(r2) / (1.0 + p.z.norm())
                    })
                    .fold(0.0, f64::max)
            })
        },
    );

    job.check(
        Claim::new(
            "quotients.phi_homomorphism",
            "φ(a, z + wj) = (a, (z, w̄)) is a homomorphism ℳ/ℝ² → 𝒩",
        )
        .note("α = 1 quotient; residual relative to 1 + |t| + |t′| + |z||z′|"),
        1e-12,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "quotients.phi_homomorphism", s);
                let p = p_alpha(1, &sample_point(&mut rng, n));
                let q = p_alpha(1, &sample_point(&mut rng, n));
                let lhs = phi_iso(&quotient_mul(&p, &q).expect("same quotient")).expect("α = 1");
                let rhs = n_mul(&phi_iso(&p).expect("α = 1"), &phi_iso(&q).expect("α = 1"))
                    .expect("same n");
                lhs.dist(&rhs) / (1.0 + p.t.abs() + q.t.abs() + p.z.norm() * q.z.norm())
            })
        },
    );

    job.check(
        Claim::new(
            "quotients.phi_forms",
            "φ^*ω_𝒩 = ω̂₁, φ^*η_𝒩 = η̂₁ and ω_𝒩(ξ) = 1 + a|u|²",
        ),
        1e-10,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "quotients.phi_forms", s);
                let q = p_alpha(1, &sample_point(&mut rng, n));
                let v = QuotientTangent {
                    dt: gaussian(&mut rng),
                    dz: sample_hvec(&mut rng, n),
                };
                let (np, nv) = (phi_iso(&q).expect("α = 1"), phi_tangent(&v));
                let r1 = rel(omega_n(&np, &nv), omega_hat1(&q, &v));
                let r2 = rel(eta_n(a, &np, &nv), eta_hat1(a, &q, &v));
                let r3 = rel(omega_n(&np, &xi_n(a, &np)), 1.0 + a * cnorm_sqr(&np.u));
                r1.max(r2).max(r3)
            })
        },
    );

    job.check(
        Claim::new(
            "quotients.psi_intertwines",
            "φ̂∘π̂₁ = p_{1𝒩}∘φ and φ∘ρ₁(t) = ρ(t)∘φ",
        ),
        1e-10,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "quotients.psi_intertwines", s);
                let p = sample_point(&mut rng, n);
                let q = p_alpha(1, &p);
                let r1 = cdist(
                    &phi_hat(&pi_hat_alpha(a, &q)),
                    &p1_n(a, &phi_iso(&q).expect("α = 1")),
                );
                let t = gaussian(&mut rng);
                let moved = rho_act(
                    a,
                    SolvableIndex {
                        alpha: 1,
                        t: [t, 0.0, 0.0],
                    },
                    &p,
                );
                let lhs = phi_iso(&p_alpha(1, &moved)).expect("α = 1");
                let rhs = rho_n(a, t, &phi_iso(&q).expect("α = 1"));
                r1.max(lhs.dist(&rhs)) / (1.0 + p.z.norm() + p.t[0].abs())
            })
        },
    );

    job.check(
        Claim::new(
            "quotients.anti_holomorphy",
            "φ̂_*(J₁X̂) = J′_ℂ φ̂_*(X̂) with J′_ℂ = multiplication by ī",
        ),
        1e-10,
        || {
            par_samples(count, |s| {
                let x = sample_hvec(&mut sample_rng(seed, "quotients.anti_holomorphy", s), n);
                let lhs = phi_hat(&x.right_mul(imag_unit(1).conj()));
                cdist(&lhs, &j_prime_c(&phi_hat(&x))) / x.norm().max(1e-300)
            })
        },
    );

    job.check(
        Claim::new(
            "quotients.gn_unitary_invariance",
            "g_𝒩 is invariant under U(2n) acting on ℂ^{2n}",
        )
        .note("residual relative to |X||Y|"),
        1e-10,
        || {
            let m = 2 * n;
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "quotients.gn_unitary_invariance", s);
                let u = random_unitary(&mut rng, m);
                let w = c_from_reals(&gaussian_vec(&mut rng, 2 * m));
                let x = c_from_reals(&gaussian_vec(&mut rng, 2 * m));
                let y = c_from_reals(&gaussian_vec(&mut rng, 2 * m));
                let lhs = gn.eval(
                    &apply_unitary(&u, m, &w),
                    &apply_unitary(&u, m, &x),
                    &apply_unitary(&u, m, &y),
                );
                (lhs - gn.eval(&w, &x, &y)).abs()
                    / (cnorm_sqr(&x) * cnorm_sqr(&y)).sqrt().max(1e-300)
            })
        },
    );

    job.check(
        Claim::new(
            "quotients.gn_closed_form",
            "g_𝒩(û, v̂) = f(w) Re⟨L⁻¹û, L⁻¹v̂⟩, normalized to δ at the origin",
        )
        .note("also checks g_𝒩(0) = δ"),
        1e-10,
        || {
            let m = 2 * n;
            let d = 2 * m;
            let gram = gn.gram(&vec![0.0; d]);
            let mut out: Vec<f64> = (0..d * d)
                .map(|k| (gram[k] - if k / d == k % d { 1.0 } else { 0.0 }).abs())
                .collect();
            out.extend(par_samples(count, |s| {
                let mut rng = sample_rng(seed, "quotients.gn_closed_form", s);
                let w = c_from_reals(&gaussian_vec(&mut rng, d));
                let x = c_from_reals(&gaussian_vec(&mut rng, d));
                let y = c_from_reals(&gaussian_vec(&mut rng, d));
                (gn.eval(&w, &x, &y) - gn.closed_form(&w, &x, &y)).abs()
                    / (cnorm_sqr(&x) * cnorm_sqr(&y)).sqrt().max(1e-300)
            }));
            out
        },
    );

    job.record(
        Claim::new(
            "quotients.gn_normalization",
            "convention factor of dη_𝒩(J_𝒩·, ·) at the origin",
        )
        .note(
            "value = |c|; c is negative since J_𝒩 = i pairs with dω_𝒩 to a negative definite form",
        ),
        || vec![gn.normalization().abs()],
    );

    job.check(
        Claim::new(
            "quotients.gn_hermitian",
            "g_𝒩 is Hermitian for Ĵ = L(i L⁻¹·) and Ĵ² = −1",
        )
        .note("residual relative to |X||Y|"),
        1e-10,
        || {
            let d = 4 * n;
            let j = NComplexStructure { n, a };
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "quotients.gn_hermitian", s);
                let w = c_from_reals(&gaussian_vec(&mut rng, d));
                let x = c_from_reals(&gaussian_vec(&mut rng, d));
                let y = c_from_reals(&gaussian_vec(&mut rng, d));
                let (jx, jy) = (j.apply(&w, &x), j.apply(&w, &y));
                let scale = (cnorm_sqr(&x) * cnorm_sqr(&y)).sqrt().max(1e-300);
                let herm = (gn.eval(&w, &jx, &jy) - gn.eval(&w, &x, &y)).abs() / scale;
                let jj: Vec<Complex64> = j
                    .apply(&w, &jx)
                    .iter()
                    .zip(&x)
                    .map(|(p, q)| p + q)
                    .collect();
                herm.max(cnorm_sqr(&jj).sqrt() / cnorm_sqr(&x).sqrt().max(1e-300))
            })
        },
    );

    let anti = |tag: &'static str, sign: f64| {
        move |b: Backend| {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, tag, s);
                let z = sample_z(&mut rng, n);
                let (x, y) = (sample_hvec(&mut rng, n), sample_hvec(&mut rng, n));
                let w = phi_hat(&tau(1, a, &z));
                let lhs = gn.eval(
                    &w,
                    &phi_hat(&tau_diff_by(b, a, &z, &x)),
                    &phi_hat(&tau_diff_by(b, a, &z, &y)),
                );
                (lhs - sign * g.eval(&z, &x, &y)).abs() / (x.norm() * y.norm()).max(1e-300)
            })
        }
    };
    job.measure(
        Claim::new("quotients.antimetric_plus", "(ψ∘τ₁)^*g_𝒩 against +g_a")
            .note("value = |(ψ∘τ₁)^*g_𝒩(X̂, Ŷ) − g_a(X̂, Ŷ)| / (|X̂||Ŷ|); dτ₁ by each backend"),
        anti("quotients.antimetric", 1.0),
    );
    job.measure(
        Claim::new("quotients.antimetric_minus", "(ψ∘τ₁)^*g_𝒩 against −g_a").note(
            "value = |(ψ∘τ₁)^*g_𝒩(X̂, Ŷ) + g_a(X̂, Ŷ)| / (|X̂||Ŷ|); same samples as antimetric_plus",
        ),
        anti("quotients.antimetric", -1.0),
    );

    if n == 1 {
        let j = NComplexStructure { n, a };
        job.measure(
            Claim::new("quotients.gn_nabla_j", "‖∇Ĵ‖ for g_𝒩 on ℂ², Ĵ = L(i L⁻¹·)")
                .note("Ĵ is the image of J_𝒩 = i on horizontal preimages"),
            |b| {
                par_samples(job.curvature_samples(), |s| {
                    let x = bochner_point(seed, s);
                    nabla_j(&gn, &j, &x, b).unwrap_or(f64::NAN)
                })
            },
        );
        job.measure(
            Claim::new(
                "quotients.bochner",
                "Bochner tensor norm of the Kähler metric (g_𝒩, Ĵ) on ℂ²",
            )
            .note("value = ‖B‖ / ‖Riem‖; real coordinates (Re u₁, Im u₁, Re u₂, Im u₂)"),
            |b| {
                par_samples(job.curvature_samples(), |s| {
                    let x = bochner_point(seed, s);
                    bochner_tensor(&gn, &j, &x, b)
                        .map(|r| r.norm / r.riemann_norm.max(1e-300))
                        .unwrap_or(f64::NAN)
                })
            },
        );
        job.measure(
            Claim::new(
                "quotients.gn_riemann_norm",
                "‖Riem(g_𝒩)‖ at the Bochner sample points",
            )
            .note("scale for quotients.bochner"),
            |b| {
                par_samples(job.curvature_samples(), |s| {
                    let x = bochner_point(seed, s);
                    bochner_tensor(&gn, &j, &x, b)
                        .map(|r| r.riemann_norm)
                        .unwrap_or(f64::NAN)
                })
            },
        );
    }
    Ok(())
}
