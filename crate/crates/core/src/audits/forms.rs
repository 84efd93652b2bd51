use nalgebra::DMatrix;
use rand::Rng;

use super::{par_samples, rel, rel_vec, Claim, Job};
use crate::diffgeo::{numeric_d, FormField};
use crate::dual::Real;
use crate::error::Result;
use crate::forms::{
    d_basis, d_eta_eval, d_omega_eval, eta_eval, eta_vec, f_eval, j_lift, lift_components,
    omega_eval, omega_vec, DBasis,
};
use crate::heisenberg::{em_act, lie_bracket, pushforward, xi_field, EMElement, MPoint, MTangent};
use crate::quatlib::{conjugate_imag, so3_from_unit, QVector, Quaternion};
use crate::sampling::{
    sample_em, sample_hvec, sample_isotropy, sample_mvec, sample_point, sample_rng,
};

/// `η_α` as a 1-form on ℝ^{4n+3}.
pub(super) struct EtaForm {
    pub n: usize,
    pub a: f64,
    pub alpha: usize,
}

impl FormField for EtaForm {
    fn dim(&self) -> usize {
        4 * self.n + 3
    }
    fn degree(&self) -> usize {
        1
    }
    fn eval<T: Real>(&self, x: &[T], v: &[Vec<T>]) -> T {
        eta_eval(
            self.a,
            self.alpha,
            &MPoint::from_flat(x),
            &MTangent::from_flat(&v[0]),
        )
    }
}

/// The analytic `dη_α` as a 2-form on ℝ^{4n+3}.
pub(super) struct DEtaForm {
    pub n: usize,
    pub a: f64,
    pub alpha: usize,
}

impl FormField for DEtaForm {
    fn dim(&self) -> usize {
        4 * self.n + 3
    }
    fn degree(&self) -> usize {
        2
    }
    fn eval<T: Real>(&self, x: &[T], v: &[Vec<T>]) -> T {
        let (p, a, b) = (
            MPoint::from_flat(x),
            MTangent::from_flat(&v[0]),
            MTangent::from_flat(&v[1]),
        );
        d_eta_eval(self.a, self.alpha, &p, &a, &b)
    }
}

pub(super) fn mvec<R: rand::Rng>(rng: &mut R, n: usize) -> MTangent<f64> {
    MTangent::from_flat(&sample_mvec(rng, n))
}

/// Horizontal lift of a random vector of ℍⁿ at `p`.
pub(super) fn hvec<R: rand::Rng>(rng: &mut R, p: &MPoint<f64>) -> MTangent<f64> {
    lift_components(p, &sample_hvec(rng, p.n()))
}

/// `h_* V` at `p`.
pub(super) fn push_em(h: &EMElement, p: &MPoint<f64>, v: &MTangent<f64>) -> MTangent<f64> {
    pushforward(|m| em_act(h, m).expect("same n"), p, v)
}

/// Cyclic successor triple `(α, β, γ)` with `i_α i_β = i_γ`.
pub(super) fn cyclic(alpha: usize) -> (usize, usize, usize) {
    (alpha, alpha % 3 + 1, (alpha + 1) % 3 + 1)
}

pub(super) fn run(job: &Job) -> Result<()> {
    let (n, a, seed, count) = (job.n(), job.a(), job.seed(), job.samples());

    job.check(
        Claim::new(
            "forms.omega_coordinates",
            "coordinate expression of ω₁, ω₂, ω₃",
        )
        .note("ω₃ slot term read as x_{4k−1}dx_{4k−2}"),
        1e-10,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "forms.omega_coordinates", s);
                let p = sample_point(&mut rng, n);
                let v = mvec(&mut rng, n);
                let (x, dx) = (p.z.to_reals(), v.dz.to_reals());
                let mut w = v.dt;
                for k in 0..n {
                    let (x1, x2, x3, x4) = (x[4 * k], x[4 * k + 1], x[4 * k + 2], x[4 * k + 3]);
                    let (d1, d2, d3, d4) = (dx[4 * k], dx[4 * k + 1], dx[4 * k + 2], dx[4 * k + 3]);
                    w[0] += x1 * d2 - x2 * d1 + x4 * d3 - x3 * d4;
                    w[1] += x1 * d3 - x3 * d1 + x2 * d4 - x4 * d2;
                    w[2] += x1 * d4 - x4 * d1 + x3 * d2 - x2 * d3;
                }
                rel_vec(&omega_vec(&p, &v), &w)
            })
        },
    );

    job.check(
        Claim::new("forms.uniformva", "ω_α(ξ_α) = 1 + a|z|²"),
        1e-12,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "forms.uniformva", s);
                let p = sample_point(&mut rng, n);
                let want = 1.0 + a * p.z.norm_sqr();
                (1..=3)
                    .map(|al| rel(omega_eval(al, &p, &xi_field(a, al, &p)), want))
                    .fold(0.0, f64::max)
            })
        },
    );

    job.check(
        Claim::new("forms.eta_xi", "η_α(ξ_α) = 1"),
        1e-12,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "forms.eta_xi", s);
                let p = sample_point(&mut rng, n);
                (1..=3)
                    .map(|al| (eta_eval(a, al, &p, &xi_field(a, al, &p)) - 1.0).abs())
                    .fold(0.0, f64::max)
            })
        },
    );

    job.check(
        Claim::new(
            "forms.charaq",
            "dη_α(ξ_α, X) = dη_α(d/dt_β, X) = dη_α(d/dt_γ, X) = 0",
        ),
        1e-10,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "forms.charaq", s);
                let p = sample_point(&mut rng, n);
                let x = mvec(&mut rng, n);
                let mut r = 0.0f64;
                for al in 1..=3 {
                    let scale = x.max_abs().max(1.0) * (1.0 + p.z.norm_sqr());
                    r = r.max(d_eta_eval(a, al, &p, &xi_field(a, al, &p), &x).abs() / scale);
                    for b in (1..=3).filter(|&b| b != al) {
                        r = r.max(d_eta_eval(a, al, &p, &MTangent::d_dt(n, b), &x).abs() / scale);
                    }
                }
                r
            })
        },
    );

    job.check(
        Claim::new("forms.d_eta_on_d", "dη_α = f dω_α on 𝖣"),
        1e-12,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "forms.d_eta_on_d", s);
                let p = sample_point(&mut rng, n);
                let (x, y) = (hvec(&mut rng, &p), hvec(&mut rng, &p));
                let f = f_eval(a, &p.z);
                (1..=3)
                    .map(|al| rel(d_eta_eval(a, al, &p, &x, &y), f * d_omega_eval(al, &x, &y)))
                    .fold(0.0, f64::max)
            })
        },
    );

    job.check_backend(
        Claim::new(
            "forms.d_eta_numeric",
            "analytic dη_α = df∧ω_α + f dω_α against numerical d of η_α",
        ),
        1e-7,
        |backend| {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "forms.d_eta_numeric", s);
                let p = sample_point(&mut rng, n);
                let (x, y) = (mvec(&mut rng, n), mvec(&mut rng, n));
                (1..=3)
                    .map(|al| {
                        let form = EtaForm { n, a, alpha: al };
                        let num =
                            numeric_d(&form, &p.to_flat(), &[x.to_flat(), y.to_flat()], backend);
                        rel(num, d_eta_eval(a, al, &p, &x, &y))
                    })
                    .fold(0.0, f64::max)
            })
        },
    );

    job.check(
        Claim::new(
            "forms.reciprocity",
            "dη_α(J_αX, Y) = dη_β(J_βX, Y) = dη_γ(J_γX, Y) on 𝖣",
        ),
        1e-10,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "forms.reciprocity", s);
                let p = sample_point(&mut rng, n);
                let (x, y) = (hvec(&mut rng, &p), hvec(&mut rng, &p));
                let v: Vec<f64> = (1..=3)
                    .map(|al| d_eta_eval(a, al, &p, &j_lift(al, &p, &x), &y))
                    .collect();
                rel(v[1], v[0]).max(rel(v[2], v[0]))
            })
        },
    );

    job.check(
        Claim::new("forms.j_invariance", "dη_α(J_αX, J_αY) = dη_α(X, Y) on 𝖣"),
        1e-10,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "forms.j_invariance", s);
                let p = sample_point(&mut rng, n);
                let (x, y) = (hvec(&mut rng, &p), hvec(&mut rng, &p));
                (1..=3)
                    .map(|al| {
                        let lhs = d_eta_eval(a, al, &p, &j_lift(al, &p, &x), &j_lift(al, &p, &y));
                        rel(lhs, d_eta_eval(a, al, &p, &x, &y))
                    })
                    .fold(0.0, f64::max)
            })
        },
    );

    job.check(
        Claim::new(
            "forms.jj_sign",
            "(dη_β|𝖣)⁻¹∘(dη_α|𝖣) = J_γ: dη_α(X, Y) = dη_β(J_γX, Y)",
        )
        .note("sign +1 with J_α = right multiplication by ī_α, for (α, β, γ) cyclic"),
        1e-10,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "forms.jj_sign", s);
                let p = sample_point(&mut rng, n);
                let (x, y) = (hvec(&mut rng, &p), hvec(&mut rng, &p));
                (1..=3)
                    .map(|al| {
                        let (al, be, ga) = cyclic(al);
                        rel(
                            d_eta_eval(a, be, &p, &j_lift(ga, &p, &x), &y),
                            d_eta_eval(a, al, &p, &x, &y),
                        )
                    })
                    .fold(0.0, f64::max)
            })
        },
    );

    job.check(
        Claim::new("forms.j_quaternion", "J_α² = −1 and J₁J₂ = J₃ on 𝖣"),
        1e-12,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "forms.j_quaternion", s);
                let p = sample_point(&mut rng, n);
                let x = hvec(&mut rng, &p);
                let mut r = 0.0f64;
                for al in 1..=3 {
                    let jj = j_lift(al, &p, &j_lift(al, &p, &x));
                    r = r.max(rel_vec(&jj.to_flat(), &x.scale(-1.0).to_flat()));
                }
                let j12 = j_lift(1, &p, &j_lift(2, &p, &x));
                r.max(rel_vec(&j12.to_flat(), &j_lift(3, &p, &x).to_flat()))
            })
        },
    );

    job.check(
        Claim::new(
            "forms.horizontal_lift",
            "π_*: 𝖣 → Tℍⁿ is an isomorphism; lift ∘ π_* = id on 𝖣",
        ),
        1e-12,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "forms.horizontal_lift", s);
                let p = sample_point(&mut rng, n);
                let v = hvec(&mut rng, &p);
                let w = omega_vec(&p, &v);
                let scale = 1.0 + p.z.norm() * v.dz.norm();
                let hor = w.iter().map(|c| c.abs()).fold(0.0, f64::max) / scale;
                hor.max(rel_vec(&lift_components(&p, &v.dz).to_flat(), &v.to_flat()))
            })
        },
    );

    job.check(
        Claim::new(
            "forms.d_basis",
            "{v_k, w_k, u_k, s_k} lie in 𝖣 and have rank 4n",
        )
        .note("residual 1 marks a rank-deficient frame"),
        1e-12,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "forms.d_basis", s);
                let p = sample_point(&mut rng, n);
                match d_basis(&p) {
                    Ok(b) => {
                        let scale = 1.0 + p.z.norm_sqr();
                        b.vectors
                            .iter()
                            .flat_map(|v| omega_vec(&p, v))
                            .map(|c| c.abs() / scale)
                            .fold(0.0, f64::max)
                    }
                    Err(_) => 1.0,
                }
            })
        },
    );

    job.check(
        Claim::new(
            "forms.brackets_span_center",
            "[𝖣, 𝖣] spans ⟨d/dt₁, d/dt₂, d/dt₃⟩",
        )
        .note("residual 1 marks a point where the brackets of the frame miss a central direction"),
        0.5,
        || {
            par_samples(count.min(200), |s| {
                let mut rng = sample_rng(seed, "forms.brackets_span_center", s);
                let p = sample_point(&mut rng, n);
                let fields = DBasis::fields(n);
                let mut rows = Vec::new();
                for i in 0..fields.len() {
                    for j in i + 1..fields.len() {
                        rows.push(omega_vec(&p, &lie_bracket(&fields[i], &fields[j], &p)));
                    }
                }
                let m = DMatrix::from_fn(rows.len(), 3, |r, c| rows[r][c]);
                let sv = m.singular_values();
                let top = sv.max();
                if sv.iter().filter(|&&x| x > 1e-12 * top).count() == 3 {
                    0.0
                } else {
                    1.0
                }
            })
        },
    );

    job.check(
        Claim::new("forms.acw", "h^*ω = α ω ᾱ for h = ((t, v), A·α) ∈ E(ℳ)"),
        1e-10,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "forms.acw", s);
                let h = sample_em(&mut rng, n);
                let p = sample_point(&mut rng, n);
                let v = mvec(&mut rng, n);
                let hp = em_act(&h, &p).expect("same n");
                let lhs = omega_vec(&hp, &push_em(&h, &p, &v));
                let rhs = conjugate_imag(h.alpha.get(), omega_vec(&p, &v));
                rel_vec(&lhs, &rhs)
            })
        },
    );

    job.check(
        Claim::new(
            "forms.etaconj",
            "h^*η_γ = Σ_β η_β a_{βγ} for h ∈ ℝ³⋊Sp(n)·Sp(1)",
        ),
        1e-10,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "forms.etaconj", s);
                let mut h = sample_isotropy(&mut rng, n);
                h.t = [
                    rng.random::<f64>() - 0.5,
                    rng.random::<f64>() - 0.5,
                    rng.random::<f64>() - 0.5,
                ];
                let p = sample_point(&mut rng, n);
                let v = mvec(&mut rng, n);
                let hp = em_act(&h, &p).expect("same n");
                let lhs = eta_vec(a, &hp, &push_em(&h, &p, &v));
                let eta = eta_vec(a, &p, &v);
                let m = so3_from_unit(h.alpha);
                let rhs: Vec<f64> = (0..3)
                    .map(|g| (0..3).map(|b| eta[b] * m[b][g]).sum())
                    .collect();
                rel_vec(&lhs, &rhs)
            })
        },
    );

    job.check(
        Claim::new(
            "forms.hjjh",
            "h_*J_β = Σ_γ a_{βγ} J_γ h_* on 𝖣 for h ∈ ℝ³⋊Sp(n)·Sp(1)",
        ),
        1e-10,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "forms.hjjh", s);
                let mut h = sample_isotropy(&mut rng, n);
                h.t = [
                    rng.random::<f64>() - 0.5,
                    rng.random::<f64>() - 0.5,
                    rng.random::<f64>() - 0.5,
                ];
                let p = sample_point(&mut rng, n);
                let x = hvec(&mut rng, &p);
                let hp = em_act(&h, &p).expect("same n");
                let hx = push_em(&h, &p, &x);
                let m = so3_from_unit(h.alpha);
                (1..=3)
                    .map(|b| {
                        let lhs = push_em(&h, &p, &j_lift(b, &p, &x));
                        let mut rhs = MTangent::zeros(n);
                        for g in 1..=3 {
                            rhs = rhs.add(&j_lift(g, &hp, &hx).scale(m[b - 1][g - 1]));
                        }
                        rel_vec(&lhs.to_flat(), &rhs.to_flat())
                    })
                    .fold(0.0, f64::max)
            })
        },
    );

    job.witness(
        Claim::new(
            "forms.translation_witness",
            "left translation by (0, u), u ≠ 0, does not preserve η_α",
        )
        .note("u = (1, 0, …, 0); the value is max |h^*η₁(V) − η₁(V)|"),
        0.01,
        || {
            let mut u = QVector::zeros(n);
            u[0] = Quaternion::one();
            let h = EMElement::translation([0.0; 3], u);
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "forms.translation_witness", s);
                let p = sample_point(&mut rng, n);
                let v = mvec(&mut rng, n);
                let hp = em_act(&h, &p).expect("same n");
                (eta_eval(a, 1, &hp, &push_em(&h, &p, &v)) - eta_eval(a, 1, &p, &v)).abs()
            })
        },
    );

    job.check(
        Claim::new(
            "forms.xi_generates_rho",
            "ξ_α is the generator of the flow ρ_α",
        )
        .note("central differences of the flow with step 1e-5"),
        1e-7,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "forms.xi_generates_rho", s);
                let p = sample_point(&mut rng, n);
                (1..=3)
                    .map(|al| {
                        let fd = crate::heisenberg::rho_flow_derivative(a, al, &p, 1e-5);
                        rel_vec(&fd.to_flat(), &xi_field(a, al, &p).to_flat())
                    })
                    .fold(0.0, f64::max)
            })
        },
    );
    Ok(())
}
