//! Quotients of ℳ: the groups ℳ/ℝ² with their sections `𝗁_α`, the complex
//! Heisenberg group 𝒩 with its contact data, the isomorphism `φ`, the map
//! `φ̂ = ψ` and the quotient metric `g_𝒩`; also the lift `h̃` of a map of ℍⁿ
//! through the slice 𝒩₀.
//!
//! A quaternion vector `z + wj` (`z, w ∈ ℂⁿ`) is split componentwise:
//! `q = x₁ + x₂i + x₃j + x₄k` gives `z = x₁ + x₂i` and `w = x₃ + x₄i`.

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use crate::diffgeo::{EndoField, MetricField};
use crate::dual::{Dual, Real};
use crate::error::{Error, Result};
use crate::forms::{DBasisField, DBasisKind};
use crate::heisenberg::{MPoint, MTangent, VectorField};
use crate::metric::{check_a, tau, tau_diff, GaMetric};
use crate::quatlib::{
    herm_inner_unchecked, imag_unit, QMatrix, QVector, Quaternion, UnitQuaternion,
};
use crate::sampling::{sample_hvec, sample_rng, sample_z, Stats};

/// Point `(t_α, z)` of ℳ/ℝ², the quotient by the two central directions other than `α`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientPoint<T = f64> {
    pub alpha: usize,
    pub t: T,
    pub z: QVector<T>,
}

/// Tangent vector `(dt_α, dz)` of ℳ/ℝ².
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientTangent<T = f64> {
    pub dt: T,
    pub dz: QVector<T>,
}

impl QuotientTangent<f64> {
    pub fn dist(&self, o: &Self) -> f64 {
        ((self.dt - o.dt).powi(2) + self.dz.sub(&o.dz).norm_sqr()).sqrt()
    }
}

/// `p_α(t, z) = (t_α, z)`.
pub fn p_alpha<T: Real>(alpha: usize, p: &MPoint<T>) -> QuotientPoint<T> {
    QuotientPoint {
        alpha,
        t: p.t[alpha - 1],
        z: p.z.clone(),
    }
}

/// `p_{α*}(dt, dz) = (dt_α, dz)`.
pub fn p_alpha_tangent<T: Real>(alpha: usize, v: &MTangent<T>) -> QuotientTangent<T> {
    QuotientTangent {
        dt: v.dt[alpha - 1],
        dz: v.dz.clone(),
    }
}

/// Group law `(t, z)(t', z') = (t + t' − Im_α⟨z, z'⟩, z + z')` of ℳ/ℝ².
pub fn quotient_mul<T: Real>(
    p: &QuotientPoint<T>,
    q: &QuotientPoint<T>,
) -> Result<QuotientPoint<T>> {
    if p.alpha != q.alpha {
        return Err(Error::InvalidParameter(
            "points of different quotients".into(),
        ));
    }
    if p.z.len() != q.z.len() {
        return Err(Error::DimensionMismatch {
            expected: p.z.len(),
            found: q.z.len(),
        });
    }
    let im = herm_inner_unchecked(&p.z, &q.z).im_component(p.alpha);
    Ok(QuotientPoint {
        alpha: p.alpha,
        t: p.t + q.t - im,
        z: p.z.add(&q.z),
    })
}

/// `π̂(t_α, z) = z`, so that `π = π̂∘p_α`.
pub fn pi_hat<T: Real>(q: &QuotientPoint<T>) -> QVector<T> {
    q.z.clone()
}

/// `π̂_α(t_α, z) = z e^{−i_α a t_α}`, so that `π_α = π̂_α∘p_α`.
pub fn pi_hat_alpha<T: Real>(a: f64, q: &QuotientPoint<T>) -> QVector<T> {
    q.z.right_mul(Quaternion::exp_imag(q.alpha, q.t.scale(-a)))
}

/// Section `𝗁_α(z) = (−|z|²/2, z i_α)`.
pub fn section_h<T: Real>(alpha: usize, z: &QVector<T>) -> QuotientPoint<T> {
    QuotientPoint {
        alpha,
        t: -z.norm_sqr().scale(0.5),
        z: z.right_mul(Quaternion::lift(imag_unit(alpha))),
    }
}

/// Differential of [`section_h`] by forward-mode differentiation.
pub fn section_h_pushforward(
    alpha: usize,
    z: &QVector<f64>,
    x: &QVector<f64>,
) -> QuotientTangent<f64> {
    let zd = QVector(
        z.0.iter()
            .zip(&x.0)
            .map(|(p, v)| dual_quat(*p, *v))
            .collect(),
    );
    let s = section_h(alpha, &zd);
    QuotientTangent {
        dt: s.t.eps,
        dz: QVector(s.z.0.iter().map(|q| eps_quat(*q)).collect()),
    }
}

fn dual_quat(p: Quaternion<f64>, v: Quaternion<f64>) -> Quaternion<Dual<f64>> {
    Quaternion::new(
        Dual::new(p.w, v.w),
        Dual::new(p.x, v.x),
        Dual::new(p.y, v.y),
        Dual::new(p.z, v.z),
    )
}

fn eps_quat(q: Quaternion<Dual<f64>>) -> Quaternion<f64> {
    Quaternion::new(q.w.eps, q.x.eps, q.y.eps, q.z.eps)
}

/// Distance of `q` from `𝒩_α = {(−|z|²/2, z i_α)}`, i.e. `|t_α + |z|²/2|`.
pub fn n_alpha_gap(q: &QuotientPoint<f64>) -> f64 {
    (q.t + 0.5 * q.z.norm_sqr()).abs()
}

/// Membership in `𝒩_α` up to rounding of `|z|²` (a few ulps).
pub fn in_n_alpha(q: &QuotientPoint<f64>) -> bool {
    n_alpha_gap(q) <= 4.0 * f64::EPSILON * (1.0 + q.z.norm_sqr())
}

/// Image in ℳ/ℝ² of a frame field: unbarred fields keep their `dt_α` part,
/// barred fields have none.
fn frame_image(
    alpha: usize,
    kind: DBasisKind,
    k: usize,
    barred: bool,
    z: &QVector<f64>,
) -> QuotientTangent<f64> {
    let field = DBasisField { kind, k };
    let v = field.eval(&MPoint::over(z.clone()));
    QuotientTangent {
        dt: if barred { 0.0 } else { v.dt[alpha - 1] },
        dz: v.dz,
    }
}

/// Expected `𝗁_{α*}(J_β v_k)` for `β = 0..=3` (`J₀ = id`) as `(sign, kind, barred)`.
pub fn section_table(alpha: usize, beta: usize) -> (f64, DBasisKind, bool) {
    use DBasisKind::*;
    const TABLE: [[(f64, DBasisKind, bool); 4]; 3] = [
        [
            (-1.0, W, false),
            (1.0, V, false),
            (-1.0, S, true),
            (1.0, U, true),
        ],
        [
            (-1.0, U, false),
            (1.0, S, true),
            (1.0, V, false),
            (-1.0, W, true),
        ],
        [
            (-1.0, S, false),
            (-1.0, U, true),
            (1.0, W, true),
            (1.0, V, false),
        ],
    ];
    TABLE[alpha - 1][beta]
}

/// Largest deviation of `𝗁_{α*}(J_β v_k)` from the tabulated frame image at `z`,
/// over `β = 0..=3` and `k`.
pub fn section_table_residual(alpha: usize, z: &QVector<f64>) -> f64 {
    let n = z.len();
    let mut worst = 0.0f64;
    for k in 0..n {
        let mut vk = QVector::zeros(n);
        vk[k] = z[k];
        for beta in 0..4 {
            let x = if beta == 0 {
                vk.clone()
            } else {
                vk.right_mul(imag_unit(beta).conj())
            };
            let got = section_h_pushforward(alpha, z, &x);
            let (sign, kind, barred) = section_table(alpha, beta);
            let mut want = frame_image(alpha, kind, k, barred, z);
            want.dt *= sign;
            want.dz = want.dz.scale(sign);
            worst = worst.max(got.dist(&want));
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// Complex helpers over a generic scalar

fn cmul<T: Real>(a: Complex<T>, b: Complex<T>) -> Complex<T> {
    Complex::new(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re)
}

fn cconj<T: Real>(a: Complex<T>) -> Complex<T> {
    Complex::new(a.re, -a.im)
}

fn cadd<T: Real>(a: Complex<T>, b: Complex<T>) -> Complex<T> {
    Complex::new(a.re + b.re, a.im + b.im)
}

fn cscale<T: Real>(a: Complex<T>, s: T) -> Complex<T> {
    Complex::new(a.re * s, a.im * s)
}

fn times_i<T: Real>(a: Complex<T>) -> Complex<T> {
    Complex::new(-a.im, a.re)
}

/// `⟨u, v⟩ = Σ conj(u_k) v_k` on ℂ^m.
pub fn c_inner<T: Real>(u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
    u.iter()
        .zip(v)
        .fold(Complex::new(T::zero(), T::zero()), |s, (a, b)| {
            cadd(s, cmul(cconj(*a), *b))
        })
}

fn c_norm_sqr<T: Real>(u: &[Complex<T>]) -> T {
    u.iter()
        .fold(T::zero(), |s, a| s + a.re * a.re + a.im * a.im)
}

pub fn c_from_reals<T: Real>(x: &[T]) -> Vec<Complex<T>> {
    x.chunks(2).map(|c| Complex::new(c[0], c[1])).collect()
}

pub fn c_to_reals<T: Real>(u: &[Complex<T>]) -> Vec<T> {
    u.iter().flat_map(|c| [c.re, c.im]).collect()
}

// ---------------------------------------------------------------------------
// The Heisenberg group 𝒩 = ℝ × ℂ^{2n}

/// Point `(t, (z, w))` of 𝒩 with `u = (z, w) ∈ ℂ^{2n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NPoint<T = f64> {
    pub t: T,
    pub u: Vec<Complex<T>>,
}

/// Tangent vector `(dt, du)` of 𝒩.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NTangent<T = f64> {
    pub dt: T,
    pub du: Vec<Complex<T>>,
}

impl NPoint<f64> {
    pub fn dist(&self, o: &Self) -> f64 {
        let du: f64 = self
            .u
            .iter()
            .zip(&o.u)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        ((self.t - o.t).powi(2) + du).sqrt()
    }
}

/// Group law `(t, u)(t', u') = (t + t' − Im Σ conj(u_k) u'_k, u + u')`.
pub fn n_mul(p: &NPoint<f64>, q: &NPoint<f64>) -> Result<NPoint<f64>> {
    if p.u.len() != q.u.len() {
        return Err(Error::DimensionMismatch {
            expected: p.u.len(),
            found: q.u.len(),
        });
    }
    let im: f64 = p.u.iter().zip(&q.u).map(|(a, b)| (a.conj() * b).im).sum();
    Ok(NPoint {
        t: p.t + q.t - im,
        u: p.u.iter().zip(&q.u).map(|(a, b)| a + b).collect(),
    })
}

/// Splits `q = z + wj` componentwise into `(z, w)`.
pub fn split_zw<T: Real>(q: &QVector<T>) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
    (
        q.0.iter().map(|c| Complex::new(c.w, c.x)).collect(),
        q.0.iter().map(|c| Complex::new(c.y, c.z)).collect(),
    )
}

/// Inverse of [`split_zw`]: `z + wj`.
pub fn join_zw<T: Real>(z: &[Complex<T>], w: &[Complex<T>]) -> QVector<T> {
    QVector(
        z.iter()
            .zip(w)
            .map(|(a, b)| Quaternion::new(a.re, a.im, b.re, b.im))
            .collect(),
    )
}

/// `φ̂(z + wj) = (z, w̄)`; this is also the map `ψ: ℍⁿ → ℂ^{2n}`.
pub fn phi_hat<T: Real>(q: &QVector<T>) -> Vec<Complex<T>> {
    let (z, w) = split_zw(q);
    z.into_iter().chain(w.into_iter().map(cconj)).collect()
}

/// Inverse of [`phi_hat`].
pub fn phi_hat_inv<T: Real>(u: &[Complex<T>]) -> QVector<T> {
    let n = u.len() / 2;
    let w: Vec<Complex<T>> = u[n..].iter().map(|c| cconj(*c)).collect();
    join_zw(&u[..n], &w)
}

/// `φ(a, z + wj) = (a, (z, w̄))` on the α = 1 quotient.
pub fn phi_iso(q: &QuotientPoint<f64>) -> Result<NPoint<f64>> {
    if q.alpha != 1 {
        return Err(Error::InvalidParameter(
            "φ is defined on the α = 1 quotient only".into(),
        ));
    }
    Ok(NPoint {
        t: q.t,
        u: phi_hat(&q.z),
    })
}

/// `φ_*`, linear in these coordinates.
pub fn phi_tangent(v: &QuotientTangent<f64>) -> NTangent<f64> {
    NTangent {
        dt: v.dt,
        du: phi_hat(&v.dz),
    }
}

/// `ω̂₁(V) = dt₁ + Im₁⟨z, dz⟩` on ℳ/ℝ², the form with `p₁^*ω̂₁ = ω₁`.
pub fn omega_hat1(q: &QuotientPoint<f64>, v: &QuotientTangent<f64>) -> f64 {
    v.dt + herm_inner_unchecked(&q.z, &v.dz).im_component(1)
}

/// `η̂₁ = ω̂₁ / ω̂₁(ξ̂₁)` with `ξ̂₁ = p_{1*}ξ₁ = (1, z a i)`.
pub fn eta_hat1(a: f64, q: &QuotientPoint<f64>, v: &QuotientTangent<f64>) -> f64 {
    let xi = QuotientTangent {
        dt: 1.0,
        dz: q.z.right_mul(imag_unit(1).scale(a)),
    };
    omega_hat1(q, v) / omega_hat1(q, &xi)
}

/// `ω_𝒩(V) = dt + Im⟨u, du⟩`.
pub fn omega_n<T: Real>(p: &NPoint<T>, v: &NTangent<T>) -> T {
    v.dt + c_inner(&p.u, &v.du).im
}

/// Generator `ξ = d/dt + a i u` of `ρ(t)(s, u) = (t + s, e^{iat} u)`.
pub fn xi_n<T: Real>(a: f64, p: &NPoint<T>) -> NTangent<T> {
    NTangent {
        dt: T::one(),
        du: p
            .u
            .iter()
            .map(|c| cscale(times_i(*c), T::from_f64(a)))
            .collect(),
    }
}

/// `ρ(t)(s, u) = (t + s, e^{iat} u)`.
pub fn rho_n(a: f64, t: f64, p: &NPoint<f64>) -> NPoint<f64> {
    let e = Complex64::from_polar(1.0, a * t);
    NPoint {
        t: p.t + t,
        u: p.u.iter().map(|c| e * c).collect(),
    }
}

/// `p_{1𝒩}(t, u) = e^{−iat} u`, the quotient by `ρ(ℝ)`.
pub fn p1_n(a: f64, p: &NPoint<f64>) -> Vec<Complex64> {
    let e = Complex64::from_polar(1.0, -a * p.t);
    p.u.iter().map(|c| e * c).collect()
}

/// `η_𝒩 = ω_𝒩 / ω_𝒩(ξ)`.
pub fn eta_n<T: Real>(a: f64, p: &NPoint<T>, v: &NTangent<T>) -> T {
    omega_n(p, v) / omega_n(p, &xi_n(a, p))
}

/// `f_𝒩 = 1/(1 + a|u|²) = 1/ω_𝒩(ξ)`.
fn f_n<T: Real>(a: f64, u: &[Complex<T>]) -> T {
    (T::one() + c_norm_sqr(u).scale(a)).recip()
}

/// `dη_𝒩 = df ∧ ω_𝒩 + f dω_𝒩`, with `dω_𝒩(X, Y) = 2 Im⟨X̂, Ŷ⟩`.
pub fn d_eta_n<T: Real>(a: f64, p: &NPoint<T>, x: &NTangent<T>, y: &NTangent<T>) -> T {
    let f = f_n(a, &p.u);
    let df = |v: &NTangent<T>| -(f * f * c_inner(&p.u, &v.du).re).scale(2.0 * a);
    let dw = c_inner(&x.du, &y.du).im.scale(2.0);
    df(x) * omega_n(p, y) - df(y) * omega_n(p, x) + f * dw
}

/// Horizontal lift into `ker ω_𝒩`.
pub fn lift_n<T: Real>(p: &NPoint<T>, du: &[Complex<T>]) -> NTangent<T> {
    NTangent {
        dt: -c_inner(&p.u, du).im,
        du: du.to_vec(),
    }
}

/// `L_w(X) = X + a i w Im⟨w, X⟩`, the map `p_{1𝒩*}∘lift` at `(0, w)`.
pub fn l_map_n<T: Real>(a: f64, w: &[Complex<T>], x: &[Complex<T>]) -> Vec<Complex<T>> {
    let c = c_inner(w, x).im.scale(a);
    x.iter()
        .zip(w)
        .map(|(xi, wi)| cadd(*xi, cscale(times_i(*wi), c)))
        .collect()
}

/// Inverse of [`l_map_n`].
pub fn l_inv_n<T: Real>(a: f64, w: &[Complex<T>], u: &[Complex<T>]) -> Vec<Complex<T>> {
    let c = c_inner(w, u).im.scale(a) / (T::one() + c_norm_sqr(w).scale(a));
    u.iter()
        .zip(w)
        .map(|(ui, wi)| cadd(*ui, cscale(times_i(*wi), -c)))
        .collect()
}

/// Raw `dη_𝒩(J_𝒩 X, Y)` for the horizontal preimages at `(0, w)` of `û, v̂`, with `J_𝒩 = i`.
pub fn raw_metric_n<T: Real>(a: f64, w: &[Complex<T>], x: &[Complex<T>], y: &[Complex<T>]) -> T {
    let p = NPoint {
        t: T::zero(),
        u: w.to_vec(),
    };
    let xh = l_inv_n(a, w, x);
    let jx: Vec<Complex<T>> = xh.iter().map(|c| times_i(*c)).collect();
    d_eta_n(a, &p, &lift_n(&p, &jx), &lift_n(&p, &l_inv_n(a, w, y)))
}

/// The quotient metric `g_𝒩` on ℂ^{2n}, in real coordinates `(Re u₁, Im u₁, …)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GNMetric {
    pub n: usize,
    pub a: f64,
    c: f64,
}

impl GNMetric {
    /// `n` is the quaternionic dimension; the metric lives on ℂ^{2n}.
    pub fn new(n: usize, a: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        check_a(a)?;
        let mut e = vec![Complex64::new(0.0, 0.0); 2 * n];
        e[0] = Complex64::new(1.0, 0.0);
        let c = raw_metric_n(a, &vec![Complex64::new(0.0, 0.0); 2 * n], &e, &e);
        Ok(GNMetric { n, a, c })
    }

    /// The convention factor measured at the origin (negative: `J_𝒩 = i` pairs
    /// with `dω_𝒩` to a negative definite form).
    pub fn normalization(&self) -> f64 {
        self.c
    }

    pub fn eval<T: Real>(&self, w: &[Complex<T>], x: &[Complex<T>], y: &[Complex<T>]) -> T {
        raw_metric_n(self.a, w, x, y).scale(1.0 / self.c)
    }

    /// Closed form `f(w) Re⟨L⁻¹û, L⁻¹v̂⟩`.
    pub fn closed_form(&self, w: &[Complex64], x: &[Complex64], y: &[Complex64]) -> f64 {
        f_n(self.a, w) * c_inner(&l_inv_n(self.a, w, x), &l_inv_n(self.a, w, y)).re
    }
}

impl MetricField for GNMetric {
    fn dim(&self) -> usize {
        4 * self.n
    }

    fn gram<T: Real>(&self, x: &[T]) -> Vec<T> {
        let d = 4 * self.n;
        let w = c_from_reals(x);
        let basis: Vec<Vec<Complex<T>>> = (0..d)
            .map(|i| {
                let mut e = vec![T::zero(); d];
                e[i] = T::one();
                c_from_reals(&e)
            })
            .collect();
        let mut g = vec![T::zero(); d * d];
        for i in 0..d {
            for j in i..d {
                let v = self.eval(&w, &basis[i], &basis[j]);
                g[i * d + j] = v;
                g[j * d + i] = v;
            }
        }
        g
    }
}

/// Complex structure of the quotient ℂ^{2n} = 𝒩/ρ(ℝ) in the chart `p_{1𝒩}`:
/// `Ĵ(û) = L_w(i L_w⁻¹ û)`, the image of `J_𝒩 = i` on horizontal preimages.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NComplexStructure {
    pub n: usize,
    pub a: f64,
}

impl NComplexStructure {
    pub fn apply<T: Real>(&self, w: &[Complex<T>], u: &[Complex<T>]) -> Vec<Complex<T>> {
        let x: Vec<Complex<T>> = l_inv_n(self.a, w, u).into_iter().map(times_i).collect();
        l_map_n(self.a, w, &x)
    }
}

impl EndoField for NComplexStructure {
    fn matrix<T: Real>(&self, x: &[T]) -> Vec<T> {
        let d = 4 * self.n;
        let w = c_from_reals(x);
        let mut m = vec![T::zero(); d * d];
        for c in 0..d {
            let mut e = vec![T::zero(); d];
            e[c] = T::one();
            let col = c_to_reals(&self.apply(&w, &c_from_reals(&e)));
            for (r, v) in col.into_iter().enumerate() {
                m[r * d + c] = v;
            }
        }
        m
    }
}

/// `J'_ℂ(v) = ī v`.
pub fn j_prime_c(v: &[Complex64]) -> Vec<Complex64> {
    v.iter().map(|c| Complex64::new(0.0, -1.0) * c).collect()
}

/// Applies a unitary `2n × 2n` matrix (row-major) to a vector of ℂ^{2n}.
pub fn apply_unitary(u: &[Complex64], m: usize, v: &[Complex64]) -> Vec<Complex64> {
    (0..m)
        .map(|r| (0..m).map(|c| u[r * m + c] * v[c]).sum())
        .collect()
}

/// Gram–Schmidt orthonormalization of a Gaussian complex matrix; columns are orthonormal.
pub fn random_unitary<R: rand::Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<Complex64> {
    use crate::sampling::gaussian;
    loop {
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(m);
        let mut ok = true;
        for _ in 0..m {
            let mut v: Vec<Complex64> = (0..m)
                .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
                .collect();
            for _ in 0..2 {
                for c in &cols {
                    let proj = c_inner(c, &v);
                    for (vi, ci) in v.iter_mut().zip(c) {
                        *vi -= ci * proj;
                    }
                }
            }
            let norm = c_norm_sqr(&v).sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            cols.push(v.iter().map(|c| c / norm).collect());
        }
        if ok {
            let mut out = vec![Complex64::new(0.0, 0.0); m * m];
            for (c, col) in cols.iter().enumerate() {
                for r in 0..m {
                    out[r * m + c] = col[r];
                }
            }
            return out;
        }
    }
}

/// Sign-resolved comparison of `(ψ∘τ₁)^*g_𝒩` with `±g_a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntiIsometryReport {
    /// Residuals against `+g_a`, relative to `|X̂||Ŷ|`.
    pub plus: Stats,
    /// Residuals against `−g_a`.
    pub minus: Stats,
    /// Sign whose max residual is smaller.
    pub best_sign: f64,
    pub best_max: f64,
    /// `|φ̂_*(J₁X̂) − J'_ℂ φ̂_*(X̂)|` over the same samples.
    pub anti_holomorphy: Stats,
}

/// `(ψ∘τ₁)^*g_𝒩(X̂, Ŷ)` at `z`.
pub fn pullback_gn(gn: &GNMetric, z: &QVector<f64>, x: &QVector<f64>, y: &QVector<f64>) -> f64 {
    let a = gn.a;
    let w = phi_hat(&tau(1, a, z));
    gn.eval(
        &w,
        &phi_hat(&tau_diff(1, a, z, x)),
        &phi_hat(&tau_diff(1, a, z, y)),
    )
}

pub fn anti_isometry_residual(
    a: f64,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<AntiIsometryReport> {
    let g = GaMetric::new(n, a)?;
    let gn = GNMetric::new(n, a)?;
    let rows: Vec<[f64; 3]> = (0..samples)
        .map(|i| {
            let mut rng = sample_rng(seed, "quotients.antimetric", i as u64);
            let z = sample_z(&mut rng, n);
            let x = sample_hvec(&mut rng, n);
            let y = sample_hvec(&mut rng, n);
            let scale = (x.norm() * y.norm()).max(1e-300);
            let lhs = pullback_gn(&gn, &z, &x, &y);
            let rhs = g.eval(&z, &x, &y);
            let jx = phi_hat(&x.right_mul(imag_unit(1).conj()));
            let jpx = j_prime_c(&phi_hat(&x));
            let hol: f64 = jx
                .iter()
                .zip(&jpx)
                .map(|(p, q)| (p - q).norm_sqr())
                .sum::<f64>()
                .sqrt()
                / x.norm();
            [(lhs - rhs).abs() / scale, (lhs + rhs).abs() / scale, hol]
        })
        .collect();
    let plus = Stats::from_values(rows.iter().map(|r| r[0]));
    let minus = Stats::from_values(rows.iter().map(|r| r[1]));
    let (best_sign, best_max) = if plus.max <= minus.max {
        (1.0, plus.max)
    } else {
        (-1.0, minus.max)
    };
    Ok(AntiIsometryReport {
        plus,
        minus,
        best_sign,
        best_max,
        anti_holomorphy: Stats::from_values(rows.iter().map(|r| r[2])),
    })
}

// ---------------------------------------------------------------------------
// Lifting maps of ℍⁿ through the slice 𝒩₀

/// A smooth self-map of ℍⁿ evaluable over any scalar type.
pub trait HMap: Sync {
    fn apply<T: Real>(&self, z: &QVector<T>) -> QVector<T>;
}

/// `z ↦ A z ᾱ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearIsometry {
    pub a: QMatrix,
    pub alpha: UnitQuaternion,
}

impl HMap for LinearIsometry {
    fn apply<T: Real>(&self, z: &QVector<T>) -> QVector<T> {
        self.a
            .apply(z)
            .right_mul(Quaternion::lift(self.alpha.get().conj()))
    }
}

/// Point of the slice `𝒩₀ = {((−|z|²/2)(1, 1, 1), z)}` over `z`.
pub fn n0_section<T: Real>(z: &QVector<T>) -> MPoint<T> {
    let c = -z.norm_sqr().scale(0.5);
    MPoint::new([c, c, c], z.clone())
}

/// `h̃(t x) = t h'(x)` for `t ∈ ℝ³` and `x ∈ 𝒩₀`, where `h' = π⁻¹∘h∘π` on 𝒩₀.
pub fn lift_map<H: HMap, T: Real>(h: &H, p: &MPoint<T>) -> MPoint<T> {
    let x = n0_section(&p.z);
    let t = [p.t[0] - x.t[0], p.t[1] - x.t[1], p.t[2] - x.t[2]];
    let hx = n0_section(&h.apply(&p.z));
    MPoint::new([t[0] + hx.t[0], t[1] + hx.t[1], t[2] + hx.t[2]], hx.z)
}
