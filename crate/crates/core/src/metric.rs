//! The metric family `g_a` on ℍⁿ, the twist maps `τ_α`, the twisted
//! projections `π_α`, the descended 2-forms `Ω_α` and the fundamental forms
//! `Θ_α = g∘J_α`.
//!
//! `g_a` is evaluated through the horizontal lift:
//! `g(X̂, Ŷ) = dη₁(J₁ lift X̂, lift Ŷ) / c`, where `c = 2` is the
//! d-convention factor, measured once at the origin so that `g_a(0) = id`.

use serde::{Deserialize, Serialize};

use crate::diffgeo::{EndoField, FormField, MetricField};
use crate::dual::{Dual, Real};
use crate::error::{Error, Result};
use crate::forms::{d_eta_eval, d_omega_eval, f_eval, j_hat, j_lift, lift_components, omega_vec};
use crate::heisenberg::{MPoint, MTangent};
use crate::quatlib::{herm_inner_unchecked, imag_unit, QVector, Quaternion};
use crate::sampling::{sample_hvec, sample_rng, sample_z, Stats};

fn check_index(alpha: usize) -> Result<()> {
    if (1..=3).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "structure index {alpha} not in 1..=3"
        )))
    }
}

pub(crate) fn check_a(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "deformation parameter a = {a} must be positive"
        )))
    }
}

/// Raw value `dη_α(J_α lift X̂, lift Ŷ)` at the lift point `p`.
pub fn raw_metric<T: Real>(
    a: f64,
    alpha: usize,
    p: &MPoint<T>,
    x: &QVector<T>,
    y: &QVector<T>,
) -> T {
    let lx = lift_components(p, x);
    let ly = lift_components(p, y);
    d_eta_eval(a, alpha, p, &j_lift(alpha, p, &lx), &ly)
}

/// Measures the convention factor `c` in `dω₁(J₁X, Y) = c·g_ℍ(π_*X, π_*Y)` at the origin.
pub fn normalization_constant(n: usize) -> f64 {
    let p = MPoint::<f64>::identity(n);
    let mut e = QVector::zeros(n);
    e[0] = Quaternion::one();
    let le = lift_components(&p, &e);
    d_omega_eval(1, &j_lift(1, &p, &le), &le)
}

/// Euclidean reference metric `g_ℍ(X̂, Ŷ) = Re⟨X̂, Ŷ⟩`.
pub fn g_h<T: Real>(x: &QVector<T>, y: &QVector<T>) -> T {
    herm_inner_unchecked(x, y).w
}

/// The auxiliary metric `g_ω = Σ ω_i ⊗ ω_i + dω₁∘J₁` on ℳ.
pub fn g_omega_eval<T: Real>(p: &MPoint<T>, x: &MTangent<T>, y: &MTangent<T>) -> T {
    let wx = omega_vec(p, x);
    let wy = omega_vec(p, y);
    wx[0] * wy[0] + wx[1] * wy[1] + wx[2] * wy[2] + d_omega_eval(1, &j_lift(1, p, x), y)
}

/// The metric `g_a` on ℍⁿ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaMetric {
    pub n: usize,
    pub a: f64,
    c: f64,
}

impl GaMetric {
    pub fn new(n: usize, a: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        check_a(a)?;
        Ok(GaMetric {
            n,
            a,
            c: normalization_constant(n),
        })
    }

    /// The convention factor divided out of the raw evaluation.
    pub fn normalization(&self) -> f64 {
        self.c
    }

    /// `g(X̂, Ŷ)` at `z`, through the lift point `(0, z)` and structure index 1.
    pub fn eval<T: Real>(&self, z: &QVector<T>, x: &QVector<T>, y: &QVector<T>) -> T {
        self.eval_at(1, &MPoint::over(z.clone()), x, y)
    }

    /// `dη_α(J_α lift X̂, lift Ŷ) / c` through an arbitrary lift point `p`.
    pub fn eval_at<T: Real>(
        &self,
        alpha: usize,
        p: &MPoint<T>,
        x: &QVector<T>,
        y: &QVector<T>,
    ) -> T {
        raw_metric(self.a, alpha, p, x, y).scale(1.0 / self.c)
    }

    /// Closed form `f(z)·g_ℍ`.
    pub fn closed_form<T: Real>(&self, z: &QVector<T>, x: &QVector<T>, y: &QVector<T>) -> T {
        f_eval(self.a, z) * g_h(x, y)
    }

    /// Gram matrix of the lift-based evaluator in the real coordinates of ℍⁿ.
    pub fn gram_at(&self, z: &QVector<f64>) -> Vec<f64> {
        self.gram(&z.to_reals())
    }
}

impl MetricField for GaMetric {
    fn dim(&self) -> usize {
        4 * self.n
    }

    fn gram<T: Real>(&self, x: &[T]) -> Vec<T> {
        let d = 4 * self.n;
        let z = QVector::from_reals(x);
        let basis: Vec<QVector<T>> = (0..d)
            .map(|i| {
                let mut e = vec![T::zero(); d];
                e[i] = T::one();
                QVector::from_reals(&e)
            })
            .collect();
        let mut g = vec![T::zero(); d * d];
        for i in 0..d {
            for j in i..d {
                let v = self.eval(&z, &basis[i], &basis[j]);
                g[i * d + j] = v;
                g[j * d + i] = v;
            }
        }
        g
    }
}

/// `max |g(X̂, Ŷ) − f(z)·g_ℍ(X̂, Ŷ)|` (relative to `|X̂||Ŷ|`) over seeded samples.
pub fn conformal_identity_residual(g: &GaMetric, samples: usize, seed: u64) -> Stats {
    Stats::from_values((0..samples).map(|i| {
        let mut rng = sample_rng(seed, "metric.conformal", i as u64);
        let z = sample_z(&mut rng, g.n);
        let x = sample_hvec(&mut rng, g.n);
        let y = sample_hvec(&mut rng, g.n);
        (g.eval(&z, &x, &y) - g.closed_form(&z, &x, &y)).abs() / (x.norm() * y.norm()).max(1e-300)
    }))
}

/// `A_t^{(α)} = e^{i_α t a}`.
pub fn a_t<T: Real>(alpha: usize, a: f64, t: T) -> Quaternion<T> {
    Quaternion::exp_imag(alpha, t.scale(a))
}

/// `τ_α(z) = z e^{i_α a|z|²/2}`.
pub fn tau<T: Real>(alpha: usize, a: f64, z: &QVector<T>) -> QVector<T> {
    z.right_mul(a_t(alpha, a, z.norm_sqr().scale(0.5)))
}

/// `τ_α⁻¹(z) = z e^{−i_α a|z|²/2}`, valid since `|τ_α(z)| = |z|`.
pub fn tau_inv<T: Real>(alpha: usize, a: f64, z: &QVector<T>) -> QVector<T> {
    z.right_mul(a_t(alpha, a, -z.norm_sqr().scale(0.5)))
}

/// Analytic differential `dτ_α(X) = (X + z i_α a Re⟨z, X⟩) e^{i_α a|z|²/2}`.
pub fn tau_diff<T: Real>(alpha: usize, a: f64, z: &QVector<T>, x: &QVector<T>) -> QVector<T> {
    let ia = Quaternion::<T>::lift(imag_unit(alpha));
    let r = herm_inner_unchecked(z, x).w.scale(a);
    x.add(&z.right_mul(ia.scale(r)))
        .right_mul(a_t(alpha, a, z.norm_sqr().scale(0.5)))
}

/// `dτ_α(X)` by forward-mode differentiation of [`tau`].
pub fn tau_diff_dual(alpha: usize, a: f64, z: &QVector<f64>, x: &QVector<f64>) -> QVector<f64> {
    let zd = QVector(
        z.0.iter()
            .zip(&x.0)
            .map(|(p, v)| dual_quat(*p, *v))
            .collect(),
    );
    let out = tau(alpha, a, &zd);
    QVector(
        out.0
            .iter()
            .map(|q| Quaternion::new(q.w.eps, q.x.eps, q.y.eps, q.z.eps))
            .collect(),
    )
}

fn dual_quat(p: Quaternion<f64>, v: Quaternion<f64>) -> Quaternion<Dual<f64>> {
    Quaternion::new(
        Dual::new(p.w, v.w),
        Dual::new(p.x, v.x),
        Dual::new(p.y, v.y),
        Dual::new(p.z, v.z),
    )
}

/// The twist map `τ_α` for a fixed `(α, a)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistMap {
    pub alpha: usize,
    pub a: f64,
}

impl TwistMap {
    pub fn new(alpha: usize, a: f64) -> Result<Self> {
        check_index(alpha)?;
        check_a(a)?;
        Ok(TwistMap { alpha, a })
    }

    pub fn forward<T: Real>(&self, z: &QVector<T>) -> QVector<T> {
        tau(self.alpha, self.a, z)
    }

    pub fn inverse<T: Real>(&self, z: &QVector<T>) -> QVector<T> {
        tau_inv(self.alpha, self.a, z)
    }

    pub fn differential<T: Real>(&self, z: &QVector<T>, x: &QVector<T>) -> QVector<T> {
        tau_diff(self.alpha, self.a, z, x)
    }
}

/// Twisted projection `π_α(s, z) = z e^{−i_α a s_α}`, constant on ℛ_α-orbits.
pub fn pi_alpha<T: Real>(alpha: usize, a: f64, p: &MPoint<T>) -> QVector<T> {
    p.z.right_mul(a_t(alpha, a, -p.t[alpha - 1]))
}

/// `L_w(X) = X + a w i_α Im_α⟨w, X⟩`, the map `π_{α*}∘lift` at `(0, w)`.
pub fn l_map<T: Real>(alpha: usize, a: f64, w: &QVector<T>, x: &QVector<T>) -> QVector<T> {
    let c = herm_inner_unchecked(w, x).im_component(alpha).scale(a);
    x.add(&w.right_mul(Quaternion::<T>::lift(imag_unit(alpha)).scale(c)))
}

/// Inverse of [`l_map`] (Sherman–Morrison).
pub fn l_inv<T: Real>(alpha: usize, a: f64, w: &QVector<T>, u: &QVector<T>) -> QVector<T> {
    let denom = T::one() + w.norm_sqr().scale(a);
    let c = herm_inner_unchecked(w, u).im_component(alpha).scale(a) / denom;
    u.sub(&w.right_mul(Quaternion::<T>::lift(imag_unit(alpha)).scale(c)))
}

/// Horizontal preimage at `p` of `û ∈ T_{π_α(p)}ℍⁿ` under `π_{α*}`.
pub fn descended_preimage<T: Real>(
    alpha: usize,
    a: f64,
    p: &MPoint<T>,
    u: &QVector<T>,
) -> MTangent<T> {
    let twisted = u.right_mul(a_t(alpha, a, p.t[alpha - 1]));
    lift_components(p, &l_inv(alpha, a, &p.z, &twisted))
}

/// `Ω_α(û, v̂)` evaluated as `dη_α(X, Y)` at an arbitrary preimage `p` of the
/// base point, with `X, Y` the horizontal preimages of `û, v̂`.
pub fn omega_descended_at<T: Real>(
    alpha: usize,
    a: f64,
    p: &MPoint<T>,
    u: &QVector<T>,
    v: &QVector<T>,
) -> T {
    d_eta_eval(
        a,
        alpha,
        p,
        &descended_preimage(alpha, a, p, u),
        &descended_preimage(alpha, a, p, v),
    )
}

/// `Ω_α` at `w ∈ ℍⁿ` through the preimage `(0, w)`.
pub fn omega_descended<T: Real>(
    alpha: usize,
    a: f64,
    w: &QVector<T>,
    u: &QVector<T>,
    v: &QVector<T>,
) -> T {
    omega_descended_at(alpha, a, &MPoint::over(w.clone()), u, v)
}

/// The descended form `Ω_α` on ℍⁿ for a fixed `(α, a)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescendedForm {
    pub n: usize,
    pub alpha: usize,
    pub a: f64,
}

impl DescendedForm {
    pub fn new(n: usize, alpha: usize, a: f64) -> Result<Self> {
        check_index(alpha)?;
        check_a(a)?;
        Ok(DescendedForm { n, alpha, a })
    }

    pub fn eval(&self, w: &QVector<f64>, u: &QVector<f64>, v: &QVector<f64>) -> f64 {
        omega_descended(self.alpha, self.a, w, u, v)
    }

    /// `Ĵ_α(û) = π_{α*}(J_α X)` with `X` the preimage of `û` at `(0, w)`.
    pub fn j_hat(&self, w: &QVector<f64>, u: &QVector<f64>) -> QVector<f64> {
        descended_j(self.alpha, self.a, w, u)
    }
}

/// `Ĵ_α(û) = L_w(J_α L_w⁻¹ û)`, the complex structure induced on ℍⁿ = ℳ/ℛ_α by `J_α` on 𝖣.
pub fn descended_j<T: Real>(alpha: usize, a: f64, w: &QVector<T>, u: &QVector<T>) -> QVector<T> {
    let x = l_inv(alpha, a, w, u);
    l_map(alpha, a, w, &j_hat(alpha, &x))
}

/// [`descended_j`] as an endomorphism field in real coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescendedJ {
    pub n: usize,
    pub alpha: usize,
    pub a: f64,
}

impl EndoField for DescendedJ {
    fn matrix<T: Real>(&self, x: &[T]) -> Vec<T> {
        let d = 4 * self.n;
        let w = QVector::from_reals(x);
        let mut m = vec![T::zero(); d * d];
        for c in 0..d {
            let mut e = vec![T::zero(); d];
            e[c] = T::one();
            let col = descended_j(self.alpha, self.a, &w, &QVector::from_reals(&e)).to_reals();
            for (r, v) in col.into_iter().enumerate() {
                m[r * d + c] = v;
            }
        }
        m
    }
}

/// `ĝ_α(û, v̂) = Ω_α(Ĵ_α û, v̂) / Ω_α(Ĵ_α e, e)|₀`, the metric on ℍⁿ = ℳ/ℛ_α paired with
/// `(Ω_α, Ĵ_α)`, normalized to δ at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescendedMetric {
    pub n: usize,
    pub alpha: usize,
    pub a: f64,
    c: f64,
}

impl DescendedMetric {
    pub fn new(n: usize, alpha: usize, a: f64) -> Result<Self> {
        DescendedForm::new(n, alpha, a)?;
        let w = QVector::zeros(n);
        let mut e = QVector::zeros(n);
        e[0] = Quaternion::one();
        let c = omega_descended(alpha, a, &w, &descended_j(alpha, a, &w, &e), &e);
        Ok(DescendedMetric { n, alpha, a, c })
    }

    pub fn normalization(&self) -> f64 {
        self.c
    }

    pub fn eval<T: Real>(&self, w: &QVector<T>, u: &QVector<T>, v: &QVector<T>) -> T {
        let ju = descended_j(self.alpha, self.a, w, u);
        omega_descended(self.alpha, self.a, w, &ju, v).scale(1.0 / self.c)
    }
}

impl MetricField for DescendedMetric {
    fn dim(&self) -> usize {
        4 * self.n
    }

    fn gram<T: Real>(&self, x: &[T]) -> Vec<T> {
        let d = 4 * self.n;
        let w = QVector::from_reals(x);
        let basis: Vec<QVector<T>> = (0..d)
            .map(|i| {
                let mut e = vec![T::zero(); d];
                e[i] = T::one();
                QVector::from_reals(&e)
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

impl FormField for DescendedForm {
    fn dim(&self) -> usize {
        4 * self.n
    }
    fn degree(&self) -> usize {
        2
    }
    fn eval<T: Real>(&self, x: &[T], vecs: &[Vec<T>]) -> T {
        let w = QVector::from_reals(x);
        omega_descended(
            self.alpha,
            self.a,
            &w,
            &QVector::from_reals(&vecs[0]),
            &QVector::from_reals(&vecs[1]),
        )
    }
}

/// `Θ_α(X̂, Ŷ) = g(X̂, J_α Ŷ)` with the standard right multiplication `J_α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaDirect {
    pub g: GaMetric,
    pub alpha: usize,
}

impl FormField for ThetaDirect {
    fn dim(&self) -> usize {
        4 * self.g.n
    }
    fn degree(&self) -> usize {
        2
    }
    fn eval<T: Real>(&self, x: &[T], vecs: &[Vec<T>]) -> T {
        let z = QVector::from_reals(x);
        let u = QVector::from_reals(&vecs[0]);
        let v = QVector::from_reals(&vecs[1]);
        self.g.eval(&z, &u, &j_hat(self.alpha, &v))
    }
}

/// `Θ_α = τ_α^*Ω_α / c`, the same normalization as `g_a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaPullback {
    pub g: GaMetric,
    pub alpha: usize,
}

impl FormField for ThetaPullback {
    fn dim(&self) -> usize {
        4 * self.g.n
    }
    fn degree(&self) -> usize {
        2
    }
    fn eval<T: Real>(&self, x: &[T], vecs: &[Vec<T>]) -> T {
        let (al, a) = (self.alpha, self.g.a);
        let z = QVector::from_reals(x);
        let u = tau_diff(al, a, &z, &QVector::from_reals(&vecs[0]));
        let v = tau_diff(al, a, &z, &QVector::from_reals(&vecs[1]));
        omega_descended(al, a, &tau(al, a, &z), &u, &v).scale(1.0 / self.g.normalization())
    }
}

/// Both evaluations of `Θ_α(X̂, Ŷ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaValues {
    pub direct: f64,
    pub pullback: f64,
}

pub fn theta_eval(
    alpha: usize,
    g: &GaMetric,
    z: &QVector<f64>,
    x: &QVector<f64>,
    y: &QVector<f64>,
) -> ThetaValues {
    let (zr, vecs) = (z.to_reals(), [x.to_reals(), y.to_reals()]);
    ThetaValues {
        direct: ThetaDirect { g: *g, alpha }.eval(&zr, &vecs),
        pullback: ThetaPullback { g: *g, alpha }.eval(&zr, &vecs),
    }
}
