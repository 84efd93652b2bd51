//! The quaternionic Heisenberg group ℳ = ℝ³ × ℍⁿ, its euclidean group
//! E(ℳ) = ℳ ⋊ (Sp(n)·Sp(1)), the solvable actions ρ_α and their generators ξ_α.
//!
//! Central coordinates `(t₁, t₂, t₃)` are identified with the imaginary
//! quaternion `t₁i + t₂j + t₃k` throughout.

use serde::{Deserialize, Serialize};

use crate::dual::{Dual, Real};
use crate::error::{Error, Result};
use crate::quatlib::{
    conjugate_imag, herm_inner_unchecked, imag_unit, QMatrix, QVector, Quaternion, UnitQuaternion,
};

/// A point `(t, z)` of ℳ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MPoint<T = f64> {
    pub t: [T; 3],
    pub z: QVector<T>,
}

/// A tangent vector `Σ dt_α d/dt_α + Σ dz_m d/dx_m` of ℳ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MTangent<T = f64> {
    pub dt: [T; 3],
    pub dz: QVector<T>,
}

impl<T: Real> MPoint<T> {
    pub fn new(t: [T; 3], z: QVector<T>) -> Self {
        MPoint { t, z }
    }

    pub fn identity(n: usize) -> Self {
        MPoint {
            t: [T::zero(); 3],
            z: QVector::zeros(n),
        }
    }

    /// Point `(0, z)` over `z`.
    pub fn over(z: QVector<T>) -> Self {
        MPoint {
            t: [T::zero(); 3],
            z,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.z.len()
    }

    /// Flat coordinates `(t₁, t₂, t₃, x₁, …, x_{4n})`.
    pub fn to_flat(&self) -> Vec<T> {
        let mut v = self.t.to_vec();
        v.extend(self.z.to_reals());
        v
    }

    pub fn from_flat(x: &[T]) -> Self {
        MPoint {
            t: [x[0], x[1], x[2]],
            z: QVector::from_reals(&x[3..]),
        }
    }

    pub fn lift(p: &MPoint<f64>) -> Self {
        MPoint {
            t: p.t.map(T::from_f64),
            z: QVector::lift(&p.z),
        }
    }

    pub fn value(&self) -> MPoint<f64> {
        MPoint {
            t: self.t.map(|v| v.value()),
            z: self.z.value(),
        }
    }
}

impl<T: Real> MTangent<T> {
    pub fn new(dt: [T; 3], dz: QVector<T>) -> Self {
        MTangent { dt, dz }
    }

    pub fn zeros(n: usize) -> Self {
        MTangent {
            dt: [T::zero(); 3],
            dz: QVector::zeros(n),
        }
    }

    /// `d/dt_α`.
    pub fn d_dt(n: usize, alpha: usize) -> Self {
        let mut v = Self::zeros(n);
        v.dt[alpha - 1] = T::one();
        v
    }

    /// Purely vertical-free vector `(0, v̂)`.
    pub fn from_hvec(v: QVector<T>) -> Self {
        MTangent {
            dt: [T::zero(); 3],
            dz: v,
        }
    }

    pub fn to_flat(&self) -> Vec<T> {
        let mut v = self.dt.to_vec();
        v.extend(self.dz.to_reals());
        v
    }

    pub fn from_flat(x: &[T]) -> Self {
        MTangent {
            dt: [x[0], x[1], x[2]],
            dz: QVector::from_reals(&x[3..]),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        MTangent {
            dt: [
                self.dt[0] + o.dt[0],
                self.dt[1] + o.dt[1],
                self.dt[2] + o.dt[2],
            ],
            dz: self.dz.add(&o.dz),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-T::one()))
    }

    pub fn scale(&self, s: T) -> Self {
        MTangent {
            dt: self.dt.map(|x| x * s),
            dz: self.dz.scale(s),
        }
    }

    pub fn lift(v: &MTangent<f64>) -> Self {
        MTangent {
            dt: v.dt.map(T::from_f64),
            dz: QVector::lift(&v.dz),
        }
    }

    pub fn value(&self) -> MTangent<f64> {
        MTangent {
            dt: self.dt.map(|v| v.value()),
            dz: self.dz.value(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.to_flat()
            .iter()
            .map(|x| x.value().abs())
            .fold(0.0, f64::max)
    }
}

/// The point `p + ε V` with dual-number coordinates.
pub fn seed_point(p: &MPoint<f64>, v: &MTangent<f64>) -> MPoint<Dual<f64>> {
    let x = crate::dual::seed_direction(&p.to_flat(), &v.to_flat());
    MPoint::from_flat(&x)
}

/// Splits a dual-number point into its value and its infinitesimal part.
pub fn split_point(p: &MPoint<Dual<f64>>) -> (MPoint<f64>, MTangent<f64>) {
    let flat = p.to_flat();
    let re: Vec<f64> = flat.iter().map(|d| d.re).collect();
    let eps: Vec<f64> = flat.iter().map(|d| d.eps).collect();
    (MPoint::from_flat(&re), MTangent::from_flat(&eps))
}

/// Differential of a smooth self-map of ℳ, computed exactly with dual numbers.
pub fn pushforward<F>(map: F, p: &MPoint<f64>, v: &MTangent<f64>) -> MTangent<f64>
where
    F: Fn(&MPoint<Dual<f64>>) -> MPoint<Dual<f64>>,
{
    split_point(&map(&seed_point(p, v))).1
}

fn check_n(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        });
    }
    Ok(())
}

/// Group law `(t, z)(s, w) = (t + s − Im⟨z, w⟩, z + w)`.
pub fn m_mul<T: Real>(p: &MPoint<T>, q: &MPoint<T>) -> Result<MPoint<T>> {
    check_n(p.n(), q.n())?;
    Ok(m_mul_unchecked(p, q))
}

pub(crate) fn m_mul_unchecked<T: Real>(p: &MPoint<T>, q: &MPoint<T>) -> MPoint<T> {
    let im = herm_inner_unchecked(&p.z, &q.z).im();
    MPoint {
        t: [
            p.t[0] + q.t[0] - im[0],
            p.t[1] + q.t[1] - im[1],
            p.t[2] + q.t[2] - im[2],
        ],
        z: p.z.add(&q.z),
    }
}

/// Inverse `(t, z)⁻¹ = (−t, −z)` (the correction term vanishes since `Im⟨z, z⟩ = 0`).
pub fn m_inv<T: Real>(p: &MPoint<T>) -> MPoint<T> {
    MPoint {
        t: p.t.map(|x| -x),
        z: p.z.scale(-T::one()),
    }
}

/// Element `((t, v), A·α)` of E(ℳ).
///
/// Acts by `(s, z) ↦ (t, v) · (α s ᾱ, A z ᾱ)`, i.e. the automorphism
/// `(s, z) ↦ (α s ᾱ, A z ᾱ)` followed by left translation by `(t, v)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EMElement {
    pub t: [f64; 3],
    pub v: QVector<f64>,
    pub a: QMatrix,
    pub alpha: UnitQuaternion,
}

impl EMElement {
    pub fn new(t: [f64; 3], v: QVector<f64>, a: QMatrix, alpha: UnitQuaternion) -> Result<Self> {
        check_n(a.dim(), v.len())?;
        if !a.is_symplectic(1e-10) {
            return Err(Error::InvalidParameter(
                "matrix part is not in Sp(n)".into(),
            ));
        }
        Ok(EMElement { t, v, a, alpha })
    }

    pub fn identity(n: usize) -> Self {
        EMElement {
            t: [0.0; 3],
            v: QVector::zeros(n),
            a: QMatrix::identity(n),
            alpha: UnitQuaternion::identity(),
        }
    }

    /// Left translation by `(t, v)`.
    pub fn translation(t: [f64; 3], v: QVector<f64>) -> Self {
        let n = v.len();
        EMElement {
            t,
            v,
            a: QMatrix::identity(n),
            alpha: UnitQuaternion::identity(),
        }
    }

    /// Linear part `z ↦ A z ᾱ` with no translation.
    pub fn linear(a: QMatrix, alpha: UnitQuaternion) -> Self {
        let n = a.dim();
        EMElement {
            t: [0.0; 3],
            v: QVector::zeros(n),
            a,
            alpha,
        }
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }

    /// Translation part as a point of ℳ.
    pub fn translation_part(&self) -> MPoint<f64> {
        MPoint::new(self.t, self.v.clone())
    }

    /// The automorphism `(s, z) ↦ (α s ᾱ, A z ᾱ)`.
    pub fn automorphism<T: Real>(&self, p: &MPoint<T>) -> MPoint<T> {
        let al = self.alpha.get();
        MPoint {
            t: conjugate_imag(al, p.t),
            z: self.a.apply(&p.z).right_mul(Quaternion::lift(al.conj())),
        }
    }

    /// Group product `h₁ h₂`, so that `(h₁ h₂) p = h₁ (h₂ p)`.
    pub fn compose(&self, other: &EMElement) -> EMElement {
        let m = m_mul_unchecked(
            &self.translation_part(),
            &self.automorphism(&other.translation_part()),
        );
        EMElement {
            t: m.t,
            v: m.z,
            a: self.a.mul_mat(&other.a),
            alpha: self.alpha * other.alpha,
        }
    }
}

/// Action of `h ∈ E(ℳ)` on a point of ℳ.
pub fn em_act<T: Real>(h: &EMElement, p: &MPoint<T>) -> Result<MPoint<T>> {
    check_n(h.n(), p.n())?;
    Ok(em_act_unchecked(h, p))
}

pub(crate) fn em_act_unchecked<T: Real>(h: &EMElement, p: &MPoint<T>) -> MPoint<T> {
    m_mul_unchecked(&MPoint::lift(&h.translation_part()), &h.automorphism(p))
}

/// Selects the solvable group ℛ_α and a parameter triple `(t₁, t₂, t₃)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolvableIndex {
    pub alpha: usize,
    pub t: [f64; 3],
}

impl SolvableIndex {
    pub fn new(alpha: usize, t: [f64; 3]) -> Result<Self> {
        if !(1..=3).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "solvable index {alpha} not in 1..=3"
            )));
        }
        Ok(SolvableIndex { alpha, t })
    }
}

/// The one-parameter part `ρ_α(t_α)` as an element of E(ℳ):
/// central translation by `t_α e_α` composed with `z ↦ z e^{i_α a t_α}`.
pub fn rho_element(a: f64, alpha: usize, t_alpha: f64, n: usize) -> EMElement {
    let mut t = [0.0; 3];
    t[alpha - 1] = t_alpha;
    EMElement {
        t,
        v: QVector::zeros(n),
        a: QMatrix::identity(n),
        alpha: UnitQuaternion::exp_imag(alpha, -a * t_alpha),
    }
}

/// Action of ℛ_α: the central translations along the two complementary
/// directions, then `ρ_α(t_α)`. The central part rotates by the angle
/// `2 a t_α` in the complementary plane.
pub fn rho_act(a: f64, idx: SolvableIndex, p: &MPoint<f64>) -> MPoint<f64> {
    let al = idx.alpha;
    let mut shifted = p.clone();
    for b in 1..=3 {
        if b != al {
            shifted.t[b - 1] += idx.t[b - 1];
        }
    }
    em_act_unchecked(&rho_element(a, al, idx.t[al - 1], p.n()), &shifted)
}

/// Generator ξ_α of ρ_α: `d/dt_α + 2a (s × e_α)·d/dt + (z a i_α)·d/dx`.
pub fn xi_field<T: Real>(a: f64, alpha: usize, p: &MPoint<T>) -> MTangent<T> {
    let s = p.t;
    let two_a = T::from_f64(2.0 * a);
    let mut e = [T::zero(); 3];
    e[alpha - 1] = T::one();
    let cross = [
        s[1] * e[2] - s[2] * e[1],
        s[2] * e[0] - s[0] * e[2],
        s[0] * e[1] - s[1] * e[0],
    ];
    let dt = [
        e[0] + two_a * cross[0],
        e[1] + two_a * cross[1],
        e[2] + two_a * cross[2],
    ];
    let ia = Quaternion::<T>::lift(imag_unit(alpha).scale(a));
    MTangent {
        dt,
        dz: p.z.right_mul(ia),
    }
}

/// Central-difference derivative of `t ↦ ρ_α(t e_α) p` at `t = 0`.
pub fn rho_flow_derivative(a: f64, alpha: usize, p: &MPoint<f64>, h: f64) -> MTangent<f64> {
    let mut tp = [0.0; 3];
    tp[alpha - 1] = h;
    let mut tm = [0.0; 3];
    tm[alpha - 1] = -h;
    let fp = rho_act(a, SolvableIndex { alpha, t: tp }, p).to_flat();
    let fm = rho_act(a, SolvableIndex { alpha, t: tm }, p).to_flat();
    let d: Vec<f64> = fp
        .iter()
        .zip(&fm)
        .map(|(x, y)| (x - y) / (2.0 * h))
        .collect();
    MTangent::from_flat(&d)
}

/// A smooth vector field on ℳ that can be evaluated over any scalar type.
pub trait VectorField {
    fn eval<T: Real>(&self, p: &MPoint<T>) -> MTangent<T>;
}

/// Generator ξ_α as a [`VectorField`].
#[derive(Clone, Copy, Debug)]
pub struct XiField {
    pub a: f64,
    pub alpha: usize,
}

impl VectorField for XiField {
    fn eval<T: Real>(&self, p: &MPoint<T>) -> MTangent<T> {
        xi_field(self.a, self.alpha, p)
    }
}

/// Constant field `d/dt_β`.
#[derive(Clone, Copy, Debug)]
pub struct CentralField {
    pub beta: usize,
}

impl VectorField for CentralField {
    fn eval<T: Real>(&self, p: &MPoint<T>) -> MTangent<T> {
        MTangent::d_dt(p.n(), self.beta)
    }
}

/// Directional derivative `D_V X` of a field at `p`.
pub fn directional_derivative<X: VectorField>(
    x: &X,
    p: &MPoint<f64>,
    v: &MTangent<f64>,
) -> MTangent<f64> {
    let out = x.eval(&seed_point(p, v));
    MTangent::from_flat(&out.to_flat().iter().map(|d| d.eps).collect::<Vec<_>>())
}

/// Lie bracket `[X, Y] = D_X Y − D_Y X` computed exactly with dual numbers.
pub fn lie_bracket<X: VectorField, Y: VectorField>(x: &X, y: &Y, p: &MPoint<f64>) -> MTangent<f64> {
    let xv = x.eval(p);
    let yv = y.eval(p);
    directional_derivative(y, p, &xv).sub(&directional_derivative(x, p, &yv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quatlib::random_sp_n_seeded;
    use crate::sampling::{sample_em, sample_point, sample_rng};

    fn close(p: &MPoint<f64>, q: &MPoint<f64>, tol: f64) -> bool {
        p.to_flat()
            .iter()
            .zip(q.to_flat())
            .all(|(a, b)| (a - b).abs() < tol)
    }

    #[test]
    fn product_examples() {
        let o = MPoint::<f64>::identity(1);
        assert_eq!(m_mul(&o, &o).unwrap(), o);
        let p = MPoint::new([0.0; 3], QVector(vec![imag_unit(1)]));
        let q = MPoint::new([0.0; 3], QVector(vec![imag_unit(2)]));
        let r = m_mul(&p, &q).unwrap();
        assert_eq!(r.t, [0.0, 0.0, 1.0]);
        assert_eq!(r.z[0], Quaternion::new(0.0, 1.0, 1.0, 0.0));
        assert!(m_mul(&p, &MPoint::identity(2)).is_err());
    }

    #[test]
    fn center_commutes() {
        let mut rng = sample_rng(1, "center", 0);
        let p = sample_point(&mut rng, 2);
        let c = MPoint::new([0.4, -1.0, 2.0], QVector::zeros(2));
        assert!(close(
            &m_mul(&c, &p).unwrap(),
            &m_mul(&p, &c).unwrap(),
            1e-15
        ));
    }

    #[test]
    fn group_axioms() {
        for i in 0..100 {
            let mut rng = sample_rng(2, "axioms", i);
            let (p, q, r) = (
                sample_point(&mut rng, 2),
                sample_point(&mut rng, 2),
                sample_point(&mut rng, 2),
            );
            let l = m_mul(&m_mul(&p, &q).unwrap(), &r).unwrap();
            let rr = m_mul(&p, &m_mul(&q, &r).unwrap()).unwrap();
            assert!(close(&l, &rr, 1e-12));
            assert!(close(
                &m_mul(&p, &m_inv(&p)).unwrap(),
                &MPoint::identity(2),
                1e-12
            ));
        }
    }

    #[test]
    fn action_examples_and_laws() {
        let mut rng = sample_rng(3, "action", 0);
        let p = sample_point(&mut rng, 2);
        assert!(close(
            &em_act(&EMElement::identity(2), &p).unwrap(),
            &p,
            1e-15
        ));
        let b = [1.0, -2.0, 0.5];
        let moved = em_act(&EMElement::translation(b, QVector::zeros(2)), &p).unwrap();
        let want = MPoint::new([p.t[0] + b[0], p.t[1] + b[1], p.t[2] + b[2]], p.z.clone());
        assert!(close(&moved, &want, 1e-15));
        for i in 0..50 {
            let mut rng = sample_rng(3, "compose", i);
            let h1 = sample_em(&mut rng, 2);
            let h2 = sample_em(&mut rng, 2);
            let p = sample_point(&mut rng, 2);
            let lhs = em_act(&h1, &em_act(&h2, &p).unwrap()).unwrap();
            let rhs = em_act(&h1.compose(&h2), &p).unwrap();
            assert!(close(&lhs, &rhs, 1e-12));
        }
    }

    #[test]
    fn action_is_by_automorphisms_up_to_translation() {
        let a = random_sp_n_seeded(4, 2).unwrap();
        let h = EMElement::linear(a, UnitQuaternion::exp_imag(2, 0.7));
        let mut rng = sample_rng(4, "auto", 0);
        let (p, q) = (sample_point(&mut rng, 2), sample_point(&mut rng, 2));
        let lhs = em_act(&h, &m_mul(&p, &q).unwrap()).unwrap();
        let rhs = m_mul(&em_act(&h, &p).unwrap(), &em_act(&h, &q).unwrap()).unwrap();
        assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn rho_examples() {
        let a = 0.8;
        let mut rng = sample_rng(5, "rho", 0);
        let p = sample_point(&mut rng, 1);
        assert!(close(
            &rho_act(a, SolvableIndex::new(1, [0.0; 3]).unwrap(), &p),
            &p,
            1e-15
        ));
        let (t1, s2) = (0.3, 1.7);
        let q = MPoint::new([0.0, s2, 0.0], QVector::zeros(1));
        let r = rho_act(a, SolvableIndex::new(1, [t1, 0.0, 0.0]).unwrap(), &q);
        let ang = 2.0 * a * t1;
        assert!((r.t[0] - t1).abs() < 1e-15);
        assert!((r.t[1] - s2 * ang.cos()).abs() < 1e-14);
        assert!((r.t[2] + s2 * ang.sin()).abs() < 1e-14);
        let r = rho_act(a, SolvableIndex::new(1, [0.0, 0.4, -0.9]).unwrap(), &p);
        let want = MPoint::new([p.t[0], p.t[1] + 0.4, p.t[2] - 0.9], p.z.clone());
        assert!(close(&r, &want, 1e-15));
        assert!(SolvableIndex::new(4, [0.0; 3]).is_err());
    }

    #[test]
    fn xi_examples() {
        let a = 1.3;
        let o = MPoint::<f64>::identity(1);
        assert_eq!(
            xi_field(a, 1, &o).to_flat(),
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        );
        let (s2, s3) = (0.4, -1.1);
        let p = MPoint::new([0.0, s2, s3], QVector::zeros(1));
        let xi = xi_field(a, 1, &p);
        assert_eq!(xi.dt, [1.0, 2.0 * a * s3, -2.0 * a * s2]);
    }

    #[test]
    fn xi_generates_rho() {
        for alpha in 1..=3 {
            for i in 0..20 {
                let mut rng = sample_rng(6, "flow", i);
                let p = sample_point(&mut rng, 2);
                let fd = rho_flow_derivative(0.9, alpha, &p, 1e-5);
                let xi = xi_field(0.9, alpha, &p);
                assert!(fd.sub(&xi).max_abs() < 1e-8, "alpha {alpha}");
            }
        }
    }

    #[test]
    fn xi_bracket_with_center() {
        let a = 0.6;
        let mut rng = sample_rng(7, "bracket", 0);
        let p = sample_point(&mut rng, 1);
        for alpha in 1..=3 {
            for beta in 1..=3 {
                let b = lie_bracket(&XiField { a, alpha }, &CentralField { beta }, &p);
                assert!(b.dz.norm() < 1e-15);
                assert!(b.dt[alpha - 1].abs() < 1e-15);
            }
        }
    }
}
