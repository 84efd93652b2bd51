//! Contact data on ℳ: the ℝ³-valued form `ω = dt + Im⟨z, dz⟩`, the conformal
//! factor `f = 1/(1 + a|z|²)`, `η = f ω`, their exterior derivatives, the
//! distribution `𝖣 = ker ω`, horizontal lifts and the hypercomplex structure on 𝖣.
//!
//! Conventions: `dθ(X, Y) = Xθ(Y) − Yθ(X) − θ([X, Y])` and
//! `(α ∧ β)(X, Y) = α(X)β(Y) − α(Y)β(X)`, both without a factor 1/2.
//! With these, `dω_α(X, Y) = 2 Im_α⟨X̂, Ŷ⟩` where `X̂ = π_* X`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dual::Real;
use crate::error::{Error, Result};
use crate::heisenberg::{MPoint, MTangent, VectorField};
use crate::quatlib::{herm_inner_unchecked, imag_unit, QVector, Quaternion};

/// `ω(V)` as the vector `(ω₁(V), ω₂(V), ω₃(V))`.
pub fn omega_vec<T: Real>(p: &MPoint<T>, v: &MTangent<T>) -> [T; 3] {
    let im = herm_inner_unchecked(&p.z, &v.dz).im();
    [v.dt[0] + im[0], v.dt[1] + im[1], v.dt[2] + im[2]]
}

/// `ω(V)` as the imaginary quaternion `ω₁ i + ω₂ j + ω₃ k`.
pub fn omega_quat<T: Real>(p: &MPoint<T>, v: &MTangent<T>) -> Quaternion<T> {
    Quaternion::pure(omega_vec(p, v))
}

/// `ω_α(V)`, e.g. `ω₁ = dt₁ + Σ_k (x_{4k−3}dx_{4k−2} − x_{4k−2}dx_{4k−3} + x_{4k}dx_{4k−1} − x_{4k−1}dx_{4k})`.
pub fn omega_eval<T: Real>(alpha: usize, p: &MPoint<T>, v: &MTangent<T>) -> T {
    omega_vec(p, v)[alpha - 1]
}

/// Conformal factor `f = 1/(1 + a|z|²)`.
pub fn f_eval<T: Real>(a: f64, z: &QVector<T>) -> T {
    (T::one() + z.norm_sqr().scale(a)).recip()
}

/// `df(V) = −2a f² Re⟨z, dz⟩`.
pub fn df_eval<T: Real>(a: f64, z: &QVector<T>, dz: &QVector<T>) -> T {
    let f = f_eval(a, z);
    -(f * f * herm_inner_unchecked(z, dz).w).scale(2.0 * a)
}

/// `η_α(V) = f ω_α(V)`.
pub fn eta_eval<T: Real>(a: f64, alpha: usize, p: &MPoint<T>, v: &MTangent<T>) -> T {
    f_eval(a, &p.z) * omega_eval(alpha, p, v)
}

/// `η(V)` as a 3-vector.
pub fn eta_vec<T: Real>(a: f64, p: &MPoint<T>, v: &MTangent<T>) -> [T; 3] {
    let f = f_eval(a, &p.z);
    omega_vec(p, v).map(|w| f * w)
}

/// `dω_α(X, Y) = 2 Im_α⟨X̂, Ŷ⟩` (constant coefficients).
pub fn d_omega_eval<T: Real>(alpha: usize, x: &MTangent<T>, y: &MTangent<T>) -> T {
    herm_inner_unchecked(&x.dz, &y.dz)
        .im_component(alpha)
        .scale(2.0)
}

/// `dη_α = df ∧ ω_α + f dω_α`.
pub fn d_eta_eval<T: Real>(
    a: f64,
    alpha: usize,
    p: &MPoint<T>,
    x: &MTangent<T>,
    y: &MTangent<T>,
) -> T {
    let dfx = df_eval(a, &p.z, &x.dz);
    let dfy = df_eval(a, &p.z, &y.dz);
    dfx * omega_eval(alpha, p, y) - dfy * omega_eval(alpha, p, x)
        + f_eval(a, &p.z) * d_omega_eval(alpha, x, y)
}

/// Components of a 1-form at a base point, dual to `(d/dt₁..₃, d/dx₁..d/dx_{4n})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoVector {
    pub base: MPoint<f64>,
    pub comps: Vec<f64>,
}

impl CoVector {
    pub fn pair(&self, v: &MTangent<f64>) -> f64 {
        self.comps.iter().zip(v.to_flat()).map(|(c, x)| c * x).sum()
    }

    /// Materializes `ω_α` at `p` by evaluating on coordinate vectors.
    pub fn omega(alpha: usize, p: &MPoint<f64>) -> Self {
        Self::from_eval(p, |v| omega_eval(alpha, p, v))
    }

    pub fn eta(a: f64, alpha: usize, p: &MPoint<f64>) -> Self {
        Self::from_eval(p, |v| eta_eval(a, alpha, p, v))
    }

    fn from_eval(p: &MPoint<f64>, f: impl Fn(&MTangent<f64>) -> f64) -> Self {
        let d = 4 * p.n() + 3;
        let comps = (0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                f(&MTangent::from_flat(&e))
            })
            .collect();
        CoVector {
            base: p.clone(),
            comps,
        }
    }
}

/// An antisymmetric bilinear form field on ℳ.
pub trait TwoFormEval {
    fn eval(&self, p: &MPoint<f64>, x: &MTangent<f64>, y: &MTangent<f64>) -> f64;

    /// Dense matrix `M_{ij} = Θ(e_i, e_j)` in flat coordinates, row-major.
    fn matrix(&self, p: &MPoint<f64>) -> Vec<f64> {
        let d = 4 * p.n() + 3;
        let basis: Vec<MTangent<f64>> = (0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                MTangent::from_flat(&e)
            })
            .collect();
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                m[i * d + j] = self.eval(p, &basis[i], &basis[j]);
            }
        }
        m
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DOmega {
    pub alpha: usize,
}

impl TwoFormEval for DOmega {
    fn eval(&self, _p: &MPoint<f64>, x: &MTangent<f64>, y: &MTangent<f64>) -> f64 {
        d_omega_eval(self.alpha, x, y)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DEta {
    pub a: f64,
    pub alpha: usize,
}

impl TwoFormEval for DEta {
    fn eval(&self, p: &MPoint<f64>, x: &MTangent<f64>, y: &MTangent<f64>) -> f64 {
        d_eta_eval(self.a, self.alpha, p, x, y)
    }
}

/// Base tolerance for the horizontality check of [`HorizontalVec`].
pub const HORIZONTAL_TOL: f64 = 1e-12;

/// A tangent vector in `𝖣 = ker ω` together with its base point.
#[derive(Clone, Debug, PartialEq)]
pub struct HorizontalVec {
    base: MPoint<f64>,
    v: MTangent<f64>,
}

impl HorizontalVec {
    /// Checks `|ω_α(V)| < 1e−12` (scaled by `max(1, |z||V|)`) for every α.
    pub fn new(base: MPoint<f64>, v: MTangent<f64>) -> Result<Self> {
        let w = omega_vec(&base, &v);
        let scale = 1f64.max(base.z.norm() * v.dz.norm());
        let worst = w.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if worst >= HORIZONTAL_TOL * scale {
            return Err(Error::InvalidParameter(format!(
                "vector is not horizontal: |ω(V)| = {worst:e}"
            )));
        }
        Ok(HorizontalVec { base, v })
    }

    pub fn base(&self) -> &MPoint<f64> {
        &self.base
    }

    pub fn vector(&self) -> &MTangent<f64> {
        &self.v
    }

    /// `π_* V`.
    pub fn project(&self) -> &QVector<f64> {
        &self.v.dz
    }

    pub fn into_tangent(self) -> MTangent<f64> {
        self.v
    }
}

/// Horizontal lift of `v̂ ∈ T_{π(p)}ℍⁿ`: the unique `V ∈ 𝖣_p` with `π_* V = v̂`,
/// namely `V = v̂ − Σ_α ω_α(v̂) d/dt_α`.
pub fn lift_components<T: Real>(p: &MPoint<T>, vh: &QVector<T>) -> MTangent<T> {
    let im = herm_inner_unchecked(&p.z, vh).im();
    MTangent {
        dt: im.map(|x| -x),
        dz: vh.clone(),
    }
}

pub fn horizontal_lift(p: &MPoint<f64>, vh: &QVector<f64>) -> HorizontalVec {
    HorizontalVec {
        base: p.clone(),
        v: lift_components(p, vh),
    }
}

/// `J_α` on 𝖣: the horizontal lift of `(π_* V) ī_α`.
pub fn j_on_d(alpha: usize, v: &HorizontalVec) -> HorizontalVec {
    horizontal_lift(&v.base, &j_hat(alpha, v.project()))
}

/// Standard `J_α` on ℍⁿ: right multiplication by `ī_α`.
pub fn j_hat<T: Real>(alpha: usize, v: &QVector<T>) -> QVector<T> {
    v.right_mul(Quaternion::lift(imag_unit(alpha).conj()))
}

/// Generic-scalar version of [`j_on_d`] acting on any tangent vector through its projection.
pub fn j_lift<T: Real>(alpha: usize, p: &MPoint<T>, v: &MTangent<T>) -> MTangent<T> {
    lift_components(p, &j_hat(alpha, &v.dz))
}

/// Kind of the explicit 𝖣-frame vector at index `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DBasisKind {
    /// `v_k = z_k` (radial direction in slot k).
    V,
    /// `w_k = |z_k|² d/dt₁ + z_k ī`.
    W,
    /// `u_k = |z_k|² d/dt₂ + z_k j̄`.
    U,
    /// `s_k = |z_k|² d/dt₃ + z_k k̄`.
    S,
}

impl DBasisKind {
    pub const ALL: [DBasisKind; 4] = [DBasisKind::V, DBasisKind::W, DBasisKind::U, DBasisKind::S];

    /// Imaginary index paired with this kind (0 for `V`).
    pub fn index(self) -> usize {
        match self {
            DBasisKind::V => 0,
            DBasisKind::W => 1,
            DBasisKind::U => 2,
            DBasisKind::S => 3,
        }
    }
}

/// Explicit frame vector as a vector field on ℳ.
#[derive(Clone, Copy, Debug)]
pub struct DBasisField {
    pub kind: DBasisKind,
    pub k: usize,
}

impl DBasisField {
    /// The ℍⁿ part only (the barred fields `w̄_k, ū_k, s̄_k` for non-`V` kinds).
    pub fn hat<T: Real>(&self, z: &QVector<T>) -> QVector<T> {
        let mut out = QVector::zeros(z.len());
        let zk = z[self.k];
        out[self.k] = match self.kind {
            DBasisKind::V => zk,
            other => zk * Quaternion::lift(imag_unit(other.index()).conj()),
        };
        out
    }
}

impl VectorField for DBasisField {
    fn eval<T: Real>(&self, p: &MPoint<T>) -> MTangent<T> {
        let mut dt = [T::zero(); 3];
        if self.kind != DBasisKind::V {
            dt[self.kind.index() - 1] = p.z[self.k].norm_sqr();
        }
        MTangent {
            dt,
            dz: self.hat(&p.z),
        }
    }
}

/// The explicit frame `{v_k, w_k, u_k, s_k}` of 𝖣 at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct DBasis {
    pub base: MPoint<f64>,
    /// Vectors ordered `v₁, w₁, u₁, s₁, v₂, …`.
    pub vectors: Vec<MTangent<f64>>,
}

impl DBasis {
    pub fn fields(n: usize) -> Vec<DBasisField> {
        (0..n)
            .flat_map(|k| DBasisKind::ALL.map(|kind| DBasisField { kind, k }))
            .collect()
    }

    /// Numerical rank of the frame (SVD with relative threshold).
    pub fn rank(&self) -> usize {
        let d = 4 * self.base.n() + 3;
        let m = DMatrix::from_fn(self.vectors.len(), d, |r, c| self.vectors[r].to_flat()[c]);
        let sv = m.singular_values();
        let top = sv.iter().cloned().fold(0.0, f64::max);
        if top == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > 1e-10 * top).count()
    }
}

/// Frame of 𝖣 at `p`; fails with `RankDeficient` where some `z_k = 0`.
pub fn d_basis(p: &MPoint<f64>) -> Result<DBasis> {
    let basis = d_basis_raw(p);
    let r = basis.rank();
    let want = 4 * p.n();
    if r < want {
        return Err(Error::RankDeficient {
            rank: r,
            expected: want,
        });
    }
    Ok(basis)
}

/// Frame of 𝖣 at `p` without the rank check.
pub fn d_basis_raw(p: &MPoint<f64>) -> DBasis {
    let vectors = DBasis::fields(p.n()).iter().map(|f| f.eval(p)).collect();
    DBasis {
        base: p.clone(),
        vectors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::{lie_bracket, xi_field};
    use crate::sampling::{sample_hvec, sample_mvec, sample_point, sample_rng};

    #[test]
    fn omega_examples() {
        let mut rng = sample_rng(1, "omega", 0);
        let p = sample_point(&mut rng, 2);
        assert_eq!(omega_eval(1, &p, &MTangent::d_dt(2, 1)), 1.0);
        let a = 0.7;
        let xi = xi_field(a, 1, &p);
        assert!((omega_eval(1, &p, &xi) - (1.0 + a * p.z.norm_sqr())).abs() < 1e-13);
        let o = MPoint::over(QVector::zeros(2));
        let v = MTangent::from_flat(&sample_mvec(&mut rng, 2));
        for al in 1..=3 {
            assert_eq!(omega_eval(al, &o, &v), v.dt[al - 1]);
        }
    }

    #[test]
    fn omega_coordinate_formula() {
        // ω_α coefficients written out per quaternionic slot
        let mut rng = sample_rng(1, "omega-coords", 0);
        let p = sample_point(&mut rng, 2);
        let v = MTangent::from_flat(&sample_mvec(&mut rng, 2));
        let x = p.z.to_reals();
        let dx = v.dz.to_reals();
        let mut w = v.dt;
        for k in 0..2 {
            let (x1, x2, x3, x4) = (x[4 * k], x[4 * k + 1], x[4 * k + 2], x[4 * k + 3]);
            let (d1, d2, d3, d4) = (dx[4 * k], dx[4 * k + 1], dx[4 * k + 2], dx[4 * k + 3]);
            w[0] += x1 * d2 - x2 * d1 + x4 * d3 - x3 * d4;
            w[1] += x1 * d3 - x3 * d1 + x2 * d4 - x4 * d2;
            w[2] += x1 * d4 - x4 * d1 + x3 * d2 - x2 * d3;
        }
        let got = omega_vec(&p, &v);
        for al in 0..3 {
            assert!((got[al] - w[al]).abs() < 1e-13);
        }
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_eval(2.0, &QVector::<f64>::zeros(1)), 1.0);
        let z = QVector(vec![Quaternion::new(1.0, 0.0, 0.0, 0.0)]);
        assert_eq!(f_eval(1.0, &z), 0.5);
    }

    #[test]
    fn d_omega_unit_pair() {
        let e = |i: usize| {
            let mut v = vec![0.0; 7];
            v[3 + i] = 1.0;
            MTangent::from_flat(&v)
        };
        assert_eq!(d_omega_eval(1, &e(0), &e(1)), 2.0);
        assert_eq!(d_omega_eval(2, &e(0), &e(2)), 2.0);
        assert_eq!(d_omega_eval(3, &e(0), &e(3)), 2.0);
    }

    #[test]
    fn lift_roundtrip_and_j() {
        let mut rng = sample_rng(2, "lift", 0);
        let p = sample_point(&mut rng, 2);
        let vh = sample_hvec(&mut rng, 2);
        let lv = horizontal_lift(&p, &vh);
        assert_eq!(lv.project(), &vh);
        assert!(HorizontalVec::new(p.clone(), lv.vector().clone()).is_ok());
        let back = horizontal_lift(&p, lv.project());
        assert_eq!(back, lv);
        assert!(HorizontalVec::new(p.clone(), MTangent::d_dt(2, 1)).is_err());
        for al in 1..=3 {
            let jj = j_on_d(al, &j_on_d(al, &lv));
            assert!(jj.vector().add(lv.vector()).max_abs() < 1e-12);
        }
        let j12 = j_on_d(1, &j_on_d(2, &lv));
        let j3 = j_on_d(3, &lv);
        assert!(j12.vector().sub(j3.vector()).max_abs() < 1e-12);
    }

    #[test]
    fn j1_on_unit_at_origin() {
        let o = MPoint::over(QVector::zeros(1));
        let v = horizontal_lift(&o, &QVector(vec![Quaternion::one()]));
        let jv = j_on_d(1, &v);
        assert_eq!(jv.project()[0], Quaternion::new(0.0, -1.0, 0.0, 0.0));
    }

    #[test]
    fn d_basis_examples() {
        let p = MPoint::over(QVector(vec![Quaternion::new(1.0, 0.0, 0.0, 0.0)]));
        let b = d_basis(&p).unwrap();
        assert_eq!(b.rank(), 4);
        let zero = MPoint::over(QVector::zeros(1));
        assert!(matches!(
            d_basis(&zero),
            Err(Error::RankDeficient {
                rank: 0,
                expected: 4
            })
        ));
        let mut rng = sample_rng(3, "dbasis", 0);
        let p = sample_point(&mut rng, 2);
        let b = d_basis(&p).unwrap();
        for v in &b.vectors {
            for al in 1..=3 {
                assert!(omega_eval(al, &p, v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn u_field_coordinates() {
        // u₁ = |z|² d/dt₂ + x₃ d/dx₁ + x₄ d/dx₂ − x₁ d/dx₃ − x₂ d/dx₄
        let p = MPoint::over(QVector(vec![Quaternion::new(0.3, -0.5, 1.1, 0.7)]));
        let u = DBasisField {
            kind: DBasisKind::U,
            k: 0,
        }
        .eval(&p)
        .to_flat();
        let want = [0.0, 0.09 + 0.25 + 1.21 + 0.49, 0.0, 1.1, 0.7, -0.3, 0.5];
        for (a, b) in u.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn brackets_span_center() {
        let mut rng = sample_rng(4, "cc", 0);
        let p = sample_point(&mut rng, 1);
        let fields = DBasis::fields(1);
        let mut rows = Vec::new();
        for i in 0..fields.len() {
            for j in i + 1..fields.len() {
                rows.push(lie_bracket(&fields[i], &fields[j], &p));
            }
        }
        // projecting brackets to their vertical (ω) parts gives rank 3
        let m = DMatrix::from_fn(rows.len(), 3, |r, c| omega_vec(&p, &rows[r])[c]);
        let sv = m.singular_values();
        assert_eq!(sv.iter().filter(|&&s| s > 1e-8).count(), 3);
    }
}
