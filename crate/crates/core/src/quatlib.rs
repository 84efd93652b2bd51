//! Quaternions, quaternionic vectors and matrices, and the covering Sp(1) → SO(3).
//!
//! Components are stored scalar-first in the basis `{1, i, j, k}`, so a
//! quaternion `x₁ + i x₂ + j x₃ + k x₄` has `w = x₁, x = x₂, y = x₃, z = x₄`.
//! Quaternionic vectors are columns; Sp(n) acts by left matrix multiplication
//! and Sp(1) by right scalar multiplication.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dual::Real;
use crate::error::{Error, Result};

/// Tolerance for the unit-norm check on [`UnitQuaternion`].
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quaternion<T = f64> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Quaternion<T> {
    #[inline]
    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Quaternion { w, x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn one() -> Self {
        Self::real(T::one())
    }

    #[inline]
    pub fn real(w: T) -> Self {
        Self::new(w, T::zero(), T::zero(), T::zero())
    }

    /// Imaginary quaternion `v₁ i + v₂ j + v₃ k`.
    #[inline]
    pub fn pure(v: [T; 3]) -> Self {
        Self::new(T::zero(), v[0], v[1], v[2])
    }

    #[inline]
    pub fn from_array(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    #[inline]
    pub fn to_array(self) -> [T; 4] {
        [self.w, self.x, self.y, self.z]
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn norm_sqr(self) -> T {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    #[inline]
    pub fn norm(self) -> T {
        self.norm_sqr().sqrt()
    }

    #[inline]
    pub fn scale(self, s: T) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn inverse(self) -> Self {
        self.conj().scale(self.norm_sqr().recip())
    }

    /// Imaginary part as a vector of ℝ³ in the order (i, j, k).
    #[inline]
    pub fn im(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    /// Component along the imaginary unit `i_alpha` (alpha ∈ {1, 2, 3}).
    #[inline]
    pub fn im_component(self, alpha: usize) -> T {
        match alpha {
            1 => self.x,
            2 => self.y,
            3 => self.z,
            _ => panic!("imaginary index {alpha} out of range"),
        }
    }

    /// `exp(theta · u)` for an imaginary unit `u` given by its index.
    pub fn exp_imag(alpha: usize, theta: T) -> Self {
        let mut v = [T::zero(); 3];
        v[alpha - 1] = theta.sin();
        let mut q = Self::pure(v);
        q.w = theta.cos();
        q
    }

    /// Converts an `f64` quaternion into this scalar type.
    pub fn lift(q: Quaternion<f64>) -> Self {
        Self::new(
            T::from_f64(q.w),
            T::from_f64(q.x),
            T::from_f64(q.y),
            T::from_f64(q.z),
        )
    }

    pub fn value(self) -> Quaternion<f64> {
        Quaternion::new(
            self.w.value(),
            self.x.value(),
            self.y.value(),
            self.z.value(),
        )
    }
}

/// The imaginary units `i, j, k` indexed 1..=3.
pub fn imag_unit(alpha: usize) -> Quaternion<f64> {
    match alpha {
        1 => Quaternion::new(0.0, 1.0, 0.0, 0.0),
        2 => Quaternion::new(0.0, 0.0, 1.0, 0.0),
        3 => Quaternion::new(0.0, 0.0, 0.0, 1.0),
        _ => panic!("imaginary index {alpha} out of range"),
    }
}

/// Hamilton product in the basis order `{1, i, j, k}`.
#[inline]
pub fn quat_mul<T: Real>(p: Quaternion<T>, q: Quaternion<T>) -> Quaternion<T> {
    Quaternion::new(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    )
}

impl<T: Real> Mul for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        quat_mul(self, o)
    }
}

impl<T: Real> Add for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// A quaternion of norm one, i.e. an element of Sp(1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitQuaternion(Quaternion<f64>);

impl UnitQuaternion {
    pub fn new(q: Quaternion<f64>) -> Result<Self> {
        let n = q.norm();
        if (n - 1.0).abs() >= UNIT_TOL {
            return Err(Error::NotUnit(n));
        }
        Ok(UnitQuaternion(q))
    }

    /// Normalizes a nonzero quaternion.
    pub fn normalize(q: Quaternion<f64>) -> Result<Self> {
        let n = q.norm();
        if n.is_nan() || n <= 0.0 || !n.is_finite() {
            return Err(Error::NotUnit(n));
        }
        Ok(UnitQuaternion(q.scale(1.0 / n)))
    }

    pub fn identity() -> Self {
        UnitQuaternion(Quaternion::one())
    }

    /// `exp(i_alpha · theta)`.
    pub fn exp_imag(alpha: usize, theta: f64) -> Self {
        UnitQuaternion(Quaternion::exp_imag(alpha, theta))
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let q = Quaternion::new(
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            );
            if let Ok(u) = Self::normalize(q) {
                return u;
            }
        }
    }

    #[inline]
    pub fn get(self) -> Quaternion<f64> {
        self.0
    }

    pub fn conj(self) -> Self {
        UnitQuaternion(self.0.conj())
    }
}

impl std::ops::Mul for UnitQuaternion {
    type Output = UnitQuaternion;

    fn mul(self, o: Self) -> Self {
        UnitQuaternion(self.0 * o.0)
    }
}

/// Rotation matrix `(a_{βγ})` defined by `α i_β ᾱ = Σ_γ a_{βγ} i_γ`.
pub fn so3_from_unit(alpha: UnitQuaternion) -> [[f64; 3]; 3] {
    let q = alpha.get();
    let mut m = [[0.0; 3]; 3];
    for (beta, row) in m.iter_mut().enumerate() {
        let r = q * imag_unit(beta + 1) * q.conj();
        *row = r.im();
    }
    m
}

/// Rotation of ℝ³ ≅ Im ℍ by conjugation `s ↦ α s ᾱ`.
pub fn conjugate_imag<T: Real>(alpha: Quaternion<f64>, s: [T; 3]) -> [T; 3] {
    let a = Quaternion::<T>::lift(alpha);
    (a * Quaternion::pure(s) * a.conj()).im()
}

/// Column vector of ℍⁿ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QVector<T = f64>(pub Vec<Quaternion<T>>);

impl<T: Real> QVector<T> {
    pub fn zeros(n: usize) -> Self {
        QVector(vec![Quaternion::zero(); n])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Builds a vector from `4n` real coordinates `(x₁, …, x_{4n})`.
    pub fn from_reals(xs: &[T]) -> Self {
        assert!(
            xs.len().is_multiple_of(4),
            "real coordinate count must be a multiple of 4"
        );
        QVector(
            xs.chunks_exact(4)
                .map(|c| Quaternion::new(c[0], c[1], c[2], c[3]))
                .collect(),
        )
    }

    pub fn to_reals(&self) -> Vec<T> {
        self.0.iter().flat_map(|q| q.to_array()).collect()
    }

    pub fn norm_sqr(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, q| acc + q.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Right scalar multiplication `z ↦ z q`.
    pub fn right_mul(&self, q: Quaternion<T>) -> Self {
        QVector(self.0.iter().map(|&c| c * q).collect())
    }

    pub fn scale(&self, s: T) -> Self {
        QVector(self.0.iter().map(|&c| c.scale(s)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        QVector(self.0.iter().zip(&o.0).map(|(&a, &b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        QVector(self.0.iter().zip(&o.0).map(|(&a, &b)| a - b).collect())
    }

    pub fn lift(v: &QVector<f64>) -> Self {
        QVector(v.0.iter().map(|&q| Quaternion::lift(q)).collect())
    }

    pub fn value(&self) -> QVector<f64> {
        QVector(self.0.iter().map(|q| q.value()).collect())
    }
}

impl<T> Index<usize> for QVector<T> {
    type Output = Quaternion<T>;
    fn index(&self, i: usize) -> &Quaternion<T> {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for QVector<T> {
    fn index_mut(&mut self, i: usize) -> &mut Quaternion<T> {
        &mut self.0[i]
    }
}

/// Hermitian product `⟨z, w⟩ = Σ_k z̄_k w_k`.
pub fn herm_inner<T: Real>(z: &QVector<T>, w: &QVector<T>) -> Result<Quaternion<T>> {
    if z.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: z.len(),
            found: w.len(),
        });
    }
    Ok(herm_inner_unchecked(z, w))
}

#[inline]
pub(crate) fn herm_inner_unchecked<T: Real>(z: &QVector<T>, w: &QVector<T>) -> Quaternion<T> {
    z.0.iter()
        .zip(&w.0)
        .fold(Quaternion::zero(), |acc, (&a, &b)| acc + a.conj() * b)
}

/// `Im⟨z, w⟩` as a vector of ℝ³.
pub fn im_part<T: Real>(q: Quaternion<T>) -> [T; 3] {
    q.im()
}

/// Square quaternionic matrix acting on column vectors from the left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QMatrix {
    n: usize,
    data: Vec<Quaternion<f64>>,
}

impl QMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![Quaternion::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = Quaternion::one();
        }
        QMatrix { n, data }
    }

    pub fn from_columns(cols: &[QVector<f64>]) -> Self {
        let n = cols.len();
        let mut data = vec![Quaternion::zero(); n * n];
        for (c, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), n, "square matrix expected");
            for r in 0..n {
                data[r * n + c] = col[r];
            }
        }
        QMatrix { n, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Quaternion<f64> {
        self.data[r * self.n + c]
    }

    pub fn column(&self, c: usize) -> QVector<f64> {
        QVector((0..self.n).map(|r| self.get(r, c)).collect())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut data = vec![Quaternion::zero(); n * n];
        for r in 0..n {
            for c in 0..n {
                data[c * n + r] = self.get(r, c).conj();
            }
        }
        QMatrix { n, data }
    }

    pub fn mul_mat(&self, o: &QMatrix) -> QMatrix {
        let n = self.n;
        let mut data = vec![Quaternion::zero(); n * n];
        for r in 0..n {
            for c in 0..n {
                let mut acc = Quaternion::zero();
                for k in 0..n {
                    acc = acc + self.get(r, k) * o.get(k, c);
                }
                data[r * n + c] = acc;
            }
        }
        QMatrix { n, data }
    }

    /// Left action `z ↦ A z`.
    pub fn apply<T: Real>(&self, z: &QVector<T>) -> QVector<T> {
        let n = self.n;
        QVector(
            (0..n)
                .map(|r| {
                    (0..n).fold(Quaternion::zero(), |acc, c| {
                        acc + Quaternion::lift(self.get(r, c)) * z[c]
                    })
                })
                .collect(),
        )
    }

    /// Max-entry residual of `A* A − I`.
    pub fn symplectic_residual(&self) -> f64 {
        let p = self.adjoint().mul_mat(self);
        let id = QMatrix::identity(self.n);
        p.data
            .iter()
            .zip(&id.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_symplectic(&self, tol: f64) -> bool {
        self.symplectic_residual() < tol
    }
}

const GRAM_SCHMIDT_ATTEMPTS: usize = 16;

/// Seeded random element of Sp(n) via quaternionic Gram–Schmidt on a Gaussian matrix.
///
/// Columns are orthonormalized with right scalar coefficients:
/// `c ← c − b ⟨b, c⟩` for each earlier unit column `b`.
pub fn random_sp_n<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<QMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    for _ in 0..GRAM_SCHMIDT_ATTEMPTS {
        let raw: Vec<QVector<f64>> = (0..n)
            .map(|_| {
                QVector(
                    (0..n)
                        .map(|_| {
                            Quaternion::new(
                                rng.sample(StandardNormal),
                                rng.sample(StandardNormal),
                                rng.sample(StandardNormal),
                                rng.sample(StandardNormal),
                            )
                        })
                        .collect(),
                )
            })
            .collect();
        if let Some(cols) = gram_schmidt(raw) {
            let m = QMatrix::from_columns(&cols);
            if m.is_symplectic(1e-12) {
                return Ok(m);
            }
        }
    }
    Err(Error::DegenerateDraw(GRAM_SCHMIDT_ATTEMPTS))
}

/// Same as [`random_sp_n`] with a fresh ChaCha stream for `seed`.
pub fn random_sp_n_seeded(seed: u64, n: usize) -> Result<QMatrix> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    random_sp_n(&mut rng, n)
}

fn gram_schmidt(mut cols: Vec<QVector<f64>>) -> Option<Vec<QVector<f64>>> {
    // two passes of classical Gram-Schmidt keep the residual at machine level
    for c in 0..cols.len() {
        for _ in 0..2 {
            for b in 0..c {
                let coeff = herm_inner_unchecked(&cols[b], &cols[c]);
                let proj = cols[b].right_mul(coeff);
                cols[c] = cols[c].sub(&proj);
            }
        }
        let nrm = cols[c].norm();
        if nrm < 1e-8 {
            return None;
        }
        cols[c] = cols[c].scale(1.0 / nrm);
    }
    Some(cols)
}

/// Real 4n×4n matrix (row-major) of right multiplication `z ↦ z q` on ℍⁿ ≅ ℝ^{4n}.
pub fn right_mul_matrix(q: Quaternion<f64>, n: usize) -> Vec<f64> {
    let d = 4 * n;
    let mut m = vec![0.0; d * d];
    for k in 0..n {
        for b in 0..4 {
            let mut e = [0.0; 4];
            e[b] = 1.0;
            let img = (Quaternion::from_array(e) * q).to_array();
            for (a, v) in img.iter().enumerate() {
                m[(4 * k + a) * d + 4 * k + b] = *v;
            }
        }
    }
    m
}

/// The standard complex structures `J_α z = z ī_α` as real matrices.
pub fn standard_j(alpha: usize, n: usize) -> Vec<f64> {
    right_mul_matrix(imag_unit(alpha).conj(), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    fn arb_quat() -> impl Strategy<Value = Quaternion> {
        (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
            .prop_map(|(a, b, c, d)| q(a, b, c, d))
    }

    #[test]
    fn defining_relations() {
        let (i, j, k) = (imag_unit(1), imag_unit(2), imag_unit(3));
        let m1 = Quaternion::real(-1.0);
        assert_eq!(i * i, m1);
        assert_eq!(j * j, m1);
        assert_eq!(k * k, m1);
        assert_eq!(i * j, k);
        assert_eq!(j * k, i);
        assert_eq!(k * i, j);
        assert_eq!(j * i, -k);
    }

    #[test]
    fn expansion_of_one_plus_i_times_one_plus_j() {
        assert_eq!(
            q(1.0, 1.0, 0.0, 0.0) * q(1.0, 0.0, 1.0, 0.0),
            q(1.0, 1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn inner_product_examples() {
        let z = QVector(vec![imag_unit(1)]);
        let w = QVector(vec![imag_unit(2)]);
        assert_eq!(im_part(herm_inner(&z, &w).unwrap()), [0.0, 0.0, -1.0]);
        let v = QVector(vec![q(0.3, -1.0, 2.0, 0.5), q(1.0, 0.0, -0.2, 0.7)]);
        let s = herm_inner(&v, &v).unwrap();
        assert!((s.w - v.norm_sqr()).abs() < 1e-15);
        assert!(s.im().iter().all(|c| c.abs() < 1e-15));
        assert_eq!(
            herm_inner(&v, &QVector::zeros(2)).unwrap(),
            Quaternion::zero()
        );
        assert!(matches!(
            herm_inner(&v, &z),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn so3_examples() {
        let id = so3_from_unit(UnitQuaternion::identity());
        assert_eq!(id, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let minus = so3_from_unit(UnitQuaternion::new(Quaternion::real(-1.0)).unwrap());
        assert_eq!(minus, id);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = so3_from_unit(UnitQuaternion::new(q(s, s, 0.0, 0.0)).unwrap());
        let expect = [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]];
        for r in 0..3 {
            for c in 0..3 {
                assert!((m[r][c] - expect[r][c]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn non_unit_rejected() {
        assert!(matches!(
            UnitQuaternion::new(q(1.0, 1.0, 0.0, 0.0)),
            Err(Error::NotUnit(_))
        ));
    }

    #[test]
    fn random_sp_n_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_sp_n(&mut rng, 1).unwrap();
        assert!((u.get(0, 0).norm() - 1.0).abs() < 1e-12);
        for n in 1..=3 {
            let m = random_sp_n_seeded(11, n).unwrap();
            assert!(m.symplectic_residual() < 1e-12);
            assert_eq!(m, random_sp_n_seeded(11, n).unwrap());
        }
        assert_ne!(
            random_sp_n_seeded(1, 2).unwrap(),
            random_sp_n_seeded(2, 2).unwrap()
        );
        assert!(random_sp_n(&mut rng, 0).is_err());
    }

    #[test]
    fn right_mul_matrix_matches_product() {
        let z = QVector(vec![q(0.1, 0.2, -0.3, 0.4), q(-1.0, 0.5, 0.25, 2.0)]);
        let p = q(0.3, -0.7, 0.2, 0.9);
        let m = right_mul_matrix(p, 2);
        let x = z.to_reals();
        let img: Vec<f64> = (0..8)
            .map(|r| (0..8).map(|c| m[r * 8 + c] * x[c]).sum())
            .collect();
        let want = z.right_mul(p).to_reals();
        for (a, b) in img.iter().zip(&want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(p in arb_quat(), r in arb_quat()) {
            let lhs = (p * r).norm();
            prop_assert!((lhs - p.norm() * r.norm()).abs() < 1e-12 * (1.0 + lhs));
        }

        #[test]
        fn inverse_of_unit(p in arb_quat()) {
            prop_assume!(p.norm() > 1e-3);
            let u = UnitQuaternion::normalize(p).unwrap().get();
            let prod = u * u.inverse();
            prop_assert!((prod - Quaternion::one()).norm() < 1e-15);
        }

        #[test]
        fn covering_is_homomorphism(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = UnitQuaternion::random(&mut rng);
            let b = UnitQuaternion::random(&mut rng);
            let ma = so3_from_unit(a);
            let mb = so3_from_unit(b);
            let mab = so3_from_unit(a * b);
            for r in 0..3 {
                for c in 0..3 {
                    // row β holds the image of i_β, so the product reverses: M_ab = M_b M_a
                    let prod: f64 = (0..3).map(|k| mb[r][k] * ma[k][c]).sum();
                    prop_assert!((prod - mab[r][c]).abs() < 1e-12);
                }
            }
        }
    }
}
