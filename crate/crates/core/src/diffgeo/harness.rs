//! Test metrics with known curvature, and closed-form conformal oracles.

use super::MetricField;
use crate::dual::Real;

/// Euclidean metric on ℝ^dim.
#[derive(Clone, Copy, Debug)]
pub struct FlatMetric {
    pub dim: usize,
}

impl MetricField for FlatMetric {
    fn dim(&self) -> usize {
        self.dim
    }
    fn gram<T: Real>(&self, _x: &[T]) -> Vec<T> {
        identity(self.dim, T::one())
    }
}

/// Constant multiple `c·δ` of the euclidean metric.
#[derive(Clone, Copy, Debug)]
pub struct ScaledFlat {
    pub dim: usize,
    pub c: f64,
}

impl MetricField for ScaledFlat {
    fn dim(&self) -> usize {
        self.dim
    }
    fn gram<T: Real>(&self, _x: &[T]) -> Vec<T> {
        identity(self.dim, T::from_f64(self.c))
    }
}

fn identity<T: Real>(n: usize, d: T) -> Vec<T> {
    let mut g = vec![T::zero(); n * n];
    for i in 0..n {
        g[i * n + i] = d;
    }
    g
}

/// Log-conformal factor `φ` with closed-form gradient and Hessian.
pub trait ConformalPhi: Sync {
    fn phi<T: Real>(&self, x: &[T]) -> T;
    fn grad(&self, x: &[f64]) -> Vec<f64>;
    /// Euclidean Hessian, row-major.
    fn hess(&self, x: &[f64]) -> Vec<f64>;
}

/// The metric `e^{2φ} δ`.
#[derive(Clone, Debug)]
pub struct ConformalMetric<P> {
    pub dim: usize,
    pub phi: P,
}

impl<P: ConformalPhi> ConformalMetric<P> {
    pub fn new(dim: usize, phi: P) -> Self {
        ConformalMetric { dim, phi }
    }
}

impl<P: ConformalPhi> MetricField for ConformalMetric<P> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn gram<T: Real>(&self, x: &[T]) -> Vec<T> {
        let e = (self.phi.phi(x).scale(2.0)).exp();
        identity(self.dim, e)
    }
}

/// `φ = Σ lin_i x_i + quad·|x|²/2 + cross·x₀x₁`.
#[derive(Clone, Debug)]
pub struct PolyPhi {
    pub lin: Vec<f64>,
    pub quad: f64,
    pub cross: f64,
}

impl ConformalPhi for PolyPhi {
    fn phi<T: Real>(&self, x: &[T]) -> T {
        let mut s = T::zero();
        for (c, xi) in self.lin.iter().zip(x) {
            s += xi.scale(*c);
        }
        let r2 = x.iter().fold(T::zero(), |acc, &v| acc + v * v);
        s + r2.scale(0.5 * self.quad) + (x[0] * x[1]).scale(self.cross)
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        let mut g: Vec<f64> = (0..x.len())
            .map(|i| self.lin[i] + self.quad * x[i])
            .collect();
        g[0] += self.cross * x[1];
        g[1] += self.cross * x[0];
        g
    }
    fn hess(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let mut h = identity(n, self.quad);
        h[1] += self.cross;
        h[n] += self.cross;
        h
    }
}

/// `φ = −½ ln(1 + a|x|²)`, the log-factor of `g_a = f·g_ℍ`.
#[derive(Clone, Copy, Debug)]
pub struct GaPhi {
    pub a: f64,
}

impl ConformalPhi for GaPhi {
    fn phi<T: Real>(&self, x: &[T]) -> T {
        let r2 = x.iter().fold(T::zero(), |acc, &v| acc + v * v);
        -(T::one() + r2.scale(self.a)).ln().scale(0.5)
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        let q = 1.0 + self.a * x.iter().map(|v| v * v).sum::<f64>();
        x.iter().map(|v| -self.a * v / q).collect()
    }
    fn hess(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let q = 1.0 + self.a * x.iter().map(|v| v * v).sum::<f64>();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                h[i * n + j] = 2.0 * self.a * self.a * x[i] * x[j] / (q * q)
                    - if i == j { self.a / q } else { 0.0 };
            }
        }
        h
    }
}

/// Stereographic round sphere of radius `radius`: `φ = ln(2R) − ln(1 + |x|²)`.
#[derive(Clone, Copy, Debug)]
pub struct SpherePhi {
    pub radius: f64,
}

impl ConformalPhi for SpherePhi {
    fn phi<T: Real>(&self, x: &[T]) -> T {
        let r2 = x.iter().fold(T::zero(), |acc, &v| acc + v * v);
        T::from_f64((2.0 * self.radius).ln()) - (T::one() + r2).ln()
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        let q = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
        x.iter().map(|v| -2.0 * v / q).collect()
    }
    fn hess(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let q = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                h[i * n + j] = 4.0 * x[i] * x[j] / (q * q) - if i == j { 2.0 / q } else { 0.0 };
            }
        }
        h
    }
}

/// Closed-form `Γ^l_{jk} = δ_{lj} ∂_kφ + δ_{lk} ∂_jφ − δ_{jk} ∂_lφ` for `e^{2φ}δ`,
/// laid out as `[(l n + j) n + k]`.
pub fn conformal_christoffel(n: usize, grad: &[f64]) -> Vec<f64> {
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut out = vec![0.0; n * n * n];
    for l in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[(l * n + j) * n + k] =
                    d(l, j) * grad[k] + d(l, k) * grad[j] - d(j, k) * grad[l];
            }
        }
    }
    out
}

/// Closed-form Ricci tensor of `e^{2φ}δ` in dimension `n`:
/// `Ric = −(n−2)(∇²φ − dφ⊗dφ) − (Δφ + (n−2)|dφ|²) δ`.
pub fn conformal_ricci(n: usize, grad: &[f64], hess: &[f64]) -> Vec<f64> {
    let m = (n as f64) - 2.0;
    let lap: f64 = (0..n).map(|i| hess[i * n + i]).sum();
    let g2: f64 = grad.iter().map(|v| v * v).sum();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = -m * (hess[i * n + j] - grad[i] * grad[j])
                - if i == j { lap + m * g2 } else { 0.0 };
        }
    }
    out
}

/// Closed-form scalar curvature of `e^{2φ}δ`.
pub fn conformal_scalar(n: usize, phi: f64, grad: &[f64], hess: &[f64]) -> f64 {
    let nn = n as f64;
    let lap: f64 = (0..n).map(|i| hess[i * n + i]).sum();
    let g2: f64 = grad.iter().map(|v| v * v).sum();
    (-2.0 * phi).exp() * (-2.0 * (nn - 1.0) * lap - (nn - 2.0) * (nn - 1.0) * g2)
}

/// Multiplication by `i` on ℂ^m in real coordinates `(Re z₁, Im z₁, …)`.
pub fn complex_structure(m: usize) -> Vec<f64> {
    let n = 2 * m;
    let mut j = vec![0.0; n * n];
    for k in 0..m {
        j[(2 * k + 1) * n + 2 * k] = 1.0;
        j[(2 * k) * n + 2 * k + 1] = -1.0;
    }
    j
}

/// Fubini–Study metric on the affine chart ℂ^m ⊂ ℂP^m (holomorphic sectional curvature 4):
/// `g(X, Y) = Re⟨X, Y⟩/(1 + |z|²) − Re(⟨X, z⟩⟨z, Y⟩)/(1 + |z|²)²`.
#[derive(Clone, Copy, Debug)]
pub struct FubiniStudy {
    pub m: usize,
}

impl MetricField for FubiniStudy {
    fn dim(&self) -> usize {
        2 * self.m
    }
    fn gram<T: Real>(&self, x: &[T]) -> Vec<T> {
        fubini_study_block(self.m, x)
    }
}

fn fubini_study_block<T: Real>(m: usize, x: &[T]) -> Vec<T> {
    let n = 2 * m;
    let q = T::one() + x[..n].iter().fold(T::zero(), |acc, &v| acc + v * v);
    let q2 = q * q;
    // conj(ε_a) z_c as (re, im), ε_a = 1 for even a and i for odd a
    let ez = |a: usize| {
        let c = a / 2;
        let (re, im) = (x[2 * c], x[2 * c + 1]);
        if a.is_multiple_of(2) {
            (re, im)
        } else {
            (im, -re)
        }
    };
    let mut g = vec![T::zero(); n * n];
    for a in 0..n {
        for b in 0..n {
            let (ar, ai) = ez(a);
            let (br, bi) = ez(b);
            // ⟨e_a, z⟩⟨z, e_b⟩ = (conj(ε_a) z_a)(conj(conj(ε_b) z_b))
            let re = ar * br + ai * bi;
            let mut v = -(re / q2);
            if a == b {
                v += q.recip();
            }
            g[a * n + b] = v;
        }
    }
    g
}

/// Product of Fubini–Study on ℂ¹ with the flat ℂ¹ (Kähler, not Bochner flat).
#[derive(Clone, Copy, Debug)]
pub struct FsTimesFlat;

impl MetricField for FsTimesFlat {
    fn dim(&self) -> usize {
        4
    }
    fn gram<T: Real>(&self, x: &[T]) -> Vec<T> {
        let b = fubini_study_block(1, &x[..2]);
        let mut g = vec![T::zero(); 16];
        g[0] = b[0];
        g[1] = b[1];
        g[4] = b[2];
        g[5] = b[3];
        g[10] = T::one();
        g[15] = T::one();
        g
    }
}

#[cfg(test)]
mod tests {
    use super::super::{riemann_ricci, Backend};
    use super::*;

    #[test]
    fn fubini_study_is_einstein() {
        // Ric = 2(m + 1) g for holomorphic sectional curvature 4
        let g = FubiniStudy { m: 2 };
        let x = [0.3, -0.2, 0.5, 0.1];
        let c = riemann_ricci(&g, &x, Backend::Dual).unwrap();
        for i in 0..16 {
            assert!((c.ricci[i] - 6.0 * c.metric[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn ga_phi_derivatives_match_dual() {
        let p = GaPhi { a: 1.5 };
        let x = [0.3, -0.4, 0.2, 0.9];
        let g = p.grad(&x);
        for k in 0..4 {
            let mut dir = [0.0; 4];
            dir[k] = 1.0;
            let d = p.phi(&crate::dual::seed_direction(&x, &dir)).eps;
            assert!((d - g[k]).abs() < 1e-14);
        }
        let scalar = conformal_scalar(4, p.phi(&x), &g, &p.hess(&x));
        let c = riemann_ricci(&ConformalMetric::new(4, p), &x, Backend::Dual).unwrap();
        assert!((c.scalar - scalar).abs() < 1e-10);
    }
}
