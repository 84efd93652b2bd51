//! Metric-agnostic numerical Riemannian geometry.
//!
//! Every derivative-based quantity can be computed with two backends:
//! central finite differences and forward-mode dual numbers. The dual-number
//! backend is exact up to rounding and serves as the reference.
//!
//! Index conventions, used everywhere:
//!
//! * `Γ^l_{jk} = ½ g^{lm} (∂_j g_{mk} + ∂_k g_{mj} − ∂_m g_{jk})`;
//! * `R(X, Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]} Z`, with components
//!   `R^l_{ijk} = ∂_iΓ^l_{jk} − ∂_jΓ^l_{ik} + Γ^l_{im}Γ^m_{jk} − Γ^l_{jm}Γ^m_{ik}`
//!   so that `R(∂_i, ∂_j)∂_k = R^l_{ijk} ∂_l`;
//! * `R_{ijkl} = g(R(∂_i, ∂_j)∂_k, ∂_l)`, `Ric_{jk} = R^i_{ijk}`, `S = g^{jk} Ric_{jk}`.

// Tensor code indexes several arrays with the same loop variables.
#![allow(clippy::needless_range_loop)]

mod bochner;
mod curvature;
mod exterior;
pub mod harness;
mod transport;

pub use bochner::{bochner_tensor, kahler_curvature_operator, BochnerReport};
pub use curvature::{christoffel, nabla_j, riemann_ricci, Christoffel, CurvatureAtPoint};
pub use exterior::{d_norm, numeric_d, FormField};
pub use transport::{
    geodesic, holonomy_deviation, parallel_transport, GeodesicOptions, HolonomyDeviation, LoopSpec,
    Trajectory, TransportResult,
};

use serde::{Deserialize, Serialize};

use crate::dual::{seed_direction, seed_second, Real};
use crate::error::{Error, Result};

/// Differentiation backend.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
pub enum Backend {
    /// Central differences with step `h` for first derivatives and
    /// Richardson-extrapolated central differences with base step `h2` for
    /// second derivatives.
    Fd { h: f64, h2: f64 },
    /// Forward-mode dual numbers (nested for second derivatives).
    #[default]
    Dual,
}

impl Backend {
    /// `h2 = 1e-3`: with `1e-4` the second differences are roundoff-limited at about 1e-6 relative.
    pub const DEFAULT_FD: Backend = Backend::Fd { h: 1e-5, h2: 1e-3 };

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Fd { .. } => "fd",
            Backend::Dual => "dual",
        }
    }
}

/// Agreement metric between two backends: `max |a − b| / max(1, |b|)`.
pub fn agreement(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / 1f64.max(y.abs()))
        .fold(0.0, f64::max)
}

/// Agreement of two scalars under the same metric as [`agreement`].
pub fn agreement_scalar(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(b.abs())
}

/// A Riemannian metric on an open subset of ℝ^N in global coordinates.
pub trait MetricField: Sync {
    fn dim(&self) -> usize;

    /// Gram matrix `g_{ij}(x)`, row-major `N × N`.
    fn gram<T: Real>(&self, x: &[T]) -> Vec<T>;
}

/// An endomorphism field `J^i_j(x)`, row-major with `J[i * N + j] = J^i_j`.
pub trait EndoField: Sync {
    fn matrix<T: Real>(&self, x: &[T]) -> Vec<T>;
}

/// A constant endomorphism field.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstEndo(pub Vec<f64>);

impl EndoField for ConstEndo {
    fn matrix<T: Real>(&self, _x: &[T]) -> Vec<T> {
        self.0.iter().map(|&v| T::from_f64(v)).collect()
    }
}

/// Value and first two derivatives of a matrix field at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub dim: usize,
    pub value: Vec<f64>,
    /// `d1[k]` is `∂_k` of the matrix.
    pub d1: Vec<Vec<f64>>,
    /// `d2[k][l]` is `∂_k∂_l` of the matrix (present when requested).
    pub d2: Option<Vec<Vec<Vec<f64>>>>,
}

fn axis(n: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[k] = 1.0;
    e
}

fn shifted(x: &[f64], k: usize, h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[k] += h;
    y
}

fn shifted2(x: &[f64], k: usize, hk: f64, l: usize, hl: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[k] += hk;
    y[l] += hl;
    y
}

fn lincomb(terms: &[(f64, &Vec<f64>)]) -> Vec<f64> {
    let len = terms[0].1.len();
    (0..len)
        .map(|i| terms.iter().map(|(c, v)| c * v[i]).sum())
        .collect()
}

/// Jet of an arbitrary vector-valued function given over any [`Real`] scalar.
pub fn jet_of<F>(f: &F, x: &[f64], backend: Backend, second: bool) -> Jet
where
    F: JetSource,
{
    let n = x.len();
    let value = f.eval_f64(x);
    let dim = (value.len() as f64).sqrt().round() as usize;
    match backend {
        Backend::Dual => {
            let d1 = (0..n)
                .map(|k| {
                    f.eval_dual(&seed_direction(x, &axis(n, k)))
                        .iter()
                        .map(|d| d.eps)
                        .collect()
                })
                .collect();
            let d2 = second.then(|| {
                let mut out = vec![vec![Vec::new(); n]; n];
                for k in 0..n {
                    for l in k..n {
                        let v: Vec<f64> = f
                            .eval_dual2(&seed_second(x, &axis(n, k), &axis(n, l)))
                            .iter()
                            .map(|d| d.eps.eps)
                            .collect();
                        out[l][k] = v.clone();
                        out[k][l] = v;
                    }
                }
                out
            });
            Jet { dim, value, d1, d2 }
        }
        Backend::Fd { h, h2 } => {
            let d1 = (0..n)
                .map(|k| {
                    let p = f.eval_f64(&shifted(x, k, h));
                    let m = f.eval_f64(&shifted(x, k, -h));
                    lincomb(&[(0.5 / h, &p), (-0.5 / h, &m)])
                })
                .collect();
            let d2 = second.then(|| {
                let mut out = vec![vec![Vec::new(); n]; n];
                for k in 0..n {
                    for l in k..n {
                        let coarse = fd_second(f, x, &value, k, l, h2);
                        let fine = fd_second(f, x, &value, k, l, h2 / 2.0);
                        let v = lincomb(&[(4.0 / 3.0, &fine), (-1.0 / 3.0, &coarse)]);
                        out[l][k] = v.clone();
                        out[k][l] = v;
                    }
                }
                out
            });
            Jet { dim, value, d1, d2 }
        }
    }
}

fn fd_second<F: JetSource>(
    f: &F,
    x: &[f64],
    center: &Vec<f64>,
    k: usize,
    l: usize,
    h: f64,
) -> Vec<f64> {
    if k == l {
        let p = f.eval_f64(&shifted(x, k, h));
        let m = f.eval_f64(&shifted(x, k, -h));
        let c = 1.0 / (h * h);
        lincomb(&[(c, &p), (-2.0 * c, center), (c, &m)])
    } else {
        let pp = f.eval_f64(&shifted2(x, k, h, l, h));
        let pm = f.eval_f64(&shifted2(x, k, h, l, -h));
        let mp = f.eval_f64(&shifted2(x, k, -h, l, h));
        let mm = f.eval_f64(&shifted2(x, k, -h, l, -h));
        let c = 0.25 / (h * h);
        lincomb(&[(c, &pp), (-c, &pm), (-c, &mp), (c, &mm)])
    }
}

/// A vector-valued function evaluable at the three scalar types used by jets.
pub trait JetSource {
    fn eval_f64(&self, x: &[f64]) -> Vec<f64>;
    fn eval_dual(&self, x: &[crate::dual::Dual<f64>]) -> Vec<crate::dual::Dual<f64>>;
    fn eval_dual2(&self, x: &[crate::dual::Dual2]) -> Vec<crate::dual::Dual2>;
}

struct GramSource<'a, G: MetricField>(&'a G);

impl<G: MetricField> JetSource for GramSource<'_, G> {
    fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.0.gram(x)
    }
    fn eval_dual(&self, x: &[crate::dual::Dual<f64>]) -> Vec<crate::dual::Dual<f64>> {
        self.0.gram(x)
    }
    fn eval_dual2(&self, x: &[crate::dual::Dual2]) -> Vec<crate::dual::Dual2> {
        self.0.gram(x)
    }
}

struct EndoSource<'a, J: EndoField>(&'a J);

impl<J: EndoField> JetSource for EndoSource<'_, J> {
    fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.0.matrix(x)
    }
    fn eval_dual(&self, x: &[crate::dual::Dual<f64>]) -> Vec<crate::dual::Dual<f64>> {
        self.0.matrix(x)
    }
    fn eval_dual2(&self, x: &[crate::dual::Dual2]) -> Vec<crate::dual::Dual2> {
        self.0.matrix(x)
    }
}

/// Jet of the metric `g` at `x`.
pub fn metric_jet<G: MetricField>(g: &G, x: &[f64], backend: Backend, second: bool) -> Result<Jet> {
    if x.len() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: x.len(),
        });
    }
    Ok(jet_of(&GramSource(g), x, backend, second))
}

pub(crate) fn endo_jet<J: EndoField>(j: &J, x: &[f64], backend: Backend) -> Jet {
    jet_of(&EndoSource(j), x, backend, false)
}

/// Inverse of a symmetric positive-definite matrix, or `SingularMetric`.
pub fn spd_inverse(g: &[f64], n: usize) -> Result<Vec<f64>> {
    let m = nalgebra::DMatrix::from_row_slice(n, n, g);
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularMetric);
    }
    let chol = m.cholesky().ok_or(Error::SingularMetric)?;
    let inv = chol.inverse();
    Ok((0..n * n).map(|i| inv[(i / n, i % n)]).collect())
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(g: &[f64], n: usize) -> f64 {
    let m = nalgebra::DMatrix::from_row_slice(n, n, g);
    m.symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::harness::{ConformalMetric, PolyPhi};
    use super::*;

    #[test]
    fn jets_agree_between_backends() {
        let g = ConformalMetric::new(
            3,
            PolyPhi {
                lin: vec![0.2, -0.1, 0.3],
                quad: 0.15,
                cross: 0.05,
            },
        );
        let x = [0.3, -0.2, 0.5];
        let d = metric_jet(&g, &x, Backend::Dual, true).unwrap();
        let f = metric_jet(&g, &x, Backend::DEFAULT_FD, true).unwrap();
        for k in 0..3 {
            assert!(agreement(&f.d1[k], &d.d1[k]) < 1e-8);
            for l in 0..3 {
                assert!(
                    agreement(&f.d2.as_ref().unwrap()[k][l], &d.d2.as_ref().unwrap()[k][l]) < 1e-6
                );
            }
        }
    }

    #[test]
    fn singular_metric_is_rejected() {
        assert_eq!(
            spd_inverse(&[1.0, 0.0, 0.0, 0.0], 2),
            Err(Error::SingularMetric)
        );
        assert_eq!(
            spd_inverse(&[1.0, 0.0, 0.0, -1.0], 2),
            Err(Error::SingularMetric)
        );
        let inv = spd_inverse(&[2.0, 0.0, 0.0, 4.0], 2).unwrap();
        for (a, b) in inv.iter().zip([0.5, 0.0, 0.0, 0.25]) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
