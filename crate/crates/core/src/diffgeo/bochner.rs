use serde::{Deserialize, Serialize};

use super::curvature::tensor4_norm_sq;
use super::{nabla_j, riemann_ricci, Backend, EndoField, MetricField};
use crate::error::Result;

/// Threshold on `‖∇J‖` above which the Bochner norm is flagged unreliable.
pub const KAHLER_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BochnerReport {
    /// `sqrt(B_{ijkl} B^{ijkl})`.
    pub norm: f64,
    /// `sqrt(R_{ijkl} R^{ijkl})`, for scale.
    pub riemann_norm: f64,
    pub nabla_j: f64,
    /// False when `‖∇J‖ ≥ KAHLER_TOL`: the input is not Kähler at this point.
    pub reliable: bool,
}

/// The Kähler curvature operator `K(h)` for a symmetric 2-tensor `h`:
///
/// ```text
/// K(h)(X,Y,Z,W) = h(Y,Z)g(X,W) − h(X,Z)g(Y,W) + g(Y,Z)h(X,W) − g(X,Z)h(Y,W)
///               + h(JY,Z)g(JX,W) − h(JX,Z)g(JY,W) + g(JY,Z)h(JX,W) − g(JX,Z)h(JY,W)
///               + 2h(X,JY)g(JZ,W) + 2g(X,JY)h(JZ,W)
/// ```
///
/// A complex space form of holomorphic sectional curvature `c` has `R = (c/8) K(g)`.
pub fn kahler_curvature_operator(n: usize, g: &[f64], h: &[f64], j: &[f64]) -> Vec<f64> {
    // jt[x][z] = t(J e_x, e_z) = J^a_x t_{az}
    let jt = |t: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n * n];
        for x in 0..n {
            for z in 0..n {
                out[x * n + z] = (0..n).map(|a| j[a * n + x] * t[a * n + z]).sum();
            }
        }
        out
    };
    let jg = jt(g);
    let jh = jt(h);
    let mut out = vec![0.0; n * n * n * n];
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for w in 0..n {
                    let v = h[y * n + z] * g[x * n + w] - h[x * n + z] * g[y * n + w] + g[y * n + z] * h[x * n + w]
                        - g[x * n + z] * h[y * n + w]
                        + jh[y * n + z] * jg[x * n + w]
                        - jh[x * n + z] * jg[y * n + w]
                        + jg[y * n + z] * jh[x * n + w]
                        - jg[x * n + z] * jh[y * n + w]
                        // h(X, JY) = h(JY, X)
                        + 2.0 * jh[y * n + x] * jg[z * n + w]
                        + 2.0 * jg[y * n + x] * jh[z * n + w];
                    out[((x * n + y) * n + z) * n + w] = v;
                }
            }
        }
    }
    out
}

/// Bochner tensor `B = R − K(Ric)/(N+4) + S·K(g)/((N+4)(2N+4))`, `N` the real
/// dimension, with `R_{XYZW} = g(R(X,Y)Z, W)`; returns its norm.
pub fn bochner_tensor<G: MetricField, J: EndoField>(
    g: &G,
    j: &J,
    x: &[f64],
    backend: Backend,
) -> Result<BochnerReport> {
    let n = g.dim();
    let curv = riemann_ricci(g, x, backend)?;
    let jm: Vec<f64> = j.matrix(x);
    let nj = nabla_j(g, j, x, backend)?;
    let nf = n as f64;
    let k_ric = kahler_curvature_operator(n, &curv.metric, &curv.ricci, &jm);
    let k_g = kahler_curvature_operator(n, &curv.metric, &curv.metric, &jm);
    let c1 = 1.0 / (nf + 4.0);
    let c2 = curv.scalar / ((nf + 4.0) * (2.0 * nf + 4.0));
    let b: Vec<f64> = (0..n * n * n * n)
        .map(|i| curv.riemann_lower[i] - c1 * k_ric[i] + c2 * k_g[i])
        .collect();
    let norm = tensor4_norm_sq(n, &b, &curv.metric_inv).max(0.0).sqrt();
    Ok(BochnerReport {
        norm,
        riemann_norm: curv.riemann_norm_sq().max(0.0).sqrt(),
        nabla_j: nj,
        reliable: nj < KAHLER_TOL,
    })
}
