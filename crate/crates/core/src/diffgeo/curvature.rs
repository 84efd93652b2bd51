use serde::{Deserialize, Serialize};

use super::{endo_jet, metric_jet, spd_inverse, Backend, EndoField, MetricField};
use crate::error::Result;

/// Christoffel symbols `gamma[l][j][k] = Γ^l_{jk}` at a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Christoffel {
    pub dim: usize,
    pub gamma: Vec<f64>,
}

impl Christoffel {
    #[inline]
    pub fn get(&self, l: usize, j: usize, k: usize) -> f64 {
        self.gamma[(l * self.dim + j) * self.dim + k]
    }

    /// `Γ(u, v)^l = Γ^l_{jk} u^j v^k`.
    pub fn contract(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|l| {
                let mut s = 0.0;
                for j in 0..n {
                    if u[j] == 0.0 {
                        continue;
                    }
                    for k in 0..n {
                        s += self.get(l, j, k) * u[j] * v[k];
                    }
                }
                s
            })
            .collect()
    }
}

/// Lowered symbols `Γ_{m,jk} = ½(∂_j g_{mk} + ∂_k g_{mj} − ∂_m g_{jk})` from first derivatives.
fn lowered(n: usize, d1: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; n * n * n];
    for m in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[(m * n + j) * n + k] =
                    0.5 * (d1[j][m * n + k] + d1[k][m * n + j] - d1[m][j * n + k]);
            }
        }
    }
    out
}

fn raise(n: usize, ginv: &[f64], low: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n * n];
    for l in 0..n {
        for m in 0..n {
            let c = ginv[l * n + m];
            if c == 0.0 {
                continue;
            }
            for jk in 0..n * n {
                out[l * n * n + jk] += c * low[m * n * n + jk];
            }
        }
    }
    out
}

/// Levi-Civita connection of `g` at `x`.
pub fn christoffel<G: MetricField>(g: &G, x: &[f64], backend: Backend) -> Result<Christoffel> {
    let n = g.dim();
    let jet = metric_jet(g, x, backend, false)?;
    let ginv = spd_inverse(&jet.value, n)?;
    Ok(Christoffel {
        dim: n,
        gamma: raise(n, &ginv, &lowered(n, &jet.d1)),
    })
}

/// Curvature data at a point; see the module docs for index conventions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureAtPoint {
    pub dim: usize,
    pub metric: Vec<f64>,
    pub metric_inv: Vec<f64>,
    pub christoffel: Christoffel,
    /// `riemann[((l n + i) n + j) n + k] = R^l_{ijk}`.
    pub riemann: Vec<f64>,
    /// `riemann_lower[((i n + j) n + k) n + l] = R_{ijkl}`.
    pub riemann_lower: Vec<f64>,
    pub ricci: Vec<f64>,
    pub scalar: f64,
}

impl CurvatureAtPoint {
    #[inline]
    pub fn r_up(&self, l: usize, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim;
        self.riemann[((l * n + i) * n + j) * n + k]
    }

    #[inline]
    pub fn r_low(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.dim;
        self.riemann_lower[((i * n + j) * n + k) * n + l]
    }

    /// Max residual of the algebraic symmetries of `R_{ijkl}`, scaled by `max(1, max|R|)`.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.dim;
        let scale = 1f64.max(
            self.riemann_lower
                .iter()
                .map(|v| v.abs())
                .fold(0.0, f64::max),
        );
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.r_low(i, j, k, l);
                        worst = worst
                            .max((r + self.r_low(j, i, k, l)).abs())
                            .max((r + self.r_low(i, j, l, k)).abs())
                            .max((r - self.r_low(k, l, i, j)).abs());
                    }
                }
            }
        }
        worst / scale
    }

    /// Max residual of the first Bianchi identity `R^l_{ijk} + R^l_{jki} + R^l_{kij} = 0`.
    pub fn bianchi_residual(&self) -> f64 {
        let n = self.dim;
        let scale = 1f64.max(self.riemann.iter().map(|v| v.abs()).fold(0.0, f64::max));
        let mut worst = 0.0f64;
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let s =
                            self.r_up(l, i, j, k) + self.r_up(l, j, k, i) + self.r_up(l, k, i, j);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst / scale
    }

    /// Full contraction `R_{ijkl} R^{ijkl}`.
    pub fn riemann_norm_sq(&self) -> f64 {
        tensor4_norm_sq(self.dim, &self.riemann_lower, &self.metric_inv)
    }

    /// `Ric_{jk} Ric^{jk}`.
    pub fn ricci_norm_sq(&self) -> f64 {
        let n = self.dim;
        let gi = &self.metric_inv;
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        s += self.ricci[a * n + b]
                            * self.ricci[c * n + d]
                            * gi[a * n + c]
                            * gi[b * n + d];
                    }
                }
            }
        }
        s
    }
}

/// `T_{ijkl} T^{ijkl}` for a covariant 4-tensor, raised with `ginv`.
pub(crate) fn tensor4_norm_sq(n: usize, t: &[f64], ginv: &[f64]) -> f64 {
    // raise one index at a time: U^{a}_{jkl} etc.
    let mut cur = t.to_vec();
    for slot in 0..4 {
        let mut next = vec![0.0; cur.len()];
        for idx in 0..cur.len() {
            let mut digits = [
                idx / (n * n * n),
                (idx / (n * n)) % n,
                (idx / n) % n,
                idx % n,
            ];
            let target = digits[slot];
            let mut s = 0.0;
            for m in 0..n {
                digits[slot] = m;
                let src = ((digits[0] * n + digits[1]) * n + digits[2]) * n + digits[3];
                s += ginv[target * n + m] * cur[src];
            }
            next[idx] = s;
        }
        cur = next;
    }
    t.iter().zip(&cur).map(|(a, b)| a * b).sum()
}

/// Christoffel symbols, Riemann, Ricci and scalar curvature of `g` at `x`.
pub fn riemann_ricci<G: MetricField>(
    g: &G,
    x: &[f64],
    backend: Backend,
) -> Result<CurvatureAtPoint> {
    let n = g.dim();
    let jet = metric_jet(g, x, backend, true)?;
    let d2 = jet.d2.as_ref().expect("second derivatives requested");
    let ginv = spd_inverse(&jet.value, n)?;
    let low = lowered(n, &jet.d1);
    let gamma = raise(n, &ginv, &low);

    // ∂_i g^{-1} = −g^{-1} (∂_i g) g^{-1}
    let dginv: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let dg = &jet.d1[i];
            let mut tmp = vec![0.0; n * n];
            for a in 0..n {
                for b in 0..n {
                    tmp[a * n + b] = (0..n).map(|c| dg[a * n + c] * ginv[c * n + b]).sum();
                }
            }
            let mut out = vec![0.0; n * n];
            for a in 0..n {
                for b in 0..n {
                    out[a * n + b] = -(0..n)
                        .map(|c| ginv[a * n + c] * tmp[c * n + b])
                        .sum::<f64>();
                }
            }
            out
        })
        .collect();

    // ∂_i Γ^l_{jk}
    let mut dgamma = vec![0.0; n * n * n * n];
    for i in 0..n {
        let mut dlow = vec![0.0; n * n * n];
        for m in 0..n {
            for j in 0..n {
                for k in 0..n {
                    dlow[(m * n + j) * n + k] =
                        0.5 * (d2[i][j][m * n + k] + d2[i][k][m * n + j] - d2[i][m][j * n + k]);
                }
            }
        }
        let a = raise(n, &dginv[i], &low);
        let b = raise(n, &ginv, &dlow);
        for idx in 0..n * n * n {
            dgamma[i * n * n * n + idx] = a[idx] + b[idx];
        }
    }
    let dg = |i: usize, l: usize, j: usize, k: usize| dgamma[((i * n + l) * n + j) * n + k];
    let gm = |l: usize, j: usize, k: usize| gamma[(l * n + j) * n + k];

    let mut riemann = vec![0.0; n * n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut r = dg(i, l, j, k) - dg(j, l, i, k);
                    for m in 0..n {
                        r += gm(l, i, m) * gm(m, j, k) - gm(l, j, m) * gm(m, i, k);
                    }
                    riemann[((l * n + i) * n + j) * n + k] = r;
                }
            }
        }
    }
    let mut riemann_lower = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    riemann_lower[((i * n + j) * n + k) * n + l] = (0..n)
                        .map(|m| jet.value[l * n + m] * riemann[((m * n + i) * n + j) * n + k])
                        .sum();
                }
            }
        }
    }
    let mut ricci = vec![0.0; n * n];
    for j in 0..n {
        for k in 0..n {
            ricci[j * n + k] = (0..n).map(|i| riemann[((i * n + i) * n + j) * n + k]).sum();
        }
    }
    let scalar = (0..n * n).map(|idx| ginv[idx] * ricci[idx]).sum();
    Ok(CurvatureAtPoint {
        dim: n,
        metric: jet.value,
        metric_inv: ginv,
        christoffel: Christoffel { dim: n, gamma },
        riemann,
        riemann_lower,
        ricci,
        scalar,
    })
}

/// Frobenius norm of `(∇_k J)^i_j = ∂_k J^i_j + Γ^i_{km} J^m_j − Γ^m_{kj} J^i_m` at `x`.
pub fn nabla_j<G: MetricField, J: EndoField>(
    g: &G,
    j: &J,
    x: &[f64],
    backend: Backend,
) -> Result<f64> {
    let n = g.dim();
    let gamma = christoffel(g, x, backend)?;
    let jet = endo_jet(j, x, backend);
    let jm = &jet.value;
    let mut s = 0.0;
    for k in 0..n {
        for i in 0..n {
            for jj in 0..n {
                let mut v = jet.d1[k][i * n + jj];
                for m in 0..n {
                    v += gamma.get(i, k, m) * jm[m * n + jj] - gamma.get(m, k, jj) * jm[i * n + m];
                }
                s += v * v;
            }
        }
    }
    Ok(s.sqrt())
}
