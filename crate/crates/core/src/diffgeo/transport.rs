use serde::{Deserialize, Serialize};

use super::{christoffel, Backend, Christoffel, MetricField};
use crate::error::{Error, Result};

/// Square loop of side `side` in the coordinate plane `(plane.0, plane.1)`,
/// starting and ending at `base`, traversed counter-clockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopSpec {
    pub base: Vec<f64>,
    pub plane: (usize, usize),
    pub side: f64,
    pub step: f64,
}

impl LoopSpec {
    pub fn square(base: Vec<f64>, plane: (usize, usize), side: f64) -> Self {
        LoopSpec {
            base,
            plane,
            side,
            step: 1e-3,
        }
    }

    /// The four corners in traversal order, ending at the base point.
    pub fn corners(&self) -> Vec<Vec<f64>> {
        let (p, q) = self.plane;
        let mut c1 = self.base.clone();
        c1[p] += self.side;
        let mut c2 = c1.clone();
        c2[q] += self.side;
        let mut c3 = c2.clone();
        c3[p] -= self.side;
        let mut c4 = c3.clone();
        c4[q] -= self.side;
        vec![c1, c2, c3, c4]
    }
}

/// Parallel transport around a loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportResult {
    pub dim: usize,
    /// Column `c` is the transport of the coordinate vector `e_c`, row-major.
    pub map: Vec<f64>,
    /// Max relative change of the transported Gram matrix along the loop.
    pub drift: f64,
}

/// Threshold on Gram drift above which transport reports a step failure.
pub const TRANSPORT_DRIFT_LIMIT: f64 = 1e-6;

fn gram_of_frame(g: &[f64], p: &[f64], n: usize) -> Vec<f64> {
    let mut gp = vec![0.0; n * n];
    for i in 0..n {
        for c in 0..n {
            gp[i * n + c] = (0..n).map(|k| g[i * n + k] * p[k * n + c]).sum();
        }
    }
    let mut out = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            out[a * n + b] = (0..n).map(|i| p[i * n + a] * gp[i * n + b]).sum();
        }
    }
    out
}

fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

/// RK4 integration of `dV/ds = −Γ(ẋ, V)` for the whole frame around the loop.
pub fn parallel_transport<G: MetricField>(
    g: &G,
    spec: &LoopSpec,
    backend: Backend,
) -> Result<TransportResult> {
    let n = g.dim();
    if spec.base.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: spec.base.len(),
        });
    }
    let mut frame = vec![0.0; n * n];
    for i in 0..n {
        frame[i * n + i] = 1.0;
    }
    let g0 = g.gram(&spec.base);
    let mut drift = 0.0f64;
    let mut start = spec.base.clone();
    for corner in spec.corners() {
        let vel: Vec<f64> = corner
            .iter()
            .zip(&start)
            .map(|(a, b)| (a - b) / spec.side)
            .collect();
        let steps = (spec.side / spec.step).ceil() as usize;
        let h = spec.side / steps as f64;
        let at = |s: f64| -> Vec<f64> { start.iter().zip(&vel).map(|(x, v)| x + s * v).collect() };
        let rhs = |gamma: &Christoffel, fr: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; n * n];
            for c in 0..n {
                let col: Vec<f64> = (0..n).map(|i| fr[i * n + c]).collect();
                let d = gamma.contract(&vel, &col);
                for i in 0..n {
                    out[i * n + c] = -d[i];
                }
            }
            out
        };
        let step = |f: &[f64], k: &[f64], t: f64| -> Vec<f64> {
            f.iter().zip(k).map(|(f, k)| f + t * k).collect()
        };
        let mut gamma0 = christoffel(g, &at(0.0), backend)?;
        for s in 0..steps {
            let s0 = s as f64 * h;
            let x1 = at(s0 + h);
            let gamma_m = christoffel(g, &at(s0 + 0.5 * h), backend)?;
            let gamma1 = christoffel(g, &x1, backend)?;
            let k1 = rhs(&gamma0, &frame);
            let k2 = rhs(&gamma_m, &step(&frame, &k1, 0.5 * h));
            let k3 = rhs(&gamma_m, &step(&frame, &k2, 0.5 * h));
            let k4 = rhs(&gamma1, &step(&frame, &k3, h));
            for i in 0..n * n {
                frame[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            gamma0 = gamma1;
            drift = drift.max(rel_diff(&gram_of_frame(&g.gram(&x1), &frame, n), &g0));
        }
        if drift > TRANSPORT_DRIFT_LIMIT {
            return Err(Error::StepFailure {
                drift,
                limit: TRANSPORT_DRIFT_LIMIT,
            });
        }
        start = corner;
    }
    Ok(TransportResult {
        dim: n,
        map: frame,
        drift,
    })
}

/// Distance of a holonomy map from Sp(n) = O(g) ∩ commutant of `{J_α}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolonomyDeviation {
    /// `‖Pᵀ G P − G‖_F / ‖G‖_F`.
    pub orthogonality: f64,
    /// `max_α ‖P J_α − J_α P‖_F / ‖P‖_F`.
    pub commutation: f64,
    pub total: f64,
}

pub fn holonomy_deviation(p: &[f64], g0: &[f64], js: &[Vec<f64>], n: usize) -> HolonomyDeviation {
    let orthogonality = rel_diff(&gram_of_frame(g0, p, n), g0);
    let pn: f64 = p.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mul = |a: &[f64], b: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n).map(|k| a[i * n + k] * b[k * n + j]).sum();
            }
        }
        out
    };
    let commutation = js
        .iter()
        .map(|j| {
            let pj = mul(p, j);
            let jp = mul(j, p);
            pj.iter()
                .zip(&jp)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
                / pn
        })
        .fold(0.0, f64::max);
    HolonomyDeviation {
        orthogonality,
        commutation,
        total: orthogonality + commutation,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicOptions {
    pub step: f64,
    /// Maximum number of step halvings when the per-step speed drift exceeds `drift_tol`.
    pub max_halvings: u32,
    pub drift_tol: f64,
    /// Coordinate norm treated as blow-up.
    pub blowup_radius: f64,
    /// Record every `record_every`-th step in the trajectory.
    pub record_every: usize,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        GeodesicOptions {
            step: 1e-3,
            max_halvings: 6,
            drift_tol: 1e-9,
            blowup_radius: 1e12,
            record_every: 100,
        }
    }
}

/// Result of a geodesic integration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub final_time: f64,
    /// `max |g(γ', γ') − g(γ'₀, γ'₀)| / g(γ'₀, γ'₀)` over the run.
    pub speed_drift: f64,
    /// Time at which the coordinates left the blow-up radius, if they did.
    pub blow_up: Option<f64>,
}

impl Trajectory {
    pub fn finite(&self) -> bool {
        self.blow_up.is_none()
    }
}

fn speed_sq(g: &[f64], v: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += g[i * n + j] * v[i] * v[j];
        }
    }
    s
}

/// RK4 integration of `ẍ = −Γ(ẋ, ẋ)` up to time `t_end`.
pub fn geodesic<G: MetricField>(
    g: &G,
    x0: &[f64],
    v0: &[f64],
    t_end: f64,
    backend: Backend,
    opts: GeodesicOptions,
) -> Result<Trajectory> {
    let n = g.dim();
    if x0.len() != n || v0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x0.len().min(v0.len()),
        });
    }
    let accel = |x: &[f64], v: &[f64]| -> Result<Vec<f64>> {
        Ok(christoffel(g, x, backend)?
            .contract(v, v)
            .into_iter()
            .map(|a| -a)
            .collect())
    };
    let rk4 = |x: &[f64], v: &[f64], h: f64| -> Result<(Vec<f64>, Vec<f64>)> {
        let a1 = accel(x, v)?;
        let x2: Vec<f64> = (0..n).map(|i| x[i] + 0.5 * h * v[i]).collect();
        let v2: Vec<f64> = (0..n).map(|i| v[i] + 0.5 * h * a1[i]).collect();
        let a2 = accel(&x2, &v2)?;
        let x3: Vec<f64> = (0..n).map(|i| x[i] + 0.5 * h * v2[i]).collect();
        let v3: Vec<f64> = (0..n).map(|i| v[i] + 0.5 * h * a2[i]).collect();
        let a3 = accel(&x3, &v3)?;
        let x4: Vec<f64> = (0..n).map(|i| x[i] + h * v3[i]).collect();
        let v4: Vec<f64> = (0..n).map(|i| v[i] + h * a3[i]).collect();
        let a4 = accel(&x4, &v4)?;
        let xn = (0..n)
            .map(|i| x[i] + h / 6.0 * (v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]))
            .collect();
        let vn = (0..n)
            .map(|i| v[i] + h / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]))
            .collect();
        Ok((xn, vn))
    };
    let e0 = speed_sq(&g.gram(x0), v0, n);
    let mut x = x0.to_vec();
    let mut v = v0.to_vec();
    let mut t = 0.0;
    let mut times = vec![0.0];
    let mut points = vec![x.clone()];
    let mut speed_drift = 0.0f64;
    let mut count = 0usize;
    while t < t_end {
        let mut h = opts.step.min(t_end - t);
        let mut prev = speed_sq(&g.gram(&x), &v, n);
        let (mut xn, mut vn) = rk4(&x, &v, h)?;
        for _ in 0..opts.max_halvings {
            let cur = speed_sq(&g.gram(&xn), &vn, n);
            if ((cur - prev) / e0).abs() <= opts.drift_tol || !cur.is_finite() {
                break;
            }
            h *= 0.5;
            prev = speed_sq(&g.gram(&x), &v, n);
            let r = rk4(&x, &v, h)?;
            xn = r.0;
            vn = r.1;
        }
        t += h;
        x = xn;
        v = vn;
        count += 1;
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !r.is_finite() || r > opts.blowup_radius {
            times.push(t);
            points.push(x);
            return Ok(Trajectory {
                times,
                points,
                final_time: t,
                speed_drift,
                blow_up: Some(t),
            });
        }
        let e = speed_sq(&g.gram(&x), &v, n);
        speed_drift = speed_drift.max(((e - e0) / e0).abs());
        if count.is_multiple_of(opts.record_every.max(1)) {
            times.push(t);
            points.push(x.clone());
        }
    }
    if times.last() != Some(&t) {
        times.push(t);
        points.push(x);
    }
    Ok(Trajectory {
        times,
        points,
        final_time: t,
        speed_drift,
        blow_up: None,
    })
}

#[cfg(test)]
mod tests {
    use super::super::harness::{ConformalMetric, FlatMetric, GaPhi};
    use super::*;
    use crate::quatlib::standard_j;

    #[test]
    fn flat_transport_is_identity() {
        let g = FlatMetric { dim: 4 };
        let spec = LoopSpec::square(vec![0.5, 0.0, 0.0, 0.0], (0, 1), 0.1);
        let r = parallel_transport(&g, &spec, Backend::Dual).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((r.map[i * 4 + j] - e).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn transport_preserves_metric() {
        let g = ConformalMetric::new(4, GaPhi { a: 1.0 });
        let spec = LoopSpec::square(vec![0.5, 0.0, 0.0, 0.0], (0, 1), 0.1);
        let r = parallel_transport(&g, &spec, Backend::Dual).unwrap();
        assert!(r.drift < 1e-8);
        let g0 = g.gram(&spec.base);
        let js: Vec<Vec<f64>> = (1..=3).map(|a| standard_j(a, 1)).collect();
        let dev = holonomy_deviation(&r.map, &g0, &js, 4);
        assert!(dev.orthogonality < 1e-8);
        assert!(dev.commutation.is_finite());
    }

    #[test]
    fn flat_geodesic_is_straight() {
        let g = FlatMetric { dim: 2 };
        let tr = geodesic(
            &g,
            &[0.0, 1.0],
            &[1.0, 2.0],
            1.0,
            Backend::Dual,
            GeodesicOptions::default(),
        )
        .unwrap();
        let last = tr.points.last().unwrap();
        assert!((last[0] - 1.0).abs() < 1e-12 && (last[1] - 3.0).abs() < 1e-12);
        assert!(tr.finite());
    }

    #[test]
    fn radial_geodesic_follows_sinh_law() {
        // unit-speed radial geodesic of f·δ: r(s) = sinh(√a s)/√a
        let a = 1.0;
        let g = ConformalMetric::new(4, GaPhi { a });
        let tr = geodesic(
            &g,
            &[0.0; 4],
            &[1.0, 0.0, 0.0, 0.0],
            2.0,
            Backend::Dual,
            GeodesicOptions::default(),
        )
        .unwrap();
        let last = tr.points.last().unwrap();
        assert!((last[0] - (2.0f64).sinh()).abs() < 1e-8);
        assert!(tr.speed_drift < 1e-6);
    }
}
