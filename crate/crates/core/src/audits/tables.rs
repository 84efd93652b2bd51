use serde::{Deserialize, Serialize};

use super::isometry::{curvature_points, riemann_sq};
use crate::diffgeo::{geodesic, Backend, GeodesicOptions};
use crate::error::Result;
use crate::metric::{check_a, GaMetric};

/// `‖Riem(g_a)‖²` at one of the fixed points of ℍ¹.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureRow {
    pub a: f64,
    pub point: usize,
    pub x: Vec<f64>,
    pub dual: f64,
    pub fd: f64,
}

/// Curvature invariant of `g_a` on ℍ¹ for each `a`, with both backends.
pub fn curvature_table(a_values: &[f64]) -> Result<Vec<CurvatureRow>> {
    let mut rows = Vec::new();
    for &a in a_values {
        check_a(a)?;
        for (point, x) in curvature_points().into_iter().enumerate() {
            let dual = riemann_sq(a, &x, Backend::Dual);
            let fd = riemann_sq(a, &x, Backend::DEFAULT_FD);
            rows.push(CurvatureRow {
                a,
                point,
                x,
                dual,
                fd,
            });
        }
    }
    Ok(rows)
}

/// A sampled unit-speed geodesic of `g_a` on ℍ¹ from the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicTrace {
    pub a: f64,
    /// Index of the initial coordinate direction.
    pub direction: usize,
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub speed_drift: f64,
}

/// Geodesics of `g_a` on ℍ¹ from the origin along each coordinate direction, up to time `t_end`.
pub fn geodesic_traces(a_values: &[f64], t_end: f64) -> Result<Vec<GeodesicTrace>> {
    let mut out = Vec::new();
    for &a in a_values {
        let g = GaMetric::new(1, a)?;
        for direction in 0..4 {
            let mut v0 = vec![0.0; 4];
            v0[direction] = 1.0;
            let t = geodesic(
                &g,
                &[0.0; 4],
                &v0,
                t_end,
                Backend::Dual,
                GeodesicOptions::default(),
            )?;
            out.push(GeodesicTrace {
                a,
                direction,
                times: t.times,
                points: t.points,
                speed_drift: t.speed_drift,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curvature_table_shape() {
        let rows = curvature_table(&[0.5, 2.0]).unwrap();
        assert_eq!(rows.len(), 10);
        assert!(rows
            .iter()
            .all(|r| (r.dual - r.fd).abs() / r.dual.abs().max(1.0) < 1e-6));
        assert!(curvature_table(&[0.0]).is_err());
    }

    #[test]
    fn radial_geodesic_has_closed_form_length() {
        // along a radial line, distance from 0 to radius r is asinh(√a r)/√a
        let a = 2.0;
        let tr = geodesic_traces(&[a], 1.0).unwrap();
        let last = tr[0].points.last().unwrap();
        let r = last.iter().map(|x| x * x).sum::<f64>().sqrt();
        let t = *tr[0].times.last().unwrap();
        assert!(((a.sqrt() * r).asinh() / a.sqrt() - t).abs() < 1e-6);
        assert!(tr[0].speed_drift < 1e-8);
    }
}
