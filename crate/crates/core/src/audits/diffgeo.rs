use super::{par_samples, Claim, Job};
use crate::diffgeo::harness::{
    conformal_christoffel, conformal_ricci, conformal_scalar, ConformalMetric, ConformalPhi,
    FlatMetric, FubiniStudy, GaPhi, PolyPhi, ScaledFlat, SpherePhi,
};
use crate::diffgeo::{christoffel, riemann_ricci, Backend, MetricField};
use crate::error::Result;
use crate::sampling::{gaussian_vec, sample_rng};

const ORACLE_TOL: f64 = 1e-5;
const POINTS: usize = 40;

fn poly() -> PolyPhi {
    PolyPhi {
        lin: vec![0.1, -0.2, 0.05, 0.3],
        quad: 0.4,
        cross: -0.25,
    }
}

fn point(seed: u64, tag: &str, s: u64, dim: usize) -> Vec<f64> {
    let mut rng = sample_rng(seed, tag, s);
    gaussian_vec(&mut rng, dim)
        .into_iter()
        .map(|v| 0.6 * v)
        .collect()
}

fn conformal_pairs<P: ConformalPhi + Clone>(
    phi: &P,
    dim: usize,
    x: &[f64],
    b: Backend,
) -> Vec<(f64, f64)> {
    let g = ConformalMetric::new(dim, phi.clone());
    let (grad, hess) = (phi.grad(x), phi.hess(x));
    let mut out = Vec::new();
    let gam = christoffel(&g, x, b).expect("positive definite");
    let want = conformal_christoffel(dim, &grad);
    out.extend(gam.gamma.iter().copied().zip(want));
    let curv = riemann_ricci(&g, x, b).expect("positive definite");
    out.extend(
        curv.ricci
            .iter()
            .copied()
            .zip(conformal_ricci(dim, &grad, &hess)),
    );
    out.push((curv.scalar, conformal_scalar(dim, phi.phi(x), &grad, &hess)));
    out
}

/// `(Ric_{ij}, c·g_{ij})` pairs for an Einstein metric with constant `c`.
fn einstein_pairs<G: MetricField>(g: &G, c: f64, x: &[f64], b: Backend) -> Vec<(f64, f64)> {
    let curv = riemann_ricci(g, x, b).expect("positive definite");
    let n = g.dim();
    let mut out: Vec<(f64, f64)> = curv
        .ricci
        .iter()
        .copied()
        .zip(curv.metric.iter().map(|v| c * v))
        .collect();
    out.push((curv.scalar, c * n as f64));
    out
}

pub(super) fn run(job: &Job) -> Result<()> {
    let seed = job.seed();

    job.check_oracle(
        Claim::new(
            "diffgeo.conformal_oracle",
            "Christoffel, Ricci and scalar curvature of e^{2φ}δ in closed form",
        )
        .note("φ polynomial and φ = −½ln(1 + a|x|²) for a ∈ {0.5, 1, 2}, dimension 4"),
        ORACLE_TOL,
        |b| {
            par_samples(POINTS, |s| {
                let x = point(seed, "diffgeo.conformal_oracle", s, 4);
                let mut out = conformal_pairs(&poly(), 4, &x, b);
                for a in [0.5, 1.0, 2.0] {
                    out.extend(conformal_pairs(&GaPhi { a }, 4, &x, b));
                }
                out
            })
            .concat()
        },
    );

    job.check_oracle(
        Claim::new(
            "diffgeo.flat",
            "flat metrics have vanishing Christoffel symbols and curvature",
        ),
        ORACLE_TOL,
        |b| {
            par_samples(POINTS, |s| {
                let x = point(seed, "diffgeo.flat", s, 4);
                let mut out = Vec::new();
                for c in [1.0, 2.5] {
                    let g = ScaledFlat { dim: 4, c };
                    out.extend(
                        christoffel(&g, &x, b)
                            .expect("positive definite")
                            .gamma
                            .into_iter()
                            .map(|v| (v, 0.0)),
                    );
                    let curv = riemann_ricci(&g, &x, b).expect("positive definite");
                    out.extend(curv.riemann.into_iter().map(|v| (v, 0.0)));
                }
                let curv = riemann_ricci(&FlatMetric { dim: 4 }, &x, b).expect("positive definite");
                out.push((curv.scalar, 0.0));
                out
            })
            .concat()
        },
    );

    job.check_oracle(
        Claim::new(
            "diffgeo.round_sphere",
            "round sphere of radius R: Ric = (N − 1)/R²·g",
        )
        .note("stereographic chart, R = 1.7, N ∈ {2, 4}"),
        ORACLE_TOL,
        |b| {
            par_samples(POINTS, |s| {
                let r = 1.7;
                let mut out = Vec::new();
                for dim in [2, 4] {
                    let x = point(seed, "diffgeo.round_sphere", s, dim);
                    let g = ConformalMetric::new(dim, SpherePhi { radius: r });
                    out.extend(einstein_pairs(&g, (dim as f64 - 1.0) / (r * r), &x, b));
                }
                out
            })
            .concat()
        },
    );

    job.check_oracle(
        Claim::new(
            "diffgeo.fubini_study",
            "Fubini–Study on ℂ² (holomorphic sectional curvature 4): Ric = 6g",
        ),
        ORACLE_TOL,
        |b| {
            par_samples(POINTS, |s| {
                let x = point(seed, "diffgeo.fubini_study", s, 4);
                einstein_pairs(&FubiniStudy { m: 2 }, 6.0, &x, b)
            })
            .concat()
        },
    );

    job.check_backend(
        Claim::new(
            "diffgeo.curvature_symmetries",
            "R_{ijkl} symmetries and the first Bianchi identity",
        ),
        1e-7,
        |b| {
            par_samples(POINTS, |s| {
                let x = point(seed, "diffgeo.curvature_symmetries", s, 4);
                let g = ConformalMetric::new(4, poly());
                let curv = riemann_ricci(&g, &x, b).expect("positive definite");
                curv.symmetry_residual().max(curv.bianchi_residual())
            })
        },
    );
    Ok(())
}
