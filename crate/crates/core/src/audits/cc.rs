use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{par_samples, Claim, Job};
use crate::error::Result;
use crate::forms::{f_eval, omega_vec};
use crate::heisenberg::{MPoint, MTangent};
use crate::metric::check_a;
use crate::quatlib::{herm_inner, QVector, Quaternion};
use crate::sampling::{sample_hvec, sample_rng};

/// Integrator tolerance for length comparisons.
const INTEGRATOR_TOL: f64 = 1e-4;
const STEPS: usize = 1000;
const MODES: usize = 4;

/// Constants of the Carnot–Carathéodory length bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct CCBound {
    /// `A = max{1, √a}`.
    pub A: f64,
    /// `B` with `B² = min{1, a}`.
    pub B: f64,
}

impl CCBound {
    pub fn new(a: f64) -> Result<Self> {
        check_a(a)?;
        Ok(CCBound {
            A: a.sqrt().max(1.0),
            B: a.sqrt().min(1.0),
        })
    }

    /// `(1/(nA)) log(1 + |x₁| + … + |x_n|)` for the quaternionic coordinates of `x`.
    pub fn lower_bound(&self, x: &QVector<f64>) -> f64 {
        let s: f64 = x.0.iter().map(|q| q.norm()).sum();
        (1.0 + s).ln() / (x.len() as f64 * self.A)
    }

    /// `(1/B) log(|γ| + √(1 + |γ|²))`.
    pub fn radial_upper_bound(&self, gamma: &QVector<f64>) -> f64 {
        let r = gamma.norm();
        (r + (1.0 + r * r).sqrt()).ln() / self.B
    }
}

/// A horizontal curve from the identity, integrated from seeded controls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub endpoint: MPoint<f64>,
    /// `∫ f(σ)^{1/2} |π̇σ| ds`.
    pub length: f64,
    /// Max of `|ω(σ̇)|` estimated by central differences of the trajectory,
    /// relative to `1 + |z||ż|`.
    pub horizontality: f64,
}

fn basis(m: usize, s: f64) -> f64 {
    let k = (m / 2) as f64;
    if m.is_multiple_of(2) {
        (k * std::f64::consts::PI * s).cos()
    } else {
        ((k + 1.0) * std::f64::consts::PI * s).sin()
    }
}

fn control(coeffs: &[QVector<f64>], s: f64) -> QVector<f64> {
    let n = coeffs[0].len();
    coeffs
        .iter()
        .enumerate()
        .fold(QVector::zeros(n), |acc, (m, c)| {
            acc.add(&c.scale(basis(m, s)))
        })
}

/// Integrates `ż = c(s)`, `ṫ = −Im⟨z, ż⟩`, `L̇ = f(z)^{1/2}|ż|` from the identity with RK4,
/// where `c(s) = Σ_m coeffs[m]·b_m(s)` for a cosine/sine basis `b_m`.
pub fn horizontal_curve(a: f64, coeffs: &[QVector<f64>], steps: usize) -> CurveSample {
    let n = coeffs[0].len();
    let d = 4 * n + 4;
    let rhs = |s: f64, y: &[f64]| -> Vec<f64> {
        let z = QVector::from_reals(&y[3..3 + 4 * n]);
        let c = control(coeffs, s);
        let im = herm_inner(&z, &c).expect("same n").im();
        let mut out = vec![-im[0], -im[1], -im[2]];
        out.extend(c.to_reals());
        out.push(f_eval(a, &z).sqrt() * c.norm());
        out
    };
    let h = 1.0 / steps as f64;
    let mut y = vec![0.0; d];
    let mut traj = vec![y.clone()];
    for k in 0..steps {
        let s = k as f64 * h;
        let k1 = rhs(s, &y);
        let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, b)| a + 0.5 * h * b).collect();
        let k2 = rhs(s + 0.5 * h, &y2);
        let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, b)| a + 0.5 * h * b).collect();
        let k3 = rhs(s + 0.5 * h, &y3);
        let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, b)| a + h * b).collect();
        let k4 = rhs(s + h, &y4);
        for i in 0..d {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        traj.push(y.clone());
    }
    let mut horizontality = 0.0f64;
    for k in 1..steps {
        let p = MPoint::from_flat(&traj[k][..d - 1]);
        let dv: Vec<f64> = (0..d - 1)
            .map(|i| (traj[k + 1][i] - traj[k - 1][i]) / (2.0 * h))
            .collect();
        let v = MTangent::from_flat(&dv);
        let w = omega_vec(&p, &v);
        let scale = 1.0 + p.z.norm() * v.dz.norm();
        horizontality = horizontality.max(w.iter().map(|c| c.abs()).fold(0.0, f64::max) / scale);
    }
    CurveSample {
        endpoint: MPoint::from_flat(&y[..d - 1]),
        length: y[d - 1],
        horizontality,
    }
}

/// Length of the radial segment `μ(s) = (0, sγ)`, `s ∈ [0, 1]`, by composite Simpson.
pub fn radial_length(a: f64, gamma: &QVector<f64>, intervals: usize) -> f64 {
    let m = intervals + intervals % 2;
    let h = 1.0 / m as f64;
    let r = gamma.norm();
    let integrand = |s: f64| f_eval(a, &gamma.scale(s)).sqrt() * r;
    let mut sum = integrand(0.0) + integrand(1.0);
    for k in 1..m {
        sum += integrand(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

fn sample_controls<R: Rng>(rng: &mut R, n: usize) -> Vec<QVector<f64>> {
    let scale = 3.0 * rng.random::<f64>();
    (0..MODES)
        .map(|m| sample_hvec(rng, n).scale(scale / (1.0 + m as f64)))
        .collect()
}

fn sample_gamma<R: Rng>(rng: &mut R, n: usize) -> QVector<f64> {
    let dir = sample_hvec(rng, n);
    let r = 10.0 * rng.random::<f64>();
    dir.scale(r / dir.norm().max(1e-300))
}

pub(super) fn run(job: &Job) -> Result<()> {
    let (n, a, seed, count) = (job.n(), job.a(), job.seed(), job.samples());
    let bound = CCBound::new(a)?;

    let curves: Vec<CurveSample> = par_samples(count, |s| {
        let mut rng = sample_rng(seed, "cc.lower_bound", s);
        horizontal_curve(a, &sample_controls(&mut rng, n), STEPS)
    });

    job.check(
        Claim::new(
            "cc.lower_bound",
            "L(σ) ≥ (1/(nA)) log(1 + |x₁| + … + |x_n|) for horizontal σ from 0 to x",
        )
        .note("value = max(0, bound − L); x_i the quaternionic coordinates of π(x)"),
        INTEGRATOR_TOL,
        || {
            curves
                .iter()
                .map(|c| (bound.lower_bound(&c.endpoint.z) - c.length).max(0.0))
                .collect()
        },
    );

    job.check(
        Claim::new(
            "cc.curve_horizontal",
            "integrated control curves are horizontal: ω(σ̇) = 0",
        )
        .note("central differences of the RK4 trajectory"),
        INTEGRATOR_TOL,
        || curves.iter().map(|c| c.horizontality).collect(),
    );

    job.check(
        Claim::new(
            "cc.radial_upper_bound",
            "L(μ) ≤ (1/B) log(|γ| + √(1 + |γ|²)) for μ(s) = (0, sγ)",
        )
        .note("value = max(0, L − bound); |γ| up to 10"),
        INTEGRATOR_TOL,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "cc.radial_upper_bound", s);
                let gamma = sample_gamma(&mut rng, n);
                (radial_length(a, &gamma, 2000) - bound.radial_upper_bound(&gamma)).max(0.0)
            })
        },
    );

    job.check(
        Claim::new(
            "cc.radial_horizontal",
            "ω(μ̇(s)) = Im(|γ|²) s = 0 along radial segments",
        ),
        1e-12,
        || {
            par_samples(count, |s| {
                let mut rng = sample_rng(seed, "cc.radial_horizontal", s);
                let gamma = sample_gamma(&mut rng, n);
                let v = MTangent::new([0.0; 3], gamma.clone());
                [0.25, 0.5, 1.0]
                    .iter()
                    .map(|&u| {
                        let p = MPoint::new([0.0; 3], gamma.scale(u));
                        let w = omega_vec(&p, &v);
                        w.iter().map(|c| c.abs()).fold(0.0, f64::max) / (1.0 + gamma.norm_sqr())
                    })
                    .fold(0.0, f64::max)
            })
        },
    );
    Ok(())
}

/// The fixed examples, at `n = 1`, `a = 1`.
pub(super) fn run_fixed(job: &Job) -> Result<()> {
    let bound = CCBound::new(1.0)?;
    job.check(
        Claim::new("cc.example_origin", "x = 0: the lower bound is 0 ≤ L(σ)")
            .note("constant curve at the identity"),
        INTEGRATOR_TOL,
        || {
            let c = horizontal_curve(1.0, &[QVector::zeros(1)], 10);
            vec![
                (bound.lower_bound(&c.endpoint.z) - c.length).max(0.0),
                bound.lower_bound(&c.endpoint.z),
            ]
        },
    );
    job.check(
        Claim::new(
            "cc.example_radial_unit",
            "radial segment to |γ| = 1 at a = 1: L ≤ log(1 + √2)",
        )
        .note("value = max(0, L − log(1 + √2))"),
        INTEGRATOR_TOL,
        || {
            let gamma = QVector(vec![Quaternion::one()]);
            vec![(radial_length(1.0, &gamma, 2000) - (1.0 + 2f64.sqrt()).ln()).max(0.0)]
        },
    );
    Ok(())
}
