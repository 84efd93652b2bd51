use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hyperlab_bench::{base_and_vectors, coords, points};
use hyperlab_core::audits::CCBound;
use hyperlab_core::diffgeo::{bochner_tensor, christoffel, nabla_j, riemann_ricci};
use hyperlab_core::heisenberg::m_mul;
use hyperlab_core::metric::omega_descended;
use hyperlab_core::quatlib::standard_j;
use hyperlab_core::quotients::{GNMetric, NComplexStructure};
use hyperlab_core::{AuditConfig, AuditName, Backend, GaMetric};

fn group_law(c: &mut Criterion) {
    let mut g = c.benchmark_group("group_law");
    for n in [1, 2, 4] {
        let ps = points(n, 64);
        g.bench_with_input(BenchmarkId::from_parameter(n), &ps, |b, ps| {
            b.iter(|| {
                for w in ps.windows(2) {
                    black_box(m_mul(&w[0], &w[1]).unwrap());
                }
            })
        });
    }
    g.finish();
}

fn metric_eval(c: &mut Criterion) {
    let mut g = c.benchmark_group("metric");
    for n in [1, 2] {
        let ga = GaMetric::new(n, 1.0).unwrap();
        let (z, x, y) = base_and_vectors(n);
        g.bench_function(BenchmarkId::new("g_a", n), |b| {
            b.iter(|| ga.eval(black_box(&z), &x, &y))
        });
        g.bench_function(BenchmarkId::new("omega_descended", n), |b| {
            b.iter(|| omega_descended(1, 1.0, black_box(&z), &x, &y))
        });
    }
    g.finish();
}

fn curvature(c: &mut Criterion) {
    let ga = GaMetric::new(1, 1.0).unwrap();
    let x = coords(1);
    let mut g = c.benchmark_group("curvature");
    for (name, backend) in [("dual", Backend::Dual), ("fd", Backend::DEFAULT_FD)] {
        g.bench_function(BenchmarkId::new("christoffel", name), |b| {
            b.iter(|| christoffel(&ga, black_box(&x), backend).unwrap())
        });
        g.bench_function(BenchmarkId::new("riemann_ricci", name), |b| {
            b.iter(|| riemann_ricci(&ga, black_box(&x), backend).unwrap())
        });
    }
    let j = hyperlab_core::diffgeo::ConstEndo(standard_j(1, 1));
    g.bench_function("nabla_j/dual", |b| {
        b.iter(|| nabla_j(&ga, &j, black_box(&x), Backend::Dual).unwrap())
    });
    let gn = GNMetric::new(1, 1.0).unwrap();
    let jn = NComplexStructure { n: 1, a: 1.0 };
    g.bench_function("bochner/dual", |b| {
        b.iter(|| bochner_tensor(&gn, &jn, black_box(&x), Backend::Dual).unwrap())
    });
    g.finish();
}

fn cc_bounds(c: &mut Criterion) {
    let bound = CCBound::new(2.0).unwrap();
    let (z, _, _) = base_and_vectors(2);
    c.bench_function("cc/lower_bound", |b| {
        b.iter(|| bound.lower_bound(black_box(&z)))
    });
}

fn audits(c: &mut Criterion) {
    let mut g = c.benchmark_group("audits");
    g.sample_size(10);
    for name in [AuditName::Algebra, AuditName::Forms, AuditName::Quotients] {
        let cfg = AuditConfig {
            n: vec![1],
            a_values: vec![1.0],
            samples: 100,
            curvature_samples: 5,
            audits: vec![name],
            ..AuditConfig::default()
        };
        g.bench_function(name.as_str(), |b| {
            b.iter(|| hyperlab_core::run_audits(&cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(
    benches,
    group_law,
    metric_eval,
    curvature,
    cc_bounds,
    audits
);
criterion_main!(benches);
