//! Worked examples checked through the public API.

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use hyperlab_core::forms::{
    d_omega_eval, eta_eval, f_eval, horizontal_lift, j_on_d, omega_eval, omega_vec,
};
use hyperlab_core::heisenberg::{em_act, m_mul, xi_field};
use hyperlab_core::metric::{omega_descended, tau};
use hyperlab_core::quatlib::{herm_inner, random_sp_n_seeded, so3_from_unit};
use hyperlab_core::quotients::{omega_n, section_h, xi_n, GNMetric, NPoint};
use hyperlab_core::{EMElement, GaMetric, MPoint, MTangent, QVector, Quaternion, UnitQuaternion};

fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
    Quaternion::new(w, x, y, z)
}

fn qv1(x: Quaternion) -> QVector {
    QVector(vec![x])
}

fn quat() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-2.0f64..2.0).prop_map(Quaternion::from_array)
}

fn qvec(n: usize) -> impl Strategy<Value = QVector> {
    prop::collection::vec(quat(), n).prop_map(QVector)
}

fn point(n: usize) -> impl Strategy<Value = MPoint> {
    (prop::array::uniform3(-2.0f64..2.0), qvec(n)).prop_map(|(t, z)| MPoint::new(t, z))
}

#[test]
fn hamilton_products() {
    assert_eq!(q(0., 1., 0., 0.) * q(0., 0., 1., 0.), q(0., 0., 0., 1.));
    assert_eq!(q(1., 1., 0., 0.) * q(1., 0., 1., 0.), q(1., 1., 1., 1.));
}

#[test]
fn hermitian_pairing_of_i_and_j() {
    let i = qv1(q(0., 1., 0., 0.));
    let j = qv1(q(0., 0., 1., 0.));
    assert_eq!(herm_inner(&i, &j).unwrap().im(), [0.0, 0.0, -1.0]);
}

#[test]
fn rotation_by_quarter_turn() {
    let s = 0.5f64.sqrt();
    let r = so3_from_unit(UnitQuaternion::new(q(s, s, 0., 0.)).unwrap());
    // row β is α i_β ᾱ: i ↦ i, j ↦ k, k ↦ −j
    let want = [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]];
    for (row, want_row) in r.iter().zip(want) {
        for (x, y) in row.iter().zip(want_row) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-12);
        }
    }
    let minus = so3_from_unit(UnitQuaternion::new(q(-1., 0., 0., 0.)).unwrap());
    assert_eq!(minus, so3_from_unit(UnitQuaternion::identity()));
}

#[test]
fn seeded_symplectic_draws() {
    let a = random_sp_n_seeded(9, 3).unwrap();
    assert!(a.symplectic_residual() < 1e-12);
    assert_eq!(a, random_sp_n_seeded(9, 3).unwrap());
    let u = random_sp_n_seeded(4, 1).unwrap();
    assert_abs_diff_eq!(u.get(0, 0).norm(), 1.0, epsilon = 1e-12);
}

#[test]
fn product_of_i_and_j_lines() {
    let p = MPoint::new([0.0; 3], qv1(q(0., 1., 0., 0.)));
    let r = MPoint::new([0.0; 3], qv1(q(0., 0., 1., 0.)));
    let pr = m_mul(&p, &r).unwrap();
    assert_eq!(pr.t, [0.0, 0.0, 1.0]);
    assert_eq!(pr.z, qv1(q(0., 1., 1., 0.)));
}

#[test]
fn translation_moves_only_the_centre() {
    let h = EMElement::translation([1.0, -2.0, 0.5], QVector::zeros(1));
    let p = MPoint::new([0.25, 0.0, 1.0], qv1(q(1., 2., 3., 4.)));
    let hp = em_act(&h, &p).unwrap();
    assert_eq!(hp.t, [1.25, -2.0, 1.5]);
    assert_eq!(hp.z, p.z);
}

#[test]
fn xi_on_the_centre() {
    let a = 0.7;
    let p = MPoint::new([0.0, 0.3, -1.1], QVector::zeros(2));
    let xi = xi_field(a, 1, &p);
    assert_abs_diff_eq!(xi.dt[0], 1.0);
    assert_abs_diff_eq!(xi.dt[1], 2.0 * a * -1.1, epsilon = 1e-15);
    assert_abs_diff_eq!(xi.dt[2], -2.0 * a * 0.3, epsilon = 1e-15);
    assert_eq!(xi.dz, QVector::zeros(2));
}

#[test]
fn conformal_factor_values() {
    assert_eq!(f_eval(1.0, &QVector::<f64>::zeros(2)), 1.0);
    assert_abs_diff_eq!(
        f_eval(1.0, &qv1(q(0.6, 0.0, 0.8, 0.0))),
        0.5,
        epsilon = 1e-15
    );
}

#[test]
fn d_omega_on_first_coordinate_plane() {
    let e1 = MTangent::from_hvec(qv1(q(1., 0., 0., 0.)));
    let e2 = MTangent::from_hvec(qv1(q(0., 1., 0., 0.)));
    assert_eq!(d_omega_eval(1, &e1, &e2), 2.0);
}

#[test]
fn j_one_at_the_origin() {
    let v = horizontal_lift(&MPoint::identity(1), &qv1(q(1., 0., 0., 0.)));
    let jv = j_on_d(1, &v);
    assert_eq!(jv.project(), &qv1(q(0., -1., 0., 0.)));
    assert_eq!(jv.vector().dt, [0.0; 3]);
}

#[test]
fn metric_halves_at_unit_distance() {
    let g = GaMetric::new(1, 1.0).unwrap();
    let e1 = qv1(q(1., 0., 0., 0.));
    let at0 = g.eval(&QVector::zeros(1), &e1, &e1);
    assert_abs_diff_eq!(g.eval(&e1, &e1, &e1), 0.5 * at0, epsilon = 1e-14);
}

#[test]
fn twist_at_half_turn() {
    let a = 0.8;
    let r = (2.0 * std::f64::consts::PI / a).sqrt();
    let z = qv1(q(0.6, 0.0, 0.0, 0.8).scale(r));
    assert!(tau(1, a, &z).add(&z).norm() < 1e-12);
}

#[test]
fn descended_form_at_origin() {
    let e1 = qv1(q(1., 0., 0., 0.));
    let e2 = qv1(q(0., 1., 0., 0.));
    assert_abs_diff_eq!(
        omega_descended(1, 0.9, &QVector::zeros(1), &e1, &e2),
        2.0,
        epsilon = 1e-15
    );
}

#[test]
fn section_at_unit_point() {
    let s = section_h(1, &qv1(q(1., 0., 0., 0.)));
    assert_abs_diff_eq!(s.t, -0.5);
    assert_eq!(s.z, qv1(q(0., 1., 0., 0.)));
}

#[test]
fn n_metric_at_origin_is_normalized() {
    use num_complex::Complex64;
    let gn = GNMetric::new(1, 1.5).unwrap();
    let o = vec![Complex64::new(0.0, 0.0); 2];
    let e = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let g = GaMetric::new(1, 1.5).unwrap();
    let e1 = qv1(q(1., 0., 0., 0.));
    assert_abs_diff_eq!(
        gn.eval(&o, &e, &e),
        g.eval(&QVector::zeros(1), &e1, &e1),
        epsilon = 1e-14
    );
}

proptest! {
    #[test]
    fn inverse_of_nonzero(x in quat()) {
        prop_assume!(x.norm() > 1e-3);
        let one = x * x.inverse();
        prop_assert!((one - Quaternion::one()).norm() < 1e-12);
    }

    #[test]
    fn self_pairing_is_real(z in qvec(3)) {
        let p = herm_inner(&z, &z).unwrap();
        prop_assert!(p.im().iter().all(|c| c.abs() < 1e-12));
        prop_assert!((p.w - z.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn centre_is_central(s in prop::array::uniform3(-3.0f64..3.0), p in point(2)) {
        let c = MPoint::new(s, QVector::zeros(2));
        let l = m_mul(&c, &p).unwrap();
        let r = m_mul(&p, &c).unwrap();
        prop_assert!(l.t.iter().zip(r.t).all(|(x, y)| (x - y).abs() < 1e-12));
        prop_assert_eq!(l.z, r.z);
    }

    #[test]
    fn omega_of_d_dt(p in point(2), al in 1usize..=3) {
        prop_assert_eq!(omega_eval(al, &p, &MTangent::d_dt(2, al)), 1.0);
    }

    #[test]
    fn omega_of_xi(p in point(2), a in 0.1f64..3.0) {
        let w = omega_eval(1, &p, &xi_field(a, 1, &p));
        prop_assert!((w - (1.0 + a * p.z.norm_sqr())).abs() < 1e-10 * (1.0 + a * p.z.norm_sqr()));
        let eta = eta_eval(a, 1, &p, &xi_field(a, 1, &p));
        prop_assert!((eta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lifts_are_horizontal(p in point(2), v in qvec(2)) {
        let h = horizontal_lift(&p, &v);
        prop_assert_eq!(h.project(), &v);
        let w = omega_vec(&p, h.vector());
        prop_assert!(w.iter().all(|c| c.abs() < 1e-12 * (1.0 + p.z.norm() * v.norm())));
    }

    #[test]
    fn twist_preserves_norm(z in qvec(2), a in 0.1f64..3.0, al in 1usize..=3) {
        prop_assert!((tau(al, a, &z).norm() - z.norm()).abs() < 1e-13 * (1.0 + z.norm()));
    }

    #[test]
    fn omega_n_of_xi(t in -2.0f64..2.0, u in prop::collection::vec(-2.0f64..2.0, 4), a in 0.1f64..3.0) {
        let p = NPoint {
            t,
            u: hyperlab_core::quotients::c_from_reals(&u),
        };
        let r2: f64 = u.iter().map(|x| x * x).sum();
        prop_assert!((omega_n(&p, &xi_n(a, &p)) - (1.0 + a * r2)).abs() < 1e-12 * (1.0 + a * r2));
    }
}
