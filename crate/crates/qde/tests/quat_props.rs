//! Property tests for scalar quaternion algebra: the laws the rest of the
//! crate silently leans on.

use proptest::prelude::*;
use qde::quat::{format_quat, parse_quat, Quat};

fn component() -> impl Strategy<Value = f64> {
    (-1000i32..=1000i32).prop_map(|v| v as f64 / 250.0)
}

fn quat() -> impl Strategy<Value = Quat> {
    (component(), component(), component(), component())
        .prop_map(|(w, x, y, z)| Quat::new(w, x, y, z))
}

fn nonzero_quat() -> impl Strategy<Value = Quat> {
    quat().prop_filter("needs modulus away from zero", |q| q.norm() > 0.05)
}

proptest! {
    #[test]
    fn associativity(p in quat(), q in quat(), r in quat()) {
        let left = (p * q) * r;
        let right = p * (q * r);
        let scale = p.norm() * q.norm() * r.norm();
        prop_assert!(left.dist(&right) <= 1e-13 * scale.max(1.0));
    }

    #[test]
    fn conjugation_reverses_products(p in quat(), q in quat()) {
        let lhs = (p * q).conj();
        let rhs = q.conj() * p.conj();
        prop_assert!(lhs.dist(&rhs) <= 1e-13 * (p.norm() * q.norm()).max(1.0));
    }

    #[test]
    fn modulus_is_multiplicative(p in quat(), q in quat()) {
        let lhs = (p * q).norm();
        let rhs = p.norm() * q.norm();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.max(1.0));
    }

    #[test]
    fn triangle_inequality(p in quat(), q in quat()) {
        prop_assert!((p + q).norm() <= p.norm() + q.norm() + 1e-12);
    }

    #[test]
    fn conj_times_self_is_modulus_squared(q in quat()) {
        let prod = q.conj() * q;
        prop_assert!((prod.w - q.norm_sq()).abs() <= 1e-12 * q.norm_sq().max(1.0));
        prop_assert!(prod.im().norm() <= 1e-12 * q.norm_sq().max(1.0));
    }

    #[test]
    fn inverse_round_trip(q in nonzero_quat()) {
        let inv = q.inv().unwrap();
        prop_assert!((q * inv).dist(&Quat::ONE) <= 1e-12);
        prop_assert!((inv * q).dist(&Quat::ONE) <= 1e-12);
    }

    /// exp(p) exp(q) = exp(p + q) whenever p and q commute; commuting pairs
    /// are built by putting both on the same pure axis.
    #[test]
    fn exp_addition_on_commuting_pairs(
        axis in (component(), component(), component()),
        s in component(),
        t in component(),
        w1 in component(),
        w2 in component(),
    ) {
        let pure = Quat::pure(axis.0, axis.1, axis.2);
        let p = Quat::real(w1) + pure * s;
        let q = Quat::real(w2) + pure * t;
        // sanity: they commute
        prop_assert!((p * q).dist(&(q * p)) <= 1e-12 * (p.norm() * q.norm()).max(1.0));
        let lhs = p.exp() * q.exp();
        let rhs = (p + q).exp();
        prop_assert!(lhs.dist(&rhs) <= 1e-10 * rhs.norm().max(1.0));
    }

    /// Re(a conj(b)) = Re(conj(a) b); the identity behind the reality of
    /// the Wronskian.
    #[test]
    fn real_part_of_conjugate_products(a in quat(), b in quat()) {
        let lhs = (a * b.conj()).w;
        let rhs = (a.conj() * b).w;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (a.norm() * b.norm()).max(1.0));
    }

    #[test]
    fn exp_modulus_is_exp_of_real_part(q in quat()) {
        prop_assert!((q.exp().norm() - q.w.exp()).abs() <= 1e-12 * q.w.exp());
    }

    #[test]
    fn format_parse_round_trip_is_exact(q in quat()) {
        let text = format_quat(&q);
        let back = parse_quat(&text).unwrap();
        // bit-exact round trip (negative zero may normalize to zero)
        prop_assert_eq!(back, Quat::new(q.w + 0.0, q.x + 0.0, q.y + 0.0, q.z + 0.0));
    }

    #[test]
    fn format_parse_round_trip_extreme_values(
        w in prop::num::f64::NORMAL,
        x in prop::num::f64::NORMAL,
    ) {
        let q = Quat::new(w, x, 0.0, 0.0);
        let back = parse_quat(&format_quat(&q)).unwrap();
        prop_assert_eq!(back, Quat::new(w + 0.0, x + 0.0, 0.0, 0.0));
    }
}
