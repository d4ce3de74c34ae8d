//! Property and brute-force tests for quaternion matrices and the complex
//! adjoint backend.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qde::matrix::{
    ddet, ddet2_expanded, expm, expm_series, from_adjoint, inverse, rank, to_adjoint, QMat, QVec,
};
use qde::quat::Quat;

fn component() -> impl Strategy<Value = f64> {
    (-400i32..=400i32).prop_map(|v| v as f64 / 200.0)
}

fn quat() -> impl Strategy<Value = Quat> {
    (component(), component(), component(), component())
        .prop_map(|(w, x, y, z)| Quat::new(w, x, y, z))
}

fn qmat(n: usize, m: usize) -> impl Strategy<Value = QMat> {
    prop::collection::vec(quat(), n * m)
        .prop_map(move |entries| QMat::from_fn(n, m, |i, j| entries[i * m + j]))
}

proptest! {
    /// chi(A B) = chi(A) chi(B) up to 4x4.
    #[test]
    fn adjoint_is_multiplicative(
        n in 1usize..=4,
        seed_a in prop::collection::vec(quat(), 16),
        seed_b in prop::collection::vec(quat(), 16),
    ) {
        let a = QMat::from_fn(n, n, |i, j| seed_a[i * 4 + j]);
        let b = QMat::from_fn(n, n, |i, j| seed_b[i * 4 + j]);
        let lhs = to_adjoint(&a.matmul(&b).unwrap());
        let rhs = to_adjoint(&a).mul(&to_adjoint(&b));
        let mut worst = 0.0f64;
        for i in 0..2 * n {
            for j in 0..2 * n {
                worst = worst.max((lhs.entry(i, j) - rhs.entry(i, j)).norm());
            }
        }
        prop_assert!(worst <= 1e-12 * (a.norm() * b.norm()).max(1.0));
    }

    /// chi(A^+) = chi(A)^H.
    #[test]
    fn adjoint_preserves_conjugate_transpose(a in qmat(3, 2)) {
        let lhs = to_adjoint(&a.conj_transpose());
        let rhs = to_adjoint(&a);
        for i in 0..lhs.rows() {
            for j in 0..lhs.cols() {
                prop_assert!((lhs.entry(i, j) - rhs.entry(j, i).conj()).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn adjoint_round_trip_exact(a in qmat(2, 3)) {
        prop_assert_eq!(from_adjoint(&to_adjoint(&a)).unwrap(), a);
    }

    /// The four-term 2x2 double determinant is real.
    #[test]
    fn ddet_is_real(a in qmat(2, 2)) {
        let full = ddet2_expanded(&a).unwrap();
        prop_assert!(full.im().norm() <= 1e-12 * full.w.abs().max(1.0));
    }

    /// Right-dependent columns annihilate the double determinant.
    #[test]
    fn ddet_vanishes_on_right_dependent_columns(v0 in quat(), v1 in quat(), eta in quat()) {
        let v = QVec::new(vec![v0, v1]);
        let m = QMat::from_columns(&[v.clone(), v.right_scale(eta)]).unwrap();
        let scale = (v.norm() * eta.norm()).powi(2).max(1.0);
        prop_assert!(ddet(&m).unwrap().abs() <= 1e-10 * scale);
    }

    /// One-parameter group property of the exponential. The matrix is
    /// rescaled so ||A|| (t + s) stays moderate; far larger arguments lose
    /// digits to squaring on strongly nonnormal samples, which is an
    /// accuracy ceiling of the method rather than a group-law failure.
    #[test]
    fn expm_group_property(a in qmat(2, 2), t in 0.05f64..1.5, s in 0.05f64..1.5) {
        let a = a.scale_real(4.0 / a.norm().max(4.0));
        let whole = expm(&a, t + s).unwrap();
        let parts = expm(&a, t).unwrap().matmul(&expm(&a, s).unwrap()).unwrap();
        prop_assert!(whole.dist_max(&parts) <= 1e-10 * whole.norm().max(1.0));
    }

    /// Adjoint and series exponentials agree while ||A|| t <= 10.
    #[test]
    fn expm_matches_series(a in qmat(2, 2), t in 0.1f64..1.0) {
        let t = t.min(10.0 / a.norm().max(0.1));
        let fast = expm(&a, t).unwrap();
        let slow = expm_series(&a, t).unwrap();
        prop_assert!(fast.dist_max(&slow) <= 1e-10);
    }

    /// Inverse through the adjoint: M M^{-1} = I when ddet clears the
    /// threshold.
    #[test]
    fn inverse_round_trip(a in qmat(3, 3)) {
        match inverse(&a) {
            Ok(inv) => {
                let prod = a.matmul(&inv).unwrap();
                prop_assert!(prod.dist_max(&QMat::identity(3)) <= 1e-9);
            }
            Err(e) => prop_assert_eq!(e.name(), "SingularMatrix"),
        }
    }
}

/// Mandated brute-force confirmation: the four-term 2x2 formula equals
/// `det(chi(M))` over 10^4 random matrices, before the adjoint route is
/// trusted for other sizes.
#[test]
fn ddet_matches_adjoint_determinant_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_dde7);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let mut entries = [Quat::ZERO; 4];
        for e in &mut entries {
            *e = Quat::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
        }
        let m = QMat::from_fn(2, 2, |i, j| entries[2 * i + j]);
        let four_term = ddet2_expanded(&m).unwrap().w;
        // The adjoint-determinant route is what ddet() uses for n != 2.
        // Reach it through the public API by embedding M as the top-left
        // block of a 3x3 with an identity third row/column:
        // det(chi(M + I-block)) = det(chi(M)) exactly.
        let padded = QMat::from_fn(3, 3, |i, j| {
            if i < 2 && j < 2 {
                m[(i, j)]
            } else if i == j {
                Quat::ONE
            } else {
                Quat::ZERO
            }
        });
        let adjoint_route = ddet(&padded).unwrap();
        let diff = (four_term - adjoint_route).abs();
        let scale = four_term.abs().max(adjoint_route.abs()).max(1.0);
        worst = worst.max(diff / scale);
        assert!(
            diff <= 1e-10 * scale,
            "four-term {} vs adjoint det {} (diff {})",
            four_term,
            adjoint_route,
            diff
        );
    }
    println!("ddet equivalence over 10^4 samples: worst rel diff {:.3e}", worst);
}

/// Zero sets coincide: a singular matrix annihilates both routes.
#[test]
fn ddet_zero_sets_coincide() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..200 {
        let v = QVec::new(vec![
            Quat::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ),
            Quat::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ),
        ]);
        let eta = Quat::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let m = QMat::from_columns(&[v.clone(), v.right_scale(eta)]).unwrap();
        assert!(ddet(&m).unwrap().abs() < 1e-9);
        assert!(rank(&m) <= 1);
    }
}

/// The scaled singularity threshold tracks matrix size: comfortably
/// invertible matrices stay invertible, exactly singular ones are refused.
#[test]
fn inverse_respects_threshold() {
    let big = QMat::diag(&[Quat::real(50.0), Quat::real(0.02)]);
    let inv = inverse(&big).unwrap();
    assert!(big
        .matmul(&inv)
        .unwrap()
        .dist_max(&QMat::identity(2))
        < 1e-10);

    let v = QVec::new(vec![Quat::ONE, Quat::I]);
    let dep = QMat::from_columns(&[v.clone(), v.right_scale(Quat::J)]).unwrap();
    assert!(inverse(&dep).is_err());
}
