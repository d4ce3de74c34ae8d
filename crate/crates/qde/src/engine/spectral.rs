//! Right eigenpairs `A q = q lambda` of constant quaternion matrices,
//! computed through the complex adjoint, and the fundamental matrix they
//! induce, `M(t) = (q_1 e^{lambda_1 t}, ..., q_n e^{lambda_n t})`.
//!
//! A right eigenvalue is only determined up to similarity
//! `lambda -> alpha^{-1} lambda alpha`; every similarity class contains
//! exactly one complex representative with nonnegative imaginary part, which
//! is the standardized form returned here. The spectrum of the adjoint
//! consists of the class representatives together with their complex
//! conjugates, so eigenvalues are recovered by conjugate pairing.

use std::sync::Arc;

use super::{FundamentalMatrix, FundamentalMethod};
use crate::clinalg::{eigen as ceigen, C64};
use crate::error::{Error, Result};
use crate::matrix::{ddet, to_adjoint, QMat, QVec};
use crate::quat::Quat;
use crate::tol;

/// A standardized right eigenpair.
///
/// `lambda` is the complex class representative `w + x i` with `x >= 0`.
/// `vector` has unit Euclidean norm; its first significant entry is rotated
/// by a complex phase so the entry's dominant complex component is real and
/// positive. (Only complex phases commute with a standardized eigenvalue, so
/// full real positivity of a general quaternion entry is not reachable —
/// e.g. the `(0, j)`-direction eigenvector of `diag(i, j)` keeps its `j`.)
#[derive(Debug, Clone)]
pub struct RightEigenpair {
    pub lambda: Quat,
    pub vector: QVec,
    pub residual: f64,
}

/// Computes the `n` standardized right eigenpairs of a square quaternion
/// matrix through its `2n x 2n` complex adjoint.
pub fn right_eigenpairs(a: &QMat) -> Result<Vec<RightEigenpair>> {
    if !a.is_square() {
        return Err(Error::NonSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let adj = to_adjoint(a);
    let decomp = ceigen::eigen(&adj.mat, 100 * n.max(1) * 2)
        .map_err(Error::EigenFailure)?;

    // The 2n adjoint eigenvalues split into n conjugate pairs; keep the
    // representative with nonnegative imaginary part from each pair.
    let total = 2 * n;
    let mut used = vec![false; total];
    let mut reps: Vec<usize> = Vec::with_capacity(n);
    for _ in 0..n {
        let pick = (0..total)
            .filter(|&idx| !used[idx])
            .max_by(|&p, &q| {
                decomp.values[p]
                    .im
                    .partial_cmp(&decomp.values[q].im)
                    .unwrap()
            })
            .expect("unused eigenvalue remains");
        used[pick] = true;
        let target = decomp.values[pick].conj();
        let partner = (0..total)
            .filter(|&idx| !used[idx])
            .min_by(|&p, &q| {
                (decomp.values[p] - target)
                    .norm()
                    .partial_cmp(&(decomp.values[q] - target).norm())
                    .unwrap()
            })
            .expect("conjugate partner remains");
        used[partner] = true;
        reps.push(pick);
    }

    let residual_limit = tol::EIGENPAIR_RESIDUAL * a.norm().max(1.0);
    let mut pairs: Vec<RightEigenpair> = Vec::with_capacity(n);
    for idx in reps {
        let value = decomp.values[idx];
        let lambda = Quat::new(value.re, value.im.max(0.0), 0.0, 0.0);

        // Interleaved complex column -> quaternion vector: the adjoint of a
        // vector q = a + b j stacks (a_r, -conj(b_r)).
        let mut entries = Vec::with_capacity(n);
        for r in 0..n {
            let ar = decomp.vectors[(2 * r, idx)];
            let br = -decomp.vectors[(2 * r + 1, idx)].conj();
            entries.push(Quat::new(ar.re, ar.im, br.re, br.im));
        }
        let vector = canonicalize(QVec::new(entries));

        let residual = a
            .matvec(&vector)?
            .sub(&vector.right_scale(lambda))
            .norm();
        if residual > residual_limit {
            return Err(Error::ResidualTooLarge {
                residual,
                limit: residual_limit,
            });
        }
        pairs.push(RightEigenpair {
            lambda,
            vector,
            residual,
        });
    }

    pairs.sort_by(|p, q| {
        p.lambda
            .w
            .total_cmp(&q.lambda.w)
            .then(p.lambda.x.total_cmp(&q.lambda.x))
    });
    Ok(pairs)
}

/// Unit norm plus a complex phase fix on the first significant entry.
/// Complex phases commute with the standardized eigenvalue, so the pair
/// relation is preserved exactly.
fn canonicalize(v: QVec) -> QVec {
    let norm = v.norm2();
    if norm == 0.0 {
        return v;
    }
    let v = v.scale_real(1.0 / norm);
    let lead = v
        .entries()
        .iter()
        .find(|q| q.norm() > 1e-9)
        .copied()
        .unwrap_or(Quat::ONE);
    let a = C64::new(lead.w, lead.x);
    let b = C64::new(lead.y, lead.z);
    let phase = if a.norm() >= b.norm() {
        if a.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            a.conj() / a.norm()
        }
    } else {
        b / b.norm()
    };
    v.right_scale(Quat::new(phase.re, phase.im, 0.0, 0.0))
}

/// Fundamental matrix from right eigenpairs: column `i` is
/// `q_i e^{lambda_i t}` — the exponential scalar acts on the *right*, which
/// is what makes the columns solutions.
///
/// Fails with `DefectiveMatrix` when the eigenvectors are right-dependent
/// (certificate `ddet` below threshold); callers fall back to the adjoint
/// exponential. The construction is residual-checked over `t` in `[0, 1]`.
pub fn fundamental_eigen(a: &QMat) -> Result<FundamentalMatrix> {
    let n = a.rows();
    let pairs = right_eigenpairs(a)?;
    let basis: Vec<QVec> = pairs.iter().map(|p| p.vector.clone()).collect();
    let q0 = QMat::from_columns(&basis)?;
    let cert = ddet(&q0)?;
    let threshold = q0.singular_threshold();
    if cert.abs() <= threshold {
        return Err(Error::Defective(format!(
            "eigenvectors are right-dependent (|ddet| = {:e} <= {:e})",
            cert.abs(),
            threshold
        )));
    }

    let lambdas: Vec<Quat> = pairs.iter().map(|p| p.lambda).collect();
    let eval = move |t: f64| {
        let cols: Vec<QVec> = basis
            .iter()
            .zip(&lambdas)
            .map(|(q, l)| q.right_scale((*l * t).exp()))
            .collect();
        QMat::from_columns(&cols).expect("eigenvector columns share dim")
    };
    let fm = FundamentalMatrix::new(n, 0.0, FundamentalMethod::EigenMethod, Arc::new(eval))?;

    // Defect check: the columns must actually solve x' = A x.
    let h = tol::CENTRAL_DIFF_H;
    let worst = tol::chebyshev_samples(0.0, 1.0, tol::SAMPLE_COUNT)
        .into_iter()
        .map(|t| {
            let deriv = fm
                .eval(t + h)
                .sub(&fm.eval(t - h))
                .map(|d| d.scale_real(1.0 / (2.0 * h)))
                .expect("fixed dims");
            let am = a.matmul(&fm.eval(t)).expect("fixed dims");
            deriv.sub(&am).map(|d| d.norm()).unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max);
    if worst > tol::EIGEN_FUNDAMENTAL_RESIDUAL * a.norm().max(1.0) {
        return Err(Error::Defective(format!(
            "eigen fundamental matrix residual {:e} too large",
            worst
        )));
    }
    Ok(fm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::expm;

    const I: Quat = Quat::I;
    const J: Quat = Quat::J;

    fn mat2(a: Quat, b: Quat, c: Quat, d: Quat) -> QMat {
        QMat::from_rows(vec![vec![a, b], vec![c, d]]).unwrap()
    }

    #[test]
    fn real_diagonal_is_exact() {
        let a = QMat::diag(&[Quat::real(2.0), Quat::real(3.0)]);
        let pairs = right_eigenpairs(&a).unwrap();
        assert_eq!(pairs.len(), 2);
        assert!(pairs[0].lambda.dist(&Quat::real(2.0)) < 1e-12);
        assert!(pairs[1].lambda.dist(&Quat::real(3.0)) < 1e-12);
        assert!(pairs.iter().all(|p| p.residual < 1e-12));
    }

    #[test]
    fn diag_i_j_standardizes_both_classes_to_i() {
        // j = alpha^{-1} i alpha: both diagonal entries are unit pure
        // quaternions, so both classes standardize to i.
        let a = QMat::diag(&[I, J]);
        let pairs = right_eigenpairs(&a).unwrap();
        assert_eq!(pairs.len(), 2);
        for p in &pairs {
            assert!(p.lambda.dist(&I) < 1e-10, "lambda = {}", p.lambda);
            assert!(p.residual < 1e-10);
            assert!((p.vector.norm2() - 1.0).abs() < 1e-12);
        }
        // eigenlines are the coordinate axes: one vector supported on the
        // first entry, the other on the second (a right multiple of (0, j)).
        let mut supports = Vec::new();
        for p in &pairs {
            let s = if p.vector[0].norm() > 0.5 { 0 } else { 1 };
            assert!(p.vector[1 - s].norm() < 1e-10);
            supports.push(s);
        }
        supports.sort_unstable();
        assert_eq!(supports, vec![0, 1]);
    }

    #[test]
    fn upper_triangular_classes_and_eigenlines() {
        // [[i, j], [0, i+j]]: diagonal gives the classes of i and i+j; the
        // latter standardizes to sqrt(2) i. Eigenlines pass through (1,0)
        // and (1,1).
        let a = mat2(I, J, Quat::ZERO, I + J);
        let pairs = right_eigenpairs(&a).unwrap();
        assert_eq!(pairs.len(), 2);
        assert!(pairs[0].lambda.dist(&I) < 1e-10);
        assert!(pairs[1].lambda.dist(&(I * std::f64::consts::SQRT_2)) < 1e-10);

        // membership of the eigenlines: v1 ~ (1,0) q, v2 ~ (1,1) q
        let v1 = &pairs[0].vector;
        assert!(v1[1].norm() < 1e-9);
        let v2 = &pairs[1].vector;
        let line = QVec::new(vec![Quat::ONE, Quat::ONE]).right_scale(v2[0]);
        assert!(v2.dist(&line) < 1e-8);
    }

    #[test]
    fn right_scaling_covariance() {
        let a = mat2(I, J, Quat::ZERO, I + J);
        let pairs = right_eigenpairs(&a).unwrap();
        let alpha = Quat::new(0.3, -1.2, 0.5, 2.0);
        let alpha_inv = alpha.inv().unwrap();
        for p in &pairs {
            let scaled_vec = p.vector.right_scale(alpha);
            let scaled_lambda = alpha_inv * p.lambda * alpha;
            let res = a
                .matvec(&scaled_vec)
                .unwrap()
                .sub(&scaled_vec.right_scale(scaled_lambda))
                .norm();
            assert!(res < 1e-8, "covariance residual {}", res);
        }
    }

    #[test]
    fn eigen_fundamental_matches_expm_after_normalization() {
        let a = mat2(I, J, Quat::ZERO, I + J);
        let fm = fundamental_eigen(&a).unwrap();
        assert_eq!(fm.method(), FundamentalMethod::EigenMethod);
        for &t in &[0.25, 0.5, 1.0] {
            let e = expm(&a, t).unwrap();
            assert!(
                fm.normalized(t).dist_max(&e) < 1e-7,
                "mismatch at t = {}",
                t
            );
        }
    }

    #[test]
    fn eigen_fundamental_diagonal() {
        let a = QMat::diag(&[I, J]);
        let fm = fundamental_eigen(&a).unwrap();
        let t = 0.8;
        let expect = QMat::diag(&[(I * t).exp(), (J * t).exp()]);
        assert!(fm.normalized(t).dist_max(&expect) < 1e-8);
    }

    #[test]
    fn defective_jordan_block_is_rejected() {
        // [[k,1],[0,k]] has a single eigenline; the eigen route must refuse
        // and leave the caller to the adjoint exponential.
        let a = mat2(Quat::K, Quat::ONE, Quat::ZERO, Quat::K);
        match fundamental_eigen(&a) {
            Err(Error::Defective(_)) => {}
            other => panic!("expected DefectiveMatrix, got {:?}", other.map(|_| ())),
        }
    }
}
