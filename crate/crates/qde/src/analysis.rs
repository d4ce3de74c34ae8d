//! Solution-structure analysis for linear QDEs.
//!
//! The solution set of `x' = A(t) x` over the quaternions is a *right* free
//! module: right linear combinations `x_1 q_1 + x_2 q_2` of solutions are
//! solutions, left combinations generally are not. This module provides the
//! matching machinery: right/left dependence tests with explicit
//! certificates, the QDE Wronskian `W(t) = ddet M(t)` (the classical Cayley
//! determinant cannot work here — a right-dependent pair would not
//! annihilate it), the Liouville formula
//! `W(t) = exp(int_{t0}^{t} tr[A + A^+] ds) W(t0)`, and residual checks for
//! the one-sided module structure.

use crate::clinalg::lu;
use crate::engine::{trajectory_residual, FundamentalMatrix, LinearQde};
use crate::error::{Error, Result};
use crate::matrix::{ddet2_expanded, to_adjoint, QMat, QVec};
use crate::quad;
use crate::quat::Quat;
use crate::tol;

/// Outcome of a dependence test. When `dependent`, `certificate` holds
/// coefficients (not all zero, largest modulus 1) whose combination of the
/// input vectors vanishes to within `residual`.
#[derive(Debug, Clone)]
pub struct Dependence {
    pub dependent: bool,
    pub certificate: Option<QVec>,
    pub residual: f64,
}

/// Right linear dependence: do there exist quaternions `q_i`, not all zero,
/// with `v_1 q_1 + ... + v_k q_k = 0`?
///
/// Decided by the rank of the matrix whose columns are the vectors; the
/// certificate comes from the adjoint null space, mapped back and rescaled
/// so its largest-modulus coefficient is 1.
pub fn right_dependent(vectors: &[QVec]) -> Result<Dependence> {
    if vectors.is_empty() {
        return Err(Error::DimensionMismatch("no vectors given".into()));
    }
    let dim = vectors[0].dim();
    if vectors.iter().any(|v| v.dim() != dim) {
        return Err(Error::DimensionMismatch(
            "vectors of unequal dimension".into(),
        ));
    }

    let m = QMat::from_columns(vectors)?;
    let adj = to_adjoint(&m);
    let pivot_tol = tol::SINGULAR_BASE * adj.mat.norm_max().max(1.0);
    let Some(null) = lu::null_vector(&adj.mat, pivot_tol) else {
        return Ok(Dependence {
            dependent: false,
            certificate: None,
            residual: 0.0,
        });
    };

    // Interleaved complex kernel vector -> quaternion coefficients.
    let k = vectors.len();
    let mut coeffs = Vec::with_capacity(k);
    for r in 0..k {
        let a = null[2 * r];
        let b = -null[2 * r + 1].conj();
        coeffs.push(Quat::new(a.re, a.im, b.re, b.im));
    }
    // Rescale (on the right) so the largest coefficient becomes 1.
    let (best_idx, best) = coeffs
        .iter()
        .enumerate()
        .max_by(|(_, p), (_, q)| p.norm().partial_cmp(&q.norm()).unwrap())
        .map(|(idx, q)| (idx, *q))
        .expect("nonempty");
    let _ = best_idx;
    let cert = QVec::new(coeffs).right_scale(best.inv()?);

    let mut combo = QVec::zeros(dim);
    for (v, c) in vectors.iter().zip(cert.entries()) {
        combo = combo.add(&v.right_scale(*c));
    }
    let residual = combo.norm();
    Ok(Dependence {
        dependent: true,
        certificate: Some(cert),
        residual,
    })
}

/// Left linear dependence `q_1 v_1 + ... + q_k v_k = 0`, decided through the
/// conjugation trick: conjugating the relation turns left coefficients into
/// right ones, so the `v_i` are left dependent exactly when their entrywise
/// conjugates are right dependent (certificates map back by conjugation).
pub fn left_dependent(vectors: &[QVec]) -> Result<Dependence> {
    let conjugated: Vec<QVec> = vectors.iter().map(QVec::conj).collect();
    let dep = right_dependent(&conjugated)?;
    Ok(Dependence {
        dependent: dep.dependent,
        certificate: dep.certificate.map(|c| c.conj()),
        residual: dep.residual,
    })
}

/// QDE Wronskian of a 2x2 solution-matrix evaluator at time `t`: the real
/// four-term expansion of `rdet(M M^+)`.
pub fn wronskian(m: &dyn Fn(f64) -> QMat, t: f64) -> Result<f64> {
    Ok(ddet2_expanded(&m(t))?.w)
}

/// Sampled comparison of the Wronskian against the Liouville formula.
#[derive(Debug, Clone)]
pub struct WronskianReport {
    pub t_samples: Vec<f64>,
    pub w_values: Vec<f64>,
    pub formula_values: Vec<f64>,
    pub max_rel_err: f64,
}

impl WronskianReport {
    /// CSV rows `t, w_direct, w_formula, rel_err` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,w_direct,w_formula,rel_err\n");
        for idx in 0..self.t_samples.len() {
            let w = self.w_values[idx];
            let f = self.formula_values[idx];
            let rel = rel_err(w, f);
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                self.t_samples[idx], w, f, rel
            ));
        }
        out
    }
}

fn rel_err(w: f64, f: f64) -> f64 {
    let scale = w.abs().max(f.abs());
    if scale == 0.0 {
        0.0
    } else {
        (w - f).abs() / scale
    }
}

/// Checks the quaternionic Liouville formula on a 2x2 system: for each
/// sample time the Wronskian of `m` is evaluated directly and through
/// `exp(int_{t0}^{t} tr[A + A^+] ds) W(t0)`.
///
/// The integrand `tr[A + A^+] = 2 Re(a11 + a22)` is real, and the integral
/// is done by adaptive Simpson at tolerance 1e-10. The formula is proved
/// for 2x2 systems only, so other dimensions are rejected.
pub fn liouville_check(
    qde: &LinearQde,
    m: &FundamentalMatrix,
    t0: f64,
    ts: &[f64],
) -> Result<WronskianReport> {
    if qde.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "Liouville formula is established for 2x2 systems, got dim {}",
            qde.dim()
        )));
    }
    let w0 = ddet2_expanded(&m.eval(t0))?.w;
    let trace_term = |s: f64| {
        let a = qde.coeff_at(s);
        2.0 * (a[(0, 0)].w + a[(1, 1)].w)
    };

    let mut t_samples = Vec::with_capacity(ts.len());
    let mut w_values = Vec::with_capacity(ts.len());
    let mut formula_values = Vec::with_capacity(ts.len());
    let mut max_rel = 0.0f64;
    for &t in ts {
        let w = ddet2_expanded(&m.eval(t))?.w;
        let integral = quad::integrate_real(trace_term, t0, t, tol::SIMPSON_TOL)?;
        let f = integral.exp() * w0;
        max_rel = max_rel.max(rel_err(w, f));
        t_samples.push(t);
        w_values.push(w);
        formula_values.push(f);
    }
    Ok(WronskianReport {
        t_samples,
        w_values,
        formula_values,
        max_rel_err: max_rel,
    })
}

/// Residuals of the one-sided module structure on a single solution
/// trajectory: right multiplication by a constant quaternion must produce
/// another solution (`right_residual ~ 0`), left multiplication generally
/// must not (`left_residual > 0` unless `q` is central).
///
/// The trajectory itself is residual-checked first (`NotASolution` when it
/// fails); derivatives are central differences with step 1e-6.
pub fn module_structure_check(
    qde: &LinearQde,
    x: &dyn Fn(f64) -> QVec,
    q: Quat,
    ts: &[f64],
) -> Result<(f64, f64)> {
    let own = trajectory_residual(qde, x, ts)?;
    if own > tol::SOLUTION_PRECONDITION {
        return Err(Error::NotASolution {
            residual: own,
            limit: tol::SOLUTION_PRECONDITION,
        });
    }
    let right = trajectory_residual(qde, &|t| x(t).right_scale(q), ts)?;
    let left = trajectory_residual(qde, &|t| x(t).left_scale(q), ts)?;
    Ok((right, left))
}
