//! Solvers for linear quaternion differential equations `x'(t) = A(t) x(t)`.
//!
//! The module provides one numeric route — classical fixed-step RK4 over
//! quaternion vectors, used throughout as the cross-checking oracle — and
//! several closed-form routes for constant coefficients: the adjoint matrix
//! exponential, commuting diagonal + nilpotent splits, Jordan blocks, and
//! right-eigenpair fundamental matrices ([`right_eigenpairs`],
//! [`fundamental_eigen`]). Time-varying diagonal systems get the quadrature
//! closed form when the coefficient commutes with its own running integral.
//!
//! Every fundamental matrix carries a validity certificate (the double
//! determinant at its anchor time) and can be residual-checked against its
//! system; any two fundamental matrices of the same system differ only by a
//! constant right factor, so all methods agree after normalization to
//! `M(t0) = I`.

mod spectral;

pub use spectral::{fundamental_eigen, right_eigenpairs, RightEigenpair};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::{ddet, inverse, QMat, QVec};
use crate::quad;
use crate::quat::Quat;
use crate::tol;

/// Time-varying coefficient provider.
pub type CoeffFn = Arc<dyn Fn(f64) -> QMat + Send + Sync>;

/// Scalar coefficient provider for diagonal systems.
pub type ScalarFn = Arc<dyn Fn(f64) -> Quat + Send + Sync>;

/// A linear QDE `x'(t) = A(t) x(t)` on a real interval.
#[derive(Clone)]
pub struct LinearQde {
    dim: usize,
    interval: (f64, f64),
    label: String,
    coeff: CoeffFn,
}

impl LinearQde {
    /// Wraps a coefficient provider; checks that it produces `dim x dim`
    /// matrices at the interval midpoint.
    pub fn new(
        dim: usize,
        interval: (f64, f64),
        label: impl Into<String>,
        coeff: CoeffFn,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch("dimension must be positive".into()));
        }
        if interval.0 >= interval.1 || !interval.0.is_finite() || !interval.1.is_finite() {
            return Err(Error::DimensionMismatch(format!(
                "invalid interval [{}, {}]",
                interval.0, interval.1
            )));
        }
        let probe = coeff(0.5 * (interval.0 + interval.1));
        if (probe.rows(), probe.cols()) != (dim, dim) {
            return Err(Error::DimensionMismatch(format!(
                "coefficient produced {}x{}, expected {}x{}",
                probe.rows(),
                probe.cols(),
                dim,
                dim
            )));
        }
        Ok(LinearQde {
            dim,
            interval,
            label: label.into(),
            coeff,
        })
    }

    /// Constant-coefficient system.
    pub fn constant(a: QMat, interval: (f64, f64), label: impl Into<String>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NonSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let dim = a.rows();
        LinearQde::new(dim, interval, label, Arc::new(move |_| a.clone()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn coeff_at(&self, t: f64) -> QMat {
        (self.coeff)(t)
    }

    /// Spot check of coefficient continuity: the largest jump
    /// `||A(t + h) - A(t)||` over Chebyshev samples with `h = 1e-8`.
    pub fn continuity_spot_check(&self) -> f64 {
        let h = 1e-8;
        tol::chebyshev_samples(self.interval.0, self.interval.1, tol::SAMPLE_COUNT)
            .into_iter()
            .map(|t| {
                let a = self.coeff_at(t);
                let b = self.coeff_at(t + h);
                b.sub(&a).map(|d| d.norm()).unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max)
    }
}

/// Initial value problem `x'(t) = A(t) x(t)`, `x(t0) = x0`.
pub struct Ivp {
    pub qde: LinearQde,
    pub t0: f64,
    pub x0: QVec,
}

impl Ivp {
    pub fn new(qde: LinearQde, t0: f64, x0: QVec) -> Result<Self> {
        if x0.dim() != qde.dim() {
            return Err(Error::DimensionMismatch(format!(
                "initial value has dim {}, system has dim {}",
                x0.dim(),
                qde.dim()
            )));
        }
        Ok(Ivp { qde, t0, x0 })
    }
}

/// Sampled solution with a C1 cubic-Hermite interpolant built from the exact
/// slope information `A(t_i) x_i` stored at every node.
pub struct Trajectory {
    ts: Vec<f64>,
    xs: Vec<QVec>,
    derivs: Vec<QVec>,
}

impl Trajectory {
    pub fn nodes(&self) -> (&[f64], &[QVec]) {
        (&self.ts, &self.xs)
    }

    pub fn first_time(&self) -> f64 {
        self.ts[0]
    }

    pub fn last_time(&self) -> f64 {
        *self.ts.last().unwrap()
    }

    pub fn last(&self) -> &QVec {
        self.xs.last().unwrap()
    }

    /// Evaluates the interpolant; node times are reproduced exactly.
    pub fn eval(&self, t: f64) -> QVec {
        let n = self.ts.len();
        if n == 1 {
            return self.xs[0].clone();
        }
        // exact node hit (keeps node reproduction bit-exact)
        if let Ok(idx) = self
            .ts
            .binary_search_by(|probe| probe.partial_cmp(&t).unwrap())
        {
            return self.xs[idx].clone();
        }
        let seg = self
            .ts
            .partition_point(|&u| u <= t)
            .clamp(1, n - 1)
            - 1;
        let h = self.ts[seg + 1] - self.ts[seg];
        let s = (t - self.ts[seg]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        self.xs[seg]
            .scale_real(h00)
            .add(&self.derivs[seg].scale_real(h10 * h))
            .add(&self.xs[seg + 1].scale_real(h01))
            .add(&self.derivs[seg + 1].scale_real(h11 * h))
    }
}

/// Classical 4th-order Runge-Kutta with fixed step `(t_end - t0) / steps`.
///
/// All stage arithmetic multiplies in the written order `A(t) x` (left
/// action of the coefficient); global error is O(h^4). Integrating backward
/// (`t_end < t0`) is allowed; nodes are stored in increasing time order.
pub fn solve_ivp(ivp: &Ivp, t_end: f64, steps: usize) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::DimensionMismatch("steps must be >= 1".into()));
    }
    let (a, b) = ivp.qde.interval();
    let slack = 1e-12 * (b - a);
    for (what, t) in [("t0", ivp.t0), ("t_end", t_end)] {
        if t < a - slack || t > b + slack {
            return Err(Error::Domain(format!(
                "{} = {} outside the system interval [{}, {}]",
                what, t, a, b
            )));
        }
    }
    let t0 = ivp.t0;
    let h = (t_end - t0) / steps as f64;
    let coeff = |t: f64| ivp.qde.coeff_at(t);

    let mut ts = Vec::with_capacity(steps + 1);
    let mut xs = Vec::with_capacity(steps + 1);
    let mut derivs = Vec::with_capacity(steps + 1);

    let mut t = t0;
    let mut x = ivp.x0.clone();
    let mut a_t = coeff(t);
    for step in 0..=steps {
        let dx = a_t.matvec(&x)?;
        ts.push(t);
        xs.push(x.clone());
        derivs.push(dx.clone());
        if step == steps {
            break;
        }

        let k1 = dx;
        let a_mid = coeff(t + 0.5 * h);
        let k2 = a_mid.matvec(&x.add(&k1.scale_real(0.5 * h)))?;
        let k3 = a_mid.matvec(&x.add(&k2.scale_real(0.5 * h)))?;
        let t_next = t0 + (step + 1) as f64 * h;
        let a_next = coeff(t_next);
        let k4 = a_next.matvec(&x.add(&k3.scale_real(h)))?;

        let incr = k1
            .add(&k2.scale_real(2.0))
            .add(&k3.scale_real(2.0))
            .add(&k4)
            .scale_real(h / 6.0);
        x = x.add(&incr);
        t = t_next;
        a_t = a_next;
    }

    if h < 0.0 {
        ts.reverse();
        xs.reverse();
        derivs.reverse();
    }
    Ok(Trajectory { ts, xs, derivs })
}

/// Which construction produced a fundamental matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FundamentalMethod {
    NumericColumns,
    ExpmAdjoint,
    CommutingSplit,
    JordanClosedForm,
    EigenMethod,
}

impl std::fmt::Display for FundamentalMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FundamentalMethod::NumericColumns => "numeric",
            FundamentalMethod::ExpmAdjoint => "expm",
            FundamentalMethod::CommutingSplit => "split",
            FundamentalMethod::JordanClosedForm => "jordan",
            FundamentalMethod::EigenMethod => "eigen",
        };
        f.write_str(s)
    }
}

/// Evaluator `t -> M(t)` for a fundamental matrix, with provenance and a
/// validity certificate `ddet M(t0) != 0`.
#[derive(Clone)]
pub struct FundamentalMatrix {
    dim: usize,
    t0: f64,
    method: FundamentalMethod,
    certificate: f64,
    inv_at_t0: QMat,
    eval: Arc<dyn Fn(f64) -> QMat + Send + Sync>,
}

impl FundamentalMatrix {
    /// Validates the certificate at `t0` and caches `M(t0)^{-1}` for
    /// normalized evaluation.
    pub fn new(
        dim: usize,
        t0: f64,
        method: FundamentalMethod,
        eval: Arc<dyn Fn(f64) -> QMat + Send + Sync>,
    ) -> Result<Self> {
        let m0 = eval(t0);
        if (m0.rows(), m0.cols()) != (dim, dim) {
            return Err(Error::DimensionMismatch(format!(
                "fundamental evaluator produced {}x{}, expected {}x{}",
                m0.rows(),
                m0.cols(),
                dim,
                dim
            )));
        }
        let certificate = ddet(&m0)?;
        let threshold = m0.singular_threshold();
        if certificate.abs() <= threshold {
            return Err(Error::Singular {
                ddet: certificate,
                threshold,
            });
        }
        let inv_at_t0 = inverse(&m0)?;
        Ok(FundamentalMatrix {
            dim,
            t0,
            method,
            certificate,
            inv_at_t0,
            eval,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn method(&self) -> FundamentalMethod {
        self.method
    }

    /// `ddet M(t0)`, nonzero by construction.
    pub fn certificate(&self) -> f64 {
        self.certificate
    }

    pub fn eval(&self, t: f64) -> QMat {
        (self.eval)(t)
    }

    /// `M(t) M(t0)^{-1}` — the normal fundamental matrix, identical across
    /// construction methods.
    pub fn normalized(&self, t: f64) -> QMat {
        self.eval(t)
            .matmul(&self.inv_at_t0)
            .expect("fundamental matrix dimensions are fixed")
    }

    /// Solves the IVP `x(t0) = x0` through this fundamental matrix:
    /// `x(t) = M(t) M(t0)^{-1} x0`.
    pub fn propagate(&self, x0: &QVec, t: f64) -> Result<QVec> {
        self.normalized(t).matvec(x0)
    }

    /// Largest sampled residual `||M'(t) - A(t) M(t)||` over the system's
    /// interval (central differences).
    pub fn residual_max(&self, qde: &LinearQde, samples: usize) -> f64 {
        let (a, b) = qde.interval();
        let h = tol::CENTRAL_DIFF_H;
        tol::chebyshev_samples(a, b, samples)
            .into_iter()
            .map(|t| {
                let deriv = self
                    .eval(t + h)
                    .sub(&self.eval(t - h))
                    .map(|d| d.scale_real(1.0 / (2.0 * h)))
                    .expect("fixed dims");
                let am = qde
                    .coeff_at(t)
                    .matmul(&self.eval(t))
                    .expect("fixed dims");
                deriv.sub(&am).map(|d| d.norm()).unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max)
    }
}

/// Fundamental matrix by integrating the natural-basis columns with RK4.
///
/// Starts every column at the identity, so the certificate is exactly
/// `ddet I = 1`. The evaluator spans the whole system interval even when
/// `t0` is interior (backward integration covers the left part).
pub fn fundamental_numeric(qde: &LinearQde, t0: f64, steps: usize) -> Result<FundamentalMatrix> {
    let (a, b) = qde.interval();
    if !(a..=b).contains(&t0) {
        return Err(Error::DimensionMismatch(format!(
            "t0 = {} outside interval [{}, {}]",
            t0, a, b
        )));
    }
    let n = qde.dim();
    let span = (b - a).max(f64::MIN_POSITIVE);
    let fwd_steps = ((steps as f64) * (b - t0) / span).ceil() as usize;
    let bwd_steps = ((steps as f64) * (t0 - a) / span).ceil() as usize;

    let mut columns: Vec<(Option<Trajectory>, Option<Trajectory>)> = Vec::with_capacity(n);
    for col in 0..n {
        let ivp = Ivp::new(qde.clone(), t0, QVec::basis(n, col))?;
        let fwd = if fwd_steps > 0 && b > t0 {
            Some(solve_ivp(&ivp, b, fwd_steps)?)
        } else {
            None
        };
        let bwd = if bwd_steps > 0 && a < t0 {
            Some(solve_ivp(&ivp, a, bwd_steps)?)
        } else {
            None
        };
        columns.push((fwd, bwd));
    }

    let columns = Arc::new(columns);
    let eval = {
        let columns = Arc::clone(&columns);
        let n = qde.dim();
        move |t: f64| {
            let cols: Vec<QVec> = columns
                .iter()
                .map(|(fwd, bwd)| {
                    match (fwd, bwd) {
                        (Some(f), _) if t >= t0 => f.eval(t),
                        (_, Some(bk)) => bk.eval(t),
                        (Some(f), None) => f.eval(t),
                        (None, None) => QVec::basis(n, 0), // unreachable: steps >= 1
                    }
                })
                .collect();
            QMat::from_columns(&cols).expect("columns share the system dimension")
        }
    };
    FundamentalMatrix::new(n, t0, FundamentalMethod::NumericColumns, Arc::new(eval))
}

/// `M(t) = exp(A t)` for a constant system, through the adjoint backend.
pub fn fundamental_constant(a: &QMat) -> Result<FundamentalMatrix> {
    if !a.is_square() {
        return Err(Error::NonSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let a = a.clone();
    let eval = move |t: f64| {
        crate::matrix::expm(&a, t).expect("adjoint exponential of a validated square matrix")
    };
    FundamentalMatrix::new(n, 0.0, FundamentalMethod::ExpmAdjoint, Arc::new(eval))
}

/// Splits `A = D + N` into its diagonal and off-diagonal parts when the
/// closed form `exp(At) = exp(Dt) exp(Nt)` is valid: `N` nilpotent and
/// `DN = ND`. Returns `None` when either condition fails, signalling the
/// caller to fall back to the adjoint exponential.
pub fn commuting_split(a: &QMat) -> Option<(QMat, QMat)> {
    if !a.is_square() {
        return None;
    }
    let n = a.rows();
    let d = QMat::from_fn(n, n, |i, j| if i == j { a[(i, j)] } else { Quat::ZERO });
    let nil = a.sub(&d).expect("same shape");

    // N^n = 0, verified by repeated multiplication.
    let mut power = nil.clone();
    for _ in 1..n {
        power = power.matmul(&nil).expect("square");
    }
    let pow_tol = tol::SPLIT_COMMUTE_TOL * nil.norm().powi(n as i32).max(1.0);
    if power.norm() > pow_tol {
        return None;
    }

    let dn = d.matmul(&nil).expect("square");
    let nd = nil.matmul(&d).expect("square");
    let comm_tol = tol::SPLIT_COMMUTE_TOL * (d.norm() * nil.norm()).max(1.0);
    if dn.sub(&nd).expect("same shape").norm() > comm_tol {
        return None;
    }
    Some((d, nil))
}

/// Fundamental matrix through the commuting split, when it applies:
/// `M(t) = diag(exp(d_i t)) * sum_{m<n} N^m t^m / m!`.
pub fn fundamental_split(a: &QMat) -> Result<Option<FundamentalMatrix>> {
    let Some((d, nil)) = commuting_split(a) else {
        return Ok(None);
    };
    let n = a.rows();
    let diag: Vec<Quat> = (0..n).map(|i| d[(i, i)]).collect();

    // Precompute the nilpotent powers; t^m / m! is applied at eval time.
    let mut powers: Vec<QMat> = vec![QMat::identity(n)];
    for m in 1..n {
        let next = powers[m - 1].matmul(&nil)?;
        powers.push(next);
    }

    let eval = move |t: f64| {
        let dexp = QMat::diag(&diag.iter().map(|l| (*l * t).exp()).collect::<Vec<_>>());
        let mut poly = QMat::identity(n);
        let mut t_pow = 1.0;
        let mut fact = 1.0;
        for (m, p) in powers.iter().enumerate().skip(1) {
            t_pow *= t;
            fact *= m as f64;
            poly = poly
                .add(&p.scale_real(t_pow / fact))
                .expect("same shape");
        }
        dexp.matmul(&poly).expect("square")
    };
    Ok(Some(FundamentalMatrix::new(
        n,
        0.0,
        FundamentalMethod::CommutingSplit,
        Arc::new(eval),
    )?))
}

/// Closed-form exponential of the `n x n` Jordan block with eigenvalue
/// `lambda`: `diag(e^{lambda t}) U(t)` with `U(t)_{ij} = t^{j-i} / (j-i)!`
/// for `j >= i`.
pub fn jordan_exp(lambda: Quat, n: usize, t: f64) -> QMat {
    let elt = (lambda * t).exp();
    QMat::from_fn(n, n, |i, j| {
        if j < i {
            Quat::ZERO
        } else {
            let p = j - i;
            let mut fact = 1.0;
            for m in 1..=p {
                fact *= m as f64;
            }
            elt * (t.powi(p as i32) / fact)
        }
    })
}

/// Fundamental matrix of the Jordan-block system `x' = J(lambda) x`.
pub fn fundamental_jordan(lambda: Quat, n: usize) -> Result<FundamentalMatrix> {
    let eval = move |t: f64| jordan_exp(lambda, n, t);
    FundamentalMatrix::new(n, 0.0, FundamentalMethod::JordanClosedForm, Arc::new(eval))
}

/// Preferred closed-form order for constant systems: commuting split, then
/// right eigenpairs, then the adjoint exponential (always applicable).
pub fn fundamental_auto(a: &QMat) -> Result<FundamentalMatrix> {
    if let Some(fm) = fundamental_split(a)? {
        return Ok(fm);
    }
    match fundamental_eigen(a) {
        Ok(fm) => Ok(fm),
        Err(Error::Defective(_)) | Err(Error::ResidualTooLarge { .. }) => fundamental_constant(a),
        Err(e) => Err(e),
    }
}

/// Time-varying diagonal closed form `M(t) = diag(exp(int_{t0}^t a_i))`.
///
/// Valid only under the commutation hypothesis `a_i(t)` commutes with its
/// running integral; this is verified numerically at 16 Chebyshev sample
/// times and violations surface as `ConditionViolated` — the caller must
/// fall back to [`solve_ivp`].
pub fn diagonal_timevarying(
    coeffs: &[ScalarFn],
    t0: f64,
    interval: (f64, f64),
) -> Result<FundamentalMatrix> {
    if coeffs.is_empty() {
        return Err(Error::DimensionMismatch("no diagonal coefficients".into()));
    }
    let n = coeffs.len();
    for (idx, a_i) in coeffs.iter().enumerate() {
        for t in tol::chebyshev_samples(interval.0, interval.1, tol::SAMPLE_COUNT) {
            let integral = quad::integrate_quat(|s| a_i(s), t0, t, tol::SIMPSON_TOL)?;
            let at = a_i(t);
            let comm = at * integral - integral * at;
            let scale = (at.norm() * integral.norm()).max(1.0);
            if comm.norm() > tol::CONDITION1_TOL * scale {
                return Err(Error::ConditionViolated {
                    index: idx,
                    t,
                    commutator: comm.norm(),
                });
            }
        }
    }

    let coeffs: Vec<ScalarFn> = coeffs.to_vec();
    let eval = move |t: f64| {
        let diag: Vec<Quat> = coeffs
            .iter()
            .map(|a_i| {
                quad::integrate_quat(|s| a_i(s), t0, t, tol::SIMPSON_TOL)
                    .expect("quadrature verified during construction")
                    .exp()
            })
            .collect();
        QMat::diag(&diag)
    };
    FundamentalMatrix::new(n, t0, FundamentalMethod::CommutingSplit, Arc::new(eval))
}

/// Reduces the scalar second-order equation `x'' + q1(t) x' + q2(t) x = 0`
/// to the first-order pair `x1' = x2`, `x2' = -q2(t) x1 - q1(t) x2`.
pub fn second_order_reduce(
    q1: ScalarFn,
    q2: ScalarFn,
    interval: (f64, f64),
) -> Result<LinearQde> {
    let coeff = move |t: f64| {
        QMat::from_rows(vec![
            vec![Quat::ZERO, Quat::ONE],
            vec![-q2(t), -q1(t)],
        ])
        .expect("2x2 construction")
    };
    LinearQde::new(2, interval, "second-order reduction", Arc::new(coeff))
}

/// Largest sampled residual `||x'(t) - A(t) x(t)||` of a trajectory
/// evaluator against the system, by central differences.
pub fn trajectory_residual(
    qde: &LinearQde,
    x: &dyn Fn(f64) -> QVec,
    ts: &[f64],
) -> Result<f64> {
    let h = tol::CENTRAL_DIFF_H;
    let mut worst = 0.0f64;
    for &t in ts {
        let deriv = x(t + h).sub(&x(t - h)).scale_real(1.0 / (2.0 * h));
        let ax = qde.coeff_at(t).matvec(&x(t))?;
        worst = worst.max(deriv.sub(&ax).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: Quat = Quat::I;
    const J: Quat = Quat::J;
    const K: Quat = Quat::K;

    fn mat2(a: Quat, b: Quat, c: Quat, d: Quat) -> QMat {
        QMat::from_rows(vec![vec![a, b], vec![c, d]]).unwrap()
    }

    #[test]
    fn zero_system_is_constant() {
        let qde = LinearQde::constant(QMat::zeros(2, 2), (0.0, 1.0), "zero").unwrap();
        let x0 = QVec::new(vec![Quat::new(1.0, 1.0, 0.0, 0.0), J]);
        let traj = solve_ivp(&Ivp::new(qde, 0.0, x0.clone()).unwrap(), 1.0, 50).unwrap();
        assert!(traj.last().dist(&x0) < 1e-15);
        assert!(traj.eval(0.37).dist(&x0) < 1e-15);
    }

    #[test]
    fn one_dim_rotation_hits_minus_one() {
        // x' = i x, x(0) = 1, x(pi) = -1
        let qde = LinearQde::constant(
            QMat::from_rows(vec![vec![I]]).unwrap(),
            (0.0, 4.0),
            "x' = ix",
        )
        .unwrap();
        let ivp = Ivp::new(qde, 0.0, QVec::new(vec![Quat::ONE])).unwrap();
        let traj = solve_ivp(&ivp, std::f64::consts::PI, 10_000).unwrap();
        assert!(traj.last()[0].dist(&(-Quat::ONE)) < 1e-8);
    }

    #[test]
    fn interpolant_reproduces_nodes_and_is_accurate() {
        let qde = LinearQde::constant(
            QMat::from_rows(vec![vec![I]]).unwrap(),
            (0.0, 1.0),
            "x' = ix",
        )
        .unwrap();
        let ivp = Ivp::new(qde, 0.0, QVec::new(vec![Quat::ONE])).unwrap();
        let traj = solve_ivp(&ivp, 1.0, 100).unwrap();
        let (ts, xs) = traj.nodes();
        for (idx, &t) in ts.iter().enumerate() {
            assert_eq!(traj.eval(t), xs[idx]);
        }
        // between nodes the Hermite error is far below the RK4 budget
        let t = 0.4321;
        let exact = (I * t).exp();
        assert!(traj.eval(t)[0].dist(&exact) < 1e-9);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let qde = LinearQde::constant(
            QMat::from_rows(vec![vec![I]]).unwrap(),
            (0.0, 4.0),
            "x' = ix",
        )
        .unwrap();
        let ivp = Ivp::new(qde, 0.0, QVec::new(vec![Quat::ONE])).unwrap();
        let t_end = std::f64::consts::PI;
        let exact = -Quat::ONE;
        let err = |steps: usize| {
            let traj = solve_ivp(&ivp, t_end, steps).unwrap();
            traj.last()[0].dist(&exact)
        };
        let mut prev = err(25);
        for steps in [50, 100, 200] {
            let cur = err(steps);
            let ratio = prev / cur;
            assert!(
                (12.8..=19.2).contains(&ratio),
                "halving ratio {} out of the 16 +- 20% band",
                ratio
            );
            prev = cur;
        }
    }

    #[test]
    fn uniqueness_under_step_change() {
        let a = mat2(I, Quat::ONE, Quat::ZERO, J);
        let qde = LinearQde::constant(a, (0.0, 1.0), "upper").unwrap();
        let x0 = QVec::new(vec![Quat::ONE, K]);
        let t1 = solve_ivp(&Ivp::new(qde.clone(), 0.0, x0.clone()).unwrap(), 1.0, 4000).unwrap();
        let t2 = solve_ivp(&Ivp::new(qde, 0.0, x0).unwrap(), 1.0, 8001).unwrap();
        assert!(t1.last().dist(t2.last()) < 1e-10);
    }

    #[test]
    fn numeric_fundamental_of_zero_system() {
        let qde = LinearQde::constant(QMat::zeros(2, 2), (0.0, 1.0), "zero").unwrap();
        let fm = fundamental_numeric(&qde, 0.0, 100).unwrap();
        assert_eq!(fm.method(), FundamentalMethod::NumericColumns);
        assert_eq!(fm.certificate(), 1.0);
        assert!(fm.eval(0.7).dist_max(&QMat::identity(2)) < 1e-14);
    }

    #[test]
    fn numeric_fundamental_spans_backward() {
        let a = QMat::diag(&[I, J]);
        let qde = LinearQde::constant(a, (-1.0, 1.0), "diag").unwrap();
        let fm = fundamental_numeric(&qde, 0.0, 4000).unwrap();
        let t = -0.6;
        let expect = QMat::diag(&[(I * t).exp(), (J * t).exp()]);
        assert!(fm.eval(t).dist_max(&expect) < 1e-9);
    }

    #[test]
    fn constant_fundamental_matches_ivp() {
        let a = mat2(K, Quat::ONE, Quat::ZERO, K);
        let fm = fundamental_constant(&a).unwrap();
        assert_eq!(fm.method(), FundamentalMethod::ExpmAdjoint);
        let qde = LinearQde::constant(a, (0.0, 2.0), "jordan k").unwrap();
        let x0 = QVec::new(vec![Quat::ONE, Quat::ONE]);
        let traj = solve_ivp(&Ivp::new(qde, 0.0, x0.clone()).unwrap(), 1.0, 10_000).unwrap();
        let closed = fm.propagate(&x0, 1.0).unwrap();
        assert!(closed.dist(traj.last()) < 1e-8);
    }

    #[test]
    fn split_accepts_jordan_and_rejects_noncommuting() {
        // [[k,1],[0,k]] = diag(k,k) + strictly-upper N with DN = ND
        let a = mat2(K, Quat::ONE, Quat::ZERO, K);
        let (d, n) = commuting_split(&a).unwrap();
        assert_eq!(d, QMat::diag(&[K, K]));
        assert_eq!(n[(0, 1)], Quat::ONE);
        let fm = fundamental_split(&a).unwrap().unwrap();
        let t = 1.3;
        let ekt = (K * t).exp();
        let expect = mat2(ekt, ekt * t, Quat::ZERO, ekt);
        assert!(fm.eval(t).dist_max(&expect) < 1e-13);

        // [[i,k],[0,j]]: divisions do not commute
        assert!(commuting_split(&mat2(I, K, Quat::ZERO, J)).is_none());
        // diagonal matrices split trivially (N = 0)
        let diag = QMat::diag(&[I, J]);
        let (_, n0) = commuting_split(&diag).unwrap();
        assert_eq!(n0.norm(), 0.0);
    }

    #[test]
    fn jordan_exp_matches_series() {
        assert!(jordan_exp(Quat::K, 1, 0.9)[(0, 0)].dist(&(K * 0.9).exp()) < 1e-15);
        // n = 2, lambda = k reproduces the closed form above
        let m = jordan_exp(K, 2, 1.0);
        let ek = K.exp();
        assert!(m[(0, 0)].dist(&ek) < 1e-15);
        assert!(m[(0, 1)].dist(&ek) < 1e-15);
        // n = 3, lambda = i, t = 0.5 vs the series oracle
        let block = QMat::from_rows(vec![
            vec![I, Quat::ONE, Quat::ZERO],
            vec![Quat::ZERO, I, Quat::ONE],
            vec![Quat::ZERO, Quat::ZERO, I],
        ])
        .unwrap();
        let series = crate::matrix::expm_series(&block, 0.5).unwrap();
        assert!(jordan_exp(I, 3, 0.5).dist_max(&series) < 1e-10);
    }

    #[test]
    fn diagonal_timevarying_closed_forms() {
        // constant coefficient: always valid
        let fm = diagonal_timevarying(
            &[Arc::new(|_| Quat::I) as ScalarFn],
            0.0,
            (0.0, 2.0),
        )
        .unwrap();
        let t = 1.1;
        assert!(fm.eval(t)[(0, 0)].dist(&(I * t).exp()) < 1e-10);

        // a(t) = i cos t -> exp(i sin t); same axis commutes
        let fm = diagonal_timevarying(
            &[Arc::new(|t: f64| Quat::I * t.cos()) as ScalarFn],
            0.0,
            (0.0, 2.0),
        )
        .unwrap();
        let t = 1.4;
        assert!(fm.eval(t)[(0, 0)].dist(&(I * t.sin()).exp()) < 1e-9);

        // cross-check against the integrator
        let qde = LinearQde::new(
            1,
            (0.0, 2.0),
            "i cos t",
            Arc::new(|t: f64| QMat::diag(&[Quat::I * t.cos()])),
        )
        .unwrap();
        let traj = solve_ivp(
            &Ivp::new(qde, 0.0, QVec::new(vec![Quat::ONE])).unwrap(),
            1.4,
            20_000,
        )
        .unwrap();
        assert!(traj.last()[0].dist(&fm.eval(1.4)[(0, 0)]) < 1e-8);

        // a(t) = i + t j violates the commutation hypothesis
        let bad = diagonal_timevarying(
            &[Arc::new(|t: f64| Quat::I + Quat::J * t) as ScalarFn],
            0.0,
            (0.0, 2.0),
        );
        assert!(matches!(bad, Err(Error::ConditionViolated { .. })));
    }

    #[test]
    fn second_order_reduction_behaviour() {
        // trivial: x'' = 0 -> x1 linear in t
        let zero = second_order_reduce(
            Arc::new(|_| Quat::ZERO),
            Arc::new(|_| Quat::ZERO),
            (0.0, 2.0),
        )
        .unwrap();
        let traj = solve_ivp(
            &Ivp::new(zero, 0.0, QVec::new(vec![Quat::ZERO, Quat::ONE])).unwrap(),
            2.0,
            200,
        )
        .unwrap();
        assert!(traj.last()[0].dist(&Quat::real(2.0)) < 1e-12);

        // harmonic oscillator: x'' + x = 0, x(0) = 1, x'(0) = 0 -> cos t
        let harmonic = second_order_reduce(
            Arc::new(|_| Quat::ZERO),
            Arc::new(|_| Quat::ONE),
            (0.0, 7.0),
        )
        .unwrap();
        let traj = solve_ivp(
            &Ivp::new(harmonic.clone(), 0.0, QVec::new(vec![Quat::ONE, Quat::ZERO])).unwrap(),
            1.0,
            10_000,
        )
        .unwrap();
        assert!(traj.last()[0].dist(&Quat::real(1.0f64.cos())) < 1e-8);

        // residual oracle: x'' + q1 x' + q2 x = 0 for a quaternion case
        let q1 = Arc::new(|_| Quat::I * 0.5) as ScalarFn;
        let q2 = Arc::new(|t: f64| Quat::J * t.cos()) as ScalarFn;
        let sys = second_order_reduce(q1.clone(), q2.clone(), (0.0, 1.5)).unwrap();
        let traj = solve_ivp(
            &Ivp::new(sys, 0.0, QVec::new(vec![Quat::ONE, Quat::K])).unwrap(),
            1.5,
            15_000,
        )
        .unwrap();
        let h = 1e-4;
        let mut worst = 0.0f64;
        for &t in &[0.3, 0.7, 1.2] {
            let x = |s: f64| traj.eval(s)[0];
            let second = (x(t + h) + x(t - h) - x(t) * 2.0) * (1.0 / (h * h));
            let first = (x(t + h) - x(t - h)) * (1.0 / (2.0 * h));
            let res = second + q1(t) * first + q2(t) * x(t);
            worst = worst.max(res.norm());
        }
        assert!(worst < 1e-6, "second-order residual {}", worst);
    }

    #[test]
    fn fundamental_residual_and_certificate() {
        let a = mat2(I, Quat::ONE, Quat::ZERO, J);
        let qde = LinearQde::constant(a.clone(), (0.0, 2.0), "upper ij").unwrap();
        let numeric = fundamental_numeric(&qde, 0.0, 20_000).unwrap();
        assert!(numeric.residual_max(&qde, tol::SAMPLE_COUNT) < tol::FUNDAMENTAL_RESIDUAL);
        let constant = fundamental_constant(&a).unwrap();
        assert!(constant.residual_max(&qde, tol::SAMPLE_COUNT) < tol::FUNDAMENTAL_RESIDUAL);
        // normalized evaluations agree across methods
        for t in [0.25, 1.0, 1.75] {
            assert!(numeric.normalized(t).dist_max(&constant.normalized(t)) < 1e-7);
        }
        // ddet stays away from zero along the interval
        for t in tol::chebyshev_samples(0.0, 2.0, 8) {
            assert!(ddet(&numeric.eval(t)).unwrap().abs() > 1e-3);
        }
    }

    #[test]
    fn continuity_spot_check_flags_smooth_systems() {
        let qde = LinearQde::new(
            1,
            (0.0, 1.0),
            "smooth",
            Arc::new(|t: f64| QMat::diag(&[Quat::I * t.sin()])),
        )
        .unwrap();
        assert!(qde.continuity_spot_check() < 1e-6);
    }
}
