//! Numeric thresholds used across the crate, collected in one place so every
//! bound is named and auditable rather than a scattered magic number.

/// Below this imaginary-part norm, `exp` switches to the `sin(r)/r -> 1`
/// limit; the switch introduces an error of order `EPS_PURE^2`.
pub const EPS_PURE: f64 = 1e-12;

/// Stopping rule for truncated exponential series: stop once a term's norm
/// drops below this.
pub const SERIES_TERM_TOL: f64 = 1e-18;

/// Hard cap on series terms.
pub const SERIES_MAX_TERMS: usize = 200;

/// If the cap is hit while the last term is still above this, the series is
/// reported as non-convergent.
pub const SERIES_FAIL_TOL: f64 = 1e-12;

/// Base factor of the singularity threshold on the double determinant; the
/// full threshold scales with `max(1, ||M||^(2n))` because `ddet` has
/// polynomial degree `2n` in the entries.
pub const SINGULAR_BASE: f64 = 1e-10;

/// Allowed deviation from the adjoint block symmetry when mapping a complex
/// matrix back to quaternions (relative to the largest entry).
pub const ADJOINT_STRUCTURE_TOL: f64 = 1e-10;

/// Adaptive Simpson quadrature tolerance.
pub const SIMPSON_TOL: f64 = 1e-10;

/// Maximum interval-halving depth for adaptive Simpson.
pub const SIMPSON_MAX_DEPTH: usize = 30;

/// Residual bound `||A v - v lambda||` accepted for a right eigenpair.
pub const EIGENPAIR_RESIDUAL: f64 = 1e-8;

/// Residual bound for dependence certificates.
pub const CERTIFICATE_RESIDUAL: f64 = 1e-8;

/// Residual bound `||M'(t) - A(t) M(t)||` for any fundamental matrix,
/// sampled over the interval.
pub const FUNDAMENTAL_RESIDUAL: f64 = 1e-6;

/// Tighter residual bound applied to the eigen-method fundamental matrix.
pub const EIGEN_FUNDAMENTAL_RESIDUAL: f64 = 1e-7;

/// Step for central-difference derivatives in residual checks; truncation is
/// O(h^2) ~ 1e-12 against 1e-6 acceptance thresholds.
pub const CENTRAL_DIFF_H: f64 = 1e-6;

/// Residual bound a trajectory must meet before module-structure checks.
pub const SOLUTION_PRECONDITION: f64 = 1e-8;

/// Commutator tolerance for the time-varying diagonal closed form
/// (`a(t)` must commute with its running integral).
pub const CONDITION1_TOL: f64 = 1e-9;

/// Commutator tolerance for accepting a diagonal + nilpotent split.
pub const SPLIT_COMMUTE_TOL: f64 = 1e-12;

/// Number of sample times used by sampled invariant checks (Chebyshev
/// spacing inside the interval).
pub const SAMPLE_COUNT: usize = 16;

/// Default integrator resolution: steps per unit time.
pub const DEFAULT_STEPS_PER_UNIT: usize = 10_000;

/// Singularity threshold for an `n x n` quaternion matrix with entrywise-sum
/// norm `norm`: `SINGULAR_BASE * max(1, norm^(2n))`.
pub fn singular_threshold(norm: f64, n: usize) -> f64 {
    SINGULAR_BASE * norm.powi(2 * n as i32).max(1.0)
}

/// Chebyshev-spaced interior sample points of `[a, b]`.
pub fn chebyshev_samples(a: f64, b: f64, count: usize) -> Vec<f64> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (0..count)
        .map(|k| {
            let angle = std::f64::consts::PI * (2 * k + 1) as f64 / (2 * count) as f64;
            mid + half * angle.cos()
        })
        .collect()
}
