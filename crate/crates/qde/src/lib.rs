//! Quaternion linear algebra and linear quaternion differential equations (QDEs).
//!
//! Linear systems `x' = A(t) x` with quaternion-valued coefficients behave
//! differently from their real or complex counterparts: the solution set is a
//! *right* free module over the quaternions (right scalar multiples of
//! solutions are solutions, left multiples generally are not), the Wronskian
//! must be defined through the double determinant `ddet M = rdet(M M^+)`, and
//! eigenvalue problems split into left and right variants. This crate
//! implements that solution theory end to end:
//!
//! * [`quat`] — scalar quaternion arithmetic, the exponential in Euler form,
//!   and a text grammar for quaternion literals.
//! * [`matrix`] — dense quaternion matrices/vectors with distinct left/right
//!   scalar actions, Cayley 2x2 determinants, the double determinant, the
//!   complex-adjoint embedding, inverses, rank, and the matrix exponential.
//! * [`analysis`] — right/left dependence tests with certificates, the QDE
//!   Wronskian, the quaternionic Liouville formula, and module-structure
//!   residual checks.
//! * [`engine`] — a fixed-step RK4 integrator over quaternion vectors (the
//!   cross-checking oracle), closed-form fundamental matrices via commuting
//!   splits, Jordan blocks and right eigenpairs, time-varying diagonal
//!   systems, and the second-order reduction.
//! * [`apps`] — attitude-kinematics and Frenet-frame fixture models.
//! * [`io`] — matrix/scenario file formats and deterministic CSV output.
//!
//! All values are immutable and every operation is a pure function; the whole
//! API is safe to call concurrently.

pub mod analysis;
pub mod apps;
mod clinalg;
pub mod engine;
mod error;
pub mod io;
pub mod matrix;
pub mod quad;
pub mod quat;
pub mod tol;

pub use error::{Error, Result};
pub use matrix::{ComplexAdjoint, QMat, QVec};
pub use quat::Quat;
