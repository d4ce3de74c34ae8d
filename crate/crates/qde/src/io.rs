//! Text, JSON and CSV interchange formats.
//!
//! Matrix text format: one row per line, entries comma-separated, every
//! entry a quaternion literal (`"i,1"` / `"0,j"`). The inline variant used
//! by command lines separates rows with semicolons instead of newlines.
//! JSON mirror: `{"rows": n, "cols": m, "entries": [[w,x,y,z], ...]}` in
//! row-major order. All numeric output uses 17 significant digits so equal
//! inputs produce byte-identical files.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::engine::{CoeffFn, LinearQde};
use crate::error::{Error, Result};
use crate::matrix::{QMat, QVec};
use crate::quat::{format_quat, parse_quat, Quat};

/// Fixed-width float formatting: 17 significant digits, enough to
/// round-trip any f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{:.16e}", v)
}

/// Quaternion literal with fixed 17-significant-digit coefficients
/// (deterministic CLI output; [`format_quat`] stays the shortest form).
pub fn format_quat_fixed(q: &Quat) -> String {
    let mut out = String::new();
    for (value, unit) in [(q.w, ""), (q.x, "i"), (q.y, "j"), (q.z, "k")] {
        if value == 0.0 {
            continue;
        }
        if value < 0.0 {
            out.push('-');
        } else if !out.is_empty() {
            out.push('+');
        }
        out.push_str(&fmt_f64(value.abs()));
        out.push_str(unit);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Parses the matrix text format (newline rows).
pub fn parse_matrix_text(text: &str) -> Result<QMat> {
    parse_matrix_rows(text.lines())
}

/// Parses the inline matrix format (semicolon rows), e.g. `"k,1;0,k"`.
pub fn parse_matrix_inline(text: &str) -> Result<QMat> {
    parse_matrix_rows(text.split(';'))
}

fn parse_matrix_rows<'a>(rows: impl Iterator<Item = &'a str>) -> Result<QMat> {
    let mut parsed: Vec<Vec<Quat>> = Vec::new();
    for row in rows {
        let row = row.trim();
        if row.is_empty() {
            continue;
        }
        let mut entries = Vec::new();
        for cell in row.split(',') {
            entries.push(parse_quat(cell)?);
        }
        parsed.push(entries);
    }
    QMat::from_rows(parsed)
}

/// Comma-separated quaternion literals, e.g. `"1,i"`.
pub fn parse_vector_inline(text: &str) -> Result<QVec> {
    let mut entries = Vec::new();
    for cell in text.split(',') {
        entries.push(parse_quat(cell)?);
    }
    if entries.is_empty() {
        return Err(Error::Parse {
            offset: 0,
            msg: "empty vector".into(),
        });
    }
    Ok(QVec::new(entries))
}

/// Matrix in the text format with shortest-round-trip literals.
pub fn format_matrix_text(m: &QMat) -> String {
    format_matrix_with(m, format_quat)
}

/// Matrix in the text format with fixed 17-digit literals.
pub fn format_matrix_fixed(m: &QMat) -> String {
    format_matrix_with(m, format_quat_fixed)
}

fn format_matrix_with(m: &QMat, f: impl Fn(&Quat) -> String) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| f(&m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// JSON mirror of a quaternion matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `[w, x, y, z]` quadruples.
    pub entries: Vec<[f64; 4]>,
}

impl MatrixJson {
    pub fn from_mat(m: &QMat) -> Self {
        let mut entries = Vec::with_capacity(m.rows() * m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                entries.push(m[(i, j)].components());
            }
        }
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            entries,
        }
    }

    pub fn to_mat(&self) -> Result<QMat> {
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                self.entries.len(),
                self.rows,
                self.cols
            )));
        }
        let cols = self.cols;
        Ok(QMat::from_fn(self.rows, self.cols, |i, j| {
            Quat::from_components(self.entries[i * cols + j])
        }))
    }
}

/// Trajectory CSV: header `t,x1_w,x1_x,x1_y,x1_z,...`, one row per sample.
pub fn trajectory_csv(ts: &[f64], xs: &[QVec]) -> String {
    let dim = xs.first().map_or(0, QVec::dim);
    let mut out = String::from("t");
    for idx in 1..=dim {
        for comp in ["w", "x", "y", "z"] {
            out.push_str(&format!(",x{}_{}", idx, comp));
        }
    }
    out.push('\n');
    for (t, x) in ts.iter().zip(xs) {
        out.push_str(&fmt_f64(*t));
        for e in x.entries() {
            for v in e.components() {
                out.push(',');
                out.push_str(&fmt_f64(v));
            }
        }
        out.push('\n');
    }
    out
}

/// Solver selection for scenario files and the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    #[default]
    Auto,
    Numeric,
    Expm,
    Split,
    Eigen,
}

impl std::str::FromStr for MethodChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(MethodChoice::Auto),
            "numeric" => Ok(MethodChoice::Numeric),
            "expm" => Ok(MethodChoice::Expm),
            "split" => Ok(MethodChoice::Split),
            "eigen" => Ok(MethodChoice::Eigen),
            other => Err(Error::Parse {
                offset: 0,
                msg: format!(
                    "unknown method {:?} (expected auto|numeric|expm|split|eigen)",
                    other
                ),
            }),
        }
    }
}

/// Scenario file: a system, an initial value and a time range.
///
/// ```json
/// {"dim": 2, "A": [["i", "1"], ["0", "j"]], "t0": 0.0,
///  "x0": ["1", "0"], "t_end": 2.0, "steps": 10000, "method": "auto"}
/// ```
///
/// Exactly one of `A` (constant matrix of quaternion literals) or `A_t`
/// (named built-in time-varying family, see [`builtin_family`]) must be
/// present.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub dim: usize,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<String>>>,
    #[serde(rename = "A_t", default, skip_serializing_if = "Option::is_none")]
    pub a_t: Option<String>,
    pub t0: f64,
    pub x0: Vec<String>,
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn method_choice(&self) -> Result<MethodChoice> {
        match &self.method {
            None => Ok(MethodChoice::Auto),
            Some(s) => s.parse(),
        }
    }

    pub fn initial_value(&self) -> Result<QVec> {
        let mut entries = Vec::with_capacity(self.x0.len());
        for lit in &self.x0 {
            entries.push(parse_quat(lit)?);
        }
        if entries.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "x0 has {} entries, dim is {}",
                entries.len(),
                self.dim
            )));
        }
        Ok(QVec::new(entries))
    }

    /// Constant coefficient matrix, when `A` is given.
    pub fn constant_matrix(&self) -> Result<Option<QMat>> {
        let Some(rows) = &self.a else {
            return Ok(None);
        };
        let mut parsed = Vec::with_capacity(rows.len());
        for row in rows {
            let mut r = Vec::with_capacity(row.len());
            for cell in row {
                r.push(parse_quat(cell)?);
            }
            parsed.push(r);
        }
        let m = QMat::from_rows(parsed)?;
        if (m.rows(), m.cols()) != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, dim is {}",
                m.rows(),
                m.cols(),
                self.dim
            )));
        }
        Ok(Some(m))
    }

    /// Builds the linear system over `[min(t0, t_end), max(t0, t_end)]`.
    pub fn system(&self) -> Result<LinearQde> {
        let lo = self.t0.min(self.t_end);
        let hi = self.t0.max(self.t_end);
        let interval = if lo < hi { (lo, hi) } else { (lo, lo + 1.0) };
        if let Some(m) = self.constant_matrix()? {
            return LinearQde::constant(m, interval, "scenario");
        }
        let Some(name) = &self.a_t else {
            return Err(Error::Parse {
                offset: 0,
                msg: "scenario needs either \"A\" or \"A_t\"".into(),
            });
        };
        let (dim, coeff) = builtin_family(name).ok_or_else(|| Error::Parse {
            offset: 0,
            msg: format!("unknown time-varying family {:?}", name),
        })?;
        if dim != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "family {:?} has dim {}, scenario says {}",
                name, dim, self.dim
            )));
        }
        LinearQde::new(dim, interval, format!("family {}", name), coeff)
    }
}

/// Named built-in time-varying coefficient families:
///
/// * `"icos"` — 1-dim `a(t) = i cos t` (commutes with its integral; the
///   diagonal closed form applies).
/// * `"i-plus-tj"` — 1-dim `a(t) = i + t j` (violates the commutation
///   hypothesis; numeric integration only).
/// * `"rot2"` — 2-dim `[[i cos t, 1], [0, j sin t]]`, a smooth dense system.
pub fn builtin_family(name: &str) -> Option<(usize, CoeffFn)> {
    match name {
        "icos" => Some((
            1,
            Arc::new(|t: f64| QMat::diag(&[Quat::I * t.cos()])) as CoeffFn,
        )),
        "i-plus-tj" => Some((
            1,
            Arc::new(|t: f64| QMat::diag(&[Quat::I + Quat::J * t])) as CoeffFn,
        )),
        "rot2" => Some((
            2,
            Arc::new(|t: f64| {
                QMat::from_rows(vec![
                    vec![Quat::I * t.cos(), Quat::ONE],
                    vec![Quat::ZERO, Quat::J * t.sin()],
                ])
                .expect("2x2 construction")
            }) as CoeffFn,
        )),
        _ => None,
    }
}
