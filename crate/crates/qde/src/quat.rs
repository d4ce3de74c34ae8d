//! Scalar quaternion arithmetic.
//!
//! A quaternion `q = w + x i + y j + z k` multiplies by the Hamilton rules
//! `i^2 = j^2 = k^2 = ijk = -1`, `ij = -ji = k`, `jk = -kj = i`,
//! `ki = -ik = j`. Multiplication is associative but not commutative, which
//! is the source of everything interesting downstream. Values are immutable
//! (`Copy`) and every operation returns a fresh value.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::tol;

/// A quaternion `w + x i + y j + z k` over double-precision reals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quat {
    /// Scalar part.
    pub w: f64,
    /// Coefficient of `i`.
    pub x: f64,
    /// Coefficient of `j`.
    pub y: f64,
    /// Coefficient of `k`.
    pub z: f64,
}

impl Quat {
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quat { w, x, y, z }
    }

    pub const ZERO: Quat = Quat::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quat = Quat::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quat = Quat::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quat = Quat::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quat = Quat::new(0.0, 0.0, 0.0, 1.0);

    /// Embeds a real number.
    pub const fn real(w: f64) -> Self {
        Quat::new(w, 0.0, 0.0, 0.0)
    }

    /// A pure quaternion `x i + y j + z k`.
    pub const fn pure(x: f64, y: f64, z: f64) -> Self {
        Quat::new(0.0, x, y, z)
    }

    /// Scalar part `Re q`.
    pub fn re(&self) -> f64 {
        self.w
    }

    /// Pure part `Im q` as a quaternion with zero scalar part.
    pub fn im(&self) -> Quat {
        Quat::pure(self.x, self.y, self.z)
    }

    /// Conjugate `w - x i - y j - z k`.
    pub fn conj(&self) -> Quat {
        Quat::new(self.w, -self.x, -self.y, -self.z)
    }

    /// Squared modulus `w^2 + x^2 + y^2 + z^2`.
    pub fn norm_sq(&self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Modulus `|q|`.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Multiplicative inverse `conj(q) / |q|^2`.
    ///
    /// The zero quaternion has no inverse and yields a `DomainError`.
    pub fn inv(&self) -> Result<Quat> {
        let n2 = self.norm_sq();
        if n2 == 0.0 {
            return Err(Error::Domain("zero quaternion has no inverse".into()));
        }
        Ok(self.conj() * (1.0 / n2))
    }

    /// Exponential in Euler form:
    /// `exp q = exp(Re q) * (cos|Im q| + (Im q / |Im q|) sin|Im q|)`.
    ///
    /// For `|Im q|` below [`tol::EPS_PURE`] the factor `sin(r)/r` is replaced
    /// by its limit 1 to avoid 0/0. Satisfies `|exp q| = exp(Re q)`.
    pub fn exp(&self) -> Quat {
        let r = self.im().norm();
        let scale = self.w.exp();
        let sinc = if r < tol::EPS_PURE { 1.0 } else { r.sin() / r };
        Quat::new(
            scale * r.cos(),
            scale * sinc * self.x,
            scale * sinc * self.y,
            scale * sinc * self.z,
        )
    }

    /// True when every component is finite.
    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Distance `|p - q|`, handy in tests and residual checks.
    pub fn dist(&self, other: &Quat) -> f64 {
        (*self - *other).norm()
    }

    /// Components as `[w, x, y, z]`.
    pub fn components(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_components(c: [f64; 4]) -> Quat {
        Quat::new(c[0], c[1], c[2], c[3])
    }
}

impl Add for Quat {
    type Output = Quat;
    fn add(self, rhs: Quat) -> Quat {
        Quat::new(
            self.w + rhs.w,
            self.x + rhs.x,
            self.y + rhs.y,
            self.z + rhs.z,
        )
    }
}

impl Sub for Quat {
    type Output = Quat;
    fn sub(self, rhs: Quat) -> Quat {
        Quat::new(
            self.w - rhs.w,
            self.x - rhs.x,
            self.y - rhs.y,
            self.z - rhs.z,
        )
    }
}

impl Neg for Quat {
    type Output = Quat;
    fn neg(self) -> Quat {
        Quat::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product; bilinear and associative, not commutative.
impl Mul for Quat {
    type Output = Quat;
    fn mul(self, r: Quat) -> Quat {
        Quat::new(
            self.w * r.w - self.x * r.x - self.y * r.y - self.z * r.z,
            self.w * r.x + self.x * r.w + self.y * r.z - self.z * r.y,
            self.w * r.y - self.x * r.z + self.y * r.w + self.z * r.x,
            self.w * r.z + self.x * r.y - self.y * r.x + self.z * r.w,
        )
    }
}

impl Mul<f64> for Quat {
    type Output = Quat;
    fn mul(self, s: f64) -> Quat {
        Quat::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Quat> for f64 {
    type Output = Quat;
    fn mul(self, q: Quat) -> Quat {
        q * self
    }
}

impl Div<f64> for Quat {
    type Output = Quat;
    fn div(self, s: f64) -> Quat {
        Quat::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

impl fmt::Display for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_quat(self))
    }
}

/// Formats `q` in the literal grammar: terms in `w, x, y, z` order, zero
/// terms omitted, `"0"` for the zero quaternion. Coefficients use the
/// shortest representation that parses back to the identical `f64`, so
/// `parse_quat(&format_quat(q)) == q` exactly.
pub fn format_quat(q: &Quat) -> String {
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
        let mag = value.abs();
        if mag == 1.0 && !unit.is_empty() {
            out.push_str(unit);
        } else {
            out.push_str(&format!("{:?}", mag));
            out.push_str(unit);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Parses a quaternion literal.
///
/// The grammar is a sum of signed decimal terms with an optional unit suffix
/// `i`, `j` or `k`; whitespace is ignored, term order is free (`"2k+1"` is
/// accepted), and coefficients may use scientific notation (`"1e-3i"`). A
/// bare unit means coefficient 1 (`"-i"`). Repeating a unit — or the scalar
/// term — is an error rather than a merge, so round-trips stay unambiguous.
/// Errors carry the byte offset into the original input.
pub fn parse_quat(text: &str) -> Result<Quat> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let mut seen = [false; 4]; // w, i, j, k
    let mut comps = [0.0f64; 4];
    let mut any = false;

    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };

    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(Error::Parse {
            offset: pos,
            msg: "empty quaternion literal".into(),
        });
    }

    while pos < bytes.len() {
        let term_start = pos;
        // Sign; mandatory between terms, optional on the first.
        let mut sign = 1.0;
        match bytes[pos] {
            b'+' => pos += 1,
            b'-' => {
                sign = -1.0;
                pos += 1;
            }
            _ if any => {
                return Err(Error::Parse {
                    offset: pos,
                    msg: "expected '+' or '-' between terms".into(),
                });
            }
            _ => {}
        }
        skip_ws(&mut pos);

        // Optional numeric coefficient.
        let num_start = pos;
        let mut saw_digit = false;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
            saw_digit = true;
        }
        if pos < bytes.len() && bytes[pos] == b'.' {
            pos += 1;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
                saw_digit = true;
            }
        }
        if !saw_digit && pos > num_start {
            // A lone '.' is not a number.
            return Err(Error::Parse {
                offset: num_start,
                msg: "expected digits around '.'".into(),
            });
        }
        if saw_digit && pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
            let exp_mark = pos;
            pos += 1;
            if pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
                pos += 1;
            }
            let digits_start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if pos == digits_start {
                return Err(Error::Parse {
                    offset: exp_mark,
                    msg: "malformed exponent".into(),
                });
            }
        }
        let coeff = if pos > num_start {
            let slice = &text[num_start..pos];
            slice.parse::<f64>().map_err(|_| Error::Parse {
                offset: num_start,
                msg: format!("invalid number {:?}", slice),
            })?
        } else {
            1.0
        };
        let had_number = pos > num_start;
        skip_ws(&mut pos);

        // Optional unit suffix.
        let unit = if pos < bytes.len() {
            match bytes[pos] {
                b'i' => Some(1),
                b'j' => Some(2),
                b'k' => Some(3),
                _ => None,
            }
        } else {
            None
        };
        let slot = match unit {
            Some(s) => {
                pos += 1;
                s
            }
            None => {
                if !had_number {
                    return Err(Error::Parse {
                        offset: term_start,
                        msg: "expected a number or unit term".into(),
                    });
                }
                0
            }
        };
        if seen[slot] {
            let what = ["scalar term", "unit i", "unit j", "unit k"][slot];
            return Err(Error::Parse {
                offset: term_start,
                msg: format!("duplicate {}", what),
            });
        }
        seen[slot] = true;
        comps[slot] = sign * coeff;
        any = true;
        skip_ws(&mut pos);
    }

    Ok(Quat::from_components(comps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quat {
        Quat::new(w, x, y, z)
    }

    #[test]
    fn multiplication_table() {
        assert_eq!(Quat::I * Quat::J, Quat::K);
        assert_eq!(Quat::J * Quat::I, -Quat::K);
        assert_eq!(Quat::J * Quat::K, Quat::I);
        assert_eq!(Quat::K * Quat::J, -Quat::I);
        assert_eq!(Quat::K * Quat::I, Quat::J);
        assert_eq!(Quat::I * Quat::K, -Quat::J);
        assert_eq!(Quat::I * Quat::I, -Quat::ONE);
        assert_eq!(Quat::J * Quat::J, -Quat::ONE);
        assert_eq!(Quat::K * Quat::K, -Quat::ONE);
        // ijk = -1
        assert_eq!(Quat::I * Quat::J * Quat::K, -Quat::ONE);
    }

    #[test]
    fn identity_and_hand_expansion() {
        let p = q(0.3, -1.7, 2.0, 0.25);
        assert_eq!(Quat::ONE * p, p);
        assert_eq!(p * Quat::ONE, p);
        // (1+i)(1+j) = 1 + j + i + ij = 1 + i + j + k
        let left = q(1.0, 1.0, 0.0, 0.0) * q(1.0, 0.0, 1.0, 0.0);
        assert_eq!(left, q(1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn conj_norm_inv() {
        assert_eq!(q(1.0, 2.0, 3.0, 4.0).conj(), q(1.0, -2.0, -3.0, -4.0));
        assert_eq!(q(1.0, 1.0, 1.0, 1.0).norm(), 2.0);
        // inv(i) = -i, checked exactly
        assert_eq!(Quat::I.inv().unwrap(), -Quat::I);
        assert!(matches!(Quat::ZERO.inv(), Err(Error::Domain(_))));
        // q * q^-1 = 1
        let p = q(0.5, -1.0, 2.0, -0.3);
        assert!((p * p.inv().unwrap()).dist(&Quat::ONE) < 1e-15);
        assert!((p.inv().unwrap() * p).dist(&Quat::ONE) < 1e-15);
        // conj(q) q = |q|^2
        let cq = p.conj() * p;
        assert!((cq.w - p.norm_sq()).abs() < 1e-15);
        assert!(cq.im().norm() < 1e-15);
    }

    #[test]
    fn exp_special_values() {
        assert_eq!(Quat::ZERO.exp(), Quat::ONE);
        let pi = std::f64::consts::PI;
        let e_pi_i = (Quat::I * pi).exp();
        assert!(e_pi_i.dist(&(-Quat::ONE)) < 1e-15);
        let e_half_pi_i = (Quat::I * (pi / 2.0)).exp();
        assert!(e_half_pi_i.dist(&Quat::I) < 1e-15);
        // |exp q| = exp(Re q)
        let p = q(0.7, -0.2, 0.4, 1.1);
        assert!((p.exp().norm() - p.w.exp()).abs() < 1e-13);
    }

    /// Series oracle: sum q^n / n! with term-norm stopping rule.
    fn exp_series(p: Quat) -> Quat {
        let mut sum = Quat::ONE;
        let mut term = Quat::ONE;
        for n in 1..200 {
            term = term * p * (1.0 / n as f64);
            sum = sum + term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        sum
    }

    #[test]
    fn exp_matches_series_oracle() {
        let p = q(0.3, 0.4, -0.2, 0.1);
        assert!(p.exp().dist(&exp_series(p)) < 1e-12);
        // near-pure-part threshold region
        let tiny = q(0.5, 1e-13, 0.0, 0.0);
        assert!(tiny.exp().dist(&exp_series(tiny)) < 1e-12);
    }

    #[test]
    fn parse_basics() {
        assert_eq!(parse_quat("i").unwrap(), Quat::I);
        assert_eq!(parse_quat("-i").unwrap(), -Quat::I);
        assert_eq!(
            parse_quat("1+2i-3j+0.5k").unwrap(),
            q(1.0, 2.0, -3.0, 0.5)
        );
        // order-insensitive
        assert_eq!(parse_quat("2k+1").unwrap(), q(1.0, 0.0, 0.0, 2.0));
        assert_eq!(parse_quat(" 1 - 2 i ").unwrap(), q(1.0, -2.0, 0.0, 0.0));
        assert_eq!(parse_quat("1e-3i").unwrap(), q(0.0, 1e-3, 0.0, 0.0));
        assert_eq!(parse_quat("0").unwrap(), Quat::ZERO);
    }

    #[test]
    fn parse_errors_carry_offsets() {
        match parse_quat("1+2i+3i") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected duplicate-unit error, got {:?}", other),
        }
        match parse_quat("1+") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 1),
            other => panic!("expected truncated-term error, got {:?}", other),
        }
        match parse_quat("") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("expected empty error, got {:?}", other),
        }
        assert!(parse_quat("1 2").is_err()); // missing sign between terms
        assert!(parse_quat("2e").is_err()); // dangling exponent
        assert!(parse_quat("q").is_err());
        assert!(parse_quat("1+1").is_err()); // duplicate scalar term
    }

    #[test]
    fn format_basics() {
        assert_eq!(format_quat(&Quat::ZERO), "0");
        assert_eq!(format_quat(&Quat::I), "i");
        assert_eq!(format_quat(&-Quat::K), "-k");
        assert_eq!(format_quat(&q(1.0, 2.0, -3.0, 0.5)), "1.0+2.0i-3.0j+0.5k");
        // negative zero is treated as zero
        assert_eq!(format_quat(&q(-0.0, 0.0, 0.0, 0.0)), "0");
    }
}
