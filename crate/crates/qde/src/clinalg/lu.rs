//! LU factorization with partial pivoting plus the rank / null-space helpers
//! the dependence tests rely on.

use super::{C64, CMat};

/// LU factorization `P A = L U` with partial pivoting.
pub struct Lu {
    lu: CMat,
    perm: Vec<usize>,
    swaps: usize,
    singular: bool,
}

pub fn factor(a: &CMat) -> Lu {
    assert!(a.is_square(), "LU requires a square matrix");
    let n = a.rows;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    let mut singular = false;

    for k in 0..n {
        let mut p = k;
        let mut best = lu[(k, k)].norm();
        for r in k + 1..n {
            let v = lu[(r, k)].norm();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best == 0.0 {
            singular = true;
            continue;
        }
        if p != k {
            for c in 0..n {
                let t = lu[(k, c)];
                lu[(k, c)] = lu[(p, c)];
                lu[(p, c)] = t;
            }
            perm.swap(k, p);
            swaps += 1;
        }
        let pivot = lu[(k, k)];
        for r in k + 1..n {
            let factor = lu[(r, k)] / pivot;
            lu[(r, k)] = factor;
            for c in k + 1..n {
                let sub = factor * lu[(k, c)];
                lu[(r, c)] -= sub;
            }
        }
    }

    Lu {
        lu,
        perm,
        swaps,
        singular,
    }
}

impl Lu {
    /// Determinant as the signed product of pivots.
    pub fn det(&self) -> C64 {
        if self.singular {
            return C64::new(0.0, 0.0);
        }
        let n = self.lu.rows;
        let mut d = if self.swaps.is_multiple_of(2) {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        };
        for i in 0..n {
            d *= self.lu[(i, i)];
        }
        d
    }

    /// Solves `A x = b` for a single right-hand side.
    pub fn solve(&self, b: &[C64]) -> Option<Vec<C64>> {
        if self.singular {
            return None;
        }
        let n = self.lu.rows;
        assert_eq!(b.len(), n);
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                let sub = self.lu[(i, j)] * x[j];
                x[i] -= sub;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let sub = self.lu[(i, j)] * x[j];
                x[i] -= sub;
            }
            x[i] /= self.lu[(i, i)];
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<CMat> {
        let n = self.lu.rows;
        let mut out = CMat::zeros(n, n);
        for col in 0..n {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[col] = C64::new(1.0, 0.0);
            let x = self.solve(&e)?;
            for row in 0..n {
                out[(row, col)] = x[row];
            }
        }
        Some(out)
    }
}

pub fn det(a: &CMat) -> C64 {
    factor(a).det()
}

pub fn inverse(a: &CMat) -> Option<CMat> {
    factor(a).inverse()
}

/// Row echelon reduction with partial pivoting. Returns the reduced matrix
/// together with the pivot (row, column) pairs; entries below `tol` are
/// treated as zero.
fn echelon(a: &CMat, tol: f64) -> (CMat, Vec<(usize, usize)>) {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let mut p = row;
        let mut best = m[(row, col)].norm();
        for r in row + 1..m.rows {
            let v = m[(r, col)].norm();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best <= tol {
            for r in row..m.rows {
                m[(r, col)] = C64::new(0.0, 0.0);
            }
            continue;
        }
        if p != row {
            for c in 0..m.cols {
                let t = m[(row, c)];
                m[(row, c)] = m[(p, c)];
                m[(p, c)] = t;
            }
        }
        let pivot = m[(row, col)];
        for r in row + 1..m.rows {
            let factor = m[(r, col)] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            m[(r, col)] = C64::new(0.0, 0.0);
            for c in col + 1..m.cols {
                let sub = factor * m[(row, c)];
                m[(r, c)] -= sub;
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    (m, pivots)
}

/// Numerical rank with pivot threshold `tol` (scaled by the caller).
pub fn rank(a: &CMat, tol: f64) -> usize {
    echelon(a, tol).1.len()
}

/// A nonzero kernel vector of `a`, or `None` when `a` has full column rank.
///
/// The vector is unnormalized; callers rescale as needed.
pub fn null_vector(a: &CMat, tol: f64) -> Option<Vec<C64>> {
    let (m, pivots) = echelon(a, tol);
    if pivots.len() == m.cols {
        return None;
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free_col = (0..m.cols).find(|c| !pivot_cols.contains(c))?;

    let mut x = vec![C64::new(0.0, 0.0); m.cols];
    x[free_col] = C64::new(1.0, 0.0);
    for &(row, col) in pivots.iter().rev() {
        if col > free_col {
            continue;
        }
        let mut s = C64::new(0.0, 0.0);
        for c in col + 1..m.cols {
            s += m[(row, c)] * x[c];
        }
        x[col] = -s / m[(row, col)];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn det_and_inverse_2x2() {
        let a = CMat::from_rows(vec![
            vec![c(1.0, 1.0), c(2.0, 0.0)],
            vec![c(0.0, -1.0), c(1.0, 0.5)],
        ]);
        // det = (1+i)(1+0.5i) - 2(-i) = 0.5 + 3.5i
        let d = det(&a);
        assert!((d - c(0.5, 3.5)).norm() < 1e-14);
        let inv = inverse(&a).unwrap();
        let prod = a.mul(&inv);
        assert!(prod.dist_max(&CMat::identity(2)) < 1e-13);
    }

    #[test]
    fn solve_roundtrip() {
        let a = CMat::from_rows(vec![
            vec![c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.5)],
            vec![c(0.0, 1.0), c(3.0, 0.0), c(-1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 1.0)],
        ]);
        let x_true = vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, -1.0)];
        let b = a.matvec(&x_true);
        let x = factor(&a).solve(&b).unwrap();
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).norm() < 1e-13);
        }
    }

    #[test]
    fn rank_and_null_vector() {
        // second column = 2i * first column
        let a = CMat::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 2.0)],
            vec![c(0.0, 1.0), c(-2.0, 0.0)],
        ]);
        assert_eq!(rank(&a, 1e-12), 1);
        let v = null_vector(&a, 1e-12).unwrap();
        let r = a.matvec(&v);
        let norm: f64 = r.iter().map(|z| z.norm()).sum();
        assert!(norm < 1e-12);
        assert!(v.iter().any(|z| z.norm() > 0.5));

        let full = CMat::identity(3);
        assert_eq!(rank(&full, 1e-12), 3);
        assert!(null_vector(&full, 1e-12).is_none());
    }
}
