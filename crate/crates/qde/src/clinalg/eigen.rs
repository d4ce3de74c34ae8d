//! Dense nonsymmetric complex eigensolver: Householder reduction to upper
//! Hessenberg form followed by an explicitly shifted QR iteration (Wilkinson
//! shifts, occasional exceptional shifts) that accumulates the Schur
//! transformation. Eigenvectors come from back-substitution on the
//! triangular factor.

use super::{C64, CMat};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Schur decomposition `A = Z T Z^H` with `T` upper triangular.
pub struct Schur {
    pub t: CMat,
    pub z: CMat,
}

/// Eigenvalues with matching unit right eigenvectors (columns of `vectors`).
pub struct Eigen {
    pub values: Vec<C64>,
    pub vectors: CMat,
}

/// Reduces `a` to Hessenberg form, returning `(h, q)` with `a = q h q^H`.
fn hessenberg(a: &CMat) -> (CMat, CMat) {
    let n = a.rows;
    let mut h = a.clone();
    let mut q = CMat::identity(n);
    if n < 3 {
        return (h, q);
    }

    for k in 0..n - 2 {
        let m = n - k - 1; // length of the column tail below the diagonal
        let mut v: Vec<C64> = (0..m).map(|r| h[(k + 1 + r, k)]).collect();
        let sigma = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if sigma == 0.0 {
            continue;
        }
        let x0 = v[0];
        let alpha = if x0.norm() > 0.0 {
            -(x0 / x0.norm()) * sigma
        } else {
            C64::new(-sigma, 0.0)
        };
        v[0] = x0 - alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;

        // Left: rows k+1.. of H <- (I - tau v v^H) rows
        for c in 0..n {
            let mut s = ZERO;
            for (r, vr) in v.iter().enumerate() {
                s += vr.conj() * h[(k + 1 + r, c)];
            }
            s *= tau;
            for (r, vr) in v.iter().enumerate() {
                let sub = *vr * s;
                h[(k + 1 + r, c)] -= sub;
            }
        }
        // Right: columns k+1.. of H <- columns (I - tau v v^H)
        for r0 in 0..n {
            let mut s = ZERO;
            for (r, vr) in v.iter().enumerate() {
                s += h[(r0, k + 1 + r)] * *vr;
            }
            s *= tau;
            for (r, vr) in v.iter().enumerate() {
                let sub = s * vr.conj();
                h[(r0, k + 1 + r)] -= sub;
            }
        }
        // Accumulate Q <- Q (I - tau v v^H)
        for r0 in 0..n {
            let mut s = ZERO;
            for (r, vr) in v.iter().enumerate() {
                s += q[(r0, k + 1 + r)] * *vr;
            }
            s *= tau;
            for (r, vr) in v.iter().enumerate() {
                let sub = s * vr.conj();
                q[(r0, k + 1 + r)] -= sub;
            }
        }

        h[(k + 1, k)] = alpha;
        for r in k + 2..n {
            h[(r, k)] = ZERO;
        }
    }
    (h, q)
}

/// Givens rotation `G = [[c, s], [-conj(s), c]]` (c real) with
/// `G [x; y] = [r; 0]`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let nx = x.norm();
    let ny = y.norm();
    if ny == 0.0 {
        return (1.0, ZERO);
    }
    let n = (nx * nx + ny * ny).sqrt();
    if nx == 0.0 {
        return (0.0, y.conj() / ny);
    }
    (nx / n, (x / nx) * y.conj() / n)
}

/// One explicit shifted QR sweep on the active block `lo..=hi`.
fn qr_sweep(h: &mut CMat, z: &mut CMat, lo: usize, hi: usize, shift: C64) {
    let n = h.rows;
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }

    let mut rots: Vec<(f64, C64)> = Vec::with_capacity(hi - lo);
    for i in lo..hi {
        let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
        rots.push((c, s));
        for col in i..n {
            let t1 = h[(i, col)];
            let t2 = h[(i + 1, col)];
            h[(i, col)] = c * t1 + s * t2;
            h[(i + 1, col)] = -s.conj() * t1 + c * t2;
        }
        h[(i + 1, i)] = ZERO;
    }

    // H <- R G_lo^H ... G_{hi-1}^H, restoring Hessenberg form.
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let i = lo + idx;
        let top = (i + 1).min(n - 1);
        for row in 0..=top {
            let t1 = h[(row, i)];
            let t2 = h[(row, i + 1)];
            h[(row, i)] = t1 * c + t2 * s.conj();
            h[(row, i + 1)] = -t1 * s + t2 * c;
        }
        for row in 0..n {
            let t1 = z[(row, i)];
            let t2 = z[(row, i + 1)];
            z[(row, i)] = t1 * c + t2 * s.conj();
            z[(row, i + 1)] = -t1 * s + t2 * c;
        }
    }

    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

/// Eigenvalues of the trailing 2x2 of the active block; returns the root
/// closer to the bottom-right entry (Wilkinson shift).
fn wilkinson_shift(h: &CMat, hi: usize) -> C64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let tr = a + d;
    let disc = ((a - d) * (a - d) + b * c * 4.0).sqrt();
    let l1 = (tr + disc) * 0.5;
    let l2 = (tr - disc) * 0.5;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Schur decomposition via shifted QR. `max_iters` caps the total number of
/// sweeps across all eigenvalues.
pub fn schur(a: &CMat, max_iters: usize) -> Result<Schur, String> {
    assert!(a.is_square(), "schur requires a square matrix");
    let n = a.rows;
    if n == 0 {
        return Ok(Schur {
            t: CMat::zeros(0, 0),
            z: CMat::zeros(0, 0),
        });
    }
    let (mut h, mut z) = hessenberg(a);
    let hnorm = h.norm_1().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;

    let mut hi = n - 1;
    let mut stalled = 0usize;
    let mut total = 0usize;
    loop {
        // Deflate negligible subdiagonals.
        let mut lo = hi;
        while lo > 0 {
            let tst = {
                let t = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
                if t == 0.0 { hnorm } else { t }
            };
            if h[(lo, lo - 1)].norm() <= eps * tst {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            if hi == 0 {
                break;
            }
            hi -= 1;
            stalled = 0;
            continue;
        }

        total += 1;
        stalled += 1;
        if total > max_iters {
            return Err(format!(
                "QR iteration exceeded {} sweeps on a {}x{} matrix",
                max_iters, n, n
            ));
        }
        let shift = if stalled.is_multiple_of(10) {
            // Exceptional shift to break symmetric stalls.
            let extra = if hi >= 2 { h[(hi - 1, hi - 2)].norm() } else { 0.0 };
            h[(hi, hi)] + C64::new(0.75 * (h[(hi, hi - 1)].norm() + extra), 0.0)
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_sweep(&mut h, &mut z, lo, hi, shift);
    }

    // Clean the strict lower triangle (rounding residue from the sweeps).
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(Schur { t: h, z })
}

/// Full eigendecomposition: values plus unit right eigenvectors.
pub fn eigen(a: &CMat, max_iters: usize) -> Result<Eigen, String> {
    let n = a.rows;
    let Schur { t, z } = schur(a, max_iters)?;
    let values: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();

    let tnorm = t.norm_max().max(1.0);
    let smallnum = f64::EPSILON * tnorm;
    let mut vectors = CMat::zeros(n, n);
    for k in 0..n {
        let lambda = values[k];
        let mut y = vec![ZERO; n];
        y[k] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut num = ZERO;
            for m in j + 1..=k {
                num += t[(j, m)] * y[m];
            }
            let mut den = t[(j, j)] - lambda;
            if den.norm() < smallnum {
                den = C64::new(smallnum, 0.0);
            }
            y[j] = -num / den;
        }
        let v = z.matvec(&y);
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for r in 0..n {
            vectors[(r, k)] = v[r] / norm;
        }
    }
    Ok(Eigen { values, vectors })
}
