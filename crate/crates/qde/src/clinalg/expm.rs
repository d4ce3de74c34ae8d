//! Complex matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant (Higham's method, fixed order without norm estimation — the
//! matrices here are small).

use super::{C64, CMat, lu};

const THETA_13: f64 = 5.371920351148152;

const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `exp(a)` for a square complex matrix.
pub fn expm(a: &CMat) -> CMat {
    assert!(a.is_square(), "expm requires a square matrix");
    let n = a.rows;
    if n == 0 {
        return CMat::zeros(0, 0);
    }

    let norm = a.norm_1();
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(C64::new(1.0 / f64::powi(2.0, s as i32), 0.0));

    let mut x = pade_13(&scaled);
    for _ in 0..s {
        x = x.mul(&x);
    }
    x
}

fn pade_13(a: &CMat) -> CMat {
    let n = a.rows;
    let ident = CMat::identity(n);
    let b: Vec<C64> = PADE_13.iter().map(|&v| C64::new(v, 0.0)).collect();

    let a2 = a.mul(a);
    let a4 = a2.mul(&a2);
    let a6 = a2.mul(&a4);

    // U = A [ A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I ]
    let mut inner = a6.scale(b[13]).add(&a4.scale(b[11])).add(&a2.scale(b[9]));
    inner = a6.mul(&inner);
    inner = inner
        .add(&a6.scale(b[7]))
        .add(&a4.scale(b[5]))
        .add(&a2.scale(b[3]))
        .add(&ident.scale(b[1]));
    let u = a.mul(&inner);

    // V = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let mut v = a6.scale(b[12]).add(&a4.scale(b[10])).add(&a2.scale(b[8]));
    v = a6.mul(&v);
    v = v
        .add(&a6.scale(b[6]))
        .add(&a4.scale(b[4]))
        .add(&a2.scale(b[2]))
        .add(&ident.scale(b[0]));

    // (V - U) X = (V + U)
    let vm = v.sub(&u);
    let vp = v.add(&u);
    let f = lu::factor(&vm);
    let mut x = CMat::zeros(n, n);
    for col in 0..n {
        let rhs: Vec<C64> = (0..n).map(|row| vp[(row, col)]).collect();
        let sol = f
            .solve(&rhs)
            .expect("Pade denominator is nonsingular after scaling");
        for row in 0..n {
            x[(row, col)] = sol[row];
        }
    }
    x
}
