//! Dense matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13, chosen from the 1-norm as in
//! Higham (2005), "The scaling and squaring method for the matrix
//! exponential revisited".

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const PADE_9: [f64; 10] =
    [17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0];
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

/// Largest number of squarings before the result is declared unrepresentable.
const MAX_SQUARINGS: i32 = 1024;

pub fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(M x)` for `x >= 0`.
pub fn matrix_exponential(m: &DMatrix<f64>, x: f64) -> Result<DMatrix<f64>> {
    assert!(m.is_square(), "matrix exponential needs a square matrix");
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Param(format!("exponential time must be finite and >= 0, got {x}")));
    }
    let dim = m.nrows();
    if x == 0.0 {
        return Ok(DMatrix::identity(dim, dim));
    }
    let a = m * x;
    let norm = one_norm(&a);
    if !norm.is_finite() {
        return Err(Error::Overflow(norm));
    }
    let ident = DMatrix::<f64>::identity(dim, dim);

    let (u, v, squarings) = if norm <= THETA_9 {
        let a2 = &a * &a;
        let (u, v) = if norm <= THETA_3 {
            low_order(&a, &a2, &ident, &PADE_3)
        } else if norm <= THETA_5 {
            low_order(&a, &a2, &ident, &PADE_5)
        } else if norm <= THETA_7 {
            low_order(&a, &a2, &ident, &PADE_7)
        } else {
            low_order(&a, &a2, &ident, &PADE_9)
        };
        (u, v, 0)
    } else {
        let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
        if s > MAX_SQUARINGS {
            return Err(Error::Overflow(norm));
        }
        let scaled = &a * 2f64.powi(-s);
        let (u, v) = degree_13(&scaled, &ident);
        (u, v, s)
    };

    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut result = lhs.lu().solve(&rhs).ok_or(Error::Overflow(norm))?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    if result.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow(norm));
    }
    Ok(result)
}

fn low_order(a: &DMatrix<f64>, a2: &DMatrix<f64>, ident: &DMatrix<f64>, b: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut odd = ident * b[1];
    let mut even = ident * b[0];
    let mut power = ident.clone();
    for k in 1..b.len() / 2 {
        power = &power * a2;
        odd += &power * b[2 * k + 1];
        even += &power * b[2 * k];
    }
    (a * odd, even)
}

fn degree_13(a: &DMatrix<f64>, ident: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let b = &PADE_13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let inner_u = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let u = a * (&a6 * inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + ident * b[1]);
    let inner_v = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = &a6 * inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + ident * b[0];
    (u, v)
}
