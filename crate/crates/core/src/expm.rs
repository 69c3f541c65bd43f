//! Dense matrix exponential by scaling and squaring with diagonal Padé
//! approximants (degrees 3, 5, 7, 9 and 13), after Higham (2005).

use ndarray::Array2;

use crate::error::{integrity, Result};
use crate::linalg::{ensure_square, identity, is_finite, lu_solve, one_norm, CMatrix, C64};

const THETA: [(usize, f64); 4] =
    [(3, 1.495585217958292e-2), (5, 2.539398330063230e-1), (7, 9.504178996162932e-1), (9, 2.097847961257068e0)];
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] =
    [17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0];
const B13: [f64; 14] = [
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

fn scaled(a: &CMatrix, c: f64) -> CMatrix {
    a.mapv(|z| z * c)
}

/// Odd/even parts `(U, V)` of the degree-`m` Padé numerator for m ≤ 9.
fn pade_low(a: &CMatrix, coeffs: &[f64]) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    let a2 = a.dot(a);
    let mut powers = vec![identity(n), a2.clone()];
    while powers.len() * 2 < coeffs.len() {
        let next = powers.last().unwrap().dot(&a2);
        powers.push(next);
    }
    let mut u = Array2::<C64>::zeros((n, n));
    let mut v = Array2::<C64>::zeros((n, n));
    for (k, p) in powers.iter().enumerate() {
        v.scaled_add(C64::from(coeffs[2 * k]), p);
        if 2 * k + 1 < coeffs.len() {
            u.scaled_add(C64::from(coeffs[2 * k + 1]), p);
        }
    }
    (a.dot(&u), v)
}

fn pade_13(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    let b = |k: usize| C64::from(B13[k]);
    let id = identity(n);
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);

    let mut inner_u = scaled(&a6, B13[13]);
    inner_u.scaled_add(b(11), &a4);
    inner_u.scaled_add(b(9), &a2);
    let mut u = a6.dot(&inner_u);
    u.scaled_add(b(7), &a6);
    u.scaled_add(b(5), &a4);
    u.scaled_add(b(3), &a2);
    u.scaled_add(b(1), &id);
    let u = a.dot(&u);

    let mut inner_v = scaled(&a6, B13[12]);
    inner_v.scaled_add(b(10), &a4);
    inner_v.scaled_add(b(8), &a2);
    let mut v = a6.dot(&inner_v);
    v.scaled_add(b(6), &a6);
    v.scaled_add(b(4), &a4);
    v.scaled_add(b(2), &a2);
    v.scaled_add(b(0), &id);
    (u, v)
}

/// Computes `exp(a)` for a dense complex square matrix.
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    let n = ensure_square(a, "expm argument")?;
    if !is_finite(a) {
        return Err(integrity("expm argument has non-finite entries"));
    }
    let norm = one_norm(a);
    if norm == 0.0 {
        return Ok(identity(n));
    }

    for (m, theta) in THETA {
        if norm <= theta {
            let coeffs: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            let (u, v) = pade_low(a, coeffs);
            return solve_pade(&u, &v);
        }
    }

    let squarings = (norm / THETA_13).log2().ceil().max(0.0) as i32;
    let a = scaled(a, 0.5f64.powi(squarings));
    let (u, v) = pade_13(&a);
    let mut r = solve_pade(&u, &v)?;
    for _ in 0..squarings {
        r = r.dot(&r);
    }
    if !is_finite(&r) {
        return Err(integrity("matrix exponential overflowed"));
    }
    Ok(r)
}

fn solve_pade(u: &CMatrix, v: &CMatrix) -> Result<CMatrix> {
    let p = v + u;
    let q = v - u;
    lu_solve(&q, &p)
}
