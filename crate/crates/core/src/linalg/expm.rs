//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants. Order is picked from the 1-norm so the truncation error
//! stays below unit roundoff before any squaring happens.

use num_complex::Complex64;

use super::lu::Lu;
use super::matrix::CMatrix;
use crate::error::{Error, Result};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
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

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// exp(M). Relative accuracy holds to about 1e-12 for ‖M‖ up to 50 or so.
pub fn mat_exp(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_finite() {
        return Err(Error::NonFinite("mat_exp input"));
    }
    let norm = m.one_norm();
    let result = if norm <= THETA_3 {
        pade_low(m, &B3)?
    } else if norm <= THETA_5 {
        pade_low(m, &B5)?
    } else if norm <= THETA_7 {
        pade_low(m, &B7)?
    } else if norm <= THETA_9 {
        pade_low(m, &B9)?
    } else {
        let squarings = ((norm / THETA_13).log2().ceil()).max(0.0) as u32;
        let scaled = m.scale(real(0.5f64.powi(squarings as i32)));
        let mut e = pade_13(&scaled)?;
        for _ in 0..squarings {
            e = e.mul(&e);
        }
        e
    };
    if !result.is_finite() {
        return Err(Error::NonFinite("mat_exp overflow"));
    }
    Ok(result)
}

/// Diagonal Padé of order 3..9: U odd in A, V even, solve (V−U)X = V+U.
fn pade_low(a: &CMatrix, b: &[f64]) -> Result<CMatrix> {
    let n = a.dim();
    let a2 = a.mul(a);
    let ident = CMatrix::identity(n);
    let mut u_inner = ident.scale(real(b[1]));
    let mut v = ident.scale(real(b[0]));
    let mut a2k = CMatrix::identity(n);
    for k in 1..=(b.len() / 2 - 1) {
        a2k = a2k.mul(&a2);
        u_inner = u_inner.add(&a2k.scale(real(b[2 * k + 1])));
        v = v.add(&a2k.scale(real(b[2 * k])));
    }
    let u = a.mul(&u_inner);
    pade_solve(&u, &v)
}

/// Order-13 Padé with the factored polynomial evaluation.
fn pade_13(a: &CMatrix) -> Result<CMatrix> {
    let n = a.dim();
    let b = &B13;
    let ident = CMatrix::identity(n);
    let a2 = a.mul(a);
    let a4 = a2.mul(&a2);
    let a6 = a4.mul(&a2);
    let u_high = a6
        .scale(real(b[13]))
        .add(&a4.scale(real(b[11])))
        .add(&a2.scale(real(b[9])));
    let u_low = a6
        .scale(real(b[7]))
        .add(&a4.scale(real(b[5])))
        .add(&a2.scale(real(b[3])))
        .add(&ident.scale(real(b[1])));
    let u = a.mul(&a6.mul(&u_high).add(&u_low));
    let v_high = a6
        .scale(real(b[12]))
        .add(&a4.scale(real(b[10])))
        .add(&a2.scale(real(b[8])));
    let v = a6
        .mul(&v_high)
        .add(&a6.scale(real(b[6])))
        .add(&a4.scale(real(b[4])))
        .add(&a2.scale(real(b[2])))
        .add(&ident.scale(real(b[0])));
    pade_solve(&u, &v)
}

fn pade_solve(u: &CMatrix, v: &CMatrix) -> Result<CMatrix> {
    let p = v.add(u);
    let q = v.sub(u);
    Ok(Lu::factor(&q)?.solve(&p))
}
