//! Matrix exponential by scaling and squaring with diagonal Pade approximants.

use super::ComplexMatrix;
use crate::error::{Error, Result};
use num_complex::Complex64;

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068;
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
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

/// e^{A t}. Relative accuracy around 1e-13 for moderate ||A t||.
pub fn matrix_exponential(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("time {t} is not finite")));
    }
    let at = a.scale(Complex64::new(t, 0.0));
    expm(&at)
}

pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let norm = a.one_norm();
    let result = if norm <= THETA_3 {
        pade_low(a, &B3)?
    } else if norm <= THETA_5 {
        pade_low(a, &B5)?
    } else if norm <= THETA_7 {
        pade_low(a, &B7)?
    } else if norm <= THETA_9 {
        pade_low(a, &B9)?
    } else {
        let s = ((norm / THETA_13).log2().ceil()).max(0.0) as u32;
        let scaled = a.scale(Complex64::new((0.5f64).powi(s as i32), 0.0));
        let mut e = pade_13(&scaled)?;
        for _ in 0..s {
            e = e.mul(&e);
        }
        e
    };
    if !result.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(result)
}

/// Diagonal Pade of order (m, m) for m in {3, 5, 7, 9}; coefficients b.
fn pade_low(a: &ComplexMatrix, b: &[f64]) -> Result<ComplexMatrix> {
    let n = a.dim();
    let a2 = a.mul(a);
    let mut even_powers = vec![ComplexMatrix::identity(n), a2.clone()];
    while even_powers.len() < b.len() / 2 {
        let next = even_powers.last().unwrap().mul(&a2);
        even_powers.push(next);
    }
    let mut u_sum = ComplexMatrix::zeros(n);
    let mut v = ComplexMatrix::zeros(n);
    for (k, p) in even_powers.iter().enumerate() {
        u_sum = u_sum.add(&p.scale(Complex64::new(b[2 * k + 1], 0.0)));
        v = v.add(&p.scale(Complex64::new(b[2 * k], 0.0)));
    }
    let u = a.mul(&u_sum);
    solve_pade(&u, &v)
}

fn pade_13(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.dim();
    let ident = ComplexMatrix::identity(n);
    let a2 = a.mul(a);
    let a4 = a2.mul(&a2);
    let a6 = a2.mul(&a4);
    let b = &B13;
    let u_hi = a6
        .scale(Complex64::new(b[13], 0.0))
        .add(&a4.scale(Complex64::new(b[11], 0.0)))
        .add(&a2.scale(Complex64::new(b[9], 0.0)));
    let u_lo = a6
        .scale(Complex64::new(b[7], 0.0))
        .add(&a4.scale(Complex64::new(b[5], 0.0)))
        .add(&a2.scale(Complex64::new(b[3], 0.0)))
        .add(&ident.scale(Complex64::new(b[1], 0.0)));
    let u = a.mul(&a6.mul(&u_hi).add(&u_lo));
    let v_hi = a6
        .scale(Complex64::new(b[12], 0.0))
        .add(&a4.scale(Complex64::new(b[10], 0.0)))
        .add(&a2.scale(Complex64::new(b[8], 0.0)));
    let v = a6
        .mul(&v_hi)
        .add(&a6.scale(Complex64::new(b[6], 0.0)))
        .add(&a4.scale(Complex64::new(b[4], 0.0)))
        .add(&a2.scale(Complex64::new(b[2], 0.0)))
        .add(&ident.scale(Complex64::new(b[0], 0.0)));
    solve_pade(&u, &v)
}

/// (V - U) X = (V + U).
fn solve_pade(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    super::lu_solve_matrix(&v.sub(u), &v.add(u))
}
