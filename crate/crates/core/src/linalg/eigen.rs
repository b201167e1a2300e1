//! Eigenvalues of dense complex matrices: Householder reduction to Hessenberg
//! form followed by shifted QR iteration with Givens rotations. Closed forms
//! handle dimensions 1 and 2.

use super::ComplexMatrix;
use crate::error::{Error, Result};
use num_complex::Complex64;

const DEFLATION_TOL: f64 = 1e-13;
const SWEEPS_PER_EIGENVALUE: usize = 40;

/// All eigenvalues with multiplicity, sorted by (re, im).
pub fn spectrum(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut eigs = match a.dim() {
        0 => Vec::new(),
        1 => vec![a.get(0, 0)],
        2 => closed_spectrum_2(a).to_vec(),
        _ => spectrum_iterative(a)?,
    };
    sort_eigenvalues(&mut eigs);
    Ok(eigs)
}

/// The generic QR path, available at every dimension.
pub(crate) fn spectrum_iterative(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = a.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![a.get(0, 0)]);
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    let scale = h.max_abs().max(1e-300);
    let mut eigs = vec![Complex64::new(0.0, 0.0); n];
    let mut hi = n - 1;
    let mut stagnation = 0usize;
    let mut budget = SWEEPS_PER_EIGENVALUE * n;
    loop {
        // Deflate converged subdiagonal entries.
        for i in 1..=hi {
            let sub = h.get(i, i - 1).norm();
            let local = h.get(i - 1, i - 1).norm() + h.get(i, i).norm();
            let tol = if local > 0.0 {
                DEFLATION_TOL * local
            } else {
                DEFLATION_TOL * scale
            };
            if sub <= tol {
                h.set(i, i - 1, Complex64::new(0.0, 0.0));
            }
        }
        while hi > 0 && h.get(hi, hi - 1).norm() == 0.0 {
            eigs[hi] = h.get(hi, hi);
            hi -= 1;
            stagnation = 0;
        }
        if hi == 0 {
            eigs[0] = h.get(0, 0);
            return Ok(eigs);
        }
        if budget == 0 {
            return Err(Error::ConvergenceFailure(format!(
                "QR iteration budget exhausted at window end {hi}"
            )));
        }
        budget -= 1;
        let mut lo = hi;
        while lo > 0 && h.get(lo, lo - 1).norm() != 0.0 {
            lo -= 1;
        }
        stagnation += 1;
        let shift = if stagnation % 12 == 0 {
            h.get(hi, hi) + Complex64::new(0.75 * h.get(hi, hi - 1).norm(), 0.0)
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_sweep(&mut h, lo, hi, shift);
    }
}

fn closed_spectrum_2(a: &ComplexMatrix) -> [Complex64; 2] {
    let (p, q, r, s) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
    let mean = (p + s) * 0.5;
    let delta = ((p - s) * 0.5 * (p - s) * 0.5 + q * r).sqrt();
    [mean + delta, mean - delta]
}

fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> Complex64 {
    let a = h.get(hi - 1, hi - 1);
    let b = h.get(hi - 1, hi);
    let c = h.get(hi, hi - 1);
    let d = h.get(hi, hi);
    let delta = (a - d) * 0.5;
    let disc = (delta * delta + b * c).sqrt();
    let (m1, m2) = ((a + d) * 0.5 + disc, (a + d) * 0.5 - disc);
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// One explicit shifted QR step on the active window: factor H - mu I = QR
/// by Givens rotations, then replace the window with RQ + mu I.
fn qr_sweep(h: &mut ComplexMatrix, lo: usize, hi: usize, mu: Complex64) {
    for i in lo..=hi {
        let v = h.get(i, i) - mu;
        h.set(i, i, v);
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for i in lo..hi {
        let (c, s) = givens(h.get(i, i), h.get(i + 1, i));
        apply_left(h, i, i + 1, c, s, i, hi);
        rotations.push((i, c, s));
    }
    for &(i, c, s) in &rotations {
        apply_right(h, i, i + 1, c, s, lo, (i + 1).min(hi));
    }
    for i in lo..=hi {
        let v = h.get(i, i) + mu;
        h.set(i, i, v);
    }
}

/// Rotation [[c, s], [-conj(s), c]] with real c that zeroes g in (f, g).
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    if g.norm() == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if f.norm() == 0.0 {
        return (0.0, g.conj() / g.norm());
    }
    let d = (f.norm_sqr() + g.norm_sqr()).sqrt();
    let c = f.norm() / d;
    let s = (f / f.norm()) * g.conj() / d;
    (c, s)
}

fn apply_left(h: &mut ComplexMatrix, r1: usize, r2: usize, c: f64, s: Complex64, j0: usize, j1: usize) {
    for j in j0..=j1 {
        let (x, y) = (h.get(r1, j), h.get(r2, j));
        h.set(r1, j, x * c + s * y);
        h.set(r2, j, -s.conj() * x + y * c);
    }
}

fn apply_right(h: &mut ComplexMatrix, c1: usize, c2: usize, c: f64, s: Complex64, i0: usize, i1: usize) {
    for i in i0..=i1.min(h.dim() - 1) {
        let (x, y) = (h.get(i, c1), h.get(i, c2));
        h.set(i, c1, x * c + y * s.conj());
        h.set(i, c2, -x * s + y * c);
    }
}

/// Householder similarity reduction to upper Hessenberg form.
fn hessenberg(a: &mut ComplexMatrix) {
    let n = a.dim();
    for col in 0..n.saturating_sub(2) {
        let mut norm_sqr = 0.0;
        for i in col + 1..n {
            norm_sqr += a.get(i, col).norm_sqr();
        }
        let pivot = a.get(col + 1, col);
        let norm = norm_sqr.sqrt();
        if norm <= 1e-300 {
            continue;
        }
        let phase = if pivot.norm() > 0.0 {
            pivot / pivot.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (col + 1..n).map(|i| a.get(i, col)).collect();
        v[0] -= alpha;
        let vnorm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sqr <= 1e-300 {
            continue;
        }
        // A <- (I - 2 v v^H / |v|^2) A, applied to rows col+1..n.
        for j in col..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (k, vi) in v.iter().enumerate() {
                dot += vi.conj() * a.get(col + 1 + k, j);
            }
            let factor = dot * (2.0 / vnorm_sqr);
            for (k, vi) in v.iter().enumerate() {
                let val = a.get(col + 1 + k, j) - vi * factor;
                a.set(col + 1 + k, j, val);
            }
        }
        // A <- A (I - 2 v v^H / |v|^2), applied to columns col+1..n.
        for i in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (k, vi) in v.iter().enumerate() {
                dot += a.get(i, col + 1 + k) * vi;
            }
            let factor = dot * (2.0 / vnorm_sqr);
            for (k, vi) in v.iter().enumerate() {
                let val = a.get(i, col + 1 + k) - factor * vi.conj();
                a.set(i, col + 1 + k, val);
            }
        }
        for i in col + 2..n {
            a.set(i, col, Complex64::new(0.0, 0.0));
        }
    }
}

pub(crate) fn sort_eigenvalues(eigs: &mut [Complex64]) {
    eigs.sort_by(|x, y| {
        x.re.total_cmp(&y.re)
            .then_with(|| x.im.total_cmp(&y.im))
    });
}
