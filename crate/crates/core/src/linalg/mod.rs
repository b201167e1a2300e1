//! Dense complex linear algebra for small matrices: exponentials, spectra,
//! induced operator norms, and the nonresonance resolvent (cI - e^{A omega})^{-1}.

mod eigen;
mod expm;

pub use eigen::spectrum;
pub use expm::matrix_exponential;

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Square dense complex matrix, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Dimension {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        for row in rows {
            if row.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: row.len(),
                });
            }
        }
        Self::new(dim, rows.concat())
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            dim: self.dim,
            entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            dim: self.dim,
            entries,
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(v.len(), self.dim);
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let n = self.dim;
        (0..n)
            .map(|j| (0..n).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        let n = self.dim;
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Selects which induced operator norm (and matching vector norm) to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    L1,
    L2,
    LInf,
}

impl NormKind {
    pub fn label(self) -> &'static str {
        match self {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
            NormKind::LInf => "linf",
        }
    }
}

impl std::fmt::Display for NormKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

pub fn vector_norm(v: &[Complex64], kind: NormKind) -> f64 {
    match kind {
        NormKind::L1 => v.iter().map(|z| z.norm()).sum(),
        NormKind::L2 => v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        NormKind::LInf => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
    }
}

/// Operator norm induced by the chosen vector norm. The L1 and LInf cases are
/// the exact column/row-sum formulas; L2 is the largest singular value.
pub fn induced_norm(a: &ComplexMatrix, kind: NormKind) -> f64 {
    match kind {
        NormKind::L1 => a.one_norm(),
        NormKind::LInf => a.inf_norm(),
        NormKind::L2 => {
            let gram = a.adjoint().mul(a);
            let lambda_max = match eigen::spectrum_iterative(&gram) {
                Ok(eigs) => eigs.iter().map(|z| z.re).fold(0.0, f64::max),
                Err(_) => power_iteration_max(&gram),
            };
            lambda_max.max(0.0).sqrt()
        }
    }
}

/// Largest-eigenvalue fallback for Hermitian positive semidefinite matrices.
fn power_iteration_max(m: &ComplexMatrix) -> f64 {
    let n = m.dim();
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + (i as f64) * 0.3, 0.1 * i as f64))
        .collect();
    let mut lambda = 0.0;
    for _ in 0..500 {
        let w = m.matvec(&v);
        let norm = vector_norm(&w, NormKind::L2);
        if norm == 0.0 {
            return 0.0;
        }
        let next: Vec<Complex64> = w.iter().map(|z| z / norm).collect();
        let new_lambda = norm / vector_norm(&v, NormKind::L2);
        v = next;
        if (new_lambda - lambda).abs() <= 1e-15 * new_lambda.abs() {
            return new_lambda;
        }
        lambda = new_lambda;
    }
    lambda
}

/// LU factorization with partial pivoting; solves A X = B in place of B's copy.
pub fn lu_solve_matrix(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: b.dim(),
        });
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    let scale = a.max_abs().max(1e-300);
    for col in 0..n {
        let (mut piv, mut piv_abs) = (col, lu.get(col, col).norm());
        for row in col + 1..n {
            let v = lu.get(row, col).norm();
            if v > piv_abs {
                piv = row;
                piv_abs = v;
            }
        }
        if piv_abs <= 1e-14 * scale {
            return Err(Error::Singular);
        }
        if piv != col {
            for j in 0..n {
                let (a1, a2) = (lu.get(col, j), lu.get(piv, j));
                lu.set(col, j, a2);
                lu.set(piv, j, a1);
                let (b1, b2) = (x.get(col, j), x.get(piv, j));
                x.set(col, j, b2);
                x.set(piv, j, b1);
            }
        }
        let d = lu.get(col, col);
        for row in col + 1..n {
            let factor = lu.get(row, col) / d;
            lu.set(row, col, factor);
            for j in col + 1..n {
                let v = lu.get(row, j) - factor * lu.get(col, j);
                lu.set(row, j, v);
            }
            for j in 0..n {
                let v = x.get(row, j) - factor * x.get(col, j);
                x.set(row, j, v);
            }
        }
    }
    for col in (0..n).rev() {
        let d = lu.get(col, col);
        for j in 0..n {
            x.set(col, j, x.get(col, j) / d);
        }
        for row in 0..col {
            let factor = lu.get(row, col);
            for j in 0..n {
                let v = x.get(row, j) - factor * x.get(col, j);
                x.set(row, j, v);
            }
        }
    }
    Ok(x)
}

pub fn invert(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    lu_solve_matrix(a, &ComplexMatrix::identity(a.dim()))
}

/// The resolvent R = (cI - e^{A omega})^{-1}, guarded by the nonresonance
/// margin: every eigenvalue lambda of A must keep |c - e^{omega lambda}|
/// at or above `margin_tol`. R satisfies cR = R e^{A omega} + I.
pub fn nonresonance_resolvent(
    a: &ComplexMatrix,
    omega: f64,
    c: Complex64,
    margin_tol: f64,
) -> Result<ComplexMatrix> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("omega must be positive, got {omega}")));
    }
    if c.norm() == 0.0 {
        return Err(Error::Domain("multiplier c must be nonzero".into()));
    }
    let eigs = spectrum(a)?;
    for lambda in &eigs {
        let multiplier = (lambda * omega).exp();
        let distance = (c - multiplier).norm();
        if distance < margin_tol {
            return Err(Error::Resonance {
                multiplier,
                distance,
            });
        }
    }
    let e_omega = matrix_exponential(a, omega)?;
    let shifted = ComplexMatrix::identity(a.dim()).scale(c).sub(&e_omega);
    invert(&shifted)
}

/// Default nonresonance margin; resolvent norms beyond 1e8 make the
/// downstream constants meaningless in double precision.
pub const DEFAULT_MARGIN_TOL: f64 = 1e-8;
