//! Diagonal generators for the function-space problems: semigroup action,
//! resolvent constants with analytic tail control, and transforms between
//! basis coefficients and uniform spatial samples.

pub mod solve;

use crate::certificates::SemigroupConstants;
use crate::error::{Error, Result};
use crate::kernels::PeriodicitySpec;
use crate::linalg::DEFAULT_MARGIN_TOL;
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    /// sqrt(2/pi) sin(kx) on (0, pi), modes k = 1..K.
    DirichletSine,
    /// e^{ikx}/sqrt(2 pi) on (0, 2 pi), modes k = -K..K.
    PeriodicExponential,
}

/// A generator diagonal in an orthonormal basis, described by its closed
/// eigenvalue formula. Covers the dissipative heat case (lambda_k = -k^2)
/// and the unitary Schroedinger case (lambda_k = -i k^2).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiagonalGenerator {
    basis: BasisKind,
    truncation: usize,
}

impl DiagonalGenerator {
    pub fn heat_dirichlet(truncation: usize) -> Result<Self> {
        if truncation == 0 {
            return Err(Error::Domain("truncation level must be positive".into()));
        }
        Ok(Self {
            basis: BasisKind::DirichletSine,
            truncation,
        })
    }

    pub fn schrodinger_periodic(truncation: usize) -> Result<Self> {
        if truncation == 0 {
            return Err(Error::Domain("truncation level must be positive".into()));
        }
        Ok(Self {
            basis: BasisKind::PeriodicExponential,
            truncation,
        })
    }

    pub fn basis(&self) -> BasisKind {
        self.basis
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn mode_count(&self) -> usize {
        match self.basis {
            BasisKind::DirichletSine => self.truncation,
            BasisKind::PeriodicExponential => 2 * self.truncation + 1,
        }
    }

    /// Wavenumber of coefficient slot i.
    pub fn wavenumber(&self, slot: usize) -> i64 {
        match self.basis {
            BasisKind::DirichletSine => slot as i64 + 1,
            BasisKind::PeriodicExponential => slot as i64 - self.truncation as i64,
        }
    }

    pub fn eigenvalue_of_wavenumber(&self, k: i64) -> Complex64 {
        let k2 = (k * k) as f64;
        match self.basis {
            BasisKind::DirichletSine => Complex64::new(-k2, 0.0),
            BasisKind::PeriodicExponential => Complex64::new(0.0, -k2),
        }
    }

    pub fn eigenvalue(&self, slot: usize) -> Complex64 {
        self.eigenvalue_of_wavenumber(self.wavenumber(slot))
    }

    /// Bound ||S(t)|| <= Q e^{gamma t}: Q = 1 for diagonal normal
    /// generators, gamma = sup_k Re lambda_k.
    pub fn q(&self) -> f64 {
        1.0
    }

    pub fn gamma(&self) -> f64 {
        match self.basis {
            BasisKind::DirichletSine => -1.0,
            BasisKind::PeriodicExponential => 0.0,
        }
    }

    /// Whether S extends to a group (negative times allowed).
    pub fn is_group(&self) -> bool {
        matches!(self.basis, BasisKind::PeriodicExponential)
    }

    pub fn domain_length(&self) -> f64 {
        match self.basis {
            BasisKind::DirichletSine => PI,
            BasisKind::PeriodicExponential => 2.0 * PI,
        }
    }

    /// Q, gamma, and the boundary resolvent norm, packaged for the mild
    /// certificates.
    pub fn semigroup_constants(&self, spec: &PeriodicitySpec) -> Result<SemigroupConstants> {
        let rn = resolvent_norm(self, spec)?;
        SemigroupConstants::new(self.q(), self.gamma(), rn)
    }
}

/// Basis coefficients of a field; the state-space norm is the Euclidean
/// norm of the coefficients (orthonormal basis).
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub coefficients: Vec<Complex64>,
}

impl FieldState {
    pub fn zeros(len: usize) -> Self {
        Self {
            coefficients: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn norm(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn distance_to(&self, other: &FieldState) -> f64 {
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Coefficient-wise multiplication by e^{lambda_k t}.
pub fn semigroup_apply(gen: &DiagonalGenerator, t: f64, state: &FieldState) -> Result<FieldState> {
    if t < 0.0 && !gen.is_group() {
        return Err(Error::Domain(format!(
            "semigroup does not extend to negative time t = {t}"
        )));
    }
    let coefficients = state
        .coefficients
        .iter()
        .enumerate()
        .map(|(i, &c)| (gen.eigenvalue(i) * t).exp() * c)
        .collect();
    Ok(FieldState { coefficients })
}

fn distance_to_real_segment(c: Complex64, hi: f64) -> f64 {
    let x = c.re.clamp(0.0, hi);
    (c - Complex64::new(x, 0.0)).norm()
}

/// Period p <= 64 with e^{lambda_{k+p} omega} = e^{lambda_k omega} for all
/// k; exists when both 2 p omega and p^2 omega are multiples of 2 pi.
fn multiplier_cycle(omega: f64) -> Option<usize> {
    let two_pi = 2.0 * PI;
    let is_multiple = |v: f64| {
        let r = v / two_pi;
        (r - r.round()).abs() < 1e-9
    };
    (1..=64).find(|&p| {
        let p_f = p as f64;
        is_multiple(2.0 * p_f * omega) && is_multiple(p_f * p_f * omega)
    })
}

/// sup_k 1 / |c - e^{lambda_k omega}| over all modes of the full
/// (untruncated) generator, using the closed eigenvalue formula to control
/// the tail. Errors when some multiplier comes within the margin of c.
pub fn resolvent_norm(gen: &DiagonalGenerator, spec: &PeriodicitySpec) -> Result<f64> {
    resolvent_norm_with_margin(gen, spec, DEFAULT_MARGIN_TOL)
}

pub fn resolvent_norm_with_margin(
    gen: &DiagonalGenerator,
    spec: &PeriodicitySpec,
    margin: f64,
) -> Result<f64> {
    let omega = spec.omega;
    let c = spec.c;
    let mut min_distance = f64::INFINITY;
    let mut worst_multiplier = Complex64::new(0.0, 0.0);
    let mut consider = |mu: Complex64| {
        let d = (c - mu).norm();
        if d < min_distance {
            min_distance = d;
            worst_multiplier = mu;
        }
    };

    match gen.basis {
        BasisKind::DirichletSine => {
            for k in 1..=gen.truncation as i64 {
                consider((gen.eigenvalue_of_wavenumber(k) * omega).exp());
            }
            // All remaining multipliers are real points in (0, mu_{K+1}];
            // the distance to that segment bounds the whole tail, and its
            // infimum is attained in the k -> infinity limit at 0.
            let knext = gen.truncation as i64 + 1;
            let tail_hi = (gen.eigenvalue_of_wavenumber(knext).re * omega).exp();
            let tail_distance = distance_to_real_segment(c, tail_hi);
            if tail_distance < min_distance {
                min_distance = tail_distance;
                worst_multiplier = Complex64::new(c.re.clamp(0.0, tail_hi), 0.0);
            }
        }
        BasisKind::PeriodicExponential => match multiplier_cycle(omega) {
            Some(p) => {
                for k in 0..p as i64 {
                    consider((gen.eigenvalue_of_wavenumber(k) * omega).exp());
                }
            }
            None => {
                // No finite cycle detected: sample far beyond the
                // truncation; the sup is then exact only to sampling.
                let reach = (gen.truncation as i64).max(4096);
                for k in 0..=reach {
                    consider((gen.eigenvalue_of_wavenumber(k) * omega).exp());
                }
            }
        },
    }

    if min_distance <= margin {
        return Err(Error::Resonance {
            multiplier: worst_multiplier,
            distance: min_distance,
        });
    }
    Ok(1.0 / min_distance)
}

/// Scalar Green kernel of one mode: G_k(t,s) = c e^{lambda (t-s)} / (c - mu)
/// for s <= t, e^{lambda (omega+t-s)} / (c - mu) for s > t, mu = e^{lambda omega}.
pub fn mode_kernel(lambda: Complex64, spec: &PeriodicitySpec, t: f64, s: f64) -> Result<Complex64> {
    let omega = spec.omega;
    let mu = (lambda * omega).exp();
    let denom = spec.c - mu;
    if denom.norm() <= DEFAULT_MARGIN_TOL {
        return Err(Error::Resonance {
            multiplier: mu,
            distance: denom.norm(),
        });
    }
    let value = if s <= t {
        spec.c * (lambda * (t - s)).exp()
    } else {
        (lambda * (omega + t - s)).exp()
    };
    Ok(value / denom)
}

/// Precomputed basis evaluation on a uniform spatial grid, shared by the
/// forward and inverse transforms.
pub struct TransformPlan {
    gen: DiagonalGenerator,
    grid: Vec<f64>,
    /// basis[slot][j] = e_slot(x_j).
    basis: Vec<Vec<Complex64>>,
    /// Quadrature weight of each grid point.
    weight: f64,
}

impl TransformPlan {
    pub fn new(gen: &DiagonalGenerator, points: usize) -> Result<Self> {
        let needed = 2 * gen.truncation + 2;
        if points < needed {
            return Err(Error::Aliasing {
                needed,
                modes: gen.truncation,
                got: points,
            });
        }
        let (grid, weight): (Vec<f64>, f64) = match gen.basis {
            BasisKind::DirichletSine => (
                (1..=points).map(|j| j as f64 * PI / (points + 1) as f64).collect(),
                PI / (points + 1) as f64,
            ),
            BasisKind::PeriodicExponential => (
                (0..points).map(|j| 2.0 * PI * j as f64 / points as f64).collect(),
                2.0 * PI / points as f64,
            ),
        };
        let mut basis = Vec::with_capacity(gen.mode_count());
        for slot in 0..gen.mode_count() {
            let k = gen.wavenumber(slot);
            let row: Vec<Complex64> = grid
                .iter()
                .map(|&x| match gen.basis {
                    BasisKind::DirichletSine => {
                        Complex64::new((2.0 / PI).sqrt() * (k as f64 * x).sin(), 0.0)
                    }
                    BasisKind::PeriodicExponential => {
                        Complex64::from_polar(1.0 / (2.0 * PI).sqrt(), k as f64 * x)
                    }
                })
                .collect();
            basis.push(row);
        }
        Ok(Self {
            gen: *gen,
            grid,
            basis,
            weight,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn points(&self) -> usize {
        self.grid.len()
    }

    /// Coefficients -> samples on the grid.
    pub fn forward(&self, state: &FieldState) -> Vec<Complex64> {
        assert_eq!(state.coefficients.len(), self.gen.mode_count());
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for (slot, row) in self.basis.iter().enumerate() {
            let coef = state.coefficients[slot];
            if coef.norm_sqr() == 0.0 {
                continue;
            }
            for (o, b) in out.iter_mut().zip(row) {
                *o += coef * b;
            }
        }
        out
    }

    /// Samples -> coefficients by discrete orthonormal projection; exact
    /// inverse of `forward` for resolvable bandwidths.
    pub fn inverse(&self, samples: &[Complex64]) -> FieldState {
        assert_eq!(samples.len(), self.grid.len());
        let coefficients = self
            .basis
            .iter()
            .map(|row| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (b, s) in row.iter().zip(samples) {
                    acc += b.conj() * s;
                }
                self.weight * acc
            })
            .collect();
        FieldState { coefficients }
    }
}

/// One-shot forward transform; builds a plan internally.
pub fn grid_transform(
    gen: &DiagonalGenerator,
    state: &FieldState,
    points: usize,
) -> Result<Vec<Complex64>> {
    Ok(TransformPlan::new(gen, points)?.forward(state))
}

/// One-shot inverse transform; builds a plan internally.
pub fn grid_transform_inverse(
    gen: &DiagonalGenerator,
    samples: &[Complex64],
) -> Result<FieldState> {
    Ok(TransformPlan::new(gen, samples.len())?.inverse(samples))
}
