//! Green kernel for the boundary-value problem y' = Ay + f with
//! y(omega) = c y(0), and the norm constant M of the induced integral
//! operator together with its two closed-form upper bounds.

use crate::error::{Error, Result};
use crate::linalg::{
    induced_norm, matrix_exponential, nonresonance_resolvent, ComplexMatrix, NormKind,
    DEFAULT_MARGIN_TOL,
};
use crate::quad::{adaptive_integrate, golden_section_max};
use num_complex::Complex64;

/// The pair (omega, c) defining y(t + omega) = c y(t), plus the norm used
/// for all operator estimates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodicitySpec {
    pub omega: f64,
    pub c: Complex64,
    pub norm: NormKind,
}

impl PeriodicitySpec {
    pub fn new(omega: f64, c: Complex64, norm: NormKind) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::Domain(format!("omega must be positive, got {omega}")));
        }
        if c.norm() == 0.0 || !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::Domain("multiplier c must be nonzero and finite".into()));
        }
        Ok(Self { omega, c, norm })
    }
}

/// Discretization parameters: base Gauss panels per smooth branch of the
/// s-integral (bisected adaptively where the norm integrand kinks), nodes
/// per panel, and the t-sample count for the outer max.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub t_samples: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panels: 16,
            nodes_per_panel: 8,
            t_samples: 129,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.panels < 1 || self.nodes_per_panel < 2 || self.t_samples < 2 {
            return Err(Error::Domain(format!(
                "quadrature spec out of range: panels={} nodes_per_panel={} t_samples={}",
                self.panels, self.nodes_per_panel, self.t_samples
            )));
        }
        Ok(())
    }
}

/// Piecewise kernel
///   K(t,s) = c e^{A(t-s)} R          for s in [0, t],
///   K(t,s) = e^{A(omega+t-s)} R      for s in (t, omega],
/// with R = (cI - e^{A omega})^{-1}. The jump at s = t equals the identity.
#[derive(Clone, Debug)]
pub struct GreenKernelODE {
    a: ComplexMatrix,
    spec: PeriodicitySpec,
    exp_omega: ComplexMatrix,
    resolvent: ComplexMatrix,
}

/// Value and argmax of max_t of the integral of ||K(t, .)||.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorNormEstimate {
    pub value: f64,
    pub argmax_t: f64,
}

impl GreenKernelODE {
    pub fn new(a: ComplexMatrix, spec: PeriodicitySpec) -> Result<Self> {
        Self::with_margin(a, spec, DEFAULT_MARGIN_TOL)
    }

    pub fn with_margin(a: ComplexMatrix, spec: PeriodicitySpec, margin_tol: f64) -> Result<Self> {
        let resolvent = nonresonance_resolvent(&a, spec.omega, spec.c, margin_tol)?;
        let exp_omega = matrix_exponential(&a, spec.omega)?;
        Ok(Self {
            a,
            spec,
            exp_omega,
            resolvent,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn spec(&self) -> &PeriodicitySpec {
        &self.spec
    }

    pub fn exp_omega(&self) -> &ComplexMatrix {
        &self.exp_omega
    }

    pub fn resolvent(&self) -> &ComplexMatrix {
        &self.resolvent
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// e^{A u} R for u >= 0; shared factor of both kernel branches.
    pub fn propagated_resolvent(&self, u: f64) -> Result<ComplexMatrix> {
        Ok(matrix_exponential(&self.a, u)?.mul(&self.resolvent))
    }

    /// Kernel value K(t, s). At s = t exactly the first branch applies.
    pub fn at(&self, t: f64, s: f64) -> Result<ComplexMatrix> {
        let omega = self.spec.omega;
        let tol = 1e-12 * omega;
        if !(-tol..=omega + tol).contains(&t) || !(-tol..=omega + tol).contains(&s) {
            return Err(Error::Domain(format!(
                "kernel arguments (t={t}, s={s}) outside [0, {omega}]"
            )));
        }
        if s <= t {
            Ok(self.propagated_resolvent(t - s)?.scale(self.spec.c))
        } else {
            self.propagated_resolvent(omega + t - s)
        }
    }

    /// Integral of ||K(t, s)|| ds, split at s = t into two composite
    /// Gauss sums so no panel straddles the jump; panels are bisected
    /// adaptively because the norm integrand has kinks wherever singular
    /// values cross or the maximal column or row switches.
    pub fn row_norm_integral(&self, t: f64, quad: &QuadratureSpec) -> f64 {
        let omega = self.spec.omega;
        let norm = self.spec.norm;
        let c_abs = self.spec.c.norm();
        let mut total = 0.0;
        if t > 0.0 {
            total += c_abs
                * adaptive_integrate(
                    |s| {
                        induced_norm(
                            &self.propagated_resolvent(t - s).expect("finite kernel"),
                            norm,
                        )
                    },
                    0.0,
                    t,
                    quad.panels,
                    quad.nodes_per_panel,
                );
        }
        if t < omega {
            total += adaptive_integrate(
                |s| {
                    induced_norm(
                        &self.propagated_resolvent(omega + t - s).expect("finite kernel"),
                        norm,
                    )
                },
                t,
                omega,
                quad.panels,
                quad.nodes_per_panel,
            );
        }
        total
    }

    /// M = max over t in [0, omega] of the integral of ||K(t, s)|| ds,
    /// scanned on a uniform t-grid and refined by golden-section search
    /// around the discrete argmax.
    pub fn operator_norm(&self, quad: &QuadratureSpec) -> OperatorNormEstimate {
        let omega = self.spec.omega;
        let samples = quad.t_samples.max(2);
        let mut best = (0usize, f64::NEG_INFINITY);
        let mut values = Vec::with_capacity(samples);
        for i in 0..samples {
            let t = omega * i as f64 / (samples - 1) as f64;
            let v = self.row_norm_integral(t, quad);
            values.push(v);
            if v > best.1 {
                best = (i, v);
            }
        }
        let lo = if best.0 == 0 {
            0.0
        } else {
            omega * (best.0 - 1) as f64 / (samples - 1) as f64
        };
        let hi = if best.0 + 1 >= samples {
            omega
        } else {
            omega * (best.0 + 1) as f64 / (samples - 1) as f64
        };
        let (x, v) = golden_section_max(
            |t| self.row_norm_integral(t, quad),
            lo,
            hi,
            1e-10 * omega.max(1.0),
        );
        if v >= best.1 {
            OperatorNormEstimate {
                value: v,
                argmax_t: x,
            }
        } else {
            OperatorNormEstimate {
                value: best.1,
                argmax_t: omega * best.0 as f64 / (samples - 1) as f64,
            }
        }
    }

    /// Closed-form exponential bound
    ///   (e^{||A|| omega} - 1)/||A|| * max{ |c| ||R||, ||R e^{A omega}|| / e^{||A|| omega} }.
    /// Undefined when ||A|| = 0; callers should fall back to the integral bound.
    pub fn norm_bound_exponential(&self) -> Result<f64> {
        let norm = self.spec.norm;
        let a_norm = induced_norm(&self.a, norm);
        if a_norm == 0.0 {
            return Err(Error::DegenerateInput(
                "exponential norm bound undefined for ||A|| = 0".into(),
            ));
        }
        let omega = self.spec.omega;
        let growth = ((a_norm * omega).exp() - 1.0) / a_norm;
        let r_norm = induced_norm(&self.resolvent, norm);
        let re_norm = induced_norm(&self.resolvent.mul(&self.exp_omega), norm);
        let factor = (self.spec.c.norm() * r_norm).max(re_norm / (a_norm * omega).exp());
        Ok(growth * factor)
    }

    /// Integral bound max{|c|, 1} * integral of ||e^{A s} R|| ds over [0, omega].
    pub fn norm_bound_integral(&self, quad: &QuadratureSpec) -> f64 {
        let omega = self.spec.omega;
        let norm = self.spec.norm;
        let integral = adaptive_integrate(
            |s| induced_norm(&self.propagated_resolvent(s).expect("finite kernel"), norm),
            0.0,
            omega,
            quad.panels,
            quad.nodes_per_panel,
        );
        self.spec.c.norm().max(1.0) * integral
    }

    pub fn digest(&self) -> String {
        format!(
            "ode dim={} omega={} c={}+{}i norm={}",
            self.dim(),
            self.spec.omega,
            self.spec.c.re,
            self.spec.c.im,
            self.spec.norm
        )
    }
}
