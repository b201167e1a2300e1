//! Existence/uniqueness certificates. Each routine assembles the relevant
//! operator and nonlinearity constants, compares a contraction-type
//! quantity against one, and records every number it used so reports can
//! be audited.

use crate::error::{Error, Result};
use crate::kernels::{GreenKernelODE, PeriodicitySpec, QuadratureSpec};
use crate::nonlin::{NonlinearitySpec, StateNorm};
use std::collections::BTreeMap;

/// Samples used for sup_t ||g(t,0)|| when no quadrature spec is in scope.
const FORCING_SAMPLES: usize = 257;

/// Margin below one demanded before declaring a strict inequality to hold.
const VERDICT_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateKind {
    /// Lipschitz contraction of the integral operator; unique solution.
    Contraction,
    /// Affine growth plus a fixed-point argument; existence only.
    Growth,
    /// Semigroup variant of the contraction certificate.
    MildContraction,
    /// Semigroup variant of the growth certificate.
    MildGrowth,
}

impl CertificateKind {
    pub fn label(self) -> &'static str {
        match self {
            CertificateKind::Contraction => "contraction",
            CertificateKind::Growth => "growth",
            CertificateKind::MildContraction => "mild_contraction",
            CertificateKind::MildGrowth => "mild_growth",
        }
    }

    pub fn unique(self) -> bool {
        matches!(
            self,
            CertificateKind::Contraction | CertificateKind::MildContraction
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Failed(String),
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::Certified)
    }
}

/// Which estimate of the integral-operator norm M backs the certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorNormRoute {
    /// Direct two-dimensional scan of max_t of the kernel row integral.
    Exact,
    /// Closed-form bound via e^{||A|| omega}.
    ExponentialBound,
    /// max{|c|,1} times the integral of ||e^{As} R||.
    IntegralBound,
}

impl OperatorNormRoute {
    pub fn label(self) -> &'static str {
        match self {
            OperatorNormRoute::Exact => "exact",
            OperatorNormRoute::ExponentialBound => "exponential_bound",
            OperatorNormRoute::IntegralBound => "integral_bound",
        }
    }
}

/// Constants of a semigroup bound ||S(t)|| <= Q e^{gamma t} together with
/// the boundary resolvent norm ||(cI - S(omega))^{-1}||.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemigroupConstants {
    pub q: f64,
    pub gamma: f64,
    pub resolvent_norm: f64,
}

impl SemigroupConstants {
    pub fn new(q: f64, gamma: f64, resolvent_norm: f64) -> Result<Self> {
        if !(q >= 1.0) || !q.is_finite() {
            return Err(Error::Domain(format!("semigroup constant Q must be >= 1, got {q}")));
        }
        if !gamma.is_finite() {
            return Err(Error::NonFinite);
        }
        if !(resolvent_norm > 0.0) || !resolvent_norm.is_finite() {
            return Err(Error::Domain(format!(
                "resolvent norm must be positive, got {resolvent_norm}"
            )));
        }
        Ok(Self {
            q,
            gamma,
            resolvent_norm,
        })
    }

    /// The operator-norm constant U of the mild integral operator.
    pub fn mild_operator_norm(&self, spec: &PeriodicitySpec) -> f64 {
        let omega = spec.omega;
        let scale = self.resolvent_norm * spec.c.norm().max(1.0);
        if self.gamma.abs() < 1e-12 {
            self.q * omega * scale
        } else {
            self.q * ((self.gamma * omega).exp() - 1.0) / self.gamma * scale
        }
    }
}

/// A priori growth bound Q (||y0|| + g1 omega e^{|gamma| omega})
/// e^{(Q g2 + gamma) t} for mild solutions on [0, omega].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GronwallBound {
    pub q: f64,
    pub gamma: f64,
    pub g1: f64,
    pub g2: f64,
    pub omega: f64,
}

impl GronwallBound {
    pub fn eval(&self, y0_norm: f64, t: f64) -> f64 {
        self.q
            * (y0_norm + self.g1 * self.omega * (self.gamma.abs() * self.omega).exp())
            * ((self.q * self.g2 + self.gamma) * t).exp()
    }
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub verdict: Verdict,
    /// Every constant entering the decision, keyed by a stable name.
    pub constants: BTreeMap<String, f64>,
    pub inputs_digest: String,
    pub m_route: Option<OperatorNormRoute>,
    pub gronwall: Option<GronwallBound>,
    /// Set when the argument needs a finite-dimensional state space.
    pub finite_dim_assumed: bool,
}

impl Certificate {
    pub fn constant(&self, key: &str) -> Option<f64> {
        self.constants.get(key).copied()
    }

    /// Sup-norm bound on the certified solution, when one was established.
    pub fn solution_bound(&self) -> Option<f64> {
        self.constant("bound")
    }
}

fn verdict_against_one(value: f64, what: &str) -> Verdict {
    if value < 1.0 - VERDICT_SLACK {
        Verdict::Certified
    } else if value <= 1.0 + VERDICT_SLACK {
        Verdict::Failed(format!("boundary case: {what} = {value} is not strictly below one"))
    } else {
        Verdict::Failed(format!("{what} = {value} >= 1"))
    }
}

fn check_ode_compatibility(kernel: &GreenKernelODE, g: &NonlinearitySpec) -> Result<()> {
    if g.dim != kernel.dim() {
        return Err(Error::Dimension {
            expected: kernel.dim(),
            got: g.dim,
        });
    }
    match &g.norm {
        StateNorm::Vector(kind) if *kind == kernel.spec().norm => Ok(()),
        StateNorm::Vector(kind) => Err(Error::Precondition(format!(
            "nonlinearity norm {kind} differs from kernel norm {}",
            kernel.spec().norm
        ))),
        StateNorm::WeightedL2 { .. } => Err(Error::Precondition(
            "weighted-L2 state norm is not valid for a matrix kernel certificate".into(),
        )),
    }
}

fn operator_norm_for_route(
    kernel: &GreenKernelODE,
    quad: &QuadratureSpec,
    route: OperatorNormRoute,
) -> Result<f64> {
    Ok(match route {
        OperatorNormRoute::Exact => kernel.operator_norm(quad).value,
        OperatorNormRoute::ExponentialBound => kernel.norm_bound_exponential()?,
        OperatorNormRoute::IntegralBound => kernel.norm_bound_integral(quad),
    })
}

/// Unique-solution certificate for the matrix problem: L M < 1 with bound
/// M ||g(.,0)||_0 / (1 - L M).
pub fn certify_contraction(
    kernel: &GreenKernelODE,
    g: &NonlinearitySpec,
    quad: &QuadratureSpec,
    route: OperatorNormRoute,
) -> Result<Certificate> {
    check_ode_compatibility(kernel, g)?;
    quad.validate()?;
    let lipschitz = g.lipschitz.ok_or(Error::MissingConstant("lipschitz"))?;
    let m = operator_norm_for_route(kernel, quad, route)?;
    let contraction = lipschitz * m;
    let forcing_sup = g.forcing_sup(kernel.spec().omega, quad.t_samples);

    let mut constants = BTreeMap::new();
    constants.insert("lipschitz".into(), lipschitz);
    constants.insert("op_norm".into(), m);
    constants.insert("contraction".into(), contraction);
    constants.insert("forcing_sup".into(), forcing_sup);
    let verdict = verdict_against_one(contraction, "L*M");
    if verdict.is_certified() {
        constants.insert("bound".into(), m * forcing_sup / (1.0 - contraction));
    }
    Ok(Certificate {
        kind: CertificateKind::Contraction,
        verdict,
        constants,
        inputs_digest: format!("{} | g={}", kernel.digest(), g.label),
        m_route: Some(route),
        gronwall: None,
        finite_dim_assumed: false,
    })
}

/// Existence certificate for the matrix problem under affine growth:
/// g2 M < 1 with bound M g1 / (1 - g2 M). The fixed-point argument relies
/// on finite dimension, which holds for matrix problems by construction.
pub fn certify_growth(
    kernel: &GreenKernelODE,
    g: &NonlinearitySpec,
    quad: &QuadratureSpec,
    route: OperatorNormRoute,
) -> Result<Certificate> {
    check_ode_compatibility(kernel, g)?;
    quad.validate()?;
    let (g1, g2) = g.growth.ok_or(Error::MissingConstant("growth"))?;
    let m = operator_norm_for_route(kernel, quad, route)?;
    let condition = g2 * m;

    let mut constants = BTreeMap::new();
    constants.insert("growth_g1".into(), g1);
    constants.insert("growth_g2".into(), g2);
    constants.insert("op_norm".into(), m);
    constants.insert("contraction".into(), condition);
    let verdict = verdict_against_one(condition, "g2*M");
    if verdict.is_certified() {
        constants.insert("bound".into(), m * g1 / (1.0 - condition));
    }
    Ok(Certificate {
        kind: CertificateKind::Growth,
        verdict,
        constants,
        inputs_digest: format!("{} | g={}", kernel.digest(), g.label),
        m_route: Some(route),
        gronwall: None,
        finite_dim_assumed: true,
    })
}

/// Unique-mild-solution certificate: L U < 1 with bound
/// U ||g(.,0)||_0 / (1 - L U), where U is the semigroup analogue of M.
pub fn certify_mild_contraction(
    sg: &SemigroupConstants,
    spec: &PeriodicitySpec,
    g: &NonlinearitySpec,
) -> Result<Certificate> {
    let lipschitz = g.lipschitz.ok_or(Error::MissingConstant("lipschitz"))?;
    let u = sg.mild_operator_norm(spec);
    let contraction = lipschitz * u;
    let forcing_sup = g.forcing_sup(spec.omega, FORCING_SAMPLES);

    let mut constants = BTreeMap::new();
    constants.insert("q".into(), sg.q);
    constants.insert("gamma".into(), sg.gamma);
    constants.insert("resolvent_norm".into(), sg.resolvent_norm);
    constants.insert("op_norm_mild".into(), u);
    constants.insert("lipschitz".into(), lipschitz);
    constants.insert("contraction".into(), contraction);
    constants.insert("forcing_sup".into(), forcing_sup);
    let verdict = verdict_against_one(contraction, "L*U");
    if verdict.is_certified() {
        constants.insert("bound".into(), u * forcing_sup / (1.0 - contraction));
    }
    Ok(Certificate {
        kind: CertificateKind::MildContraction,
        verdict,
        constants,
        inputs_digest: format!(
            "semigroup Q={} gamma={} Rn={} | omega={} c={}+{}i | g={}",
            sg.q, sg.gamma, sg.resolvent_norm, spec.omega, spec.c.re, spec.c.im, g.label
        ),
        m_route: None,
        gronwall: None,
        finite_dim_assumed: false,
    })
}

/// Existence certificate for mild solutions of compact semigroups:
/// Q Rn e^{gamma omega} (e^{Q g2 omega} - 1) < 1, with the invariant-ball
/// radius recorded as `xi_radius` and the a priori growth bound attached.
pub fn certify_mild_growth(
    sg: &SemigroupConstants,
    spec: &PeriodicitySpec,
    g: &NonlinearitySpec,
) -> Result<Certificate> {
    let (g1, g2) = g.growth.ok_or(Error::MissingConstant("growth"))?;
    let omega = spec.omega;
    let rn = sg.resolvent_norm;
    let q = sg.q;
    let gamma = sg.gamma;
    let lhs = q * rn * (gamma * omega).exp() * ((q * g2 * omega).exp() - 1.0);

    let mut constants = BTreeMap::new();
    constants.insert("q".into(), q);
    constants.insert("gamma".into(), gamma);
    constants.insert("resolvent_norm".into(), rn);
    constants.insert("growth_g1".into(), g1);
    constants.insert("growth_g2".into(), g2);
    constants.insert("eq1_lhs".into(), lhs);
    let verdict = verdict_against_one(lhs, "mild growth condition");
    if verdict.is_certified() {
        let e_abs = (gamma.abs() * omega).exp();
        let xi = q * rn * (g1 * e_abs * omega
            + (gamma * omega).exp() * q * g1 * omega * e_abs * ((q * g2 * omega).exp() - 1.0))
            / (1.0 - lhs);
        constants.insert("xi_radius".into(), xi);
    }
    Ok(Certificate {
        kind: CertificateKind::MildGrowth,
        verdict,
        constants,
        inputs_digest: format!(
            "semigroup Q={} gamma={} Rn={} | omega={} c={}+{}i | g={}",
            sg.q, sg.gamma, sg.resolvent_norm, spec.omega, spec.c.re, spec.c.im, g.label
        ),
        m_route: None,
        gronwall: Some(GronwallBound {
            q,
            gamma,
            g1,
            g2,
            omega,
        }),
        finite_dim_assumed: false,
    })
}
