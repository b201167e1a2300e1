//! Nonlinearity descriptions: an evaluation map together with declared
//! Lipschitz and affine-growth constants, plus the built-in right-hand
//! sides used by the command-line tool and the test suite.

use crate::kernels::QuadratureSpec;
use crate::linalg::{vector_norm, NormKind};
use crate::quad::{golden_section_max, CompositeRule};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Norm on the state vector: a plain vector norm, or a quadrature-weighted
/// L2 norm for states sampling a function on spatial nodes.
#[derive(Clone, Debug)]
pub enum StateNorm {
    Vector(NormKind),
    WeightedL2 { weights: Vec<f64> },
}

impl StateNorm {
    pub fn eval(&self, v: &[Complex64]) -> f64 {
        match self {
            StateNorm::Vector(kind) => vector_norm(v, *kind),
            StateNorm::WeightedL2 { weights } => {
                assert_eq!(weights.len(), v.len(), "weight/state length mismatch");
                weights
                    .iter()
                    .zip(v)
                    .map(|(w, z)| w * z.norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            }
        }
    }
}

type EvalFn = Box<dyn Fn(f64, &[Complex64]) -> Vec<Complex64> + Send + Sync>;

/// A nonlinearity g(t, y) together with the constants the certificates
/// consume. `lipschitz` bounds ||g(t,x) - g(t,y)|| by L ||x - y||;
/// `growth` = (g1, g2) bounds ||g(t,y)|| by g1 + g2 ||y||, both uniformly
/// in t. Either may be absent when the corresponding certificate does not
/// apply.
pub struct NonlinearitySpec {
    pub dim: usize,
    pub lipschitz: Option<f64>,
    pub growth: Option<(f64, f64)>,
    pub periodicity_compatible: bool,
    pub norm: StateNorm,
    pub complex_state: bool,
    pub label: String,
    eval: EvalFn,
}

impl std::fmt::Debug for NonlinearitySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NonlinearitySpec")
            .field("dim", &self.dim)
            .field("lipschitz", &self.lipschitz)
            .field("growth", &self.growth)
            .field("periodicity_compatible", &self.periodicity_compatible)
            .field("complex_state", &self.complex_state)
            .field("label", &self.label)
            .finish()
    }
}

impl NonlinearitySpec {
    pub fn new(
        dim: usize,
        norm: StateNorm,
        complex_state: bool,
        label: impl Into<String>,
        eval: impl Fn(f64, &[Complex64]) -> Vec<Complex64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            lipschitz: None,
            growth: None,
            periodicity_compatible: false,
            norm,
            complex_state,
            label: label.into(),
            eval: Box::new(eval),
        }
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }

    pub fn with_growth(mut self, g1: f64, g2: f64) -> Self {
        self.growth = Some((g1, g2));
        self
    }

    pub fn with_periodicity(mut self, compatible: bool) -> Self {
        self.periodicity_compatible = compatible;
        self
    }

    pub fn eval(&self, t: f64, y: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(y.len(), self.dim);
        (self.eval)(t, y)
    }

    pub fn state_norm(&self, v: &[Complex64]) -> f64 {
        self.norm.eval(v)
    }

    /// sup over t in [0, omega] of ||g(t, 0)||, by a uniform scan refined
    /// with golden-section search around the discrete argmax.
    pub fn forcing_sup(&self, omega: f64, samples: usize) -> f64 {
        let zero = vec![Complex64::new(0.0, 0.0); self.dim];
        let value = |t: f64| self.state_norm(&self.eval(t, &zero));
        let n = samples.max(3);
        let mut best = (0usize, f64::NEG_INFINITY);
        for i in 0..n {
            let t = omega * i as f64 / (n - 1) as f64;
            let v = value(t);
            if v > best.1 {
                best = (i, v);
            }
        }
        let lo = omega * best.0.saturating_sub(1) as f64 / (n - 1) as f64;
        let hi = omega * (best.0 + 1).min(n - 1) as f64 / (n - 1) as f64;
        let (_, refined) = golden_section_max(value, lo, hi, 1e-12 * omega.max(1.0));
        refined.max(best.1)
    }

    /// Largest observed ||g(t,x) - g(t,y)|| / ||x - y|| over random pairs
    /// in the ball of the given radius, t in [0, 2 omega]. A lower bound
    /// on the true Lipschitz constant; used to sanity-check declarations.
    pub fn observed_lipschitz(&self, omega: f64, radius: f64, trials: usize, seed: u64) -> f64 {
        let mut rng = SplitMix64::new(seed);
        let mut best: f64 = 0.0;
        for _ in 0..trials {
            let t = 2.0 * omega * rng.next_f64();
            let x = self.random_state(&mut rng, radius);
            let y = self.random_state(&mut rng, radius);
            let diff: Vec<Complex64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            let denom = self.state_norm(&diff);
            if denom < 1e-12 {
                continue;
            }
            let gx = self.eval(t, &x);
            let gy = self.eval(t, &y);
            let gdiff: Vec<Complex64> = gx.iter().zip(&gy).map(|(a, b)| a - b).collect();
            best = best.max(self.state_norm(&gdiff) / denom);
        }
        best
    }

    /// Largest observed ||g(t,y)|| - g1 - g2 ||y|| over random samples;
    /// nonpositive (up to roundoff) when the declared growth pair is valid
    /// on the sampled ball.
    pub fn growth_excess(&self, omega: f64, radius: f64, trials: usize, seed: u64) -> f64 {
        let (g1, g2) = self.growth.unwrap_or((f64::INFINITY, 0.0));
        let mut rng = SplitMix64::new(seed);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..trials {
            let t = 2.0 * omega * rng.next_f64();
            let y = self.random_state(&mut rng, radius);
            let gy = self.eval(t, &y);
            worst = worst.max(self.state_norm(&gy) - g1 - g2 * self.state_norm(&y));
        }
        worst
    }

    fn random_state(&self, rng: &mut SplitMix64, radius: f64) -> Vec<Complex64> {
        (0..self.dim)
            .map(|_| {
                let re = radius * (2.0 * rng.next_f64() - 1.0);
                let im = if self.complex_state {
                    radius * (2.0 * rng.next_f64() - 1.0)
                } else {
                    0.0
                };
                Complex64::new(re, im)
            })
            .collect()
    }
}

/// max over random (t, y) of ||g(t + omega, c y) - c g(t, y)||; zero for
/// nonlinearities compatible with the boundary multiplier c.
pub fn periodicity_residual(
    g: &NonlinearitySpec,
    omega: f64,
    c: Complex64,
    trials: usize,
    seed: u64,
) -> f64 {
    let mut rng = SplitMix64::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let t = 2.0 * omega * rng.next_f64();
        let y = g.random_state(&mut rng, 3.0);
        let shifted: Vec<Complex64> = y.iter().map(|z| c * z).collect();
        let lhs = g.eval(t + omega, &shifted);
        let rhs = g.eval(t, &y);
        let diff: Vec<Complex64> = lhs.iter().zip(&rhs).map(|(a, b)| a - c * b).collect();
        worst = worst.max(g.state_norm(&diff));
    }
    worst
}

/// Deterministic 64-bit generator (splitmix64) so sampled diagnostics are
/// reproducible without external dependencies.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Planar system g(t,y) = a (sin t cos(y1+y2), cos 2t sin(y1-y2)),
/// compatible with (omega, c) = (pi, -1). Lipschitz and growth constants
/// depend on the chosen vector norm.
pub fn planar_trig(a: f64, norm: NormKind) -> NonlinearitySpec {
    let (lipschitz, g1) = match norm {
        NormKind::L1 => (2.0 * a.abs(), 2.0 * a.abs()),
        NormKind::LInf => (2.0 * a.abs(), a.abs()),
        NormKind::L2 => (std::f64::consts::SQRT_2 * a.abs(), std::f64::consts::SQRT_2 * a.abs()),
    };
    NonlinearitySpec::new(
        2,
        StateNorm::Vector(norm),
        false,
        "planar_trig",
        move |t, y| {
            let (u, v) = (y[0].re, y[1].re);
            vec![
                Complex64::new(a * t.sin() * (u + v).cos(), 0.0),
                Complex64::new(a * (2.0 * t).cos() * (u - v).sin(), 0.0),
            ]
        },
    )
    .with_lipschitz(lipschitz)
    .with_growth(g1, 0.0)
    .with_periodicity(true)
}

/// Planar system g(t,y) = (a sin t (|y1+y2| + 1), a cos t |y1-y2|),
/// compatible with (omega, c) = (pi, -1). Only growth constants are
/// declared; the certificates that need a Lipschitz constant do not apply.
pub fn planar_abs_forced(a: f64, norm: NormKind) -> NonlinearitySpec {
    let (g1, g2) = match norm {
        NormKind::L1 => (a.abs(), std::f64::consts::SQRT_2 * a.abs()),
        NormKind::LInf => (a.abs(), 2.0 * a.abs()),
        NormKind::L2 => (std::f64::consts::SQRT_2 * a.abs(), 2.0 * a.abs()),
    };
    NonlinearitySpec::new(
        2,
        StateNorm::Vector(norm),
        false,
        "planar_abs_forced",
        move |t, y| {
            let (u, v) = (y[0].re, y[1].re);
            vec![
                Complex64::new(a * t.sin() * ((u + v).abs() + 1.0), 0.0),
                Complex64::new(a * t.cos() * (u - v).abs(), 0.0),
            ]
        },
    )
    .with_growth(g1, g2)
    .with_periodicity(true)
}

/// Pointwise right-hand sides for the field problems: (t, x, u) -> g value.
pub type PointwiseNonlinearity = Box<dyn Fn(f64, f64, Complex64) -> Complex64 + Send + Sync>;

/// g(t, u)(x) = a sin t - eta u^3 / (u^2 + 1), the forced cubic heat
/// nonlinearity on (0, pi) with Dirichlet conditions; real state.
pub fn heat_cubic_pointwise(a: f64, eta: f64) -> PointwiseNonlinearity {
    Box::new(move |t: f64, _x: f64, u: Complex64| {
        let v = u.re;
        Complex64::new(a * t.sin() - eta * v * v * v / (v * v + 1.0), 0.0)
    })
}

/// g(t, u)(x) = i a (1 + sin^2 x) e^{i t / 4} - i |u|^2 u / (5 (|u|^2 + 1)),
/// the forced cubic Schroedinger nonlinearity on (0, 2 pi), periodic.
pub fn schrodinger_cubic_pointwise(a: Complex64) -> PointwiseNonlinearity {
    let i = Complex64::new(0.0, 1.0);
    Box::new(move |t: f64, x: f64, u: Complex64| {
        let s = x.sin();
        let forcing = a * (1.0 + s * s) * (i * (t / 4.0)).exp();
        let m = u.norm_sqr();
        i * (forcing - u * m / (5.0 * (m + 1.0)))
    })
}

/// Gauss nodes and weights on (0, len) used to sample field states for the
/// certificate estimates; the weighted-L2 state norm then reproduces the
/// continuum L2 norm of smooth fields to quadrature accuracy.
pub fn field_sampling(len: f64, quad: &QuadratureSpec) -> (Vec<f64>, Vec<f64>) {
    let rule = CompositeRule::new(0.0, len, quad.panels, quad.nodes_per_panel);
    (rule.nodes, rule.weights)
}

fn field_spec(
    len: f64,
    quad: &QuadratureSpec,
    complex_state: bool,
    label: &str,
    pointwise: PointwiseNonlinearity,
) -> NonlinearitySpec {
    let (nodes, weights) = field_sampling(len, quad);
    let dim = nodes.len();
    NonlinearitySpec::new(
        dim,
        StateNorm::WeightedL2 { weights },
        complex_state,
        label,
        move |t, y| {
            nodes
                .iter()
                .zip(y)
                .map(|(&x, &u)| pointwise(t, x, u))
                .collect()
        },
    )
}

/// Certificate-facing form of the cubic heat nonlinearity: field values on
/// Gauss nodes in (0, pi), weighted-L2 norm. Lipschitz constant 9 eta / 8,
/// growth pair (|a| sqrt(pi), eta).
pub fn heat_cubic(a: f64, eta: f64, quad: &QuadratureSpec) -> NonlinearitySpec {
    field_spec(PI, quad, false, "heat_cubic", heat_cubic_pointwise(a, eta))
        .with_lipschitz(9.0 * eta / 8.0)
        .with_growth(a.abs() * PI.sqrt(), eta)
        .with_periodicity(true)
}

/// Certificate-facing form of the cubic Schroedinger nonlinearity: field
/// values on Gauss nodes in (0, 2 pi), weighted-L2 norm. Lipschitz constant
/// 9/40, growth pair (|a| sqrt(19 pi) / 2, 1/5).
pub fn schrodinger_cubic(a: Complex64, quad: &QuadratureSpec) -> NonlinearitySpec {
    field_spec(
        2.0 * PI,
        quad,
        true,
        "schrodinger_cubic",
        schrodinger_cubic_pointwise(a),
    )
    .with_lipschitz(9.0 / 40.0)
    .with_growth(a.norm() * (19.0 * PI).sqrt() / 2.0, 0.2)
    .with_periodicity(true)
}

/// max over u >= 0 of |f'(u)| by central differences on a scan grid plus
/// golden-section refinement.
fn scalar_derivative_max(f: impl Fn(f64) -> f64 + Copy, hi: f64, grid: usize) -> f64 {
    let slope = move |u: f64| {
        let h = 1e-5 * u.abs().max(1.0);
        ((f(u + h) - f(u - h)) / (2.0 * h)).abs()
    };
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..grid {
        let u = hi * i as f64 / (grid - 1) as f64;
        let v = slope(u);
        if v > best.1 {
            best = (i, v);
        }
    }
    let lo_u = hi * best.0.saturating_sub(1) as f64 / (grid - 1) as f64;
    let hi_u = hi * (best.0 + 1).min(grid - 1) as f64 / (grid - 1) as f64;
    let (_, refined) = golden_section_max(slope, lo_u, hi_u, 1e-12);
    refined.max(best.1)
}

/// Numerically recovered Lipschitz constant of u -> eta u^3 / (u^2 + 1);
/// equals 9 eta / 8 (attained at u = sqrt 3).
pub fn heat_cubic_derivative_max(eta: f64) -> f64 {
    scalar_derivative_max(move |u| eta * u * u * u / (u * u + 1.0), 12.0, 4001)
}

/// Numerically recovered Lipschitz constant of the cubic Schroedinger
/// nonlinear term along its worst real slice u -> u^3 / (5 (u^2 + 1));
/// equals 9/40 (attained at u = sqrt 3).
pub fn schrodinger_cubic_derivative_max() -> f64 {
    scalar_derivative_max(|u| u * u * u / (5.0 * (u * u + 1.0)), 12.0, 4001)
}
