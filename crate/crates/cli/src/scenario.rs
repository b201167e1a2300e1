//! Scenario files: the JSON data model, validation with precise error
//! messages, and construction of the core problem/nonlinearity objects.

use crate::expr::{self, NameTable};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use wcperiod_core::certificates::SemigroupConstants;
use wcperiod_core::nonlin::StateNorm;
use wcperiod_core::{
    heat_cubic, heat_cubic_pointwise, planar_abs_forced, planar_trig, schrodinger_cubic,
    schrodinger_cubic_pointwise, ComplexMatrix, DiagonalGenerator, GreenKernelODE, NonlinearitySpec,
    NormKind, PeriodicitySpec, PointwiseNonlinearity, QuadratureSpec,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub problem: Problem,
    pub omega: f64,
    /// Boundary multiplier as [re, im].
    pub c: [f64; 2],
    pub norm: NormName,
    pub nonlinearity: NonlinearityConfig,
    /// When present, replaces the built-in constants entirely: a block
    /// without `L` clears the Lipschitz constant, one without `g1`/`g2`
    /// clears the growth pair.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantOverrides>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Problem {
    /// Finite matrix A, entries as [re, im] pairs.
    Ode { matrix: Vec<Vec<[f64; 2]>> },
    /// Diagonal generator truncated at K modes.
    Spectral {
        generator: GeneratorName,
        #[serde(rename = "K")]
        truncation: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorName {
    HeatDirichlet,
    SchrodingerPeriodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormName {
    L1,
    L2,
    LInf,
}

impl NormName {
    pub fn kind(self) -> NormKind {
        match self {
            NormName::L1 => NormKind::L1,
            NormName::L2 => NormKind::L2,
            NormName::LInf => NormKind::LInf,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NonlinearityConfig {
    Builtin {
        builtin: String,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        params: BTreeMap<String, f64>,
    },
    Expressions {
        expressions: Vec<String>,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        params: BTreeMap<String, f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantOverrides {
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub method: MethodName,
}

fn default_grid() -> usize {
    257
}
fn default_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    200
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid: default_grid(),
            tol: default_tol(),
            max_iter: default_max_iter(),
            method: MethodName::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    #[default]
    Picard,
    Poincare,
    Both,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory_csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
}

const BUILTINS: &[(&str, &[&str])] = &[
    ("example_3_1", &["a"]),
    ("example_4_3", &["a"]),
    ("heat_cubic", &["a", "eta"]),
    ("schrodinger_cubic", &["a"]),
];

impl Scenario {
    pub fn multiplier(&self) -> Complex64 {
        Complex64::new(self.c[0], self.c[1])
    }

    pub fn dim(&self) -> Option<usize> {
        match &self.problem {
            Problem::Ode { matrix } => Some(matrix.len()),
            Problem::Spectral { .. } => None,
        }
    }

    /// Field-by-field checks; returns every problem found, each naming the
    /// offending field.
    pub fn validate(&self) -> Vec<String> {
        let mut errors = Vec::new();
        if !self.omega.is_finite() || self.omega <= 0.0 {
            errors.push(format!("omega: must be positive and finite, got {}", self.omega));
        }
        if !self.c[0].is_finite() || !self.c[1].is_finite() {
            errors.push("c: entries must be finite".into());
        } else if self.c[0] == 0.0 && self.c[1] == 0.0 {
            errors.push("c: multiplier must be nonzero".into());
        }

        match &self.problem {
            Problem::Ode { matrix } => {
                if matrix.is_empty() {
                    errors.push("problem.matrix: must not be empty".into());
                }
                for (i, row) in matrix.iter().enumerate() {
                    if row.len() != matrix.len() {
                        errors.push(format!(
                            "problem.matrix: row {} has {} entries, expected {} (square matrix)",
                            i + 1,
                            row.len(),
                            matrix.len()
                        ));
                    }
                    for (j, entry) in row.iter().enumerate() {
                        if !entry[0].is_finite() || !entry[1].is_finite() {
                            errors.push(format!(
                                "problem.matrix: entry ({},{}) is not finite",
                                i + 1,
                                j + 1
                            ));
                        }
                    }
                }
            }
            Problem::Spectral { truncation, .. } => {
                if *truncation == 0 {
                    errors.push("problem.K: truncation must be at least 1".into());
                }
                if self.norm != NormName::L2 {
                    errors.push(
                        "norm: spectral problems use the coefficient l2 norm; set norm = \"l2\""
                            .into(),
                    );
                }
                if self.solver.method != MethodName::Picard {
                    errors.push(
                        "solver.method: only \"picard\" is available for spectral problems".into(),
                    );
                }
            }
        }

        match &self.nonlinearity {
            NonlinearityConfig::Builtin { builtin, params } => {
                match BUILTINS.iter().find(|(name, _)| name == builtin) {
                    None => {
                        let known: Vec<&str> = BUILTINS.iter().map(|(n, _)| *n).collect();
                        errors.push(format!(
                            "nonlinearity.builtin: unknown name `{builtin}` (known: {})",
                            known.join(", ")
                        ));
                    }
                    Some((name, required)) => {
                        for p in *required {
                            if !params.contains_key(*p) {
                                errors.push(format!(
                                    "nonlinearity.params: builtin `{name}` requires parameter `{p}`"
                                ));
                            }
                        }
                        for key in params.keys() {
                            if !required.contains(&key.as_str()) {
                                errors.push(format!(
                                    "nonlinearity.params: builtin `{name}` does not take parameter `{key}`"
                                ));
                            }
                        }
                        let compatible = match (&self.problem, *name) {
                            (Problem::Ode { matrix }, "example_3_1" | "example_4_3") => {
                                if matrix.len() != 2 {
                                    errors.push(format!(
                                        "nonlinearity.builtin: `{name}` is planar (2 components), matrix has dimension {}",
                                        matrix.len()
                                    ));
                                }
                                true
                            }
                            (
                                Problem::Spectral {
                                    generator: GeneratorName::HeatDirichlet,
                                    ..
                                },
                                "heat_cubic",
                            ) => true,
                            (
                                Problem::Spectral {
                                    generator: GeneratorName::SchrodingerPeriodic,
                                    ..
                                },
                                "schrodinger_cubic",
                            ) => true,
                            _ => false,
                        };
                        if !compatible {
                            errors.push(format!(
                                "nonlinearity.builtin: `{name}` does not apply to this problem kind"
                            ));
                        }
                    }
                }
            }
            NonlinearityConfig::Expressions { expressions, params } => match &self.problem {
                Problem::Spectral { .. } => {
                    errors.push(
                        "nonlinearity.expressions: spectral problems only accept the builtin catalog"
                            .into(),
                    );
                }
                Problem::Ode { matrix } => {
                    if expressions.len() != matrix.len() {
                        errors.push(format!(
                            "nonlinearity.expressions: {} expressions for a dimension-{} problem",
                            expressions.len(),
                            matrix.len()
                        ));
                    }
                    let names = NameTable::for_state(matrix.len(), params.clone());
                    for (i, text) in expressions.iter().enumerate() {
                        if let Err(e) = expr::parse(text, &names) {
                            errors.push(format!("nonlinearity.expressions[{i}]: {e}"));
                        }
                    }
                }
            },
        }

        if let Some(ov) = &self.constants {
            for (name, value) in [("L", ov.lipschitz), ("g1", ov.g1), ("g2", ov.g2)] {
                if let Some(v) = value {
                    if !v.is_finite() || v < 0.0 {
                        errors.push(format!(
                            "constants.{name}: must be finite and nonnegative, got {v}"
                        ));
                    }
                }
            }
        }

        if self.solver.grid < 9 {
            errors.push(format!(
                "solver.grid: need at least 9 nodes, got {}",
                self.solver.grid
            ));
        }
        if !(self.solver.tol > 0.0) || !self.solver.tol.is_finite() {
            errors.push(format!(
                "solver.tol: must be positive and finite, got {}",
                self.solver.tol
            ));
        }
        if self.solver.max_iter == 0 {
            errors.push("solver.max_iter: must be at least 1".into());
        }
        errors
    }
}

/// Parses and validates scenario text. Syntax errors carry the JSON line
/// and column; validation errors name the offending field.
pub fn parse_scenario(text: &str) -> Result<Scenario, Vec<String>> {
    let scenario: Scenario = serde_json::from_str(text).map_err(|e| {
        vec![format!("line {} column {}: {}", e.line(), e.column(), e)]
    })?;
    let errors = scenario.validate();
    if errors.is_empty() {
        Ok(scenario)
    } else {
        Err(errors)
    }
}

/// A problem assembled into core objects, ready for certificates and
/// solvers.
pub enum BuiltProblem {
    Ode {
        kernel: GreenKernelODE,
    },
    Spectral {
        generator: DiagonalGenerator,
        semigroup: SemigroupConstants,
    },
}

/// Shared slot recording the first expression evaluation error (division
/// by zero) seen inside a solver run.
pub type EvalErrorSlot = Arc<Mutex<Option<String>>>;

pub struct BuiltScenario {
    pub spec: PeriodicitySpec,
    pub problem: BuiltProblem,
    pub nonlin: NonlinearitySpec,
    /// Pointwise form for the spectral solver and its oracle.
    pub pointwise: Option<PointwiseNonlinearity>,
    /// Present when the right-hand side came from user expressions.
    pub eval_error: Option<EvalErrorSlot>,
}

fn param(params: &BTreeMap<String, f64>, name: &str) -> f64 {
    params[name]
}

/// Builds the core objects for a validated scenario. Resonance surfaces
/// here, from the kernel or semigroup construction.
pub fn build(scenario: &Scenario, quad: &QuadratureSpec) -> wcperiod_core::Result<BuiltScenario> {
    let norm = scenario.norm.kind();
    let spec = PeriodicitySpec::new(scenario.omega, scenario.multiplier(), norm)?;

    let problem = match &scenario.problem {
        Problem::Ode { matrix } => {
            let rows: Vec<Vec<Complex64>> = matrix
                .iter()
                .map(|row| row.iter().map(|e| Complex64::new(e[0], e[1])).collect())
                .collect();
            let a = ComplexMatrix::from_rows(&rows)?;
            BuiltProblem::Ode {
                kernel: GreenKernelODE::new(a, spec)?,
            }
        }
        Problem::Spectral {
            generator,
            truncation,
        } => {
            let generator = match generator {
                GeneratorName::HeatDirichlet => DiagonalGenerator::heat_dirichlet(*truncation)?,
                GeneratorName::SchrodingerPeriodic => {
                    DiagonalGenerator::schrodinger_periodic(*truncation)?
                }
            };
            let semigroup = generator.semigroup_constants(&spec)?;
            BuiltProblem::Spectral {
                generator,
                semigroup,
            }
        }
    };

    let mut eval_error = None;
    let mut pointwise = None;
    let mut nonlin = match &scenario.nonlinearity {
        NonlinearityConfig::Builtin { builtin, params } => match builtin.as_str() {
            "example_3_1" => planar_trig(param(params, "a"), norm),
            "example_4_3" => planar_abs_forced(param(params, "a"), norm),
            "heat_cubic" => {
                let (a, eta) = (param(params, "a"), param(params, "eta"));
                pointwise = Some(heat_cubic_pointwise(a, eta));
                heat_cubic(a, eta, quad)
            }
            "schrodinger_cubic" => {
                let a = Complex64::new(param(params, "a"), 0.0);
                pointwise = Some(schrodinger_cubic_pointwise(a));
                schrodinger_cubic(a, quad)
            }
            other => unreachable!("validated builtin `{other}`"),
        },
        NonlinearityConfig::Expressions { expressions, params } => {
            let dim = match &scenario.problem {
                Problem::Ode { matrix } => matrix.len(),
                Problem::Spectral { .. } => unreachable!("validated: expressions are ODE-only"),
            };
            let names = NameTable::for_state(dim, params.clone());
            let compiled: Vec<expr::Expr> = expressions
                .iter()
                .map(|text| expr::parse(text, &names).expect("validated expression"))
                .collect();
            let slot: EvalErrorSlot = Arc::new(Mutex::new(None));
            eval_error = Some(slot.clone());
            let complex_state = scenario.c[1] != 0.0
                || matches!(&scenario.problem, Problem::Ode { matrix }
                    if matrix.iter().flatten().any(|e| e[1] != 0.0));
            let eval = move |t: f64, y: &[Complex64]| -> Vec<Complex64> {
                let mut vars = Vec::with_capacity(1 + 2 * dim);
                vars.push(t);
                vars.extend(y.iter().map(|z| z.re));
                vars.extend(y.iter().map(|z| z.im));
                let mut out = Vec::with_capacity(dim);
                for e in &compiled {
                    match e.eval(&vars) {
                        Ok(v) => out.push(Complex64::new(v, 0.0)),
                        Err(err) => {
                            let mut guard = slot.lock().unwrap();
                            if guard.is_none() {
                                *guard = Some(format!("at t = {t}: {err}"));
                            }
                            return vec![Complex64::new(f64::NAN, 0.0); dim];
                        }
                    }
                }
                out
            };
            NonlinearitySpec::new(dim, StateNorm::Vector(norm), complex_state, "expressions", eval)
        }
    };

    if let Some(ov) = &scenario.constants {
        nonlin.lipschitz = ov.lipschitz;
        nonlin.growth = match (ov.g1, ov.g2) {
            (None, None) => None,
            (g1, g2) => Some((g1.unwrap_or(0.0), g2.unwrap_or(0.0))),
        };
    }

    Ok(BuiltScenario {
        spec,
        problem,
        nonlin,
        pointwise,
        eval_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planar_text(a: f64, norm: &str) -> String {
        format!(
            r#"{{
  "problem": {{ "kind": "ode", "matrix": [[[2,0],[-4,0]],[[6,0],[-8,0]]] }},
  "omega": 3.141592653589793,
  "c": [-1, 0],
  "norm": "{norm}",
  "nonlinearity": {{ "builtin": "example_3_1", "params": {{ "a": {a} }} }}
}}"#
        )
    }

    #[test]
    fn parses_planar_scenario() {
        let s = parse_scenario(&planar_text(0.2, "l2")).unwrap();
        assert_eq!(s.dim(), Some(2));
        assert_eq!(s.norm, NormName::L2);
        assert_eq!(s.solver.grid, 257);
        assert_eq!(s.solver.method, MethodName::Picard);
        assert_eq!(s.multiplier(), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn roundtrip_preserves_scenario() {
        let mut s = parse_scenario(&planar_text(0.2, "linf")).unwrap();
        s.constants = Some(ConstantOverrides {
            lipschitz: Some(0.4),
            g1: None,
            g2: Some(0.1),
        });
        s.outputs.report = Some(PathBuf::from("out/report.txt"));
        let text = serde_json::to_string_pretty(&s).unwrap();
        let back = parse_scenario(&text).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn negative_omega_is_a_validation_error() {
        let text = planar_text(0.2, "l2").replace("3.141592653589793", "-1.0");
        let errors = parse_scenario(&text).unwrap_err();
        assert!(errors.iter().any(|e| e.starts_with("omega:")), "{errors:?}");
    }

    #[test]
    fn zero_multiplier_rejected() {
        let text = planar_text(0.2, "l2").replace("[-1, 0]", "[0, 0]");
        let errors = parse_scenario(&text).unwrap_err();
        assert!(errors.iter().any(|e| e.starts_with("c:")), "{errors:?}");
    }

    #[test]
    fn ragged_matrix_rejected() {
        let text = planar_text(0.2, "l2").replace("[[6,0],[-8,0]]", "[[6,0]]");
        let errors = parse_scenario(&text).unwrap_err();
        assert!(
            errors.iter().any(|e| e.contains("square matrix")),
            "{errors:?}"
        );
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let text = "{\n  \"problem\": nonsense\n}";
        let errors = parse_scenario(text).unwrap_err();
        assert!(errors[0].starts_with("line 2"), "{errors:?}");
    }

    #[test]
    fn unknown_builtin_and_missing_params_are_reported() {
        let text = planar_text(0.2, "l2").replace("example_3_1", "example_9_9");
        let errors = parse_scenario(&text).unwrap_err();
        assert!(errors.iter().any(|e| e.contains("unknown name")), "{errors:?}");

        let text = planar_text(0.2, "l2").replace(r#""params": { "a": 0.2 }"#, r#""params": {}"#);
        let errors = parse_scenario(&text).unwrap_err();
        assert!(
            errors.iter().any(|e| e.contains("requires parameter `a`")),
            "{errors:?}"
        );
    }

    #[test]
    fn expression_arity_must_match_dimension() {
        let text = planar_text(0.2, "l2").replace(
            r#"{ "builtin": "example_3_1", "params": { "a": 0.2 } }"#,
            r#"{ "expressions": ["sin(t)"] }"#,
        );
        let errors = parse_scenario(&text).unwrap_err();
        assert!(errors.iter().any(|e| e.contains("1 expressions")), "{errors:?}");
    }

    #[test]
    fn expression_parse_errors_name_the_component() {
        let text = planar_text(0.2, "l2").replace(
            r#"{ "builtin": "example_3_1", "params": { "a": 0.2 } }"#,
            r#"{ "expressions": ["sin(t)", "2 t"] }"#,
        );
        let errors = parse_scenario(&text).unwrap_err();
        assert!(
            errors
                .iter()
                .any(|e| e.starts_with("nonlinearity.expressions[1]:")),
            "{errors:?}"
        );
    }

    #[test]
    fn spectral_scenario_parses_and_validates() {
        let text = r#"{
  "problem": { "kind": "spectral", "generator": "heat_dirichlet", "K": 32 },
  "omega": 3.141592653589793,
  "c": [-1, 0],
  "norm": "l2",
  "nonlinearity": { "builtin": "heat_cubic", "params": { "a": 1.0, "eta": 0.5 } }
}"#;
        let s = parse_scenario(text).unwrap();
        assert!(matches!(s.problem, Problem::Spectral { truncation: 32, .. }));

        let wrong_norm = text.replace("\"l2\"", "\"l1\"");
        let errors = parse_scenario(&wrong_norm).unwrap_err();
        assert!(errors.iter().any(|e| e.starts_with("norm:")), "{errors:?}");

        let with_expr = text.replace(
            r#"{ "builtin": "heat_cubic", "params": { "a": 1.0, "eta": 0.5 } }"#,
            r#"{ "expressions": ["sin(t)"] }"#,
        );
        let errors = parse_scenario(&with_expr).unwrap_err();
        assert!(
            errors.iter().any(|e| e.contains("builtin catalog")),
            "{errors:?}"
        );
    }

    #[test]
    fn builtin_generator_mismatch_rejected() {
        let text = r#"{
  "problem": { "kind": "spectral", "generator": "schrodinger_periodic", "K": 8 },
  "omega": 3.141592653589793,
  "c": [-1, 0],
  "norm": "l2",
  "nonlinearity": { "builtin": "heat_cubic", "params": { "a": 1.0, "eta": 0.5 } }
}"#;
        let errors = parse_scenario(text).unwrap_err();
        assert!(
            errors.iter().any(|e| e.contains("does not apply")),
            "{errors:?}"
        );
    }

    #[test]
    fn constants_block_replaces_builtin_constants() {
        let quad = QuadratureSpec::default();
        let mut s = parse_scenario(&planar_text(0.2, "l2")).unwrap();
        let built = build(&s, &quad).unwrap();
        assert!(built.nonlin.lipschitz.is_some());
        assert!(built.nonlin.growth.is_some());

        s.constants = Some(ConstantOverrides {
            lipschitz: Some(0.9),
            g1: None,
            g2: None,
        });
        let built = build(&s, &quad).unwrap();
        assert_eq!(built.nonlin.lipschitz, Some(0.9));
        assert_eq!(built.nonlin.growth, None);
    }

    #[test]
    fn build_surfaces_resonance() {
        let text = r#"{
  "problem": { "kind": "ode", "matrix": [[[0,0]]] },
  "omega": 1.0,
  "c": [1, 0],
  "norm": "l2",
  "nonlinearity": { "expressions": ["sin(t)"] }
}"#;
        let s = parse_scenario(text).unwrap();
        match build(&s, &QuadratureSpec::default()) {
            Err(e) => assert!(matches!(e, wcperiod_core::Error::Resonance { .. }), "{e}"),
            Ok(_) => panic!("resonant problem must not build"),
        }
    }

    #[test]
    fn expression_eval_error_lands_in_the_slot() {
        let text = r#"{
  "problem": { "kind": "ode", "matrix": [[[-1,0]]] },
  "omega": 1.0,
  "c": [2, 0],
  "norm": "l2",
  "nonlinearity": { "expressions": ["1 / y1"] }
}"#;
        let s = parse_scenario(text).unwrap();
        let built = build(&s, &QuadratureSpec::default()).unwrap();
        let out = built.nonlin.eval(0.0, &[Complex64::new(0.0, 0.0)]);
        assert!(out[0].re.is_nan());
        let slot = built.eval_error.unwrap();
        assert!(slot.lock().unwrap().as_deref().unwrap().contains("division by zero"));
    }
}
