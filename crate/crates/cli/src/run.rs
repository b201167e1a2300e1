//! Command execution: run certificates and solvers for a scenario, write
//! the certificate JSON / trajectory CSV / report artifacts, and map
//! outcomes to exit codes.

use crate::scenario::{self, BuiltProblem, BuiltScenario, MethodName, Scenario};
use serde_json::json;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use wcperiod_core::certificates::{Certificate, OperatorNormRoute, Verdict};
use wcperiod_core::{
    certify_contraction, certify_growth, certify_mild_contraction, certify_mild_growth,
    exponential_propagate, mild_picard_solve, periodicity_residual, picard_solve, poincare_solve,
    spatial_points, Error, MildTrajectory, QuadratureSpec, SolutionTrajectory,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RESONANCE: i32 = 2;
pub const EXIT_CERT_FAILED: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_PARSE: i32 = 65;

/// 17 significant digits, the precision carried by every emitted float.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Maps a core error to the documented exit code; anything unexpected
/// becomes a plain failure (1).
pub fn exit_for_error(e: &Error) -> i32 {
    match e {
        Error::Resonance { .. } => EXIT_RESONANCE,
        Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        _ => 1,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Certify,
    Solve,
    OracleCompare,
}

/// Where the artifacts of one run go, after combining scenario-declared
/// paths with the --out directory.
pub struct OutPaths {
    pub certificate: Option<PathBuf>,
    pub trajectory: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

pub fn resolve_outputs(scenario: &Scenario, out_dir: Option<&Path>) -> OutPaths {
    let place = |declared: &Option<PathBuf>, default_name: &str| -> Option<PathBuf> {
        match (declared, out_dir) {
            (Some(path), Some(dir)) if path.is_relative() => Some(dir.join(path)),
            (Some(path), _) => Some(path.clone()),
            (None, Some(dir)) => Some(dir.join(default_name)),
            (None, None) => None,
        }
    };
    OutPaths {
        certificate: place(&scenario.outputs.certificate, "certificate.json"),
        trajectory: place(&scenario.outputs.trajectory_csv, "trajectory.csv"),
        report: place(&scenario.outputs.report, "report.txt"),
    }
}

fn write_artifact(path: &Path, content: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, content)
}

/// Entry point shared by certify / solve / oracle-compare. Prints the
/// report to stdout, writes requested artifacts, returns the exit code.
pub fn run(command: Command, scenario: &Scenario, out_dir: Option<&Path>) -> i32 {
    let quad = QuadratureSpec::default();
    let built = match scenario::build(scenario, &quad) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for_error(&e);
        }
    };
    let outcome = match command {
        Command::Certify => certify_command(scenario, &built, &quad),
        Command::Solve => solve_command(scenario, &built, &quad),
        Command::OracleCompare => oracle_compare_command(scenario, &built, &quad),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for_error(&e);
        }
    };

    print!("{}", outcome.report);
    let paths = resolve_outputs(scenario, out_dir);
    let mut io_failed = false;
    let mut write = |path: &Option<PathBuf>, content: &Option<String>| {
        if let (Some(path), Some(content)) = (path, content) {
            if let Err(e) = write_artifact(path, content) {
                eprintln!("error: cannot write {}: {e}", path.display());
                io_failed = true;
            }
        }
    };
    write(&paths.certificate, &outcome.certificate_json);
    write(&paths.trajectory, &outcome.trajectory_csv);
    write(&paths.report, &Some(outcome.report.clone()));
    if io_failed {
        return 1;
    }
    outcome.exit
}

struct Outcome {
    exit: i32,
    report: String,
    certificate_json: Option<String>,
    trajectory_csv: Option<String>,
}

/// Convergence record of one solver run, as shown in the report.
struct SolveSummary {
    method: &'static str,
    grid: usize,
    iterations: usize,
    final_update: f64,
    boundary_residual: f64,
    ode_residual: Option<f64>,
    periodicity_residual: Option<f64>,
    mild_residual: Option<f64>,
    sup_norm: f64,
}

impl SolveSummary {
    fn from_ode(method: &'static str, traj: &SolutionTrajectory) -> Self {
        Self {
            method,
            grid: traj.grid.len(),
            iterations: traj.iterations,
            final_update: traj.final_update,
            boundary_residual: traj.residuals.boundary,
            ode_residual: Some(traj.residuals.ode),
            periodicity_residual: Some(traj.residuals.periodicity),
            mild_residual: None,
            sup_norm: traj.sup_norm(),
        }
    }

    fn from_mild(traj: &MildTrajectory) -> Self {
        Self {
            method: "picard (mild)",
            grid: traj.times.len(),
            iterations: traj.iterations,
            final_update: traj.final_update,
            boundary_residual: traj.boundary_residual,
            ode_residual: None,
            periodicity_residual: None,
            mild_residual: Some(traj.mild_residual),
            sup_norm: traj.sup_norm(),
        }
    }
}

/// Runs every certificate whose constants are declared. An empty result
/// means no constants were available.
fn run_certificates(
    built: &BuiltScenario,
    quad: &QuadratureSpec,
) -> wcperiod_core::Result<Vec<Certificate>> {
    let g = &built.nonlin;
    let mut certs = Vec::new();
    match &built.problem {
        BuiltProblem::Ode { kernel } => {
            if g.lipschitz.is_some() {
                certs.push(certify_contraction(kernel, g, quad, OperatorNormRoute::Exact)?);
            }
            if g.growth.is_some() {
                certs.push(certify_growth(kernel, g, quad, OperatorNormRoute::Exact)?);
            }
        }
        BuiltProblem::Spectral { semigroup, .. } => {
            if g.lipschitz.is_some() {
                certs.push(certify_mild_contraction(semigroup, &built.spec, g)?);
            }
            if g.growth.is_some() {
                certs.push(certify_mild_growth(semigroup, &built.spec, g)?);
            }
        }
    }
    Ok(certs)
}

fn any_certified(certs: &[Certificate]) -> bool {
    certs.iter().any(|c| c.verdict.is_certified())
}

fn certified_bound(certs: &[Certificate]) -> Option<f64> {
    certs
        .iter()
        .filter(|c| c.verdict.is_certified())
        .filter_map(|c| c.solution_bound())
        .fold(None, |acc, b| Some(acc.map_or(b, |a: f64| a.min(b))))
}

fn certify_command(
    scenario: &Scenario,
    built: &BuiltScenario,
    quad: &QuadratureSpec,
) -> wcperiod_core::Result<Outcome> {
    let certs = run_certificates(built, quad)?;
    let notes = expression_notes(scenario, built);
    let report = render_report(scenario, &certs, &[], None, &notes);
    let exit = if any_certified(&certs) {
        EXIT_OK
    } else {
        EXIT_CERT_FAILED
    };
    Ok(Outcome {
        exit,
        report,
        certificate_json: Some(certificates_json(&certs)),
        trajectory_csv: None,
    })
}

fn solve_command(
    scenario: &Scenario,
    built: &BuiltScenario,
    quad: &QuadratureSpec,
) -> wcperiod_core::Result<Outcome> {
    let certs = run_certificates(built, quad)?;
    let solver = &scenario.solver;
    let mut summaries = Vec::new();
    let mut csv = None;
    let mut nonconvergence: Option<Error> = None;
    let mut oracle_gap = None;

    match &built.problem {
        BuiltProblem::Ode { kernel } => {
            let g = &built.nonlin;
            let want_picard = matches!(solver.method, MethodName::Picard | MethodName::Both);
            let want_poincare = matches!(solver.method, MethodName::Poincare | MethodName::Both);
            let mut picard_traj = None;
            let mut poincare_traj = None;
            if want_picard {
                match picard_solve(kernel, g, solver.grid, solver.tol, solver.max_iter, None) {
                    Ok(t) => picard_traj = Some(t),
                    Err(e @ Error::NonConvergence { .. }) => nonconvergence = Some(e),
                    Err(e) => return Err(e),
                }
            }
            if want_poincare {
                match poincare_solve(kernel, g, solver.grid, solver.tol, solver.max_iter) {
                    Ok(t) => poincare_traj = Some(t),
                    Err(e @ Error::NonConvergence { .. }) => nonconvergence = Some(e),
                    Err(e) => return Err(e),
                }
            }
            if let (Some(p), Some(q)) = (&picard_traj, &poincare_traj) {
                oracle_gap = Some((p.distance_to(q), oracle_tolerance(solver.tol)));
            }
            if let Some(t) = &picard_traj {
                summaries.push(SolveSummary::from_ode("picard", t));
            }
            if let Some(t) = &poincare_traj {
                summaries.push(SolveSummary::from_ode("poincare", t));
            }
            if let Some(t) = picard_traj.as_ref().or(poincare_traj.as_ref()) {
                csv = Some(ode_trajectory_csv(t));
            }
        }
        BuiltProblem::Spectral { generator, .. } => {
            let g = built
                .pointwise
                .as_ref()
                .expect("spectral builtins carry a pointwise form");
            match mild_picard_solve(generator, g, &built.spec, solver.grid, solver.tol, solver.max_iter)
            {
                Ok(t) => {
                    summaries.push(SolveSummary::from_mild(&t));
                    csv = Some(mild_trajectory_csv(&t));
                }
                Err(e @ Error::NonConvergence { .. }) => nonconvergence = Some(e),
                Err(e) => return Err(e),
            }
        }
    }

    let mut notes = expression_notes(scenario, built);
    if let Some(slot) = &built.eval_error {
        if let Some(msg) = slot.lock().unwrap().clone() {
            notes.push(format!("expression evaluation error during iteration: {msg}"));
        }
    }
    if let Some(e) = &nonconvergence {
        notes.push(format!("solver did not converge: {e}"));
    }

    let report = render_report(scenario, &certs, &summaries, oracle_gap, &notes);
    let exit = if nonconvergence.is_some() {
        EXIT_NONCONVERGENCE
    } else if !any_certified(&certs) {
        EXIT_CERT_FAILED
    } else {
        EXIT_OK
    };
    Ok(Outcome {
        exit,
        report,
        certificate_json: Some(certificates_json(&certs)),
        trajectory_csv: csv,
    })
}

fn oracle_tolerance(solver_tol: f64) -> f64 {
    (100.0 * solver_tol).max(1e-6)
}

/// Solves with the primary method and checks the result against an
/// independent discretization: the shooting solver for matrix problems,
/// the exponential integrator for spectral ones.
fn oracle_compare_command(
    scenario: &Scenario,
    built: &BuiltScenario,
    quad: &QuadratureSpec,
) -> wcperiod_core::Result<Outcome> {
    let certs = run_certificates(built, quad)?;
    let solver = &scenario.solver;
    let mut summaries = Vec::new();
    let gap_result: wcperiod_core::Result<(f64, f64)> = match &built.problem {
        BuiltProblem::Ode { kernel } => {
            let g = &built.nonlin;
            let p = picard_solve(kernel, g, solver.grid, solver.tol, solver.max_iter, None)?;
            let q = poincare_solve(kernel, g, solver.grid, solver.tol, solver.max_iter)?;
            let gap = p.distance_to(&q);
            summaries.push(SolveSummary::from_ode("picard", &p));
            summaries.push(SolveSummary::from_ode("poincare", &q));
            Ok((gap, oracle_tolerance(solver.tol)))
        }
        BuiltProblem::Spectral { generator, .. } => {
            let g = built
                .pointwise
                .as_ref()
                .expect("spectral builtins carry a pointwise form");
            let traj =
                mild_picard_solve(generator, g, &built.spec, solver.grid, solver.tol, solver.max_iter)?;
            let steps = 16 * (solver.grid - 1);
            let propagated = exponential_propagate(
                generator,
                g,
                &traj.states[0],
                built.spec.omega,
                steps,
                spatial_points(generator),
            )?;
            let gap = propagated.distance_to(traj.states.last().expect("nonempty trajectory"));
            summaries.push(SolveSummary::from_mild(&traj));
            Ok((gap, 1e-5))
        }
    };
    let (gap, tol) = gap_result?;
    let ok = gap <= tol;
    let mut notes = vec![format!(
        "oracle agreement {}: gap {} vs tolerance {}",
        if ok { "confirmed" } else { "FAILED" },
        fmt17(gap),
        fmt17(tol)
    )];
    notes.extend(expression_notes(scenario, built));
    let report = render_report(scenario, &certs, &summaries, Some((gap, tol)), &notes);
    Ok(Outcome {
        exit: if ok { EXIT_OK } else { EXIT_NONCONVERGENCE },
        report,
        certificate_json: Some(certificates_json(&certs)),
        trajectory_csv: None,
    })
}

/// For expression-defined right-hand sides, report the sampled
/// compatibility residual max ||g(t+omega, c y) - c g(t,y)||: solutions
/// are only (omega, c)-periodic when it vanishes.
fn expression_notes(scenario: &Scenario, built: &BuiltScenario) -> Vec<String> {
    if built.eval_error.is_none() {
        return Vec::new(); // builtin catalog: compatibility is known
    }
    let residual = periodicity_residual(
        &built.nonlin,
        scenario.omega,
        scenario.multiplier(),
        64,
        0x5eed,
    );
    let mut notes = vec![format!(
        "sampled boundary-compatibility residual of the expressions: {}",
        fmt17(residual)
    )];
    if residual > 1e-8 {
        notes.push(
            "the right-hand side does not satisfy g(t + omega, c y) = c g(t, y) on samples; \
             computed trajectories solve the boundary problem but may not extend periodically"
                .into(),
        );
    }
    notes
}

pub fn certificates_json(certs: &[Certificate]) -> String {
    let items: Vec<serde_json::Value> = certs.iter().map(certificate_json).collect();
    let doc = json!({ "certificates": items });
    let mut text = serde_json::to_string_pretty(&doc).expect("certificate serialization");
    text.push('\n');
    text
}

fn certificate_json(c: &Certificate) -> serde_json::Value {
    json!({
        "kind": c.kind.label(),
        "unique": c.kind.unique(),
        "verdict": match &c.verdict {
            Verdict::Certified => json!({ "certified": true }),
            Verdict::Failed(reason) => json!({ "certified": false, "reason": reason }),
        },
        "constants": c.constants,
        "inputs_digest": c.inputs_digest,
        "m_route": c.m_route.map(|r| r.label()),
        "finite_dim_assumed": c.finite_dim_assumed,
        "gronwall": c.gronwall.map(|g| json!({
            "q": g.q, "gamma": g.gamma, "g1": g.g1, "g2": g.g2, "omega": g.omega,
        })),
    })
}

/// CSV of a matrix-problem trajectory: t, then re/im of each component,
/// 17 significant digits, LF endings, header row first.
pub fn ode_trajectory_csv(traj: &SolutionTrajectory) -> String {
    let dim = traj.values.first().map_or(0, Vec::len);
    let mut out = String::new();
    out.push('t');
    for i in 1..=dim {
        let _ = write!(out, ",re_y{i},im_y{i}");
    }
    out.push('\n');
    for (t, row) in traj.grid.iter().zip(&traj.values) {
        out.push_str(&fmt17(*t));
        for z in row {
            let _ = write!(out, ",{},{}", fmt17(z.re), fmt17(z.im));
        }
        out.push('\n');
    }
    out
}

/// CSV of a spectral trajectory; components are the basis coefficients.
pub fn mild_trajectory_csv(traj: &MildTrajectory) -> String {
    let dim = traj
        .states
        .first()
        .map_or(0, |s| s.coefficients.len());
    let mut out = String::new();
    out.push('t');
    for i in 1..=dim {
        let _ = write!(out, ",re_y{i},im_y{i}");
    }
    out.push('\n');
    for (t, state) in traj.times.iter().zip(&traj.states) {
        out.push_str(&fmt17(*t));
        for z in &state.coefficients {
            let _ = write!(out, ",{},{}", fmt17(z.re), fmt17(z.im));
        }
        out.push('\n');
    }
    out
}

/// The report: a plain-text mirror of each certificate, then solver
/// convergence records, the cross-method gap, and any notes.
fn render_report(
    scenario: &Scenario,
    certs: &[Certificate],
    solves: &[SolveSummary],
    oracle_gap: Option<(f64, f64)>,
    notes: &[String],
) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "problem: {} | omega = {} | c = {} + {}i | norm = {}",
        match &scenario.problem {
            crate::scenario::Problem::Ode { matrix } => format!("ode dim {}", matrix.len()),
            crate::scenario::Problem::Spectral { generator, truncation } => format!(
                "spectral {} K = {truncation}",
                match generator {
                    crate::scenario::GeneratorName::HeatDirichlet => "heat_dirichlet",
                    crate::scenario::GeneratorName::SchrodingerPeriodic => "schrodinger_periodic",
                }
            ),
        },
        fmt17(scenario.omega),
        fmt17(scenario.c[0]),
        fmt17(scenario.c[1]),
        match scenario.norm {
            crate::scenario::NormName::L1 => "l1",
            crate::scenario::NormName::L2 => "l2",
            crate::scenario::NormName::LInf => "linf",
        }
    );
    out.push('\n');

    if certs.is_empty() {
        out.push_str(
            "no certificate applicable: declare a Lipschitz constant (constants.L) \
             or growth constants (constants.g1 / constants.g2)\n",
        );
    }
    for c in certs {
        let _ = writeln!(out, "certificate: {}", c.kind.label());
        match &c.verdict {
            Verdict::Certified => {
                let what = if c.kind.unique() {
                    "a unique solution exists"
                } else {
                    "a solution exists"
                };
                let _ = writeln!(out, "  verdict: certified ({what})");
            }
            Verdict::Failed(reason) => {
                let _ = writeln!(out, "  verdict: not certified ({reason})");
            }
        }
        if let Some(route) = c.m_route {
            let _ = writeln!(out, "  operator-norm route: {}", route.label());
        }
        let _ = writeln!(
            out,
            "  finite-dimensional argument: {}",
            if c.finite_dim_assumed { "yes" } else { "no" }
        );
        let _ = writeln!(out, "  constants:");
        for (key, value) in &c.constants {
            let _ = writeln!(out, "    {key} = {}", fmt17(*value));
        }
        if let Some(gb) = &c.gronwall {
            let _ = writeln!(
                out,
                "  growth envelope: q = {}, gamma = {}, g1 = {}, g2 = {}, omega = {}",
                fmt17(gb.q),
                fmt17(gb.gamma),
                fmt17(gb.g1),
                fmt17(gb.g2),
                fmt17(gb.omega)
            );
        }
        let _ = writeln!(out, "  inputs: {}", c.inputs_digest);
        out.push('\n');
    }

    for s in solves {
        let _ = writeln!(out, "solver: {}", s.method);
        let _ = writeln!(out, "  grid nodes: {}", s.grid);
        let _ = writeln!(out, "  iterations: {}", s.iterations);
        let _ = writeln!(out, "  final update: {}", fmt17(s.final_update));
        let _ = writeln!(out, "  boundary residual: {}", fmt17(s.boundary_residual));
        if let Some(r) = s.ode_residual {
            let _ = writeln!(out, "  differential residual: {}", fmt17(r));
        }
        if let Some(r) = s.periodicity_residual {
            let _ = writeln!(out, "  extension residual: {}", fmt17(r));
        }
        if let Some(r) = s.mild_residual {
            let _ = writeln!(out, "  mild-equation residual: {}", fmt17(r));
        }
        let _ = writeln!(out, "  sup norm: {}", fmt17(s.sup_norm));
        if let Some(bound) = certified_bound(certs) {
            let _ = writeln!(
                out,
                "  certified bound: {} (within: {})",
                fmt17(bound),
                if s.sup_norm <= bound * (1.0 + 1e-3) {
                    "yes"
                } else {
                    "NO"
                }
            );
        }
        out.push('\n');
    }

    if let Some((gap, tol)) = oracle_gap {
        let _ = writeln!(
            out,
            "cross-method gap: {} (tolerance {})",
            fmt17(gap),
            fmt17(tol)
        );
        out.push('\n');
    }

    if !notes.is_empty() {
        out.push_str("notes:\n");
        for n in notes {
            let _ = writeln!(out, "  - {n}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario;

    fn planar(a: f64) -> Scenario {
        parse_scenario(&format!(
            r#"{{
  "problem": {{ "kind": "ode", "matrix": [[[2,0],[-4,0]],[[6,0],[-8,0]]] }},
  "omega": 3.141592653589793,
  "c": [-1, 0],
  "norm": "l2",
  "nonlinearity": {{ "builtin": "example_3_1", "params": {{ "a": {a} }} }},
  "solver": {{ "grid": 65, "tol": 1e-9, "max_iter": 60, "method": "both" }}
}}"#
        ))
        .unwrap()
    }

    #[test]
    fn solve_produces_certificates_and_csv() {
        let s = planar(0.2);
        let quad = QuadratureSpec::default();
        let built = scenario::build(&s, &quad).unwrap();
        let outcome = solve_command(&s, &built, &quad).unwrap();
        assert_eq!(outcome.exit, EXIT_OK);
        let csv = outcome.trajectory_csv.unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,re_y1,im_y1,re_y2,im_y2"));
        assert_eq!(lines.count(), 65);
        assert!(!csv.contains('\r'));
        assert!(outcome.report.contains("cross-method gap"));
        let json = outcome.certificate_json.unwrap();
        assert!(json.contains("\"contraction\""));
        assert!(json.contains("\"certified\": true"));
    }

    #[test]
    fn certificate_failure_still_solves() {
        let mut s = planar(0.6);
        s.constants = Some(crate::scenario::ConstantOverrides {
            lipschitz: Some(0.6 * std::f64::consts::SQRT_2),
            g1: None,
            g2: None,
        });
        let quad = QuadratureSpec::default();
        let built = scenario::build(&s, &quad).unwrap();
        let outcome = solve_command(&s, &built, &quad).unwrap();
        assert_eq!(outcome.exit, EXIT_CERT_FAILED);
        assert!(outcome.trajectory_csv.is_some(), "solve must still run");
        assert!(outcome.report.contains("not certified"));
    }

    #[test]
    fn csv_is_deterministic() {
        let s = planar(0.2);
        let quad = QuadratureSpec::default();
        let one = solve_command(&s, &scenario::build(&s, &quad).unwrap(), &quad).unwrap();
        let two = solve_command(&s, &scenario::build(&s, &quad).unwrap(), &quad).unwrap();
        assert_eq!(one.trajectory_csv, two.trajectory_csv);
        assert_eq!(one.report, two.report);
    }

    #[test]
    fn output_paths_combine_with_out_dir() {
        let mut s = planar(0.2);
        s.outputs.report = Some(PathBuf::from("custom.txt"));
        let paths = resolve_outputs(&s, Some(Path::new("/tmp/x")));
        assert_eq!(paths.report.unwrap(), PathBuf::from("/tmp/x/custom.txt"));
        assert_eq!(
            paths.certificate.unwrap(),
            PathBuf::from("/tmp/x/certificate.json")
        );
        let paths = resolve_outputs(&s, None);
        assert_eq!(paths.report.unwrap(), PathBuf::from("custom.txt"));
        assert!(paths.certificate.is_none());
    }

    #[test]
    fn fmt17_gives_seventeen_significant_digits() {
        assert_eq!(fmt17(1.0), "1.0000000000000000e0");
        assert_eq!(fmt17(-0.25), "-2.5000000000000000e-1");
    }
}
