use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::fs;
use std::path::PathBuf;
use wcperiod_cli::reproduce;
use wcperiod_cli::run::{self, Command as RunCommand, EXIT_PARSE, EXIT_USAGE};
use wcperiod_cli::scenario::{parse_scenario, NormName, Scenario};

#[derive(Parser)]
#[command(
    name = "wcperiod",
    version,
    about = "Certify and compute (omega, c)-periodic solutions of y' = Ay + g(t, y)"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate existence/uniqueness certificates for a scenario file
    Certify {
        scenario: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Run certificates, then compute the solution and write artifacts
    Solve {
        scenario: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Recompute the reference constants for a published example id
    Reproduce { id: String },
    /// Solve with two independent discretizations and report their gap
    OracleCompare {
        scenario: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Args)]
struct Flags {
    /// Override the solver grid size (number of time nodes)
    #[arg(long)]
    grid: Option<usize>,
    /// Override the solver convergence tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Override the scenario norm
    #[arg(long, value_parser = ["l1", "l2", "linf"])]
    norm: Option<String>,
    /// Directory receiving certificate.json / trajectory.csv / report.txt
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_scenario(path: &PathBuf, flags: &Flags) -> Result<Scenario, i32> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(EXIT_PARSE);
        }
    };
    let mut scenario = match parse_scenario(&text) {
        Ok(s) => s,
        Err(errors) => {
            eprintln!("error: {} is not a valid scenario:", path.display());
            for e in &errors {
                eprintln!("  {e}");
            }
            return Err(EXIT_PARSE);
        }
    };
    if let Some(grid) = flags.grid {
        scenario.solver.grid = grid;
    }
    if let Some(tol) = flags.tol {
        scenario.solver.tol = tol;
    }
    if let Some(norm) = &flags.norm {
        scenario.norm = match norm.as_str() {
            "l1" => NormName::L1,
            "linf" => NormName::LInf,
            _ => NormName::L2,
        };
    }
    let errors = scenario.validate();
    if !errors.is_empty() {
        eprintln!("error: flag overrides make the scenario invalid:");
        for e in &errors {
            eprintln!("  {e}");
        }
        return Err(EXIT_USAGE);
    }
    Ok(scenario)
}

fn dispatch(cmd: RunCommand, scenario_path: &PathBuf, flags: &Flags) -> i32 {
    match load_scenario(scenario_path, flags) {
        Ok(s) => run::run(cmd, &s, flags.out.as_deref()),
        Err(code) => code,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match &cli.command {
        Cmd::Certify { scenario, flags } => dispatch(RunCommand::Certify, scenario, flags),
        Cmd::Solve { scenario, flags } => dispatch(RunCommand::Solve, scenario, flags),
        Cmd::Reproduce { id } => reproduce::run_reproduce(id),
        Cmd::OracleCompare { scenario, flags } => {
            dispatch(RunCommand::OracleCompare, scenario, flags)
        }
    };
    std::process::exit(code);
}
