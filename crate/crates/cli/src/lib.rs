//! Command-line front end: solve, certify, check marginal feasibility, and
//! run the grid convergence study.

pub mod report;

use std::collections::BTreeSet;
use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use fairex::dual::{certify_optimality, solve_dual, solve_potential};
use fairex::feasibility::{check_pi_feasible, check_pi_feasible_lp, LpFeasibility, Verdict};
use fairex::harness::convergence_study;
use fairex::model::io::{cells_from_json, goods_from_json, participants_from_json, CellAmount, GoodAmount, ParticipantAmount};
use fairex::model::SelfLoops;
use fairex::primal::{solve, Method};
use fairex::rational::{serde_text, to_f64};
use fairex::{ExchangeInstance, Rational};

pub use report::{SolveReport, Verification};

#[derive(Debug, Parser)]
#[command(name = "fairex", version, about = "Exact solvers for the optimal fair exchange problem")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Direct3d,
    Reduced2d,
    Dcot,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Direct3d => Method::Direct3d,
            MethodArg::Reduced2d => Method::Reduced2d,
            MethodArg::Dcot => Method::Dcot,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance and write a verified report.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Reduced2d)]
        method: MethodArg,
        /// Disallow a participant trading with itself (direct3d only).
        #[arg(long)]
        forbid_self_loops: bool,
        /// Write the JSON report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the primal, dual and potential programs and compare optima.
    Certify {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Decide whether a capped coupling with the given marginals exists.
    Oracle {
        /// JSON file with `mu`, `nu` and `pi` measure blocks.
        #[arg(long)]
        input: PathBuf,
        /// Also run the LP check and require the same verdict.
        #[arg(long, conflicts_with = "lp_only")]
        cross_check: bool,
        /// Skip subset enumeration; works at any size.
        #[arg(long)]
        lp_only: bool,
    },
    /// Discretize the continuous example on the given grids and tabulate the optima.
    Example1 {
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Recompute the verification flags of a saved report.
    Verify {
        #[arg(long)]
        report: PathBuf,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Solver(#[from] fairex::Error),
    #[error("cannot write output: {0}")]
    Write(#[from] io::Error),
    #[error("cannot serialize report: {0}")]
    Serialize(#[from] serde_json::Error),
    #[error("{0}")]
    Disagreement(String),
}

impl CliError {
    /// 2 for unreadable or invalid input, 3 for unmet preconditions, 4 for
    /// size limits, 1 for anything else.
    pub fn exit_code(&self) -> u8 {
        use fairex::Error as E;
        match self {
            CliError::Read { .. } | CliError::Parse { .. } => 2,
            CliError::Solver(E::Invalid(_) | E::Usage(_)) => 2,
            CliError::Solver(E::NotNormalized | E::OverlappingSupports(_) | E::Precondition(_)) => 3,
            CliError::Solver(E::Capacity(_)) => 4,
            _ => 1,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })
}

pub fn load_instance(path: &Path) -> Result<ExchangeInstance, CliError> {
    let inst = ExchangeInstance::from_json(&read(path)?).map_err(|source| CliError::Parse { path: path.into(), source })?;
    inst.validate()?;
    Ok(inst)
}

/// Input of the `oracle` command.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleInput {
    pub mu: Vec<ParticipantAmount>,
    pub nu: Vec<GoodAmount>,
    pub pi: Vec<CellAmount>,
}

#[derive(Debug, Serialize)]
struct StudyRow {
    n: usize,
    #[serde(with = "serde_text")]
    value: Rational,
    #[serde(with = "serde_text")]
    error: Rational,
}

fn join<T: Display>(items: &BTreeSet<T>) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Solve {
            instance,
            method,
            forbid_self_loops,
            out: target,
        } => cmd_solve(&instance, method.into(), forbid_self_loops, target.as_deref(), out),
        Command::Certify { instance } => cmd_certify(&instance, out),
        Command::Oracle {
            input,
            cross_check,
            lp_only,
        } => cmd_oracle(&input, cross_check, lp_only, out),
        Command::Example1 { grid, json } => cmd_example1(&grid, json, out),
        Command::Verify { report } => cmd_verify(&report, out),
    }
}

pub fn cmd_solve(
    instance: &Path,
    method: Method,
    forbid_self_loops: bool,
    target: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let inst = load_instance(instance)?;
    let loops = if forbid_self_loops { SelfLoops::Forbidden } else { SelfLoops::Allowed };
    let result = solve(&inst, method, loops)?;
    let dual = solve_dual(&inst, loops)?;
    let potential = if forbid_self_loops { None } else { Some(solve_potential(&inst)?) };
    let report = SolveReport::new(&inst, &result, forbid_self_loops, dual, potential)?;
    if !report.verification.all_ok() {
        return Err(CliError::Disagreement(format!(
            "report failed its own verification: {:?}",
            report.verification
        )));
    }
    let text = serde_json::to_string_pretty(&report)? + "\n";
    match target {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn cmd_certify(instance: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let inst = load_instance(instance)?;
    writeln!(out, "{}", certify_optimality(&inst)?.summary())?;
    Ok(())
}

pub fn cmd_oracle(input: &Path, cross_check: bool, lp_only: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let parsed: OracleInput =
        serde_json::from_str(&read(input)?).map_err(|source| CliError::Parse { path: input.into(), source })?;
    let mu = participants_from_json(&parsed.mu);
    let nu = goods_from_json(&parsed.nu);
    let pi = cells_from_json(&parsed.pi);
    if lp_only {
        match check_pi_feasible_lp(&mu, &nu, &pi)? {
            LpFeasibility::Feasible(_) => writeln!(out, "feasible")?,
            LpFeasibility::Infeasible(c) => writeln!(out, "infeasible: potentials give lhs={} rhs={}", c.lhs, c.rhs)?,
        }
        return Ok(());
    }
    let verdict = check_pi_feasible(&mu, &nu, &pi).map_err(|e| match e {
        fairex::Error::Capacity(msg) => fairex::Error::Capacity(format!("{msg} (rerun with --lp-only)")),
        other => other,
    })?;
    match &verdict {
        Verdict::Feasible => writeln!(out, "feasible")?,
        Verdict::Violated(w) => writeln!(
            out,
            "witness A={{{}}} B={{{}}} lhs={} rhs={}",
            join(&w.a),
            join(&w.b),
            w.lhs,
            w.rhs
        )?,
    }
    if cross_check {
        if check_pi_feasible_lp(&mu, &nu, &pi)?.is_feasible() != verdict.is_feasible() {
            return Err(CliError::Disagreement("oracle=LP: disagree".into()));
        }
        writeln!(out, "oracle=LP: agree")?;
    }
    Ok(())
}

pub fn cmd_example1(grid: &[usize], json: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let rows = convergence_study(grid)?;
    if json {
        let rows: Vec<StudyRow> = rows
            .into_iter()
            .map(|r| StudyRow { n: r.n, value: r.value, error: r.error })
            .collect();
        writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?;
    } else {
        writeln!(out, "{:>5}  {:>16}  {:>16}  {:>10}", "n", "value", "error", "error~")?;
        for r in rows {
            writeln!(out, "{:>5}  {:>16}  {:>16}  {:>10.6}", r.n, r.value, r.error, to_f64(&r.error))?;
        }
    }
    Ok(())
}

pub fn cmd_verify(report: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let parsed: SolveReport =
        serde_json::from_str(&read(report)?).map_err(|source| CliError::Parse { path: report.into(), source })?;
    let flags = parsed.recompute()?;
    writeln!(out, "{}", serde_json::to_string_pretty(&flags)?)?;
    if flags != parsed.verification {
        return Err(CliError::Disagreement("recomputed flags differ from the stored ones".into()));
    }
    if !flags.all_ok() {
        return Err(CliError::Disagreement("report does not pass verification".into()));
    }
    Ok(())
}
