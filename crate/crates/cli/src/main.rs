//! `rankforge`: Scott and Hjorth ranks, relation dumps, verification suites
//! and the Scott/Hjorth comparison scan.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or parse error, 3 budget
//! exceeded.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use rankforge::budget::Budget;
use rankforge::{Error, ErrorKind};

use report::Format;

#[derive(Debug, Parser)]
#[command(name = "rankforge", version, about = "Scott and Hjorth rank engines")]
struct Cli {
    /// Output format; `records` is the stable machine-readable one.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for generated instances.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Budget overrides such as `g=32,n=5`, applied after RANKFORGE_BUDGET.
    #[arg(long, global = true)]
    budget: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scott rank of every finite structure in a structure file.
    ScottRank(ScottRankArgs),
    /// Hjorth relations and ranks of an action or logic-action system.
    Hjorth(HjorthArgs),
    /// Run a verification suite: lemmas, iso, vaught, comparison, basis or all.
    Verify(VerifyArgs),
    /// Exhaustive Scott-implies-Hjorth scan over a finite logic action.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct ScottRankArgs {
    /// Structure file.
    pub file: PathBuf,
    /// Only this structure.
    #[arg(long)]
    pub structure: Option<String>,
    /// Cross-check every equivalence against the game recursion.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["action", "logic", "symbolic"])))]
pub struct HjorthArgs {
    /// Permutation action file.
    #[arg(long, value_name = "FILE")]
    pub action: Option<PathBuf>,
    /// Logic action of S_n over this signature, e.g. `edge:2` (empty for none).
    #[arg(long, value_name = "SIGNATURE", requires = "universe")]
    pub logic: Option<String>,
    /// Symbolic logic action on the supported structures of this file.
    #[arg(long, value_name = "FILE", requires = "window")]
    pub symbolic: Option<PathBuf>,
    /// Universe size of the logic action.
    #[arg(long, short = 'n')]
    pub universe: Option<usize>,
    /// Support window of the symbolic action.
    #[arg(long, short = 's')]
    pub window: Option<usize>,
    /// Longest tuple in the basis descriptors.
    #[arg(long, short = 'k', default_value_t = 1)]
    pub tuple_len: usize,
    /// Restrict the logic action to the orbits of the structures in this file.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["action", "symbolic"])]
    pub structures: Option<PathBuf>,
    /// Basis of a permutation action: `all-subsets`, `singletons+G` or
    /// `sets: {e} {e,s}`. Overrides the file's basis line.
    #[arg(long, requires = "action")]
    pub basis: Option<String>,
    /// Stop after this many levels even if not yet stable.
    #[arg(long)]
    pub max_level: Option<usize>,
    /// Emit a LEQ record for every quadruple at every computed level.
    #[arg(long)]
    pub dump: bool,
    /// Only report these points (repeatable).
    #[arg(long)]
    pub point: Vec<String>,
    /// Cross-check every table entry against the direct recursion.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// lemmas | iso | vaught | comparison | basis | all
    pub suite: String,
    /// Instance sizes, e.g. `g<=8,x<=6,n<=3`.
    #[arg(long)]
    pub sizes: Option<String>,
    /// Corrupt the base relation of every generated system.
    #[arg(long)]
    pub inject_fault: bool,
    /// Only run these checks (repeatable).
    #[arg(long)]
    pub check: Vec<String>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Signature such as `edge:2`; empty for the empty signature.
    #[arg(long)]
    pub signature: String,
    /// Universe size.
    #[arg(long, short = 'n')]
    pub universe: usize,
    /// Longest tuple scanned.
    #[arg(long, short = 'k', default_value_t = 2)]
    pub tuple_len: usize,
}

/// Settings shared by every command.
pub struct RunConfig {
    pub format: Format,
    pub seed: u64,
    pub budget: Budget,
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Check => 1,
        ErrorKind::Input => 2,
        ErrorKind::Budget => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let budget = Budget::from_env().and_then(|b| match &cli.budget {
        Some(spec) => b.with_overrides(spec),
        None => Ok(b),
    });
    let budget = match budget {
        Ok(b) => b,
        Err(e) => return fail(&e),
    };
    let cfg = RunConfig {
        format: cli.format,
        seed: cli.seed,
        budget,
    };
    let outcome = match &cli.command {
        Command::ScottRank(args) => commands::scott_rank(&cfg, args),
        Command::Hjorth(args) => commands::hjorth(&cfg, args),
        Command::Verify(args) => commands::verify(&cfg, args),
        Command::Compare(args) => commands::compare(&cfg, args),
    };
    match outcome {
        Ok((report, passed)) => {
            print!("{}", report.render(cfg.format));
            ExitCode::from(if passed { 0 } else { 1 })
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("rankforge: {e}");
    ExitCode::from(exit_code(e.kind()))
}
