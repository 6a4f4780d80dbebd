mod cache;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "ruleform", version, about = "Rule formats, the plus construction and modal decomposition for transition system specifications")]
struct Cli {
    /// Output style.
    #[arg(long, value_enum, default_value_t = Out::Text, global = true)]
    out: Out,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Out {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Decide membership in a rule format.
    Check {
        #[arg(long)]
        format: String,
        #[arg(long, value_enum, default_value_t = LambdaArg::Auto)]
        lambda: LambdaArg,
        file: PathBuf,
    },
    /// Run the plus pipeline up to a stage and print the resulting specification.
    Transform {
        /// ntyxt, ground, xynft, uniform, rplus, or plus for the whole pipeline.
        #[arg(long, default_value = "plus")]
        stage: String,
        /// Closed terms, one per line, substituted for free variables.
        #[arg(long)]
        universe: Option<PathBuf>,
        #[arg(long)]
        fuel: Option<usize>,
        /// Write the stage trace as JSON to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        file: PathBuf,
    },
    /// Build a bounded fragment of the transition system.
    Lts {
        #[arg(long = "root", required = true)]
        roots: Vec<String>,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value = "ws")]
        notion: String,
        file: PathBuf,
    },
    /// Decide whether LEFT is below RIGHT in a behavioural preorder.
    Compare {
        #[arg(long)]
        notion: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        file: PathBuf,
    },
    /// Decide whether a closed term satisfies a formula.
    Sat {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        term: String,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        file: PathBuf,
    },
    /// List the ruloids of an open term.
    Ruloids {
        #[arg(long)]
        term: String,
        #[arg(long)]
        action: String,
        /// Negative conclusions instead of positive ones.
        #[arg(long)]
        neg: bool,
        file: PathBuf,
    },
    /// Decompose a formula through an open term.
    Decompose {
        #[arg(long)]
        term: String,
        #[arg(long)]
        formula: String,
        file: PathBuf,
    },
    /// Check that FILE conservatively extends BASE.
    Conservative(ConservativeArgs),
    /// Search for precongruence violations with random terms and contexts.
    FuzzPrecongruence {
        #[arg(long)]
        notion: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        terms: usize,
        #[arg(long, default_value_t = 4)]
        contexts: usize,
        #[arg(long, default_value_t = 400)]
        max_instances: usize,
        /// Test the equivalence rather than the preorder.
        #[arg(long)]
        symmetric: bool,
        file: PathBuf,
    },
    /// The built-in fixture corpus.
    Fixtures {
        #[command(subcommand)]
        action: FixturesCommand,
    },
}

#[derive(Args)]
#[command(group(ArgGroup::new("mode").required(true)))]
struct ConservativeArgs {
    #[arg(long, group = "mode")]
    syntactic: bool,
    #[arg(long, group = "mode")]
    semantic: bool,
    #[arg(long)]
    base: PathBuf,
    /// Roots of the compared fragments (semantic mode).
    #[arg(long = "root")]
    roots: Vec<String>,
    #[arg(long, default_value_t = 4)]
    depth: usize,
    file: PathBuf,
}

#[derive(Subcommand)]
enum FixturesCommand {
    /// Names of the fixtures.
    List,
    /// Print one fixture.
    Show { name: String },
    /// Run the acceptance suite.
    Run {
        #[arg(long)]
        criterion: Option<u8>,
        #[arg(long)]
        seed: Option<u64>,
        /// Cases per randomized suite.
        #[arg(long)]
        cases: Option<usize>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LambdaArg {
    Auto,
    Exhaustive,
    Declared,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(cli.command, cli.out) {
        Ok(report) => {
            report.print(cli.out);
            ExitCode::from(if report.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
