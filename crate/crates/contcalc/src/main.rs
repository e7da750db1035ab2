use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use contcalc::commands::{self, CheckArgs, EnumerateArgs, Output, DEFAULT_DEPTH, DEFAULT_HEIGHT, DEFAULT_PATHS};
use contcalc::CliError;

/// Containers, their fixed points, fold/unfold and bisimulation.
#[derive(Parser)]
#[command(name = "contcalc", version)]
struct Cli {
    /// Print the budgets in effect.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarise the containers of every declaration in a file.
    Elaborate { file: PathBuf },
    /// List the elements of a declaration's fixed point.
    Enumerate {
        file: PathBuf,
        decl: String,
        /// Parameter domain, `A=a,b` or `A=3`.
        #[arg(long = "x")]
        x: Vec<String>,
        /// Machine file supplying `nu` shapes.
        #[arg(long)]
        machines: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_HEIGHT)]
        height: usize,
        /// Stop after this many elements (exit 3).
        #[arg(long, default_value_t = contcalc_core::Budget::DEFAULT_COUNT)]
        limit: usize,
        #[arg(long)]
        count_only: bool,
    },
    /// Fold a `mu` term with an algebra file.
    Fold {
        file: PathBuf,
        decl: String,
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        input: String,
        #[arg(long = "x")]
        x: Vec<String>,
    },
    /// Unfold a coalgebra file from a state into a `nu` element.
    Unfold {
        file: PathBuf,
        decl: String,
        #[arg(long)]
        coalgebra: PathBuf,
        #[arg(long)]
        state: String,
        /// Show payloads at paths of up to this many nodes.
        #[arg(long, default_value_t = DEFAULT_PATHS)]
        paths: usize,
    },
    /// Compare two machine seeds (`name` or `name.state`).
    Bisim {
        machines: PathBuf,
        m0: String,
        m1: String,
        #[arg(long, conflicts_with = "exact")]
        depth: Option<usize>,
        #[arg(long)]
        exact: bool,
    },
    /// Run the isomorphism suite for a declaration.
    CheckIso {
        file: PathBuf,
        decl: String,
        #[arg(long = "x")]
        x: Vec<String>,
        #[arg(long)]
        machines: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_HEIGHT)]
        height: usize,
        #[arg(long, default_value_t = DEFAULT_PATHS)]
        paths: usize,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
    },
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let verbose = cli.verbose;
    match cli.command {
        Command::Elaborate { file } => commands::elaborate(&file),
        Command::Enumerate { file, decl, x, machines, height, limit, count_only } => {
            commands::enumerate(EnumerateArgs {
                file: &file,
                decl: &decl,
                x: &x,
                machines: machines.as_deref(),
                height,
                limit,
                count_only,
                verbose,
            })
        }
        Command::Fold { file, decl, algebra, input, x } => commands::fold(&file, &decl, &algebra, &input, &x),
        Command::Unfold { file, decl, coalgebra, state, paths } => {
            commands::unfold(&file, &decl, &coalgebra, &state, paths, verbose)
        }
        Command::Bisim { machines, m0, m1, depth, exact } => commands::bisim(&machines, &m0, &m1, depth, exact),
        Command::CheckIso { file, decl, x, machines, height, paths, depth } => commands::check_iso_cmd(CheckArgs {
            file: &file,
            decl: &decl,
            x: &x,
            machines: machines.as_deref(),
            height,
            paths,
            depth,
            verbose,
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
