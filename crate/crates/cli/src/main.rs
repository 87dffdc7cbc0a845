use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;
mod sets;

use commands::Failure;

#[derive(Parser)]
#[command(name = "orthosep", version)]
#[command(
    about = "Orbits and separating invariants of O2+(F_q) acting on m-tuples of plane vectors"
)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Largest number of points or orbits any single enumeration may visit
    #[arg(
        long,
        global = true,
        env = "ORTHOSEP_BUDGET",
        default_value_t = 20_000_000
    )]
    budget: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum SetChoice {
    /// N_i, T_i, U_ij, H_ij
    #[value(name = "Tm")]
    Tm,
    /// N_i, T_i, U_ij
    #[value(name = "Tm2")]
    Tm2,
    /// N, B and D families
    Chen,
    /// T_1 expanded to m slots
    #[value(name = "T1-expanded")]
    T1Expanded,
    /// Read from --set-file
    File,
}

#[derive(Args)]
pub struct SetArgs {
    /// Which invariant set to use
    #[arg(long, value_enum, default_value_t = SetChoice::Tm)]
    set: SetChoice,

    /// Manifest (JSON) or one polynomial per line, for --set file
    #[arg(long)]
    set_file: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Expect {
    /// Use the known verdict for the chosen set, if there is one
    Auto,
    Separating,
    NotSeparating,
    Minimal,
    None,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate orbit representatives and compare with the orbit count formula
    Orbits {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: usize,
        /// List every representative even when there are many
        #[arg(long)]
        list: bool,
    },
    /// Decide whether a set of invariants separates orbits
    Verify {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        set: SetArgs,
        /// Also check that no member can be dropped
        #[arg(long)]
        minimality: bool,
        /// Claim to check the result against
        #[arg(long, value_enum, default_value_t = Expect::Auto)]
        expect: Expect,
    },
    /// Smallest degree bound whose invariants separate
    Beta {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 8)]
        max_degree: u32,
    },
    /// Check that expansions of two-slot sets separate up to --max-m
    Sigma {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 3)]
        max_m: usize,
    },
    /// Lower bound on the size of a separating set
    Gamma {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: usize,
        /// Also search this pool for separating subsets below the bound
        #[arg(long, value_enum)]
        pool: Option<SetChoice>,
        #[arg(long)]
        set_file: Option<PathBuf>,
    },
    /// Smallest separating subset of a pool
    Search {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, default_value_t = 8)]
        size_cap: usize,
    },
    /// Run every check over a grid of (q, m) and emit one row per cell
    Tables {
        /// Comma-separated field orders
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        q: Vec<u64>,
        /// Comma-separated arities
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        m: Vec<usize>,
        /// Number of cells run at once (default: all cores)
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Print the manifest of a built-in set, for editing and reloading
    Manifest {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        set: SetArgs,
    },
}

fn run(cli: &Cli) -> Result<commands::Outcome, Failure> {
    let budget = u128::from(cli.budget);
    match &cli.command {
        Command::Orbits { q, m, list } => commands::orbits(*q, *m, *list, budget),
        Command::Verify {
            q,
            m,
            set,
            minimality,
            expect,
        } => commands::verify(*q, *m, set, *minimality, *expect, budget),
        Command::Beta { q, m, max_degree } => commands::beta(*q, *m, *max_degree, budget),
        Command::Sigma { q, max_m } => commands::sigma(*q, *max_m, budget),
        Command::Gamma {
            q,
            m,
            pool,
            set_file,
        } => {
            let pool = pool.map(|set| SetArgs {
                set,
                set_file: set_file.clone(),
            });
            commands::gamma(*q, *m, pool.as_ref(), budget)
        }
        Command::Search {
            q,
            m,
            set,
            size_cap,
        } => commands::search(*q, *m, set, *size_cap, budget),
        Command::Tables { q, m, workers } => commands::tables(q, m, *workers, budget),
        Command::Manifest { q, m, set } => commands::manifest(*q, *m, set),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(outcome) => outcome,
        Err(failure) => {
            eprintln!("error: {failure}");
            return ExitCode::from(failure.code());
        }
    };
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }
    if let Err(e) = output::emit(&outcome, cli.format, cli.output.as_deref()) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
