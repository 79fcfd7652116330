use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use incidence_involutions::classify::{Bounds, DEFAULT_UNIT_BOUND};
use incidence_involutions::cli::{self, CliError, CliResult, Corpus, InputDocument, Options, Report};
use incidence_involutions::exec::Strategy;
use incidence_involutions::posets::DEFAULT_MAX_POSET_SIZE;
use incidence_involutions::scalars::Field;

/// Involutions of incidence algebras of finite posets.
#[derive(Parser)]
#[command(name = "incinv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Odd prime p, or Q.
    #[arg(long, default_value = "3")]
    field: String,
    /// Largest poset for automorphism enumeration and the verify corpus.
    #[arg(long)]
    max_size: Option<usize>,
    /// Enumeration cap on units modulo the center.
    #[arg(long, default_value_t = DEFAULT_UNIT_BOUND)]
    bound: u64,
    /// Seed for the random verification corpus.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run searches on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Connected components of the poset.
    Components { file: PathBuf },
    /// Automorphisms and involutions of the poset.
    Autos {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Involutions of the algebra inducing each poset involution.
    Involutions {
        file: PathBuf,
        #[arg(long)]
        map: Option<String>,
        /// Print every descriptor, not just the count.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        common: Common,
    },
    /// λ-decomposition and the induced action on components.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        map: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Inner-equivalence classes with representatives.
    Classify {
        file: PathBuf,
        #[arg(long)]
        map: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Class count by formula and by brute force.
    Count {
        file: PathBuf,
        #[arg(long)]
        map: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Equivalence under all automorphisms; involutions given as MAP or MAP:UNIT.
    GeneralEquiv {
        file: PathBuf,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        eta: String,
        #[command(flatten)]
        common: Common,
    },
    /// Whether multiplicative elements are fractional (inner).
    FractionalCheck {
        file: PathBuf,
        #[arg(long)]
        sigma: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the verification battery on a document, the small-poset corpus,
    /// or random posets.
    Verify {
        file: Option<PathBuf>,
        /// Number of random posets (sizes up to --max-size) instead of the corpus.
        #[arg(long)]
        random: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

fn options(c: &Common) -> CliResult<Options> {
    let field: Field = c.field.parse()?;
    Ok(Options {
        field,
        bounds: Bounds { units: c.bound, max_poset: c.max_size.unwrap_or(DEFAULT_MAX_POSET_SIZE).max(1) },
        seed: c.seed,
        strategy: if c.sequential { Strategy::Sequential } else { Strategy::default() },
    })
}

fn load(path: &PathBuf) -> CliResult<InputDocument> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Semantic { line: None, message: format!("{}: {e}", path.display()) })?;
    cli::parse(&text)
}

fn run(command: Command) -> CliResult<Report> {
    match command {
        Command::Components { file } => Ok(cli::components(&load(&file)?)),
        Command::Autos { file, common } => cli::autos(&load(&file)?, &options(&common)?),
        Command::Involutions { file, map, list, common } => {
            cli::involutions(&load(&file)?, &options(&common)?, map.as_deref(), list)
        }
        Command::Decompose { file, map, common } => cli::decompose(&load(&file)?, &options(&common)?, map.as_deref()),
        Command::Classify { file, map, common } => {
            cli::classify_cmd(&load(&file)?, &options(&common)?, map.as_deref())
        }
        Command::Count { file, map, common } => cli::count(&load(&file)?, &options(&common)?, map.as_deref()),
        Command::GeneralEquiv { file, rho, eta, common } => {
            cli::general_equiv(&load(&file)?, &options(&common)?, &rho, &eta)
        }
        Command::FractionalCheck { file, sigma, common } => {
            cli::fractional_check(&load(&file)?, &options(&common)?, sigma.as_deref())
        }
        Command::Verify { file, random, common } => {
            let opts = options(&common)?;
            let max_size = common.max_size.unwrap_or(4);
            match (file, random) {
                (Some(f), _) => cli::verify(Corpus::Document(&load(&f)?), &opts),
                (None, Some(count)) => cli::verify(Corpus::Random { count, max_size }, &opts),
                (None, None) => cli::verify(Corpus::UpTo(max_size), &opts),
            }
        }
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match run(args.command) {
        Ok(report) => {
            print!("{report}");
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
