use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chroma_cli::*;

#[derive(Parser, Debug)]
#[command(
    name = "chroma",
    version,
    about = "Chromatic experiments on Cayley and Kneser graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Wall-clock limit for the exact solvers, e.g. "60s" or "5m".
    #[arg(long, global = true)]
    budget: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Optional CSV table output.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Optional DIMACS edge-list output.
    #[arg(long, global = true)]
    dimacs: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zero-sum classification of an equation.
    Classify(ClassifyArgs),
    /// Generalized Kneser graphs.
    Kneser(KneserArgs),
    /// Cayley graphs given by an element-set file, or DIMACS graphs.
    Cayley(CayleyArgs),
    /// Build the dense solution-free sets and their lift.
    Construct(ConstructArgs),
    /// Build, lift and certify.
    CertifyLift(ConstructArgs),
    /// Spectrum/Bohr-cell coloring of Cay(F_p, A).
    BohrColor(BohrArgs),
    /// Independent set in the Hamming-ball Cayley graph.
    IndepSet(IndepArgs),
    /// Run an experiment config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn execute(cli: &Cli) -> CliResult<i32> {
    let ctx = Context {
        budget: cli.budget.as_deref().map(parse_budget).transpose()?,
        seed: cli.seed,
        csv: cli.csv.clone(),
        dimacs: cli.dimacs.clone(),
        cache_dir: std::env::var_os(CACHE_ENV).map(PathBuf::from),
    };
    let mut out = cli.out.clone();
    let outcome = match &cli.command {
        Command::Classify(a) => run_classify(a)?,
        Command::Kneser(a) => run_kneser(a, &ctx)?,
        Command::Cayley(a) => run_cayley(a, &ctx)?,
        Command::Construct(a) => run_construct(a, &ctx)?,
        Command::CertifyLift(a) => run_certify_lift(a, &ctx)?,
        Command::BohrColor(a) => run_bohr(a)?,
        Command::IndepSet(a) => run_indep(a, &ctx)?,
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(config)?;
            log::info!("running {:?} from {}", cfg.command, config.display());
            if out.is_none() {
                out = cfg.output.clone();
            }
            run_config(&cfg, &ctx)?
        }
    };
    emit(&outcome.report, out.as_deref())?;
    Ok(outcome.exit_code())
}
