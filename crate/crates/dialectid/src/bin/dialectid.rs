//! Thin command-line front end over the library's stage runner. Every
//! subcommand resolves to one pipeline stage (or the whole configured
//! set for `run`); flags override the corresponding config knobs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dialectid::config::{RunConfig, Stage};
use dialectid::pipeline;

#[derive(Parser)]
#[command(
    name = "dialectid",
    version,
    about = "Identify national dialects from geo-referenced corpora",
    after_help = "Artifacts are memoized per stage; reruns with unchanged \
                  config and inputs are no-ops. Set DIALECTID_CACHE to move \
                  the stage manifests out of the output directory."
)]
struct Cli {
    /// TOML run configuration.
    #[arg(short, long, global = true, default_value = "dialectid.toml")]
    config: PathBuf,
    /// Override the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the configured output directory.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Cap parallel workers.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured stage in dependency order.
    Run,
    /// Generate a synthetic corpus with controlled dialect profiles.
    Synth,
    /// Clean, georeference, and deduplicate raw web/social dumps.
    Ingest,
    /// Tabulate words per country and register; select the inventory.
    Map,
    /// Aggregate documents into 1,000-word samples and assign splits.
    Sample,
    /// Vectorize samples in each configured feature space.
    Featurize,
    /// Fit one-vs-rest linear models, tuning C on the dev split.
    Train,
    /// Evaluate trained models on the test split.
    Eval,
    /// Train on the primary register, test on the secondary.
    Crossdomain,
    /// Relative construction density per region, one column per grammar.
    Density,
    /// Iterative strongest-feature removal curve.
    Unmask {
        /// Override the configured number of removal rounds.
        #[arg(long)]
        rounds: Option<usize>,
    },
    /// Aggregate a confusion matrix into region-pair similarity counts.
    Similarity,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn real_main(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    let mut config = RunConfig::from_path(&cli.config)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(output_dir) = cli.output_dir {
        config.output_dir = output_dir;
    }
    if let Some(jobs) = cli.jobs {
        config.jobs = Some(jobs);
    }

    match cli.command {
        Command::Run => {}
        Command::Synth => config.stages = vec![Stage::Synth],
        Command::Ingest => config.stages = vec![Stage::Ingest],
        Command::Map => config.stages = vec![Stage::Map],
        Command::Sample => config.stages = vec![Stage::Sample],
        Command::Featurize => config.stages = vec![Stage::Featurize],
        Command::Train => config.stages = vec![Stage::Train],
        Command::Eval => config.stages = vec![Stage::Eval],
        Command::Crossdomain => config.stages = vec![Stage::Crossdomain],
        Command::Density => config.stages = vec![Stage::Density],
        Command::Unmask { rounds } => {
            if let Some(rounds) = rounds {
                config.unmasking.rounds = rounds;
            }
            config.stages = vec![Stage::Unmask];
        }
        Command::Similarity => config.stages = vec![Stage::Similarity],
    }

    for outcome in pipeline::run(&config)? {
        if outcome.skipped {
            println!("{}: up to date", outcome.stage);
        } else {
            println!("{}: done", outcome.stage);
            for path in &outcome.outputs {
                println!("  {}", path.display());
            }
        }
    }
    Ok(())
}
