//! `cluster` command-line tool.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use textclust::corpus::save_corpus;
use textclust::pipeline::{
    self, caption_sweep, emit_explanations, emit_report, emit_selection, emit_sweep, explain_strategy, render_report,
    render_selection, render_sweep, select_prompt, split_list, ConfigOverrides, ExperimentConfig,
    PipelineError, Representation,
};

#[derive(Parser)]
#[command(name = "cluster", version, about = "Text-guided image clustering from generated texts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Number of clusters (defaults to the number of classes).
    #[arg(long)]
    k: Option<usize>,
    /// K-Means restarts.
    #[arg(long)]
    runs: Option<usize>,
    /// Base seed; run r uses seed + r.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster and evaluate every configured strategy and representation.
    Run {
        #[command(flatten)]
        common: Common,
        /// Comma-separated strategies.
        #[arg(long)]
        strategy: Option<String>,
        /// Comma-separated representations: tfidf, embedding, image.
        #[arg(long = "repr")]
        repr: Option<String>,
        /// Texts used per image.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Pick the prompt strategy whose best run has the lowest K-Means loss.
    SelectPrompt {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        strategies: String,
        #[arg(long = "repr")]
        repr: Option<String>,
    },
    /// Accuracy and NMI as a function of the number of texts per image.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated text counts.
        #[arg(long)]
        m: String,
        /// Random subsets per text count.
        #[arg(long)]
        draws: Option<usize>,
        #[arg(long)]
        strategy: Option<String>,
        #[arg(long = "repr")]
        repr: Option<String>,
    },
    /// Keyword explanations for the predicted and ground-truth clusterings.
    Explain {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        strategy: String,
    },
    /// Re-render the text tables of a finished run.
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
    /// Write the planted three-class demo corpus.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = pipeline::synthetic::BUNDLED_SEED)]
        seed: u64,
    },
}

fn parse_reprs(value: &str) -> Result<Vec<Representation>, PipelineError> {
    split_list(value).iter().map(|s| s.parse()).collect()
}

fn load_config(common: &Common, mut overrides: ConfigOverrides) -> Result<ExperimentConfig, PipelineError> {
    let mut config = ExperimentConfig::from_file(&common.config)?;
    overrides.k = common.k;
    overrides.runs = common.runs;
    overrides.seed = common.seed;
    overrides.output = common.out.clone();
    config.apply(&overrides);
    config.validate()?;
    Ok(config)
}

fn announce(paths: &[PathBuf]) {
    for p in paths {
        log::info!("wrote {}", p.display());
    }
}

fn execute(command: Command) -> Result<(), PipelineError> {
    match command {
        Command::Run {
            common,
            strategy,
            repr,
            m,
        } => {
            let overrides = ConfigOverrides {
                strategies: strategy.as_deref().map(split_list),
                representations: repr.as_deref().map(parse_reprs).transpose()?,
                m,
                ..Default::default()
            };
            let config = load_config(&common, overrides)?;
            let report = pipeline::run_experiment(&config)?;
            announce(&emit_report(&report, &config.output)?);
            let json = std::fs::read_to_string(config.output.join("metrics.json")).map_err(|source| {
                PipelineError::Io {
                    context: "re-reading metrics.json".into(),
                    source,
                }
            })?;
            print!("{}", render_report(&json)?);
        }
        Command::SelectPrompt {
            common,
            strategies,
            repr,
        } => {
            let overrides = ConfigOverrides {
                strategies: Some(split_list(&strategies)),
                representations: repr.as_deref().map(parse_reprs).transpose()?,
                ..Default::default()
            };
            let mut config = load_config(&common, overrides)?;
            config.representations.truncate(1);
            let configs: Vec<ExperimentConfig> =
                config.strategies.iter().map(|s| config.for_strategy(s)).collect();
            let selection = select_prompt(&configs)?;
            announce(&emit_selection(&selection, &config.output)?);
            print!("{}", render_selection(&selection));
            println!("chosen: {}", selection.chosen);
        }
        Command::Sweep {
            common,
            m,
            draws,
            strategy,
            repr,
        } => {
            let overrides = ConfigOverrides {
                strategies: strategy.as_deref().map(split_list),
                representations: repr.as_deref().map(parse_reprs).transpose()?,
                draws,
                ..Default::default()
            };
            let config = load_config(&common, overrides)?;
            let m_values = split_list(&m)
                .iter()
                .map(|v| {
                    v.parse::<usize>()
                        .map_err(|_| PipelineError::Config(format!("invalid m value {v:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let table = caption_sweep(&config, &m_values, config.draws)?;
            announce(&emit_sweep(&table, &config.output)?);
            print!("{}", render_sweep(&table));
        }
        Command::Explain { common, strategy } => {
            let overrides = ConfigOverrides {
                strategies: Some(vec![strategy]),
                ..Default::default()
            };
            let config = load_config(&common, overrides)?;
            let out = explain_strategy(&config)?;
            announce(&emit_report(&out.report, &config.output)?);
            println!("Predicted clustering (best run)");
            print!("{}", out.predicted.render_table());
            if let Some(truth) = &out.truth {
                let name = format!(
                    "{}_truth.json",
                    out.report.entries[0].explanations_file.trim_end_matches(".json")
                );
                announce(&[emit_explanations(truth, &config.output, &name)?]);
                println!("\nGround-truth clustering");
                print!("{}", truth.render_table());
            }
        }
        Command::Report { dir } => {
            let path = dir.join("metrics.json");
            let json = read(&path)?;
            print!("{}", render_report(&json)?);
        }
        Command::Synth { out, seed } => {
            let corpus = pipeline::synthetic::planted_corpus(seed);
            save_corpus(&corpus, &out).map_err(|source| PipelineError::Corpus {
                stage: "write corpus",
                source,
            })?;
            println!("wrote {} records to {}", corpus.len(), out.display());
        }
    }
    Ok(())
}

fn read(path: &Path) -> Result<String, PipelineError> {
    std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
        context: format!("reading {}", path.display()),
        source,
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
