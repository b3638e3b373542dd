use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toxbias::corpus::{IdentityBias, IngestStats, SynthSpec};
use toxbias::workflow::{
    run_evaluate, run_grid_search, run_predict, run_stats, run_synth, run_train, EvaluateJob,
    GridJob, PredictJob, StatsJob, SynthJob, TrainJob,
};

/// Toxic-comment classifier training and identity-bias auditing.
#[derive(Parser)]
#[command(name = "toxbias", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Class balance, weighted identity toxicity, subtype histograms, correlations.
    Stats {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// `.json` for JSON, anything else for a plain table; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split, fit TF-IDF and train the logistic-regression classifier.
    Train {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        model_out: PathBuf,
        #[arg(long)]
        split_seed: Option<u64>,
        /// Write the held-out split here.
        #[arg(long)]
        test_out: Option<PathBuf>,
    },
    /// Score a corpus with a trained model; writes `id,score` CSV.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Bias report for a prediction file against a labelled corpus.
    Evaluate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
        /// Comma-separated identity names.
        #[arg(long, value_delimiter = ',')]
        subgroups: Option<Vec<String>>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Model bundle used as scorer when counterfactual evaluation is enabled.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Label of the model that produced the predictions.
        #[arg(long)]
        provenance: Option<String>,
    },
    /// Train one model per grid entry and rank by validation AUC.
    GridSearch {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic Jigsaw-format corpus.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0.08)]
        toxic_fraction: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Rate at which each identity term appears in toxic comments.
        #[arg(long, default_value_t = 0.2)]
        identity_toxic_rate: f64,
        /// Rate at which each identity term appears in non-toxic comments.
        #[arg(long, default_value_t = 0.05)]
        identity_nontoxic_rate: f64,
    },
}

fn warn_rejected(stats: &IngestStats) {
    for r in stats.rejected.iter().take(10) {
        eprintln!("warning: line {} skipped: {}", r.line, r.reason);
    }
    if stats.rejected_count() > 10 {
        eprintln!("warning: {} more rows skipped", stats.rejected_count() - 10);
    }
}

fn emit(rendered: &str, to_file: bool) {
    if !to_file {
        print!("{rendered}");
    }
}

fn run(cli: Cli) -> toxbias::Result<()> {
    match cli.command {
        Command::Stats { input, config, out } => {
            let to_file = out.is_some();
            let r = run_stats(&StatsJob { input, config, out })?;
            r.ingest.iter().for_each(warn_rejected);
            emit(&r.rendered, to_file);
        }
        Command::Train {
            input,
            config,
            model_out,
            split_seed,
            test_out,
        } => {
            let s = run_train(&TrainJob {
                input,
                config,
                model_out,
                split_seed,
                test_out,
            })?;
            warn_rejected(&s.ingest);
            println!("train rows: {}", s.n_train);
            println!("test rows: {}", s.n_test);
            println!("vocabulary: {}", s.vocabulary_size);
            if let Some(loss) = s.loss_trace.last() {
                println!("final loss: {loss:.6}");
            }
            match s.test_auc {
                Some(auc) => println!("test AUC: {auc:.4}"),
                None => println!("test AUC: n/a"),
            }
        }
        Command::Predict {
            model,
            input,
            config,
            out,
        } => {
            let ingest = run_predict(&PredictJob {
                model,
                input,
                config,
                out,
            })?;
            warn_rejected(&ingest);
        }
        Command::Evaluate {
            input,
            predictions,
            subgroups,
            config,
            out,
            model,
            provenance,
        } => {
            let to_file = out.is_some();
            let r = run_evaluate(&EvaluateJob {
                input,
                predictions,
                subgroups,
                config,
                out,
                model,
                provenance,
            })?;
            r.ingest.iter().for_each(warn_rejected);
            emit(&r.rendered, to_file);
        }
        Command::GridSearch {
            input,
            grid,
            config,
            out,
        } => {
            let to_file = out.is_some();
            let r = run_grid_search(&GridJob {
                input,
                grid,
                config,
                out,
            })?;
            r.ingest.iter().for_each(warn_rejected);
            emit(&r.rendered, to_file);
        }
        Command::Synth {
            out,
            n,
            toxic_fraction,
            seed,
            identity_toxic_rate,
            identity_nontoxic_rate,
        } => {
            let spec = SynthSpec {
                n_comments: n,
                toxic_fraction,
                seed,
                identity_bias: IdentityBias::default_table(
                    identity_toxic_rate,
                    identity_nontoxic_rate,
                ),
                ..SynthSpec::default()
            };
            run_synth(&SynthJob { out, spec })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error: kind={} message={message:?}", e.kind());
            ExitCode::FAILURE
        }
    }
}
