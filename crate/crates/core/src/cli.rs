//! The `pswm` command line: `ingest`, `train`, `search`, `eval` and
//! `gradcheck`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 failed check.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::corpus::{build_index, load_index, parse_corpus_file, save_index};
use crate::error::{Error, Result};
use crate::neural::{init_weights, load_model, run_gradcheck, save_model, train};
use crate::ranker::{render, search, OutputMode};
use crate::training::{evaluate_examples, judgments_to_examples, parse_judgments_file};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

/// Networks sampled by `gradcheck`.
pub const GRADCHECK_NETWORKS: usize = 25;

#[derive(Debug, Parser)]
#[command(
    name = "pswm",
    version,
    about = "Metadata-aware document search with a neural relevance ranker"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a corpus file and write its inverted index.
    Ingest {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        index: PathBuf,
    },
    /// Train the ranking network from relevance judgments.
    Train {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        judgments: PathBuf,
        /// Where to write the trained model.
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 5000)]
        epochs: usize,
        #[arg(long, default_value_t = 0.5)]
        lr: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        hidden: usize,
    },
    /// Search the index and print ranked results.
    Search {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        cutoff: f64,
        #[arg(long)]
        top_k: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        query: String,
    },
    /// Report loss and accuracy of a model on judgments.
    Eval {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        judgments: PathBuf,
    },
    /// Compare back-propagated gradients with finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Perturb one analytic gradient per network (self-test of the checker).
        #[arg(long, hide = true)]
        corrupt: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Machine,
}

impl From<Format> for OutputMode {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputMode::Text,
            Format::Machine => OutputMode::Machine,
        }
    }
}

/// Parses `args` (program name first) and runs the command, writing normal
/// output to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_data_error() {
        EXIT_DATA
    } else {
        EXIT_USAGE
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    let code = match command {
        Command::Ingest { corpus, index } => {
            let built = build_index(parse_corpus_file(&corpus)?)?;
            save_index(&built, &index)?;
            writeln!(
                out,
                "indexed {} documents, {} distinct tokens -> {}",
                built.doc_count(),
                built.token_count(),
                index.display()
            )
            .ok();
            EXIT_OK
        }
        Command::Train {
            index,
            judgments,
            model,
            epochs,
            lr,
            seed,
            hidden,
        } => {
            if !(lr > 0.0 && lr.is_finite()) {
                return Err(usage(format!("--lr must be positive, got {lr}")));
            }
            if hidden == 0 {
                return Err(usage("--hidden must be at least 1"));
            }
            let index = load_index(&index)?;
            let judgments = parse_judgments_file(&judgments)?;
            let examples = judgments_to_examples(&judgments, &index)?;
            if examples.is_empty() && epochs > 0 {
                return Err(Error::data("judgments file contains no judgments"));
            }

            let mut net = init_weights(&[2, hidden, 1], seed)?;
            let initial = (!examples.is_empty())
                .then(|| evaluate_examples(&net, &examples))
                .transpose()?;
            train(&mut net, &examples, epochs, lr, seed)?;
            save_model(&net, &model)?;

            writeln!(
                out,
                "trained 2-{hidden}-1 network for {epochs} epochs on {} judgments",
                examples.len()
            )
            .ok();
            if let Some(initial) = initial {
                let fin = evaluate_examples(&net, &examples)?;
                writeln!(out, "initial mean error: {:.6}", initial.mean_error).ok();
                writeln!(out, "final mean error: {:.6}", fin.mean_error).ok();
                writeln!(out, "accuracy at 0.5: {:.4}", fin.accuracy).ok();
            }
            writeln!(out, "model written to {}", model.display()).ok();
            EXIT_OK
        }
        Command::Search {
            index,
            model,
            cutoff,
            top_k,
            format,
            query,
        } => {
            if !(0.0..=1.0).contains(&cutoff) {
                return Err(usage(format!("--cutoff must lie in [0, 1], got {cutoff}")));
            }
            if top_k == Some(0) {
                return Err(usage("--top-k must be at least 1"));
            }
            let index = load_index(&index)?;
            let net = load_model(&model)?;
            let page = search(&index, &net, &query, cutoff, top_k)?;
            let rendered = render(&page, format.into());
            write!(out, "{rendered}").ok();
            if !rendered.ends_with('\n') {
                writeln!(out).ok();
            }
            EXIT_OK
        }
        Command::Eval {
            index,
            model,
            judgments,
        } => {
            let index = load_index(&index)?;
            let net = load_model(&model)?;
            let examples = judgments_to_examples(&parse_judgments_file(&judgments)?, &index)?;
            if examples.is_empty() {
                return Err(Error::data("judgments file contains no judgments"));
            }
            let report = evaluate_examples(&net, &examples)?;
            writeln!(out, "judgments: {}", report.count).ok();
            writeln!(out, "mean error: {:.6}", report.mean_error).ok();
            writeln!(out, "accuracy at 0.5: {:.4}", report.accuracy).ok();
            EXIT_OK
        }
        Command::Gradcheck { seed, corrupt } => {
            let report = run_gradcheck(seed, GRADCHECK_NETWORKS, corrupt)?;
            writeln!(
                out,
                "checked {} weights across {} networks; max relative error: {:e}",
                report.weights_checked, report.networks, report.max_relative_error
            )
            .ok();
            if report.passed() {
                EXIT_OK
            } else {
                writeln!(out, "gradient check FAILED").ok();
                EXIT_CHECK
            }
        }
    };
    Ok(code)
}
