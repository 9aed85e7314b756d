use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use srlkit::eval::{GroupBy, ReportFormat};
use srlkit::pipeline::{ExtendWith, PoolAnnotations};
use srlkit::Error;

mod commands;

#[derive(Parser, Debug)]
#[command(name = "srlkit", version, about = "Semantic role labeling tools for learner/correction parallel corpora")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Collapse adjunct subtypes (AM-TMP, AM-LOC, ...) to bare AM.
    #[arg(long, global = true)]
    am_coarse: bool,

    /// Seed for training and dataset splitting.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Directory to write output files to.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Output format for reports printed to stdout.
    #[arg(long, global = true, default_value = "text", value_parser = parse_format)]
    format: ReportFormat,
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse()
}

fn parse_group_by(s: &str) -> Result<GroupBy, String> {
    s.parse()
}

fn parse_extend_with(s: &str) -> Result<ExtendWith, String> {
    s.parse()
}

fn parse_pool_annotations(s: &str) -> Result<PoolAnnotations, String> {
    s.parse()
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Score predicted annotations against gold annotations.
    Score {
        pred: PathBuf,
        gold: PathBuf,
        /// Break scores down by `lang`, `side` or `lang,side`.
        #[arg(long, value_parser = parse_group_by)]
        group_by: Option<GroupBy>,
        /// Repair ill-formed tag columns in the predicted file.
        #[arg(long)]
        lenient: bool,
        /// Also print the confusion matrix.
        #[arg(long)]
        confusion: bool,
    },
    /// Inter-annotator agreement between two annotations of the same text.
    Iaa {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_parser = parse_group_by, default_value = "lang,side")]
        group_by: GroupBy,
    },
    /// Apply the oracle transformations in sequence and report F after each.
    Oracle {
        pred: PathBuf,
        gold: PathBuf,
        #[arg(long)]
        lenient: bool,
    },
    /// List the role tuples of every sentence.
    Tuples { corpus: PathBuf },
    /// Align L2 and L1 sentences by identical word forms.
    Align { l2: PathBuf, l1: PathBuf },
    /// Select pairs whose L2 and L1 tuple recalls both exceed a threshold.
    Select {
        l2: PathBuf,
        l1: PathBuf,
        /// Alignment file, or `heuristic`.
        #[arg(long, default_value = "heuristic")]
        align: String,
        /// Selection threshold (strict).
        #[arg(long, default_value_t = 0.9)]
        p: f64,
        /// Match adjunct subtypes exactly instead of as bare AM.
        #[arg(long)]
        match_fine: bool,
    },
    /// Split paired data into dev pairs and L2/L1 test sentences.
    Split {
        l2: PathBuf,
        l1: PathBuf,
        #[arg(long, default_value = "heuristic")]
        align: String,
        #[arg(long, default_value_t = 50)]
        dev_per_lang: usize,
    },
    /// Train a tagger.
    Train {
        corpus: PathBuf,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        /// Keep the final weights instead of averaging.
        #[arg(long)]
        no_average: bool,
        /// Model file to write (default: model.srl in --out, else stdout).
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Tag a corpus at its predicate positions.
    Tag { model: PathBuf, corpus: PathBuf },
    /// Run the selection-and-retraining loop described by a config file.
    Retrain {
        config: PathBuf,
        #[arg(long, value_parser = parse_extend_with)]
        extend_with: Option<ExtendWith>,
        #[arg(long, value_parser = parse_pool_annotations)]
        pool_annotations: Option<PoolAnnotations>,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse(_) | Error::Model(_) => 2,
        Error::MismatchedCorpora(_) | Error::MissingMetadata(_) => 3,
        Error::Pairing(_) | Error::InsufficientData { .. } => 4,
        Error::VersionMismatch(_) => 5,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli.global, cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("srlkit: {}", e);
            ExitCode::from(exit_code(&e))
        }
    }
}
