use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coordnet::adhoc::{self, StatTest, StatsArgs};
use coordnet::pipeline::{self, ClusterArgs, DetectArgs, IngestArgs, ReportArgs, ScoreArgs};
use coordnet::{Config, Error, Result};
use coordnet_core::stats::Alternative;

#[derive(Parser)]
#[command(name = "coordnet", version, about = "Detect coordinated accounts in tweet corpora and report on them")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for resampling procedures (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Abort on the first malformed input line.
    #[arg(long, global = true)]
    strict: bool,
    /// Print errors as JSON on stderr.
    #[arg(long, global = true)]
    json_errors: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate raw JSONL records and write the canonical cache.
    Ingest {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the coordination detectors.
    Detect {
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        params: DetectorFlags,
    },
    /// Connected components of an edge file.
    Cluster {
        corpus: PathBuf,
        edges: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score tweets with a phrase lexicon.
    Score {
        corpus: PathBuf,
        /// Lexicon CSV; the built-in lexicon when omitted.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the report bundle.
    Report {
        corpus: PathBuf,
        edges: PathBuf,
        #[arg(long)]
        confidences: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Story hashtags, comma separated (overrides the config).
        #[arg(long, value_delimiter = ',')]
        story: Option<Vec<String>>,
    },
    /// Run one statistical test on CSV columns.
    Stats(StatsCli),
}

#[derive(Args)]
struct DetectorFlags {
    #[arg(long)]
    hashtag_k: Option<usize>,
    #[arg(long)]
    retweet_top_frac: Option<f64>,
    #[arg(long)]
    retweet_min: Option<usize>,
    #[arg(long)]
    time_bin_minutes: Option<u32>,
    #[arg(long)]
    time_threshold: Option<f64>,
    #[arg(long)]
    time_min: Option<usize>,
    /// Detectors to run, comma separated.
    #[arg(long, value_delimiter = ',')]
    detectors: Option<Vec<String>>,
    /// Detectors to skip, comma separated.
    #[arg(long, value_delimiter = ',')]
    disable: Option<Vec<String>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TestName {
    Spearman,
    Mwu,
    Roc,
    Kappa,
    Bootstrap,
    Reshuffle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sidedness {
    TwoSided,
    Less,
    Greater,
}

#[derive(Args)]
struct StatsCli {
    test: TestName,
    input: PathBuf,
    /// Value column, or score column for roc/reshuffle.
    #[arg(long)]
    x: Option<String>,
    /// Second value column, or 0/1 label column for roc/reshuffle.
    #[arg(long)]
    y: Option<String>,
    /// Annotator columns for kappa, comma separated.
    #[arg(long, value_delimiter = ',')]
    columns: Vec<String>,
    #[arg(long, value_enum, default_value = "two-sided")]
    alternative: Sidedness,
    #[arg(long, default_value_t = 1000)]
    resamples: usize,
    #[arg(long, default_value_t = 10)]
    splits: usize,
    #[arg(long, default_value_t = 0.5)]
    train_frac: f64,
}

fn apply_detector_flags(cfg: &mut Config, f: &DetectorFlags) {
    macro_rules! set {
        ($($field:ident),*) => {$(if let Some(v) = f.$field.clone() { cfg.$field = v; })*};
    }
    set!(hashtag_k, retweet_top_frac, retweet_min, time_bin_minutes, time_threshold, time_min, detectors);
    if let Some(off) = &f.disable {
        cfg.detectors.retain(|d| !off.contains(d));
    }
}

fn run(cli: Cli) -> Result<serde_json::Value> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let strict = cli.strict;
    match cli.command {
        Command::Ingest { input, out } => pipeline::cmd_ingest(&IngestArgs { input, out, strict }, &cfg),
        Command::Detect { corpus, out, params } => {
            apply_detector_flags(&mut cfg, &params);
            cfg.validate()?;
            pipeline::cmd_detect(&DetectArgs { corpus, out, strict }, &cfg)
        }
        Command::Cluster { corpus, edges, out } => pipeline::cmd_cluster(&ClusterArgs { corpus, edges, out, strict }, &cfg),
        Command::Score { corpus, lexicon, out } => pipeline::cmd_score(&ScoreArgs { corpus, lexicon, out, strict }, &cfg),
        Command::Report { corpus, edges, confidences, out, story } => {
            if let Some(s) = story {
                cfg.story_hashtags = s;
            }
            pipeline::cmd_report(&ReportArgs { corpus, edges, confidences, out, strict }, &cfg)
        }
        Command::Stats(s) => {
            let test = match s.test {
                TestName::Spearman => StatTest::Spearman,
                TestName::Mwu => StatTest::MannWhitney,
                TestName::Roc => StatTest::Roc,
                TestName::Kappa => StatTest::Kappa,
                TestName::Bootstrap => StatTest::Bootstrap,
                TestName::Reshuffle => StatTest::Reshuffle,
            };
            let alternative = match s.alternative {
                Sidedness::TwoSided => Alternative::TwoSided,
                Sidedness::Less => Alternative::Less,
                Sidedness::Greater => Alternative::Greater,
            };
            let args = StatsArgs {
                test,
                x: s.x,
                y: s.y,
                columns: s.columns,
                alternative,
                resamples: s.resamples,
                splits: s.splits,
                train_frac: s.train_frac,
                seed: cfg.seed,
            };
            if !s.input.exists() {
                return Err(Error::MissingInput(s.input.display().to_string()));
            }
            let file = std::fs::File::open(&s.input).map_err(|e| Error::io(&s.input, e))?;
            adhoc::run(&args, std::io::BufReader::new(file), &s.input.display().to_string())
        }
    }
}

fn report_error(e: &Error, json_errors: bool) {
    let mut stderr = std::io::stderr().lock();
    if json_errors {
        let v = serde_json::json!({
            "error": e.kind(),
            "message": e.to_string(),
            "line": e.line(),
            "exit_code": e.exit_code(),
        });
        let _ = writeln!(stderr, "{v}");
    } else {
        let _ = writeln!(stderr, "error: {e}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_errors = cli.json_errors;
    let pool = match cli.threads {
        Some(0) => {
            report_error(&Error::Config("--threads must be >= 1".into()), json_errors);
            return ExitCode::from(1);
        }
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            report_error(&Error::Internal(e.to_string()), json_errors);
            return ExitCode::from(3);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(summary) => {
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            report_error(&e, json_errors);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
