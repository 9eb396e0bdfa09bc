//! `tweetq` command-line front end. Each subcommand is one pipeline stage; stages talk
//! only through files.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;

pub use config::{ConfigError, RunConfig, KEYS};

#[derive(Debug, Parser)]
#[command(
    name = "tweetq",
    version,
    about = "Tweet-sentiment price prediction with tabular Q-learning"
)]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Generate a seeded synthetic corpus: <out>/tweets.<fmt> and <out>/prices.csv
    Synth,
    /// Clean and deduplicate a corpus, dropping tweets outside the price window
    Preprocess,
    /// Keep each day's top half by --attribute; writes <out> and <out>.meta.json
    Split,
    /// Score daily sentiment over a corpus into a signals CSV
    Sentiment,
    /// Train the agent on the training part of prices + signals
    Train,
    /// Greedy predictions for the test part: date,actual,predicted
    Predict,
    /// Six-metric report from --predictions, --actual/--predicted, or --model
    Evaluate,
    /// Classic vs proposed comparison under a time budget or a VAF target
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Synth => "synth",
            Command::Preprocess => "preprocess",
            Command::Split => "split",
            Command::Sentiment => "sentiment",
            Command::Train => "train",
            Command::Predict => "predict",
            Command::Evaluate => "evaluate",
            Command::Compare => "compare",
        }
    }
}

/// Flags map one-to-one onto config keys (`--target-vaf` is `target_vaf`).
#[derive(Debug, Default, Args)]
pub struct Flags {
    /// Config file of `key = value` lines
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Set any config key; repeatable
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// sdr|rdr|cdr
    #[arg(long, global = true)]
    pub reward: Option<String>,
    /// followers|comments|likes|retweets
    #[arg(long, global = true)]
    pub attribute: Option<String>,
    /// price-sentiment|price-only
    #[arg(long, global = true)]
    pub state: Option<String>,
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<String>,
    #[arg(long, global = true, value_name = "PATH")]
    pub tweets: Option<String>,
    #[arg(long, global = true, value_name = "PATH")]
    pub prices: Option<String>,
    #[arg(long, global = true, value_name = "PATH")]
    pub signals: Option<String>,
    #[arg(long, global = true, value_name = "PATH")]
    pub model: Option<String>,
    #[arg(long, global = true, value_name = "PATH")]
    pub predictions: Option<String>,
    #[arg(long, global = true, value_name = "PATH")]
    pub actual: Option<String>,
    #[arg(long, global = true, value_name = "PATH")]
    pub predicted: Option<String>,
    #[arg(long, global = true, value_name = "PATH")]
    pub lexicon: Option<String>,
    /// Prefix for profiler sample CSVs written by `compare`
    #[arg(long, global = true, value_name = "PATH")]
    pub samples: Option<String>,
    /// csv|jsonl
    #[arg(long, global = true)]
    pub format: Option<String>,
    #[arg(long, global = true)]
    pub episodes: Option<String>,
    /// time|target
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// Seconds per approach in time mode
    #[arg(long, global = true)]
    pub budget: Option<String>,
    /// Target VAF (%) in target mode
    #[arg(long, global = true)]
    pub target_vaf: Option<String>,
    /// Seconds per approach in target mode
    #[arg(long, global = true)]
    pub timeout: Option<String>,
    #[arg(long, global = true)]
    pub days: Option<String>,
    #[arg(long, global = true)]
    pub tweets_per_day: Option<String>,
}

impl Flags {
    /// `--set` pairs first, then the named flags, so a named flag wins over `--set`.
    pub fn overrides(&self) -> Result<Vec<(String, String)>, ConfigError> {
        let mut out = Vec::new();
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| ConfigError::Syntax {
                origin: "--set".into(),
                text: kv.clone(),
            })?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        let named = [
            ("seed", &self.seed),
            ("reward", &self.reward),
            ("attribute", &self.attribute),
            ("state", &self.state),
            ("out", &self.out),
            ("tweets", &self.tweets),
            ("prices", &self.prices),
            ("signals", &self.signals),
            ("model", &self.model),
            ("predictions", &self.predictions),
            ("actual", &self.actual),
            ("predicted", &self.predicted),
            ("lexicon", &self.lexicon),
            ("samples", &self.samples),
            ("format", &self.format),
            ("episodes", &self.episodes),
            ("mode", &self.mode),
            ("budget", &self.budget),
            ("target_vaf", &self.target_vaf),
            ("timeout", &self.timeout),
            ("days", &self.days),
            ("tweets_per_day", &self.tweets_per_day),
        ];
        for (key, value) in named {
            if let Some(v) = value {
                out.push((key.to_string(), v.clone()));
            }
        }
        Ok(out)
    }
}

/// Failure of one invocation; usage errors exit 2, everything else 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Runtime(_) => "runtime",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Runtime(e) => {
                // Core errors already print their source inline; skip causes seen so far.
                let mut msg = e.to_string();
                for cause in e.chain().skip(1) {
                    let text = cause.to_string();
                    if !msg.contains(&text) {
                        msg = format!("{msg}: {text}");
                    }
                }
                msg
            }
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

fn report(err: &CliError, command: Option<Command>) {
    let line = serde_json::json!({
        "error": {
            "kind": err.kind(),
            "command": command.map(Command::name),
            "message": err.message(),
            "exit_code": err.exit_code(),
        }
    });
    let _ = writeln!(std::io::stderr(), "{line}");
}

/// Parses `argv` (program name first), runs one subcommand and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let resolved = cli
        .flags
        .overrides()
        .and_then(|o| RunConfig::resolve(cli.flags.config.as_deref(), &o));
    let cfg = match resolved {
        Ok(cfg) => cfg,
        Err(e) => {
            report(&e.into(), Some(cli.command));
            return 2;
        }
    };
    match commands::dispatch(cli.command, &cfg) {
        Ok(()) => 0,
        Err(e) => {
            report(&e, Some(cli.command));
            e.exit_code()
        }
    }
}
