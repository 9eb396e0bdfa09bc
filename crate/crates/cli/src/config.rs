//! Layered run configuration: built-in defaults, then a `key = value` file, then flags.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;
use tweetq_core::compare::{CompareMode, MIN_BUDGET_SECONDS};
use tweetq_core::{AgentConfig, Attribute, CorpusFormat, RewardKind, StateMode, SynthConfig};

/// Every key the config file and `--set` accept.
pub const KEYS: &[&str] = &[
    // agent
    "gamma",
    "theta",
    "action_min",
    "action_max",
    "epsilon_start",
    "epsilon_end",
    "episodes",
    "price_bucket_width",
    "price_max",
    "sentiment_bins",
    "state",
    "seed",
    // synthetic corpus
    "days",
    "tweets_per_day",
    "rho",
    "base_price",
    "daily_vol",
    "reversion",
    "start_date",
    // run
    "reward",
    "attribute",
    "train_fraction",
    "format",
    // compare
    "mode",
    "budget",
    "target_vaf",
    "timeout",
    "profile_interval",
    // paths
    "tweets",
    "prices",
    "signals",
    "model",
    "predictions",
    "actual",
    "predicted",
    "lexicon",
    "samples",
    "out",
];

const PATH_KEYS: &[&str] = &[
    "tweets",
    "prices",
    "signals",
    "model",
    "predictions",
    "actual",
    "predicted",
    "lexicon",
    "samples",
    "out",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: expected `key = value`, got `{text}`")]
    Syntax { origin: String, text: String },
    #[error("{origin}: unknown key `{key}`")]
    UnknownKey { origin: String, key: String },
    #[error("{origin}: key `{key}` given twice")]
    Duplicate { origin: String, key: String },
    #[error("{origin}: invalid value for `{key}`: {reason}")]
    Invalid {
        origin: String,
        key: String,
        reason: String,
    },
    #[error("{0}")]
    Check(String),
    #[error("`{command}` needs `{key}` (set --{flag} or `{key}` in the config file)")]
    Missing {
        command: &'static str,
        key: &'static str,
        flag: String,
    },
}

/// Where a value came from, for error messages.
#[derive(Debug, Clone)]
pub enum Origin {
    File { path: PathBuf, line: usize },
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File { path, line } => write!(f, "{}:{line}", path.display()),
            Origin::Flag => f.write_str("command line"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Paths {
    pub tweets: Option<PathBuf>,
    pub prices: Option<PathBuf>,
    pub signals: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
    pub actual: Option<PathBuf>,
    pub predicted: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    /// Prefix for per-approach profiler sample CSVs.
    pub samples: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub agent: AgentConfig,
    pub synth: SynthConfig,
    pub reward: RewardKind,
    pub attribute: Attribute,
    pub train_fraction: f64,
    /// Output corpus format; `None` picks it from the output file extension.
    pub format: Option<CorpusFormat>,
    pub mode: CompareMode,
    pub budget: Option<f64>,
    pub target_vaf: Option<f64>,
    pub timeout: f64,
    pub profile_interval: f64,
    pub paths: Paths,
}

impl Default for RunConfig {
    fn default() -> Self {
        let agent = AgentConfig::default();
        let synth = SynthConfig {
            seed: agent.seed,
            ..SynthConfig::default()
        };
        RunConfig {
            agent,
            synth,
            reward: RewardKind::Cdr,
            attribute: Attribute::Followers,
            train_fraction: 0.7,
            format: None,
            mode: CompareMode::FixedTime,
            budget: None,
            target_vaf: None,
            timeout: 600.0,
            profile_interval: 1.0,
            paths: Paths::default(),
        }
    }
}

fn parse<T: FromStr>(origin: &Origin, key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| ConfigError::Invalid {
        origin: origin.to_string(),
        key: key.to_string(),
        reason: format!("`{value}`: {e}"),
    })
}

fn parse_mode(value: &str) -> Result<CompareMode, String> {
    match value {
        "time" => Ok(CompareMode::FixedTime),
        "target" => Ok(CompareMode::FixedTarget),
        other => Err(format!("unknown mode `{other}` (expected time|target)")),
    }
}

impl RunConfig {
    /// Defaults, then `file` if given, then `overrides` in order.
    pub fn resolve(
        file: Option<&Path>,
        overrides: &[(String, String)],
    ) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = file {
            cfg.apply_file(path)?;
        }
        for (key, value) in overrides {
            cfg.set(key, value, &Origin::Flag, None)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Relative paths in the file resolve against the file's directory.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().filter(|p| !p.as_os_str().is_empty());
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let origin = Origin::File {
                path: path.to_path_buf(),
                line: i + 1,
            };
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                origin: origin.to_string(),
                text: line.to_string(),
            })?;
            let key = key.trim();
            let value = value.trim();
            let value = value
                .strip_prefix('"')
                .and_then(|v| v.strip_suffix('"'))
                .unwrap_or(value);
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::Duplicate {
                    origin: origin.to_string(),
                    key: key.to_string(),
                });
            }
            self.set(key, value, &origin, base)?;
        }
        Ok(())
    }

    pub fn set(
        &mut self,
        key: &str,
        value: &str,
        origin: &Origin,
        base: Option<&Path>,
    ) -> Result<(), ConfigError> {
        if PATH_KEYS.contains(&key) {
            let p = PathBuf::from(value);
            let p = match base {
                Some(dir) if p.is_relative() => dir.join(p),
                _ => p,
            };
            let slot = match key {
                "tweets" => &mut self.paths.tweets,
                "prices" => &mut self.paths.prices,
                "signals" => &mut self.paths.signals,
                "model" => &mut self.paths.model,
                "predictions" => &mut self.paths.predictions,
                "actual" => &mut self.paths.actual,
                "predicted" => &mut self.paths.predicted,
                "lexicon" => &mut self.paths.lexicon,
                "samples" => &mut self.paths.samples,
                _ => &mut self.paths.out,
            };
            *slot = Some(p);
            return Ok(());
        }
        let o = origin;
        match key {
            "gamma" => self.agent.gamma = parse(o, key, value)?,
            "theta" => self.agent.theta = parse(o, key, value)?,
            "action_min" => self.agent.action_min = parse(o, key, value)?,
            "action_max" => self.agent.action_max = parse(o, key, value)?,
            "epsilon_start" => self.agent.epsilon_start = parse(o, key, value)?,
            "epsilon_end" => self.agent.epsilon_end = parse(o, key, value)?,
            "episodes" => self.agent.episodes = parse(o, key, value)?,
            "price_bucket_width" => self.agent.price_bucket_width = parse(o, key, value)?,
            "price_max" => self.agent.price_max = parse(o, key, value)?,
            "sentiment_bins" => self.agent.sentiment_bins = parse(o, key, value)?,
            "state" => self.agent.state_mode = parse::<StateMode>(o, key, value)?,
            "seed" => {
                let seed: u64 = parse(o, key, value)?;
                self.agent.seed = seed;
                self.synth.seed = seed;
            }
            "days" => self.synth.days = parse(o, key, value)?,
            "tweets_per_day" => self.synth.tweets_per_day = parse(o, key, value)?,
            "rho" => self.synth.rho = parse(o, key, value)?,
            "base_price" => self.synth.base_price = parse(o, key, value)?,
            "daily_vol" => self.synth.daily_vol = parse(o, key, value)?,
            "reversion" => self.synth.reversion = parse(o, key, value)?,
            "start_date" => self.synth.start_date = parse(o, key, value)?,
            "reward" => self.reward = parse(o, key, value)?,
            "attribute" => self.attribute = parse(o, key, value)?,
            "train_fraction" => self.train_fraction = parse(o, key, value)?,
            "format" => self.format = Some(parse(o, key, value)?),
            "mode" => {
                self.mode = parse_mode(value).map_err(|reason| ConfigError::Invalid {
                    origin: o.to_string(),
                    key: key.to_string(),
                    reason,
                })?
            }
            "budget" => self.budget = Some(parse(o, key, value)?),
            "target_vaf" => self.target_vaf = Some(parse(o, key, value)?),
            "timeout" => self.timeout = parse(o, key, value)?,
            "profile_interval" => self.profile_interval = parse(o, key, value)?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    origin: o.to_string(),
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let check = |m: String| Err(ConfigError::Check(m));
        if let Err(e) = self.agent.validate() {
            return check(e.to_string());
        }
        if let Err(e) = self.synth.validate() {
            return check(e.to_string());
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return check(format!(
                "train_fraction {} not in (0, 1)",
                self.train_fraction
            ));
        }
        if !(self.timeout > 0.0 && self.timeout.is_finite()) {
            return check(format!("timeout {} must be positive", self.timeout));
        }
        if !(self.profile_interval > 0.0 && self.profile_interval.is_finite()) {
            return check(format!(
                "profile_interval {} must be positive",
                self.profile_interval
            ));
        }
        if let Some(b) = self.budget {
            if !(b >= MIN_BUDGET_SECONDS && b.is_finite()) {
                return check(format!(
                    "budget must be at least {MIN_BUDGET_SECONDS}s, got {b}"
                ));
            }
        }
        if let Some(t) = self.target_vaf {
            if !t.is_finite() {
                return check(format!("target_vaf {t} is not finite"));
            }
        }
        Ok(())
    }

    /// The path for `key`, or a usage error naming the subcommand that needs it.
    pub fn require(&self, command: &'static str, key: &'static str) -> Result<&Path, ConfigError> {
        let slot = match key {
            "tweets" => &self.paths.tweets,
            "prices" => &self.paths.prices,
            "signals" => &self.paths.signals,
            "model" => &self.paths.model,
            "predictions" => &self.paths.predictions,
            "actual" => &self.paths.actual,
            "predicted" => &self.paths.predicted,
            "lexicon" => &self.paths.lexicon,
            "samples" => &self.paths.samples,
            _ => &self.paths.out,
        };
        slot.as_deref().ok_or_else(|| ConfigError::Missing {
            command,
            key,
            flag: key.replace('_', "-"),
        })
    }
}
