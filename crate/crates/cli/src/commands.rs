//! One function per subcommand.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use tweetq_core::compare::{self, CompareMode};
use tweetq_core::corpus::TweetLoad;
use tweetq_core::qlearn::{load_model, save_model};
use tweetq_core::sentiment::{load_lexicon, load_signals, write_signals};
use tweetq_core::{
    bucket_by_day, build_dataset, clean_buckets, daily_signals, dedup, evaluate, gen_corpus,
    load_prices, load_tweets, predict_series, train, write_prices, write_tweets, Approach,
    CompareConfig, CorpusFormat, Dataset, EvalReport, Lexicon, PriceSeries, TweetRecord,
};

use crate::config::{ConfigError, RunConfig};
use crate::{CliError, Command};

type Result<T> = std::result::Result<T, CliError>;

pub fn dispatch(command: Command, cfg: &RunConfig) -> Result<()> {
    match command {
        Command::Synth => synth(cfg),
        Command::Preprocess => preprocess(cfg),
        Command::Split => split(cfg),
        Command::Sentiment => sentiment(cfg),
        Command::Train => train_cmd(cfg),
        Command::Predict => predict(cfg),
        Command::Evaluate => evaluate_cmd(cfg),
        Command::Compare => compare_cmd(cfg),
    }
}

fn ensure_parent(path: &Path) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

fn output_format(cfg: &RunConfig, path: &Path) -> CorpusFormat {
    cfg.format.unwrap_or_else(|| CorpusFormat::from_path(path))
}

fn prices(cfg: &RunConfig, command: &'static str) -> Result<PriceSeries> {
    let path = cfg.require(command, "prices")?;
    Ok(load_prices(path).with_context(|| format!("loading prices {}", path.display()))?)
}

/// Tweets inside the price window; the input format follows the file extension.
fn corpus(cfg: &RunConfig, command: &'static str, series: &PriceSeries) -> Result<TweetLoad> {
    let path = cfg.require(command, "tweets")?;
    let load = load_tweets(path, CorpusFormat::from_path(path), Some(&series.window()))
        .with_context(|| format!("loading tweets {}", path.display()))?;
    Ok(load)
}

fn lexicon(cfg: &RunConfig) -> Result<Lexicon> {
    match &cfg.paths.lexicon {
        None => Ok(Lexicon::shipped()),
        Some(p) => Ok(load_lexicon(p).with_context(|| format!("loading lexicon {}", p.display()))?),
    }
}

fn write_all_tweets(path: &Path, format: CorpusFormat, tweets: &[TweetRecord]) -> Result<()> {
    ensure_parent(path)?;
    write_tweets(path, format, tweets).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    ensure_parent(path)?;
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn synth(cfg: &RunConfig) -> Result<()> {
    let out = cfg.require("synth", "out")?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let (tweets, series) = gen_corpus(&cfg.synth).map_err(anyhow::Error::from)?;
    let format = cfg.format.unwrap_or(CorpusFormat::Csv);
    let ext = match format {
        CorpusFormat::Csv => "csv",
        CorpusFormat::Jsonl => "jsonl",
    };
    let tweets_path = out.join(format!("tweets.{ext}"));
    let prices_path = out.join("prices.csv");
    write_all_tweets(&tweets_path, format, &tweets)?;
    write_prices(&prices_path, &series)
        .with_context(|| format!("writing {}", prices_path.display()))?;
    eprintln!(
        "synth: {} tweets over {} days -> {}, {}",
        tweets.len(),
        series.len(),
        tweets_path.display(),
        prices_path.display()
    );
    Ok(())
}

fn preprocess(cfg: &RunConfig) -> Result<()> {
    let out = cfg.require("preprocess", "out")?;
    let series = prices(cfg, "preprocess")?;
    let load = corpus(cfg, "preprocess", &series)?;
    let total = load.records.len();
    let (cleaned, emptied) = clean_buckets(bucket_by_day(load.records, &series).buckets);
    let kept: Vec<TweetRecord> = dedup(cleaned)
        .iter()
        .flat_map(|b| b.tweets.iter().map(|t| t.to_record()))
        .collect();
    write_all_tweets(out, output_format(cfg, out), &kept)?;
    eprintln!(
        "preprocess: {total} in window ({} outside), {emptied} emptied, {} duplicates, {} kept -> {}",
        load.out_of_window,
        total - emptied - kept.len(),
        kept.len(),
        out.display()
    );
    Ok(())
}

/// `<out>.meta.json` next to `out`.
pub fn meta_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn split(cfg: &RunConfig) -> Result<()> {
    let out = cfg.require("split", "out")?;
    let series = prices(cfg, "split")?;
    let load = corpus(cfg, "split", &series)?;
    let tweets_in = load.records.len();
    let filtered = build_dataset(bucket_by_day(load.records, &series).buckets, cfg.attribute);
    let kept: Vec<TweetRecord> = filtered
        .buckets
        .into_iter()
        .flat_map(|b| b.tweets)
        .collect();
    write_all_tweets(out, output_format(cfg, out), &kept)?;
    let meta = serde_json::json!({
        "attribute": cfg.attribute,
        "source": cfg.paths.tweets.as_ref().map(|p| p.display().to_string()),
        "days": series.len(),
        "tweets_in": tweets_in,
        "tweets_out": kept.len(),
        "out_of_window": load.out_of_window,
    });
    write_json(&meta_path(out), &meta)?;
    eprintln!(
        "split: top half by {} keeps {} of {tweets_in} -> {}",
        cfg.attribute,
        kept.len(),
        out.display()
    );
    Ok(())
}

fn sentiment(cfg: &RunConfig) -> Result<()> {
    let out = cfg.require("sentiment", "out")?;
    let series = prices(cfg, "sentiment")?;
    let lex = lexicon(cfg)?;
    let load = corpus(cfg, "sentiment", &series)?;
    let (cleaned, _) = clean_buckets(bucket_by_day(load.records, &series).buckets);
    let buckets = dedup(cleaned);
    let signals = daily_signals(&buckets, &lex);
    ensure_parent(out)?;
    write_signals(out, &signals).with_context(|| format!("writing {}", out.display()))?;
    let scored: usize = signals.iter().map(|s| s.tweet_count).sum();
    eprintln!(
        "sentiment: {scored} tweets over {} days -> {}",
        signals.len(),
        out.display()
    );
    Ok(())
}

fn dataset(cfg: &RunConfig, command: &'static str) -> Result<Dataset> {
    let series = prices(cfg, command)?;
    let path = cfg.require(command, "signals")?;
    let signals =
        load_signals(path).with_context(|| format!("loading signals {}", path.display()))?;
    Ok(Dataset::new(series, signals).context("aligning prices and signals")?)
}

fn train_cmd(cfg: &RunConfig) -> Result<()> {
    let out = cfg.require("train", "out")?;
    let (train_part, _) = dataset(cfg, "train")?
        .split(cfg.train_fraction)
        .map_err(anyhow::Error::from)?;
    let (model, log) = train(
        &train_part.prices,
        &train_part.signals,
        cfg.reward,
        cfg.agent.clone(),
    )
    .context("training")?;
    ensure_parent(out)?;
    save_model(&model, out).with_context(|| format!("writing {}", out.display()))?;
    eprintln!(
        "train: {} episodes on {} days ({}), last mean reward {:.4} -> {}",
        cfg.agent.episodes,
        train_part.prices.len(),
        cfg.reward,
        log.episode_mean_reward.last().copied().unwrap_or(0.0),
        out.display()
    );
    Ok(())
}

/// Test-part dates, actual prices and greedy predictions from a saved model.
fn model_predictions(
    cfg: &RunConfig,
    command: &'static str,
) -> Result<(Vec<String>, Vec<f64>, Vec<f64>)> {
    let path = cfg.require(command, "model")?;
    let model = load_model(path).with_context(|| format!("loading model {}", path.display()))?;
    let (_, test) = dataset(cfg, command)?
        .split(cfg.train_fraction)
        .map_err(anyhow::Error::from)?;
    let predicted = predict_series(&model, &test.prices, &test.signals).context("predicting")?;
    let dates = test.prices.points()[1..]
        .iter()
        .map(|p| p.date.to_string())
        .collect();
    Ok((dates, test.targets(), predicted))
}

fn predict(cfg: &RunConfig) -> Result<()> {
    let out = cfg.require("predict", "out")?;
    let (dates, actual, predicted) = model_predictions(cfg, "predict")?;
    ensure_parent(out)?;
    let file = fs::File::create(out).with_context(|| format!("writing {}", out.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "date,actual,predicted").context("writing predictions")?;
    for ((d, a), p) in dates.iter().zip(&actual).zip(&predicted) {
        writeln!(w, "{d},{a:.2},{p:.2}").context("writing predictions")?;
    }
    w.flush().context("writing predictions")?;
    eprintln!("predict: {} days -> {}", predicted.len(), out.display());
    Ok(())
}

fn read_predictions(path: &Path) -> anyhow::Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .with_context(|| format!("{}: no `{name}` column", path.display()))
    };
    let (ai, pi) = (col("actual")?, col("predicted")?);
    let (mut actual, mut predicted) = (Vec::new(), Vec::new());
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let num = |c: usize| -> anyhow::Result<f64> {
            let raw = row.get(c).unwrap_or("").trim();
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .with_context(|| format!("{} line {}: bad number `{raw}`", path.display(), i + 2))
        };
        actual.push(num(ai)?);
        predicted.push(num(pi)?);
    }
    Ok((actual, predicted))
}

fn evaluate_cmd(cfg: &RunConfig) -> Result<()> {
    let p = &cfg.paths;
    let (actual, predicted) = if let Some(path) = &p.predictions {
        read_predictions(path)?
    } else if p.actual.is_some() || p.predicted.is_some() {
        let a = load_prices(cfg.require("evaluate", "actual")?).context("loading actual prices")?;
        let b = load_prices(cfg.require("evaluate", "predicted")?)
            .context("loading predicted prices")?;
        if a.dates() != b.dates() {
            return Err(anyhow::anyhow!(
                "actual covers {}..{} ({} days) but predicted covers {}..{} ({} days)",
                a.first_date(),
                a.last_date(),
                a.len(),
                b.first_date(),
                b.last_date(),
                b.len()
            )
            .into());
        }
        (a.prices(), b.prices())
    } else if p.model.is_some() {
        let (_, a, b) = model_predictions(cfg, "evaluate")?;
        (a, b)
    } else {
        return Err(CliError::Usage(
            "`evaluate` needs --predictions, --actual with --predicted, or --model with --prices and --signals"
                .into(),
        ));
    };
    let report: EvalReport = evaluate(&actual, &predicted).context("evaluating")?;
    print!("{}", report.to_table());
    if let Some(out) = &p.out {
        write_json(out, &report)?;
    }
    Ok(())
}

fn compare_cmd(cfg: &RunConfig) -> Result<()> {
    let out = cfg.require("compare", "out")?;
    let series = prices(cfg, "compare")?;
    let lex = lexicon(cfg)?;
    let tweets = corpus(cfg, "compare", &series)?.records;
    let ccfg = CompareConfig {
        agent: cfg.agent.clone(),
        reward: cfg.reward,
        attribute: cfg.attribute,
        train_fraction: cfg.train_fraction,
        profile_interval: cfg.profile_interval,
        timeout_seconds: cfg.timeout,
    };
    let report = match cfg.mode {
        CompareMode::FixedTime => {
            let budget = cfg.budget.ok_or_else(|| {
                CliError::from(ConfigError::Check(
                    "`compare --mode time` needs --budget".into(),
                ))
            })?;
            compare::run_fixed_time(&tweets, &series, &lex, budget, &ccfg)
        }
        CompareMode::FixedTarget => {
            let target = cfg.target_vaf.ok_or_else(|| {
                CliError::from(ConfigError::Check(
                    "`compare --mode target` needs --target-vaf".into(),
                ))
            })?;
            let warm = match &cfg.paths.model {
                Some(m) => {
                    Some(load_model(m).with_context(|| format!("loading model {}", m.display()))?)
                }
                None => None,
            };
            compare::run_to_target(&tweets, &series, &lex, target, &ccfg, warm.as_ref())
        }
    }
    .context("comparison")?;
    write_json(out, &report)?;
    if let Some(prefix) = &cfg.paths.samples {
        for r in [&report.classic, &report.proposed] {
            let mut name = prefix.as_os_str().to_os_string();
            name.push(format!("-{}.csv", approach_name(r.approach)));
            let path = PathBuf::from(name);
            ensure_parent(&path)?;
            r.resources
                .save_samples_csv(&path)
                .map_err(anyhow::Error::from)?;
        }
    }
    println!(
        "{:<10}{:>12}{:>12}{:>10}{:>10}{:>10}",
        "approach", "tweets", "seconds", "episodes", "vaf", "cpu_avg"
    );
    for r in [&report.classic, &report.proposed] {
        println!(
            "{:<10}{:>12}{:>12.2}{:>10}{:>10.2}{:>10.1}",
            approach_name(r.approach),
            r.tweets_utilized,
            r.wall_seconds,
            r.episodes,
            r.final_vaf,
            r.resources.cpu_pct.avg
        );
    }
    for r in [&report.classic, &report.proposed] {
        if r.converged == Some(false) {
            eprintln!(
                "compare: {} did not reach the target VAF before the timeout",
                approach_name(r.approach)
            );
        }
    }
    Ok(())
}

fn approach_name(a: Approach) -> &'static str {
    match a {
        Approach::Classic => "classic",
        Approach::Proposed => "proposed",
    }
}
