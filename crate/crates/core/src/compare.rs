//! Classic (all tweets) vs proposed (follower top half) comparison under a wall-clock budget
//! or a VAF target, each approach run sequentially under the profiler.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attribute::{rank_and_halve, Attribute};
use crate::corpus::{bucket_by_day, DayBucket, PriceSeries, TweetRecord};
use crate::metrics::{evaluate, vaf, EvalReport, MetricError};
use crate::preprocess::{clean_buckets, dedup, CleanTweet};
use crate::profiler::{self, ProfilerError, ResourceReport};
use crate::qlearn::{
    predict_series, AgentConfig, AgentError, Dataset, QModel, RewardKind, Trainer,
};
use crate::sentiment::{daily_signals, DailySignal, Lexicon};

/// Shortest accepted fixed-time budget, in seconds.
pub const MIN_BUDGET_SECONDS: f64 = 10.0;

#[derive(Debug, Error)]
pub enum CompareError {
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Profiler(#[from] ProfilerError),
    #[error("invalid comparison config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Approach {
    Classic,
    Proposed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompareMode {
    FixedTime,
    FixedTarget,
}

/// Cleaned, deduplicated tweets bucketed onto the price days.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub prices: PriceSeries,
    pub buckets: Vec<DayBucket<CleanTweet>>,
    /// Tweets outside the price window.
    pub out_of_window: usize,
    /// Tweets whose text cleaned to nothing.
    pub emptied: usize,
}

pub fn prepare(tweets: Vec<TweetRecord>, prices: &PriceSeries) -> Prepared {
    prepare_filtered(tweets, prices, None)
}

/// Like [`prepare`], but with `filter` set only each day's top half by that attribute is
/// cleaned. Attribute values do not depend on text, so ranking the raw records first
/// spares the work of cleaning the discarded half.
pub fn prepare_filtered(
    tweets: Vec<TweetRecord>,
    prices: &PriceSeries,
    filter: Option<Attribute>,
) -> Prepared {
    let bucketing = bucket_by_day(tweets, prices);
    let buckets = match filter {
        None => bucketing.buckets,
        Some(attr) => bucketing
            .buckets
            .into_iter()
            .map(|b| rank_and_halve(b, attr))
            .collect(),
    };
    let (cleaned, emptied) = clean_buckets(buckets);
    Prepared {
        prices: prices.clone(),
        buckets: dedup(cleaned),
        out_of_window: bucketing.out_of_window,
        emptied,
    }
}

/// Daily signals over all tweets (`None`) or each day's top half by `filter`; the second
/// value is the number of tweets scored.
pub fn score_selection(
    buckets: &[DayBucket<CleanTweet>],
    filter: Option<Attribute>,
    lex: &Lexicon,
) -> (Vec<DailySignal>, usize) {
    match filter {
        None => {
            let used = buckets.iter().map(DayBucket::len).sum();
            (daily_signals(buckets, lex), used)
        }
        Some(attr) => {
            let halved: Vec<DayBucket<CleanTweet>> = buckets
                .iter()
                .map(|b| rank_and_halve(b.clone(), attr))
                .collect();
            let used = halved.iter().map(DayBucket::len).sum();
            (daily_signals(&halved, lex), used)
        }
    }
}

/// Greedy test-split predictions and their metrics.
pub fn evaluate_model(
    model: &QModel,
    test: &Dataset,
) -> Result<(Vec<f64>, EvalReport), CompareError> {
    let predictions = predict_series(model, &test.prices, &test.signals)?;
    let report = evaluate(&test.targets(), &predictions)?;
    Ok((predictions, report))
}

/// One train/test run of the pipeline.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub model: QModel,
    pub predictions: Vec<f64>,
    pub report: EvalReport,
    pub tweets_utilized: usize,
}

pub fn run_pipeline(
    prepared: &Prepared,
    filter: Option<Attribute>,
    lex: &Lexicon,
    kind: RewardKind,
    agent: &AgentConfig,
    train_fraction: f64,
) -> Result<PipelineRun, CompareError> {
    let (signals, tweets_utilized) = score_selection(&prepared.buckets, filter, lex);
    let (train, test) = Dataset::new(prepared.prices.clone(), signals)?.split(train_fraction)?;
    let (model, _) = crate::qlearn::train(&train.prices, &train.signals, kind, agent.clone())?;
    let (predictions, report) = evaluate_model(&model, &test)?;
    Ok(PipelineRun {
        model,
        predictions,
        report,
        tweets_utilized,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub agent: AgentConfig,
    pub reward: RewardKind,
    /// Attribute the proposed approach filters on.
    pub attribute: Attribute,
    pub train_fraction: f64,
    /// Profiler sampling interval, seconds.
    pub profile_interval: f64,
    /// Per-approach limit for target runs, seconds.
    pub timeout_seconds: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            agent: AgentConfig::default(),
            reward: RewardKind::Cdr,
            attribute: Attribute::Followers,
            train_fraction: 0.7,
            profile_interval: profiler::DEFAULT_INTERVAL,
            timeout_seconds: 600.0,
        }
    }
}

impl CompareConfig {
    pub fn validate(&self) -> Result<(), CompareError> {
        self.agent.validate()?;
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(CompareError::Config(format!(
                "train_fraction {} not in (0, 1)",
                self.train_fraction
            )));
        }
        if !(self.profile_interval > 0.0 && self.profile_interval.is_finite()) {
            return Err(CompareError::Config(
                "profile_interval must be positive".into(),
            ));
        }
        if !(self.timeout_seconds > 0.0 && self.timeout_seconds.is_finite()) {
            return Err(CompareError::Config(
                "timeout_seconds must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproachReport {
    pub approach: Approach,
    pub tweets_utilized: usize,
    pub wall_seconds: f64,
    pub final_vaf: f64,
    pub episodes: u32,
    /// Target runs: whether the target was reached before the timeout.
    pub converged: Option<bool>,
    /// Fixed-time runs: whether the budget ran out before the configured episodes.
    pub budget_exhausted: Option<bool>,
    pub eval: EvalReport,
    pub resources: ResourceReport,
    /// Greedy test-split predictions behind `final_vaf`.
    pub predictions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub mode: CompareMode,
    pub budget_seconds: Option<f64>,
    pub target_vaf: Option<f64>,
    pub reward: RewardKind,
    /// Actual test-split prices the predictions are scored against.
    pub actual: Vec<f64>,
    pub classic: ApproachReport,
    pub proposed: ApproachReport,
}

/// Outcome of [`train_to_target`].
#[derive(Debug, Clone)]
pub struct TargetRun {
    pub model: QModel,
    pub episodes: u32,
    pub converged: bool,
    pub predictions: Vec<f64>,
    pub report: EvalReport,
}

/// Trains one episode at a time until the test VAF reaches `target_vaf` or `timeout`
/// passes. Episodes past `agent.episodes` keep the final epsilon. A `warm_start` model that
/// already meets the target returns without training.
pub fn train_to_target(
    train: &Dataset,
    test: &Dataset,
    kind: RewardKind,
    agent: &AgentConfig,
    target_vaf: f64,
    timeout: Duration,
    warm_start: Option<QModel>,
) -> Result<TargetRun, CompareError> {
    let started = Instant::now();
    let model = match warm_start {
        Some(m) => m,
        None => QModel::new(agent.clone())?,
    };
    let (predictions, report) = evaluate_model(&model, test)?;
    if report.vaf >= target_vaf {
        return Ok(TargetRun {
            model,
            episodes: 0,
            converged: true,
            predictions,
            report,
        });
    }
    let mut trainer = Trainer::with_model(model, &train.prices, &train.signals, kind)?;
    loop {
        trainer.run_episode()?;
        let (predictions, report) = evaluate_model(trainer.model(), test)?;
        let converged = report.vaf >= target_vaf;
        if converged || started.elapsed() >= timeout {
            let episodes = trainer.episodes_done();
            return Ok(TargetRun {
                model: trainer.into_parts().0,
                episodes,
                converged,
                predictions,
                report,
            });
        }
    }
}

fn approach_filter(approach: Approach, cfg: &CompareConfig) -> Option<Attribute> {
    match approach {
        Approach::Classic => None,
        Approach::Proposed => Some(cfg.attribute),
    }
}

struct ApproachOutcome {
    tweets_utilized: usize,
    episodes: u32,
    converged: Option<bool>,
    budget_exhausted: Option<bool>,
    predictions: Vec<f64>,
    eval: EvalReport,
    actual: Vec<f64>,
}

fn profiled(
    interval: f64,
    approach: Approach,
    run: impl FnOnce() -> Result<ApproachOutcome, CompareError>,
) -> Result<(ApproachReport, Vec<f64>), CompareError> {
    let mut handle = profiler::start(interval)?;
    let started = Instant::now();
    let outcome = run();
    let wall_seconds = started.elapsed().as_secs_f64();
    let resources = handle.stop()?;
    let o = outcome?;
    log::info!(
        "{approach:?}: {} tweets, {} episodes, vaf {:.3}, {wall_seconds:.2}s",
        o.tweets_utilized,
        o.episodes,
        o.eval.vaf
    );
    Ok((
        ApproachReport {
            approach,
            tweets_utilized: o.tweets_utilized,
            wall_seconds,
            final_vaf: o.eval.vaf,
            episodes: o.episodes,
            converged: o.converged,
            budget_exhausted: o.budget_exhausted,
            eval: o.eval,
            resources,
            predictions: o.predictions,
        },
        o.actual,
    ))
}

/// Trains both approaches for `agent.episodes` episodes each, stopping early if an
/// approach uses up `budget_seconds` of wall-clock time.
pub fn run_fixed_time(
    tweets: &[TweetRecord],
    prices: &PriceSeries,
    lex: &Lexicon,
    budget_seconds: f64,
    cfg: &CompareConfig,
) -> Result<ComparisonReport, CompareError> {
    cfg.validate()?;
    if !(budget_seconds >= MIN_BUDGET_SECONDS && budget_seconds.is_finite()) {
        return Err(CompareError::Config(format!(
            "budget must be at least {MIN_BUDGET_SECONDS}s, got {budget_seconds}"
        )));
    }
    let budget = Duration::from_secs_f64(budget_seconds);
    let run = |approach: Approach| {
        let tweets = tweets.to_vec();
        profiled(cfg.profile_interval, approach, || {
            let started = Instant::now();
            let prepared = prepare_filtered(tweets, prices, approach_filter(approach, cfg));
            let (signals, tweets_utilized) = score_selection(&prepared.buckets, None, lex);
            let (train, test) =
                Dataset::new(prepared.prices, signals)?.split(cfg.train_fraction)?;
            let mut trainer =
                Trainer::new(&train.prices, &train.signals, cfg.reward, cfg.agent.clone())?;
            while trainer.episodes_done() < cfg.agent.episodes && started.elapsed() < budget {
                trainer.run_episode()?;
            }
            let episodes = trainer.episodes_done();
            let (predictions, eval) = evaluate_model(trainer.model(), &test)?;
            Ok(ApproachOutcome {
                tweets_utilized,
                episodes,
                converged: None,
                budget_exhausted: Some(episodes < cfg.agent.episodes),
                predictions,
                eval,
                actual: test.targets(),
            })
        })
    };
    let (classic, actual) = run(Approach::Classic)?;
    let (proposed, _) = run(Approach::Proposed)?;
    Ok(ComparisonReport {
        mode: CompareMode::FixedTime,
        budget_seconds: Some(budget_seconds),
        target_vaf: None,
        reward: cfg.reward,
        actual,
        classic,
        proposed,
    })
}

/// Runs each approach until its test VAF reaches `target_vaf` or `cfg.timeout_seconds`
/// passes. `warm_start`, if given, seeds both approaches' tables.
pub fn run_to_target(
    tweets: &[TweetRecord],
    prices: &PriceSeries,
    lex: &Lexicon,
    target_vaf: f64,
    cfg: &CompareConfig,
    warm_start: Option<&QModel>,
) -> Result<ComparisonReport, CompareError> {
    cfg.validate()?;
    if !target_vaf.is_finite() {
        return Err(CompareError::Config(format!(
            "target VAF {target_vaf} is not finite"
        )));
    }
    let timeout = Duration::from_secs_f64(cfg.timeout_seconds);
    let run = |approach: Approach| {
        let tweets = tweets.to_vec();
        let warm = warm_start.cloned();
        profiled(cfg.profile_interval, approach, || {
            let started = Instant::now();
            let prepared = prepare_filtered(tweets, prices, approach_filter(approach, cfg));
            let (signals, tweets_utilized) = score_selection(&prepared.buckets, None, lex);
            let (train, test) =
                Dataset::new(prepared.prices, signals)?.split(cfg.train_fraction)?;
            let remaining = timeout.saturating_sub(started.elapsed());
            let run = train_to_target(
                &train, &test, cfg.reward, &cfg.agent, target_vaf, remaining, warm,
            )?;
            Ok(ApproachOutcome {
                tweets_utilized,
                episodes: run.episodes,
                converged: Some(run.converged),
                budget_exhausted: None,
                predictions: run.predictions,
                eval: run.report,
                actual: test.targets(),
            })
        })
    };
    let (classic, actual) = run(Approach::Classic)?;
    let (proposed, _) = run(Approach::Proposed)?;
    Ok(ComparisonReport {
        mode: CompareMode::FixedTarget,
        budget_seconds: None,
        target_vaf: Some(target_vaf),
        reward: cfg.reward,
        actual,
        classic,
        proposed,
    })
}

/// VAF recomputed from a report's stored series.
pub fn recompute_vaf(report: &ComparisonReport, approach: Approach) -> Result<f64, MetricError> {
    let r = match approach {
        Approach::Classic => &report.classic,
        Approach::Proposed => &report.proposed,
    };
    vaf(&report.actual, &r.predictions)
}
