//! Tweet-sentiment Bitcoin price prediction with tabular Q-learning.
//!
//! Pipeline: load a tweet corpus and daily prices ([`corpus`]), normalize tweet text
//! ([`preprocess`]), keep each day's top half by an engagement attribute ([`attribute`]),
//! score daily sentiment ([`sentiment`]), train and run the agent ([`qlearn`]), and score
//! predictions ([`metrics`]). [`synth`] generates seeded corpora, [`profiler`] samples
//! resource usage and [`compare`] runs the all-tweets vs filtered-tweets experiments.

// `!(x > 0.0)` is used on purpose so NaN fails the check too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attribute;
pub mod compare;
pub mod corpus;
pub mod metrics;
pub mod preprocess;
pub mod profiler;
pub mod qlearn;
pub mod sentiment;
pub mod synth;

pub use attribute::{build_dataset, rank_and_halve, Attribute, FilteredCorpus};
pub use compare::{run_fixed_time, run_to_target, Approach, CompareConfig, ComparisonReport};
pub use corpus::{
    bucket_by_day, load_prices, load_tweets, write_prices, write_tweets, CorpusError, CorpusFormat,
    DayBucket, PricePoint, PriceSeries, TweetRecord,
};
pub use metrics::{evaluate, EvalReport, MetricError};
pub use preprocess::{clean, clean_buckets, dedup, CleanTweet};
pub use profiler::{ProfilerError, ResourceReport};
pub use qlearn::{
    predict_series, train, AgentConfig, AgentError, Dataset, QModel, RewardKind, StateMode,
    TrainLog,
};
pub use sentiment::{daily_signals, DailySignal, Lexicon, SentimentError};
pub use synth::{gen_corpus, SynthConfig};
