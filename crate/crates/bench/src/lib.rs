//! Shared inputs for the stage benchmarks.

use tweetq_core::compare::{prepare, Prepared};
use tweetq_core::qlearn::AgentConfig;
use tweetq_core::{gen_corpus, PriceSeries, SynthConfig, TweetRecord};

/// A seeded synthetic corpus of `days` days with `tweets_per_day` tweets each.
pub fn corpus(days: u32, tweets_per_day: u32) -> (Vec<TweetRecord>, PriceSeries) {
    gen_corpus(&SynthConfig {
        days,
        tweets_per_day,
        seed: 7,
        ..SynthConfig::default()
    })
    .expect("valid synth config")
}

pub fn prepared(days: u32, tweets_per_day: u32) -> Prepared {
    let (tweets, prices) = corpus(days, tweets_per_day);
    prepare(tweets, &prices)
}

/// The agent settings of `configs/experiment.conf`.
pub fn agent() -> AgentConfig {
    AgentConfig {
        gamma: 0.0,
        theta: 0.02,
        action_min: -10,
        action_max: 10,
        episodes: 2000,
        price_bucket_width: 25_000.0,
        seed: 0,
        ..AgentConfig::default()
    }
}
