//! Seeded synthetic tweet corpus and daily price series.
//!
//! Each day `d` draws a latent shock `z_d`; the next day's log-return is
//! `daily_vol * z_d - reversion * ln(P_d / base_price)`. The half of each day's tweets with
//! the most followers carries one signed sentiment token each, and the share of positive
//! tokens tracks `rho * z_d + sqrt(1 - rho^2) * e_d`. The other half does the same with an
//! independent latent. Comments, likes and retweets are drawn independently of everything,
//! so only the follower ordering separates signal from noise.

use chrono::{Days, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{day_start, round_cents, PricePoint, PriceSeries, TweetRecord};

/// Shipped-lexicon tokens with valence +2.0 and -2.0.
pub const POSITIVE_TOKENS: [&str; 7] = [
    "bullish", "pump", "gains", "profit", "rally", "surge", "breakout",
];
pub const NEGATIVE_TOKENS: [&str; 7] = [
    "bearish", "dump", "crash", "loss", "scam", "panic", "selloff",
];

const FILLER: [&str; 24] = [
    "btc", "bitcoin", "price", "today", "market", "chart", "watching", "hodl", "crypto", "coin",
    "block", "trade", "volume", "moon", "sats", "exchange", "wallet", "news", "update", "looking",
    "now", "just", "the", "on",
];
const HASHTAGS: [&str; 4] = ["#bitcoin", "#btc", "#crypto", "#blockchain"];
const CONSONANTS: &[u8; 16] = b"bdfghjklmnprstvz";

/// Latent values at or beyond this many standard deviations saturate the token mix.
const LATENT_CLIP: f64 = 2.2;
/// Fraction of the positive/negative range the latent can move the token mix.
const MIX_RANGE: f64 = 0.83;
const SECONDS_PER_DAY: i64 = 86_400;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid synth config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub days: u32,
    pub tweets_per_day: u32,
    /// Correlation between the follower-half latent and the next day's shock.
    pub rho: f64,
    pub base_price: f64,
    /// Standard deviation of the daily log-return shock.
    pub daily_vol: f64,
    /// Pull of log-price back toward `ln(base_price)` per day.
    pub reversion: f64,
    pub start_date: NaiveDate,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            days: 1000,
            tweets_per_day: 200,
            rho: 0.8,
            base_price: 10_000.0,
            daily_vol: 0.04,
            reversion: 0.01,
            start_date: NaiveDate::from_ymd_opt(2014, 4, 1).expect("valid date"),
            seed: 42,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let fail = |m: String| Err(SynthError::Config(m));
        if self.days < 2 {
            return fail(format!("days must be at least 2, got {}", self.days));
        }
        if self.tweets_per_day == 0 {
            return fail("tweets_per_day must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return fail(format!("rho {} not in [0, 1]", self.rho));
        }
        if !(self.base_price >= 1.0 && self.base_price.is_finite()) {
            return fail(format!("base_price {} must be at least 1", self.base_price));
        }
        if !(self.daily_vol > 0.0 && self.daily_vol < 1.0) {
            return fail(format!("daily_vol {} not in (0, 1)", self.daily_vol));
        }
        if !(0.0..1.0).contains(&self.reversion) {
            return fail(format!("reversion {} not in [0, 1)", self.reversion));
        }
        if self
            .start_date
            .checked_add_days(Days::new(self.days as u64))
            .is_none()
        {
            return fail("date range overflows".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Latent {
    shock: f64,
    signal: f64,
    noise: f64,
}

/// Generates `days * tweets_per_day` tweets (ids ordered by timestamp) and one price per
/// day. Identical configs give identical output.
pub fn gen_corpus(cfg: &SynthConfig) -> Result<(Vec<TweetRecord>, PriceSeries), SynthError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let latents: Vec<Latent> = (0..cfg.days)
        .map(|_| {
            let shock: f64 = StandardNormal.sample(&mut rng);
            let idio: f64 = StandardNormal.sample(&mut rng);
            let noise: f64 = StandardNormal.sample(&mut rng);
            Latent {
                shock,
                signal: cfg.rho * shock + (1.0 - cfg.rho * cfg.rho).sqrt() * idio,
                noise,
            }
        })
        .collect();

    let log_base = cfg.base_price.ln();
    let mut log_price = log_base;
    let mut points = Vec::with_capacity(cfg.days as usize);
    for (d, latent) in latents.iter().enumerate() {
        points.push(PricePoint {
            date: cfg.start_date + Days::new(d as u64),
            price: round_cents(log_price.exp()).max(0.01),
        });
        log_price += cfg.daily_vol * latent.shock - cfg.reversion * (log_price - log_base);
    }
    let prices = PriceSeries::new(points).expect("generated prices are valid");

    let tweets = latents
        .par_iter()
        .enumerate()
        .flat_map_iter(|(d, latent)| gen_day(cfg, d as u64, latent))
        .collect();
    Ok((tweets, prices))
}

fn positive_count(n: usize, latent: f64) -> usize {
    let share = (1.0 + MIX_RANGE * (latent / LATENT_CLIP).clamp(-1.0, 1.0)) / 2.0;
    ((n as f64 * share).round() as usize).min(n)
}

/// Distinct follower counts, sorted descending.
fn follower_counts<R: Rng>(n: usize, rng: &mut R) -> Vec<u64> {
    let dist = LogNormal::new(6.0, 2.0).expect("valid lognormal");
    let mut values: Vec<u64> = (0..n).map(|_| dist.sample(rng) as u64).collect();
    values.sort_unstable();
    for i in 1..values.len() {
        if values[i] <= values[i - 1] {
            values[i] = values[i - 1] + 1;
        }
    }
    values.reverse();
    values
}

fn count<R: Rng>(dist: &LogNormal<f64>, rng: &mut R) -> u64 {
    dist.sample(rng).floor() as u64
}

/// Pronounceable tag unique to one tweet; alternates consonant and vowel so it has no
/// repeated characters and never collides with a lexicon word.
fn unique_tag(mut index: u64) -> String {
    let mut tag = String::from("x");
    let mut syllables = 0;
    while syllables < 4 || index > 0 {
        let digit = (index % 32) as usize;
        index /= 32;
        tag.push(CONSONANTS[digit % 16] as char);
        tag.push(if digit < 16 { 'a' } else { 'o' });
        syllables += 1;
    }
    tag
}

fn tweet_text<R: Rng>(rng: &mut R, positive: bool, tag: &str) -> String {
    let mut words: Vec<String> = Vec::with_capacity(10);
    if rng.random_bool(0.1) {
        words.push("RT".into());
    }
    if rng.random_bool(0.3) {
        words.push(format!("@trader_{}", rng.random_range(0..5000)));
    }
    let n_filler = rng.random_range(2..=5);
    for _ in 0..n_filler {
        let mut w = FILLER[rng.random_range(0..FILLER.len())].to_string();
        if rng.random_bool(0.05) {
            w.push_str("....");
        }
        words.push(w);
    }
    let pool = if positive {
        &POSITIVE_TOKENS
    } else {
        &NEGATIVE_TOKENS
    };
    let mut token = pool[rng.random_range(0..pool.len())].to_string();
    if rng.random_bool(0.1) {
        token = token.to_uppercase();
    }
    let prefix = words
        .iter()
        .take_while(|w| *w == "RT" || w.starts_with('@'))
        .count();
    let at = rng.random_range(prefix..=words.len());
    words.insert(at, token);
    if rng.random_bool(0.1) {
        words.push("wowww!!!!".into());
    }
    if rng.random_bool(0.3) {
        words.push(HASHTAGS[rng.random_range(0..HASHTAGS.len())].into());
    }
    if rng.random_bool(0.2) {
        words.push(format!(
            "https://t.co/{}",
            unique_tag(rng.random_range(0..1_000_000))
        ));
    }
    words.push(tag.to_string());
    words.join(" ")
}

fn gen_day(cfg: &SynthConfig, day: u64, latent: &Latent) -> Vec<TweetRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(day + 1);
    let n = cfg.tweets_per_day as usize;
    let n_signal = n.div_ceil(2);
    let followers = follower_counts(n, &mut rng);

    let mut signs = vec![false; n];
    let k_signal = positive_count(n_signal, latent.signal);
    let k_noise = positive_count(n - n_signal, latent.noise);
    signs[..k_signal].fill(true);
    signs[n_signal..n_signal + k_noise].fill(true);
    signs[..n_signal].shuffle(&mut rng);
    signs[n_signal..].shuffle(&mut rng);

    let comments = LogNormal::new(1.0, 1.2).expect("valid lognormal");
    let likes = LogNormal::new(2.0, 1.5).expect("valid lognormal");
    let retweets = LogNormal::new(1.5, 1.3).expect("valid lognormal");
    let day_start = day_start(cfg.start_date + Days::new(day));

    let mut drafts: Vec<(i64, TweetRecord)> = (0..n)
        .map(|j| {
            let offset = rng.random_range(0..SECONDS_PER_DAY);
            let tag = unique_tag(day * n as u64 + j as u64);
            let record = TweetRecord {
                id: String::new(),
                timestamp: day_start + offset,
                text: tweet_text(&mut rng, signs[j], &tag),
                followers: followers[j],
                comments: count(&comments, &mut rng),
                likes: count(&likes, &mut rng),
                retweets: count(&retweets, &mut rng),
            };
            (offset, record)
        })
        .collect();
    drafts.sort_by_key(|(offset, _)| *offset);
    drafts
        .into_iter()
        .enumerate()
        .map(|(j, (_, mut record))| {
            record.id = format!("{:010}", day * n as u64 + j as u64);
            record
        })
        .collect()
}
