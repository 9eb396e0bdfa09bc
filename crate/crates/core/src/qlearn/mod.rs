//! Tabular Q-learning price predictor.
//!
//! A state is the previous day's price bucket and (optionally) the previous day's sentiment
//! bucket. An action is an integer percentage change applied to the previous price, so the
//! prediction for day `t` is `AP[t-1] * (1 + percent / 100)`. Training walks the training
//! days in order once per episode with a linearly decaying epsilon.

mod io;
mod reward;
mod table;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{to_cents, PriceSeries};
use crate::sentiment::DailySignal;

pub use io::{load_model, read_model, save_model, write_model, MODEL_MAGIC, MODEL_VERSION};
pub use reward::{
    reward_cdr, reward_rdr, reward_sdr, zero_reward_points, CdrBand, RewardError, RewardKind,
    ZeroRewardGeometry, DEGENERATE_L_RATIO,
};
pub use table::QTable;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("invalid agent config: {0}")]
    Config(String),
    #[error("price {price} is not below price_max {price_max}")]
    PriceOutOfRange { price: f64, price_max: f64 },
    #[error("price {0} must be positive")]
    NonPositivePrice(f64),
    #[error("signals do not line up with prices: {0}")]
    Misaligned(String),
    #[error("need at least {needed} days, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("table has {got} entries, expected {expected}")]
    TableShape { expected: usize, got: usize },
    #[error("action {percent}% outside [{min}, {max}]")]
    ActionOutOfRange { percent: i32, min: i32, max: i32 },
    #[error(transparent)]
    Reward(#[from] RewardError),
    #[error("model file: {0}")]
    Format(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Whether sentiment is part of the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateMode {
    PriceSentiment,
    PriceOnly,
}

impl StateMode {
    pub fn name(self) -> &'static str {
        match self {
            StateMode::PriceSentiment => "price-sentiment",
            StateMode::PriceOnly => "price-only",
        }
    }
}

impl fmt::Display for StateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StateMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "price-sentiment" => Ok(StateMode::PriceSentiment),
            "price-only" => Ok(StateMode::PriceOnly),
            other => Err(format!(
                "unknown state mode `{other}` (expected price-sentiment|price-only)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    /// Discount factor.
    pub gamma: f64,
    /// Learning rate.
    pub theta: f64,
    pub action_min: i32,
    pub action_max: i32,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub episodes: u32,
    /// Width of one price bucket, in USD.
    pub price_bucket_width: f64,
    /// Exclusive upper bound on any price the agent sees.
    pub price_max: f64,
    /// Number of sentiment buckets over [-1, 1]; odd so 0 sits in the middle one.
    pub sentiment_bins: u32,
    pub seed: u64,
    pub state_mode: StateMode,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            gamma: 0.95,
            theta: 0.1,
            action_min: -100,
            action_max: 1000,
            epsilon_start: 1.0,
            epsilon_end: 0.01,
            episodes: 500,
            price_bucket_width: 500.0,
            price_max: 100_000.0,
            sentiment_bins: 21,
            seed: 42,
            state_mode: StateMode::PriceSentiment,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        let fail = |msg: String| Err(AgentError::Config(msg));
        if !(0.0..=1.0).contains(&self.gamma) {
            return fail(format!("gamma {} not in [0, 1]", self.gamma));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return fail(format!("theta {} not in (0, 1]", self.theta));
        }
        if self.action_min >= self.action_max {
            return fail(format!(
                "action_min {} must be below action_max {}",
                self.action_min, self.action_max
            ));
        }
        for (name, e) in [
            ("epsilon_start", self.epsilon_start),
            ("epsilon_end", self.epsilon_end),
        ] {
            if !(0.0..=1.0).contains(&e) {
                return fail(format!("{name} {e} not in [0, 1]"));
            }
        }
        if self.epsilon_end > self.epsilon_start {
            return fail("epsilon_end must not exceed epsilon_start".into());
        }
        if self.episodes == 0 {
            return fail("episodes must be positive".into());
        }
        if !(self.price_bucket_width > 0.0)
            || !(self.price_max > 0.0)
            || !self.price_max.is_finite()
        {
            return fail("price_bucket_width and price_max must be positive".into());
        }
        if self.price_bucket_width >= self.price_max {
            return fail("price_bucket_width must be below price_max".into());
        }
        if self.sentiment_bins == 0 || self.sentiment_bins.is_multiple_of(2) {
            return fail(format!(
                "sentiment_bins {} must be odd and positive",
                self.sentiment_bins
            ));
        }
        Ok(())
    }

    pub fn price_bins(&self) -> u32 {
        (self.price_max / self.price_bucket_width).ceil() as u32
    }

    fn effective_sentiment_bins(&self) -> u32 {
        match self.state_mode {
            StateMode::PriceSentiment => self.sentiment_bins,
            StateMode::PriceOnly => 1,
        }
    }

    pub fn n_states(&self) -> usize {
        self.price_bins() as usize * self.effective_sentiment_bins() as usize
    }

    pub fn n_actions(&self) -> usize {
        (self.action_max - self.action_min + 1) as usize
    }

    /// Linear decay from `epsilon_start` at the first episode to `epsilon_end` at the
    /// last; later episodes stay at `epsilon_end`.
    pub fn epsilon_for(&self, episode: u32) -> f64 {
        if self.episodes <= 1 {
            return if episode == 0 {
                self.epsilon_start
            } else {
                self.epsilon_end
            };
        }
        let frac = (episode as f64 / (self.episodes - 1) as f64).min(1.0);
        self.epsilon_start + (self.epsilon_end - self.epsilon_start) * frac
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct State {
    pub price_bin: u32,
    pub sentiment_bin: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action {
    pub percent: i32,
}

pub fn discretize_state(
    prev_price: f64,
    compound: f64,
    cfg: &AgentConfig,
) -> Result<State, AgentError> {
    if !(prev_price > 0.0) {
        return Err(AgentError::NonPositivePrice(prev_price));
    }
    if prev_price >= cfg.price_max {
        return Err(AgentError::PriceOutOfRange {
            price: prev_price,
            price_max: cfg.price_max,
        });
    }
    let price_bin =
        ((prev_price / cfg.price_bucket_width).floor() as u32).min(cfg.price_bins() - 1);
    let sentiment_bin = match cfg.state_mode {
        StateMode::PriceOnly => 0,
        StateMode::PriceSentiment => {
            let bins = cfg.sentiment_bins;
            let raw = ((compound + 1.0) / 2.0 * bins as f64).floor();
            raw.clamp(0.0, (bins - 1) as f64) as u32
        }
    };
    Ok(State {
        price_bin,
        sentiment_bin,
    })
}

/// `prev_price * (1 + percent / 100)`, rounded half-up to cents and floored at zero.
pub fn predicted_price(prev_price: f64, action: Action) -> f64 {
    let scaled = to_cents(prev_price) as i128 * (100 + action.percent as i128);
    let cents = if scaled >= 0 {
        (scaled + 50).div_euclid(100)
    } else {
        0
    };
    cents as f64 / 100.0
}

/// Config plus learned table.
#[derive(Debug, Clone, PartialEq)]
pub struct QModel {
    pub config: AgentConfig,
    pub table: QTable,
}

impl QModel {
    pub fn new(config: AgentConfig) -> Result<Self, AgentError> {
        config.validate()?;
        let table = QTable::new(config.n_states(), config.n_actions());
        Ok(QModel { config, table })
    }

    pub fn state_index(&self, s: State) -> usize {
        s.price_bin as usize * self.config.effective_sentiment_bins() as usize
            + s.sentiment_bin as usize
    }

    pub fn action_index(&self, a: Action) -> Result<usize, AgentError> {
        let (min, max) = (self.config.action_min, self.config.action_max);
        if a.percent < min || a.percent > max {
            return Err(AgentError::ActionOutOfRange {
                percent: a.percent,
                min,
                max,
            });
        }
        Ok((a.percent - min) as usize)
    }

    pub fn action_at(&self, index: usize) -> Action {
        Action {
            percent: self.config.action_min + index as i32,
        }
    }

    pub fn q(&self, s: State, a: Action) -> Result<f64, AgentError> {
        Ok(self.table.get(self.state_index(s), self.action_index(a)?))
    }

    pub fn set_q(&mut self, s: State, a: Action, value: f64) -> Result<(), AgentError> {
        let (si, ai) = (self.state_index(s), self.action_index(a)?);
        self.table.set(si, ai, value);
        Ok(())
    }

    /// Bellman update on `(s, a)`; returns the new value.
    pub fn q_update(
        &mut self,
        s: State,
        a: Action,
        reward: f64,
        next: State,
    ) -> Result<f64, AgentError> {
        let (si, ai, ni) = (
            self.state_index(s),
            self.action_index(a)?,
            self.state_index(next),
        );
        self.table.update(
            si,
            ai,
            reward,
            Some(ni),
            self.config.theta,
            self.config.gamma,
        )
    }

    pub fn select_action<R: rand::Rng + ?Sized>(
        &self,
        s: State,
        epsilon: f64,
        rng: &mut R,
    ) -> Action {
        self.action_at(self.table.select_action(self.state_index(s), epsilon, rng))
    }

    pub fn greedy_action(&self, s: State) -> Action {
        self.action_at(self.table.greedy(self.state_index(s)))
    }

    fn state_indices(
        &self,
        prices: &[f64],
        signals: &[DailySignal],
    ) -> Result<Vec<usize>, AgentError> {
        prices
            .iter()
            .zip(signals)
            .map(|(&p, s)| {
                Ok(self.state_index(discretize_state(p, s.mean_compound, &self.config)?))
            })
            .collect()
    }
}

/// Per-episode mean reward.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub episode_mean_reward: Vec<f64>,
}

fn check_alignment(
    prices: &PriceSeries,
    signals: &[DailySignal],
    min_len: usize,
) -> Result<(), AgentError> {
    if prices.len() < min_len {
        return Err(AgentError::TooShort {
            needed: min_len,
            got: prices.len(),
        });
    }
    if signals.len() != prices.len() {
        return Err(AgentError::Misaligned(format!(
            "{} signals for {} price days",
            signals.len(),
            prices.len()
        )));
    }
    for (p, s) in prices.points().iter().zip(signals) {
        if p.date != s.date {
            return Err(AgentError::Misaligned(format!(
                "price day {} paired with signal day {}",
                p.date, s.date
            )));
        }
    }
    Ok(())
}

/// Incremental trainer: one call to [`Trainer::run_episode`] is one chronological pass.
#[derive(Debug, Clone)]
pub struct Trainer {
    model: QModel,
    kind: RewardKind,
    prices: Vec<f64>,
    states: Vec<usize>,
    rng: ChaCha8Rng,
    episodes_done: u32,
    log: TrainLog,
}

impl Trainer {
    pub fn new(
        prices: &PriceSeries,
        signals: &[DailySignal],
        kind: RewardKind,
        cfg: AgentConfig,
    ) -> Result<Self, AgentError> {
        Self::with_model(QModel::new(cfg)?, prices, signals, kind)
    }

    /// Continue training an existing model.
    pub fn with_model(
        model: QModel,
        prices: &PriceSeries,
        signals: &[DailySignal],
        kind: RewardKind,
    ) -> Result<Self, AgentError> {
        model.config.validate()?;
        check_alignment(prices, signals, 3)?;
        let price_values = prices.prices();
        let states = model.state_indices(&price_values, signals)?;
        let rng = ChaCha8Rng::seed_from_u64(model.config.seed);
        Ok(Trainer {
            model,
            kind,
            prices: price_values,
            states,
            rng,
            episodes_done: 0,
            log: TrainLog::default(),
        })
    }

    pub fn episodes_done(&self) -> u32 {
        self.episodes_done
    }

    pub fn model(&self) -> &QModel {
        &self.model
    }

    pub fn log(&self) -> &TrainLog {
        &self.log
    }

    pub fn into_parts(self) -> (QModel, TrainLog) {
        (self.model, self.log)
    }

    /// Runs one episode and returns its mean reward.
    pub fn run_episode(&mut self) -> Result<f64, AgentError> {
        let epsilon = self.model.config.epsilon_for(self.episodes_done);
        let (theta, gamma) = (self.model.config.theta, self.model.config.gamma);
        let n = self.prices.len();
        let mut pp_prev = self.prices[0];
        let mut total = 0.0;
        for t in 1..n {
            let (ap_prev, ap) = (self.prices[t - 1], self.prices[t]);
            let state = self.states[t - 1];
            let a = self
                .model
                .table
                .select_action(state, epsilon, &mut self.rng);
            let pp = predicted_price(ap_prev, self.model.action_at(a));
            let reward = match self.kind {
                RewardKind::Sdr => reward_sdr(ap, pp),
                RewardKind::Rdr => reward_rdr(ap, pp)?,
                RewardKind::Cdr => reward_cdr(&zero_reward_points(ap, ap_prev, pp_prev)?, ap, pp),
            };
            pp_prev = pp;
            let next = (t + 1 < n).then(|| self.states[t]);
            self.model
                .table
                .update(state, a, reward, next, theta, gamma)?;
            total += reward;
        }
        let mean = total / (n - 1) as f64;
        self.episodes_done += 1;
        self.log.episode_mean_reward.push(mean);
        Ok(mean)
    }
}

/// Train for `cfg.episodes` episodes. Deterministic for a given seed.
pub fn train(
    prices: &PriceSeries,
    signals: &[DailySignal],
    kind: RewardKind,
    cfg: AgentConfig,
) -> Result<(QModel, TrainLog), AgentError> {
    let episodes = cfg.episodes;
    let mut trainer = Trainer::new(prices, signals, kind, cfg)?;
    for _ in 0..episodes {
        trainer.run_episode()?;
    }
    Ok(trainer.into_parts())
}

/// Greedy one-day-ahead predictions for days `1..n`.
pub fn predict_series(
    model: &QModel,
    prices: &PriceSeries,
    signals: &[DailySignal],
) -> Result<Vec<f64>, AgentError> {
    check_alignment(prices, signals, 2)?;
    let price_values = prices.prices();
    let states = model.state_indices(&price_values, signals)?;
    Ok(states[..states.len() - 1]
        .iter()
        .zip(&price_values)
        .map(|(&s, &prev)| predicted_price(prev, model.action_at(model.table.greedy(s))))
        .collect())
}

/// Prices with their aligned daily signals.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub prices: PriceSeries,
    pub signals: Vec<DailySignal>,
}

impl Dataset {
    pub fn new(prices: PriceSeries, signals: Vec<DailySignal>) -> Result<Self, AgentError> {
        check_alignment(&prices, &signals, 1)?;
        Ok(Dataset { prices, signals })
    }

    /// Chronological split: the first `round(fraction * n)` days train; the test part starts
    /// on the last training day so every test day gets a prediction.
    pub fn split(&self, train_fraction: f64) -> Result<(Dataset, Dataset), AgentError> {
        let n = self.prices.len();
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(AgentError::Config(format!(
                "train_fraction {train_fraction} not in (0, 1)"
            )));
        }
        let k = ((train_fraction * n as f64).round() as usize).clamp(3, n.saturating_sub(1));
        if n < 5 || k + 1 > n {
            return Err(AgentError::TooShort { needed: 5, got: n });
        }
        let train = Dataset {
            prices: self.prices.slice(0..k),
            signals: self.signals[..k].to_vec(),
        };
        let test = Dataset {
            prices: self.prices.slice(k - 1..n),
            signals: self.signals[k - 1..].to_vec(),
        };
        Ok((train, test))
    }

    /// Actual prices of the days [`predict_series`] predicts.
    pub fn targets(&self) -> Vec<f64> {
        self.prices.prices()[1..].to_vec()
    }
}
