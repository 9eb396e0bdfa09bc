//! Lexicon-based compound sentiment per tweet, averaged per day.
//!
//! A tweet's raw score is the sum of the valences of its lexicon words; a word followed by
//! `!` marks has its valence multiplied by [`EMPHASIS_PER_MARK`] per mark (at most three).
//! The sum is squashed into (-1, 1) with `s / sqrt(s^2 + 15)`.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::DayBucket;
use crate::preprocess::CleanTweet;

pub const NORMALIZATION_ALPHA: f64 = 15.0;
pub const EMPHASIS_PER_MARK: f64 = 1.292;
pub const MAX_EMPHASIS_MARKS: usize = 3;

static SHIPPED_LEXICON: &str = include_str!("../data/lexicon.tsv");

#[derive(Debug, Error)]
pub enum SentimentError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("lexicon line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("lexicon line {line}: duplicate token `{token}`")]
    DuplicateToken { line: usize, token: String },
    #[error("signals line {line}: {reason}")]
    Signals { line: u64, reason: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Lowercase token to valence.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: HashMap<String, f64>,
}

impl Lexicon {
    /// The small crypto-flavoured lexicon bundled with the crate.
    pub fn shipped() -> Lexicon {
        parse_lexicon(SHIPPED_LEXICON.as_bytes()).expect("shipped lexicon is valid")
    }

    pub fn shipped_text() -> &'static str {
        SHIPPED_LEXICON
    }

    pub fn from_entries<I, S>(entries: I) -> Result<Lexicon, SentimentError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let mut lex = Lexicon::default();
        for (i, (token, valence)) in entries.into_iter().enumerate() {
            lex.insert(i + 1, token.as_ref(), valence)?;
        }
        Ok(lex)
    }

    fn insert(&mut self, line: usize, token: &str, valence: f64) -> Result<(), SentimentError> {
        let token = token.to_lowercase();
        if self.entries.contains_key(&token) {
            return Err(SentimentError::DuplicateToken { line, token });
        }
        self.entries.insert(token, valence);
        Ok(())
    }

    pub fn get(&self, token: &str) -> Option<f64> {
        self.entries.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn load_lexicon(path: &Path) -> Result<Lexicon, SentimentError> {
    let file = File::open(path).map_err(|source| SentimentError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_lexicon(BufReader::new(file))
}

/// Parses `token<TAB>valence` lines. Extra tab-separated columns (as in the published
/// VADER lexicon) are ignored.
pub fn parse_lexicon<R: Read>(reader: R) -> Result<Lexicon, SentimentError> {
    let mut lex = Lexicon::default();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| SentimentError::Parse {
            line: line_no,
            reason: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split('\t');
        let token = cols.next().unwrap_or("").trim();
        let raw = cols.next().ok_or_else(|| SentimentError::Parse {
            line: line_no,
            reason: "expected `token<TAB>valence`".into(),
        })?;
        if token.is_empty() {
            return Err(SentimentError::Parse {
                line: line_no,
                reason: "empty token".into(),
            });
        }
        let valence: f64 = raw
            .trim()
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| SentimentError::Parse {
                line: line_no,
                reason: format!("valence `{}` is not a number", raw.trim()),
            })?;
        lex.insert(line_no, token, valence)?;
    }
    Ok(lex)
}

/// Compound score in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct SentimentScore {
    pub compound: f64,
}

/// Squash a raw valence sum into (-1, 1).
pub fn normalize(sum: f64) -> f64 {
    if sum == 0.0 {
        return 0.0;
    }
    (sum / (sum * sum + NORMALIZATION_ALPHA).sqrt()).clamp(-1.0, 1.0)
}

/// Raw valence sum over whitespace tokens. A token is looked up as written, then with
/// surrounding punctuation trimmed, so emoticon entries still match.
pub fn valence_sum(text: &str, lex: &Lexicon) -> f64 {
    text.split_whitespace()
        .filter_map(|token| {
            let word = token.trim_end_matches('!');
            let marks = (token.len() - word.len()).min(MAX_EMPHASIS_MARKS);
            let valence = lex.get(word).or_else(|| {
                let trimmed = word.trim_matches(|c: char| c.is_ascii_punctuation());
                (trimmed != word && !trimmed.is_empty())
                    .then(|| lex.get(trimmed))
                    .flatten()
            })?;
            Some(valence * EMPHASIS_PER_MARK.powi(marks as i32))
        })
        .sum()
}

pub fn score(text: &str, lex: &Lexicon) -> SentimentScore {
    SentimentScore {
        compound: normalize(valence_sum(text, lex)),
    }
}

/// Mean compound of one day's tweets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DailySignal {
    pub date: NaiveDate,
    pub mean_compound: f64,
    pub tweet_count: usize,
}

impl DailySignal {
    pub fn empty(date: NaiveDate) -> Self {
        DailySignal {
            date,
            mean_compound: 0.0,
            tweet_count: 0,
        }
    }
}

/// Unweighted mean of per-tweet compounds; an empty day is `(0, 0)`.
pub fn daily_signal(bucket: &DayBucket<CleanTweet>, lex: &Lexicon) -> DailySignal {
    let compounds: Vec<f64> = bucket
        .tweets
        .iter()
        .map(|t| score(&t.clean_text, lex).compound)
        .collect();
    mean_signal(bucket.date, &compounds)
}

pub fn mean_signal(date: NaiveDate, compounds: &[f64]) -> DailySignal {
    if compounds.is_empty() {
        return DailySignal::empty(date);
    }
    let (lo, hi) = compounds
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &c| {
            (lo.min(c), hi.max(c))
        });
    let mean = compounds.iter().sum::<f64>() / compounds.len() as f64;
    DailySignal {
        date,
        mean_compound: mean.clamp(lo, hi),
        tweet_count: compounds.len(),
    }
}

pub fn daily_signals(buckets: &[DayBucket<CleanTweet>], lex: &Lexicon) -> Vec<DailySignal> {
    buckets.par_iter().map(|b| daily_signal(b, lex)).collect()
}

pub fn write_signals(path: &Path, signals: &[DailySignal]) -> Result<(), SentimentError> {
    let io = |source| SentimentError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(w, "date,mean_compound,tweet_count").map_err(io)?;
    for s in signals {
        writeln!(w, "{},{},{}", s.date, s.mean_compound, s.tweet_count).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn load_signals(path: &Path) -> Result<Vec<DailySignal>, SentimentError> {
    let file = File::open(path).map_err(|source| SentimentError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_signals(BufReader::new(file))
}

pub fn read_signals<R: Read>(reader: R) -> Result<Vec<DailySignal>, SentimentError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize::<DailySignal>() {
        let signal = row.map_err(|e| SentimentError::Signals {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            reason: e.to_string(),
        })?;
        if !(-1.0..=1.0).contains(&signal.mean_compound) {
            return Err(SentimentError::Signals {
                line: out.len() as u64 + 2,
                reason: format!("mean_compound {} outside [-1, 1]", signal.mean_compound),
            });
        }
        out.push(signal);
    }
    Ok(out)
}
