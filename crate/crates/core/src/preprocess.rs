//! Tweet text normalization and per-day duplicate removal.
//!
//! [`clean`] runs a fixed sequence of passes: lowercase, drop a leading retweet marker and
//! URLs, drop user mentions, strip `#`, turn runs of dots into a space, cap any repeated
//! character at three, collapse whitespace and trim. The sequence is repeated until the
//! text stops changing, so the result is always a fixed point of the pipeline.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::corpus::{DayBucket, TweetRecord};

/// Longest run of one repeated character that survives cleaning.
pub const MAX_CHAR_RUN: usize = 3;

// Every pass after the first strictly shortens the text, so this is never reached in practice.
const MAX_ROUNDS: usize = 64;

/// A tweet together with its normalized text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanTweet {
    pub original: TweetRecord,
    pub clean_text: String,
}

impl AsRef<TweetRecord> for CleanTweet {
    fn as_ref(&self) -> &TweetRecord {
        &self.original
    }
}

impl CleanTweet {
    pub fn new(original: TweetRecord) -> Self {
        let clean_text = clean(&original.text);
        CleanTweet {
            original,
            clean_text,
        }
    }

    /// The record with its text replaced by the cleaned text, for writing back out.
    pub fn to_record(&self) -> TweetRecord {
        TweetRecord {
            text: self.clean_text.clone(),
            ..self.original.clone()
        }
    }
}

pub fn clean(text: &str) -> String {
    let mut current = text.to_string();
    for _ in 0..MAX_ROUNDS {
        let next = clean_once(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

fn clean_once(text: &str) -> String {
    let s = text.to_lowercase();
    let s = remove_retweet_marker_and_urls(&s);
    let s = remove_mentions(&s);
    let s = s.replace('#', "");
    let s = replace_dot_runs(&s);
    let s = truncate_char_runs(&s, MAX_CHAR_RUN);
    collapse_whitespace(&s)
}

fn remove_retweet_marker_and_urls(s: &str) -> String {
    let trimmed = s.trim_start();
    let s = match trimmed.split_once(char::is_whitespace) {
        Some((first, rest)) if first == "rt" || first == "rt:" => rest,
        None if trimmed == "rt" || trimmed == "rt:" => "",
        _ => s,
    };
    remove_urls(s)
}

/// Drops everything from a URL prefix up to the next whitespace. `http://` and `https://`
/// match anywhere; `www.` only at a word boundary so words like "awww." survive.
fn remove_urls(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    let mut prev: Option<char> = None;
    while let Some(c) = rest.chars().next() {
        let boundary = prev.is_none_or(|p| !p.is_alphanumeric());
        if rest.starts_with("http://")
            || rest.starts_with("https://")
            || (boundary && rest.starts_with("www."))
        {
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            rest = &rest[end..];
            prev = None;
            continue;
        }
        out.push(c);
        prev = Some(c);
        rest = &rest[c.len_utf8()..];
    }
    out
}

fn is_handle_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Removes `@handle` where the `@` is not glued to a preceding letter or digit
/// (so e-mail addresses are left alone). A bare `@` is removed as well.
fn remove_mentions(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars().peekable();
    let mut prev: Option<char> = None;
    while let Some(c) = chars.next() {
        if c == '@' && prev.is_none_or(|p| !p.is_alphanumeric()) {
            while chars.peek().is_some_and(|&n| is_handle_char(n)) {
                chars.next();
            }
            prev = None;
            continue;
        }
        out.push(c);
        prev = Some(c);
    }
    out
}

fn replace_dot_runs(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '.' && chars.peek() == Some(&'.') {
            while chars.peek() == Some(&'.') {
                chars.next();
            }
            out.push(' ');
        } else {
            out.push(c);
        }
    }
    out
}

fn truncate_char_runs(s: &str, max_run: usize) -> String {
    let mut out = String::with_capacity(s.len());
    let mut last: Option<char> = None;
    let mut run = 0;
    for c in s.chars() {
        if Some(c) == last {
            run += 1;
        } else {
            last = Some(c);
            run = 1;
        }
        if run <= max_run {
            out.push(c);
        }
    }
    out
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Cleans every tweet of every bucket in parallel. Tweets whose text cleans to nothing
/// carry no content and are dropped; the second value counts them.
pub fn clean_buckets(buckets: Vec<DayBucket<TweetRecord>>) -> (Vec<DayBucket<CleanTweet>>, usize) {
    let cleaned: Vec<DayBucket<CleanTweet>> = buckets
        .into_par_iter()
        .map(|b| DayBucket {
            date: b.date,
            tweets: b.tweets.into_iter().map(CleanTweet::new).collect(),
        })
        .collect();
    let mut emptied = 0;
    let cleaned = cleaned
        .into_iter()
        .map(|mut b| {
            let before = b.tweets.len();
            b.tweets.retain(|t| !t.clean_text.is_empty());
            emptied += before - b.tweets.len();
            b
        })
        .collect();
    (cleaned, emptied)
}

/// Within each day, keeps only the earliest tweet (by timestamp, then id) of every group
/// sharing the same cleaned text. Surviving tweets keep their original order.
pub fn dedup(buckets: Vec<DayBucket<CleanTweet>>) -> Vec<DayBucket<CleanTweet>> {
    buckets.into_iter().map(dedup_day).collect()
}

pub fn dedup_day(bucket: DayBucket<CleanTweet>) -> DayBucket<CleanTweet> {
    let mut first: HashMap<&str, usize> = HashMap::with_capacity(bucket.tweets.len());
    for (i, t) in bucket.tweets.iter().enumerate() {
        first
            .entry(t.clean_text.as_str())
            .and_modify(|best| {
                let b = &bucket.tweets[*best].original;
                let key = (t.original.timestamp, t.original.id.as_str());
                if key < (b.timestamp, b.id.as_str()) {
                    *best = i;
                }
            })
            .or_insert(i);
    }
    let mut keep = vec![false; bucket.tweets.len()];
    for &i in first.values() {
        keep[i] = true;
    }
    let tweets = bucket
        .tweets
        .into_iter()
        .zip(keep)
        .filter_map(|(t, k)| k.then_some(t))
        .collect();
    DayBucket {
        date: bucket.date,
        tweets,
    }
}
