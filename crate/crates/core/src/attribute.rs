//! Per-day ranking of tweets by one engagement attribute, keeping the top half.

use std::cmp::Reverse;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{DayBucket, TweetRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attribute {
    Followers,
    Comments,
    Likes,
    Retweets,
}

impl Attribute {
    pub const ALL: [Attribute; 4] = [
        Attribute::Followers,
        Attribute::Comments,
        Attribute::Likes,
        Attribute::Retweets,
    ];

    pub fn value(self, tweet: &TweetRecord) -> u64 {
        match self {
            Attribute::Followers => tweet.followers,
            Attribute::Comments => tweet.comments,
            Attribute::Likes => tweet.likes,
            Attribute::Retweets => tweet.retweets,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Attribute::Followers => "followers",
            Attribute::Comments => "comments",
            Attribute::Likes => "likes",
            Attribute::Retweets => "retweets",
        }
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Attribute {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Attribute::ALL
            .into_iter()
            .find(|a| a.name() == s.to_ascii_lowercase())
            .ok_or_else(|| {
                format!("unknown attribute `{s}` (expected followers|comments|likes|retweets)")
            })
    }
}

/// Buckets filtered down to the top half by one attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredCorpus<T> {
    pub attribute: Attribute,
    pub buckets: Vec<DayBucket<T>>,
}

impl<T> FilteredCorpus<T> {
    pub fn tweet_count(&self) -> usize {
        self.buckets.iter().map(DayBucket::len).sum()
    }
}

/// Number of tweets kept from a day of `n`: `ceil(n / 2)`.
pub fn kept_len(n: usize) -> usize {
    n.div_ceil(2)
}

/// Sorts by `attr` descending (earlier timestamp, then smaller id, first on ties) and keeps
/// the first `ceil(n / 2)`.
pub fn rank_and_halve<T>(mut bucket: DayBucket<T>, attr: Attribute) -> DayBucket<T>
where
    T: AsRef<TweetRecord>,
{
    bucket.tweets.sort_by(|a, b| {
        let (a, b) = (a.as_ref(), b.as_ref());
        (Reverse(attr.value(a)), a.timestamp, a.id.as_str()).cmp(&(
            Reverse(attr.value(b)),
            b.timestamp,
            b.id.as_str(),
        ))
    });
    bucket.tweets.truncate(kept_len(bucket.tweets.len()));
    bucket
}

pub fn build_dataset<T>(buckets: Vec<DayBucket<T>>, attr: Attribute) -> FilteredCorpus<T>
where
    T: AsRef<TweetRecord>,
{
    FilteredCorpus {
        attribute: attr,
        buckets: buckets
            .into_iter()
            .map(|b| rank_and_halve(b, attr))
            .collect(),
    }
}
