//! Tweet corpora and daily price series: file formats, validation and day bucketing.
//!
//! Tweets are read from CSV (header `id,timestamp,text,followers,comments,likes,retweets`)
//! or JSONL with the same keys. Prices are read from CSV `date,price` with ISO-8601 dates.
//! All days are UTC calendar days.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, Days, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const TWEET_FIELDS: [&str; 7] = [
    "id",
    "timestamp",
    "text",
    "followers",
    "comments",
    "likes",
    "retweets",
];

const SECONDS_PER_DAY: i64 = 86_400;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed field `{field}`: {reason}")]
    Malformed {
        line: u64,
        field: String,
        reason: String,
    },
    #[error("line {line}: invalid `{field}`: {reason}")]
    Validation {
        line: u64,
        field: String,
        reason: String,
    },
    #[error("line {line}: duplicate tweet id `{id}`")]
    DuplicateId { line: u64, id: String },
    #[error("line {line}: price {price} is not positive")]
    NonPositivePrice { line: u64, price: String },
    #[error("line {line}: date {date} is not after the previous row")]
    Unordered { line: u64, date: NaiveDate },
    #[error("price series is missing day {missing}")]
    MissingDay { missing: NaiveDate },
    #[error("price series is empty")]
    EmptySeries,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CorpusError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// One tweet with its engagement attributes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub id: String,
    /// UTC epoch seconds.
    pub timestamp: i64,
    pub text: String,
    pub followers: u64,
    pub comments: u64,
    pub likes: u64,
    pub retweets: u64,
}

impl TweetRecord {
    pub fn day(&self) -> NaiveDate {
        utc_day(self.timestamp)
    }
}

impl AsRef<TweetRecord> for TweetRecord {
    fn as_ref(&self) -> &TweetRecord {
        self
    }
}

/// UTC calendar day containing the epoch second `ts`.
pub fn utc_day(ts: i64) -> NaiveDate {
    let day_start = ts.div_euclid(SECONDS_PER_DAY) * SECONDS_PER_DAY;
    DateTime::from_timestamp(day_start, 0)
        .expect("timestamp within chrono range")
        .date_naive()
}

/// Epoch second of 00:00:00 UTC on `date`.
pub fn day_start(date: NaiveDate) -> i64 {
    date.and_hms_opt(0, 0, 0)
        .expect("midnight exists")
        .and_utc()
        .timestamp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Csv,
    Jsonl,
}

impl CorpusFormat {
    /// Guess from a file extension; anything but `.jsonl`/`.json` is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") | Some("ndjson") => CorpusFormat::Jsonl,
            _ => CorpusFormat::Csv,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(CorpusFormat::Csv),
            "jsonl" => Ok(CorpusFormat::Jsonl),
            other => Err(format!(
                "unknown corpus format `{other}` (expected csv|jsonl)"
            )),
        }
    }
}

/// Inclusive range of UTC days a corpus is restricted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl CorpusWindow {
    pub fn contains(&self, ts: i64) -> bool {
        let day = utc_day(ts);
        self.start <= day && day <= self.end
    }
}

/// Result of [`load_tweets`]: the kept records plus the count dropped for falling outside the window.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TweetLoad {
    pub records: Vec<TweetRecord>,
    pub out_of_window: usize,
}

/// Load a tweet corpus, validating every row.
///
/// Rows outside `window` are dropped (and counted), not rejected.
pub fn load_tweets(
    path: &Path,
    format: CorpusFormat,
    window: Option<&CorpusWindow>,
) -> Result<TweetLoad, CorpusError> {
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let load = read_tweets(BufReader::new(file), format, window)?;
    if load.out_of_window > 0 {
        log::warn!(
            "{}: dropped {} tweet(s) outside the corpus window",
            path.display(),
            load.out_of_window
        );
    }
    Ok(load)
}

pub fn read_tweets<R: Read>(
    reader: R,
    format: CorpusFormat,
    window: Option<&CorpusWindow>,
) -> Result<TweetLoad, CorpusError> {
    let mut validator = Validator::new(window);
    match format {
        CorpusFormat::Csv => {
            let mut rdr = csv::ReaderBuilder::new()
                .has_headers(true)
                .from_reader(reader);
            let headers = rdr.headers()?.clone();
            let mut columns = [0usize; 7];
            for (slot, name) in columns.iter_mut().zip(TWEET_FIELDS) {
                *slot = headers
                    .iter()
                    .position(|h| h.trim() == name)
                    .ok_or_else(|| CorpusError::Malformed {
                        line: 1,
                        field: name.to_string(),
                        reason: "column missing from header".into(),
                    })?;
            }
            for row in rdr.records() {
                let row = row?;
                let line = row.position().map(|p| p.line()).unwrap_or(0);
                let get = |i: usize| row.get(columns[i]).unwrap_or("");
                let record = TweetRecord {
                    id: get(0).to_string(),
                    timestamp: parse_int(get(1), line, "timestamp")?,
                    text: get(2).to_string(),
                    followers: parse_count(get(3), line, "followers")?,
                    comments: parse_count(get(4), line, "comments")?,
                    likes: parse_count(get(5), line, "likes")?,
                    retweets: parse_count(get(6), line, "retweets")?,
                };
                validator.push(record, line)?;
            }
        }
        CorpusFormat::Jsonl => {
            for (idx, line_text) in BufReader::new(reader).lines().enumerate() {
                let line = idx as u64 + 1;
                let line_text = line_text.map_err(|e| CorpusError::Malformed {
                    line,
                    field: "line".into(),
                    reason: e.to_string(),
                })?;
                if line_text.trim().is_empty() {
                    continue;
                }
                let value: serde_json::Value =
                    serde_json::from_str(&line_text).map_err(|e| CorpusError::Malformed {
                        line,
                        field: "line".into(),
                        reason: e.to_string(),
                    })?;
                let record = json_record(&value, line)?;
                validator.push(record, line)?;
            }
        }
    }
    Ok(validator.finish())
}

struct Validator<'w> {
    window: Option<&'w CorpusWindow>,
    seen: HashSet<String>,
    load: TweetLoad,
}

impl<'w> Validator<'w> {
    fn new(window: Option<&'w CorpusWindow>) -> Self {
        Validator {
            window,
            seen: HashSet::new(),
            load: TweetLoad::default(),
        }
    }

    fn push(&mut self, record: TweetRecord, line: u64) -> Result<(), CorpusError> {
        if record.id.trim().is_empty() {
            return Err(CorpusError::Validation {
                line,
                field: "id".into(),
                reason: "empty id".into(),
            });
        }
        if record.text.trim().is_empty() {
            return Err(CorpusError::Validation {
                line,
                field: "text".into(),
                reason: "empty text".into(),
            });
        }
        if !self.seen.insert(record.id.clone()) {
            return Err(CorpusError::DuplicateId {
                line,
                id: record.id,
            });
        }
        match self.window {
            Some(w) if !w.contains(record.timestamp) => self.load.out_of_window += 1,
            _ => self.load.records.push(record),
        }
        Ok(())
    }

    fn finish(self) -> TweetLoad {
        self.load
    }
}

fn parse_int(raw: &str, line: u64, field: &str) -> Result<i64, CorpusError> {
    raw.trim()
        .parse::<i64>()
        .map_err(|e| CorpusError::Malformed {
            line,
            field: field.to_string(),
            reason: format!("`{raw}`: {e}"),
        })
}

fn parse_count(raw: &str, line: u64, field: &str) -> Result<u64, CorpusError> {
    let value = parse_int(raw, line, field)?;
    check_count(value, line, field)
}

fn check_count(value: i64, line: u64, field: &str) -> Result<u64, CorpusError> {
    u64::try_from(value).map_err(|_| CorpusError::Validation {
        line,
        field: field.to_string(),
        reason: format!("count {value} is negative"),
    })
}

fn json_record(value: &serde_json::Value, line: u64) -> Result<TweetRecord, CorpusError> {
    let field = |name: &str| {
        value.get(name).ok_or_else(|| CorpusError::Malformed {
            line,
            field: name.to_string(),
            reason: "missing key".into(),
        })
    };
    let string = |name: &str| -> Result<String, CorpusError> {
        match field(name)? {
            serde_json::Value::String(s) => Ok(s.clone()),
            serde_json::Value::Number(n) if name == "id" => Ok(n.to_string()),
            other => Err(CorpusError::Malformed {
                line,
                field: name.to_string(),
                reason: format!("expected string, got {other}"),
            }),
        }
    };
    let int = |name: &str| -> Result<i64, CorpusError> {
        field(name)?.as_i64().ok_or_else(|| CorpusError::Malformed {
            line,
            field: name.to_string(),
            reason: "expected integer".into(),
        })
    };
    Ok(TweetRecord {
        id: string("id")?,
        timestamp: int("timestamp")?,
        text: string("text")?,
        followers: check_count(int("followers")?, line, "followers")?,
        comments: check_count(int("comments")?, line, "comments")?,
        likes: check_count(int("likes")?, line, "likes")?,
        retweets: check_count(int("retweets")?, line, "retweets")?,
    })
}

pub fn write_tweets<'a, I>(path: &Path, format: CorpusFormat, records: I) -> Result<(), CorpusError>
where
    I: IntoIterator<Item = &'a TweetRecord>,
{
    let file = File::create(path).map_err(|e| CorpusError::io(path, e))?;
    write_tweets_to(BufWriter::new(file), format, records).map_err(|e| match e {
        CorpusError::Io { source, .. } => CorpusError::io(path, source),
        other => other,
    })
}

pub fn write_tweets_to<'a, W, I>(
    writer: W,
    format: CorpusFormat,
    records: I,
) -> Result<(), CorpusError>
where
    W: Write,
    I: IntoIterator<Item = &'a TweetRecord>,
{
    match format {
        CorpusFormat::Csv => {
            let mut wtr = csv::Writer::from_writer(writer);
            for record in records {
                wtr.serialize(record)?;
            }
            wtr.flush()
                .map_err(|e| CorpusError::io(Path::new("<writer>"), e))?;
        }
        CorpusFormat::Jsonl => {
            let mut writer = writer;
            for record in records {
                let line = serde_json::to_string(record).expect("tweet serializes");
                writeln!(writer, "{line}")
                    .map_err(|e| CorpusError::io(Path::new("<writer>"), e))?;
            }
            writer
                .flush()
                .map_err(|e| CorpusError::io(Path::new("<writer>"), e))?;
        }
    }
    Ok(())
}

/// Closing price for one UTC day, held to two fraction digits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PricePoint {
    pub date: NaiveDate,
    pub price: f64,
}

/// Contiguous, strictly date-ordered daily prices.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    points: Vec<PricePoint>,
}

impl PriceSeries {
    /// Validates ordering, contiguity and positivity; prices are rounded to cents.
    pub fn new(points: Vec<PricePoint>) -> Result<Self, CorpusError> {
        if points.is_empty() {
            return Err(CorpusError::EmptySeries);
        }
        let mut out = Vec::with_capacity(points.len());
        for (i, p) in points.into_iter().enumerate() {
            let line = i as u64 + 1;
            if !(p.price > 0.0) || !p.price.is_finite() {
                return Err(CorpusError::NonPositivePrice {
                    line,
                    price: p.price.to_string(),
                });
            }
            check_next_day(out.last(), p.date, line)?;
            out.push(PricePoint {
                date: p.date,
                price: round_cents(p.price),
            });
        }
        Ok(PriceSeries { points: out })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[PricePoint] {
        &self.points
    }

    pub fn prices(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.price).collect()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.points.iter().map(|p| p.date).collect()
    }

    pub fn first_date(&self) -> NaiveDate {
        self.points[0].date
    }

    pub fn last_date(&self) -> NaiveDate {
        self.points[self.points.len() - 1].date
    }

    pub fn window(&self) -> CorpusWindow {
        CorpusWindow {
            start: self.first_date(),
            end: self.last_date(),
        }
    }

    /// Sub-series over `range` of day indices; panics if the range is empty or out of bounds.
    pub fn slice(&self, range: std::ops::Range<usize>) -> PriceSeries {
        assert!(!range.is_empty(), "empty price slice");
        PriceSeries {
            points: self.points[range].to_vec(),
        }
    }
}

fn check_next_day(
    prev: Option<&PricePoint>,
    date: NaiveDate,
    line: u64,
) -> Result<(), CorpusError> {
    if let Some(prev) = prev {
        if date <= prev.date {
            return Err(CorpusError::Unordered { line, date });
        }
        let expected = prev.date + Days::new(1);
        if date != expected {
            return Err(CorpusError::MissingDay { missing: expected });
        }
    }
    Ok(())
}

/// Round half-up to two fraction digits.
pub fn round_cents(x: f64) -> f64 {
    to_cents(x) as f64 / 100.0
}

/// Nearest integer number of cents, halves rounded away from zero.
pub fn to_cents(x: f64) -> i64 {
    // Scaling can land a hair below the true half (e.g. 1.005 * 100); the nudge keeps
    // half-up rounding for values written with at most a few more decimals.
    let scaled = x * 100.0;
    let nudged = scaled + scaled.signum() * 1e-9 * scaled.abs().max(1.0);
    nudged.round() as i64
}

/// Parse a decimal string to cents with exact round-half-up.
fn parse_price_cents(raw: &str) -> Option<i64> {
    let s = raw.trim();
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    let plain = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty()) || !plain(int_part) || !plain(frac_part) {
        let x: f64 = s.parse().ok()?;
        return x.is_finite().then(|| to_cents(x));
    }
    let whole: i64 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().ok()?
    };
    let digit = |i: usize| frac_part.as_bytes().get(i).map_or(0, |b| (b - b'0') as i64);
    let mut cents = whole.checked_mul(100)? + digit(0) * 10 + digit(1);
    if digit(2) >= 5 {
        cents += 1;
    }
    Some(if negative { -cents } else { cents })
}

pub fn load_prices(path: &Path) -> Result<PriceSeries, CorpusError> {
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    read_prices(BufReader::new(file))
}

pub fn read_prices<R: Read>(reader: R) -> Result<PriceSeries, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CorpusError::Malformed {
                line: 1,
                field: name.to_string(),
                reason: "column missing from header".into(),
            })
    };
    let (date_col, price_col) = (col("date")?, col("price")?);
    let mut points: Vec<PricePoint> = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let raw_date = row.get(date_col).unwrap_or("").trim();
        let date = NaiveDate::parse_from_str(raw_date, "%Y-%m-%d").map_err(|e| {
            CorpusError::Malformed {
                line,
                field: "date".into(),
                reason: format!("`{raw_date}`: {e}"),
            }
        })?;
        let raw_price = row.get(price_col).unwrap_or("");
        let cents = parse_price_cents(raw_price).ok_or_else(|| CorpusError::Malformed {
            line,
            field: "price".into(),
            reason: format!("`{raw_price}` is not a decimal number"),
        })?;
        if cents <= 0 {
            return Err(CorpusError::NonPositivePrice {
                line,
                price: raw_price.trim().to_string(),
            });
        }
        check_next_day(points.last(), date, line)?;
        points.push(PricePoint {
            date,
            price: cents as f64 / 100.0,
        });
    }
    PriceSeries::new(points)
}

pub fn write_prices(path: &Path, series: &PriceSeries) -> Result<(), CorpusError> {
    let file = File::create(path).map_err(|e| CorpusError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut emit = || -> std::io::Result<()> {
        writeln!(w, "date,price")?;
        for p in series.points() {
            writeln!(w, "{},{:.2}", p.date, p.price)?;
        }
        w.flush()
    };
    emit().map_err(|e| CorpusError::io(path, e))
}

/// Tweets posted on one UTC day.
#[derive(Debug, Clone, PartialEq)]
pub struct DayBucket<T = TweetRecord> {
    pub date: NaiveDate,
    pub tweets: Vec<T>,
}

impl<T> DayBucket<T> {
    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }
}

/// Buckets plus the number of tweets that fell outside the series window.
#[derive(Debug, Clone, PartialEq)]
pub struct Bucketing<T = TweetRecord> {
    pub buckets: Vec<DayBucket<T>>,
    pub out_of_window: usize,
}

/// One bucket per series day, in series order; tweets keep their input order within a day.
pub fn bucket_by_day<T>(tweets: Vec<T>, series: &PriceSeries) -> Bucketing<T>
where
    T: AsRef<TweetRecord>,
{
    let first = series.first_date();
    let mut buckets: Vec<DayBucket<T>> = series
        .points()
        .iter()
        .map(|p| DayBucket {
            date: p.date,
            tweets: Vec::new(),
        })
        .collect();
    let mut out_of_window = 0;
    for tweet in tweets {
        let offset = (tweet.as_ref().day() - first).num_days();
        match usize::try_from(offset)
            .ok()
            .and_then(|i| buckets.get_mut(i))
        {
            Some(bucket) => bucket.tweets.push(tweet),
            None => out_of_window += 1,
        }
    }
    Bucketing {
        buckets,
        out_of_window,
    }
}

impl fmt::Display for PricePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{:.2}", self.date, self.price)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    const HEADER: &str = "id,timestamp,text,followers,comments,likes,retweets\n";

    fn csv_load(body: &str, window: Option<&CorpusWindow>) -> Result<TweetLoad, CorpusError> {
        read_tweets(
            format!("{HEADER}{body}").as_bytes(),
            CorpusFormat::Csv,
            window,
        )
    }

    #[test]
    fn three_rows_load() {
        let load = csv_load(
            "a,1396310400,hello,1,2,3,4\nb,1396310401,\"with, comma\",0,0,0,0\nc,1396396800,x,5,5,5,5\n",
            None,
        )
        .unwrap();
        assert_eq!(load.records.len(), 3);
        assert_eq!(load.out_of_window, 0);
        assert_eq!(load.records[1].text, "with, comma");
    }

    #[test]
    fn negative_count_is_validation_error() {
        let err = csv_load("a,1396310400,hello,-1,2,3,4\n", None).unwrap_err();
        match err {
            CorpusError::Validation { line, field, .. } => {
                assert_eq!(line, 2);
                assert_eq!(field, "followers");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_field_names_line_and_field() {
        let err = csv_load(
            "a,1396310400,hello,1,2,3,4\nb,notanumber,hey,1,2,3,4\n",
            None,
        )
        .unwrap_err();
        match err {
            CorpusError::Malformed { line, field, .. } => {
                assert_eq!(line, 3);
                assert_eq!(field, "timestamp");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_id_rejected() {
        let err = csv_load("a,1,x,1,2,3,4\na,2,y,1,2,3,4\n", None).unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateId { line: 3, .. }));
    }

    #[test]
    fn empty_text_rejected() {
        let err = csv_load("a,1,\"   \",1,2,3,4\n", None).unwrap_err();
        assert!(matches!(err, CorpusError::Validation { ref field, .. } if field == "text"));
    }

    #[test]
    fn window_drops_and_counts() {
        // 2014-04-01 .. 2014-04-02 window; rows on 03-31, 04-01, 04-02 (x2), 04-03.
        let window = CorpusWindow {
            start: d(2014, 4, 1),
            end: d(2014, 4, 2),
        };
        let body = "a,1396310399,x,1,1,1,1\n\
                    b,1396310400,x,1,1,1,1\n\
                    c,1396396800,x,1,1,1,1\n\
                    e,1396483199,x,1,1,1,1\n\
                    f,1396483200,x,1,1,1,1\n";
        let load = csv_load(body, Some(&window)).unwrap();
        assert_eq!(load.records.len(), 3);
        assert_eq!(load.out_of_window, 2);
    }

    #[test]
    fn jsonl_matches_csv() {
        let csv = csv_load("a,1396310400,hello,1,2,3,4\n", None).unwrap();
        let jsonl = read_tweets(
            r#"{"id":"a","timestamp":1396310400,"text":"hello","followers":1,"comments":2,"likes":3,"retweets":4}"#
                .as_bytes(),
            CorpusFormat::Jsonl,
            None,
        )
        .unwrap();
        assert_eq!(csv, jsonl);
        let bad = read_tweets(
            r#"{"id":"a","timestamp":1,"text":"h","followers":1,"comments":-2,"likes":3,"retweets":4}"#.as_bytes(),
            CorpusFormat::Jsonl,
            None,
        )
        .unwrap_err();
        assert!(
            matches!(bad, CorpusError::Validation { line: 1, ref field, .. } if field == "comments")
        );
    }

    #[test]
    fn prices_load_and_round() {
        let s = read_prices(
            "date,price\n2014-04-01,100.00\n2014-04-02,110\n2014-04-03,99.999\n".as_bytes(),
        )
        .unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.prices(), vec![100.0, 110.0, 100.0]);
    }

    #[test]
    fn half_up_rounding_is_exact_on_strings() {
        assert_eq!(parse_price_cents("1.005"), Some(101));
        assert_eq!(parse_price_cents("1.004999"), Some(100));
        assert_eq!(parse_price_cents("0.5"), Some(50));
        assert_eq!(parse_price_cents("12"), Some(1200));
        assert_eq!(parse_price_cents("1e2"), Some(10000));
        assert_eq!(parse_price_cents("abc"), None);
    }

    #[test]
    fn price_gap_names_missing_day() {
        let err = read_prices("date,price\n2014-04-01,100.00\n2014-04-03,120.00\n".as_bytes())
            .unwrap_err();
        assert!(matches!(err, CorpusError::MissingDay { missing } if missing == d(2014, 4, 2)));
    }

    #[test]
    fn price_unordered_and_non_positive() {
        let err =
            read_prices("date,price\n2014-04-02,100\n2014-04-01,100\n".as_bytes()).unwrap_err();
        assert!(matches!(err, CorpusError::Unordered { line: 3, .. }));
        let err = read_prices("date,price\n2014-04-01,0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, CorpusError::NonPositivePrice { line: 2, .. }));
        let err = read_prices("date,price\n2014-04-01,-3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, CorpusError::NonPositivePrice { .. }));
    }

    fn series(n: usize) -> PriceSeries {
        PriceSeries::new(
            (0..n)
                .map(|i| PricePoint {
                    date: d(2014, 4, 1) + Days::new(i as u64),
                    price: 100.0,
                })
                .collect(),
        )
        .unwrap()
    }

    fn tweet(id: &str, ts: i64) -> TweetRecord {
        TweetRecord {
            id: id.into(),
            timestamp: ts,
            text: "t".into(),
            followers: 0,
            comments: 0,
            likes: 0,
            retweets: 0,
        }
    }

    #[test]
    fn empty_tweets_give_empty_buckets() {
        let b = bucket_by_day(Vec::<TweetRecord>::new(), &series(3));
        assert_eq!(b.buckets.len(), 3);
        assert!(b.buckets.iter().all(|b| b.is_empty()));
    }

    #[test]
    fn midnight_boundary_splits_days() {
        let midnight = day_start(d(2014, 4, 2));
        let b = bucket_by_day(
            vec![
                tweet("a", midnight - 1),
                tweet("b", midnight + 1),
                tweet("c", midnight + 5),
            ],
            &series(3),
        );
        assert_eq!(b.buckets[0].len(), 1);
        assert_eq!(b.buckets[1].len(), 2);
        assert_eq!(b.buckets[2].len(), 0);
        assert_eq!(b.out_of_window, 0);
    }

    #[test]
    fn negative_timestamps_floor_to_the_right_day() {
        assert_eq!(utc_day(-1), d(1969, 12, 31));
        assert_eq!(utc_day(0), d(1970, 1, 1));
    }
}
