use tweetq_core::attribute::Attribute;
use tweetq_core::compare::{prepare, score_selection};
use tweetq_core::corpus::{read_tweets, write_tweets_to, CorpusFormat};
use tweetq_core::preprocess::clean;
use tweetq_core::sentiment::{valence_sum, Lexicon};
use tweetq_core::synth::{gen_corpus, SynthConfig};

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let mut cov = 0.0;
    let (mut va, mut vb) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    cov / (va * vb).sqrt()
}

/// Correlation between each day's filtered mean compound and the next day's log-return.
fn signal_return_corr(cfg: &SynthConfig, filter: Option<Attribute>) -> f64 {
    let (tweets, prices) = gen_corpus(cfg).unwrap();
    let prepared = prepare(tweets, &prices);
    let (signals, _) = score_selection(&prepared.buckets, filter, &Lexicon::shipped());
    let p = prices.prices();
    let returns: Vec<f64> = p.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    let compounds: Vec<f64> = signals[..signals.len() - 1]
        .iter()
        .map(|s| s.mean_compound)
        .collect();
    pearson(&compounds, &returns)
}

#[test]
fn follower_half_tracks_next_day_return() {
    for seed in [1, 2] {
        let cfg = SynthConfig {
            seed,
            ..SynthConfig::default()
        };
        let followers = signal_return_corr(&cfg, Some(Attribute::Followers));
        assert!((0.7..=0.9).contains(&followers), "seed {seed}: {followers}");
        for attr in [Attribute::Comments, Attribute::Likes, Attribute::Retweets] {
            let other = signal_return_corr(&cfg, Some(attr));
            assert!(
                other < followers - 0.1,
                "seed {seed} {attr}: {other} vs {followers}"
            );
        }
    }
}

#[test]
fn no_signal_without_rho() {
    let cfg = SynthConfig {
        rho: 0.0,
        tweets_per_day: 60,
        seed: 9,
        ..SynthConfig::default()
    };
    for filter in [
        None,
        Some(Attribute::Followers),
        Some(Attribute::Comments),
        Some(Attribute::Likes),
        Some(Attribute::Retweets),
    ] {
        let c = signal_return_corr(&cfg, filter);
        assert!(c.abs() <= 0.1, "{filter:?}: {c}");
    }
}

#[test]
fn generated_corpus_validates_and_keeps_tokens() {
    let cfg = SynthConfig {
        days: 30,
        tweets_per_day: 40,
        ..SynthConfig::default()
    };
    let (tweets, _) = gen_corpus(&cfg).unwrap();
    assert_eq!(tweets.len(), 30 * 40);
    for format in [CorpusFormat::Csv, CorpusFormat::Jsonl] {
        let mut buf = Vec::new();
        write_tweets_to(&mut buf, format, &tweets).unwrap();
        let back = read_tweets(buf.as_slice(), format, None).unwrap();
        assert_eq!(back.records, tweets);
    }
    let lex = Lexicon::shipped();
    for t in &tweets {
        let v = valence_sum(&clean(&t.text), &lex);
        assert!(
            v == 2.0 || v == -2.0,
            "{:?} -> {:?} ({v})",
            t.text,
            clean(&t.text)
        );
    }
}
