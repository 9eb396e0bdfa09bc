//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! `cargo test -p tweetq-cli --test acceptance -- 3 4` runs only criteria 3 and 4.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use tweetq_cli::RunConfig;
use tweetq_core::compare::{prepare, run_pipeline, run_to_target};
use tweetq_core::metrics::{mape, nse, r2, rmse, vaf, wmape};
use tweetq_core::profiler::{self, ChannelSummary, ResourceReport};
use tweetq_core::qlearn::{
    reward_cdr, reward_rdr, reward_sdr, zero_reward_points, Action, AgentConfig, CdrBand, QModel,
    QTable, State,
};
use tweetq_core::{
    clean, evaluate, gen_corpus, Attribute, CompareConfig, Lexicon, RewardKind, SynthConfig,
};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol * want.abs().max(1.0)
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn experiment_config() -> RunConfig {
    let path = workspace_root().join("configs/experiment.conf");
    RunConfig::resolve(Some(&path), &[]).expect("experiment config loads")
}

fn reward_oracles() -> Check {
    for (ap, pp, want) in [
        (110.0, 110.0, 0.0),
        (110.0, 99.0, -11.0),
        (100.0, 130.0, -30.0),
    ] {
        ensure(
            close(reward_sdr(ap, pp), want, 1e-9),
            format!("sdr({ap}, {pp})"),
        )?;
    }
    for (ap, pp, want) in [
        (100.0, 100.0, 0.0),
        (100.0, 90.0, -10.0),
        (200.0, 90.0, -55.0),
    ] {
        ensure(
            close(reward_rdr(ap, pp).unwrap(), want, 1e-9),
            format!("rdr({ap}, {pp})"),
        )?;
    }
    let band = zero_reward_points(110.0, 100.0, 90.0).unwrap();
    let g = *band.geometry().ok_or("(110, 100, 90) is degenerate")?;
    ensure(
        close(g.alpha, 0.1, 1e-9)
            && close(g.l, 11.0, 1e-9)
            && close(g.zr1, 99.0, 1e-9)
            && close(g.zr2, 121.0, 1e-9),
        format!("geometry (110, 100, 90) = {g:?}"),
    )?;
    ensure(
        matches!(
            zero_reward_points(110.0, 100.0, 100.0).unwrap(),
            CdrBand::Degenerate { .. }
        ),
        "pp_prev = ap_prev should be degenerate",
    )?;
    let g2 = *zero_reward_points(110.0, 100.0, 120.0)
        .unwrap()
        .geometry()
        .ok_or("(110, 100, 120)")?;
    ensure(
        close(g2.l, 22.0, 1e-9) && close(g2.zr1, 88.0, 1e-9) && close(g2.zr2, 132.0, 1e-9),
        format!("geometry (110, 100, 120) = {g2:?}"),
    )?;
    for (pp, want) in [(110.0, 100.0), (99.0, 0.0), (121.0, 0.0), (115.5, 50.0)] {
        ensure(
            close(reward_cdr(&band, 110.0, pp), want, 1e-9),
            format!("cdr(pp = {pp})"),
        )?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    while checked < 10_000 {
        let ap_prev = rng.random_range(1.0..100_000.0);
        let ap = ap_prev * rng.random_range(0.5..1.5);
        let pp_prev = ap_prev * rng.random_range(0.5..1.5);
        let pp = ap * rng.random_range(0.0..2.0);
        let band = zero_reward_points(ap, ap_prev, pp_prev).unwrap();
        let Some(g) = band.geometry() else { continue };
        let want = 100.0 * (1.0 - (pp - ap).abs() / g.l);
        let got = reward_cdr(&band, ap, pp);
        ensure(
            close(got, want, 1e-9),
            format!("closed form at ap={ap} pp={pp} l={}: {got} vs {want}", g.l),
        )?;
        checked += 1;
    }
    Ok(format!(
        "13 hand examples, closed form on {checked} random inputs"
    ))
}

/// Deterministic two-state, two-action MDP: `(next_state, reward)` per `(state, action)`.
const TOY: [[(usize, f64); 2]; 2] = [[(0, 1.0), (1, 0.0)], [(0, 0.0), (1, 2.0)]];

fn value_iteration(gamma: f64) -> [usize; 2] {
    let mut v = [0.0f64; 2];
    let q = |v: &[f64; 2], s: usize, a: usize| TOY[s][a].1 + gamma * v[TOY[s][a].0];
    for _ in 0..5_000 {
        v = [0, 1].map(|s| q(&v, s, 0).max(q(&v, s, 1)));
    }
    [0, 1].map(|s| usize::from(q(&v, s, 1) > q(&v, s, 0)))
}

fn bellman() -> Check {
    let cfg = AgentConfig {
        theta: 0.5,
        gamma: 0.95,
        action_min: -1,
        action_max: 1,
        price_bucket_width: 25_000.0,
        sentiment_bins: 3,
        ..AgentConfig::default()
    };
    let s = State {
        price_bin: 0,
        sentiment_bin: 1,
    };
    let next = State {
        price_bin: 1,
        sentiment_bin: 0,
    };
    let a = Action { percent: 0 };
    let mut model = QModel::new(cfg.clone()).unwrap();
    model.set_q(s, a, 2.0).unwrap();
    model.set_q(next, Action { percent: 1 }, 4.0).unwrap();
    let got = model.q_update(s, a, 1.0, next).unwrap();
    ensure(close(got, 3.4, 1e-12), format!("hand example gave {got}"))?;
    ensure(model.q(s, a).unwrap() == got, "update not stored")?;

    let fixed = 1.0 + 0.95 * 4.0;
    model.set_q(s, a, fixed).unwrap();
    ensure(
        model.q_update(s, a, 1.0, next).unwrap() == fixed,
        "fixed point moved",
    )?;

    let mut overwrite = QModel::new(AgentConfig {
        theta: 1.0,
        gamma: 0.0,
        ..cfg
    })
    .unwrap();
    ensure(
        overwrite.q_update(s, a, -10.0, next).unwrap() == -10.0,
        "theta=1, gamma=0",
    )?;

    let mut agree = Vec::new();
    for gamma in [0.0, 0.5, 0.9] {
        let expected = value_iteration(gamma);
        let mut hits = 0;
        for seed in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut q = QTable::new(2, 2);
            let mut s = rng.random_range(0..2);
            for _ in 0..20_000 {
                let a = q.select_action(s, 1.0, &mut rng);
                let (next, r) = TOY[s][a];
                q.update(s, a, r, Some(next), 0.05, gamma).unwrap();
                s = if rng.random_bool(0.1) {
                    rng.random_range(0..2)
                } else {
                    next
                };
            }
            hits += usize::from([q.greedy(0), q.greedy(1)] == expected);
        }
        ensure(
            hits == 10,
            format!("gamma {gamma}: {hits}/10 seeds match value iteration"),
        )?;
        agree.push(format!("gamma {gamma} 10/10"));
    }
    Ok(format!(
        "hand update example, fixed point, toy MDP {}",
        agree.join(", ")
    ))
}

fn oracle_mean(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for v in x {
        s += v;
    }
    s / x.len() as f64
}

fn oracle_var(x: &[f64]) -> f64 {
    let m = oracle_mean(x);
    let mut s = 0.0;
    for v in x {
        s += (v - m) * (v - m);
    }
    s / (x.len() as f64 - 1.0)
}

fn metric_fidelity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..1000 {
        let n = rng.random_range(2..200);
        let base = rng.random_range(10.0..50_000.0);
        let ap: Vec<f64> = (0..n).map(|_| base * rng.random_range(0.5..1.5)).collect();
        let pp: Vec<f64> = ap.iter().map(|a| a * rng.random_range(0.7..1.3)).collect();
        let diff: Vec<f64> = ap.iter().zip(&pp).map(|(a, p)| a - p).collect();
        let m = oracle_mean(&ap);
        let (mut rss, mut tss, mut ape, mut abs) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            rss += (ap[i] - pp[i]).powi(2);
            tss += (ap[i] - m).powi(2);
            ape += ((ap[i] - pp[i]) / ap[i]).abs();
            abs += (ap[i] - pp[i]).abs();
        }
        let want = [
            (
                "vaf",
                vaf(&ap, &pp).unwrap(),
                (1.0 - oracle_var(&diff) / oracle_var(&ap)) * 100.0,
            ),
            ("r2", r2(&ap, &pp).unwrap(), 1.0 - rss / tss),
            ("nse", nse(&ap, &pp).unwrap(), 1.0 - rss / tss),
            ("mape", mape(&ap, &pp).unwrap(), ape / n as f64 * 100.0),
            ("rmse", rmse(&ap, &pp).unwrap(), (rss / n as f64).sqrt()),
            (
                "wmape",
                wmape(&ap, &pp).unwrap(),
                abs / ap.iter().sum::<f64>() * 100.0,
            ),
        ];
        for (name, got, expect) in want {
            ensure(
                (got - expect).abs() <= 1e-9 * expect.abs().max(1e-12),
                format!("case {case}: {name} {got} vs oracle {expect}"),
            )?;
        }
        ensure(
            r2(&ap, &pp).unwrap().to_bits() == nse(&ap, &pp).unwrap().to_bits(),
            format!("case {case}: r2 != nse"),
        )?;
    }
    let ap = [3.0, 7.5, 1.25, 9.0];
    let r = evaluate(&ap, &ap).unwrap();
    ensure(
        (r.vaf, r.r2, r.mape, r.nse, r.rmse, r.wmape) == (100.0, 1.0, 0.0, 1.0, 0.0, 0.0),
        format!("perfect fit gave {r:?}"),
    )?;
    Ok("1000 random pairs within 1e-9 relative, r2 == nse bitwise, perfect-fit identities".into())
}

/// Random text biased toward the pieces the cleaner handles.
fn tweetish(rng: &mut ChaCha8Rng) -> String {
    const PIECES: &[&str] = &[
        "RT ", "rt", "rt: ", "@", "@user_1", "#", "#Tag", ".", "..", "...", " ", "  ", "\t",
        "http://", "https://", "www.", "x.co/a", "A", "b", "Z", "0", "!", "?", "ü", "Ü", "🚀",
        "a@b", "ooooo", ":", "/",
    ];
    let n = rng.random_range(0..25);
    (0..n)
        .map(|_| PIECES[rng.random_range(0..PIECES.len())])
        .collect()
}

fn longest_run(s: &str) -> usize {
    let mut best = 0;
    let mut run = 0;
    let mut last = None;
    for c in s.chars() {
        run = if Some(c) == last { run + 1 } else { 1 };
        last = Some(c);
        best = best.max(run);
    }
    best
}

fn preprocessing_goldens() -> Check {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let input = fs::read_to_string(dir.join("tweets50.txt")).map_err(|e| e.to_string())?;
    let golden = fs::read(dir.join("tweets50.golden.txt")).map_err(|e| e.to_string())?;
    let lines: Vec<&str> = input.lines().collect();
    ensure(
        lines.len() == 50,
        format!("fixture has {} lines", lines.len()),
    )?;
    let cleaned: String = lines.iter().map(|l| clean(l) + "\n").collect();
    if cleaned.as_bytes() != golden.as_slice() {
        let golden = String::from_utf8_lossy(&golden);
        let (i, (got, want)) = cleaned
            .lines()
            .zip(golden.lines())
            .enumerate()
            .find(|(_, (g, w))| g != w)
            .unwrap_or((0, ("<length>", "<length>")));
        return Err(format!("line {}: got {got:?}, golden {want:?}", i + 1));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10_000 {
        let x = tweetish(&mut rng);
        let c = clean(&x);
        ensure(clean(&c) == c, format!("not idempotent on {x:?}"))?;
        ensure(
            !c.chars().any(char::is_uppercase),
            format!("uppercase left in {c:?}"),
        )?;
        ensure(
            !c.contains("http://") && !c.contains("https://"),
            format!("url left in {c:?}"),
        )?;
        ensure(!c.contains('#'), format!("'#' left in {c:?}"))?;
        ensure(!c.contains("  "), format!("double space in {c:?}"))?;
        ensure(
            !c.split(' ').any(|t| t.starts_with('@')),
            format!("mention left in {c:?}"),
        )?;
        ensure(longest_run(&c) <= 3, format!("run > 3 in {c:?}"))?;
        ensure(c.trim() == c, format!("untrimmed {c:?}"))?;
    }
    Ok("50-tweet golden byte-exact, 10000 random strings".into())
}

fn attribute_ranking() -> Check {
    let base = experiment_config();
    let lex = Lexicon::shipped();
    let mut attr_wins = 0;
    let mut cdr_wins = 0;
    let mut rows = Vec::new();
    for seed in 0..10u64 {
        let synth = SynthConfig {
            seed,
            ..base.synth.clone()
        };
        let (tweets, prices) = gen_corpus(&synth).map_err(|e| e.to_string())?;
        let prepared = prepare(tweets, &prices);
        let agent = AgentConfig {
            seed,
            ..base.agent.clone()
        };
        let run = |attr: Attribute, kind: RewardKind| {
            run_pipeline(
                &prepared,
                Some(attr),
                &lex,
                kind,
                &agent,
                base.train_fraction,
            )
            .map(|r| r.report.vaf)
        };
        let mut by_attr = BTreeMap::new();
        for attr in Attribute::ALL {
            by_attr.insert(attr, run(attr, RewardKind::Cdr).map_err(|e| e.to_string())?);
        }
        let f = by_attr[&Attribute::Followers];
        let sdr = run(Attribute::Followers, RewardKind::Sdr).map_err(|e| e.to_string())?;
        let rdr = run(Attribute::Followers, RewardKind::Rdr).map_err(|e| e.to_string())?;
        attr_wins += usize::from(
            by_attr
                .iter()
                .all(|(a, v)| *a == Attribute::Followers || f > *v),
        );
        cdr_wins += usize::from(f > sdr && f > rdr);
        rows.push(format!(
            "    seed {seed}: followers {f:.2} comments {:.2} likes {:.2} retweets {:.2} | sdr {sdr:.2} rdr {rdr:.2}",
            by_attr[&Attribute::Comments],
            by_attr[&Attribute::Likes],
            by_attr[&Attribute::Retweets]
        ));
    }
    println!("{}", rows.join("\n"));
    let summary = format!("followers best in {attr_wins}/10 (need 9), CDR beats SDR and RDR in {cdr_wins}/10 (need 8)");
    if attr_wins >= 9 && cdr_wins >= 8 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn channels(r: &ResourceReport) -> [(&'static str, ChannelSummary); 3] {
    [("cpu", r.cpu_pct), ("ram", r.ram_pct), ("mem", r.mem_pct)]
}

fn resource_comparison() -> Check {
    let base = experiment_config();
    let target = base
        .target_vaf
        .ok_or("experiment config has no target_vaf")?;
    let lex = Lexicon::shipped();
    let mut faster = 0;
    for seed in 0..10u64 {
        let (tweets, prices) = gen_corpus(&SynthConfig {
            seed,
            ..base.synth.clone()
        })
        .map_err(|e| e.to_string())?;
        let cfg = CompareConfig {
            agent: AgentConfig {
                seed,
                ..base.agent.clone()
            },
            reward: base.reward,
            attribute: base.attribute,
            train_fraction: base.train_fraction,
            profile_interval: base.profile_interval,
            timeout_seconds: base.timeout,
        };
        let r =
            run_to_target(&tweets, &prices, &lex, target, &cfg, None).map_err(|e| e.to_string())?;
        println!(
            "    seed {seed}: classic {:.2}s {} tweets vaf {:.2} | proposed {:.2}s {} tweets vaf {:.2}",
            r.classic.wall_seconds,
            r.classic.tweets_utilized,
            r.classic.final_vaf,
            r.proposed.wall_seconds,
            r.proposed.tweets_utilized,
            r.proposed.final_vaf
        );
        ensure(
            r.proposed.tweets_utilized < r.classic.tweets_utilized,
            format!(
                "seed {seed}: proposed used {} tweets, classic {}",
                r.proposed.tweets_utilized, r.classic.tweets_utilized
            ),
        )?;
        for a in [&r.classic, &r.proposed] {
            for (name, c) in channels(&a.resources) {
                ensure(
                    c.min <= c.avg && c.avg <= c.max,
                    format!("seed {seed}: {name} {c:?}"),
                )?;
            }
        }
        faster += usize::from(r.proposed.wall_seconds < r.classic.wall_seconds);
    }
    let (_, busy) = profiler::profile(0.25, || {
        let end = Instant::now() + Duration::from_secs(2);
        let mut x = 0u64;
        while Instant::now() < end {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1);
        }
        std::hint::black_box(x)
    })
    .map_err(|e| e.to_string())?;
    let (_, idle) = profiler::profile(0.25, || std::thread::sleep(Duration::from_secs(2)))
        .map_err(|e| e.to_string())?;
    for (label, r) in [("busy", &busy), ("idle", &idle)] {
        for (name, c) in channels(r) {
            ensure(
                c.min <= c.avg && c.avg <= c.max,
                format!("{label}: {name} {c:?}"),
            )?;
        }
    }
    ensure(
        busy.cpu_pct.avg > 50.0,
        format!("busy loop cpu avg {:.1}", busy.cpu_pct.avg),
    )?;
    ensure(
        idle.cpu_pct.avg < 10.0,
        format!("sleep cpu avg {:.1}", idle.cpu_pct.avg),
    )?;
    let summary = format!(
        "proposed faster in {faster}/10 (need 8), fewer tweets 10/10, cpu busy {:.0}% idle {:.1}%",
        busy.cpu_pct.avg, idle.cpu_pct.avg
    );
    if faster >= 8 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Runs every stage in `dir` with relative paths and hashes each output file.
fn run_stages(dir: &Path) -> Result<BTreeMap<String, String>, String> {
    let conf = workspace_root().join("configs/experiment.conf");
    let conf = conf.to_str().unwrap();
    let stages: Vec<Vec<&str>> = vec![
        vec![
            "synth",
            "--out",
            "data",
            "--days",
            "90",
            "--tweets-per-day",
            "30",
            "--seed",
            "5",
        ],
        vec![
            "synth",
            "--out",
            "jdata",
            "--days",
            "20",
            "--tweets-per-day",
            "5",
            "--seed",
            "5",
            "--format",
            "jsonl",
        ],
        vec![
            "preprocess",
            "--tweets",
            "data/tweets.csv",
            "--prices",
            "data/prices.csv",
            "--out",
            "clean.jsonl",
        ],
        vec![
            "split",
            "--tweets",
            "clean.jsonl",
            "--prices",
            "data/prices.csv",
            "--attribute",
            "likes",
            "--out",
            "top.csv",
        ],
        vec![
            "sentiment",
            "--tweets",
            "top.csv",
            "--prices",
            "data/prices.csv",
            "--out",
            "signals.csv",
        ],
        vec![
            "train",
            "--config",
            conf,
            "--seed",
            "5",
            "--episodes",
            "200",
            "--prices",
            "data/prices.csv",
            "--signals",
            "signals.csv",
            "--out",
            "model.bin",
        ],
        vec![
            "train",
            "--seed",
            "5",
            "--episodes",
            "20",
            "--reward",
            "sdr",
            "--state",
            "price-only",
            "--prices",
            "data/prices.csv",
            "--signals",
            "signals.csv",
            "--out",
            "model-sdr.bin",
        ],
        vec![
            "predict",
            "--config",
            conf,
            "--model",
            "model.bin",
            "--prices",
            "data/prices.csv",
            "--signals",
            "signals.csv",
            "--out",
            "pred.csv",
        ],
        vec![
            "evaluate",
            "--predictions",
            "pred.csv",
            "--out",
            "eval.json",
        ],
        vec![
            "compare",
            "--config",
            conf,
            "--seed",
            "5",
            "--episodes",
            "30",
            "--mode",
            "time",
            "--budget",
            "10",
            "--tweets",
            "data/tweets.csv",
            "--prices",
            "data/prices.csv",
            "--out",
            "compare.json",
        ],
    ];
    for args in &stages {
        let out = Command::new(env!("CARGO_BIN_EXE_tweetq"))
            .current_dir(dir)
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!(
                "{args:?}: {}",
                String::from_utf8_lossy(&out.stderr)
            ));
        }
    }
    let mut hashes = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            if path.is_dir() {
                stack.push(path);
                continue;
            }
            let rel = path.strip_prefix(dir).unwrap().display().to_string();
            let mut bytes = fs::read(&path).map_err(|e| e.to_string())?;
            if rel == "compare.json" {
                // profiler channels and wall-clock times are exempt
                let mut v: serde_json::Value =
                    serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
                for side in ["classic", "proposed"] {
                    let obj = v[side].as_object_mut().ok_or("compare report shape")?;
                    obj.remove("resources");
                    obj.remove("wall_seconds");
                }
                bytes = serde_json::to_vec(&v).map_err(|e| e.to_string())?;
            }
            hashes.insert(rel, sha256_hex(&bytes));
        }
    }
    Ok(hashes)
}

fn determinism() -> Check {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = run_stages(a.path())?;
    let second = run_stages(b.path())?;
    ensure(
        first.len() >= 12,
        format!("only {} output files", first.len()),
    )?;
    ensure(
        first.keys().eq(second.keys()),
        format!(
            "output sets differ: {:?} vs {:?}",
            first.keys(),
            second.keys()
        ),
    )?;
    let differing: Vec<&String> = first
        .iter()
        .filter(|(k, h)| second[*k] != **h)
        .map(|(k, _)| k)
        .collect();
    ensure(
        differing.is_empty(),
        format!("outputs differ between runs: {differing:?}"),
    )?;
    Ok(format!(
        "{} output files from 10 stage runs hash identically across two runs",
        first.len()
    ))
}

struct Criterion {
    number: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Check,
}

fn main() {
    let criteria = [
        Criterion {
            number: 1,
            name: "reward oracles",
            limit: Some(Duration::from_secs(1)),
            run: reward_oracles,
        },
        Criterion {
            number: 2,
            name: "Bellman correctness",
            limit: Some(Duration::from_secs(10)),
            run: bellman,
        },
        Criterion {
            number: 3,
            name: "metric fidelity",
            limit: Some(Duration::from_secs(5)),
            run: metric_fidelity,
        },
        Criterion {
            number: 4,
            name: "preprocessing goldens",
            limit: Some(Duration::from_secs(5)),
            run: preprocessing_goldens,
        },
        Criterion {
            number: 5,
            name: "attribute ranking",
            limit: Some(Duration::from_secs(300)),
            run: attribute_ranking,
        },
        Criterion {
            number: 6,
            name: "resource comparison",
            limit: Some(Duration::from_secs(600)),
            run: resource_comparison,
        },
        Criterion {
            number: 7,
            name: "determinism",
            limit: None,
            run: determinism,
        },
    ];
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = Vec::new();
    for c in criteria
        .iter()
        .filter(|c| selected.is_empty() || selected.contains(&c.number))
    {
        let started = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = started.elapsed();
        let result = match (result, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!(
                "took {:.2}s, limit {}s",
                elapsed.as_secs_f64(),
                limit.as_secs()
            )),
            (r, _) => r,
        };
        let (verdict, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!(
            "criterion {} ({}): {verdict} [{:.2}s] {detail}",
            c.number,
            c.name,
            elapsed.as_secs_f64()
        );
        if result.is_err() {
            failed.push(c.number);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
