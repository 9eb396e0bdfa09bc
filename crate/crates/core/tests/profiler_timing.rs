//! Process CPU is process-wide, so every test here holds `LOCK` and the file runs as its own
//! test binary.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use tweetq_core::profiler::{self, ProfilerError, ResourceReport};

static LOCK: Mutex<()> = Mutex::new(());

fn lock() -> std::sync::MutexGuard<'static, ()> {
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn check_ordering(r: &ResourceReport) {
    for c in [r.cpu_pct, r.ram_pct, r.mem_pct] {
        assert!(c.min <= c.avg && c.avg <= c.max, "{c:?}");
    }
    assert_eq!(r.sample_count, r.samples.len());
    assert!(r.wall_seconds >= r.sample_count as f64 * r.interval * 0.5);
    for s in &r.samples {
        for v in [s.t, s.cpu_pct, s.ram_pct, s.mem_pct] {
            assert!(v.is_finite() && v >= 0.0);
        }
        assert!(s.ram_pct <= 100.0 && s.mem_pct <= 100.0);
    }
    let mut prev = 0.0;
    for s in &r.samples {
        let gap = s.t - prev;
        assert!(gap > 0.0);
        assert!(
            gap >= 0.5 * r.interval && gap <= 2.0 * r.interval,
            "gap {gap}"
        );
        prev = s.t;
    }
}

fn busy(d: Duration) -> u64 {
    let end = Instant::now() + d;
    let mut x = 0u64;
    while Instant::now() < end {
        for i in 0..10_000u64 {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(i);
        }
        std::hint::black_box(x);
    }
    x
}

#[test]
fn immediate_stop() {
    let _g = lock();
    let mut p = profiler::start(1.0).unwrap();
    let r = p.stop().unwrap();
    assert!(r.wall_seconds < 1.5);
    check_ordering(&r);
    assert!(matches!(p.stop(), Err(ProfilerError::AlreadyStopped)));
}

#[test]
fn invalid_interval() {
    assert!(matches!(
        profiler::start(0.0),
        Err(ProfilerError::InvalidInterval(_))
    ));
}

#[test]
fn one_profiler_at_a_time() {
    let _g = lock();
    let mut p = profiler::start(1.0).unwrap();
    assert!(matches!(
        profiler::start(1.0),
        Err(ProfilerError::AlreadyActive)
    ));
    p.stop().unwrap();
    let mut q = profiler::start(1.0).unwrap();
    q.stop().unwrap();
    drop(profiler::start(1.0).unwrap());
    profiler::start(1.0).unwrap().stop().unwrap();
}

#[test]
fn five_seconds_gives_about_five_samples() {
    let _g = lock();
    let mut p = profiler::start(1.0).unwrap();
    std::thread::sleep(Duration::from_secs(5));
    let r = p.stop().unwrap();
    assert!((4..=6).contains(&r.sample_count), "{}", r.sample_count);
    check_ordering(&r);
}

#[test]
fn busy_loop_reads_high_and_sleep_reads_low() {
    let _g = lock();
    let (_, busy_report) = profiler::profile(0.5, || busy(Duration::from_secs(2))).unwrap();
    check_ordering(&busy_report);
    assert!(busy_report.cpu_pct.avg > 50.0, "{:?}", busy_report.cpu_pct);

    let (_, idle) = profiler::profile(1.0, || std::thread::sleep(Duration::from_secs(2))).unwrap();
    check_ordering(&idle);
    assert!(idle.sample_count >= 1);
    assert!(idle.cpu_pct.avg < 10.0, "{:?}", idle.cpu_pct);
    // Nothing else runs, so this is the sampler's own overhead.
    assert!(idle.cpu_pct.avg < 2.0, "{:?}", idle.cpu_pct);
    assert!(idle.mem_pct.max > 0.0 && idle.ram_pct.max > 0.0);
}

#[test]
fn samples_export_as_csv() {
    let _g = lock();
    let (_, r) = profiler::profile(0.2, || std::thread::sleep(Duration::from_millis(700))).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("samples.csv");
    r.save_samples_csv(&path).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), r.sample_count + 1);
    assert!(text.starts_with("t,cpu_pct,ram_pct,mem_pct\n"));
    let json = serde_json::to_value(&r).unwrap();
    assert!(json.get("cpu_pct").unwrap().get("avg").is_some());
}
