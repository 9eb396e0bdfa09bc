//! Background sampler of process CPU, system RAM and process resident memory.
//!
//! Channels:
//! - `cpu_pct`: process CPU time (user + system, all threads) over wall time since the
//!   previous sample, so one saturated core reads 100.
//! - `ram_pct`: system RAM in use, `(MemTotal - MemAvailable) / MemTotal`.
//! - `mem_pct`: this process's resident set as a share of physical RAM.
//!
//! Only one profiler may be active per process, since CPU accounting is process-wide.

use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, RecvTimeoutError, Sender};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_INTERVAL: f64 = 1.0;

static ACTIVE: AtomicBool = AtomicBool::new(false);

#[derive(Debug, Error)]
pub enum ProfilerError {
    #[error("sampling interval must be positive and finite, got {0}")]
    InvalidInterval(f64),
    #[error("resource counters are not available on this platform")]
    Unsupported,
    #[error("a profiler is already running in this process")]
    AlreadyActive,
    #[error("profiler was already stopped")]
    AlreadyStopped,
    #[error("sampler thread panicked")]
    SamplerPanicked,
    #[error("reading counters: {0}")]
    Counters(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceSample {
    /// Seconds since start.
    pub t: f64,
    pub cpu_pct: f64,
    pub ram_pct: f64,
    pub mem_pct: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ChannelSummary {
    pub min: f64,
    pub avg: f64,
    pub max: f64,
}

impl ChannelSummary {
    /// All zeros for an empty slice.
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Self {
        let mut n = 0usize;
        let (mut min, mut max, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        for v in values {
            n += 1;
            min = min.min(v);
            max = max.max(v);
            sum += v;
        }
        if n == 0 {
            return ChannelSummary::default();
        }
        // Rounding in the sum can push the mean a hair outside [min, max].
        let avg = (sum / n as f64).clamp(min, max);
        ChannelSummary { min, avg, max }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub cpu_pct: ChannelSummary,
    pub ram_pct: ChannelSummary,
    pub mem_pct: ChannelSummary,
    pub sample_count: usize,
    pub wall_seconds: f64,
    pub interval: f64,
    #[serde(skip)]
    pub samples: Vec<ResourceSample>,
}

impl ResourceReport {
    pub fn from_samples(samples: Vec<ResourceSample>, wall_seconds: f64, interval: f64) -> Self {
        ResourceReport {
            cpu_pct: ChannelSummary::from_values(samples.iter().map(|s| s.cpu_pct)),
            ram_pct: ChannelSummary::from_values(samples.iter().map(|s| s.ram_pct)),
            mem_pct: ChannelSummary::from_values(samples.iter().map(|s| s.mem_pct)),
            sample_count: samples.len(),
            wall_seconds,
            interval,
            samples,
        }
    }

    /// `t,cpu_pct,ram_pct,mem_pct`, one row per sample.
    pub fn write_samples_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,cpu_pct,ram_pct,mem_pct")?;
        for s in &self.samples {
            writeln!(
                w,
                "{:.6},{:.4},{:.4},{:.4}",
                s.t, s.cpu_pct, s.ram_pct, s.mem_pct
            )?;
        }
        w.flush()
    }

    pub fn save_samples_csv(&self, path: &Path) -> Result<(), ProfilerError> {
        self.write_samples_csv(std::io::BufWriter::new(std::fs::File::create(path)?))?;
        Ok(())
    }
}

#[cfg(target_os = "linux")]
mod counters {
    use super::ProfilerError;

    pub fn process_cpu_seconds() -> Result<f64, ProfilerError> {
        let mut usage = std::mem::MaybeUninit::<libc::rusage>::zeroed();
        // SAFETY: getrusage fills the struct it is given; RUSAGE_SELF is always valid.
        let rc = unsafe { libc::getrusage(libc::RUSAGE_SELF, usage.as_mut_ptr()) };
        if rc != 0 {
            return Err(ProfilerError::Counters(
                std::io::Error::last_os_error().to_string(),
            ));
        }
        // SAFETY: initialized by the successful call above.
        let usage = unsafe { usage.assume_init() };
        let secs = |tv: libc::timeval| tv.tv_sec as f64 + tv.tv_usec as f64 * 1e-6;
        Ok(secs(usage.ru_utime) + secs(usage.ru_stime))
    }

    /// `(MemTotal, MemAvailable)` in bytes.
    pub fn system_memory() -> Result<(u64, u64), ProfilerError> {
        let text = std::fs::read_to_string("/proc/meminfo")?;
        let field = |name: &str| -> Result<u64, ProfilerError> {
            text.lines()
                .find_map(|l| l.strip_prefix(name))
                .and_then(|rest| {
                    rest.trim()
                        .trim_end_matches("kB")
                        .trim()
                        .parse::<u64>()
                        .ok()
                })
                .map(|kb| kb * 1024)
                .ok_or_else(|| ProfilerError::Counters(format!("/proc/meminfo lacks {name}")))
        };
        Ok((field("MemTotal:")?, field("MemAvailable:")?))
    }

    pub fn resident_bytes() -> Result<u64, ProfilerError> {
        let text = std::fs::read_to_string("/proc/self/statm")?;
        let pages: u64 = text
            .split_whitespace()
            .nth(1)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| ProfilerError::Counters("unreadable /proc/self/statm".into()))?;
        // SAFETY: sysconf has no preconditions.
        let page = unsafe { libc::sysconf(libc::_SC_PAGESIZE) };
        Ok(pages * page.max(1) as u64)
    }
}

#[cfg(not(target_os = "linux"))]
mod counters {
    use super::ProfilerError;

    pub fn process_cpu_seconds() -> Result<f64, ProfilerError> {
        Err(ProfilerError::Unsupported)
    }

    pub fn system_memory() -> Result<(u64, u64), ProfilerError> {
        Err(ProfilerError::Unsupported)
    }

    pub fn resident_bytes() -> Result<u64, ProfilerError> {
        Err(ProfilerError::Unsupported)
    }
}

struct Sampler {
    origin: Instant,
    last_wall: Instant,
    last_cpu: f64,
    samples: Vec<ResourceSample>,
}

impl Sampler {
    fn new(origin: Instant) -> Result<Self, ProfilerError> {
        Ok(Sampler {
            origin,
            last_wall: origin,
            last_cpu: counters::process_cpu_seconds()?,
            samples: Vec::new(),
        })
    }

    fn sample(&mut self) -> Result<(), ProfilerError> {
        let now = Instant::now();
        let cpu = counters::process_cpu_seconds()?;
        let (total, available) = counters::system_memory()?;
        let rss = counters::resident_bytes()?;
        let dt = now.duration_since(self.last_wall).as_secs_f64();
        let cpu_pct = if dt > 0.0 {
            ((cpu - self.last_cpu) / dt * 100.0).max(0.0)
        } else {
            0.0
        };
        let total = total.max(1) as f64;
        self.samples.push(ResourceSample {
            t: now.duration_since(self.origin).as_secs_f64(),
            cpu_pct,
            ram_pct: (total - available as f64).max(0.0) / total * 100.0,
            mem_pct: rss as f64 / total * 100.0,
        });
        self.last_wall = now;
        self.last_cpu = cpu;
        Ok(())
    }
}

/// Running profiler. Call [`Profiler::stop`] to collect the report.
pub struct Profiler {
    interval: Duration,
    origin: Instant,
    stop_tx: Option<Sender<()>>,
    thread: Option<JoinHandle<Result<Vec<ResourceSample>, ProfilerError>>>,
}

/// Starts sampling every `interval` seconds on a background thread.
pub fn start(interval: f64) -> Result<Profiler, ProfilerError> {
    if !(interval > 0.0 && interval.is_finite()) {
        return Err(ProfilerError::InvalidInterval(interval));
    }
    if ACTIVE
        .compare_exchange(false, true, Ordering::AcqRel, Ordering::Acquire)
        .is_err()
    {
        return Err(ProfilerError::AlreadyActive);
    }
    let origin = Instant::now();
    let mut sampler = match Sampler::new(origin) {
        Ok(s) => s,
        Err(e) => {
            ACTIVE.store(false, Ordering::Release);
            return Err(e);
        }
    };
    let period = Duration::from_secs_f64(interval);
    let (tx, rx) = mpsc::channel::<()>();
    let thread = std::thread::Builder::new()
        .name("profiler".into())
        .spawn(move || {
            let mut deadline = origin + period;
            loop {
                let wait = deadline.saturating_duration_since(Instant::now());
                match rx.recv_timeout(wait) {
                    Err(RecvTimeoutError::Timeout) => {
                        sampler.sample()?;
                        deadline += period;
                        // Fell behind (suspended machine); resynchronize instead of bursting.
                        if deadline < Instant::now() {
                            deadline = Instant::now() + period;
                        }
                    }
                    Ok(()) | Err(RecvTimeoutError::Disconnected) => {
                        // Close out a trailing partial interval if it is long enough to be
                        // a meaningful rate.
                        if sampler.last_wall.elapsed() >= period / 2 {
                            sampler.sample()?;
                        }
                        return Ok(sampler.samples);
                    }
                }
            }
        })?;
    Ok(Profiler {
        interval: period,
        origin,
        stop_tx: Some(tx),
        thread: Some(thread),
    })
}

impl Profiler {
    pub fn interval(&self) -> f64 {
        self.interval.as_secs_f64()
    }

    /// Halts sampling and summarizes. A second call fails.
    pub fn stop(&mut self) -> Result<ResourceReport, ProfilerError> {
        let (tx, thread) = match (self.stop_tx.take(), self.thread.take()) {
            (Some(tx), Some(thread)) => (tx, thread),
            _ => return Err(ProfilerError::AlreadyStopped),
        };
        let _ = tx.send(());
        let joined = thread.join();
        let wall = self.origin.elapsed().as_secs_f64();
        ACTIVE.store(false, Ordering::Release);
        let samples = joined.map_err(|_| ProfilerError::SamplerPanicked)??;
        Ok(ResourceReport::from_samples(samples, wall, self.interval()))
    }
}

impl Drop for Profiler {
    fn drop(&mut self) {
        if let (Some(tx), Some(thread)) = (self.stop_tx.take(), self.thread.take()) {
            let _ = tx.send(());
            let _ = thread.join();
            ACTIVE.store(false, Ordering::Release);
        }
    }
}

/// Runs `f` under a profiler and returns its output with the report.
pub fn profile<T>(
    interval: f64,
    f: impl FnOnce() -> T,
) -> Result<(T, ResourceReport), ProfilerError> {
    let mut p = start(interval)?;
    let out = f();
    let report = p.stop()?;
    Ok((out, report))
}
