//! Exact operation counters and per-kernel wall-clock accumulators.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

#[derive(Debug, Default)]
pub struct OperatorCounters {
    fd_first_order: AtomicU64,
    fft_first_order: AtomicU64,
    fft_other: AtomicU64,
    interp: AtomicU64,
    time_fd: AtomicU64,
    time_fft: AtomicU64,
    time_interp: AtomicU64,
    time_prefilter: AtomicU64,
}

/// Plain copy of the counters at one instant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterSnapshot {
    pub n_fd_first_order: u64,
    pub n_fft_first_order: u64,
    pub n_fft_other: u64,
    pub n_interp: u64,
}

impl CounterSnapshot {
    /// First-order derivative applications regardless of backend.
    pub fn n_first_order(&self) -> u64 {
        self.n_fd_first_order + self.n_fft_first_order
    }

    pub fn since(&self, earlier: &CounterSnapshot) -> CounterSnapshot {
        CounterSnapshot {
            n_fd_first_order: self.n_fd_first_order - earlier.n_fd_first_order,
            n_fft_first_order: self.n_fft_first_order - earlier.n_fft_first_order,
            n_fft_other: self.n_fft_other - earlier.n_fft_other,
            n_interp: self.n_interp - earlier.n_interp,
        }
    }
}

/// Accumulated wall-clock seconds per kernel family.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct KernelTimings {
    pub fd_s: f64,
    pub fft_s: f64,
    pub interp_s: f64,
    pub prefilter_s: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Timer {
    Fd,
    Fft,
    Interp,
    Prefilter,
}

impl OperatorCounters {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add_fd_first_order(&self, n: u64) {
        self.fd_first_order.fetch_add(n, Ordering::Relaxed);
    }

    pub(crate) fn add_fft_first_order(&self, n: u64) {
        self.fft_first_order.fetch_add(n, Ordering::Relaxed);
    }

    pub(crate) fn add_fft_other(&self, n: u64) {
        self.fft_other.fetch_add(n, Ordering::Relaxed);
    }

    pub(crate) fn add_interp(&self, n: u64) {
        self.interp.fetch_add(n, Ordering::Relaxed);
    }

    pub(crate) fn time<R>(&self, timer: Timer, f: impl FnOnce() -> R) -> R {
        let start = Instant::now();
        let out = f();
        let slot = match timer {
            Timer::Fd => &self.time_fd,
            Timer::Fft => &self.time_fft,
            Timer::Interp => &self.time_interp,
            Timer::Prefilter => &self.time_prefilter,
        };
        slot.fetch_add(start.elapsed().as_nanos() as u64, Ordering::Relaxed);
        out
    }

    pub fn snapshot(&self) -> CounterSnapshot {
        CounterSnapshot {
            n_fd_first_order: self.fd_first_order.load(Ordering::Relaxed),
            n_fft_first_order: self.fft_first_order.load(Ordering::Relaxed),
            n_fft_other: self.fft_other.load(Ordering::Relaxed),
            n_interp: self.interp.load(Ordering::Relaxed),
        }
    }

    pub fn timings(&self) -> KernelTimings {
        let s = |a: &AtomicU64| Duration::from_nanos(a.load(Ordering::Relaxed)).as_secs_f64();
        KernelTimings {
            fd_s: s(&self.time_fd),
            fft_s: s(&self.time_fft),
            interp_s: s(&self.time_interp),
            prefilter_s: s(&self.time_prefilter),
        }
    }

    pub fn reset(&self) {
        for a in [
            &self.fd_first_order,
            &self.fft_first_order,
            &self.fft_other,
            &self.interp,
            &self.time_fd,
            &self.time_fft,
            &self.time_interp,
            &self.time_prefilter,
        ] {
            a.store(0, Ordering::Relaxed);
        }
    }
}
