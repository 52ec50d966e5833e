//! Thread-local floating-point work counters.
//!
//! Counts are in complex multiply-add units and are bumped once per kernel
//! call with the call's closed-form cost, so the counters add no overhead to
//! inner loops. All solver kernels run on the calling thread, which makes a
//! measurement valid as long as the measured work happens on one thread.

use std::cell::Cell;

thread_local! {
    static GEMM: Cell<u64> = const { Cell::new(0) };
    static TRSV: Cell<u64> = const { Cell::new(0) };
    static OTHER: Cell<u64> = const { Cell::new(0) };
}

/// Snapshot of the per-thread counters, in complex multiply-add units.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlopCounts {
    /// Work performed inside matrix-matrix product kernels.
    pub gemm: u64,
    /// Work performed inside triangular-solve kernels (divisions included).
    pub trsv: u64,
    /// Everything else: norms, growth bookkeeping, rescaling passes.
    pub other: u64,
}

impl FlopCounts {
    pub fn total(&self) -> u64 {
        self.gemm + self.trsv + self.other
    }

    /// Fraction of all counted work that ran inside gemm.
    pub fn level3_fraction(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        self.gemm as f64 / total as f64
    }
}

pub fn reset() {
    GEMM.with(|c| c.set(0));
    TRSV.with(|c| c.set(0));
    OTHER.with(|c| c.set(0));
}

pub fn counts() -> FlopCounts {
    FlopCounts {
        gemm: GEMM.with(Cell::get),
        trsv: TRSV.with(Cell::get),
        other: OTHER.with(Cell::get),
    }
}

/// Runs `f` with freshly zeroed counters and returns its result together
/// with the work it performed on this thread.
pub fn measured<R>(f: impl FnOnce() -> R) -> (R, FlopCounts) {
    reset();
    let out = f();
    (out, counts())
}

pub(crate) fn add_gemm(n: u64) {
    GEMM.with(|c| c.set(c.get() + n));
}

pub(crate) fn add_trsv(n: u64) {
    TRSV.with(|c| c.set(c.get() + n));
}

pub(crate) fn add_other(n: u64) {
    OTHER.with(|c| c.set(c.get() + n));
}
