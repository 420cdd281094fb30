//! Shared parameter sets for the criterion benchmarks.

use cyclotrace::poincare::SumOptions;
use cyclotrace::ExtReal;

/// Working precision of the kernel benchmarks.
pub const PREC: u32 = 256;

/// (d, D) pairs of the trace and Salié benchmarks.
pub const PAIRS: [(i64, i64); 3] = [(-3, 1), (-4, 5), (-7, 8)];

/// c-sum options at a cutoff small enough for a benchmark loop.
pub fn sums(c_max: u64) -> SumOptions {
    SumOptions::new(c_max)
}

pub fn real(x: f64) -> ExtReal {
    ExtReal::from_f64(x, PREC)
}
