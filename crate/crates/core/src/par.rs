//! Execution policy and order-fixed reductions.
//!
//! Every parallel map in the crate collects results in index order, and
//! every sum goes through [`ordered_sum`], so serial and parallel runs
//! produce bitwise identical numbers regardless of the worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How data-parallel loops are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Serial,
    /// Uses the current rayon pool. Falls back to serial when the
    /// `parallel` feature is disabled.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Serial
        }
    }
}

/// Evaluates `f(0..n)` and returns the results in index order.
pub fn map_indexed<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

/// Compensated (Neumaier) summation in index order.
///
/// The rounding error of every addition is carried in a second accumulator,
/// so the result is within a few ulps of the exact sum of the inputs; terms
/// that cancel exactly leave no residue.
pub fn ordered_sum(values: &[f64]) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for &v in values {
        let t = s + v;
        if s.abs() >= v.abs() {
            c += (s - t) + v;
        } else {
            c += (v - t) + s;
        }
        s = t;
    }
    s + c
}
