//! Shared inputs for the criterion benches.

use std::f64::consts::PI;

/// `n` evenly spaced phases on `[0, 2π]`.
pub fn period_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 2.0 * PI * i as f64 / (n - 1).max(1) as f64)
        .collect()
}
