use super::TruncationSpec;
use crate::error::{Error, Result};

/// A value accepted after a cutoff-doubling test.
#[derive(Debug, Clone)]
pub struct Converged<T> {
    pub value: T,
    /// Truncation that produced `value` (the larger of the last compared pair).
    pub trunc: TruncationSpec,
    /// Largest change between the last two cutoffs.
    pub max_change: f64,
    pub doublings: usize,
}

/// Maximum pointwise difference, used as the change between cutoffs.
pub trait Distance {
    fn distance(&self, other: &Self) -> f64;
}

impl Distance for f64 {
    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
}

impl Distance for Vec<f64> {
    fn distance(&self, other: &Self) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Evaluates at `start`, then doubles ncut until two successive results agree
/// within `tol`.
pub fn converge<T, F>(
    start: TruncationSpec,
    tol: f64,
    max_doublings: usize,
    mut eval: F,
) -> Result<Converged<T>>
where
    T: Distance,
    F: FnMut(&TruncationSpec) -> Result<T>,
{
    let mut trunc = start;
    let mut prev = eval(&trunc)?;
    let mut last_change = f64::INFINITY;
    for d in 1..=max_doublings {
        let next_trunc = trunc.doubled();
        let next = eval(&next_trunc)?;
        last_change = prev.distance(&next);
        trunc = next_trunc;
        prev = next;
        if last_change <= tol {
            return Ok(Converged {
                value: prev,
                trunc,
                max_change: last_change,
                doublings: d,
            });
        }
    }
    Err(Error::Truncation {
        ncut: trunc.ncut,
        reason: format!("no agreement within {tol:e} after {max_doublings} doublings (last change {last_change:e})"),
    })
}
