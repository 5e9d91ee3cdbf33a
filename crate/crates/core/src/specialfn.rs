//! Laguerre polynomials, thermal Fock weights and coherent-state overlaps.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest Laguerre order accepted by [`laguerre`].
pub const MAX_LAGUERRE_ORDER: u32 = 10_000;

/// `L_n(x)` by the upward three-term recurrence
/// `(k+1) L_{k+1} = (2k+1−x) L_k − k L_{k−1}`.
pub fn laguerre(n: u32, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Laguerre argument must be finite, got {x}"
        )));
    }
    if n > MAX_LAGUERRE_ORDER {
        return Err(Error::InvalidParameter(format!(
            "Laguerre order {n} exceeds {MAX_LAGUERRE_ORDER}"
        )));
    }
    Ok(laguerre_unchecked(n, x))
}

pub(crate) fn laguerre_unchecked(n: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Fock populations of a thermal state up to `ncut`, without renormalization.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalWeights {
    /// `p_n = nbar^n / (1 + nbar)^(n+1)` for `n = 0..=ncut`.
    pub weights: Vec<f64>,
    /// Probability carried by `n > ncut`, equal to `(nbar / (1 + nbar))^(ncut+1)`.
    pub tail_mass: f64,
}

pub fn thermal_weights(nbar: f64, ncut: usize) -> Result<ThermalWeights> {
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "thermal nbar must be finite and >= 0, got {nbar}"
        )));
    }
    let ratio = nbar / (1.0 + nbar);
    let mut weights = Vec::with_capacity(ncut + 1);
    let mut p = 1.0 / (1.0 + nbar);
    for _ in 0..=ncut {
        weights.push(p);
        p *= ratio;
    }
    let tail_mass = ratio.powi((ncut + 1) as i32);
    Ok(ThermalWeights { weights, tail_mass })
}

/// Smallest cutoff whose thermal tail mass is at most `tail_tol`.
pub fn thermal_cutoff(nbar: f64, tail_tol: f64) -> usize {
    if nbar <= 0.0 {
        return 0;
    }
    let ratio = nbar / (1.0 + nbar);
    // tail(ncut) = ratio^(ncut+1)
    let k = (tail_tol.ln() / ratio.ln()).ceil().max(1.0) as usize;
    let mut ncut = k.saturating_sub(1);
    while ratio.powi((ncut + 1) as i32) > tail_tol {
        ncut += 1;
    }
    ncut
}

/// `⟨a|b⟩ = exp(−|a|²/2 − |b|²/2 + a* b)` for coherent states.
pub fn coherent_overlap(a: Complex64, b: Complex64) -> Complex64 {
    (-0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + a.conj() * b).exp()
}

/// Fock amplitudes `e^{−|α|²/2} αⁿ/√n!` for `n = 0..=ncut`, together with the
/// probability left above the cutoff.
pub fn coherent_fock_amplitudes(alpha: Complex64, ncut: usize) -> (Vec<Complex64>, f64) {
    let mut amps = Vec::with_capacity(ncut + 1);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..=ncut {
        if n > 0 {
            c = c * alpha / (n as f64).sqrt();
        }
        amps.push(c);
    }
    // Sum the tail directly; 1 − Σ|c_n|² loses everything below 1e-16.
    let mut tail = 0.0;
    let mut n = ncut + 1;
    let mut term = c.norm_sqr();
    loop {
        term *= alpha.norm_sqr() / n as f64;
        tail += term;
        if n as f64 > alpha.norm_sqr() && term <= tail * 1e-17 {
            break;
        }
        if term == 0.0 {
            break;
        }
        n += 1;
    }
    (amps, tail)
}
