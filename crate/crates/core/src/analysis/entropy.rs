//! Entropy-derived diagnostics on single states and sample series.

use crate::error::{Error, Result};
use crate::tableau::StabilizerTableau;

/// `I_AB = S_A + S_B - S_{A∪B}` for disjoint qubit sets (0-based).
pub fn mutual_information(state: &StabilizerTableau, a: &[usize], b: &[usize]) -> Result<usize> {
    if a.iter().any(|q| b.contains(q)) {
        return Err(Error::Overlap);
    }
    let union: Vec<usize> = a.iter().chain(b).copied().collect();
    let s_a = state.subset_entropy(a)?;
    let s_b = state.subset_entropy(b)?;
    let s_ab = state.subset_entropy(&union)?;
    Ok(s_a + s_b - s_ab)
}

/// The leftmost and rightmost `L/8` qubits (0-based).
pub fn edge_regions(l: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    if l == 0 || l % 8 != 0 {
        return Err(Error::Indivisible(l));
    }
    let k = l / 8;
    Ok(((0..k).collect(), (l - k..l).collect()))
}

/// Population standard deviation `sqrt(<S^2> - <S>^2)`.
pub fn fluctuation(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData(format!("fluctuation needs at least 2 samples, got {}", samples.len())));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
    Ok(var.sqrt())
}

/// Chord length `(L/π) sin(π L_A / L)`.
pub fn chord(l_a: f64, l: f64) -> Result<f64> {
    if !(l_a > 0.0 && l_a < l) {
        return Err(Error::OutOfRange(format!("chord needs 0 < L_A < L, got L_A = {l_a}, L = {l}")));
    }
    Ok(l / std::f64::consts::PI * (std::f64::consts::PI * l_a / l).sin())
}
