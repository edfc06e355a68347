//! Growth of the boundary-anchored staircase.

use serde::{Deserialize, Serialize};

use super::fits::{linear_regression, LinearFit};
use crate::error::{Error, Result};
use crate::substrate::ProtectedLength;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftDiffusionFit {
    /// Log-log slope of `<ℓ(t)>`.
    pub growth: LinearFit,
    /// Log-log slope of the realization spread of `ℓ(t)`.
    pub fluctuation: LinearFit,
    pub points: usize,
}

impl DriftDiffusionFit {
    pub fn growth_exponent(&self) -> f64 {
        self.growth.slope
    }

    pub fn fluctuation_exponent(&self) -> f64 {
        self.fluctuation.slope
    }
}

/// Mean and population spread of `ℓ = (ℓ_L + ℓ_R)/2` per sweep.
pub fn protected_statistics(series: &[Vec<(u64, ProtectedLength)>]) -> Vec<(u64, f64, f64, usize)> {
    let mut by_t: std::collections::BTreeMap<u64, Vec<f64>> = Default::default();
    for run in series {
        for &(t, p) in run {
            by_t.entry(t).or_default().push(p.mean());
        }
    }
    by_t.into_iter()
        .map(|(t, v)| {
            let n = v.len() as f64;
            let m = v.iter().sum::<f64>() / n;
            let sd = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt();
            (t, m, sd, v.len())
        })
        .collect()
}

/// Log-log slopes of `<ℓ(t)>` and `std ℓ(t)` over sweeps `window.0..=window.1`.
pub fn drift_diffusion_fit(series: &[Vec<(u64, ProtectedLength)>], window: (u64, u64)) -> Result<DriftDiffusionFit> {
    if series.len() < 20 {
        return Err(Error::InsufficientData(format!("drift-diffusion fit needs 20 realizations, got {}", series.len())));
    }
    let stats = protected_statistics(series);
    let inside: Vec<_> = stats.iter().filter(|s| s.0 >= window.0.max(1) && s.0 <= window.1).collect();
    let covered = stats.first().is_some_and(|s| s.0 <= window.0.max(1)) && stats.last().is_some_and(|s| s.0 >= window.1);
    if !covered || inside.len() < 3 {
        return Err(Error::OutOfRange(format!("window {:?} is not covered by the protected-length series", window)));
    }
    let pick = |f: fn(&(u64, f64, f64, usize)) -> f64| -> (Vec<f64>, Vec<f64>) {
        inside.iter().filter(|s| f(s) > 0.0).map(|s| ((s.0 as f64).ln(), f(s).ln())).unzip()
    };
    let (gx, gy) = pick(|s| s.1);
    let (fx, fy) = pick(|s| s.2);
    Ok(DriftDiffusionFit { growth: linear_regression(&gx, &gy)?, fluctuation: linear_regression(&fx, &fy)?, points: inside.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_square_root_growth() {
        let series: Vec<Vec<(u64, ProtectedLength)>> = (0..20)
            .map(|r| {
                (1..=400u64)
                    .map(|t| {
                        let base = (t as f64).sqrt() * 10.0;
                        let l = if r % 2 == 0 { base * 1.5 } else { base * 0.5 };
                        (t, ProtectedLength { left: l as usize, right: l as usize })
                    })
                    .collect()
            })
            .collect();
        let f = drift_diffusion_fit(&series, (100, 400)).unwrap();
        assert!((f.growth_exponent() - 0.5).abs() < 0.01, "{f:?}");
        assert!((f.fluctuation_exponent() - 0.5).abs() < 0.01);
        assert!(drift_diffusion_fit(&series, (100, 500)).is_err());
        assert!(drift_diffusion_fit(&series[..5], (100, 400)).is_err());
    }
}
