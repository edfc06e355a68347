//! Measurement-impact distributions and power-law fits.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::fits::linear_regression;
use crate::error::{Error, Result};

/// Counts of impacts `s = 1..=L`; `s = 0` events are kept apart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpactHistogram {
    /// `counts[s - 1]` is the number of events with impact `s`.
    counts: Vec<u64>,
    null: u64,
}

impl ImpactHistogram {
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn null_impacts(&self) -> u64 {
        self.null
    }

    pub fn nonzero_total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `P(s)` for `s = 1..=L`, normalized over nonzero impacts.
    pub fn probabilities(&self) -> Vec<f64> {
        let total = self.nonzero_total();
        if total == 0 {
            return vec![0.0; self.counts.len()];
        }
        self.counts.iter().map(|&c| c as f64 / total as f64).collect()
    }
}

/// Bins integer impacts over `1..=max_s`; larger values are rejected.
pub fn impact_histogram<I: IntoIterator<Item = usize>>(impacts: I, max_s: usize) -> Result<ImpactHistogram> {
    let mut counts = vec![0u64; max_s];
    let mut null = 0u64;
    let mut any = false;
    for s in impacts {
        any = true;
        match s {
            0 => null += 1,
            s if s <= max_s => counts[s - 1] += 1,
            s => return Err(Error::OutOfRange(format!("impact {s} exceeds histogram range 1..={max_s}"))),
        }
    }
    if !any {
        return Err(Error::InsufficientData("no impacts to histogram".into()));
    }
    Ok(ImpactHistogram { counts, null })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub tau: f64,
    /// `ln A`.
    pub intercept: f64,
    pub rmse: f64,
    pub range: (usize, usize),
    pub bins_used: usize,
}

impl PowerLawFit {
    pub fn amplitude(&self) -> f64 {
        self.intercept.exp()
    }
}

/// Least squares of `ln P` against `ln s` over the nonzero bins in `range`.
///
/// `probabilities[s - 1]` is `P(s)`. The RMSE sums squared log residuals over
/// nonzero bins and divides by the number of bins in the range.
pub fn fit_power_law(probabilities: &[f64], range: RangeInclusive<usize>) -> Result<PowerLawFit> {
    let (lo, hi) = (*range.start(), *range.end());
    if lo < 1 || hi < lo {
        return Err(Error::OutOfRange(format!("invalid fit range {lo}..={hi}")));
    }
    let hi_eff = hi.min(probabilities.len());
    let (xs, ys): (Vec<f64>, Vec<f64>) = (lo..=hi_eff)
        .filter(|&s| probabilities[s - 1] > 0.0)
        .map(|s| ((s as f64).ln(), probabilities[s - 1].ln()))
        .unzip();
    if xs.len() < 5 {
        return Err(Error::InsufficientData(format!("power-law fit needs 5 nonzero bins, got {}", xs.len())));
    }
    let f = linear_regression(&xs, &ys)?;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - f.slope * x - f.intercept).powi(2)).sum();
    let bins = (hi - lo + 1) as f64;
    Ok(PowerLawFit { tau: f.slope, intercept: f.intercept, rmse: (sse / bins).sqrt(), range: (lo, hi), bins_used: xs.len() })
}
