//! Least-squares fits: logarithmic growth and finite-size scaling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub rmse: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = slope·x + intercept`.
pub fn linear_regression(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(Error::InsufficientData("regression needs at least 2 points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("regression abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(LinearFit { slope, intercept, rmse: (sse / n).sqrt(), r_squared })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Abscissa {
    SubsystemSize,
    Chord,
    Time,
    Parameter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub mean: f64,
    pub std_error: f64,
    pub count: usize,
}

/// Averaged entropy against one abscissa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyCurve {
    pub abscissa: Abscissa,
    points: Vec<CurvePoint>,
}

impl EntropyCurve {
    pub fn new(abscissa: Abscissa, points: Vec<CurvePoint>) -> Result<Self> {
        if points.windows(2).any(|w| !(w[0].x < w[1].x)) {
            return Err(Error::Invariant("curve abscissae must be strictly increasing".into()));
        }
        if points.iter().any(|p| p.count == 0) {
            return Err(Error::Invariant("every curve point needs at least one sample".into()));
        }
        Ok(Self { abscissa, points })
    }

    /// Averages raw samples per abscissa; the error is the standard error
    /// of the mean.
    pub fn from_samples(abscissa: Abscissa, samples: &[(f64, Vec<f64>)]) -> Result<Self> {
        let mut points: Vec<CurvePoint> = samples
            .iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(x, v)| {
                let n = v.len() as f64;
                let mean = v.iter().sum::<f64>() / n;
                let std_error = if v.len() > 1 {
                    (v.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() / n.sqrt()
                } else {
                    0.0
                };
                CurvePoint { x: *x, mean, std_error, count: v.len() }
            })
            .collect();
        points.sort_by(|a, b| a.x.total_cmp(&b.x));
        Self::new(abscissa, points)
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogFitResult {
    pub prefactor: f64,
    pub intercept: f64,
    pub rmse: f64,
    pub r_squared: f64,
}

/// Fits `S = α ln(x) + b` after dropping the first `exclude` points.
pub fn log_fit(curve: &EntropyCurve, exclude: usize) -> Result<LogFitResult> {
    let pts = curve.points().get(exclude..).unwrap_or(&[]);
    if pts.len() < 5 {
        return Err(Error::InsufficientData(format!("log fit needs 5 points after exclusion, got {}", pts.len())));
    }
    if pts.iter().any(|p| p.x <= 0.0) {
        return Err(Error::OutOfRange("log fit needs positive abscissae".into()));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.x.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.mean).collect();
    let f = linear_regression(&xs, &ys)?;
    Ok(LogFitResult { prefactor: f.slope, intercept: f.intercept, rmse: f.rmse, r_squared: f.r_squared })
}

/// Dynamical exponent `z = α_s / α_t`.
pub fn dynamic_exponent(spatial: &LogFitResult, temporal: &LogFitResult) -> f64 {
    spatial.prefactor / temporal.prefactor
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KpzFitResult {
    pub gamma: f64,
    pub a1: f64,
    pub a2: f64,
    /// RMSE of the density fit.
    pub residual: f64,
    pub r_squared: f64,
}

fn kpz_at(points: &[(f64, f64)], gamma: f64) -> Result<KpzFitResult> {
    let xs: Vec<f64> = points.iter().map(|(l, _)| l.powf(gamma - 1.0)).collect();
    let ys: Vec<f64> = points.iter().map(|(l, s)| s / (l / 2.0)).collect();
    let f = linear_regression(&xs, &ys)?;
    Ok(KpzFitResult { gamma, a1: f.intercept / 2.0, a2: f.slope / 2.0, residual: f.rmse, r_squared: f.r_squared })
}

/// Fits `S_half = a1·L + a2·L^γ` through the density `S_half/(L/2)`, which is
/// linear in `L^{γ-1}`. With `free_gamma` the exponent minimizing the
/// residual over `(0, 1)` is used; otherwise `γ = 1/3`.
pub fn kpz_fit(points: &[(f64, f64)], free_gamma: bool) -> Result<KpzFitResult> {
    if points.len() < 4 {
        return Err(Error::InsufficientData(format!("KPZ fit needs at least 4 sizes, got {}", points.len())));
    }
    if !free_gamma {
        return kpz_at(points, 1.0 / 3.0);
    }
    let cost = |g: f64| kpz_at(points, g).map(|r| r.residual).unwrap_or(f64::INFINITY);
    let (mut lo, mut hi) = (1e-3, 1.0 - 1e-3);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - phi * (hi - lo);
    let mut b = lo + phi * (hi - lo);
    let (mut fa, mut fb) = (cost(a), cost(b));
    for _ in 0..200 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = cost(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = cost(b);
        }
    }
    kpz_at(points, (lo + hi) / 2.0)
}
