//! Finite-size and finite-time data collapse around a critical point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// One curve `S(u)` at fixed size or time; `scale` multiplies the scaling
/// variable (`L_A` for spatial families, `t` for temporal ones).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseCurve {
    pub scale: f64,
    /// `(u, S)` sorted by `u`.
    pub points: Vec<(f64, f64)>,
}

impl CollapseCurve {
    pub fn new(scale: f64, mut points: Vec<(f64, f64)>) -> Result<Self> {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points.len() < 2 || points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InsufficientData("collapse curves need at least 2 distinct u samples".into()));
        }
        Ok(Self { scale, points })
    }

    fn u_range(&self) -> (f64, f64) {
        (self.points[0].0, self.points[self.points.len() - 1].0)
    }
}

/// Curves sharing one scaling variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFamily {
    pub curves: Vec<CollapseCurve>,
}

/// Linear interpolation on sorted abscissae; `None` outside the support.
fn interpolate(points: &[(f64, f64)], x: f64) -> Option<f64> {
    let (first, last) = (points.first()?, points.last()?);
    if x < first.0 || x > last.0 {
        return None;
    }
    let i = points.partition_point(|p| p.0 < x);
    if points[i].0 == x {
        return Some(points[i].1);
    }
    let (a, b) = (points[i - 1], points[i]);
    Some(a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0))
}

fn family_cost(family: &CurveFamily, u_c: f64, nu: f64) -> Result<f64> {
    let mut scaled: Vec<Vec<(f64, f64)>> = Vec::with_capacity(family.curves.len());
    for curve in &family.curves {
        let s_c = interpolate(&curve.points, u_c).ok_or_else(|| {
            let (lo, hi) = curve.u_range();
            Error::OutOfRange(format!("u_c = {u_c} outside sampled range [{lo}, {hi}]"))
        })?;
        let mut pts: Vec<(f64, f64)> = curve
            .points
            .iter()
            .map(|&(u, s)| {
                let d = u - u_c;
                (d.signum() * d.abs().powf(nu) * curve.scale, (s - s_c).abs())
            })
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        scaled.push(pts);
    }
    let mut r = 0.0;
    for pts in &scaled {
        for &(x, y) in pts {
            let (sum, n) = scaled.iter().filter_map(|other| interpolate(other, x)).fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
            let mean = sum / n as f64;
            r += (y - mean).powi(2);
        }
    }
    Ok(r)
}

/// `R(u_c, ν) = Σ_families Σ_curves Σ_points (y - ȳ(x))^2`.
pub fn collapse_cost(families: &[CurveFamily], u_c: f64, nu: f64) -> Result<f64> {
    if families.iter().all(|f| f.curves.is_empty()) {
        return Err(Error::InsufficientData("no curves to collapse".into()));
    }
    families.iter().map(|f| family_cost(f, u_c, nu)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadOptions {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { reflection: 1.0, expansion: 2.0, contraction: 0.5, shrink: 0.5, tolerance: 1e-10, max_iterations: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: [f64; 2],
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Derivative-free simplex minimization over two parameters.
pub fn nelder_mead<F: FnMut(&[f64; 2]) -> f64>(mut f: F, simplex: [[f64; 2]; 3], opts: &NelderMeadOptions) -> Minimum {
    const D: usize = 2;
    let mut pts: Vec<([f64; D], f64)> = simplex.iter().map(|p| (*p, f(p))).collect();
    let combine = |a: &[f64; D], b: &[f64; D], t: f64| -> [f64; D] {
        let mut out = [0.0; D];
        for i in 0..D {
            out[i] = a[i] + t * (b[i] - a[i]);
        }
        out
    };
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = pts[D].1 - pts[0].1;
        if pts[0].1.is_finite() && pts[D].1.is_finite() && spread.abs() < opts.tolerance {
            converged = true;
            break;
        }
        iterations += 1;
        let mut centroid = [0.0; D];
        for p in &pts[..D] {
            for i in 0..D {
                centroid[i] += p.0[i] / D as f64;
            }
        }
        let worst = pts[D];
        let reflected = combine(&centroid, &worst.0, -opts.reflection);
        let fr = f(&reflected);
        if fr < pts[0].1 {
            let expanded = combine(&centroid, &worst.0, -opts.expansion);
            let fe = f(&expanded);
            pts[D] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < pts[D - 1].1 {
            pts[D] = (reflected, fr);
            continue;
        }
        let (target, ft) = if fr < worst.1 { (reflected, fr) } else { (worst.0, worst.1) };
        let contracted = combine(&centroid, &target, opts.contraction);
        let fc = f(&contracted);
        if fc < ft {
            pts[D] = (contracted, fc);
            continue;
        }
        let best = pts[0].0;
        for p in pts.iter_mut().skip(1) {
            p.0 = combine(&best, &p.0, opts.shrink);
            p.1 = f(&p.0);
        }
    }
    pts.sort_by(|a, b| a.1.total_cmp(&b.1));
    Minimum { x: pts[0].0, value: pts[0].1, iterations, converged }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseBounds {
    pub u_c: (f64, f64),
    pub nu: (f64, f64),
}

impl CollapseBounds {
    /// `u_c` strictly inside the range sampled by every curve, `ν ∈ [0.5, 3]`.
    pub fn from_families(families: &[CurveFamily]) -> Result<Self> {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for c in families.iter().flat_map(|f| &f.curves) {
            let (a, b) = c.u_range();
            lo = lo.max(a);
            hi = hi.min(b);
        }
        if !(lo < hi) {
            return Err(Error::InsufficientData("curves share no common u range".into()));
        }
        let pad = 1e-9 * (hi - lo);
        Ok(Self { u_c: (lo + pad, hi - pad), nu: (0.5, 3.0) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestartResult {
    pub u_c: f64,
    pub nu: f64,
    pub cost: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseResult {
    pub u_c: f64,
    pub nu: f64,
    pub cost: f64,
    /// The collapse enforces `ν_⊥ = ν_∥`.
    pub shared_nu: bool,
    pub restarts: Vec<RestartResult>,
    pub u_c_error: f64,
    pub nu_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseOptions {
    pub restarts: usize,
    pub seed: u64,
    pub bounds: Option<CollapseBounds>,
    pub nelder_mead: NelderMeadOptions,
}

impl Default for CollapseOptions {
    fn default() -> Self {
        Self { restarts: 100, seed: 0, bounds: None, nelder_mead: NelderMeadOptions::default() }
    }
}

fn population_std(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt()
}

/// Minimizes [`collapse_cost`] from `restarts` random starting points.
///
/// Points where the cost is undefined (for instance `u_c` outside the data)
/// are treated as infinitely bad. The reported errors are the standard
/// deviations of the converged restart optima.
pub fn collapse_optimize(families: &[CurveFamily], opts: &CollapseOptions) -> Result<CollapseResult> {
    let bounds = match opts.bounds {
        Some(b) => b,
        None => CollapseBounds::from_families(families)?,
    };
    let mut rng = RandomStream::new(opts.seed, 0);
    let cost = |p: &[f64; 2]| -> f64 {
        if !(p[1] > 0.0) {
            return f64::INFINITY;
        }
        collapse_cost(families, p[0], p[1]).unwrap_or(f64::INFINITY)
    };
    let du = 0.05 * (bounds.u_c.1 - bounds.u_c.0);
    let dn = 0.05 * (bounds.nu.1 - bounds.nu.0);
    let mut restarts = Vec::with_capacity(opts.restarts);
    for _ in 0..opts.restarts {
        let u0 = bounds.u_c.0 + rng.uniform() * (bounds.u_c.1 - bounds.u_c.0);
        let n0 = bounds.nu.0 + rng.uniform() * (bounds.nu.1 - bounds.nu.0);
        let su = if u0 + du < bounds.u_c.1 { du } else { -du };
        let sn = if n0 + dn < bounds.nu.1 { dn } else { -dn };
        let m = nelder_mead(cost, [[u0, n0], [u0 + su, n0], [u0, n0 + sn]], &opts.nelder_mead);
        restarts.push(RestartResult { u_c: m.x[0], nu: m.x[1], cost: m.value, converged: m.converged });
    }
    let done: Vec<&RestartResult> = restarts.iter().filter(|r| r.cost.is_finite()).collect();
    let best = done
        .iter()
        .min_by(|a, b| a.cost.total_cmp(&b.cost))
        .copied()
        .copied()
        .ok_or_else(|| Error::Optimization("every collapse restart diverged".into()))?;
    let u_c_error = population_std(&done.iter().map(|r| r.u_c).collect::<Vec<_>>());
    let nu_error = population_std(&done.iter().map(|r| r.nu).collect::<Vec<_>>());
    Ok(CollapseResult { u_c: best.u_c, nu: best.nu, cost: best.cost, shared_nu: true, restarts, u_c_error, nu_error })
}
