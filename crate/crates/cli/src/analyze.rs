//! Fits over archived run directories, written to `fits.csv`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qrpm::analysis::{
    collapse_optimize, drift_diffusion_fit, fit_power_law, impact_histogram, kpz_fit, CollapseCurve, CollapseOptions,
    CurveFamily,
};
use qrpm::ProtectedLength;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::output::{write_atomic, FITS_FILE, FITS_HEADER};

/// One row of `fits.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitRow {
    pub kind: String,
    pub model: String,
    pub l_or_range: String,
    pub u_or_uc: f64,
    pub param1: f64,
    pub param2: f64,
    pub residual: f64,
}

impl FitRow {
    fn line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.kind, self.model, self.l_or_range, self.u_or_uc, self.param1, self.param2, self.residual
        )
    }
}

/// Group key `(model, L, u)` with `u` kept as its bit pattern so it sorts
/// and compares exactly.
type Key = (String, usize, u64);

fn key(model: &str, l: usize, u: f64) -> Key {
    (model.to_string(), l, u.to_bits())
}

fn read_rows<T: DeserializeOwned>(dirs: &[PathBuf], file: &str) -> Result<Vec<T>> {
    let mut rows = Vec::new();
    for dir in dirs {
        let path = dir.join(file);
        let mut reader = csv::Reader::from_path(&path).with_context(|| format!("opening {}", path.display()))?;
        for r in reader.deserialize() {
            rows.push(r.with_context(|| format!("reading {}", path.display()))?);
        }
    }
    Ok(rows)
}

#[derive(Deserialize)]
struct HalfCutRow {
    model: String,
    #[serde(rename = "L")]
    l: usize,
    u: f64,
    #[allow(dead_code)]
    realization: u64,
    #[allow(dead_code)]
    sweep: f64,
    #[serde(rename = "S_half")]
    s_half: f64,
}

/// Mean `S_half` over realizations and samples for every `(model, L, u)`.
fn mean_half_cut(dirs: &[PathBuf]) -> Result<BTreeMap<Key, f64>> {
    let mut acc: BTreeMap<Key, (f64, usize)> = BTreeMap::new();
    for r in read_rows::<HalfCutRow>(dirs, "halfcut.csv")? {
        let e = acc.entry(key(&r.model, r.l, r.u)).or_default();
        e.0 += r.s_half;
        e.1 += 1;
    }
    Ok(acc.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect())
}

fn size_range(sizes: &[usize]) -> String {
    format!("{}-{}", sizes.iter().min().unwrap(), sizes.iter().max().unwrap())
}

/// Finite-size collapse of the mean half-cut entropy, one family per model
/// with curves indexed by `L_A = L/2`.
pub fn collapse(dirs: &[PathBuf], restarts: usize, seed: u64) -> Result<Vec<FitRow>> {
    let means = mean_half_cut(dirs)?;
    let mut by_model: BTreeMap<String, BTreeMap<usize, Vec<(f64, f64)>>> = BTreeMap::new();
    for ((m, l, u), s) in means {
        by_model.entry(m).or_default().entry(l).or_default().push((f64::from_bits(u), s));
    }
    let mut rows = Vec::new();
    for (model, curves) in by_model {
        if curves.len() < 2 {
            bail!("collapse of {model} needs at least two system sizes");
        }
        let sizes: Vec<usize> = curves.keys().copied().collect();
        let family = CurveFamily {
            curves: curves.into_iter().map(|(l, pts)| CollapseCurve::new(l as f64 / 2.0, pts)).collect::<qrpm::Result<_>>()?,
        };
        let res = collapse_optimize(&[family], &CollapseOptions { restarts, seed, ..Default::default() })?;
        eprintln!("{model}: u_c = {} +/- {}, nu = {} +/- {}", res.u_c, res.u_c_error, res.nu, res.nu_error);
        rows.push(FitRow {
            kind: "collapse".into(),
            model,
            l_or_range: size_range(&sizes),
            u_or_uc: res.u_c,
            param1: res.nu,
            param2: res.nu_error,
            residual: res.cost,
        });
    }
    Ok(rows)
}

#[derive(Deserialize)]
struct ImpactRow {
    model: String,
    #[serde(rename = "L")]
    l: usize,
    u: f64,
    s: usize,
}

/// Power-law fit `P(s) ~ s^tau` per `(model, L, u)`; the range defaults to `1..=L`.
pub fn avalanche(dirs: &[PathBuf], range: Option<(usize, usize)>) -> Result<Vec<FitRow>> {
    let mut groups: BTreeMap<Key, Vec<usize>> = BTreeMap::new();
    for r in read_rows::<ImpactRow>(dirs, "impacts.csv")? {
        groups.entry(key(&r.model, r.l, r.u)).or_default().push(r.s);
    }
    let mut rows = Vec::new();
    for ((model, l, u), s) in groups {
        let max_s = s.iter().copied().max().unwrap_or(0).max(2 * (l + 1));
        let hist = impact_histogram(s, max_s)?;
        let (lo, hi) = range.unwrap_or((1, l));
        match fit_power_law(&hist.probabilities(), lo..=hi) {
            Ok(f) => rows.push(FitRow {
                kind: "avalanche".into(),
                model,
                l_or_range: l.to_string(),
                u_or_uc: f64::from_bits(u),
                param1: f.tau,
                param2: f.intercept,
                residual: f.rmse,
            }),
            Err(e) => eprintln!("skipping {model} L={l} u={}: {e}", f64::from_bits(u)),
        }
    }
    Ok(rows)
}

/// `S_half = a1 L + a2 L^gamma` per `(model, u)` across the available sizes.
pub fn kpz(dirs: &[PathBuf], free_gamma: bool) -> Result<Vec<FitRow>> {
    let mut groups: BTreeMap<(String, u64), Vec<(f64, f64)>> = BTreeMap::new();
    for ((m, l, u), s) in mean_half_cut(dirs)? {
        groups.entry((m, u)).or_default().push((l as f64, s));
    }
    let mut rows = Vec::new();
    for ((model, u), pts) in groups {
        let sizes: Vec<usize> = pts.iter().map(|p| p.0 as usize).collect();
        let f = match kpz_fit(&pts, free_gamma) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("skipping {model} u={}: {e}", f64::from_bits(u));
                continue;
            }
        };
        let range = size_range(&sizes);
        let u = f64::from_bits(u);
        rows.push(FitRow { kind: "kpz".into(), model: model.clone(), l_or_range: range.clone(), u_or_uc: u, param1: f.a1, param2: f.a2, residual: f.residual });
        if free_gamma {
            rows.push(FitRow { kind: "kpz_gamma".into(), model, l_or_range: range, u_or_uc: u, param1: f.gamma, param2: f.r_squared, residual: f.residual });
        }
    }
    Ok(rows)
}

#[derive(Deserialize)]
struct MutualInfoRow {
    model: String,
    #[serde(rename = "L")]
    l: usize,
    u: f64,
    #[serde(rename = "I_AB")]
    i_ab: f64,
}

/// Location, height and full width at half maximum of the mutual
/// information peak for every `(model, L)`.
pub fn mutualinfo(dirs: &[PathBuf]) -> Result<Vec<FitRow>> {
    let mut acc: BTreeMap<Key, Vec<f64>> = BTreeMap::new();
    for r in read_rows::<MutualInfoRow>(dirs, "mutualinfo.csv")? {
        acc.entry(key(&r.model, r.l, r.u)).or_default().push(r.i_ab);
    }
    let mut curves: BTreeMap<(String, usize), Vec<(f64, f64, f64)>> = BTreeMap::new();
    for ((m, l, u), v) in acc {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        curves.entry((m, l)).or_default().push((f64::from_bits(u), mean, (var / n).sqrt()));
    }
    let mut rows = Vec::new();
    for ((model, l), c) in curves {
        let (peak, &(u, top, err)) = c.iter().enumerate().max_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).unwrap();
        rows.push(FitRow { kind: "mutualinfo".into(), model, l_or_range: l.to_string(), u_or_uc: u, param1: top, param2: half_max_width(&c, peak), residual: err });
    }
    Ok(rows)
}

fn half_max_width(c: &[(f64, f64, f64)], peak: usize) -> f64 {
    let half = c[peak].1 / 2.0;
    let cross = |i: usize, j: usize| c[i].0 + (c[j].0 - c[i].0) * (half - c[i].1) / (c[j].1 - c[i].1);
    let right = (peak + 1..c.len()).find(|&i| c[i].1 < half).map_or(c[c.len() - 1].0, |i| cross(i, i - 1));
    let left = (0..peak).rev().find(|&i| c[i].1 < half).map_or(c[0].0, |i| cross(i, i + 1));
    right - left
}

#[derive(Deserialize)]
struct FrozenRow {
    model: String,
    #[serde(rename = "L")]
    l: usize,
    u: f64,
    realization: u64,
    sweep: u64,
    ell_left: usize,
    ell_right: usize,
}

/// Growth and spread exponents of the protected length per `(model, L, u)`.
pub fn frozen(dirs: &[PathBuf], window: Option<(u64, u64)>) -> Result<Vec<FitRow>> {
    let mut groups: BTreeMap<Key, BTreeMap<u64, Vec<(u64, ProtectedLength)>>> = BTreeMap::new();
    for r in read_rows::<FrozenRow>(dirs, "frozen.csv")? {
        groups
            .entry(key(&r.model, r.l, r.u))
            .or_default()
            .entry(r.realization)
            .or_default()
            .push((r.sweep, ProtectedLength { left: r.ell_left, right: r.ell_right }));
    }
    let mut rows = Vec::new();
    for ((model, l, u), reals) in groups {
        let series: Vec<_> = reals.into_values().collect();
        let last = series.iter().flat_map(|s| s.last()).map(|p| p.0).max().unwrap_or(0);
        let w = window.unwrap_or((1, last));
        match drift_diffusion_fit(&series, w) {
            Ok(f) => rows.push(FitRow {
                kind: "frozen".into(),
                model,
                l_or_range: l.to_string(),
                u_or_uc: f64::from_bits(u),
                param1: f.growth_exponent(),
                param2: f.fluctuation_exponent(),
                residual: f.growth.rmse,
            }),
            Err(e) => eprintln!("skipping {model} L={l} u={}: {e}", f64::from_bits(u)),
        }
    }
    Ok(rows)
}

/// Merges `rows` into `out/fits.csv`, replacing
/// earlier rows of the same kinds.
pub fn write_fits(out: &Path, rows: &[FitRow]) -> Result<()> {
    fs::create_dir_all(out)?;
    let path = out.join(FITS_FILE);
    let kinds: Vec<&str> = rows.iter().map(|r| r.kind.as_str()).collect();
    let mut body = format!("{FITS_HEADER}\n");
    if path.exists() {
        let old = fs::read_to_string(&path)?;
        let mut lines = old.lines();
        if lines.next() != Some(FITS_HEADER) {
            bail!("{} has an unexpected header", path.display());
        }
        for line in lines.filter(|l| !kinds.contains(&l.split(',').next().unwrap_or(""))) {
            writeln!(body, "{line}")?;
        }
    }
    for r in rows {
        writeln!(body, "{}", r.line())?;
        println!("{}", r.line());
    }
    write_atomic(&path, body.as_bytes())
}
