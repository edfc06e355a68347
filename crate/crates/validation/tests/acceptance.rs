//! End-to-end acceptance checks at desk scale.
//!
//! Runs as a plain binary so every criterion prints one PASS/FAIL line.
//! Pass criterion numbers as arguments to run a subset, e.g.
//! `cargo test -p qrpm-validation --test acceptance -- 3 9`.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use qrpm::analysis::{
    collapse_optimize, drift_diffusion_fit, fit_power_law, fluctuation, impact_histogram, kpz_fit, linear_regression,
    log_fit, Abscissa, CollapseCurve, CollapseOptions, CurveFamily, EntropyCurve,
};
use qrpm::clifford::is_symplectic;
use qrpm::engine::{enumerate_models, run, InitialState, RuleSet, Simulation, SimulationConfig, TrajectoryRecord};
use qrpm::{random_clifford, BlockConvention, RandomStream};
use statrs::distribution::{ChiSquared, ContinuousCDF};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn model(name: &str) -> RuleSet {
    enumerate_models().resolve(name).unwrap()
}

/// Grid `start, start + step, ..., end` without accumulated rounding.
fn grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step).round() as usize;
    (0..=n).map(|i| ((start + step * i as f64) * 1e6).round() / 1e6).collect()
}

fn ensemble(template: &SimulationConfig, realizations: u64) -> Vec<TrajectoryRecord> {
    (0..realizations)
        .map(|r| {
            let mut c = template.clone();
            c.stream_id = r;
            run(c).unwrap()
        })
        .collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Mean half-cut density over realizations and sampled sweeps.
fn density(records: &[TrajectoryRecord], l: usize) -> f64 {
    let all: Vec<f64> = records.iter().flat_map(|r| r.half_cut.iter().map(|&(_, s)| s as f64 / (l as f64 / 2.0))).collect();
    mean(&all)
}

/// First upward crossing of `level` by linear interpolation.
fn crossing(us: &[f64], ys: &[f64], level: f64) -> Option<f64> {
    (1..us.len()).find(|&i| ys[i - 1] < level && ys[i] >= level).map(|i| {
        let (a, b) = (ys[i - 1], ys[i]);
        us[i - 1] + (us[i] - us[i - 1]) * (level - a) / (b - a)
    })
}

// ---------------------------------------------------------------------------

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let mut rng = RandomStream::new(1001, 0);
    let circuits = 10_000;
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        for i in 0..circuits {
            common::circuit::check_random_circuit(1 + i % 5, 10, &mut rng);
        }
    }));
    let elapsed = start.elapsed();
    verdict(
        outcome.is_ok() && elapsed < Duration::from_secs(120),
        format!("{circuits} circuits (n = 1..5, depth 10), exact subset entropies: {}, {elapsed:.1?}", if outcome.is_ok() { "all equal" } else { "mismatch" }),
    )
}

fn sampler_uniformity() -> Verdict {
    let start = Instant::now();
    let mut rng = RandomStream::new(1002, 0);
    let draws = 100_000u64;
    let mut counts: BTreeMap<[bool; 6], u64> = BTreeMap::new();
    for _ in 0..draws {
        let op = random_clifford(1, &mut rng).unwrap();
        let (m, p) = (op.symplectic_matrix(), op.phase_bits());
        *counts.entry([m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1), p[0], p[1]]).or_default() += 1;
    }
    let expected = draws as f64 / 24.0;
    let stat: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new(23.0).unwrap().cdf(stat);
    let symplectic = (0..1000).all(|_| is_symplectic(random_clifford(4, &mut rng).unwrap().symplectic_matrix()));
    let elapsed = start.elapsed();
    verdict(
        counts.len() == 24 && p > 1e-3 && symplectic && elapsed < Duration::from_secs(60),
        format!("{} of 24 elements, chi-square p = {p:.3}, n=4 symplectic: {symplectic}, {elapsed:.1?}", counts.len()),
    )
}

fn degenerate_limits() -> Verdict {
    let start = Instant::now();
    // u = 0: inspect the full profile after every microstep.
    let mut flat = true;
    for name in ["model1", "model2", "model3", "model4"] {
        let mut sim = Simulation::new(SimulationConfig::new(64, model(name), 0.0, 0, 100, 1003)).unwrap();
        while !sim.is_finished() {
            sim.advance(1).unwrap();
            flat &= sim.state().prefix_profile().iter().all(|&h| h == 0);
        }
    }
    let (l, realizations, sweeps) = (64usize, 16u64, 100u64);
    let mut c = SimulationConfig::new(l, model("model4"), 0.1, 0, sweeps, 1004);
    c.initial_state = InitialState::Scrambled;
    c.record_profiles = false;
    let mut sums = vec![0.0; sweeps as usize + 1];
    for rec in ensemble(&c, realizations) {
        for (t, s) in rec.half_cut {
            sums[t as usize] += s as f64 / (l as f64 / 2.0) / realizations as f64;
        }
    }
    let lowest = sums.iter().copied().fold(f64::INFINITY, f64::min);
    let elapsed = start.elapsed();
    verdict(
        flat && lowest > 0.9 && elapsed < Duration::from_secs(300),
        format!("u=0 profile identically zero: {flat}; model 4 scrambled, lowest mean density over {sweeps} sweeps = {lowest:.3}, {elapsed:.1?}"),
    )
}

struct Model1Scan {
    us: Vec<f64>,
    sizes: Vec<usize>,
    density: Vec<Vec<f64>>,
    mutual_info: Vec<Vec<f64>>,
}

fn model1_scan() -> &'static Model1Scan {
    static SCAN: OnceLock<Model1Scan> = OnceLock::new();
    SCAN.get_or_init(|| {
        let us = grid(0.6, 2.0, 0.1);
        let sizes = vec![32, 64, 128];
        let mut density_rows = Vec::new();
        let mut mi_rows = Vec::new();
        for &l in &sizes {
            let mut d = Vec::new();
            let mut m = Vec::new();
            for &u in &us {
                let mut c = SimulationConfig::new(l, model("model1"), u, 200, 200, 1005);
                c.record_profiles = false;
                c.record_mutual_info = true;
                let recs = ensemble(&c, 50);
                d.push(density(&recs, l));
                let mi: Vec<f64> = recs.iter().flat_map(|r| r.mutual_info.iter().map(|&(_, i)| i as f64)).collect();
                m.push(mean(&mi));
            }
            density_rows.push(d);
            mi_rows.push(m);
        }
        Model1Scan { us, sizes, density: density_rows, mutual_info: mi_rows }
    })
}

/// Width of the region where `ys` exceeds half its maximum.
fn half_max_width(us: &[f64], ys: &[f64]) -> f64 {
    let (peak, &top) = ys.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let half = top / 2.0;
    let edge = |range: Box<dyn Iterator<Item = usize>>| -> f64 {
        let mut prev = peak;
        for i in range {
            if ys[i] < half {
                let (a, b) = (ys[i], ys[prev]);
                return us[i] + (us[prev] - us[i]) * (half - a) / (b - a);
            }
            prev = i;
        }
        us[prev]
    };
    edge(Box::new(peak + 1..ys.len())) - edge(Box::new((0..peak).rev()))
}

fn estimated_critical_point() -> (f64, &'static str) {
    let scan = model1_scan();
    let crossings: Vec<Option<f64>> = (1..scan.sizes.len())
        .map(|k| {
            let diff: Vec<f64> = scan.density[k].iter().zip(&scan.density[k - 1]).map(|(b, a)| b - a).collect();
            crossing(&scan.us, &diff, 0.0)
        })
        .collect();
    if crossings.iter().all(Option::is_some) {
        return (mean(&crossings.iter().map(|c| c.unwrap()).collect::<Vec<_>>()), "density crossings");
    }
    let mi = scan.mutual_info.last().unwrap();
    let (i, _) = mi.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    (scan.us[i], "mutual-information peak at the largest L")
}

fn model1_transition() -> Verdict {
    let scan = model1_scan();
    let window = |u: f64| (1.0..=1.4).contains(&u);
    let mut notes = Vec::new();
    let mut crossings_ok = true;
    for k in 1..scan.sizes.len() {
        let diff: Vec<f64> = scan.density[k].iter().zip(&scan.density[k - 1]).map(|(b, a)| b - a).collect();
        let c = crossing(&scan.us, &diff, 0.0);
        crossings_ok &= c.is_some_and(window);
        notes.push(format!("L={}/{} crossing {}", scan.sizes[k - 1], scan.sizes[k], c.map_or("none".into(), |u| format!("{u:.3}"))));
    }
    let mut peaks_ok = true;
    let mut widths = Vec::new();
    for (k, mi) in scan.mutual_info.iter().enumerate() {
        let (i, top) = mi.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        peaks_ok &= window(scan.us[i]);
        let w = half_max_width(&scan.us, mi);
        widths.push(w);
        notes.push(format!("L={} MI peak {:.3} at u={:.1} (width {w:.2})", scan.sizes[k], top, scan.us[i]));
    }
    let sharpening = widths.windows(2).all(|w| w[1] < w[0]);
    for (k, d) in scan.density.iter().enumerate() {
        let row: Vec<String> = d.iter().map(|x| format!("{x:.3}")).collect();
        notes.push(format!("density L={}: [{}]", scan.sizes[k], row.join(" ")));
    }
    verdict(crossings_ok && peaks_ok && sharpening, notes.join("; "))
}

fn kpz_fluctuations() -> Verdict {
    let l = 256;
    let mut c = SimulationConfig::new(l, model("model1"), 1.8, 0, 1000, 1006);
    c.record_profiles = false;
    let recs = ensemble(&c, 100);
    let mut by_t: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for r in &recs {
        for &(t, s) in &r.half_cut {
            by_t.entry(t as u64).or_default().push(s as f64);
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = by_t
        .iter()
        .filter(|(t, _)| (10..=1000).contains(*t))
        .map(|(t, v)| ((*t as f64).ln(), fluctuation(v).unwrap().ln()))
        .unzip();
    let temporal = linear_regression(&xs, &ys).unwrap();

    let mut points = Vec::new();
    for size in [32usize, 64, 128, 256] {
        let mut c = SimulationConfig::new(size, model("model1"), 1.8, 200, 200, 1007);
        c.record_profiles = false;
        let recs = ensemble(&c, 20);
        points.push((size as f64, density(&recs, size) * size as f64 / 2.0));
    }
    let steady = kpz_fit(&points, false).unwrap();
    let dens: Vec<String> = points.iter().map(|(l, s)| format!("{:.4}", s / (l / 2.0))).collect();
    verdict(
        (temporal.slope - 1.0 / 3.0).abs() <= 0.1 && steady.r_squared > 0.98,
        format!(
            "gamma over t in [10, 1000] = {:.3} (R^2 {:.3}); density at L=32..256 [{}] vs L^(-2/3): R^2 = {:.4}",
            temporal.slope,
            temporal.r_squared,
            dens.join(" "),
            steady.r_squared
        ),
    )
}

/// Density-1/2 point of model 2 after equilibrating well past `L^2` sweeps.
fn locate_frozen_transition() -> (f64, Vec<(f64, f64)>) {
    let l = 64;
    let us = grid(0.8, 1.05, 0.05);
    let mut dens = Vec::new();
    for &u in &us {
        let mut c = SimulationConfig::new(l, model("model2"), u, 4000, 4000, 1008);
        c.record_profiles = false;
        dens.push(density(&ensemble(&c, 12), l));
    }
    let u_d = crossing(&us, &dens, 0.5).unwrap_or(f64::NAN);
    (u_d, us.into_iter().zip(dens).collect())
}

fn frozen_transition() -> Verdict {
    let l = 128;
    let mut c = SimulationConfig::new(l, model("model2"), 5.0, 200, 200, 1009);
    c.record_profiles = false;
    let recs = ensemble(&c, 16);
    let rho = density(&recs, l);
    let pooled: Vec<f64> = recs.iter().flat_map(|r| r.half_cut.iter().map(|&(_, s)| s as f64)).collect();
    let spread = fluctuation(&pooled).unwrap();
    let frozen_ok = rho > 1.0 - 4.0 / l as f64 && spread <= 1.0;

    let (u_d, scan) = locate_frozen_transition();
    let growth = if u_d.is_finite() {
        let mut c = SimulationConfig::new(256, model("model2"), u_d, 0, 1000, 1010);
        c.record_profiles = false;
        let series: Vec<_> = ensemble(&c, 200).into_iter().map(|r| r.protected).collect();
        Some(drift_diffusion_fit(&series, (10, 1000)).unwrap())
    } else {
        None
    };
    let exponent = growth.map_or(f64::NAN, |g| g.growth_exponent());
    let scan: Vec<String> = scan.iter().map(|(u, d)| format!("{u:.2}:{d:.3}")).collect();
    verdict(
        frozen_ok && (exponent - 0.5).abs() <= 0.1,
        format!(
            "u=5, L=128: density {rho:.4} (bound {:.4}), dS {spread:.3}; L=64 density scan [{}] gives u_d = {u_d:.3}; \
             <l(t)> exponent over t in [10, 1000] at L=256 = {exponent:.3} (spread exponent {:.3})",
            1.0 - 4.0 / l as f64,
            scan.join(" "),
            growth.map_or(f64::NAN, |g| g.fluctuation_exponent())
        ),
    )
}

struct ConventionScan {
    density: Vec<f64>,
    /// Mean over interior cuts of the pooled spread of `h_i`, at L=64 and L=128.
    profile_spread: [Vec<f64>; 2],
}

fn profile_spread(records: &[TrajectoryRecord], l: usize) -> f64 {
    let mut per_cut: Vec<Vec<f64>> = vec![Vec::new(); l + 1];
    for r in records {
        for (_, p) in &r.profiles {
            for (i, h) in p.heights().iter().enumerate() {
                per_cut[i].push(*h as f64);
            }
        }
    }
    mean(&per_cut[1..l].iter().map(|v| fluctuation(v).unwrap()).collect::<Vec<_>>())
}

fn convention_scan(convention: BlockConvention, us: &[f64]) -> ConventionScan {
    let mut density_128 = Vec::new();
    let mut spread: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (k, l) in [64usize, 128].into_iter().enumerate() {
        for &u in us {
            let mut c = SimulationConfig::new(l, model("model2"), u, 400, 200, 1011);
            c.convention = convention;
            let recs = ensemble(&c, 16);
            spread[k].push(profile_spread(&recs, l));
            if l == 128 {
                density_128.push(density(&recs, l));
            }
        }
    }
    ConventionScan { density: density_128, profile_spread: spread }
}

fn convention_disambiguation() -> Verdict {
    let us = grid(0.6, 2.0, 0.1);
    let mut notes = Vec::new();
    let mut direct = Vec::new();
    for conv in [BlockConvention::LP, BlockConvention::PL] {
        let scan = convention_scan(conv, &us);
        let u_d = crossing(&us, &scan.density, 0.5).unwrap_or(f64::NAN);
        let pick = |lo: f64, hi: f64| -> Vec<usize> { (0..us.len()).filter(|&i| us[i] >= lo - 1e-9 && us[i] <= hi + 1e-9).collect() };
        // Growth exponent of the profile spread between L=64 and L=128:
        // 0 in an area law, 1/3 for KPZ roughening.
        let below = pick(u_d - 0.35, u_d - 0.15);
        let chi = mean(&below.iter().map(|&i| (scan.profile_spread[1][i] / scan.profile_spread[0][i]).log2()).collect::<Vec<_>>());
        let intermediate = chi > 1.0 / 6.0;
        let above = pick(u_d + 0.15, u_d + 0.35);
        let vanishing = !above.is_empty() && above.iter().all(|&i| scan.profile_spread[1][i] < scan.profile_spread[0][i]);
        let is_direct = !below.is_empty() && !intermediate && vanishing;
        direct.push((conv, is_direct));
        let dens: Vec<String> = scan.density.iter().map(|d| format!("{d:.2}")).collect();
        let above_s: Vec<String> =
            above.iter().map(|&i| format!("{:.1}:{:.2}->{:.2}", us[i], scan.profile_spread[0][i], scan.profile_spread[1][i])).collect();
        notes.push(format!(
            "{}: u_d={u_d:.3}, spread exponent below jump {chi:.3}, spread above jump (L=64->128) [{}], direct={is_direct}, density L=128 [{}]",
            conv.tag(),
            above_s.join(" "),
            dens.join(" ")
        ));
    }
    let adopted: Vec<BlockConvention> = direct.iter().filter(|d| d.1).map(|d| d.0).collect();
    let pass = adopted.len() == 1 && adopted[0] == BlockConvention::default();
    if let [conv] = adopted[..] {
        notes.push(format!("adopted convention {}", conv.tag()));
    }
    verdict(pass, notes.join("; "))
}

fn avalanche_statistics() -> Verdict {
    let l = 128;
    let fixture: Vec<f64> = (1..=l).map(|s| 2f64.powi(-(s as i32))).collect();
    let baseline = fit_power_law(&fixture, 1..=l).unwrap().rmse;
    let impacts = |name: &str, u: f64, realizations: u64, seed: u64| -> Vec<usize> {
        let mut c = SimulationConfig::new(l, model(name), u, 50, 200, seed);
        c.record_profiles = false;
        c.record_impacts = true;
        ensemble(&c, realizations).into_iter().flat_map(|r| r.impacts.into_iter().map(|i| i.total_change)).collect()
    };
    let volume = impacts("model1", 1.8, 24, 1012);
    let hv = impact_histogram(volume.iter().copied(), l * l).unwrap();
    let fv = fit_power_law(&hv.probabilities(), 1..=l).unwrap();
    let volume_ok = volume.len() >= 100_000 && fv.tau > -3.0 && fv.tau < -2.0 && 5.0 * fv.rmse <= baseline;

    let frozen = impacts("model2", 5.0, 24, 1013);
    let hf = impact_histogram(frozen.iter().copied(), l * l).unwrap();
    let ff = fit_power_law(&hf.probabilities(), 1..=l);
    let frozen_ok = ff.as_ref().map_or(true, |f| f.rmse > baseline);
    verdict(
        volume_ok && frozen_ok,
        format!(
            "baseline RMSE (P ~ 2^-s, s = 1..{l}) {baseline:.3}; model 1 u=1.8: {} impacts, tau {:.3}, RMSE {:.3}; model 2 u=5: {} impacts, {}",
            volume.len(),
            fv.tau,
            fv.rmse,
            frozen.len(),
            match &ff {
                Ok(f) => format!("tau {:.3}, RMSE {:.3} over {} nonzero bins", f.tau, f.rmse, f.bins_used),
                Err(e) => format!("no fit ({e})"),
            }
        ),
    )
}

fn collapse_machinery() -> Verdict {
    let start = Instant::now();
    let (u_c, nu) = (1.2, 1.4);
    let family = |scales: &[f64], base: f64| -> CurveFamily {
        let curves = scales
            .iter()
            .map(|&s| {
                let pts = grid(0.8, 1.6, 0.02)
                    .into_iter()
                    .map(|u| {
                        let d: f64 = u - u_c;
                        let x = d.signum() * d.abs().powf(nu) * s;
                        (u, base * s.ln() + 2.0 * (x / 6.0).tanh())
                    })
                    .collect();
                CollapseCurve::new(s, pts).unwrap()
            })
            .collect();
        CurveFamily { curves }
    };
    let families = [family(&[16.0, 32.0, 64.0, 128.0], 0.55), family(&[10.0, 20.0, 50.0, 100.0, 200.0], 0.6)];
    let res = collapse_optimize(&families, &CollapseOptions { seed: 1014, ..Default::default() }).unwrap();
    let elapsed = start.elapsed();
    let eu = (res.u_c - u_c).abs() / u_c;
    let en = (res.nu - nu).abs() / nu;
    verdict(
        eu < 0.02 && en < 0.02 && res.restarts.len() == 100 && elapsed < Duration::from_secs(60),
        format!("planted (1.2, 1.4), recovered ({:.4}, {:.4}), relative errors ({eu:.2e}, {en:.2e}), {elapsed:.1?}", res.u_c, res.nu),
    )
}

fn critical_log_scaling() -> Verdict {
    let (u_c, source) = estimated_critical_point();
    let l = 256;
    let mut c = SimulationConfig::new(l, model("model1"), u_c, 0, 200, 1015);
    c.record_profiles = false;
    let recs = ensemble(&c, 500);
    let mut by_t: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for r in &recs {
        for &(t, s) in &r.half_cut {
            if (5.0..=200.0).contains(&t) {
                by_t.entry(t as u64).or_default().push(s as f64);
            }
        }
    }
    let samples: Vec<(f64, Vec<f64>)> = by_t.into_iter().map(|(t, v)| (t as f64, v)).collect();
    let curve = EntropyCurve::from_samples(Abscissa::Time, &samples).unwrap();
    let fit = log_fit(&curve, 0).unwrap();
    verdict(
        fit.r_squared > 0.95 && (fit.prefactor - 0.60).abs() <= 0.15,
        format!("u_c = {u_c:.3} from {source}; S(t) vs ln t over t in [5, 200]: alpha_t = {:.3}, R^2 = {:.4}", fit.prefactor, fit.r_squared),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Verdict); 10] = [
        (1, "oracle equivalence", oracle_equivalence),
        (2, "sampler uniformity", sampler_uniformity),
        (3, "degenerate limits", degenerate_limits),
        (4, "model 1 transition", model1_transition),
        (5, "KPZ fluctuations", kpz_fluctuations),
        (6, "frozen transition", frozen_transition),
        (7, "convention disambiguation", convention_disambiguation),
        (8, "avalanche statistics", avalanche_statistics),
        (9, "collapse machinery", collapse_machinery),
        (10, "critical log scaling", critical_log_scaling),
    ];
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, name, check) in criteria {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let v = check();
        failed += usize::from(!v.pass);
        println!("{} criterion {n} ({name}) [{:.0?}]: {}", if v.pass { "PASS" } else { "FAIL" }, start.elapsed(), v.detail);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
