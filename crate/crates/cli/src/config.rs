//! Run configuration files.
//!
//! Configs are TOML. A file holds a `[protocol]` table plus either a `[cell]`
//! table (one trajectory, for `simulate`) or a `[grid]` table (for `sweep`).
//! Unknown keys are rejected by name.
//!
//! ```toml
//! seed = 7
//! convention = "LP"
//!
//! [protocol]
//! t_equil = 200
//! t_sample = 200
//! initial_state = "product"
//! snapshot_cadence = 1
//! record_impacts = true
//! checkpoint_every = 50
//!
//! [grid]
//! models = ["model1", "model2"]
//! L = [32, 64]
//! u = { start = 0.6, stop = 2.0, num = 15 }
//! realizations = 8
//! ```

use std::path::Path;

use anyhow::{bail, Context, Result};
use qrpm::engine::{enumerate_models, InitialState, RuleSet, SimulationConfig};
use qrpm::BlockConvention;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: u64,
    #[serde(default)]
    pub convention: BlockConvention,
    pub protocol: Protocol,
    pub cell: Option<Cell>,
    pub grid: Option<Grid>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Protocol {
    pub t_equil: u64,
    pub t_sample: u64,
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default = "one")]
    pub snapshot_cadence: u64,
    #[serde(default = "yes")]
    pub record_profiles: bool,
    #[serde(default)]
    pub record_impacts: bool,
    #[serde(default)]
    pub record_mutual_info: bool,
    /// Sweeps between checkpoints; 0 disables them.
    #[serde(default)]
    pub checkpoint_every: u64,
}

fn one() -> u64 {
    1
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cell {
    pub model: String,
    #[serde(rename = "L")]
    pub l: usize,
    pub u: f64,
    #[serde(default)]
    pub realization: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub models: Vec<String>,
    #[serde(rename = "L")]
    pub l: Vec<usize>,
    pub u: UGrid,
    pub realizations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UGrid {
    List(Vec<f64>),
    Linspace(Linspace),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linspace {
    pub start: f64,
    pub stop: f64,
    pub num: usize,
}

impl UGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            UGrid::List(v) => v.clone(),
            UGrid::Linspace(Linspace { start, stop, num }) => match num {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n)
                    .map(|i| {
                        let x = start + (stop - start) * i as f64 / (n - 1) as f64;
                        // Snap to 12 significant digits so grids print cleanly.
                        format!("{x:.12e}").parse().unwrap()
                    })
                    .collect(),
            },
        }
    }
}

/// Overrides from the command line.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub convention: Option<BlockConvention>,
    pub snapshot_cadence: Option<u64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let c: ConfigFile = toml::from_str(text)?;
        Ok(c)
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(c) = o.convention {
            self.convention = c;
        }
        if let Some(c) = o.snapshot_cadence {
            self.protocol.snapshot_cadence = c;
        }
    }

    /// The single cell of a `simulate` config.
    pub fn single_cell(&self) -> Result<CellSpec> {
        match (&self.cell, &self.grid) {
            (Some(c), None) => CellSpec::new(&c.model, c.l, c.u, c.realization),
            _ => bail!("simulate needs exactly one [cell] table and no [grid] table"),
        }
    }

    /// Every cell of a `sweep` config in canonical order: model, L, u, realization.
    pub fn grid_cells(&self) -> Result<Vec<CellSpec>> {
        let Some(g) = (match (&self.cell, &self.grid) {
            (None, Some(g)) => Some(g),
            _ => None,
        }) else {
            bail!("sweep needs exactly one [grid] table and no [cell] table")
        };
        let us = g.u.values();
        if g.models.is_empty() || g.l.is_empty() || us.is_empty() || g.realizations == 0 {
            bail!("grid must have at least one model, size, u value and realization");
        }
        let mut cells = Vec::new();
        for m in &g.models {
            for &l in &g.l {
                for &u in &us {
                    for r in 0..g.realizations {
                        cells.push(CellSpec::new(m, l, u, r)?);
                    }
                }
            }
        }
        let mut ids: Vec<u64> = cells.iter().map(|c| c.stream_id).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != cells.len() {
            bail!("grid contains duplicate cells");
        }
        Ok(cells)
    }

    pub fn simulation_config(&self, cell: &CellSpec) -> Result<SimulationConfig> {
        let p = &self.protocol;
        let mut c = SimulationConfig::new(cell.l, cell.rules, cell.u, p.t_equil, p.t_sample, self.seed);
        c.convention = self.convention;
        c.stream_id = cell.stream_id;
        c.initial_state = p.initial_state;
        c.snapshot_cadence = p.snapshot_cadence;
        c.record_profiles = p.record_profiles;
        c.record_impacts = p.record_impacts;
        c.record_mutual_info = p.record_mutual_info;
        c.validate()?;
        Ok(c)
    }
}

/// One (model, L, u, realization) point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    /// Name written to the `model` column.
    pub model: String,
    pub rules: RuleSet,
    #[serde(rename = "L")]
    pub l: usize,
    pub u: f64,
    pub realization: u64,
    pub stream_id: u64,
}

impl CellSpec {
    pub fn new(selector: &str, l: usize, u: f64, realization: u64) -> Result<Self> {
        let rules = parse_model(selector)?;
        Ok(Self { model: model_label(&rules), rules, l, u, realization, stream_id: stream_id(&rules, l, u, realization) })
    }

    /// File-name-safe identifier.
    pub fn tag(&self) -> String {
        format!("{}_L{}_u{}_r{}", self.model, self.l, self.u, self.realization)
    }
}

/// Accepts anchor names, catalog indices, `I,U,L` lists and `I+U+L` labels.
pub fn parse_model(selector: &str) -> Result<RuleSet> {
    Ok(enumerate_models().resolve(&selector.replace('+', ","))?)
}

/// Anchor name, else catalog index, else the unitary blocks joined by `+`.
pub fn model_label(rules: &RuleSet) -> String {
    let cat = enumerate_models();
    if let Some((name, _)) = qrpm::engine::ANCHORS.iter().find(|(n, _)| cat.anchor(n).is_some_and(|e| e.rules == *rules)) {
        return name.to_string();
    }
    match cat.index_of(rules) {
        Some(i) => i.to_string(),
        None => rules.to_string().replace(',', "+"),
    }
}

/// First 8 bytes (little endian) of SHA-256 over
/// `model=<blocks>;L=<L>;u=<u>;r=<realization>`.
pub fn stream_id(rules: &RuleSet, l: usize, u: f64, realization: u64) -> u64 {
    let key = format!("model={rules};L={l};u={u};r={realization}");
    let digest = Sha256::digest(key.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}
