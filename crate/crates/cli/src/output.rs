//! On-disk formats: CSV data files, the run manifest and atomic writes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qrpm::engine::TrajectoryRecord;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{CellSpec, ConfigFile};

pub const MANIFEST: &str = "manifest.json";

/// Data files of a run, with their headers.
pub const DATA_FILES: [(&str, &str); 5] = [
    ("halfcut.csv", "model,L,u,realization,sweep,S_half"),
    ("profiles.csv", "model,L,u,realization,sweep,site,h"),
    ("impacts.csv", "model,L,u,realization,microstep,s"),
    ("frozen.csv", "model,L,u,realization,sweep,ell_left,ell_right"),
    ("mutualinfo.csv", "model,L,u,realization,sweep,I_AB"),
];

pub const FITS_FILE: &str = "fits.csv";
pub const FITS_HEADER: &str = "fit_kind,model,L_or_range,u_or_uc,param1,param2,residual";

/// Writes through a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = temp_path(path);
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Body rows (no header) for every data file, in [`DATA_FILES`] order.
pub fn record_rows(cell: &CellSpec, record: &TrajectoryRecord) -> [String; 5] {
    let key = format!("{},{},{},{}", cell.model, cell.l, cell.u, cell.realization);
    let mut out: [String; 5] = Default::default();
    for &(t, s) in &record.half_cut {
        writeln!(out[0], "{key},{t},{s}").unwrap();
    }
    for (t, p) in &record.profiles {
        for (i, h) in p.heights().iter().enumerate() {
            writeln!(out[1], "{key},{t},{i},{h}").unwrap();
        }
    }
    for imp in &record.impacts {
        writeln!(out[2], "{key},{},{}", imp.time, imp.total_change).unwrap();
    }
    for (t, p) in &record.protected {
        writeln!(out[3], "{key},{t},{},{}", p.left, p.right).unwrap();
    }
    for (t, i) in &record.mutual_info {
        writeln!(out[4], "{key},{t},{i}").unwrap();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pending,
    Running,
    Complete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellEntry {
    #[serde(flatten)]
    pub cell: CellSpec,
    pub status: Status,
    pub wall_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataFile {
    pub name: String,
    pub rows: u64,
    pub sha256: String,
}

/// Provenance record kept next to the data files of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub toolkit: String,
    pub version: String,
    pub prng: String,
    pub convention: String,
    pub command: String,
    pub config: ConfigFile,
    pub status: Status,
    pub cells: Vec<CellEntry>,
    #[serde(default)]
    pub data_files: Vec<DataFile>,
}

impl Manifest {
    pub fn new(command: &str, config: &ConfigFile, cells: &[CellSpec]) -> Self {
        Self {
            toolkit: "qrpm".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            prng: qrpm::PRNG_ID.into(),
            convention: config.convention.tag().into(),
            command: command.into(),
            config: config.clone(),
            status: Status::Running,
            cells: cells.iter().map(|c| CellEntry { cell: c.clone(), status: Status::Pending, wall_seconds: None }).collect(),
            data_files: Vec::new(),
        }
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST);
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        write_atomic(&dir.join(MANIFEST), serde_json::to_string_pretty(self)?.as_bytes())
    }
}

/// The fields analyses need from the manifest of an input directory.
#[derive(Debug, Clone, Deserialize)]
pub struct InputManifest {
    pub convention: String,
    pub status: Status,
}

/// Reads the manifests of `dirs` and refuses incomplete runs and mixed
/// block conventions.
pub fn check_inputs(dirs: &[PathBuf]) -> Result<String> {
    let mut convention: Option<(String, &Path)> = None;
    for dir in dirs {
        let path = dir.join(MANIFEST);
        let text = fs::read_to_string(&path).with_context(|| format!("{} has no readable manifest", dir.display()))?;
        let m: InputManifest = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if m.status != Status::Complete {
            bail!("run in {} is not complete", dir.display());
        }
        match &convention {
            Some((c, first)) if *c != m.convention => {
                bail!("mixed block conventions: {} uses {c}, {} uses {}", first.display(), dir.display(), m.convention)
            }
            None => convention = Some((m.convention, dir)),
            _ => {}
        }
    }
    convention.map(|c| c.0).context("no input directories given")
}

pub fn file_digest(path: &Path) -> Result<(u64, String)> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let rows = bytes.iter().filter(|&&b| b == b'\n').count().saturating_sub(1) as u64;
    let hex = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    Ok((rows, hex))
}
