//! Runs a set of cells with checkpointing and merges their output.
//!
//! Each cell writes headerless CSV fragments under `cells/<tag>/` and, when
//! enabled, checkpoints under `checkpoints/`. Once every cell is done the
//! fragments are concatenated in plan order, so the data files do not depend
//! on the number of workers or on scheduling.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use qrpm::engine::{Checkpoint, Simulation};
use rayon::prelude::*;

use crate::config::{CellSpec, ConfigFile};
use crate::output::{file_digest, record_rows, write_atomic, DataFile, Manifest, Status, DATA_FILES, MANIFEST};

const DONE: &str = "done";

struct Layout {
    root: PathBuf,
}

impl Layout {
    fn fragments(&self, cell: &CellSpec) -> PathBuf {
        self.root.join("cells").join(cell.tag())
    }

    fn checkpoint(&self, cell: &CellSpec) -> PathBuf {
        self.root.join("checkpoints").join(format!("{}.json", cell.tag()))
    }
}

/// Starts a fresh run in `out`.
pub fn start(command: &str, config: ConfigFile, cells: Vec<CellSpec>, out: &Path, workers: Option<usize>) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    if out.join(MANIFEST).exists() {
        bail!("{} already holds a run; use `qrpm resume --out {}` to continue it", out.display(), out.display());
    }
    for cell in &cells {
        config.simulation_config(cell)?;
    }
    let manifest = Manifest::new(command, &config, &cells);
    manifest.save(out)?;
    execute(manifest, out, workers)
}

/// Continues the run recorded in `out`.
pub fn resume(out: &Path, workers: Option<usize>) -> Result<()> {
    let manifest = Manifest::load(out)?;
    if manifest.status == Status::Complete {
        eprintln!("run in {} is already complete", out.display());
        return Ok(());
    }
    if manifest.prng != qrpm::PRNG_ID {
        bail!("run was written with PRNG {}, this build uses {}", manifest.prng, qrpm::PRNG_ID);
    }
    execute(manifest, out, workers)
}

fn execute(manifest: Manifest, out: &Path, workers: Option<usize>) -> Result<()> {
    let layout = Layout { root: out.to_path_buf() };
    fs::create_dir_all(out.join("cells"))?;
    if manifest.config.protocol.checkpoint_every > 0 {
        fs::create_dir_all(out.join("checkpoints"))?;
    }
    let config = manifest.config.clone();
    let cells: Vec<CellSpec> = manifest.cells.iter().map(|e| e.cell.clone()).collect();
    let shared = Mutex::new(manifest);

    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.unwrap_or(0)).build()?;
    pool.install(|| {
        cells.par_iter().enumerate().try_for_each(|(i, cell)| -> Result<()> {
            if layout.fragments(cell).join(DONE).exists() {
                return Ok(());
            }
            let start = Instant::now();
            run_cell(&config, cell, &layout).with_context(|| format!("cell {}", cell.tag()))?;
            let mut m = shared.lock().map_err(|_| anyhow!("manifest lock poisoned"))?;
            m.cells[i].status = Status::Complete;
            m.cells[i].wall_seconds = Some(start.elapsed().as_secs_f64());
            m.save(out)
        })
    })?;

    let mut manifest = shared.into_inner().map_err(|_| anyhow!("manifest lock poisoned"))?;
    merge(&cells, &layout)?;
    manifest.data_files = DATA_FILES
        .iter()
        .map(|(name, _)| {
            let (rows, sha256) = file_digest(&out.join(name))?;
            Ok(DataFile { name: name.to_string(), rows, sha256 })
        })
        .collect::<Result<_>>()?;
    for e in &mut manifest.cells {
        e.status = Status::Complete;
    }
    manifest.status = Status::Complete;
    manifest.save(out)?;
    for dir in ["cells", "checkpoints"] {
        let p = out.join(dir);
        if p.exists() {
            fs::remove_dir_all(&p)?;
        }
    }
    Ok(())
}

fn run_cell(config: &ConfigFile, cell: &CellSpec, layout: &Layout) -> Result<()> {
    let sim_config = config.simulation_config(cell)?;
    let ckpt_path = layout.checkpoint(cell);
    let mut sim = if ckpt_path.exists() {
        let ckpt: Checkpoint = serde_json::from_str(&fs::read_to_string(&ckpt_path)?)
            .with_context(|| format!("parsing {}", ckpt_path.display()))?;
        if ckpt.record.metadata.config != sim_config {
            bail!("checkpoint {} belongs to a different configuration", ckpt_path.display());
        }
        Simulation::resume(ckpt)?
    } else {
        Simulation::new(sim_config)?
    };
    let every = config.protocol.checkpoint_every;
    while !sim.is_finished() {
        if every == 0 {
            sim.advance(u64::MAX)?;
        } else {
            sim.advance_sweeps(every)?;
            if !sim.is_finished() {
                write_atomic(&ckpt_path, serde_json::to_string(&sim.checkpoint())?.as_bytes())?;
            }
        }
    }
    let dir = layout.fragments(cell);
    fs::create_dir_all(&dir)?;
    let rows = record_rows(cell, sim.record());
    for ((name, _), body) in DATA_FILES.iter().zip(rows) {
        write_atomic(&dir.join(name), body.as_bytes())?;
    }
    write_atomic(&dir.join(DONE), b"")?;
    if ckpt_path.exists() {
        fs::remove_file(&ckpt_path)?;
    }
    Ok(())
}

fn merge(cells: &[CellSpec], layout: &Layout) -> Result<()> {
    for (name, header) in DATA_FILES {
        let mut body = format!("{header}\n").into_bytes();
        for cell in cells {
            let frag = layout.fragments(cell).join(name);
            body.extend(fs::read(&frag).with_context(|| format!("reading {}", frag.display()))?);
        }
        write_atomic(&layout.root.join(name), &body)?;
    }
    Ok(())
}
