//! The feedback microstep and seeded trajectories.

use serde::{Deserialize, Serialize};

use super::rules::{Action, RuleSet};
use super::schedule::Schedule;
use crate::analysis::{edge_regions, mutual_information};
use crate::error::{Error, Result};
use crate::rng::{RandomStream, StreamPosition, PRNG_ID};
use crate::sampler::random_clifford;
use crate::substrate::{
    classify_heights, protected_length, total_change, Block, BlockConvention, HeightProfile, ImpactCause,
    ImpactRecord, ProtectedLength,
};
use crate::tableau::{MeasurementOutcome, StabilizerTableau};

/// Width of the gate window.
pub const WINDOW: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepAction {
    Unitary,
    Measure,
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    /// Chosen cut `j` (1-based qubits; the window is qubits `j-1..=j+2`).
    pub site: usize,
    pub block: Block,
    pub action: StepAction,
    /// `s = Σ|Δh|`, present for measurement steps when requested.
    pub impact: Option<usize>,
    pub outcomes: Option<[MeasurementOutcome; 2]>,
}

/// One microstep of the feedback dynamics.
///
/// Draw order is fixed: site, then the coin, then the gate or the two
/// measurement outcomes.
pub fn step(
    state: &mut StabilizerTableau,
    rules: &RuleSet,
    convention: BlockConvention,
    schedule: &Schedule,
    rng: &mut RandomStream,
    record_impact: bool,
) -> Result<StepOutcome> {
    let l = state.num_qubits();
    if l < WINDOW {
        return Err(Error::Config(format!("chain of {l} qubits cannot host a {WINDOW}-qubit window")));
    }
    let site = 2 + rng.below((l - 3) as u64) as usize;
    let block = classify_heights(state.prefix_triple(site), convention);
    match rules.action(block.class) {
        Action::Unitary => {
            if !rng.chance(schedule.p_unitary()) {
                return Ok(StepOutcome { site, block, action: StepAction::Skip, impact: None, outcomes: None });
            }
            let gate = random_clifford(WINDOW, rng)?;
            state.apply_clifford(&gate, site - 2)?;
            Ok(StepOutcome { site, block, action: StepAction::Unitary, impact: None, outcomes: None })
        }
        Action::Measure => {
            if !rng.chance(schedule.p_measure()) {
                return Ok(StepOutcome { site, block, action: StepAction::Skip, impact: None, outcomes: None });
            }
            let before = record_impact.then(|| state.prefix_profile());
            let first = state.measure_z(site - 1, rng)?;
            let second = state.measure_z(site, rng)?;
            let impact = before.map(|b| total_change(&b, &state.prefix_profile()));
            Ok(StepOutcome { site, block, action: StepAction::Measure, impact, outcomes: Some([first, second]) })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    #[default]
    Product,
    /// A uniformly random stabilizer state drawn from the trajectory stream.
    Scrambled,
}

fn default_true() -> bool {
    true
}

fn default_cadence() -> u64 {
    1
}

fn default_max_records() -> u64 {
    200_000_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(rename = "L")]
    pub l: usize,
    pub rule_set: RuleSet,
    #[serde(default)]
    pub convention: BlockConvention,
    pub u: f64,
    pub t_equil: u64,
    pub t_sample: u64,
    #[serde(default)]
    pub initial_state: InitialState,
    pub seed: u64,
    #[serde(default)]
    pub stream_id: u64,
    /// Sweeps between profile snapshots. Zero additionally records the
    /// half-cut entropy after every microstep.
    #[serde(default = "default_cadence")]
    pub snapshot_cadence: u64,
    #[serde(default = "default_true")]
    pub record_profiles: bool,
    #[serde(default)]
    pub record_impacts: bool,
    #[serde(default)]
    pub record_mutual_info: bool,
    /// Upper bound on stored rows across all series.
    #[serde(default = "default_max_records")]
    pub max_records: u64,
}

impl SimulationConfig {
    pub fn new(l: usize, rule_set: RuleSet, u: f64, t_equil: u64, t_sample: u64, seed: u64) -> Self {
        Self {
            l,
            rule_set,
            convention: BlockConvention::default(),
            u,
            t_equil,
            t_sample,
            initial_state: InitialState::Product,
            seed,
            stream_id: 0,
            snapshot_cadence: 1,
            record_profiles: true,
            record_impacts: false,
            record_mutual_info: false,
            max_records: default_max_records(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 8 || self.l % 2 != 0 {
            return Err(Error::Config(format!("L must be even and at least 8, got {}", self.l)));
        }
        Schedule::new(self.u)?;
        if self.record_mutual_info {
            edge_regions(self.l)?;
        }
        Ok(())
    }

    pub fn total_microsteps(&self) -> u64 {
        (self.t_equil + self.t_sample) * self.l as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub version: String,
    pub prng: String,
    pub convention: String,
    pub config: SimulationConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub metadata: RunMetadata,
    /// `(sweep, S_[0,L/2))`.
    pub half_cut: Vec<(f64, usize)>,
    pub profiles: Vec<(u64, HeightProfile)>,
    pub impacts: Vec<ImpactRecord>,
    pub protected: Vec<(u64, ProtectedLength)>,
    /// `(sweep, I_AB)` for the edge regions.
    pub mutual_info: Vec<(u64, usize)>,
}

impl TrajectoryRecord {
    fn empty(config: &SimulationConfig) -> Self {
        Self {
            metadata: RunMetadata {
                version: env!("CARGO_PKG_VERSION").to_string(),
                prng: PRNG_ID.to_string(),
                convention: config.convention.tag().to_string(),
                config: config.clone(),
            },
            half_cut: Vec::new(),
            profiles: Vec::new(),
            impacts: Vec::new(),
            protected: Vec::new(),
            mutual_info: Vec::new(),
        }
    }

    fn rows(&self, l: usize) -> u64 {
        (self.half_cut.len() + self.profiles.len() * (l + 1) + self.impacts.len() + self.protected.len() + self.mutual_info.len())
            as u64
    }
}

/// Everything needed to continue a trajectory bit-identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub microstep: u64,
    pub observed: Option<u64>,
    pub rng: StreamPosition,
    pub tableau: String,
    pub record: TrajectoryRecord,
}

/// A trajectory in progress.
pub struct Simulation {
    config: SimulationConfig,
    schedule: Schedule,
    state: StabilizerTableau,
    rng: RandomStream,
    microstep: u64,
    /// Last microstep boundary at which observations were taken.
    observed: Option<u64>,
    record: TrajectoryRecord,
}

impl Simulation {
    pub fn new(config: SimulationConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = RandomStream::new(config.seed, config.stream_id);
        let state = match config.initial_state {
            InitialState::Product => StabilizerTableau::new_product_state(config.l)?,
            InitialState::Scrambled => crate::sampler::random_stabilizer_state(config.l, &mut rng)?,
        };
        let record = TrajectoryRecord::empty(&config);
        let schedule = Schedule::new(config.u)?;
        Ok(Self { config, schedule, state, rng, microstep: 0, observed: None, record })
    }

    pub fn resume(checkpoint: Checkpoint) -> Result<Self> {
        let config = checkpoint.record.metadata.config.clone();
        config.validate()?;
        if checkpoint.record.metadata.prng != PRNG_ID {
            return Err(Error::Config(format!("checkpoint written with PRNG {}", checkpoint.record.metadata.prng)));
        }
        let state: StabilizerTableau = checkpoint.tableau.parse()?;
        if state.num_qubits() != config.l {
            return Err(Error::LengthMismatch(state.num_qubits(), config.l));
        }
        if checkpoint.microstep > config.total_microsteps() {
            return Err(Error::Config("checkpoint lies beyond the end of the run".into()));
        }
        Ok(Self {
            schedule: Schedule::new(config.u)?,
            config,
            state,
            rng: RandomStream::from_position(checkpoint.rng),
            microstep: checkpoint.microstep,
            observed: checkpoint.observed,
            record: checkpoint.record,
        })
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            microstep: self.microstep,
            observed: self.observed,
            rng: self.rng.position(),
            tableau: self.state.to_string(),
            record: self.record.clone(),
        }
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn state(&self) -> &StabilizerTableau {
        &self.state
    }

    pub fn record(&self) -> &TrajectoryRecord {
        &self.record
    }

    pub fn microstep(&self) -> u64 {
        self.microstep
    }

    pub fn is_finished(&self) -> bool {
        self.microstep >= self.config.total_microsteps() && self.observed == Some(self.microstep)
    }

    /// Runs up to `microsteps` further steps, recording inside the sampling
    /// window.
    pub fn advance(&mut self, microsteps: u64) -> Result<()> {
        let end = self.config.total_microsteps().min(self.microstep.saturating_add(microsteps));
        let l = self.config.l as u64;
        let window_start = self.config.t_equil * l;
        while self.microstep < end {
            self.observe()?;
            let out = step(
                &mut self.state,
                &self.config.rule_set,
                self.config.convention,
                &self.schedule,
                &mut self.rng,
                self.config.record_impacts && self.microstep >= window_start,
            )?;
            if let Some(s) = out.impact {
                self.record.impacts.push(ImpactRecord {
                    total_change: s,
                    sigma: s as f64 / l as f64,
                    caused_by: ImpactCause::Measurement { site: out.site },
                    time: self.microstep,
                });
            }
            self.microstep += 1;
        }
        if self.microstep == self.config.total_microsteps() {
            self.observe()?;
        }
        Ok(())
    }

    /// Advances by whole sweeps.
    pub fn advance_sweeps(&mut self, sweeps: u64) -> Result<()> {
        self.advance(sweeps.saturating_mul(self.config.l as u64))
    }

    pub fn run_to_end(mut self) -> Result<TrajectoryRecord> {
        self.advance(u64::MAX)?;
        Ok(self.record)
    }

    fn observe(&mut self) -> Result<()> {
        let t = self.microstep;
        if self.observed == Some(t) {
            return Ok(());
        }
        self.observed = Some(t);
        let l = self.config.l as u64;
        let start = self.config.t_equil * l;
        if t < start {
            return Ok(());
        }
        let on_sweep = t % l == 0;
        let every_step = self.config.snapshot_cadence == 0;
        if on_sweep || every_step {
            let half = self.state.prefix_entropy(self.config.l / 2);
            self.record.half_cut.push((t as f64 / l as f64, half));
        }
        if on_sweep {
            let sweep = t / l;
            let profile = HeightProfile::from_state(&self.state);
            self.record.protected.push((sweep, protected_length(&profile)));
            let cadence = self.config.snapshot_cadence.max(1);
            if self.config.record_profiles && (sweep - self.config.t_equil) % cadence == 0 {
                self.record.profiles.push((sweep, profile));
            }
            if self.config.record_mutual_info {
                let (a, b) = edge_regions(self.config.l)?;
                self.record.mutual_info.push((sweep, mutual_information(&self.state, &a, &b)?));
            }
        }
        let rows = self.record.rows(self.config.l);
        if rows > self.config.max_records {
            return Err(Error::ResourceLimit(format!(
                "trajectory record exceeds {} rows at microstep {t}",
                self.config.max_records
            )));
        }
        Ok(())
    }
}

/// Runs one seeded trajectory to completion.
pub fn run(config: SimulationConfig) -> Result<TrajectoryRecord> {
    Simulation::new(config)?.run_to_end()
}
