//! Feedback dynamics: rule sets, the microstep and trajectory recording.

mod dynamics;
mod rules;
mod schedule;

pub use dynamics::{
    run, step, Checkpoint, InitialState, RunMetadata, Simulation, SimulationConfig, StepAction, StepOutcome,
    TrajectoryRecord, WINDOW,
};
pub use rules::{classify_phase_diagram, enumerate_models, Action, CatalogEntry, ModelCatalog, PhaseClass, RuleSet, ANCHORS};
pub use schedule::Schedule;
