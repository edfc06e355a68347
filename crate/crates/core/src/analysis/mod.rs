//! Derived statistics over states and trajectory records.

mod avalanche;
mod collapse;
mod entropy;
mod fits;
mod frozen;

pub use avalanche::{fit_power_law, impact_histogram, ImpactHistogram, PowerLawFit};
pub use collapse::{
    collapse_cost, collapse_optimize, nelder_mead, CollapseBounds, CollapseCurve, CollapseOptions, CollapseResult,
    CurveFamily, Minimum, NelderMeadOptions, RestartResult,
};
pub use entropy::{chord, edge_regions, fluctuation, mutual_information};
pub use fits::{
    dynamic_exponent, kpz_fit, linear_regression, log_fit, Abscissa, CurvePoint, EntropyCurve, KpzFitResult,
    LinearFit, LogFitResult,
};
pub use frozen::{drift_diffusion_fit, protected_statistics, DriftDiffusionFit};
