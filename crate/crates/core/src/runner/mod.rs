//! Experiment protocols: configuration, synthetic data, standard and
//! continual runs, and reporting.

pub mod config;
pub mod protocol;
pub mod report;
pub mod synth;

pub use config::{Mode, RunConfig};
pub use synth::{generate_origin, generate_shift_scenario, generate_synthetic, AnomalyKind, MotionProfile, ShiftScenario, SynthSpec};
pub use protocol::{
    evaluate, extract_windows, replay_checkpoint, run_continual, run_continual_split, run_standard, summarize,
    ContinualOutcome, ContinualResult, StandardOutcome,
};
pub use report::{emit_report, CameraResult, Manifest, Outcome, ReportFormat, RunResults};
