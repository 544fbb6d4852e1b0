//! Experiment runner, figure reproduction, verification suites and their
//! CSV / SVG output.

pub mod config;
pub mod experiment;
pub mod figure2;
pub mod svg;
pub mod verify;

pub use config::Settings;
pub use experiment::{default_config, run_experiment, seed_pair, ExperimentResult, ExperimentSpec, ProblemSpec, ResultRow, CSV_HEADER};
pub use figure2::{figure2, Figure2Report, Figure2Settings};
pub use verify::{
    rotation_configs, rotation_deviation, spindly_rotation_config, two_layer_span_check, verify, Check, VerifyReport, SUITES,
};
