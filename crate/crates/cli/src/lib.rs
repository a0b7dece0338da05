//! Batch front end for the F-RAN latency simulator: experiment files,
//! presets, parameter sweeps and CSV output.

pub mod config;
pub mod error;
pub mod format;
pub mod presets;
pub mod sweep;

pub use config::{parse_config, parse_config_text, Axis, SweepPoint, SweepSpec};
pub use error::{CliError, Result};
pub use sweep::{
    compute_sweep, run_sweep, run_sweep_with_progress, write_csv, SweepOutput, SweepRow, CSV_HEADER,
};
