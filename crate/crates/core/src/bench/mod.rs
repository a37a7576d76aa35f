//! Experiment orchestration: TOML configuration, evaluation and training
//! runs, parameter sweeps and CSV output.

pub mod config;
pub mod csv;
pub mod sweep;

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub use self::config::{parse_config, EvalConfig, ExperimentConfig, PolicyChoice, SweepConfig, SweepParam};
pub use self::csv::{emit_csv, read_sweep_csv, write_learning_curve, CsvRecord, EvalRow, SweepRow};
pub use self::sweep::{build_scenario, run_eval, run_sweep, run_train};

/// Sibling path that holds a file while it is being written.
pub fn partial_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".partial");
    path.with_file_name(name)
}

/// Writes `bytes` to `path` through a `.partial` sibling that is renamed
/// into place on success. A leftover `.partial` file marks an aborted
/// write.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = partial_path(path);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
