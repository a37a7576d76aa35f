// Copyright 2026 The MEQC Lab Authors
// SPDX-License-Identifier: Apache-2.0

//! CSV output with a fixed header, LF line endings and floats printed with
//! twelve significant digits.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::write_atomic;
use crate::error::{Error, Result};
use crate::marl::EpochStats;

/// `v` in scientific notation with twelve significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.11e}")
}

pub trait CsvRecord {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

/// One (sweep value, policy, seed) evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub seed: u64,
    pub policy: String,
    pub param: String,
    pub value: f64,
    pub mean_cost: f64,
    pub latency_cost: f64,
    pub energy_cost: f64,
    pub qpu_grant_rate: f64,
    pub mean_success_prob: f64,
}

impl CsvRecord for SweepRow {
    const HEADER: &'static [&'static str] = &[
        "seed",
        "policy",
        "param",
        "value",
        "mean_cost",
        "latency_cost",
        "energy_cost",
        "qpu_grant_rate",
        "mean_success_prob",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.seed.to_string(),
            self.policy.clone(),
            self.param.clone(),
            format_float(self.value),
            format_float(self.mean_cost),
            format_float(self.latency_cost),
            format_float(self.energy_cost),
            format_float(self.qpu_grant_rate),
            format_float(self.mean_success_prob),
        ]
    }
}

/// One policy evaluated on one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub seed: u64,
    pub policy: String,
    pub episodes: usize,
    pub mean_cost: f64,
    pub std_cost: f64,
    pub latency_cost: f64,
    pub energy_cost: f64,
    pub qpu_grant_rate: f64,
    pub mean_success_prob: f64,
}

impl CsvRecord for EvalRow {
    const HEADER: &'static [&'static str] = &[
        "seed",
        "policy",
        "episodes",
        "mean_cost",
        "std_cost",
        "latency_cost",
        "energy_cost",
        "qpu_grant_rate",
        "mean_success_prob",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.seed.to_string(),
            self.policy.clone(),
            self.episodes.to_string(),
            format_float(self.mean_cost),
            format_float(self.std_cost),
            format_float(self.latency_cost),
            format_float(self.energy_cost),
            format_float(self.qpu_grant_rate),
            format_float(self.mean_success_prob),
        ]
    }
}

impl CsvRecord for EpochStats {
    const HEADER: &'static [&'static str] = &["epoch", "mean_cost", "policy_loss", "value_loss", "entropy"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.epoch.to_string(),
            format_float(self.mean_cost),
            format_float(self.policy_loss),
            format_float(self.value_loss),
            format_float(self.entropy),
        ]
    }
}

fn ser(e: impl ToString) -> Error {
    Error::Serialization(e.to_string())
}

/// Serializes `rows` under `R::HEADER`.
pub fn write_rows<R: CsvRecord, W: Write>(rows: &[R], out: W) -> Result<()> {
    let mut w = ::csv::WriterBuilder::new()
        .terminator(::csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(R::HEADER).map_err(ser)?;
    for r in rows {
        w.write_record(r.fields()).map_err(ser)?;
    }
    w.flush().map_err(ser)
}

pub fn to_csv_string<R: CsvRecord>(rows: &[R]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(rows, &mut buf)?;
    String::from_utf8(buf).map_err(ser)
}

/// Writes `rows` to `path` via a `.partial` sibling; zero rows give a
/// header-only file.
pub fn emit_csv<R: CsvRecord>(rows: &[R], path: &Path) -> Result<()> {
    write_atomic(path, to_csv_string(rows)?.as_bytes())
}

pub fn write_learning_curve(curve: &[EpochStats], path: &Path) -> Result<()> {
    emit_csv(curve, path)
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut r = ::csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        ::csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Serialization(format!("{other:?}")),
    })?;
    r.deserialize().map(|row| row.map_err(ser)).collect()
}
