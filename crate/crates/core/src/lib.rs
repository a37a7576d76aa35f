// Copyright 2026 The MEQC Lab Authors
// SPDX-License-Identifier: Apache-2.0

//! A desk-scale laboratory for multi-user computation offloading in mobile
//! edge-quantum computing (MEQC).
//!
//! Users either run a task locally, ship it to an edge server's CPU, or ship
//! it to the server's error-corrected quantum processor. The crate contains
//! the full latency/energy physics for each path ([`device`], [`cost`]),
//! seeded ray-tracing workloads ([`workload`]), a multi-agent environment
//! ([`env`]), non-learning solvers including an exhaustive oracle
//! ([`solvers`]), a from-scratch multi-agent hybrid discrete-continuous PPO
//! learner ([`marl`]), and experiment orchestration with CSV output
//! ([`bench`]).
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

// Validation is written as `!(x > 0.0)` on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cost;
pub mod device;
pub mod env;
pub mod error;
pub mod marl;
pub mod rng;
pub mod solvers;
pub mod workload;

pub use error::{Error, Result};
