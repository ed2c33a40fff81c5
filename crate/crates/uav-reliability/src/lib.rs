//! Runtime reliability evaluation for UAV-class systems.
//!
//! The crate combines a static fault tree with dynamic component models to
//! produce live failure-probability and mean-time-to-failure estimates while
//! a mission runs:
//!
//! - [`markov`] — generic continuous-time Markov and semi-Markov machinery:
//!   transient distributions by uniformization, a renewal-equation solver for
//!   general sojourn distributions, absorbing-chain MTTF via the fundamental
//!   matrix, and a seed-deterministic Monte Carlo oracle.
//! - [`models`] — concrete component models: multirotor propulsion in three
//!   motor configurations, a banded battery degradation chain, and
//!   Arrhenius-derated processor reliability, each with its symptom mapping.
//! - [`fault_tree`] — AND/OR fault trees over constant-rate basic events and
//!   model-backed complex basic events, parsed from a line-oriented text
//!   format; top-event probability and system MTTF.
//! - [`runtime`] — the evaluation loop: ingest telemetry samples, map
//!   symptoms onto model states, recompute per-component and system figures
//!   each tick, and issue recommendations against a threshold.
//! - [`scenario`] — seeded telemetry generators for fault-free and faulty
//!   mission profiles.
//!
//! Time is measured in hours everywhere inside the library; the runtime
//! layer converts telemetry timestamps (seconds) at the boundary.
//!
//! See the `examples/` directory for one runnable program per capability,
//! and the `uav-reliability` binary for the `scenario`, `replay` and `query`
//! commands.

pub mod fault_tree;
pub mod markov;
pub mod models;
pub mod runtime;
pub mod scenario;

pub use fault_tree::{parse_fault_tree, FaultTree};
pub use markov::{MarkovModel, StateDistribution};
pub use runtime::{decide, replay, MissionConfig, Recommendation, ReliabilityEngine, Verdict};
pub use scenario::{generate_scenario, ScenarioKind, ScenarioSpec};
