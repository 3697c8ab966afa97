//! Command-line front end for the opinion-action coevolution simulator.
//!
//! Three verbs over flat `key = value` config files:
//!
//! - `run`: one seeded simulation; writes `trajectory.csv`, `report.json`,
//!   and optionally per-step digraph snapshots and matrix dumps under
//!   `<out>/run-<hash>/`.
//! - `sweep`: a (threshold x weight x seed) grid; writes one phase-map CSV
//!   row per cell, optionally computed on several threads.
//! - `verify`: the invariant suite (row-stochasticity, coefficient bounds,
//!   structure dichotomy, representation equivalence) on one instance.
//!
//! Identical configs yield byte-identical outputs; see [`rng`] for the
//! generator and the sweep seed derivation.

pub mod config;
pub mod output;
pub mod rng;
pub mod run;
pub mod sweep;
pub mod verify;
