//! Core library for simulating and verifying the opinion-action coevolution
//! model: a bounded-confidence opinion update (each agent averages the
//! observed actions of peers within its confidence threshold) coupled with a
//! utility-based action update (a convex blend of own opinion and the group's
//! average action).
//!
//! The crate is organised around four layers:
//!
//! - [`model`]: agent-level dynamics plus the classical bounded-confidence
//!   baseline on opinions alone.
//! - [`matrix`]: the augmented 2n-state vector and the row-stochastic block
//!   matrix that drives it, with executable checks of its coefficient bounds.
//! - [`graph`]: the interaction digraph induced by the state matrix, SCC and
//!   condensation analysis, and the structure dichotomy classifier.
//! - [`sim`]: full trajectories, structure-stabilization detection, regime
//!   classification (consensus vs. leader-driven clustering) and convex-hull
//!   containment checks.
//!
//! Everything here is pure and deterministic: no I/O, no randomness, no
//! shared state. Seeding and file formats live in the companion CLI crate.

#![no_std]
// the numeric kernels index by agent position on purpose: the update rules
// compare x[i] against y[j] with i != j, which iterator adapters obscure
#![allow(clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod graph;
pub mod matrix;
pub mod model;
pub mod sim;

pub use error::{Error, Result};
