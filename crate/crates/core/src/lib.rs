//! Placement of floating head locations between fixed hazards on a track interval.
//!
//! The crate solves the max-min placement problem: given an interval of tracks
//! bounded by `[boundary_lower, boundary_upper]` and a set of fixed bumps inside
//! it, place `num_floating` points so that the smallest distance between any
//! floating point and any other point of interest is as large as possible.
//!
//! Modules:
//!
//! - [`layout`]: instances, the bracket partition and objective evaluation.
//! - [`heuristic`]: the bracket-allocation solver (initial allocation, elimination,
//!   adjustment, even spacing).
//! - [`oracle`]: exact optimum by parametric search, brute-force enumeration and the
//!   Monte Carlo random-placement baseline.
//! - [`worstcase`]: the closed-form worst-case spacing over all bump configurations,
//!   an instance that attains it, and a grid search that checks it.
//! - [`drift`]: the linearised head-drift model and the wake-up period solver.
//!
//! Data-parallel work (Monte Carlo trials, worst-case grid sweeps) runs on rayon
//! when the `parallel` feature is enabled (the default) and sequentially otherwise.
//! Results never depend on which path ran.

pub mod drift;
pub mod error;
pub mod heuristic;
pub mod layout;
pub mod oracle;
pub mod parallel;
pub mod worstcase;

pub use error::{Error, Result};
pub use layout::{Instance, ObjectiveMode, Placement, TrackPosition};
pub use parallel::Execution;
