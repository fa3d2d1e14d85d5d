//! Simulation library for two repeated-interaction quantum batteries built on
//! a driven atom coupled to a cavity mode with an anti-Jaynes-Cummings
//! interaction: a qubit charged by a stream of thermal cavities, and a cavity
//! charged by a stream of thermal atoms.
//!
//! The crate provides the truncated-Fock-space collision unitaries, the exact
//! three-level dynamics used to certify the adiabatic elimination, a
//! per-collision thermodynamic ledger (work, heat, entropy production,
//! ergotropy), the charging maps of both batteries, and deterministic
//! experiment presets that regenerate the reference figures as CSV.

pub mod cavity;
pub mod error;
pub mod exact;
pub mod linalg;
pub mod model;
pub mod output;
pub mod presets;
pub mod qubit;
pub mod thermo;

pub use error::{Error, Result};
pub use model::{ModelParams, SectorFrequencies};
