//! Deterministic scenario simulator for decade-resolution neighborhood
//! emission pathways (2020-2100).
//!
//! The engine composes four mechanisms over a parcel-level description of
//! a neighborhood:
//!
//! - parcel redevelopment ranked by improvement-to-land ratio on a
//!   published decade schedule ([`redevelopment`]);
//! - an agent-based model of household technology adoption on a
//!   small-world social network ([`adoption`]);
//! - climate-modulated building energy demand from an archetype demand
//!   table ([`energy`]);
//! - grid-decarbonization pathways converting demand to emissions
//!   ([`grid`], [`pathways`]).
//!
//! Runs are pure functions of `(input data, config, seed)`: byte-identical
//! outputs on every execution, which makes paired-seed scenario
//! comparisons (supportive vs neutral policy, and so on) meaningful.

pub mod adoption;
pub mod config;
pub mod domain;
pub mod energy;
pub mod error;
pub mod fixtures;
pub mod grid;
pub mod io;
pub mod pathways;
pub mod redevelopment;
pub mod rng;
pub mod runner;

pub use config::{LoadedData, RunConfig};
pub use domain::{
    occupants, AdoptionSetting, Archetype, Catalog, Climate, Development, DwellingClass,
    GridPathwayId, LandUseClass, LocationClass, Parcel, ResidenceUnit, ScenarioSpec, Timeline,
};
pub use error::{Error, Result};
pub use runner::{run_matrix, run_matrix_sequential, run_scenario, MatrixOutputs, ScenarioOutputs};
