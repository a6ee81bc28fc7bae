//! Limit-cycle analysis of a four-stroke quantum Otto engine whose working
//! medium is a pair of coupled spins.
//!
//! The state is carried by five expectation values ([`BlochVector`]); every
//! stroke is an affine map on them ([`AffinePropagator`]). [`engine`] composes
//! the strokes, finds the limit cycle and its spectrum and books heat, work
//! and entropy production; [`measures`] holds the entropies and distances
//! used to follow the approach to the limit cycle.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod engine;
pub mod error;
pub mod measures;
pub mod ode;
pub mod presets;
pub mod propagators;

pub use algebra::{thermal_state, BlochVector, DensityMatrix, SpectralInfo};
pub use engine::{
    compose_cycle, energy, iterate, limit_cycle, spectrum, thermo_ledger, trajectory, AdiabatMethod, Branch,
    Corner, CyclePropagator, CycleSpec, LimitCycleReport, Spectrum, ThermoLedger,
};
pub use error::{Error, Result};
pub use propagators::{AdiabatParams, AffinePropagator, BathParams, IsochoreParams};
