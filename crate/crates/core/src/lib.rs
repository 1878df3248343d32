//! Simulator for an adiabatic Mach-Zehnder interferometer built from a
//! transverse-field Ising chain of trapped ions.
//!
//! The modules follow the experiment: [`statevec`] fixes the basis and state
//! container, [`hamiltonian`] applies the long-range Ising Hamiltonian
//! matrix-free, [`evolve`] integrates the Schrödinger equation along sweep
//! schedules, [`observables`] measures the chain, and [`interferometer`]
//! composes the beam splitters, phase accumulation and readout.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod evolve;
pub mod hamiltonian;
pub mod interferometer;
pub mod observables;
pub mod statevec;

pub use error::{Result, SpinError};
pub use evolve::{EvolutionTrace, Method, PropagatorConfig, Schedule, Segment};
pub use hamiltonian::{FreeEvolutionParams, IsingOperator, IsingParams};
pub use interferometer::{BiasPoint, FringeScan, InterferometerConfig, UnitsConfig};
pub use num_complex::Complex64;
pub use observables::SpectrumResult;
pub use statevec::{SpinBasis, StateVector};
