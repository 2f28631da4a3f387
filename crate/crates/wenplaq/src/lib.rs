//! Desk-scale exact numerics for the transverse-field Wen-plaquette model.
//!
//! The model couples four-body plaquette terms F_i = sx sy sx sy around each
//! square of a periodic lattice with a uniform transverse field:
//!   H = -J sum_i F_i - g sum_i sx_i.
//! For J > 0 and J < 0 the ground state carries two distinct Z2 topological
//! orders, separated (at finite g) by a spin-polarized phase; the sign of a
//! Wilson loop tells them apart while every local order parameter stays
//! smooth.
//!
//! The crate covers the full pipeline around that physics:
//! - [`pauli`]: phased Pauli strings, matrix-free application, dense oracles
//! - [`lattice`]: plaquettes, Hamiltonians, Wilson loops, defect labels
//! - [`spectra`]: dense and Lanczos eigensolvers, the closed-form 2x2 state
//! - [`adiabatic`]: constant-adiabaticity sweeps and stepwise evolution
//! - [`trotter`]: Trotter splitting and compilation to NMR-style pulses
//! - [`observables`]: Wilson loop, order parameter, concurrence, correlations
//! - [`tomography`]: synthetic Pauli-basis tomography round trips
//! - [`driver`]: run configuration and the CLI command implementations
//!
//! Conventions, fixed once and used everywhere: site 0 is the least
//! significant bit of a basis index; the 2x2 torus is numbered 1=(0,0),
//! 2=(1,0), 3=(1,1), 4=(0,1) (internally 0..3); a site is "odd" when x+y is
//! even; rotations are e^{-i(angle/2) sigma}.

pub mod adiabatic;
pub mod driver;
pub mod error;
pub mod lattice;
pub mod observables;
pub mod pauli;
pub mod spectra;
pub mod tomography;
pub mod trotter;

pub use error::{Error, Result};
