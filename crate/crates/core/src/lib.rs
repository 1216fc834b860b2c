//! Thermal entanglement of Heisenberg spin-1/2 dimers, and its extraction from
//! molar magnetic susceptibility data.
//!
//! The crate is `no_std` with `alloc`. Modules:
//!
//! - [`spin`]: dimer Hamiltonian, spectrum, Gibbs and limit density matrices,
//!   and a numerical Zeeman-response susceptibility.
//! - [`entanglement`]: concurrence (block-form and general spin-flip
//!   formulas), entanglement of formation, closed-form C(T) and T_E.
//! - [`magnetics`]: Bleaney–Bowers and Curie laws, Lambert W, susceptibility
//!   peak, entanglement witnesses and effective moments.
//! - [`separability`]: explicit product-state decompositions.
//! - [`analysis`]: impurity model, least-squares fitting, peak finding, T_E
//!   estimators, entanglement profiles and synthetic fixtures.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod entanglement;
mod error;
pub mod magnetics;
pub mod separability;
pub mod spin;
pub mod units;

pub use error::{Error, Result};
pub use nalgebra;
pub use num_complex;
