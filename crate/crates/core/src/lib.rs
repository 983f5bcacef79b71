//! Verification toolkit for the order-1/c² electromagnetic Hamiltonians of
//! non-relativistic charged particles in the Coulomb gauge.
//!
//! * [`classical`]: particle configurations, the Coulomb / Darwin / transverse
//!   pair kernels (closed form and 3D quadrature) and exact gradients.
//! * [`dynamics`]: Runge-Kutta integration of Hamilton's equations with
//!   conservation auditing.
//! * [`fock`]: second-quantized plane-wave Hamiltonian with the transverse
//!   current-current term, exact diagonalization, current density.
//! * [`qed`]: photon modes, polarization vectors and the static single-photon
//!   exchange amplitude compared against the current-current coefficient.

pub mod classical;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod format;
pub mod qed;
pub mod units;

pub use error::{Error, Result};
pub use units::UnitSystem;
