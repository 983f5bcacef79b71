//! Classical charged particles with order-1/c² pair interactions.
//!
//! Three Hamiltonians are available: plain Coulomb, the Darwin form, and the
//! Coulomb-gauge transverse form whose pair bracket is the integral
//! `p_i·[I/R − (1/4π)∫dx |r_i−x|⁻¹ ∇∇|x−r_j|⁻¹]·p_j`. Every 1/c² pair term is
//! written as `−κ_ij p_i·T(r_i − r_j)·p_j` with a rotationally symmetric
//! tensor `T = a·I + b·n̂n̂`.

mod hamiltonian;
mod kernel;
mod particles;
pub mod quadrature;

pub use hamiltonian::{
    coulomb_energy, darwin_pair_term, gradients, h_total, pair_energy, Gradients,
    HamiltonianModel, KernelMode, ModelKind,
};
pub use kernel::{kernel_closed, GradientReading, PairKernel};
pub use particles::{pair_unit_vector, Particle, ParticleSet};
pub use quadrature::{kernel_quadrature, QuadratureKernel, QuadratureSettings};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;
