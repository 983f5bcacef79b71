//! Integration of Hamilton's equations for the classical models.
//!
//! The 1/c² Hamiltonians couple positions and momenta, so they are not
//! separable and splitting schemes do not apply. Explicit RK4 and an embedded
//! Dormand-Prince 5(4) pair are provided; conservation is audited afterwards.

mod integrator;
mod report;

pub use integrator::{
    hamilton_rhs, integrate, integrate_at, IntegratorConfig, Method, PhaseVelocity, Trajectory,
    COLLISION_DISTANCE, MIN_STEP,
};
pub use report::{
    conservation_report, trajectory_divergence, write_divergence_csv, write_trajectory_csv,
    ConservationReport, Divergence,
};
