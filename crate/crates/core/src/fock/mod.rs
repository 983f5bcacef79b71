//! Second-quantized electrons in a periodic box.
//!
//! Plane-wave spin-orbitals `(n, σ)` with wavevector `k = 2πn/L` carry the
//! kinetic term `ħ²k²/2m`, the normal-ordered Coulomb interaction with
//! `q = 0` removed (neutralizing background) and the transverse
//! current-current interaction
//!
//! ```text
//! −(e²ħ²/(m²c²Ω)) Σ_{σσ'} Σ_{k,p,q≠0} (2π/q²)(k·p − (q·k)(q·p)/q²)
//!     a†_{k,σ} a†_{p,σ'} a_{p+q,σ'} a_{k−q,σ}
//! ```
//!
//! Matrices are assembled on fixed `(N, P, S_z)` sectors and diagonalized
//! densely or with Lanczos.

mod basis;
mod coefficients;
mod eigen;
mod hamiltonian;
mod lattice;
mod observables;
mod state;

pub use basis::{enumerate_sector_basis, SectorBasis, SectorSpec, DEFAULT_CAPACITY};
pub use coefficients::{coulomb_coefficient, current_current_coefficient, CouplingToggles};
pub use eigen::{diagonalize, write_spectrum_csv, EigenOptions, SolverMethod, Spectrum};
pub use hamiltonian::{
    assemble_hamiltonian, assemble_with_field, kinetic_diagonal, minimal_substitution,
    SymmetricMatrix, VectorPotential,
};
pub use lattice::{BoxGeometry, IVec3, Mode, Spin};
pub use observables::current_density_expectation;
pub use state::{apply_pair_operator, FockState};
