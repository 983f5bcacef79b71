//! Coulomb-gauge photons and the static single-photon exchange between two
//! electrons, compared against the direct current-current coefficient.

mod exchange;
mod polarization;

pub use exchange::{
    direct_amplitude, equivalence_report, photon_exchange_amplitude, photon_exchange_with, relative_difference,
    vertex_coefficient, CouplingPath, EffectiveAmplitude, EquivalenceReport, ExchangeContext, HReading, PhotonMode,
    BOOKKEEPING,
};
pub use polarization::{polarization_pair, polarization_sum, transverse_projector, PolarizationPair};
