use super::basis::SectorBasis;
use super::coefficients::CouplingToggles;
use super::lattice::Mode;
use crate::classical::Vec3;
use crate::error::{Error, Result};
use crate::units::UnitSystem;

/// `⟨j(x)⟩` for a real state vector in a uniform external vector potential:
/// the paramagnetic plane-wave part `(eħ/2mΩ) Σ (k + k') cos((k' − k)·x) ρ`
/// plus the diamagnetic part `−(e²/mc) A ⟨n(x)⟩`, with
/// `ρ = ⟨a†_{k,σ} a_{k',σ}⟩`.
pub fn current_density_expectation(
    vector: &[f64],
    basis: &SectorBasis,
    x: &Vec3,
    a_ext: &Vec3,
    toggles: &CouplingToggles,
    u: &UnitSystem,
) -> Result<Vec3> {
    toggles.validate()?;
    if vector.len() != basis.dim() {
        return Err(Error::InvalidParameter(format!(
            "state vector has length {}, basis has {}",
            vector.len(),
            basis.dim()
        )));
    }
    let norm = vector.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Normalization { norm });
    }
    let geom = &basis.geometry;
    let modes = basis.modes();
    let mut paramagnetic = Vec3::zeros();
    let mut density = 0.0;
    for (s, amp) in basis.states().iter().zip(vector) {
        if *amp == 0.0 {
            continue;
        }
        for annihilated in s.modes() {
            let (s1, rest) = s.annihilate(annihilated).expect("occupied mode");
            for created in modes.iter().filter(|m: &&Mode| m.spin == annihilated.spin) {
                let Some((s2, target)) = rest.create(created) else {
                    continue;
                };
                let Some(t) = basis.index_of(&target) else {
                    continue;
                };
                let weight = vector[t] * amp * s1 * s2;
                if weight == 0.0 {
                    continue;
                }
                let (k, kp) = (geom.wavevector(&created.n), geom.wavevector(&annihilated.n));
                let phase = (kp - k).dot(x).cos();
                paramagnetic += (k + kp) * (weight * phase);
                density += weight * phase;
            }
        }
    }
    let (e, m, omega) = (toggles.charge, toggles.mass, geom.volume());
    Ok(paramagnetic * (e * u.hbar / (2.0 * m * omega)) - a_ext * (e * e / (m * u.c) * density / omega))
}
