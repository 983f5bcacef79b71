use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::lattice::{BoxGeometry, IVec3};
use crate::error::{Error, Result};
use crate::units::UnitSystem;

/// Interaction switches and the electron's charge and mass. The speed of
/// light and `ħ` come from [`UnitSystem`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingToggles {
    pub include_coulomb: bool,
    pub include_current_current: bool,
    pub charge: f64,
    pub mass: f64,
}

impl Default for CouplingToggles {
    fn default() -> Self {
        Self { include_coulomb: true, include_current_current: true, charge: 1.0, mass: 1.0 }
    }
}

impl CouplingToggles {
    pub fn coulomb_only() -> Self {
        Self { include_current_current: false, ..Self::default() }
    }

    pub fn kinetic_only() -> Self {
        Self { include_coulomb: false, include_current_current: false, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {}", self.mass)));
        }
        if !self.charge.is_finite() {
            return Err(Error::InvalidParameter("charge must be finite".into()));
        }
        Ok(())
    }
}

fn nonzero(q: &IVec3) -> Result<()> {
    if *q == [0, 0, 0] {
        Err(Error::ExcludedTransfer)
    } else {
        Ok(())
    }
}

/// `(1/2)·4πe²/(Ω q²)` multiplying `a†_k a†_p a_{p+q} a_{k−q}`.
pub fn coulomb_coefficient(q: &IVec3, geom: &BoxGeometry, toggles: &CouplingToggles) -> Result<f64> {
    nonzero(q)?;
    let q2 = geom.wavevector(q).norm_squared();
    Ok(0.5 * 4.0 * PI * toggles.charge * toggles.charge / (geom.volume() * q2))
}

/// Current-current coefficient of the ordered summand `(k, p, q)`:
/// `−(e²ħ²/(m²c²Ω))·(2π/q²)·(k·p − (q·k)(q·p)/q²)`.
pub fn current_current_coefficient(
    k: &IVec3,
    p: &IVec3,
    q: &IVec3,
    geom: &BoxGeometry,
    toggles: &CouplingToggles,
    u: &UnitSystem,
) -> Result<f64> {
    nonzero(q)?;
    let (kv, pv, qv) = (geom.wavevector(k), geom.wavevector(p), geom.wavevector(q));
    let q2 = qv.norm_squared();
    let transverse = kv.dot(&pv) - qv.dot(&kv) * qv.dot(&pv) / q2;
    let (e, m) = (toggles.charge, toggles.mass);
    let prefactor = e * e * u.hbar * u.hbar / (m * m * u.c * u.c * geom.volume());
    Ok(-prefactor * 2.0 * PI / q2 * transverse)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    use super::*;
    use crate::classical::Mat3;

    fn geom() -> BoxGeometry {
        BoxGeometry::new(2.0 * PI).unwrap()
    }

    #[test]
    fn coulomb_examples() {
        let g = geom();
        let neutral = CouplingToggles { charge: 0.0, ..Default::default() };
        assert_eq!(coulomb_coefficient(&[1, 0, 0], &g, &neutral).unwrap(), 0.0);
        let t = CouplingToggles::default();
        let single = coulomb_coefficient(&[1, 2, 0], &g, &t).unwrap();
        let double = coulomb_coefficient(&[2, 4, 0], &g, &t).unwrap();
        assert_relative_eq!(double, single / 4.0, max_relative = 1e-15);
        assert_eq!(coulomb_coefficient(&[0, 0, 0], &g, &t), Err(Error::ExcludedTransfer));
    }

    /// The periodic potential solves ∇²φ = −4π(δ − 1/Ω); its grid version
    /// with the 7-point Laplacian has Fourier component 4π/λ(q), which
    /// approaches the continuum value as the grid is refined.
    #[test]
    fn coulomb_matches_lattice_fourier_sum() {
        let g = geom();
        let t = CouplingToggles::default();
        let m = 4096.0;
        let h = g.edge() / m;
        let qv = g.wavevector(&[1, 0, 0]);
        let lambda: f64 = qv.iter().map(|qi| (2.0 / h * (qi * h / 2.0).sin()).powi(2)).sum();
        let grid_value = 0.5 * 4.0 * PI / (g.volume() * lambda);
        let value = coulomb_coefficient(&[1, 0, 0], &g, &t).unwrap();
        assert_relative_eq!(value, grid_value, max_relative = 1e-6);
        assert_relative_eq!(value, 1.0 / (4.0 * PI * PI), max_relative = 1e-15);
    }

    #[test]
    fn current_current_vanishing_cases() {
        let g = geom();
        let (t, u) = (CouplingToggles::default(), UnitSystem::default());
        // k ⟂ p and q ⟂ k
        assert_eq!(current_current_coefficient(&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &g, &t, &u).unwrap(), 0.0);
        // k ∥ q
        let v = current_current_coefficient(&[2, 2, 0], &[1, -3, 2], &[1, 1, 0], &g, &t, &u).unwrap();
        assert!(v.abs() < 1e-18);
        assert_eq!(
            current_current_coefficient(&[1, 0, 0], &[0, 1, 0], &[0, 0, 0], &g, &t, &u),
            Err(Error::ExcludedTransfer)
        );
    }

    /// Independent route: contract k and p through the projector matrix I − q̂q̂.
    fn projector_oracle(k: &IVec3, p: &IVec3, q: &IVec3, g: &BoxGeometry, t: &CouplingToggles, u: &UnitSystem) -> f64 {
        let (kv, pv, qv) = (g.wavevector(k), g.wavevector(p), g.wavevector(q));
        let qh = qv.normalize();
        let proj = Mat3::identity() - qh * qh.transpose();
        let jj = (kv.transpose() * proj * pv)[(0, 0)];
        let coupling = (t.charge * u.hbar / (t.mass * u.c)).powi(2);
        -coupling * 2.0 * PI / (g.volume() * qv.norm_squared()) * jj
    }

    fn lattice(range: i32) -> impl Strategy<Value = IVec3> {
        [-range..=range, -range..=range, -range..=range]
    }

    proptest! {
        #[test]
        fn current_current_matches_projector(k in lattice(3), p in lattice(3), q in lattice(3), edge in 0.5f64..5.0) {
            prop_assume!(q != [0, 0, 0]);
            let g = BoxGeometry::new(edge).unwrap();
            let t = CouplingToggles { charge: -1.3, mass: 0.8, ..Default::default() };
            let u = UnitSystem::new(7.0, 1.1).unwrap();
            let direct = current_current_coefficient(&k, &p, &q, &g, &t, &u).unwrap();
            let oracle = projector_oracle(&k, &p, &q, &g, &t, &u);
            let norm = |v: &IVec3| v.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
            let unit = projector_oracle(&[1, 0, 0], &[1, 0, 0], &q, &g, &t, &u).abs().max(
                projector_oracle(&[0, 1, 0], &[0, 1, 0], &q, &g, &t, &u).abs());
            let natural = unit * norm(&k) * norm(&p);
            prop_assert!((direct - oracle).abs() <= 1e-12 * natural.max(1e-300));

            // (k, p, q) and (p, k, −q) describe the same process.
            let swapped = current_current_coefficient(&p, &k, &[-q[0], -q[1], -q[2]], &g, &t, &u).unwrap();
            prop_assert!((direct - swapped).abs() <= 1e-14 * direct.abs().max(1e-300));

            // Longitudinal k drops out for every p.
            let kpar = [2 * q[0], 2 * q[1], 2 * q[2]];
            let v = current_current_coefficient(&kpar, &p, &q, &g, &t, &u).unwrap();
            prop_assert!(v.abs() <= 1e-12 * 2.0 * unit * norm(&p).max(1.0) * norm(&q));
        }
    }
}
