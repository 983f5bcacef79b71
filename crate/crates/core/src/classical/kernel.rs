use serde::{Deserialize, Serialize};

use super::hamiltonian::ModelKind;
use super::{pair_unit_vector, Mat3, Vec3};
use crate::error::Result;

/// Which variable the inner gradient of the transverse bracket acts on.
///
/// Reading the inner `∇` as a derivative with respect to the source position
/// `r_j` instead of the integration point flips the sign of the integral
/// correction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientReading {
    #[default]
    IntegrationPoint,
    Source,
}

impl GradientReading {
    /// Sign multiplying `−(1/4π)∫…` relative to the integration-point reading.
    pub(crate) fn sign(self) -> f64 {
        match self {
            GradientReading::IntegrationPoint => 1.0,
            GradientReading::Source => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            GradientReading::IntegrationPoint => "integration_point",
            GradientReading::Source => "source",
        }
    }
}

/// Rotationally symmetric pair tensor `T = a·I + b·n̂n̂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairKernel {
    pub tensor: Mat3,
    /// Coefficient of the identity.
    pub a: f64,
    /// Coefficient of `n̂⊗n̂`.
    pub b: f64,
    pub separation: f64,
    pub direction: Vec3,
}

impl PairKernel {
    pub fn from_coefficients(a: f64, b: f64, direction: Vec3, separation: f64) -> Self {
        let tensor = Mat3::identity() * a + direction * direction.transpose() * b;
        Self { tensor, a, b, separation, direction }
    }

    /// Projects a general tensor onto `a·I + b·n̂n̂` (after symmetrizing).
    ///
    /// `a` comes from the transverse trace and `b` from the longitudinal
    /// entry `n̂·T·n̂`. The original tensor is kept as is.
    pub fn from_tensor(tensor: Mat3, direction: Vec3, separation: f64) -> Self {
        let sym = (tensor + tensor.transpose()) * 0.5;
        let longitudinal = direction.dot(&(sym * direction));
        let a = 0.5 * (sym.trace() - longitudinal);
        let b = longitudinal - a;
        Self { tensor: sym, a, b, separation, direction }
    }

    pub fn reconstruct(&self) -> Mat3 {
        Mat3::identity() * self.a + self.direction * self.direction.transpose() * self.b
    }

    /// Largest entrywise deviation between the stored tensor and `a·I + b·n̂n̂`.
    pub fn reconstruction_error(&self) -> f64 {
        (self.tensor - self.reconstruct()).abs().max()
    }

    /// `u·T·v`.
    pub fn contract(&self, u: &Vec3, v: &Vec3) -> f64 {
        u.dot(&(self.tensor * v))
    }
}

/// Dimensionless `(α, β)` with `T = (α·I + β·n̂n̂)/R` for each closed form.
pub(crate) fn closed_coefficients(kind: ModelKind, reading: GradientReading) -> (f64, f64) {
    match kind {
        ModelKind::CoulombOnly => (0.0, 0.0),
        ModelKind::Darwin | ModelKind::TransverseProjection => (0.5, 0.5),
        // I/R − (1/4π)∫|r−x|⁻¹∂∂|x|⁻¹ = I/R + s·(I − n̂n̂)/(2R), s the reading sign.
        ModelKind::TransverseLiteral => {
            let s = reading.sign();
            (1.0 + 0.5 * s, -0.5 * s)
        }
    }
}

/// Closed-form pair tensor for separation `r = r_i − r_j`.
///
/// Darwin and the projected transverse reading give `(I + n̂n̂)/(2R)`; the
/// literal transverse bracket (inner gradient at the integration point)
/// evaluates to `(3I − n̂n̂)/(2R)`. `CoulombOnly` has no 1/c² kernel.
pub fn kernel_closed(kind: ModelKind, reading: GradientReading, r: &Vec3) -> Result<PairKernel> {
    let n = pair_unit_vector(r, &Vec3::zeros())?;
    let big_r = r.norm();
    let (alpha, beta) = closed_coefficients(kind, reading);
    Ok(PairKernel::from_coefficients(alpha / big_r, beta / big_r, n, big_r))
}
