use serde::{Deserialize, Serialize};

use super::kernel::{closed_coefficients, kernel_closed, GradientReading, PairKernel};
use super::quadrature::{kernel_quadrature, QuadratureSettings};
use super::{pair_unit_vector, ParticleSet, Vec3};
use crate::error::{Error, Result};
use crate::units::UnitSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Zeroth order: kinetic plus Coulomb only.
    CoulombOnly,
    /// Darwin pair term `−e_ie_j/(2c²m_im_jR)[p_i·p_j + (p_i·n̂)(p_j·n̂)]`.
    Darwin,
    /// Transverse pair bracket taken as printed, prefactor `e_ie_j/(c²m_im_j)`.
    TransverseLiteral,
    /// Transverse pair term built from the exact transverse projector.
    TransverseProjection,
}

impl ModelKind {
    pub fn label(self) -> &'static str {
        match self {
            ModelKind::CoulombOnly => "coulomb_only",
            ModelKind::Darwin => "darwin",
            ModelKind::TransverseLiteral => "transverse_literal",
            ModelKind::TransverseProjection => "transverse_projection",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMode {
    #[default]
    ClosedForm,
    Quadrature(QuadratureSettings),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianModel {
    pub kind: ModelKind,
    pub kernel_mode: KernelMode,
    /// Only consulted by `TransverseLiteral`.
    pub reading: GradientReading,
}

impl HamiltonianModel {
    pub fn new(kind: ModelKind) -> Self {
        Self { kind, kernel_mode: KernelMode::ClosedForm, reading: GradientReading::default() }
    }

    pub fn coulomb_only() -> Self {
        Self::new(ModelKind::CoulombOnly)
    }

    pub fn darwin() -> Self {
        Self::new(ModelKind::Darwin)
    }

    pub fn transverse_literal() -> Self {
        Self::new(ModelKind::TransverseLiteral)
    }

    pub fn transverse_projection() -> Self {
        Self::new(ModelKind::TransverseProjection)
    }

    pub fn with_reading(self, reading: GradientReading) -> Self {
        Self { reading, ..self }
    }

    pub fn with_quadrature(self, settings: QuadratureSettings) -> Self {
        Self { kernel_mode: KernelMode::Quadrature(settings), ..self }
    }

    /// Pair tensor for separation `r`, from the closed form or quadrature.
    pub fn kernel(&self, r: &Vec3) -> Result<PairKernel> {
        match (self.kind, self.kernel_mode) {
            (ModelKind::TransverseLiteral, KernelMode::Quadrature(settings)) => {
                let settings = QuadratureSettings { reading: self.reading, ..settings };
                Ok(kernel_quadrature(r, &settings)?.kernel)
            }
            _ => kernel_closed(self.kind, self.reading, r),
        }
    }
}

pub fn coulomb_energy(ps: &ParticleSet) -> Result<f64> {
    let mut energy = 0.0;
    for (i, j) in ps.pairs() {
        let (a, b) = (ps.get(i), ps.get(j));
        let dist = (a.position - b.position).norm();
        if dist == 0.0 {
            return Err(Error::Degenerate(format!("particles {i} and {j} coincide")));
        }
        energy += a.charge * b.charge / dist;
    }
    Ok(energy)
}

/// Darwin 1/c² term for the pair `(i, j)`.
pub fn darwin_pair_term(i: usize, j: usize, ps: &ParticleSet, u: &UnitSystem) -> Result<f64> {
    if i == j {
        return Err(Error::InvalidParameter("pair term needs two distinct particles".into()));
    }
    let (a, b) = (ps.get(i), ps.get(j));
    let n = pair_unit_vector(&a.position, &b.position)?;
    let dist = (a.position - b.position).norm();
    let bracket = a.momentum.dot(&b.momentum) + a.momentum.dot(&n) * b.momentum.dot(&n);
    Ok(-a.charge * b.charge / (2.0 * u.c * u.c * a.mass * b.mass * dist) * bracket)
}

/// 1/c² pair term `−e_ie_j/(c²m_im_j) p_i·T·p_j` of a model (zero for Coulomb only).
pub fn pair_energy(
    i: usize,
    j: usize,
    ps: &ParticleSet,
    model: &HamiltonianModel,
    u: &UnitSystem,
) -> Result<f64> {
    match model.kind {
        ModelKind::CoulombOnly => Ok(0.0),
        ModelKind::Darwin => darwin_pair_term(i, j, ps, u),
        ModelKind::TransverseLiteral | ModelKind::TransverseProjection => {
            if i == j {
                return Err(Error::InvalidParameter(
                    "pair term needs two distinct particles".into(),
                ));
            }
            let (a, b) = (ps.get(i), ps.get(j));
            let kernel = model.kernel(&(a.position - b.position))?;
            let kappa = a.charge * b.charge / (u.c * u.c * a.mass * b.mass);
            Ok(-kappa * kernel.contract(&a.momentum, &b.momentum))
        }
    }
}

/// Total energy: kinetic + Coulomb + the model's 1/c² pair sum.
pub fn h_total(ps: &ParticleSet, model: &HamiltonianModel, u: &UnitSystem) -> Result<f64> {
    let kinetic: f64 = ps
        .particles()
        .iter()
        .map(|p| p.momentum.norm_squared() / (2.0 * p.mass))
        .sum();
    let coulomb = coulomb_energy(ps)?;
    let mut magnetic = 0.0;
    if model.kind != ModelKind::CoulombOnly {
        for (i, j) in ps.pairs() {
            magnetic += pair_energy(i, j, ps, model, u)?;
        }
    }
    Ok(kinetic + coulomb + magnetic)
}

/// `∂H/∂r_i` and `∂H/∂p_i` for every particle.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub d_position: Vec<Vec3>,
    pub d_momentum: Vec<Vec3>,
}

/// Analytic phase-space gradients of [`h_total`] (closed-form kernels only).
///
/// With `T = (α I + β n̂n̂)/R` each pair contributes
/// `U = −κ[α p_i·p_j/R + β (p_i·r)(p_j·r)/R³]`, `r = r_i − r_j`.
pub fn gradients(ps: &ParticleSet, model: &HamiltonianModel, u: &UnitSystem) -> Result<Gradients> {
    if let KernelMode::Quadrature(_) = model.kernel_mode {
        return Err(Error::Unsupported(
            "gradients are only defined for closed-form kernels".into(),
        ));
    }
    let (alpha, beta) = closed_coefficients(model.kind, model.reading);
    let c2 = u.c * u.c;
    let mut d_position = vec![Vec3::zeros(); ps.len()];
    let mut d_momentum: Vec<Vec3> =
        ps.particles().iter().map(|p| p.momentum / p.mass).collect();

    for (i, j) in ps.pairs() {
        let (a, b) = (ps.get(i), ps.get(j));
        let r = a.position - b.position;
        let dist = r.norm();
        if dist == 0.0 {
            return Err(Error::Degenerate(format!("particles {i} and {j} coincide")));
        }
        let inv = 1.0 / dist;
        let inv3 = inv * inv * inv;
        let ee = a.charge * b.charge;

        // Coulomb: ∇_r (e_ie_j/R) = −e_ie_j r/R³
        let mut grad_r = -r * (ee * inv3);

        if alpha != 0.0 || beta != 0.0 {
            let kappa = ee / (c2 * a.mass * b.mass);
            let (pi, pj) = (&a.momentum, &b.momentum);
            let s = pi.dot(pj);
            let ui = pi.dot(&r);
            let uj = pj.dot(&r);
            let inv5 = inv3 * inv * inv;
            let grad_f = -r * (alpha * s * inv3) + (pi * uj + pj * ui) * (beta * inv3)
                - r * (3.0 * beta * ui * uj * inv5);
            grad_r -= grad_f * kappa;

            // ∂/∂p_i = −κ T p_j, ∂/∂p_j = −κ T p_i
            let t_pj = pj * (alpha * inv) + r * (beta * uj * inv3);
            let t_pi = pi * (alpha * inv) + r * (beta * ui * inv3);
            d_momentum[i] -= t_pj * kappa;
            d_momentum[j] -= t_pi * kappa;
        }
        d_position[i] += grad_r;
        d_position[j] -= grad_r;
    }
    Ok(Gradients { d_position, d_momentum })
}
