use super::Vec3;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Particle {
    pub mass: f64,
    pub charge: f64,
    pub position: Vec3,
    pub momentum: Vec3,
}

impl Particle {
    pub fn new(mass: f64, charge: f64, position: [f64; 3], momentum: [f64; 3]) -> Self {
        Self {
            mass,
            charge,
            position: Vec3::from(position),
            momentum: Vec3::from(momentum),
        }
    }
}

/// Phase-space configuration of classical point charges.
///
/// Masses are strictly positive and no two positions coincide.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticleSet {
    particles: Vec<Particle>,
}

impl ParticleSet {
    pub fn new(particles: Vec<Particle>) -> Result<Self> {
        for (i, p) in particles.iter().enumerate() {
            if !(p.mass.is_finite() && p.mass > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "particle {i}: mass must be positive, got {}",
                    p.mass
                )));
            }
            let finite = p.charge.is_finite()
                && p.position.iter().all(|x| x.is_finite())
                && p.momentum.iter().all(|x| x.is_finite());
            if !finite {
                return Err(Error::InvalidParameter(format!("particle {i}: non-finite entry")));
            }
        }
        for i in 0..particles.len() {
            for j in 0..i {
                if particles[i].position == particles[j].position {
                    return Err(Error::Degenerate(format!(
                        "particles {j} and {i} share the same position"
                    )));
                }
            }
        }
        Ok(Self { particles })
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn get(&self, i: usize) -> &Particle {
        &self.particles[i]
    }

    /// Unordered pairs `(i, j)` with `i > j`, in a fixed order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.len();
        (1..n).flat_map(|i| (0..i).map(move |j| (i, j)))
    }

    pub fn total_momentum(&self) -> Vec3 {
        self.particles.iter().fold(Vec3::zeros(), |acc, p| acc + p.momentum)
    }

    pub fn angular_momentum(&self) -> Vec3 {
        self.particles
            .iter()
            .fold(Vec3::zeros(), |acc, p| acc + p.position.cross(&p.momentum))
    }

    /// Smallest pairwise separation together with the pair attaining it.
    pub fn min_separation(&self) -> Option<(usize, usize, f64)> {
        self.pairs()
            .map(|(i, j)| {
                (i, j, (self.particles[i].position - self.particles[j].position).norm())
            })
            .min_by(|a, b| a.2.total_cmp(&b.2))
    }

    /// Flat phase-space vector `[r_0, p_0, r_1, p_1, ...]`.
    pub fn to_state(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(6 * self.len());
        for p in &self.particles {
            y.extend(p.position.iter());
            y.extend(p.momentum.iter());
        }
        y
    }

    /// Copy of `self` with positions and momenta replaced from a flat state.
    /// Coincidence is not checked; callers integrating dynamics guard
    /// collisions themselves.
    pub fn with_state(&self, y: &[f64]) -> Self {
        assert_eq!(y.len(), 6 * self.len(), "state length mismatch");
        let particles = self
            .particles
            .iter()
            .zip(y.chunks_exact(6))
            .map(|(p, s)| Particle {
                position: Vec3::new(s[0], s[1], s[2]),
                momentum: Vec3::new(s[3], s[4], s[5]),
                ..*p
            })
            .collect();
        Self { particles }
    }

    pub fn translated(&self, d: &Vec3) -> Self {
        let particles = self
            .particles
            .iter()
            .map(|p| Particle { position: p.position + d, ..*p })
            .collect();
        Self { particles }
    }

    /// Applies a common rotation to every position and momentum.
    pub fn rotated(&self, rot: &nalgebra::Rotation3<f64>) -> Self {
        let particles = self
            .particles
            .iter()
            .map(|p| Particle {
                position: rot * p.position,
                momentum: rot * p.momentum,
                ..*p
            })
            .collect();
        Self { particles }
    }
}

/// Unit vector pointing from `r_j` to `r_i`.
pub fn pair_unit_vector(r_i: &Vec3, r_j: &Vec3) -> Result<Vec3> {
    let d = r_i - r_j;
    let norm = d.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::Degenerate("coincident positions".into()));
    }
    Ok(d / norm)
}
