use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::classical::Vec3;
use crate::error::{Error, Result};

/// Integer lattice triple labelling a plane wave.
pub type IVec3 = [i32; 3];

/// Cubic periodic box of edge `L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxGeometry {
    edge: f64,
}

impl BoxGeometry {
    pub fn new(edge: f64) -> Result<Self> {
        if !(edge.is_finite() && edge > 0.0) {
            return Err(Error::InvalidParameter(format!("box edge must be positive, got {edge}")));
        }
        Ok(Self { edge })
    }

    pub fn edge(&self) -> f64 {
        self.edge
    }

    pub fn volume(&self) -> f64 {
        self.edge.powi(3)
    }

    /// `k = 2πn/L`.
    pub fn wavevector(&self, n: &IVec3) -> Vec3 {
        Vec3::new(n[0] as f64, n[1] as f64, n[2] as f64) * (2.0 * PI / self.edge)
    }

    /// Lattice points with max-norm `≤ n_max`, lexicographic.
    pub fn lattice(&self, n_max: u32) -> Vec<IVec3> {
        let m = n_max as i32;
        let mut out = Vec::with_capacity((2 * n_max as usize + 1).pow(3));
        for x in -m..=m {
            for y in -m..=m {
                for z in -m..=m {
                    out.push([x, y, z]);
                }
            }
        }
        out
    }
}

pub fn within_cutoff(n: &IVec3, n_max: u32) -> bool {
    n.iter().all(|c| c.unsigned_abs() <= n_max)
}

pub fn add(a: &IVec3, b: &IVec3) -> IVec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: &IVec3, b: &IVec3) -> IVec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Spin projection `σ = ±1`. `Down` orders before `Up`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Spin {
    Down,
    Up,
}

impl Spin {
    pub fn sigma(self) -> i32 {
        match self {
            Spin::Down => -1,
            Spin::Up => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Spin::Down => Spin::Up,
            Spin::Up => Spin::Down,
        }
    }
}

/// Plane-wave spin-orbital. The derived order (lexicographic on `n`, then
/// spin) is the canonical fermionic ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mode {
    pub n: IVec3,
    pub spin: Spin,
}

impl Mode {
    pub fn new(n: IVec3, spin: Spin) -> Self {
        Self { n, spin }
    }
}
