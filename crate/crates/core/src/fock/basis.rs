use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::lattice::{sub, within_cutoff, BoxGeometry, IVec3, Mode, Spin};
use super::state::FockState;
use crate::error::{Error, Result};

pub const DEFAULT_CAPACITY: usize = 20_000;

/// Sector labels; `None` leaves a quantum number unrestricted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub particles: usize,
    pub momentum: Option<IVec3>,
    /// Twice the spin projection, `Σσ`.
    pub two_sz: Option<i32>,
}

impl SectorSpec {
    pub fn new(particles: usize, momentum: IVec3, two_sz: i32) -> Self {
        Self { particles, momentum: Some(momentum), two_sz: Some(two_sz) }
    }

    pub fn unrestricted(particles: usize) -> Self {
        Self { particles, momentum: None, two_sz: None }
    }

    fn accepts(&self, state: &FockState) -> bool {
        self.momentum.is_none_or(|p| state.total_momentum() == p)
            && self.two_sz.is_none_or(|s| state.two_sz() == s)
    }
}

/// Deterministically ordered Fock states of one sector.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    pub geometry: BoxGeometry,
    pub n_max: u32,
    pub spec: SectorSpec,
    states: Vec<FockState>,
    index: HashMap<FockState, usize>,
}

impl SectorBasis {
    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, state: &FockState) -> Option<usize> {
        self.index.get(state).copied()
    }

    /// All single-particle modes inside the cutoff, canonical order.
    pub fn modes(&self) -> Vec<Mode> {
        single_particle_modes(&self.geometry, self.n_max)
    }
}

fn single_particle_modes(geom: &BoxGeometry, n_max: u32) -> Vec<Mode> {
    geom.lattice(n_max)
        .into_iter()
        .flat_map(|n| [Mode::new(n, Spin::Down), Mode::new(n, Spin::Up)])
        .collect()
}

/// Enumerates every Pauli-allowed `N`-mode configuration inside the cutoff
/// that matches `spec`, in lexicographic order of the sorted mode lists.
pub fn enumerate_sector_basis(
    geom: &BoxGeometry,
    n_max: u32,
    spec: SectorSpec,
    capacity: usize,
) -> Result<SectorBasis> {
    let modes = single_particle_modes(geom, n_max);
    let mut states = Vec::new();
    let mut chosen: Vec<Mode> = Vec::with_capacity(spec.particles);
    let mut walker = Walker { modes: &modes, spec, n_max, capacity, out: &mut states };
    walker.descend(0, &mut chosen)?;
    let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    Ok(SectorBasis { geometry: *geom, n_max, spec, states, index })
}

struct Walker<'a> {
    modes: &'a [Mode],
    spec: SectorSpec,
    n_max: u32,
    capacity: usize,
    out: &'a mut Vec<FockState>,
}

impl Walker<'_> {
    fn push(&mut self, chosen: &[Mode]) -> Result<()> {
        let state = FockState::from_modes(chosen).expect("strictly increasing modes").1;
        if self.spec.accepts(&state) {
            if self.out.len() == self.capacity {
                return Err(Error::Capacity { cap: self.capacity });
            }
            self.out.push(state);
        }
        Ok(())
    }

    fn descend(&mut self, start: usize, chosen: &mut Vec<Mode>) -> Result<()> {
        let remaining = self.spec.particles - chosen.len();
        if remaining == 0 {
            return self.push(chosen);
        }
        // With a momentum constraint the last mode's lattice point is fixed.
        if remaining == 1 {
            if let Some(p) = self.spec.momentum {
                let partial = chosen.iter().fold([0; 3], |acc, m| super::lattice::add(&acc, &m.n));
                let n = sub(&p, &partial);
                if !within_cutoff(&n, self.n_max) {
                    return Ok(());
                }
                for spin in [Spin::Down, Spin::Up] {
                    let m = Mode::new(n, spin);
                    if chosen.last().is_none_or(|last| *last < m) {
                        chosen.push(m);
                        self.push(chosen)?;
                        chosen.pop();
                    }
                }
                return Ok(());
            }
        }
        for i in start..self.modes.len() {
            if self.modes.len() - i < remaining {
                break;
            }
            chosen.push(self.modes[i]);
            self.descend(i + 1, chosen)?;
            chosen.pop();
        }
        Ok(())
    }
}
