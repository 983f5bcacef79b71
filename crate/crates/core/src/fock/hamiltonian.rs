use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::SectorBasis;
use super::coefficients::{coulomb_coefficient, current_current_coefficient, CouplingToggles};
use super::lattice::{sub, within_cutoff, Mode};
use super::state::{apply_pair_operator, FockState};
use crate::classical::Vec3;
use crate::error::{Error, Result};
use crate::units::UnitSystem;

/// Real symmetric matrix stored as sorted sparse rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    rows: Vec<Vec<(usize, f64)>>,
}

impl SymmetricMatrix {
    /// Builds from accumulated entries, replacing each pair `(i, j)`, `(j, i)`
    /// by their mean so the result is exactly symmetric.
    pub(crate) fn from_entries(dim: usize, entries: Vec<BTreeMap<usize, f64>>) -> Self {
        let mut sym: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); dim];
        for (i, row) in entries.iter().enumerate() {
            for (&j, &v) in row {
                // Each slot receives at most two halves; two-term sums commute exactly.
                *sym[i].entry(j).or_insert(0.0) += 0.5 * v;
                *sym[j].entry(i).or_insert(0.0) += 0.5 * v;
            }
        }
        let rows = sym.into_iter().map(|r| r.into_iter().filter(|(_, v)| *v != 0.0).collect()).collect();
        Self { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.rows[i];
        row.binary_search_by_key(&j, |e| e.0).map(|k| row[k].1).unwrap_or(0.0)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i)).collect()
    }

    pub fn nonzeros(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Largest absolute off-diagonal entry.
    pub fn max_off_diagonal(&self) -> f64 {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().filter(move |(j, _)| *j != i).map(|(_, v)| v.abs()))
            .fold(0.0, f64::max)
    }

    /// Max absolute row sum, an upper bound on the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        self.rows.iter().map(|r| r.iter().map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().map(|&(j, v)| v * x[j]).sum()).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Copy with the diagonal replaced.
    pub fn with_diagonal(&self, diag: &[f64]) -> Self {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut cols: BTreeMap<usize, f64> = r.iter().copied().collect();
                cols.insert(i, diag[i]);
                cols.into_iter().filter(|(_, v)| *v != 0.0).collect()
            })
            .collect();
        Self { rows }
    }
}

/// External vector potential; only the uniform case is supported.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorPotential {
    Uniform([f64; 3]),
    PlaneWave { amplitude: [f64; 3], wavevector: [i32; 3] },
}

impl VectorPotential {
    pub fn uniform(&self) -> Result<Vec3> {
        match self {
            Self::Uniform(a) => Ok(Vec3::from(*a)),
            Self::PlaneWave { .. } => {
                Err(Error::Unsupported("only uniform external vector potentials are supported".into()))
            }
        }
    }
}

/// `Σ ħ²k²/2m` over the occupied modes of every basis state.
pub fn kinetic_diagonal(basis: &SectorBasis, toggles: &CouplingToggles, u: &UnitSystem) -> Vec<f64> {
    substituted_kinetic(basis, Vec3::zeros(), toggles, u)
}

/// Kinetic diagonal after `ħk → ħk − (e/c)A` for a uniform `A`.
pub fn minimal_substitution(
    basis: &SectorBasis,
    field: &VectorPotential,
    toggles: &CouplingToggles,
    u: &UnitSystem,
) -> Result<Vec<f64>> {
    let a = field.uniform()?;
    Ok(substituted_kinetic(basis, a, toggles, u))
}

fn substituted_kinetic(basis: &SectorBasis, a: Vec3, toggles: &CouplingToggles, u: &UnitSystem) -> Vec<f64> {
    let shift = a * (toggles.charge / u.c);
    basis
        .states()
        .iter()
        .map(|s| {
            s.modes()
                .iter()
                .map(|m| (basis.geometry.wavevector(&m.n) * u.hbar - shift).norm_squared() / (2.0 * toggles.mass))
                .sum()
        })
        .collect()
}

/// Kinetic plus normal-ordered pair interactions on a sector basis.
pub fn assemble_hamiltonian(
    basis: &SectorBasis,
    toggles: &CouplingToggles,
    u: &UnitSystem,
) -> Result<SymmetricMatrix> {
    toggles.validate()?;
    let diag = kinetic_diagonal(basis, toggles, u);
    assemble(basis, toggles, u, diag)
}

/// As [`assemble_hamiltonian`] with a minimally coupled kinetic term. The
/// interaction coefficients are left unchanged.
pub fn assemble_with_field(
    basis: &SectorBasis,
    toggles: &CouplingToggles,
    u: &UnitSystem,
    field: &VectorPotential,
) -> Result<SymmetricMatrix> {
    toggles.validate()?;
    let diag = minimal_substitution(basis, field, toggles, u)?;
    assemble(basis, toggles, u, diag)
}

fn assemble(basis: &SectorBasis, toggles: &CouplingToggles, u: &UnitSystem, diag: Vec<f64>) -> Result<SymmetricMatrix> {
    if basis.dim() == 0 {
        return Err(Error::InvalidParameter("empty basis".into()));
    }
    let interacting = toggles.include_coulomb || toggles.include_current_current;
    let columns: Vec<Vec<(usize, f64)>> = basis
        .states()
        .par_iter()
        .map(|s| if interacting { column(basis, s, toggles, u) } else { Ok(Vec::new()) })
        .collect::<Result<_>>()?;

    let mut entries: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); basis.dim()];
    for (i, d) in diag.into_iter().enumerate() {
        entries[i].insert(i, d);
    }
    for (col, terms) in columns.into_iter().enumerate() {
        for (row, v) in terms {
            *entries[row].entry(col).or_insert(0.0) += v;
        }
    }
    Ok(SymmetricMatrix::from_entries(basis.dim(), entries))
}

/// Nonzero results of every pair term acting on `state`, as `(row, value)`.
fn column(basis: &SectorBasis, state: &FockState, toggles: &CouplingToggles, u: &UnitSystem) -> Result<Vec<(usize, f64)>> {
    let geom = &basis.geometry;
    let lattice = geom.lattice(basis.n_max);
    let occupied = state.modes();
    let mut out = Vec::new();
    // The first annihilated leg is k − q (spin σ), the second p + q (spin σ').
    for first in occupied {
        for second in occupied {
            if first == second {
                continue;
            }
            for kn in &lattice {
                let q = sub(kn, &first.n);
                if q == [0, 0, 0] {
                    continue;
                }
                let pn = sub(&second.n, &q);
                if !within_cutoff(&pn, basis.n_max) {
                    continue;
                }
                let k = Mode::new(*kn, first.spin);
                let p = Mode::new(pn, second.spin);
                let Some((sign, target)) = apply_pair_operator(state, k, p, q) else {
                    continue;
                };
                let Some(row) = basis.index_of(&target) else {
                    continue;
                };
                let mut coef = 0.0;
                if toggles.include_coulomb {
                    coef += coulomb_coefficient(&q, geom, toggles)?;
                }
                if toggles.include_current_current {
                    coef += current_current_coefficient(kn, &pn, &q, geom, toggles, u)?;
                }
                out.push((row, sign * coef));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::fock::basis::{enumerate_sector_basis, SectorSpec, DEFAULT_CAPACITY};
    use crate::fock::lattice::BoxGeometry;

    fn basis(spec: SectorSpec, n_max: u32) -> SectorBasis {
        let g = BoxGeometry::new(2.0 * PI).unwrap();
        enumerate_sector_basis(&g, n_max, spec, DEFAULT_CAPACITY).unwrap()
    }

    #[test]
    fn single_particle_sector_is_kinetic_only() {
        let b = basis(SectorSpec::unrestricted(1), 1);
        let h = assemble_hamiltonian(&b, &CouplingToggles::default(), &UnitSystem::default()).unwrap();
        assert_eq!(h.max_off_diagonal(), 0.0);
        assert_eq!(h.diagonal(), kinetic_diagonal(&b, &CouplingToggles::default(), &UnitSystem::default()));
        // L = 2π makes k = n, so the kinetic energy is |n|²/2.
        for (s, d) in b.states().iter().zip(h.diagonal()) {
            let n = s.modes()[0].n;
            assert_eq!(d, n.iter().map(|x| (x * x) as f64).sum::<f64>() / 2.0);
        }
    }

    #[test]
    fn toggles_off_give_diagonal_matrix() {
        let b = basis(SectorSpec::new(2, [0, 0, 0], 0), 1);
        let h = assemble_hamiltonian(&b, &CouplingToggles::kinetic_only(), &UnitSystem::default()).unwrap();
        assert_eq!(h.max_off_diagonal(), 0.0);
        let h = assemble_hamiltonian(&b, &CouplingToggles::default(), &UnitSystem::default()).unwrap();
        assert!(h.max_off_diagonal() > 0.0);
    }

    #[test]
    fn matrix_is_exactly_symmetric() {
        let b = basis(SectorSpec::new(3, [1, 0, 0], 1), 1);
        let u = UnitSystem::new(3.0, 1.0).unwrap();
        let h = assemble_hamiltonian(&b, &CouplingToggles::default(), &u).unwrap();
        for i in 0..h.dim() {
            for &(j, v) in h.row(i) {
                assert_eq!(v, h.get(j, i));
            }
        }
        let dense = h.to_dense();
        assert_eq!(dense, dense.transpose());
        let x: Vec<f64> = (0..h.dim()).map(|i| (i as f64 * 0.37).sin()).collect();
        let y = h.matvec(&x);
        let yd = &dense * nalgebra::DVector::from_vec(x);
        for (a, b) in y.iter().zip(yd.iter()) {
            assert!((a - b).abs() <= 1e-12 * h.norm_inf());
        }
    }

    #[test]
    fn uniform_field_shifts_kinetic_diagonal() {
        let b = basis(SectorSpec::unrestricted(1), 1);
        let t = CouplingToggles::default();
        let u = UnitSystem::new(2.0, 1.0).unwrap();
        let a = 0.3;
        let field = VectorPotential::Uniform([a, 0.0, 0.0]);
        let shifted = minimal_substitution(&b, &field, &t, &u).unwrap();
        let plain = kinetic_diagonal(&b, &t, &u);
        for ((s, x), y) in b.states().iter().zip(&shifted).zip(&plain) {
            let kx = s.modes()[0].n[0] as f64;
            let expected = ((kx - a / 2.0).powi(2) - kx * kx) / 2.0;
            assert!((x - y - expected).abs() < 1e-14);
        }
        let zero = minimal_substitution(&b, &VectorPotential::Uniform([0.0; 3]), &t, &u).unwrap();
        assert_eq!(zero, plain);
        let neutral = CouplingToggles { charge: 0.0, ..t };
        assert_eq!(minimal_substitution(&b, &field, &neutral, &u).unwrap(), kinetic_diagonal(&b, &neutral, &u));
    }

    #[test]
    fn field_leaves_interaction_untouched() {
        let b = basis(SectorSpec::new(2, [0, 0, 0], 0), 1);
        let (t, u) = (CouplingToggles::default(), UnitSystem::new(5.0, 1.0).unwrap());
        let plain = assemble_hamiltonian(&b, &t, &u).unwrap();
        let field = assemble_with_field(&b, &t, &u, &VectorPotential::Uniform([0.2, -0.1, 0.4])).unwrap();
        for i in 0..b.dim() {
            for &(j, v) in plain.row(i) {
                if i != j {
                    assert_eq!(v, field.get(i, j));
                }
            }
        }
        let same = assemble_with_field(&b, &t, &u, &VectorPotential::Uniform([0.0; 3])).unwrap();
        assert_eq!(same, plain);
    }

    #[test]
    fn plane_wave_field_is_unsupported() {
        let b = basis(SectorSpec::unrestricted(1), 0);
        let field = VectorPotential::PlaneWave { amplitude: [1.0, 0.0, 0.0], wavevector: [0, 0, 1] };
        assert!(matches!(
            minimal_substitution(&b, &field, &CouplingToggles::default(), &UnitSystem::default()),
            Err(Error::Unsupported(_))
        ));
    }
}
