use std::f64::consts::PI;

use cgauge_core::classical::Mat3;
use cgauge_core::fock::{
    assemble_hamiltonian, diagonalize, enumerate_sector_basis, BoxGeometry, CouplingToggles, EigenOptions,
    IVec3, SectorBasis, SectorSpec, SolverMethod, SymmetricMatrix, DEFAULT_CAPACITY,
};
use cgauge_core::{Error, UnitSystem};
use nalgebra::{DMatrix, SymmetricEigen, Vector3};

fn geom() -> BoxGeometry {
    BoxGeometry::new(2.0 * PI).unwrap()
}

fn sector(spec: SectorSpec, n_max: u32) -> SectorBasis {
    enumerate_sector_basis(&geom(), n_max, spec, DEFAULT_CAPACITY).unwrap()
}

fn spectrum(h: &SymmetricMatrix) -> Vec<f64> {
    diagonalize(h, &EigenOptions::default()).unwrap().eigenvalues
}

#[test]
fn hamiltonians_are_exactly_symmetric() {
    let u = UnitSystem::new(4.0, 1.0).unwrap();
    for spec in [SectorSpec::new(2, [0, 0, 0], 0), SectorSpec::new(3, [1, 0, 0], 1), SectorSpec::unrestricted(2)] {
        let b = sector(spec, 1);
        let h = assemble_hamiltonian(&b, &CouplingToggles::default(), &u).unwrap();
        for i in 0..h.dim() {
            for &(j, v) in h.row(i) {
                assert_eq!(v.to_bits(), h.get(j, i).to_bits());
            }
        }
    }
}

#[test]
fn fewer_than_two_particles_never_interact() {
    let u = UnitSystem::new(1.0, 1.0).unwrap();
    let strong = CouplingToggles { charge: 5.0, ..Default::default() };
    for n in [0, 1] {
        let b = sector(SectorSpec::unrestricted(n), 2);
        let h = assemble_hamiltonian(&b, &strong, &u).unwrap();
        assert_eq!(h.max_off_diagonal(), 0.0);
        let bare = assemble_hamiltonian(&b, &CouplingToggles::kinetic_only(), &u).unwrap();
        assert_eq!(h, bare);
    }
}

#[test]
fn interactions_conserve_momentum_and_spin() {
    let b = sector(SectorSpec::unrestricted(2), 1);
    let h = assemble_hamiltonian(&b, &CouplingToggles::default(), &UnitSystem::new(2.0, 1.0).unwrap()).unwrap();
    let mut couplings = 0;
    for i in 0..h.dim() {
        for &(j, _) in h.row(i) {
            let (a, c) = (&b.states()[i], &b.states()[j]);
            assert_eq!(a.total_momentum(), c.total_momentum());
            assert_eq!(a.two_sz(), c.two_sz());
            couplings += usize::from(i != j);
        }
    }
    assert!(couplings > 0);

    // Each sector block of the unrestricted matrix equals the sector matrix.
    let spec = SectorSpec::new(2, [1, 0, 0], 0);
    let s = sector(spec, 1);
    let hs = assemble_hamiltonian(&s, &CouplingToggles::default(), &UnitSystem::new(2.0, 1.0).unwrap()).unwrap();
    let map: Vec<usize> = s.states().iter().map(|st| b.index_of(st).unwrap()).collect();
    for (i, &bi) in map.iter().enumerate() {
        for (j, &bj) in map.iter().enumerate() {
            assert!((hs.get(i, j) - h.get(bi, bj)).abs() <= 1e-15 * h.norm_inf());
        }
    }
}

#[test]
fn global_spin_flip_preserves_spectrum() {
    let u = UnitSystem::new(3.0, 1.0).unwrap();
    for (n, p, sz) in [(2, [1, 0, 0], 2), (3, [0, 1, 0], 1), (3, [1, 1, 0], 3)] {
        let up = spectrum(&assemble_hamiltonian(&sector(SectorSpec::new(n, p, sz), 1), &CouplingToggles::default(), &u).unwrap());
        let down = spectrum(&assemble_hamiltonian(&sector(SectorSpec::new(n, p, -sz), 1), &CouplingToggles::default(), &u).unwrap());
        assert_eq!(up.len(), down.len());
        for (a, b) in up.iter().zip(&down) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}

/// Spin-orbital for the first-quantized oracle.
#[derive(Clone, Copy, PartialEq)]
struct Orbital {
    n: IVec3,
    up: bool,
}

fn wave(n: &IVec3) -> Vector3<f64> {
    geom().wavevector(n)
}

/// Two-body matrix element `⟨c d| v |a b⟩` with particle 1 going `a → c`
/// and particle 2 going `b → d`; the current coupling uses the midpoint
/// currents of each leg contracted through `I − q̂q̂`.
fn two_body(c: Orbital, d: Orbital, a: Orbital, b: Orbital, t: &CouplingToggles, u: &UnitSystem) -> f64 {
    if c.up != a.up || d.up != b.up {
        return 0.0;
    }
    let (kc, kd, ka, kb) = (wave(&c.n), wave(&d.n), wave(&a.n), wave(&b.n));
    if (kc + kd - ka - kb).norm() > 1e-12 {
        return 0.0;
    }
    let q = kc - ka;
    let q2 = q.norm_squared();
    if q2 < 1e-12 {
        return 0.0;
    }
    let omega = geom().volume();
    let mut v = 0.0;
    if t.include_coulomb {
        v += 4.0 * PI * t.charge * t.charge / (omega * q2);
    }
    if t.include_current_current {
        let qh = q / q2.sqrt();
        let proj = Mat3::identity() - qh * qh.transpose();
        let j1 = (ka + kc) * (t.charge * u.hbar / (2.0 * t.mass));
        let j2 = (kb + kd) * (t.charge * u.hbar / (2.0 * t.mass));
        v -= 4.0 * PI / (u.c * u.c * omega * q2) * j1.dot(&(proj * j2));
    }
    v
}

/// Dense two-particle Hamiltonian on antisymmetrized pairs, built without
/// any Fock-space machinery.
fn first_quantized_spectrum(n_max: u32, momentum: IVec3, two_sz: i32, t: &CouplingToggles, u: &UnitSystem) -> Vec<f64> {
    let m = n_max as i32;
    let mut orbitals = Vec::new();
    for x in -m..=m {
        for y in -m..=m {
            for z in -m..=m {
                orbitals.push(Orbital { n: [x, y, z], up: false });
                orbitals.push(Orbital { n: [x, y, z], up: true });
            }
        }
    }
    let mut pairs = Vec::new();
    for i in 0..orbitals.len() {
        for j in i + 1..orbitals.len() {
            let (a, b) = (orbitals[i], orbitals[j]);
            let p = [a.n[0] + b.n[0], a.n[1] + b.n[1], a.n[2] + b.n[2]];
            let sz = if a.up { 1 } else { -1 } + if b.up { 1 } else { -1 };
            if p == momentum && sz == two_sz {
                pairs.push((a, b));
            }
        }
    }
    let kinetic = |o: Orbital| u.hbar * u.hbar * wave(&o.n).norm_squared() / (2.0 * t.mass);
    let dim = pairs.len();
    let h = DMatrix::from_fn(dim, dim, |r, s| {
        let (c, d) = pairs[r];
        let (a, b) = pairs[s];
        let mut v = two_body(c, d, a, b, t, u) - two_body(c, d, b, a, t, u);
        if r == s {
            v += kinetic(a) + kinetic(b);
        }
        v
    });
    let mut e: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn two_particle_spectra_match_first_quantized_oracle() {
    let toggles = [
        CouplingToggles::coulomb_only(),
        CouplingToggles::default(),
        CouplingToggles { include_coulomb: false, ..CouplingToggles::default() },
        CouplingToggles { charge: -1.7, mass: 0.6, ..CouplingToggles::default() },
    ];
    let units = [UnitSystem::new(1.5, 1.0).unwrap(), UnitSystem::new(0.7, 1.3).unwrap()];
    for t in &toggles {
        for u in &units {
            for (p, sz) in [([0, 0, 0], 0), ([1, 0, 0], 0), ([0, 0, 0], 2), ([1, -1, 0], -2), ([1, 1, 1], 0)] {
                let b = sector(SectorSpec::new(2, p, sz), 1);
                let fock = spectrum(&assemble_hamiltonian(&b, t, u).unwrap());
                let oracle = first_quantized_spectrum(1, p, sz, t, u);
                assert_eq!(fock.len(), oracle.len());
                let scale = oracle.iter().fold(1.0f64, |m, e| m.max(e.abs()));
                for (a, o) in fock.iter().zip(&oracle) {
                    assert!((a - o).abs() <= 1e-12 * scale, "{a} vs {o}");
                }
            }
        }
    }
}

#[test]
fn current_current_shift_scales_as_inverse_c_squared() {
    let b = sector(SectorSpec::new(2, [0, 0, 0], 0), 1);
    let shift = |c: f64| {
        let u = UnitSystem::new(c, 1.0).unwrap();
        let full = spectrum(&assemble_hamiltonian(&b, &CouplingToggles::default(), &u).unwrap());
        let coulomb = spectrum(&assemble_hamiltonian(&b, &CouplingToggles::coulomb_only(), &u).unwrap());
        full.iter().zip(&coulomb).map(|(a, c)| (a - c).abs()).sum::<f64>()
    };
    for c in [10.0, 137.036] {
        let ratio = shift(c) / shift(2.0 * c);
        assert!((ratio - 4.0).abs() <= 0.04, "c = {c}: ratio {ratio}");
    }
}

#[test]
fn large_sectors_use_lanczos() {
    let b = sector(SectorSpec::new(3, [0, 0, 0], 1), 1);
    let h = assemble_hamiltonian(&b, &CouplingToggles::default(), &UnitSystem::default()).unwrap();
    let dense = diagonalize(&h, &EigenOptions::default()).unwrap();
    let opts = EigenOptions { dense_threshold: 50, ..Default::default() };
    let iter = diagonalize(&h, &opts).unwrap();
    assert!(b.dim() > 50);
    assert_eq!(iter.method, SolverMethod::Lanczos);
    assert!((iter.ground_energy() - dense.ground_energy()).abs() <= 1e-9 * h.norm_inf());
    assert!(iter.residual <= 1e-10 * h.norm_inf());
}

#[test]
fn capacity_is_enforced() {
    let err = enumerate_sector_basis(&geom(), 1, SectorSpec::unrestricted(2), 100).unwrap_err();
    assert_eq!(err, Error::Capacity { cap: 100 });
}
