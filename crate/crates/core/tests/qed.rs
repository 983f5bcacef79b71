use cgauge_core::classical::{Mat3, Vec3};
use cgauge_core::fock::{BoxGeometry, CouplingToggles};
use cgauge_core::qed::{
    direct_amplitude, equivalence_report, photon_exchange_amplitude, polarization_pair, polarization_sum,
    transverse_projector, ExchangeContext,
};
use cgauge_core::UnitSystem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn completeness_over_random_lattice_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let g = BoxGeometry::new(1.7).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = loop {
            let n = [0; 3].map(|_| rng.random_range(-50..=50));
            if n != [0, 0, 0] {
                break n;
            }
        };
        let q = g.wavevector(&n);
        let diff = polarization_sum(&q).unwrap() - transverse_projector(&q).unwrap();
        worst = worst.max(diff.iter().fold(0.0f64, |a, x| a.max(x.abs())));
        let pair = polarization_pair(&q).unwrap();
        assert_eq!(pair, polarization_pair(&-q).unwrap());
    }
    assert!(worst <= 1e-14, "{worst}");
}

#[test]
fn equivalence_holds_across_boxes_and_units() {
    for (edge, c, hbar, charge, mass) in [(1.0, 137.036, 1.0, 1.0, 1.0), (5.0, 3.0, 0.5, -2.0, 0.3), (0.2, 1e4, 2.0, 0.7, 5.0)] {
        let ctx = ExchangeContext::new(
            BoxGeometry::new(edge).unwrap(),
            UnitSystem::new(c, hbar).unwrap(),
            CouplingToggles { charge, mass, ..Default::default() },
        );
        let report = equivalence_report(&ctx, 500, 7).unwrap();
        assert!(report.max_rel_diff <= 1e-10, "{report:?}");
    }
}

#[test]
fn amplitudes_follow_the_transverse_projector() {
    let ctx = ExchangeContext::new(BoxGeometry::new(2.0).unwrap(), UnitSystem::new(2.0, 1.0).unwrap(), CouplingToggles::default());
    let (k, p, q) = ([2, -1, 0], [1, 3, -2], [0, 1, 1]);
    let g = ctx.geometry;
    let proj: Mat3 = transverse_projector(&g.wavevector(&q)).unwrap();
    let (kv, pv): (Vec3, Vec3) = (g.wavevector(&k), g.wavevector(&p));
    let value = photon_exchange_amplitude(&ctx, &k, &p, &q).unwrap().value;
    let expected = -(1.0 / 4.0) * 2.0 * std::f64::consts::PI / (g.volume() * g.wavevector(&q).norm_squared())
        * (kv.transpose() * proj * pv)[(0, 0)];
    assert!((value - expected).abs() <= 1e-12 * expected.abs());
    assert!((direct_amplitude(&ctx, &k, &p, &q).unwrap().value - expected).abs() <= 1e-12 * expected.abs());
}
