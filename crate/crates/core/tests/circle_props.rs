use std::f64::consts::TAU;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ringlab_core::circle::{
    lift_orbit, rotation_number, scan_rotation, Birkhoff, ConvergentAccelerated, DisplacementTable, EstimatorRegistry,
    RotationEstimator,
};
use ringlab_core::maps::BlaschkeMap;

#[test]
fn rotation_number_ignores_the_starting_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (t, a) in [(0.1, 4.0), (0.42, 5.5), (0.8, 3.5)] {
        let map = BlaschkeMap::new(t, a).unwrap();
        let est: Vec<_> = (0..8)
            .map(|_| rotation_number(&map, rng.random(), 20_000, &ConvergentAccelerated).unwrap())
            .collect();
        let bound = 2.0 * est.iter().map(|e| e.error_bound).fold(0.0, f64::max);
        for e in &est {
            assert!(e.distance_to(est[0].value) <= bound, "t {t}: {} vs {} (bound {bound})", e.value, est[0].value);
        }
    }
}

#[test]
fn rotation_number_is_monotone_in_t() {
    let rows = scan_rotation(4.0, 64, 4000, &Birkhoff).unwrap();
    assert_eq!(rows.len(), 65);
    for w in rows.windows(2) {
        let slack = w[0].error_bound + w[1].error_bound;
        assert!(w[1].rho >= w[0].rho - slack, "t {} -> {}: {} -> {}", w[0].t, w[1].t, w[0].rho, w[1].rho);
    }
    // one full turn of t adds one to the lift
    assert!((rows[64].rho - rows[0].rho - 1.0).abs() < 2.0 * (rows[0].error_bound + rows[64].error_bound));
}

#[test]
fn estimators_agree() {
    let reg = EstimatorRegistry::default();
    let map = BlaschkeMap::new(0.27, 4.0).unwrap();
    let values: Vec<_> = reg
        .names()
        .map(|n| rotation_number(&map, 0.0, 50_000, reg.get(n).unwrap().as_ref()).unwrap())
        .collect();
    assert!(values.len() >= 2);
    for e in &values[1..] {
        assert!(e.distance_to(values[0].value) <= e.error_bound + values[0].error_bound);
    }
    assert!(reg.get("nonexistent").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conjugate_orbits_share_rotation(t in 0.0f64..1.0, a in 3.5f64..8.0, eps in -0.9f64..0.9, theta0 in 0.0f64..1.0) {
        let map = BlaschkeMap::new(t, a).unwrap();
        let table = DisplacementTable::new(&map).unwrap();
        let orbit = lift_orbit(&map, &table, theta0, 20_000).unwrap();
        // a lift of an orientation-preserving circle diffeomorphism
        let h = |x: f64| x + eps * (TAU * x).sin() / TAU;
        let moved = orbit.reparameterize(h);
        for est in [&Birkhoff as &dyn RotationEstimator, &ConvergentAccelerated] {
            let (r0, e0) = est.estimate(&orbit).unwrap();
            let (r1, e1) = est.estimate(&moved).unwrap();
            // the conjugacy shifts partial sums by at most |eps| / 2 pi
            let slack = 2.0 * (eps.abs() / TAU) / orbit.steps() as f64;
            prop_assert!((r0 - r1).abs() <= e0 + e1 + slack, "{} {}: {} vs {}", est.name(), eps, r0, r1);
        }
    }
}
