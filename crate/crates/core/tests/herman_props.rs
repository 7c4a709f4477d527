use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use ringlab_core::cfrac::{abc_sequence_number, compute_a_n, convergents, value, CFExpansion};
use ringlab_core::herman::{
    find_ring_seed, invariant_curve_newton, mcmullen_area_bound, ring_modulus, ring_orbit, winding_rotation_number,
    CurveInit, NewtonOptions, Window,
};
use ringlab_core::circle::{Birkhoff, ConvergentAccelerated};
use ringlab_core::maps::CubicHermanMap;
use ringlab_core::numkit::PrecisionContext;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn ring_map() -> CubicHermanMap {
    CubicHermanMap::new(Complex64::new(2.0, 0.1), Complex64::new(-3.98404183, 3.28819628)).unwrap()
}

fn ring_seed(map: &CubicHermanMap) -> Complex64 {
    find_ring_seed(map, Window::new(Complex64::new(-3.0, -3.0), Complex64::new(3.0, 3.0)), 3600).unwrap().seed
}

#[test]
fn curves_from_two_seeds_on_one_ring_agree_after_gauge() {
    let map = ring_map();
    let seed = ring_seed(&map);
    let later = *ring_orbit(&map, seed, 137).unwrap().last().unwrap();
    let opts = NewtonOptions { tol: 1e-10, ..Default::default() };
    let solve = |s| invariant_curve_newton(&map, GOLDEN, CurveInit::Orbit { seed: s, points: 100_000 }, 256, &opts).unwrap();
    let (a, b) = (solve(seed), solve(later));
    for j in 0..64 {
        let theta = j as f64 / 64.0;
        let d = (a.curve.eval(theta) - b.curve.eval(theta)).norm();
        assert!(d < 1e-7, "theta {theta}: {d}");
    }
}

#[test]
fn winding_estimators_agree_on_the_ring() {
    let map = ring_map();
    let seed = ring_seed(&map);
    let b = winding_rotation_number(&map, seed, 100_000, &Birkhoff).unwrap();
    let c = winding_rotation_number(&map, seed, 100_000, &ConvergentAccelerated).unwrap();
    assert!(b.lift_ok && c.lift_ok);
    let d = (b.value - c.value).rem_euclid(1.0);
    assert!(d.min(1.0 - d) <= b.error_bound + c.error_bound, "{} vs {}", b.value, c.value);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn area_bound_shrinks(m in 1e-3f64..5.0, depth in 1u32..40, area in 0.0f64..10.0) {
        let here = mcmullen_area_bound(m, depth, area).unwrap();
        prop_assert!(here <= area);
        prop_assert!(mcmullen_area_bound(m, depth + 1, area).unwrap() <= here);
        prop_assert!(mcmullen_area_bound(1.5 * m, depth, area).unwrap() <= here);
    }

    #[test]
    fn ring_modulus_decreases_with_radius(ra in 0.1f64..2.0, f in 0.01f64..0.98) {
        let r = f * ra;
        let m = ring_modulus(ra, r).unwrap();
        prop_assert!(m > 0.0);
        prop_assert!(ring_modulus(ra, r * 1.01).unwrap() < m);
    }

    #[test]
    fn abc_numbers_approach_alpha(
        prefix in prop::collection::vec(1u64..6, 0..4),
        period in prop::collection::vec(1u64..6, 1..3),
        n in 1usize..7,
        num in 11u32..40,
    ) {
        let alpha = CFExpansion::periodic(0, &prefix, &period).unwrap();
        let ratio = BigRational::new(num.into(), 10.into());
        let q_n: BigUint = convergents(&alpha, n).unwrap().q(n).clone();
        let a_n = compute_a_n(&ratio, &q_n).unwrap();
        let alpha_n = abc_sequence_number(&alpha, n, &a_n, 1).unwrap();
        let ctx = PrecisionContext::new(256).unwrap();
        let x = value(&alpha, ctx).unwrap().to_f64();
        let y = value(&alpha_n, ctx).unwrap().to_f64();
        let q = num_traits::ToPrimitive::to_f64(&q_n).unwrap();
        prop_assert!((x - y).abs() < 1.0 / (q * q), "n {}: |{} - {}| vs 1/q^2 = {}", n, x, y, 1.0 / (q * q));
    }
}
