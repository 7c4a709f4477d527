use std::f64::consts::TAU;
use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use ringlab_core::cfrac::CFExpansion;
use ringlab_core::numkit::PrecisionContext;
use ringlab_core::siegel::{
    classify_orbit_lm, conformal_radius_estimate, invert_linearizer, linearizer_coeffs, FateStatus, LinearizerSeries,
    SubdiskTable,
};

fn golden() -> &'static LinearizerSeries {
    static S: OnceLock<LinearizerSeries> = OnceLock::new();
    S.get_or_init(|| {
        let cf: CFExpansion = "0;[1]".parse().unwrap();
        linearizer_coeffs(&cf, 400, PrecisionContext::new(256).unwrap()).unwrap()
    })
}

#[test]
fn functional_equation_holds_inside_half_radius() {
    for alpha in ["0;[1]", "0;[2]", "0;3,[1,2]"] {
        let cf: CFExpansion = alpha.parse().unwrap();
        let series = linearizer_coeffs(&cf, 400, PrecisionContext::new(256).unwrap()).unwrap();
        let r = conformal_radius_estimate(&series).unwrap().value;
        for s in [0.1, 0.3, 0.5] {
            let res = series.functional_residual(s * r, 256);
            assert!(res < 1e-12, "alpha {alpha}, s {s}: residual {res}");
        }
    }
}

#[test]
fn conjugate_series_solves_the_mirrored_equation() {
    let conj = golden().conjugate().unwrap();
    assert!((conj.lambda() - golden().lambda().conj()).norm() < 1e-15);
    let r = golden().radius_estimate();
    assert!(conj.functional_residual(0.5 * r, 256) < 1e-12);
    assert!((conj.radius_estimate() - r).abs() < 1e-12);
}

#[test]
fn fate_counts_move_monotonically_with_budget() {
    let series = golden();
    let rho = 0.5 * series.radius_estimate();
    let grid: Vec<Complex64> = (0..24)
        .flat_map(|i| (0..24).map(move |j| Complex64::new(-1.2 + 0.1 * i as f64, -1.2 + 0.1 * j as f64)))
        .collect();
    let count = |k_max: usize| {
        let mut c = [0usize; 3];
        for &z in &grid {
            match classify_orbit_lm(series, z, rho, k_max).unwrap().status {
                FateStatus::Escaped => c[0] += 1,
                FateStatus::EnteredSubdisk => c[1] += 1,
                FateStatus::Undecided => c[2] += 1,
            }
        }
        c
    };
    let (low, high) = (count(20), count(400));
    assert_eq!(low.iter().sum::<usize>(), grid.len());
    assert_eq!(high.iter().sum::<usize>(), grid.len());
    assert!(high[0] >= low[0] && high[1] >= low[1] && high[2] <= low[2], "{low:?} -> {high:?}");
    assert!(high[0] > 0 && high[1] > 0);
}

#[test]
fn subdisk_table_agrees_with_inversion() {
    let series = golden();
    let rho = 0.5 * series.radius_estimate();
    let table = SubdiskTable::new(series, rho, 4096).unwrap();
    for j in 0..64 {
        let theta = TAU * j as f64 / 64.0;
        let inside = series.eval(Complex64::from_polar(0.95 * rho, theta));
        let outside = series.eval(Complex64::from_polar(1.05 * rho, theta));
        assert!(table.contains(inside));
        assert!(!table.contains(outside));
        assert!(invert_linearizer(series, inside, rho).unwrap().is_some());
        assert!(invert_linearizer(series, outside, rho).unwrap().is_none());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decided_fates_are_stable(re in -1.5f64..1.5, im in -1.5f64..1.5, k in 1usize..200) {
        let series = golden();
        let rho = 0.5 * series.radius_estimate();
        let z = Complex64::new(re, im);
        let short = classify_orbit_lm(series, z, rho, k).unwrap();
        let long = classify_orbit_lm(series, z, rho, 2 * k + 50).unwrap();
        prop_assert!(long.steps >= short.steps);
        if short.status != FateStatus::Undecided {
            prop_assert_eq!(short, long);
        }
    }

    #[test]
    fn inversion_round_trip(r in 0.0f64..0.45, th in 0.0f64..1.0) {
        let series = golden();
        let rho = 0.5 * series.radius_estimate();
        let zeta = Complex64::from_polar(r * series.radius_estimate(), TAU * th);
        let z = series.eval(zeta);
        let back = invert_linearizer(series, z, rho).unwrap().expect("inside the sub-disk");
        prop_assert!((back - zeta).norm() < 1e-10);
    }
}
