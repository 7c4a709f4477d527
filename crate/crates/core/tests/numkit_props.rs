use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;
use ringlab_core::numkit::{poly_roots, HpReal, Polynomial, PrecisionContext};

fn unit_disk_coeffs(max_degree: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((0.0f64..1.0, 0.0f64..std::f64::consts::TAU), 2..=max_degree + 1).prop_map(|v| {
        let mut c: Vec<Complex64> = v.into_iter().map(|(r, t)| Complex64::from_polar(r, t)).collect();
        // keep the leading coefficient away from zero so the degree is what was drawn
        let last = c.len() - 1;
        c[last] = Complex64::from_polar(0.5 + 0.5 * c[last].norm(), c[last].arg());
        c
    })
}

fn exact(x: &HpReal) -> BigRational {
    let (m, e) = x.to_dyadic();
    if e >= 0 {
        BigRational::from_integer(m << e as usize)
    } else {
        BigRational::new(m, BigInt::from(1) << (-e) as usize)
    }
}

fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::from(1) << e as usize)
    } else {
        BigRational::new(BigInt::from(1), BigInt::from(1) << (-e) as usize)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn root_residuals_within_bound(c in unit_disk_coeffs(64)) {
        let p = Polynomial::new(c.clone());
        let d = p.degree();
        let roots = poly_roots(&p, PrecisionContext::double()).unwrap();
        prop_assert_eq!(roots.len(), d);
        let scale = p.max_abs_coeff();
        for r in &roots {
            let z = r.to_c64();
            let bound = 1e3 * f64::EPSILON * scale * (1.0 + z.norm()).powi(d as i32);
            prop_assert!(p.eval(z).norm() <= bound, "|p({z})| = {:e} > {bound:e}", p.eval(z).norm());
        }
    }

    #[test]
    fn vieta_sum(c in unit_disk_coeffs(40)) {
        let p = Polynomial::new(c.clone());
        let d = p.degree();
        let roots: Vec<Complex64> = poly_roots(&p, PrecisionContext::double()).unwrap().iter().map(|r| r.to_c64()).collect();
        let sum: Complex64 = roots.iter().sum();
        let expected = -c[d - 1] / c[d];
        let scale: f64 = roots.iter().map(|r| r.norm()).sum::<f64>().max(1.0);
        prop_assert!((sum - expected).norm() <= 1e3 * f64::EPSILON * scale, "{sum} vs {expected}");
    }

    #[test]
    fn products_are_correctly_rounded(a in -1e6f64..1e6, b in -1e6f64..1e6, bits in prop::sample::select(vec![64usize, 128, 192, 256])) {
        let ctx = PrecisionContext::new(bits).unwrap();
        let x = HpReal::from_f64(a, ctx);
        let y = HpReal::from_f64(b, ctx);
        for (got, want) in [
            (&x * &y, exact(&x) * exact(&y)),
            (&x + &y, exact(&x) + exact(&y)),
            (&x - &y, exact(&x) - exact(&y)),
        ] {
            let err = (exact(&got) - want).abs();
            prop_assert!(err <= pow2(got.ulp_exponent() - 1));
        }
    }
}

#[test]
fn known_roots_are_recovered() {
    let want = [Complex64::new(1.0, 0.0), Complex64::new(-2.0, 0.5), Complex64::new(0.0, 3.0)];
    let p = Polynomial::from_roots(&want);
    let got = poly_roots(&p, PrecisionContext::wide()).unwrap();
    for w in want {
        assert!(got.iter().any(|g| (g.to_c64() - w).norm() < 1e-12));
    }
}
