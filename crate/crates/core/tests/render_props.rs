use num_complex::Complex64;
use proptest::prelude::*;
use ringlab_core::maps::{CubicHermanMap, HoloMap, QuadraticSiegelMap};
use ringlab_core::render::{
    area_from_raster, classify_dynamical, classify_parameter, encode_image, orbit_fate, ClassificationRaster, Fate,
    Palette, PixelCode, RasterSpec,
};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn julia_spec(max_iter: u32) -> RasterSpec {
    RasterSpec::new(Complex64::new(-0.3, 0.0), 3.2, 2.6, 96, 80, max_iter).unwrap()
}

#[test]
fn rasters_do_not_depend_on_thread_count() {
    let map = QuadraticSiegelMap::new(0.618_033_988_749_894_9);
    let spec = julia_spec(300);
    let one = in_pool(1, || classify_dynamical(&map, &spec).unwrap());
    let many = in_pool(6, || classify_dynamical(&map, &spec).unwrap());
    assert_eq!(one, many);
    let pspec = RasterSpec::new(Complex64::new(0.0, 0.0), 10.0, 10.0, 48, 48, 200).unwrap();
    let a = Complex64::new(2.0, 0.1);
    assert_eq!(in_pool(1, || classify_parameter(a, &pspec).unwrap()), in_pool(5, || classify_parameter(a, &pspec).unwrap()));
}

#[test]
fn raising_max_iter_only_resolves_bounded_pixels() {
    let map = CubicHermanMap::new(Complex64::new(2.0, 0.1), Complex64::new(-3.98404183, 3.28819628)).unwrap();
    let spec = RasterSpec::new(Complex64::new(0.0, 0.0), 6.0, 6.0, 80, 80, 50).unwrap();
    let low = classify_dynamical(&map, &spec).unwrap();
    let high = classify_dynamical(&map, &RasterSpec { max_iter: 400, ..spec }).unwrap();
    for (l, h) in low.codes.iter().zip(&high.codes) {
        match l {
            PixelCode::Orbit(Fate::BoundedOther) => {}
            decided => assert_eq!(decided, h),
        }
    }
    let bounded = |r: &ClassificationRaster| r.count(|c| *c == PixelCode::Orbit(Fate::BoundedOther));
    assert!(bounded(&high) <= bounded(&low));
}

#[test]
fn escaping_pixels_really_escape() {
    let map = QuadraticSiegelMap::new(0.3);
    let spec = julia_spec(200);
    let raster = classify_dynamical(&map, &spec).unwrap();
    for iy in 0..spec.ny {
        for ix in 0..spec.nx {
            let z0 = spec.pixel_center(ix, iy);
            match raster.code(ix, iy) {
                PixelCode::Orbit(Fate::ToInfinity(k)) => {
                    let mut z = z0;
                    for _ in 0..k {
                        z = map.step(z);
                    }
                    assert!(!z.is_finite() || z.norm() > spec.escape_out);
                }
                _ => assert!(z0.norm() <= 2.0, "{z0} cannot stay bounded"),
            }
        }
    }
}

#[test]
fn image_has_one_pixel_per_code() {
    let map = QuadraticSiegelMap::new(0.3);
    let raster = classify_dynamical(&map, &julia_spec(100)).unwrap();
    let mut buf = Vec::new();
    encode_image(&raster, &Palette::standard(), &mut buf).unwrap();
    let header = b"P6\n96 80\n255\n";
    assert_eq!(&buf[..header.len()], header);
    assert_eq!(buf.len(), header.len() + 3 * 96 * 80);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fate_iteration_counts_are_prefix_stable(re in -2.5f64..2.5, im in -2.5f64..2.5, m in 1u32..300) {
        let map = QuadraticSiegelMap::new(0.618_033_988_749_894_9);
        let spec = julia_spec(m);
        let z = Complex64::new(re, im);
        let short = orbit_fate(&map, z, &spec);
        let long = orbit_fate(&map, z, &RasterSpec { max_iter: m + 100, ..spec });
        if short != Fate::BoundedOther {
            prop_assert_eq!(short, long);
        }
    }

    #[test]
    fn area_is_pixel_count_times_pixel_area(nx in 4usize..40, ny in 4usize..40) {
        let map = QuadraticSiegelMap::new(0.2);
        let spec = RasterSpec::new(Complex64::new(0.0, 0.0), 4.0, 4.0, nx, ny, 60).unwrap();
        let raster = classify_dynamical(&map, &spec).unwrap();
        let est = area_from_raster(&raster, |c| !matches!(c, PixelCode::Orbit(Fate::ToInfinity(_))), None);
        prop_assert!((est.value - est.pixel_count as f64 * 16.0 / (nx * ny) as f64).abs() < 1e-12);
        prop_assert!(est.value <= 16.0);
    }
}
