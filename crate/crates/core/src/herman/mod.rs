//! Herman-ring diagnostics: ring orbits, winding rotation numbers, invariant
//! curves by a Fourier–Newton solve, modulus arithmetic, the ABC perturbation
//! experiment, repelling-cycle proximity and parameter refinement.

mod abc;
mod curve;
mod proximity;
mod refine;

pub use abc::{abc_experiment, write_abc_csv, AbcReport, AbcRow};
pub use curve::{invariant_curve_newton, CurveInit, FourierCurve, NewtonOptions, NewtonResult};
pub use proximity::{cycle_proximity, Proximity, Side};
pub use refine::{refine_u, RefineOptions, RefineReport};

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::cfrac::CfError;
use crate::circle::{CircleError, EstimateMethod, LiftedOrbit, RotationEstimate, RotationEstimator};
use crate::maps::{HoloMap, MapError};
use crate::siegel::SiegelError;

/// Ring orbits must stay in `RING_INNER < |z| < RING_OUTER`.
pub const RING_INNER: f64 = 1e-6;
pub const RING_OUTER: f64 = 1e6;
/// Iterations a seed orbit must survive.
pub const SEED_ORBIT: usize = 10_000;
const ANGLE_BINS: usize = 16;

#[derive(Debug, Error)]
pub enum HermanError {
    #[error("no candidate orbit stays in the annulus {RING_INNER} < |z| < {RING_OUTER}")]
    NoRingFound,
    #[error("orbit left the annulus at step {step}")]
    OrbitEscape { step: usize },
    #[error("argument increments do not fit one branch (spread {spread})")]
    LiftJump { spread: f64 },
    #[error("small divisor |e(k alpha) - 1| = {value:e} at k = {k}")]
    SmallDivisor { k: i64, value: f64 },
    #[error("Newton iteration stalled at residual {residual:e} after {steps} steps")]
    NoConvergence { steps: usize, residual: f64, best: Box<FourierCurve> },
    #[error("curve does not wind once around the origin (winding {0})")]
    BadWinding(i64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no candidate parameter sustains a ring orbit")]
    SeedLost,
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Circle(#[from] CircleError),
    #[error(transparent)]
    Cf(#[from] CfError),
    #[error(transparent)]
    Siegel(#[from] SiegelError),
}

/// Axis-parallel rectangle of the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub min: Complex64,
    pub max: Complex64,
}

impl Window {
    pub fn new(min: Complex64, max: Complex64) -> Self {
        Self { min, max }
    }

    pub fn centered(center: Complex64, half_width: f64, half_height: f64) -> Self {
        let d = Complex64::new(half_width, half_height);
        Self { min: center - d, max: center + d }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingSeed {
    pub seed: Complex64,
    /// `max ln|z_k| - min ln|z_k|` over the checked orbit.
    pub log_spread: f64,
    pub candidates: usize,
    pub survivors: usize,
}

/// Log-radial spread of a surviving orbit that circles the origin, or `None`.
fn ring_orbit_spread(map: &dyn HoloMap, z0: Complex64, n: usize) -> Option<f64> {
    let mut z = z0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut bins = [false; ANGLE_BINS];
    for _ in 0..n {
        let r = z.norm();
        if !(r > RING_INNER && r < RING_OUTER) {
            return None;
        }
        let l = r.ln();
        lo = lo.min(l);
        hi = hi.max(l);
        let b = ((z.arg() + PI) / TAU * ANGLE_BINS as f64) as usize;
        bins[b.min(ANGLE_BINS - 1)] = true;
        z = map.step(z);
    }
    // orbits attracted to cycles visit few directions
    (bins.iter().filter(|&&b| b).count() >= ANGLE_BINS - 2).then_some(hi - lo)
}

/// Grid search for an orbit of a ring around the origin.
///
/// Every candidate orbit must survive [`SEED_ORBIT`] steps inside the
/// annulus and visit almost every direction about the origin; among the
/// survivors the smallest log-radial spread wins, and a golden-section
/// search along the ray through the winner then reduces the spread further.
pub fn find_ring_seed(map: &dyn HoloMap, window: Window, budget: usize) -> Result<RingSeed, HermanError> {
    if budget < 1000 {
        return Err(HermanError::InvalidArgument(format!("budget {budget} below 1000 candidates")));
    }
    let side = (budget as f64).sqrt().ceil() as usize;
    let span = window.max - window.min;
    let candidates: Vec<Complex64> = (0..side * side)
        .map(|i| {
            let (ix, iy) = (i % side, i / side);
            window.min + Complex64::new(span.re * (ix as f64 + 0.5) / side as f64, span.im * (iy as f64 + 0.5) / side as f64)
        })
        .collect();
    let scored: Vec<(usize, f64)> = candidates
        .par_iter()
        .enumerate()
        .filter_map(|(i, &z)| ring_orbit_spread(map, z, SEED_ORBIT).map(|s| (i, s)))
        .collect();
    let survivors = scored.len();
    let &(best, spread) = scored
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .ok_or(HermanError::NoRingFound)?;
    let (seed, log_spread) = refine_along_ray(map, candidates[best], spread);
    Ok(RingSeed { seed, log_spread, candidates: candidates.len(), survivors })
}

fn refine_along_ray(map: &dyn HoloMap, z: Complex64, spread: f64) -> (Complex64, f64) {
    let f = |s: f64| ring_orbit_spread(map, z * s, SEED_ORBIT).unwrap_or(f64::INFINITY);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((-spread).exp(), spread.exp());
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..40 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let (s, fs) = if fc < fd { (c, fc) } else { (d, fd) };
    if fs < spread {
        (z * s, fs)
    } else {
        (z, spread)
    }
}

/// Rotation number measured by the winding of an orbit about the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub iterations: usize,
    pub center: Complex64,
    pub lift_ok: bool,
    pub method: EstimateMethod,
}

impl WindingEstimate {
    pub fn as_rotation(&self) -> RotationEstimate {
        RotationEstimate { value: self.value, error_bound: self.error_bound, iterations: self.iterations, method: self.method }
    }
}

/// Orbit `z_0..z_n`, failing once it leaves the annulus.
pub fn ring_orbit(map: &dyn HoloMap, seed: Complex64, n: usize) -> Result<Vec<Complex64>, HermanError> {
    let mut orbit = Vec::with_capacity(n + 1);
    let mut z = seed;
    for step in 0..=n {
        let r = z.norm();
        if !(r > RING_INNER && r < RING_OUTER) {
            return Err(HermanError::OrbitEscape { step });
        }
        orbit.push(z);
        if step < n {
            z = map.step(z);
        }
    }
    Ok(orbit)
}

/// Cumulative argument of an orbit about 0 in turns.
///
/// Principal increments are re-centred on their circular mean; the lift is
/// accepted when the re-centred increments span less than 0.9 turns, so no
/// increment can sit on the wrong branch.
pub fn winding_lift(orbit: &[Complex64]) -> Result<LiftedOrbit, HermanError> {
    let incs: Vec<f64> = orbit.windows(2).map(|w| (w[1] / w[0]).arg() / TAU).collect();
    let mean: Complex64 = incs.iter().map(|&d| Complex64::from_polar(1.0, TAU * d)).sum();
    let center = mean.arg() / TAU;
    let mut thetas = Vec::with_capacity(orbit.len());
    let mut theta = orbit[0].arg() / TAU;
    thetas.push(theta);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for d in incs {
        let v = d + (center - d).round();
        lo = lo.min(v);
        hi = hi.max(v);
        theta += v;
        thetas.push(theta);
    }
    let spread = hi - lo;
    if spread >= 0.9 {
        return Err(HermanError::LiftJump { spread });
    }
    Ok(LiftedOrbit::from_lift(thetas))
}

pub fn winding_rotation_number(
    map: &dyn HoloMap,
    seed: Complex64,
    n_iter: usize,
    estimator: &dyn RotationEstimator,
) -> Result<WindingEstimate, HermanError> {
    if n_iter < 10 {
        return Err(HermanError::InvalidArgument("at least 10 iterations required".into()));
    }
    let orbit = ring_orbit(map, seed, n_iter)?;
    let lift = winding_lift(&orbit)?;
    let (slope, error_bound) = estimator.estimate(&lift)?;
    let r = RotationEstimate::from_slope(slope, error_bound, n_iter, EstimateMethod::from_name(estimator.name()));
    Ok(WindingEstimate {
        value: r.value,
        error_bound,
        iterations: n_iter,
        center: Complex64::new(0.0, 0.0),
        lift_ok: true,
        method: r.method,
    })
}

/// `(1/pi) ln(r_alpha / r)`.
pub fn ring_modulus(r_alpha: f64, r: f64) -> Result<f64, HermanError> {
    if !(r > 0.0 && r < r_alpha) {
        return Err(HermanError::InvalidArgument(format!("need 0 < r < r_alpha, got r = {r}, r_alpha = {r_alpha}")));
    }
    Ok((r_alpha / r).ln() / PI)
}

/// `initial_area * (1 + 4 pi mod)^(-depth)`.
pub fn mcmullen_area_bound(modulus: f64, depth: u32, initial_area: f64) -> Result<f64, HermanError> {
    if !(modulus > 0.0) || depth == 0 || !(initial_area >= 0.0) {
        return Err(HermanError::InvalidArgument("need modulus > 0, depth >= 1, area >= 0".into()));
    }
    Ok(initial_area * (1.0 + 4.0 * PI * modulus).powi(-(depth as i32)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{Birkhoff, ConvergentAccelerated};
    use crate::maps::{CubicHermanMap, RigidRotation};

    const GOLDEN: f64 = 0.618_033_988_749_894_9;

    pub(crate) fn ring_map() -> CubicHermanMap {
        CubicHermanMap::new(Complex64::new(2.0, 0.1), Complex64::new(-3.98404183, 3.28819628)).unwrap()
    }

    #[test]
    fn modulus_arithmetic() {
        assert!((ring_modulus(2.0, 2.0 / PI.exp()).unwrap() - 1.0).abs() < 1e-15);
        assert!((ring_modulus(0.39, 0.30).unwrap() - 1.3f64.ln() / PI).abs() < 1e-15);
        assert!((ring_modulus(0.39, 0.30).unwrap() - 0.0835).abs() < 1e-4);
        assert!(ring_modulus(1.0, 1.0 - 1e-12).unwrap() > 0.0);
        assert!(ring_modulus(1.0, 1.5).is_err());
    }

    #[test]
    fn area_bound_arithmetic() {
        assert!((mcmullen_area_bound(1.0, 1, 1.0).unwrap() - 1.0 / (1.0 + 4.0 * PI)).abs() < 1e-15);
        assert!(mcmullen_area_bound(1.0, 50, 1.0).unwrap() < 1e-12);
        assert!(mcmullen_area_bound(0.0, 1, 1.0).is_err());
        assert!(mcmullen_area_bound(0.5, 3, 1.0).unwrap() > mcmullen_area_bound(0.5, 4, 1.0).unwrap());
        assert!(mcmullen_area_bound(0.5, 3, 1.0).unwrap() > mcmullen_area_bound(0.6, 3, 1.0).unwrap());
    }

    #[test]
    fn synthetic_rotation_winding() {
        let r = RigidRotation::new(GOLDEN);
        let n = 5000;
        let w = winding_rotation_number(&r, Complex64::new(0.5, 0.0), n, &Birkhoff).unwrap();
        assert!((w.value - GOLDEN).abs() < 1.0 / n as f64);
        assert_eq!(w.center, Complex64::new(0.0, 0.0));
        assert!(w.lift_ok);
    }

    #[test]
    fn golden_ring_is_found() {
        let q = ring_map();
        let seed = find_ring_seed(&q, Window::new(Complex64::new(-3.0, -3.0), Complex64::new(3.0, 3.0)), 3600).unwrap();
        let w = winding_rotation_number(&q, seed.seed, 200_000, &ConvergentAccelerated).unwrap();
        assert!((w.value - GOLDEN).abs() < 1e-3, "{w:?}");
    }

    #[test]
    fn doubled_parameter_has_no_ring() {
        let q = CubicHermanMap::new(Complex64::new(2.0, 0.1), 2.0 * Complex64::new(-3.98404183, 3.28819628)).unwrap();
        let r = find_ring_seed(&q, Window::new(Complex64::new(-3.0, -3.0), Complex64::new(3.0, 3.0)), 3600);
        assert!(matches!(r, Err(HermanError::NoRingFound)), "{r:?}");
    }

    #[test]
    fn escaping_orbit_is_an_error() {
        let q = ring_map();
        assert!(matches!(
            winding_rotation_number(&q, Complex64::new(50.0, 0.0), 100, &Birkhoff),
            Err(HermanError::OrbitEscape { .. })
        ));
    }
}
