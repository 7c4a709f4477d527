use num_complex::Complex64;

use super::{find_ring_seed, winding_rotation_number, HermanError, Window};
use crate::circle::ConvergentAccelerated;
use crate::maps::CubicHermanMap;

#[derive(Debug, Clone, Copy)]
pub struct RefineOptions {
    /// Orbit length per rotation measurement.
    pub iterations: usize,
    /// Where to look for a new ring orbit when the previous seed escapes.
    pub window: Window,
    pub seed_budget: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            iterations: 20_000,
            window: Window::new(Complex64::new(-3.0, -3.0), Complex64::new(3.0, 3.0)),
            seed_budget: 1600,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineReport {
    pub u: Complex64,
    /// `|rho - target|` at `u`, as a circle distance.
    pub residual: f64,
    pub start_residual: f64,
    pub rotation: f64,
    pub seed: Complex64,
    pub evaluations: usize,
    /// The evaluation budget ran out before the step size collapsed.
    pub exhausted: bool,
}

fn circle_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Shrinking compass search over `|u - u_0| <= search_radius` that reduces
/// the distance between the winding rotation number and `target`.
///
/// Best effort: it stops at a local minimum of a noisy objective and makes
/// no claim that the returned `u` is unique or optimal.
pub fn refine_u(
    map: &CubicHermanMap,
    target: f64,
    search_radius: f64,
    budget: usize,
    opts: &RefineOptions,
) -> Result<RefineReport, HermanError> {
    if !(search_radius > 0.0) || budget == 0 {
        return Err(HermanError::InvalidArgument("need a positive radius and budget".into()));
    }
    let a = map.a;
    let u0 = map.u;
    let measure = |u: Complex64, seed: Option<Complex64>| -> Option<(f64, f64, Complex64)> {
        let q = CubicHermanMap::new(a, u).ok()?;
        let try_seed = |s: Complex64| winding_rotation_number(&q, s, opts.iterations, &ConvergentAccelerated).ok();
        if let Some(s) = seed {
            if let Some(w) = try_seed(s) {
                return Some((circle_distance(w.value, target), w.value, s));
            }
        }
        let s = find_ring_seed(&q, opts.window, opts.seed_budget).ok()?.seed;
        try_seed(s).map(|w| (circle_distance(w.value, target), w.value, s))
    };

    let (start_residual, mut rotation, mut seed) = measure(u0, None).ok_or(HermanError::SeedLost)?;
    let mut best = (u0, start_residual);
    let mut evaluations = 1;
    let mut step = search_radius / 4.0;
    let floor = 1e-12 * u0.norm().max(1.0);
    // rings persist only in some directions of the parameter plane, so the compass includes diagonals
    let dirs: Vec<Complex64> = (0..8).map(|j| Complex64::from_polar(1.0, j as f64 * std::f64::consts::FRAC_PI_4)).collect();
    'search: while step > floor {
        let mut moved = false;
        for &d in &dirs {
            if evaluations >= budget {
                break 'search;
            }
            let u = best.0 + d * step;
            if (u - u0).norm() > search_radius {
                continue;
            }
            evaluations += 1;
            if let Some((r, rho, s)) = measure(u, Some(seed)) {
                if r < best.1 {
                    best = (u, r);
                    rotation = rho;
                    seed = s;
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok(RefineReport {
        u: best.0,
        residual: best.1,
        start_residual,
        rotation,
        seed,
        evaluations,
        exhausted: evaluations >= budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    const U: Complex64 = Complex64::new(-3.98404183, 3.28819628);

    fn ring_map(u: Complex64) -> CubicHermanMap {
        CubicHermanMap::new(Complex64::new(2.0, 0.1), u).unwrap()
    }

    #[test]
    fn stays_near_the_start_parameter() {
        let r = refine_u(&ring_map(U), GOLDEN, 1e-4, 12, &RefineOptions::default()).unwrap();
        assert!((r.u - U).norm() <= 1e-4);
        assert!(r.residual <= r.start_residual);
    }

    #[test]
    fn perturbed_start_improves() {
        // the ring survives this perturbation; along the real axis it breaks up
        let start = U + Complex64::from_polar(1e-3, std::f64::consts::FRAC_PI_4);
        let r = refine_u(&ring_map(start), GOLDEN, 2e-3, 24, &RefineOptions::default()).unwrap();
        assert!(r.residual < r.start_residual, "{r:?}");
    }

    #[test]
    fn absurd_target_exhausts_budget() {
        let r = refine_u(&ring_map(U), 0.01, 1e-3, 6, &RefineOptions::default()).unwrap();
        assert!(r.exhausted && r.residual <= r.start_residual);
    }
}
