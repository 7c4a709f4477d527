use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use super::{
    lift_orbit, rotation_number, Birkhoff, CircleError, ConvergentAccelerated, DisplacementTable, RotationEstimate,
    RotationEstimator,
};
use crate::cfrac::{value, CFExpansion};
use crate::maps::BlaschkeMap;
use crate::numkit::PrecisionContext;

#[derive(Clone)]
pub struct SolveOptions {
    /// Grid points in `[0, 1]` for the monotonicity scan.
    pub coarse_points: usize,
    pub coarse_iterations: usize,
    /// Iterations per bisection step.
    pub iterations: usize,
    pub estimator: Arc<dyn RotationEstimator>,
    pub theta0: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            coarse_points: 64,
            coarse_iterations: 4000,
            iterations: 100_000,
            estimator: Arc::new(ConvergentAccelerated),
            theta0: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// In `[0, 1)`.
    pub t: f64,
    /// Final bisection bracket in lift coordinates.
    pub bracket: (f64, f64),
    pub rotation: RotationEstimate,
    /// Circle distance between the measured rotation number and the target.
    pub residual: f64,
    pub bisection_steps: usize,
}

/// Unreduced rotation number of the lift `F_0 + t` of `e(t) f_0`, with its error bound.
pub fn real_rotation(
    a: f64,
    base: &DisplacementTable,
    t: f64,
    n_iter: usize,
    theta0: f64,
    estimator: &dyn RotationEstimator,
) -> Result<(f64, f64), CircleError> {
    let f = BlaschkeMap::new(t.rem_euclid(1.0), a).map_err(|e| CircleError::InvalidFamily(e.to_string()))?;
    let table = base.shifted(t);
    let orbit = lift_orbit(&f, &table, theta0, n_iter)?;
    estimator.estimate(&orbit)
}

fn base_table(a: f64) -> Result<DisplacementTable, CircleError> {
    let f0 = BlaschkeMap::new(0.0, a).map_err(|e| CircleError::InvalidFamily(e.to_string()))?;
    DisplacementTable::new(&f0)
}

/// Smallest `t` in `[lo, hi]` where `pred` turns true, for monotone `pred`.
fn bisect_edge(mut lo: f64, mut hi: f64, steps: usize, mut pred: impl FnMut(f64) -> Result<bool, CircleError>) -> Result<f64, CircleError> {
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The parameter `t` with `rho(f_t) = alpha` for the family `e(t) z^2 (z - a)/(1 - a z)`.
///
/// Rational targets are refused; the error carries the mode-locking plateau
/// `[left, right]` of the target in lift coordinates, so the plateau around
/// `0` is reported as `[-w, w]`.
pub fn solve_param_for_rotation(a: f64, alpha: &CFExpansion, tol: f64, opts: &SolveOptions) -> Result<SolveReport, CircleError> {
    let base = base_table(a)?;
    let target = value(alpha, PrecisionContext::double()).map_err(|e| CircleError::InvalidFamily(e.to_string()))?.to_f64();
    let r0 = real_rotation(a, &base, 0.0, opts.coarse_iterations, opts.theta0, &Birkhoff)?.0;

    if alpha.is_rational() {
        let n = opts.coarse_iterations.max(20_000);
        let eps = 2.0 / n as f64;
        let lifted = target + (r0 - target + 0.5).floor();
        let rho = |t: f64| real_rotation(a, &base, t, n, opts.theta0, &Birkhoff).map(|r| r.0);
        let left = bisect_edge(-1.0, 1.0, 40, |t| Ok(rho(t)? >= lifted - eps))?;
        let right = bisect_edge(-1.0, 1.0, 40, |t| Ok(rho(t)? > lifted + eps))?;
        return Err(CircleError::RationalTarget { target, left, right });
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(CircleError::TargetOutOfRange(target));
    }

    let p = opts.coarse_points.max(2);
    let coarse: Vec<(f64, f64, f64)> = (0..=p)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 / p as f64;
            real_rotation(a, &base, t, opts.coarse_iterations, opts.theta0, &Birkhoff).map(|(s, e)| (t, s, e))
        })
        .collect::<Result<_, _>>()?;
    for w in coarse.windows(2) {
        if w[1].1 < w[0].1 - (w[0].2 + w[1].2) {
            return Err(CircleError::NonMonotone { t0: w[0].0, t1: w[1].0 });
        }
    }
    let lifted = target + (coarse[0].1 - target).ceil();
    let i = coarse.iter().rposition(|c| c.1 + c.2 < lifted).unwrap_or(0);
    let j = coarse.iter().position(|c| c.1 - c.2 > lifted).unwrap_or(p);
    let (mut lo, mut hi) = (coarse[i].0 - 1.0 / p as f64, coarse[j].0 + 1.0 / p as f64);

    let est = opts.estimator.as_ref();
    let mut steps = 0;
    while hi - lo > 1e-15 && steps < 200 {
        steps += 1;
        let mid = 0.5 * (lo + hi);
        let (s, e) = real_rotation(a, &base, mid, opts.iterations, opts.theta0, est)?;
        if (s - lifted).abs() < 0.25 * tol && e < 0.25 * tol {
            lo = mid;
            hi = mid;
            break;
        }
        if s < lifted {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = (0.5 * (lo + hi)).rem_euclid(1.0);
    let f = BlaschkeMap::new(t, a).map_err(|e| CircleError::InvalidFamily(e.to_string()))?;
    let rotation = rotation_number(&f, opts.theta0, opts.iterations, est)?;
    Ok(SolveReport { t, bracket: (lo, hi), residual: rotation.distance_to(target), rotation, bisection_steps: steps })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub t: f64,
    /// Unreduced rotation number of the continuous-in-`t` lift.
    pub rho: f64,
    pub error_bound: f64,
}

/// Rotation numbers on `n_t + 1` equally spaced `t` in `[0, 1]`.
pub fn scan_rotation(a: f64, n_t: usize, n_iter: usize, estimator: &dyn RotationEstimator) -> Result<Vec<ScanRow>, CircleError> {
    let base = base_table(a)?;
    (0..=n_t.max(1))
        .into_par_iter()
        .map(|i| {
            let t = i as f64 / n_t.max(1) as f64;
            real_rotation(a, &base, t, n_iter, 0.0, estimator).map(|(rho, error_bound)| ScanRow { t, rho, error_bound })
        })
        .collect()
}

/// CSV rows `t,rho,error_bound`.
pub fn write_scan_csv<W: Write>(rows: &[ScanRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "rho", "error_bound"])?;
    for r in rows {
        w.write_record([r.t.to_string(), r.rho.to_string(), r.error_bound.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_targets_report_plateaus() {
        let opts = SolveOptions::default();
        let zero = CFExpansion::finite(0, &[]).unwrap();
        match solve_param_for_rotation(4.0, &zero, 1e-8, &opts) {
            Err(CircleError::RationalTarget { target, left, right }) => {
                assert_eq!(target, 0.0);
                assert!(left < 0.0 && right > 0.0 && right - left < 0.5, "[{left}, {right}]");
            }
            other => panic!("{other:?}"),
        }
        let half = CFExpansion::finite(0, &[2]).unwrap();
        assert!(matches!(solve_param_for_rotation(4.0, &half, 1e-8, &opts), Err(CircleError::RationalTarget { .. })));
    }

    #[test]
    fn scan_is_monotone() {
        let rows = scan_rotation(4.0, 16, 2000, &Birkhoff).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].rho >= w[0].rho - w[0].error_bound - w[1].error_bound);
        }
        assert!((rows[16].rho - rows[0].rho - 1.0).abs() < 2e-3);
        let mut buf = Vec::new();
        write_scan_csv(&rows[..1], &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("t,rho,error_bound\n0,"));
    }

    #[test]
    fn invalid_family() {
        assert!(matches!(
            solve_param_for_rotation(2.0, &CFExpansion::golden(), 1e-8, &SolveOptions::default()),
            Err(CircleError::InvalidFamily(_))
        ));
    }
}
