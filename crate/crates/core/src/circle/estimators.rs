use std::collections::BTreeMap;
use std::sync::Arc;

use super::{CircleError, LiftedOrbit};

/// Unreduced rotation estimate `(slope, error_bound)` from a lifted orbit.
pub trait RotationEstimator: Send + Sync {
    fn name(&self) -> &'static str;
    fn estimate(&self, orbit: &LiftedOrbit) -> Result<(f64, f64), CircleError>;
}

/// `(theta_n - theta_0) / n`, accurate to `1/n` for a circle homeomorphism.
#[derive(Debug, Clone, Copy, Default)]
pub struct Birkhoff;

impl RotationEstimator for Birkhoff {
    fn name(&self) -> &'static str {
        "birkhoff"
    }

    fn estimate(&self, orbit: &LiftedOrbit) -> Result<(f64, f64), CircleError> {
        let n = orbit.steps();
        if n == 0 {
            return Err(CircleError::TooFewIterations { need: 1, have: 0 });
        }
        let th = orbit.thetas();
        Ok(((th[n] - th[0]) / n as f64, 1.0 / n as f64))
    }
}

/// Continued-fraction denominators of `x` not exceeding `limit`.
pub fn cf_denominators(x: f64, limit: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut q_prev, mut q) = (0u128, 1u128);
    let mut f = x.rem_euclid(1.0);
    for _ in 0..64 {
        if f < 1e-15 {
            break;
        }
        let inv = 1.0 / f;
        let a = inv.floor();
        f = inv - a;
        let next = (a as u128).saturating_mul(q).saturating_add(q_prev);
        if next > limit as u128 {
            break;
        }
        q_prev = q;
        q = next;
        out.push(q as usize);
    }
    out
}

/// Approximants at the continued-fraction denominators `q` of the running
/// estimate. The value averages `(theta_{s+q} - theta_s) / q` over every
/// start `s` at the largest such `q`; the error bound is the spread of the
/// plain approximants `(theta_q - theta_0) / q` at the last three
/// denominators, which alternate around the limit.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConvergentAccelerated;

impl ConvergentAccelerated {
    fn averaged(th: &[f64], q: usize) -> f64 {
        let n = th.len() - 1;
        let count = n + 1 - q;
        let sum: f64 = (0..count).map(|s| th[s + q] - th[s]).sum();
        sum / (count as f64 * q as f64)
    }
}

impl RotationEstimator for ConvergentAccelerated {
    fn name(&self) -> &'static str {
        "convergent_accelerated"
    }

    fn estimate(&self, orbit: &LiftedOrbit) -> Result<(f64, f64), CircleError> {
        let (raw, raw_err) = Birkhoff.estimate(orbit)?;
        let n = orbit.steps();
        // the averaged window keeps at least half the orbit
        let qs = cf_denominators(raw, n / 2);
        if qs.len() < 3 {
            return Ok((raw, raw_err));
        }
        let th = orbit.thetas();
        let q_last = *qs.last().unwrap();
        let value = Self::averaged(th, q_last);
        let plain: Vec<f64> = qs[qs.len() - 3..].iter().map(|&q| (th[q] - th[0]) / q as f64).collect();
        let hi = plain.iter().copied().fold(value, f64::max);
        let lo = plain.iter().copied().fold(value, f64::min);
        let floor = 8.0 * f64::EPSILON * (th[n] - th[0]).abs().max(1.0) / q_last as f64;
        Ok((value, (hi - lo).max(floor).min(raw_err)))
    }
}

/// Rotation estimators keyed by name.
#[derive(Clone)]
pub struct EstimatorRegistry {
    entries: BTreeMap<&'static str, Arc<dyn RotationEstimator>>,
}

impl EstimatorRegistry {
    pub fn empty() -> Self {
        Self { entries: BTreeMap::new() }
    }

    pub fn register(&mut self, estimator: Arc<dyn RotationEstimator>) {
        self.entries.insert(estimator.name(), estimator);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn RotationEstimator>, CircleError> {
        self.entries.get(name).cloned().ok_or_else(|| CircleError::UnknownEstimator(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }
}

impl Default for EstimatorRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(Birkhoff));
        r.register(Arc::new(ConvergentAccelerated));
        r
    }
}
