//! Rotation numbers of circle maps given as restrictions of rational maps.

mod estimators;
mod solve;

pub use estimators::{cf_denominators, Birkhoff, ConvergentAccelerated, EstimatorRegistry, RotationEstimator};
pub use solve::{real_rotation, scan_rotation, solve_param_for_rotation, write_scan_csv, ScanRow, SolveOptions, SolveReport};

use std::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

use crate::maps::HoloMap;

/// Largest tolerated `||f(z)| - 1|` on the unit circle.
pub const INVARIANCE_TOL: f64 = 1e-9;
/// Fewest iterations accepted by [`rotation_number`].
pub const MIN_ITERATIONS: usize = 1000;

const TABLE_SIZE: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircleError {
    #[error("unit circle not invariant at step {step}: ||f(z)| - 1| = {residual:e}")]
    InvarianceViolation { step: usize, residual: f64 },
    #[error("lift jump {jump} at step {step}")]
    LiftJump { step: usize, jump: f64 },
    #[error("restriction to the circle has degree {0}, expected 1")]
    NotDegreeOne(i64),
    #[error("need at least {need} iterations, got {have}")]
    TooFewIterations { need: usize, have: usize },
    #[error("target {target} is rational; its mode-locking plateau is [{left}, {right}]")]
    RationalTarget { target: f64, left: f64, right: f64 },
    #[error("rotation number decreases between t = {t0} and t = {t1}")]
    NonMonotone { t0: f64, t1: f64 },
    #[error("target {0} outside (0, 1)")]
    TargetOutOfRange(f64),
    #[error("unknown rotation estimator `{0}`")]
    UnknownEstimator(String),
    #[error("invalid family: {0}")]
    InvalidFamily(String),
}

/// Which rule produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMethod {
    Birkhoff,
    ConvergentAccelerated,
    Other(&'static str),
}

impl EstimateMethod {
    pub fn from_name(name: &'static str) -> Self {
        match name {
            "birkhoff" => Self::Birkhoff,
            "convergent_accelerated" => Self::ConvergentAccelerated,
            other => Self::Other(other),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Birkhoff => "birkhoff",
            Self::ConvergentAccelerated => "convergent_accelerated",
            Self::Other(s) => s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationEstimate {
    /// In `[0, 1)`.
    pub value: f64,
    pub error_bound: f64,
    pub iterations: usize,
    pub method: EstimateMethod,
}

impl RotationEstimate {
    pub fn from_slope(slope: f64, error_bound: f64, iterations: usize, method: EstimateMethod) -> Self {
        let mut value = slope.rem_euclid(1.0);
        if value >= 1.0 {
            value = 0.0;
        }
        Self { value, error_bound, iterations, method }
    }

    /// Distance on the circle `R/Z`.
    pub fn distance_to(&self, x: f64) -> f64 {
        let d = (self.value - x).rem_euclid(1.0);
        d.min(1.0 - d)
    }
}

/// Lifted angles `theta_0, theta_1, ...` in turns.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedOrbit {
    thetas: Vec<f64>,
}

impl LiftedOrbit {
    pub fn from_lift(thetas: Vec<f64>) -> Self {
        Self { thetas }
    }

    pub fn theta_0(&self) -> f64 {
        self.thetas[0]
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn steps(&self) -> usize {
        self.thetas.len().saturating_sub(1)
    }

    /// Applies a lift of a circle diffeomorphism to every angle.
    pub fn reparameterize(&self, h: impl Fn(f64) -> f64) -> Self {
        Self { thetas: self.thetas.iter().map(|&t| h(t)).collect() }
    }
}

/// Continuous displacement `D(theta) = F(theta) - theta` of a lift `F`,
/// tabulated with `D(0)` in `[0, 1)`.
#[derive(Debug, Clone)]
pub struct DisplacementTable {
    values: Vec<f64>,
    shift: f64,
}

fn turns(z: Complex64) -> f64 {
    z.arg() / TAU
}

fn on_circle(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * theta.rem_euclid(1.0))
}

impl DisplacementTable {
    pub fn new(map: &dyn HoloMap) -> Result<Self, CircleError> {
        let mut values = Vec::with_capacity(TABLE_SIZE + 1);
        let mut prev = 0.0;
        for j in 0..=TABLE_SIZE {
            let theta = j as f64 / TABLE_SIZE as f64;
            let z = on_circle(theta);
            let w = map.eval(z).finite().ok_or(CircleError::InvarianceViolation { step: 0, residual: f64::INFINITY })?;
            let d = turns(w / z);
            let v = if j == 0 { d.rem_euclid(1.0) } else { d + (prev - d).round() };
            values.push(v);
            prev = v;
        }
        let wrap = values[TABLE_SIZE] - values[0];
        if wrap.abs() > 0.25 {
            return Err(CircleError::NotDegreeOne(1 + wrap.round() as i64));
        }
        Ok(Self { values, shift: 0.0 })
    }

    /// Table for `e(t) f` given the table of `f`.
    pub fn shifted(&self, t: f64) -> Self {
        Self { values: self.values.clone(), shift: self.shift + t }
    }

    /// Interpolated continuous displacement at `theta`.
    pub fn at(&self, theta: f64) -> f64 {
        let x = theta.rem_euclid(1.0) * TABLE_SIZE as f64;
        let j = (x.floor() as usize).min(TABLE_SIZE - 1);
        let f = x - j as f64;
        self.values[j] * (1.0 - f) + self.values[j + 1] * f + self.shift
    }
}

/// `max ||f(e^{i theta})| - 1|` over `samples` equally spaced angles.
pub fn invariance_residual(map: &dyn HoloMap, samples: usize) -> f64 {
    (0..samples.max(1))
        .map(|j| match map.eval(on_circle(j as f64 / samples.max(1) as f64)).finite() {
            Some(w) => (w.norm() - 1.0).abs(),
            None => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

/// Lifted orbit of `theta0` by nearest-branch continuation against `table`.
pub fn lift_orbit(map: &dyn HoloMap, table: &DisplacementTable, theta0: f64, n: usize) -> Result<LiftedOrbit, CircleError> {
    let mut thetas = Vec::with_capacity(n + 1);
    let mut theta = theta0;
    let mut z = on_circle(theta0);
    thetas.push(theta);
    for step in 1..=n {
        let w = map.eval(z).finite().ok_or(CircleError::InvarianceViolation { step, residual: f64::INFINITY })?;
        let residual = (w.norm() - 1.0).abs();
        if !(residual <= INVARIANCE_TOL) {
            return Err(CircleError::InvarianceViolation { step, residual });
        }
        let reference = table.at(theta);
        let d = turns(w / z);
        let inc = d + (reference - d).round();
        let jump = (inc - reference).abs();
        if jump > 0.5 {
            return Err(CircleError::LiftJump { step, jump });
        }
        theta += inc;
        thetas.push(theta);
        z = w / w.norm();
    }
    Ok(LiftedOrbit { thetas })
}

/// Rotation number of a circle-preserving map from the orbit of `e(theta0)`.
pub fn rotation_number(
    map: &dyn HoloMap,
    theta0: f64,
    n_iter: usize,
    estimator: &dyn RotationEstimator,
) -> Result<RotationEstimate, CircleError> {
    if n_iter < MIN_ITERATIONS {
        return Err(CircleError::TooFewIterations { need: MIN_ITERATIONS, have: n_iter });
    }
    let table = DisplacementTable::new(map)?;
    let orbit = lift_orbit(map, &table, theta0, n_iter)?;
    let (slope, err) = estimator.estimate(&orbit)?;
    Ok(RotationEstimate::from_slope(slope, err, n_iter, EstimateMethod::from_name(estimator.name())))
}
