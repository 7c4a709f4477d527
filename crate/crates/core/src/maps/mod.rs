//! Rational map families as evaluable objects on the Riemann sphere.
//!
//! Every family implements [`HoloMap`]; [`MapRegistry`] builds them by name
//! from loosely typed parameters so callers can pick a family at runtime.

mod cycles;
mod families;
mod registry;

pub use cycles::{iterate_rational, periodic_points, CycleRecord, MAX_ITERATE_DEGREE};
pub use families::{
    AntipodalCubic, BlaschkeMap, CubicHermanMap, Monomial, QuadraticSiegelMap, RigidRotation,
};
pub use registry::{parse_complex, MapBuilder, MapParams, MapRegistry};

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::numkit::{NumError, Polynomial};

/// Distance to a pole below which evaluation switches to the reciprocal formula.
pub const POLE_GUARD: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),
    #[error("unknown map family `{0}`")]
    UnknownFamily(String),
    #[error("derivative requested at the pole {0}")]
    PoleDerivative(Complex64),
    #[error("iterate degree {degree} exceeds the root-finder budget {budget}")]
    DegreeOverflow { degree: usize, budget: usize },
    #[error(transparent)]
    Roots(#[from] NumError),
}

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sphere {
    Finite(Complex64),
    Infinity,
}

impl Sphere {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            Sphere::Finite(z) => Some(z),
            Sphere::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Sphere::Infinity)
    }

    /// Chordal distance, bounded by 2.
    pub fn chordal_distance(&self, other: &Sphere) -> f64 {
        match (self, other) {
            (Sphere::Infinity, Sphere::Infinity) => 0.0,
            (Sphere::Finite(z), Sphere::Infinity) | (Sphere::Infinity, Sphere::Finite(z)) => {
                2.0 / (1.0 + z.norm_sqr()).sqrt()
            }
            (Sphere::Finite(a), Sphere::Finite(b)) => {
                2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt())
            }
        }
    }
}

impl From<Complex64> for Sphere {
    fn from(z: Complex64) -> Self {
        if z.is_finite() {
            Sphere::Finite(z)
        } else {
            Sphere::Infinity
        }
    }
}

/// A rational map `N(z) / D(z)` of the sphere.
pub trait HoloMap: fmt::Debug + Send + Sync {
    /// Registry name of the family.
    fn family(&self) -> &'static str;

    /// Canonical `key=value` parameter description.
    fn describe(&self) -> String;

    /// Spherical evaluation; poles map to [`Sphere::Infinity`].
    fn eval(&self, z: Complex64) -> Sphere;

    fn at_infinity(&self) -> Sphere;

    fn derivative(&self, z: Complex64) -> Result<Complex64, MapError>;

    /// Numerator and denominator with no common factor.
    fn rational_form(&self) -> (Polynomial, Polynomial);

    /// Finite critical points other than the origin.
    fn free_critical_points(&self) -> Vec<Complex64> {
        Vec::new()
    }

    /// The origin is a super-attracting fixed point.
    fn superattracting_zero(&self) -> bool {
        false
    }

    /// The unit circle is invariant.
    fn preserves_unit_circle(&self) -> bool {
        false
    }

    /// Complex parameter that can be unfolded by parameter-continuation solvers.
    fn parameter(&self) -> Option<Complex64> {
        None
    }

    /// `d/dp map(z)` for the unfolding parameter.
    fn parameter_derivative(&self, _z: Complex64) -> Option<Complex64> {
        None
    }

    /// Same family with the unfolding parameter replaced.
    fn with_parameter(&self, _p: Complex64) -> Option<Box<dyn HoloMap>> {
        None
    }

    fn degree(&self) -> usize {
        let (n, d) = self.rational_form();
        n.degree().max(d.degree())
    }

    /// Fast finite-plane step used by raster and orbit kernels; non-finite
    /// output stands for the point at infinity.
    fn step(&self, z: Complex64) -> Complex64 {
        match self.eval(z) {
            Sphere::Finite(w) => w,
            Sphere::Infinity => Complex64::new(f64::INFINITY, f64::INFINITY),
        }
    }

    fn eval_sphere(&self, p: Sphere) -> Sphere {
        match p {
            Sphere::Finite(z) => self.eval(z),
            Sphere::Infinity => self.at_infinity(),
        }
    }
}

/// `r^2 / (32 z)`, exchanging `0` and `infinity`.
pub fn eta_transform(r: f64, z: Sphere) -> Result<Sphere, MapError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(MapError::InvalidParameter(format!("eta radius {r} must be positive")));
    }
    Ok(match z {
        Sphere::Infinity => Sphere::Finite(Complex64::new(0.0, 0.0)),
        Sphere::Finite(w) if w == Complex64::new(0.0, 0.0) => Sphere::Infinity,
        Sphere::Finite(w) => Sphere::Finite(Complex64::new(r * r / 32.0, 0.0) / w),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta_transform(1.0, Sphere::Finite(c(1.0, 0.0))).unwrap(), Sphere::Finite(c(1.0 / 32.0, 0.0)));
        let w = eta_transform(4.0, Sphere::Finite(c(0.0, 1.0))).unwrap().finite().unwrap();
        assert!((w - c(0.0, -0.5)).norm() < 1e-15);
        assert_eq!(eta_transform(2.0, Sphere::Infinity).unwrap(), Sphere::Finite(c(0.0, 0.0)));
        assert_eq!(eta_transform(2.0, Sphere::Finite(c(0.0, 0.0))).unwrap(), Sphere::Infinity);
        assert!(eta_transform(0.0, Sphere::Infinity).is_err());
    }

    #[test]
    fn eta_is_an_involution() {
        for z in [c(1.0, 0.0), c(0.0, 1.0), c(2.0, -3.0)] {
            for r in [0.3, 1.0, 7.5] {
                let back = eta_transform(r, eta_transform(r, Sphere::Finite(z)).unwrap()).unwrap();
                assert!((back.finite().unwrap() - z).norm() < 1e-14 * z.norm());
            }
        }
    }

    #[test]
    fn chordal_metric() {
        assert_eq!(Sphere::Infinity.chordal_distance(&Sphere::Infinity), 0.0);
        let d = Sphere::Finite(c(0.0, 0.0)).chordal_distance(&Sphere::Infinity);
        assert!((d - 2.0).abs() < 1e-15);
    }
}
