//! Numeric substrate: precision contexts, arbitrary-precision real and
//! complex values, and simultaneous polynomial root finding.

mod hp;
mod poly;

pub use hp::{HpComplex, HpReal};
pub use poly::{poly_roots, Polynomial};

use thiserror::Error;

/// Smallest significand width a context may carry (IEEE double).
pub const MIN_BITS: usize = 53;

/// Default precision for orbits, rasters and root finding.
pub const DOUBLE_BITS: usize = 53;

/// Default precision for continued-fraction values and linearizer coefficients.
pub const WIDE_BITS: usize = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumError {
    #[error("invalid precision: {bits} bits (minimum is {MIN_BITS})")]
    InvalidPrecision { bits: usize },
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("root finder did not converge after {iterations} iterations (worst residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

/// Significand width used by every high-precision operation of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    bits: usize,
}

impl PrecisionContext {
    pub fn new(bits: usize) -> Result<Self, NumError> {
        if bits < MIN_BITS {
            return Err(NumError::InvalidPrecision { bits });
        }
        Ok(Self { bits })
    }

    pub fn double() -> Self {
        Self { bits: DOUBLE_BITS }
    }

    pub fn wide() -> Self {
        Self { bits: WIDE_BITS }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Unit roundoff `2^(1 - bits)`.
    pub fn epsilon(&self) -> f64 {
        (1.0 - self.bits as f64).exp2()
    }

    pub fn is_double(&self) -> bool {
        self.bits == DOUBLE_BITS
    }

    /// Same context widened by `extra` guard bits.
    pub fn with_guard(&self, extra: usize) -> Self {
        Self { bits: self.bits + extra }
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::double()
    }
}

pub fn make_context(bits: usize) -> Result<PrecisionContext, NumError> {
    PrecisionContext::new(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_matches_unit_roundoff() {
        assert_eq!(make_context(53).unwrap().epsilon(), 2f64.powi(-52));
        assert_eq!(make_context(256).unwrap().epsilon(), 2f64.powi(-255));
    }

    #[test]
    fn rejects_narrow_contexts() {
        assert_eq!(make_context(10), Err(NumError::InvalidPrecision { bits: 10 }));
        assert!(make_context(52).is_err());
    }
}
