//! Continued fractions: exact digit representations, certified expansion of
//! high-precision reals, convergents, quadratic-surd values, Brjuno sums,
//! type classification, and the perturbed digit sequences `[a_0; a_1..a_n, A, N, N, ...]`.

mod abc;
mod brjuno;
mod convergents;
mod expand;
mod value;

pub use abc::{abc_sequence_number, compute_a_n, compute_a_n_hp};
pub use brjuno::{brjuno_partial_sum, classify, ln_biguint, TypeReport};
pub use convergents::{convergents, ConvergentRow, ConvergentTable};
pub use expand::{expand, Expansion};
pub use value::value;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use thiserror::Error;

use crate::numkit::NumError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CfError {
    #[error("invalid continued-fraction syntax `{0}`")]
    Syntax(String),
    #[error("partial quotient a_{index} must be at least 1")]
    ZeroDigit { index: usize },
    #[error("periodic tail declared but empty")]
    EmptyPeriod,
    #[error("expansion has {have} digits, {need} required")]
    InsufficientDigits { need: usize, have: usize },
    #[error("precision exhausted after {certified} certified digits")]
    PrecisionExhausted { certified: usize },
    #[error("unsupported representation: {0}")]
    Unsupported(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Numeric(#[from] NumError),
}

/// Generator for digits that follow no periodic pattern.
#[derive(Clone)]
pub struct DigitRule {
    name: String,
    rule: Arc<dyn Fn(usize) -> BigUint + Send + Sync>,
}

impl DigitRule {
    /// `rule(n)` yields `a_n` for `n >= 1`; it must never return zero.
    pub fn new(name: impl Into<String>, rule: impl Fn(usize) -> BigUint + Send + Sync + 'static) -> Self {
        Self { name: name.into(), rule: Arc::new(rule) }
    }
}

impl fmt::Debug for DigitRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DigitRule({})", self.name)
    }
}

/// What follows the explicit prefix of an expansion.
#[derive(Debug, Clone)]
pub enum Tail {
    /// Nothing: the expansion is a rational number.
    Finite,
    /// The listed digits repeat forever.
    Periodic(Vec<BigUint>),
    /// Infinite, non-periodic digits given by a rule.
    Rule(DigitRule),
}

/// `[a0; a1, a2, ...]` with an optional periodic or rule-generated tail.
#[derive(Debug, Clone)]
pub struct CFExpansion {
    a0: BigInt,
    prefix: Vec<BigUint>,
    tail: Tail,
}

impl CFExpansion {
    pub fn new(a0: BigInt, prefix: Vec<BigUint>, tail: Tail) -> Result<Self, CfError> {
        if let Some(i) = prefix.iter().position(|d| d.is_zero()) {
            return Err(CfError::ZeroDigit { index: i + 1 });
        }
        if let Tail::Periodic(p) = &tail {
            if p.is_empty() {
                return Err(CfError::EmptyPeriod);
            }
            if let Some(i) = p.iter().position(|d| d.is_zero()) {
                return Err(CfError::ZeroDigit { index: prefix.len() + i + 1 });
            }
        }
        Ok(Self { a0, prefix, tail })
    }

    pub fn finite(a0: i64, digits: &[u64]) -> Result<Self, CfError> {
        Self::new(a0.into(), digits.iter().map(|&d| d.into()).collect(), Tail::Finite)
    }

    pub fn periodic(a0: i64, prefix: &[u64], period: &[u64]) -> Result<Self, CfError> {
        Self::new(
            a0.into(),
            prefix.iter().map(|&d| d.into()).collect(),
            Tail::Periodic(period.iter().map(|&d| d.into()).collect()),
        )
    }

    /// `(sqrt(5) - 1) / 2 = [0; 1, 1, 1, ...]`.
    pub fn golden() -> Self {
        Self::periodic(0, &[], &[1]).expect("valid")
    }

    pub fn with_rule(a0: i64, rule: DigitRule) -> Self {
        Self { a0: a0.into(), prefix: Vec::new(), tail: Tail::Rule(rule) }
    }

    pub fn a0(&self) -> &BigInt {
        &self.a0
    }

    pub fn prefix(&self) -> &[BigUint] {
        &self.prefix
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.tail, Tail::Finite)
    }

    /// Number of available digits after `a0`; `None` when infinite.
    pub fn len(&self) -> Option<usize> {
        match self.tail {
            Tail::Finite => Some(self.prefix.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// `a_n` for `n >= 1`.
    pub fn digit(&self, n: usize) -> Option<BigUint> {
        if n == 0 {
            return None;
        }
        if n <= self.prefix.len() {
            return Some(self.prefix[n - 1].clone());
        }
        match &self.tail {
            Tail::Finite => None,
            Tail::Periodic(p) => Some(p[(n - 1 - self.prefix.len()) % p.len()].clone()),
            Tail::Rule(r) => {
                let d = (r.rule)(n);
                debug_assert!(!d.is_zero(), "digit rule produced a zero digit");
                Some(if d.is_zero() { BigUint::one() } else { d })
            }
        }
    }

    /// `a_1 ..= a_n`.
    pub fn digits(&self, n: usize) -> Result<Vec<BigUint>, CfError> {
        (1..=n)
            .map(|k| {
                self.digit(k).ok_or(CfError::InsufficientDigits { need: n, have: self.prefix.len() })
            })
            .collect()
    }

    /// Expansion truncated to `a_0; a_1..a_n`.
    pub fn truncate(&self, n: usize) -> Result<Self, CfError> {
        Ok(Self { a0: self.a0.clone(), prefix: self.digits(n)?, tail: Tail::Finite })
    }
}

impl PartialEq for CFExpansion {
    fn eq(&self, other: &Self) -> bool {
        self.to_string() == other.to_string()
    }
}

impl fmt::Display for CFExpansion {
    /// Canonical syntax `a0;d1,d2,[t1,...,tk]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.a0)?;
        let mut parts: Vec<String> = self.prefix.iter().map(|d| d.to_string()).collect();
        match &self.tail {
            Tail::Finite => {}
            Tail::Periodic(p) => parts.push(format!(
                "[{}]",
                p.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
            )),
            Tail::Rule(r) => parts.push(format!("{{{}}}", r.name)),
        }
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for CFExpansion {
    type Err = CfError;

    fn from_str(s: &str) -> Result<Self, CfError> {
        let bad = || CfError::Syntax(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (head, rest) = match compact.split_once(';') {
            Some((h, r)) => (h, r),
            None => (compact.as_str(), ""),
        };
        let a0: BigInt = head.parse().map_err(|_| bad())?;
        let (body, period) = match rest.find('[') {
            Some(open) => {
                let inner = rest[open..].strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
                let body = rest[..open].trim_end_matches(',');
                let period = inner
                    .split(',')
                    .map(|d| d.parse::<BigUint>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>, _>>()?;
                (body, Some(period))
            }
            None => (rest, None),
        };
        let prefix = if body.is_empty() {
            Vec::new()
        } else {
            body.split(',')
                .map(|d| d.parse::<BigUint>().map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()?
        };
        let tail = match period {
            Some(p) => Tail::Periodic(p),
            None => Tail::Finite,
        };
        Self::new(a0, prefix, tail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_echo_periodic() {
        let cf: CFExpansion = "0;1,2,[3,4]".parse().unwrap();
        assert_eq!(cf.to_string(), "0;1,2,[3,4]");
        let d: Vec<u64> = cf.digits(7).unwrap().iter().map(|d| d.try_into().unwrap()).collect();
        assert_eq!(d, vec![1, 2, 3, 4, 3, 4, 3]);
    }

    #[test]
    fn parse_pure_period_and_finite() {
        assert_eq!("0;[1]".parse::<CFExpansion>().unwrap(), CFExpansion::golden());
        let cf: CFExpansion = "-2;3".parse().unwrap();
        assert!(cf.is_rational());
        assert_eq!(cf.a0(), &BigInt::from(-2));
        assert_eq!("5".parse::<CFExpansion>().unwrap().len(), Some(0));
    }

    #[test]
    fn rejects_bad_digits() {
        assert!(matches!("0;1,0,2".parse::<CFExpansion>(), Err(CfError::ZeroDigit { index: 2 })));
        assert!(matches!("0;1,[]".parse::<CFExpansion>(), Err(CfError::Syntax(_))));
        assert!(matches!("x;1".parse::<CFExpansion>(), Err(CfError::Syntax(_))));
        assert!(matches!("0;1,[2".parse::<CFExpansion>(), Err(CfError::Syntax(_))));
    }

    #[test]
    fn finite_expansion_runs_out() {
        let cf = CFExpansion::finite(0, &[3]).unwrap();
        assert!(matches!(cf.digits(2), Err(CfError::InsufficientDigits { need: 2, have: 1 })));
    }

    #[test]
    fn rule_digits() {
        let cf = CFExpansion::with_rule(0, DigitRule::new("n", |n| BigUint::from(n)));
        assert_eq!(cf.digit(5), Some(BigUint::from(5u32)));
        assert_eq!(cf.to_string(), "0;{n}");
    }
}
