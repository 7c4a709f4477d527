use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{CFExpansion, CfError, Tail};
use crate::numkit::HpReal;

/// Result of expanding a real number.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub cf: CFExpansion,
    /// The input is a rational number at its own precision and its
    /// expansion ended before the requested length.
    pub terminated: bool,
}

fn dyadic(m: BigInt, e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(m << (e as usize))
    } else {
        BigRational::new(m, BigInt::one() << ((-e) as usize))
    }
}

/// First `n` partial quotients of `x`, each certified against the rounding
/// interval `[x - ulp, x + ulp]`.
///
/// A digit is emitted only when both interval ends share their integer
/// part. When the interval straddles an integer `k` while narrower than
/// `2^(-bits/2)`, `x` is treated as a rational whose last digit is `k`.
pub fn expand(x: &HpReal, n: usize) -> Result<Expansion, CfError> {
    if n == 0 {
        return Err(CfError::InvalidArgument("at least one digit must be requested".into()));
    }
    if !x.is_finite() {
        return Err(CfError::InvalidArgument("cannot expand a non-finite value".into()));
    }
    let (m, e) = x.to_dyadic();
    let center = dyadic(m, e);
    let ulp = dyadic(BigInt::one(), x.ulp_exponent());
    let tiny = dyadic(BigInt::one(), -(x.precision() as i64 / 2));
    let mut lo = &center - &ulp;
    let mut hi = &center + &ulp;

    let mut a0: Option<BigInt> = None;
    let mut digits: Vec<BigUint> = Vec::with_capacity(n);
    let mut terminated = false;
    let certified = |a0: &Option<BigInt>, digits: &Vec<BigUint>| a0.iter().count() + digits.len();

    while digits.len() < n {
        let f_lo = lo.floor().to_integer();
        let f_hi = hi.floor().to_integer();
        let a = if f_lo == f_hi {
            f_lo
        } else if &hi - &lo < tiny && &f_lo + BigInt::one() == f_hi {
            // the interval straddles the integer f_hi: rational input
            terminated = true;
            f_hi
        } else {
            return Err(CfError::PrecisionExhausted { certified: certified(&a0, &digits) });
        };
        let is_first = a0.is_none();
        if is_first {
            a0 = Some(a.clone());
        } else {
            digits.push(a.to_biguint().expect("partial quotients past a0 are positive"));
        }
        if terminated {
            break;
        }
        let a_rat = BigRational::from_integer(a);
        let r_lo = &lo - &a_rat;
        let r_hi = &hi - &a_rat;
        if r_lo.is_zero() || r_lo.is_negative() {
            // the remainder interval touches zero
            if &r_hi - &r_lo < tiny {
                terminated = true;
                break;
            }
            return Err(CfError::PrecisionExhausted { certified: certified(&a0, &digits) });
        }
        lo = r_hi.recip();
        hi = r_lo.recip();
    }
    let cf = CFExpansion::new(a0.unwrap_or_default(), digits, Tail::Finite)?;
    Ok(Expansion { cf, terminated })
}
