use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{CFExpansion, CfError, Tail};
use crate::numkit::{HpReal, PrecisionContext};

/// Largest exponent accepted for exact powers.
const MAX_EXPONENT: u64 = 1 << 24;

fn exponent(q: &BigUint) -> Result<u32, CfError> {
    match q.to_u64() {
        Some(0) => Err(CfError::InvalidArgument("q_n must be at least 1".into())),
        Some(v) if v <= MAX_EXPONENT => Ok(v as u32),
        _ => Err(CfError::InvalidArgument(format!("exponent {q} exceeds {MAX_EXPONENT}"))),
    }
}

/// `floor(ratio^q)` computed exactly.
pub fn compute_a_n(ratio: &BigRational, q: &BigUint) -> Result<BigUint, CfError> {
    if *ratio <= BigRational::one() {
        return Err(CfError::InvalidArgument(format!("ratio {ratio} must exceed 1")));
    }
    let e = exponent(q)?;
    let num = num_traits::pow(ratio.numer().clone(), e as usize);
    let den = num_traits::pow(ratio.denom().clone(), e as usize);
    Ok(num.div_floor(&den).to_biguint().expect("positive"))
}

/// `floor(ratio^q)` for an inexact ratio; fails unless the rounding error of
/// the power cannot move it across an integer.
pub fn compute_a_n_hp(ratio: &HpReal, q: &BigUint, ctx: PrecisionContext) -> Result<BigUint, CfError> {
    let one = HpReal::one(ctx);
    if *ratio <= one {
        return Err(CfError::InvalidArgument("ratio must exceed 1".into()));
    }
    let e = exponent(q)?;
    let needed = e as f64 * ratio.to_f64().log2() + 64.0;
    if (ctx.bits() as f64) < needed {
        return Err(CfError::PrecisionExhausted { certified: 0 });
    }
    let r = ratio.round_to(ctx);
    let power = r.powi(e as usize);
    // repeated squaring: at most 2 log2(q) + 2 roundings
    let steps = 2.0 * (e as f64).log2().ceil() + 4.0;
    let slack = &power.abs() * &HpReal::from_f64(steps * ctx.epsilon(), ctx);
    let lo = (&power - &slack).floor();
    let hi = (&power + &slack).floor();
    if lo != hi || lo.is_negative() {
        return Err(CfError::PrecisionExhausted { certified: 0 });
    }
    Ok(lo.to_biguint().expect("nonnegative"))
}

/// `[a_0; a_1..a_n, A_n, N, N, N, ...]`.
pub fn abc_sequence_number(alpha: &CFExpansion, n: usize, a_n: &BigUint, tail_digit: u64) -> Result<CFExpansion, CfError> {
    if a_n.is_zero() {
        return Err(CfError::ZeroDigit { index: n + 1 });
    }
    if tail_digit == 0 {
        return Err(CfError::ZeroDigit { index: n + 2 });
    }
    let mut prefix = alpha.digits(n)?;
    prefix.push(a_n.clone());
    CFExpansion::new(alpha.a0().clone(), prefix, Tail::Periodic(vec![BigUint::from(tail_digit)]))
}
