use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::{convergents, CFExpansion, CfError};

/// Natural logarithm of an arbitrarily large positive integer.
pub fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().expect("64-bit head");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `sum_{k=1..n} log(q_{k+1}) / q_k`; zero for `n = 0`.
pub fn brjuno_partial_sum(cf: &CFExpansion, n: usize) -> Result<f64, CfError> {
    if n == 0 {
        return Ok(0.0);
    }
    let t = convergents(cf, n + 1)?;
    Ok((1..=n)
        .map(|k| {
            let qk = t.q(k);
            let ratio = ln_biguint(t.q(k + 1));
            if qk.bits() <= 1000 {
                ratio / qk.to_f64().unwrap()
            } else {
                (ratio.ln() - ln_biguint(qk)).exp()
            }
        })
        .sum())
}

/// Digit statistics of a finite prefix. Membership in bounded-type, `HT_N`
/// or Petersen–Zakeri classes is a property of the whole digit sequence;
/// every field here describes the prefix only.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeReport {
    pub prefix_len: usize,
    pub threshold_n: BigUint,
    pub min_digit: BigUint,
    pub max_digit: BigUint,
    /// The second half of the prefix never exceeds the largest digit of the first half.
    pub bounded_type_on_prefix: bool,
    /// Every prefix digit is at least `threshold_n`.
    pub in_ht_n_prefix: bool,
    /// `max_k log(a_k) / sqrt(k)` over the prefix.
    pub pz_prefix_ratio: f64,
    pub prefix_only: bool,
}

pub fn classify(cf: &CFExpansion, prefix_len: usize, threshold_n: u64) -> Result<TypeReport, CfError> {
    if prefix_len == 0 {
        return Err(CfError::InvalidArgument("prefix must contain at least one digit".into()));
    }
    let digits = cf.digits(prefix_len)?;
    let min_digit = digits.iter().min().cloned().unwrap_or_else(BigUint::zero);
    let max_digit = digits.iter().max().cloned().unwrap_or_else(BigUint::zero);
    let half = prefix_len.div_ceil(2);
    let head_max = digits[..half].iter().max().cloned().unwrap_or_else(BigUint::zero);
    let tail_max = digits[half..].iter().max().cloned().unwrap_or_else(BigUint::zero);
    let pz_prefix_ratio = digits
        .iter()
        .enumerate()
        .map(|(i, a)| ln_biguint(a) / ((i + 1) as f64).sqrt())
        .fold(0.0, f64::max);
    let threshold = BigUint::from(threshold_n);
    Ok(TypeReport {
        prefix_len,
        in_ht_n_prefix: min_digit >= threshold,
        threshold_n: threshold,
        min_digit,
        max_digit,
        bounded_type_on_prefix: tail_max <= head_max,
        pz_prefix_ratio,
        prefix_only: true,
    })
}
