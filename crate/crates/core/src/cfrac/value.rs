use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{CFExpansion, CfError, Tail};
use crate::numkit::{HpReal, PrecisionContext};

/// `[a0; d1..dm]` as the matrix entries `(P_m, P_{m-1}, Q_m, Q_{m-1})`.
fn mobius(a0: &BigInt, digits: &[BigInt]) -> (BigInt, BigInt, BigInt, BigInt) {
    let (mut p, mut p_prev) = (a0.clone(), BigInt::one());
    let (mut q, mut q_prev) = (BigInt::one(), BigInt::from(0));
    for a in digits {
        let p_next = a * &p + &p_prev;
        let q_next = a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
    (p, p_prev, q, q_prev)
}

/// Exact value of a finite or eventually periodic expansion, rounded to `ctx`.
///
/// The periodic tail `y = [t1; t2..tk, y]` is the positive root of
/// `Q_k y^2 + (Q_{k-1} - P_k) y - P_{k-1} = 0`; composing with the prefix
/// gives `x = (e + f sqrt(D)) / g` with integer `e, f, g, D`, which is
/// evaluated with enough guard bits to absorb cancellation in `e + f sqrt(D)`.
pub fn value(cf: &CFExpansion, ctx: PrecisionContext) -> Result<HpReal, CfError> {
    let prefix: Vec<BigInt> = cf.prefix().iter().map(|d| BigInt::from(d.clone())).collect();
    match cf.tail() {
        Tail::Finite => {
            let (p, _, q, _) = mobius(cf.a0(), &prefix);
            Ok(HpReal::from_ratio(&BigRational::new(p, q), ctx))
        }
        Tail::Rule(_) => Err(CfError::Unsupported("non-periodic infinite expansion has no closed form")),
        Tail::Periodic(period) => {
            let period: Vec<BigInt> = period.iter().map(|d| BigInt::from(d.clone())).collect();
            let (tp, tp_prev, tq, tq_prev) = mobius(&period[0], &period[1..]);
            // y = (s + sqrt(D)) / (2 tq)
            let s = &tp - &tq_prev;
            let disc = &s * &s + BigInt::from(4) * &tq * &tp_prev;
            let two_tq = BigInt::from(2) * &tq;
            let (pp, pp_prev, pq, pq_prev) = mobius(cf.a0(), &prefix);
            // numerator n1 + n2 sqrt(D), denominator d1 + d2 sqrt(D)
            let n1 = &pp * &s + &pp_prev * &two_tq;
            let n2 = pp.clone();
            let d1 = &pq * &s + &pq_prev * &two_tq;
            let d2 = pq.clone();
            let e = &n1 * &d1 - &n2 * &d2 * &disc;
            let f = &n2 * &d1 - &n1 * &d2;
            let g = &d1 * &d1 - &d2 * &d2 * &disc;
            let guard_bits = 64 + 2 * e.bits().max(f.bits()).max(g.bits()) as usize;
            let w = ctx.with_guard(guard_bits);
            let root = HpReal::from_bigint(&disc, w).sqrt();
            let num = &HpReal::from_bigint(&e, w) + &(&HpReal::from_bigint(&f, w) * &root);
            Ok((&num / &HpReal::from_bigint(&g, w)).round_to(ctx))
        }
    }
}
