use std::io::Write;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;

use super::HermanError;
use crate::cfrac::{abc_sequence_number, classify, compute_a_n, convergents, CFExpansion, CfError};
use crate::numkit::PrecisionContext;
use crate::siegel::{conformal_radius_estimate, linearizer_coeffs, RadiusEstimate};

#[derive(Debug, Clone)]
pub struct AbcRow {
    pub n: usize,
    pub q_n: BigUint,
    pub a_n: BigUint,
    pub alpha_n: CFExpansion,
    pub r_estimate: f64,
    pub uncertainty: f64,
    /// `|r_estimate - target|`.
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct AbcReport {
    pub baseline: RadiusEstimate,
    /// `baseline / ratio`.
    pub target: f64,
    pub rows: Vec<AbcRow>,
}

/// Conformal radii of `[a_0; a_1..a_n, A_n, N, N, ...]` with `A_n = floor(ratio^{q_n})`.
pub fn abc_experiment(
    alpha: &CFExpansion,
    ratio: &BigRational,
    tail_digit: u64,
    ns: &[usize],
    series_len: usize,
    ctx: PrecisionContext,
) -> Result<AbcReport, HermanError> {
    if *ratio <= BigRational::one() {
        return Err(HermanError::InvalidArgument(format!("ratio {ratio} must exceed 1")));
    }
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let report = classify(alpha, n_max.max(1), 1000)?;
    if !report.bounded_type_on_prefix {
        return Err(HermanError::Cf(CfError::InvalidArgument("alpha is not of bounded type on the prefix".into())));
    }
    let baseline = conformal_radius_estimate(&linearizer_coeffs(alpha, series_len, ctx)?)?;
    let target = baseline.value * ratio_to_f64(ratio).recip();
    let table = convergents(alpha, n_max.max(1))?;
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        if n == 0 {
            return Err(HermanError::InvalidArgument("n starts at 1".into()));
        }
        let q_n = table.q(n).clone();
        let a_n = compute_a_n(ratio, &q_n)?;
        let alpha_n = abc_sequence_number(alpha, n, &a_n, tail_digit)?;
        let est = conformal_radius_estimate(&linearizer_coeffs(&alpha_n, series_len, ctx)?)?;
        rows.push(AbcRow {
            n,
            q_n,
            a_n,
            alpha_n,
            r_estimate: est.value,
            uncertainty: est.uncertainty,
            distance: (est.value - target).abs(),
        });
    }
    Ok(AbcReport { baseline, target, rows })
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// CSV rows `n,A_n,alpha_n_digits,r_est,uncertainty`.
pub fn write_abc_csv<W: Write>(rows: &[AbcRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "A_n", "alpha_n_digits", "r_est", "uncertainty"])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.a_n.to_string(),
            r.alpha_n.to_string(),
            r.r_estimate.to_string(),
            r.uncertainty.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_two_row() {
        let r = abc_experiment(&CFExpansion::golden(), &BigRational::from_integer(2.into()), 1, &[4], 128, PrecisionContext::wide()).unwrap();
        assert_eq!(r.rows[0].q_n, BigUint::from(5u32));
        assert_eq!(r.rows[0].a_n, BigUint::from(32u32));
        let mut buf = Vec::new();
        write_abc_csv(&r.rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,A_n,alpha_n_digits,r_est,uncertainty\n4,32,\"0;1,1,1,1,32,[1]\","), "{text}");
    }

    #[test]
    fn unit_digit_rows_are_well_formed() {
        let ratio = BigRational::new(11.into(), 10.into());
        let r = abc_experiment(&CFExpansion::golden(), &ratio, 1, &[2], 128, PrecisionContext::wide()).unwrap();
        assert_eq!(r.rows[0].a_n, BigUint::from(1u32));
        assert!(r.rows[0].r_estimate > 0.0);
    }

    #[test]
    fn ratio_must_exceed_one() {
        assert!(abc_experiment(&CFExpansion::golden(), &BigRational::one(), 1, &[4], 128, PrecisionContext::wide()).is_err());
    }
}
