use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::{CFExpansion, CfError};

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergentRow {
    pub n: usize,
    pub p: BigInt,
    pub q: BigUint,
}

/// Rows `0..=n` of the convergents `p_k / q_k = [a0; a1..ak]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergentTable {
    pub rows: Vec<ConvergentRow>,
}

impl ConvergentTable {
    pub fn q(&self, n: usize) -> &BigUint {
        &self.rows[n].q
    }

    pub fn p(&self, n: usize) -> &BigInt {
        &self.rows[n].p
    }

    pub fn last(&self) -> &ConvergentRow {
        self.rows.last().expect("row 0 always present")
    }

    /// CSV with header `n,p,q`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "p", "q"])?;
        for row in &self.rows {
            w.write_record([row.n.to_string(), row.p.to_string(), row.q.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn convergents(cf: &CFExpansion, n: usize) -> Result<ConvergentTable, CfError> {
    let digits = cf.digits(n)?;
    let mut rows = Vec::with_capacity(n + 1);
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigUint::zero());
    let (mut p, mut q) = (cf.a0().clone(), BigUint::one());
    rows.push(ConvergentRow { n: 0, p: p.clone(), q: q.clone() });
    for (k, a) in digits.iter().enumerate() {
        let p_next = BigInt::from(a.clone()) * &p + &p_prev;
        let q_next = a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        rows.push(ConvergentRow { n: k + 1, p: p.clone(), q: q.clone() });
    }
    Ok(ConvergentTable { rows })
}
