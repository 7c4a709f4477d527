//! Binary coefficient records.
//!
//! Layout (little endian): magic, precision bits, term count, the expansion
//! string, then one record per coefficient `(index, re, im)` where each real
//! is `sign, exponent, mantissa bytes` of its exact dyadic value. An FNV-1a
//! checksum of everything before it closes the file.

use num_bigint::{BigInt, BigUint, Sign};

use super::{LinearizerSeries, SiegelError};
use crate::cfrac::CFExpansion;
use crate::numkit::{HpComplex, HpReal, PrecisionContext};

const MAGIC: &[u8; 8] = b"RLSERIES";

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn put_real(out: &mut Vec<u8>, x: &HpReal) {
    let (m, e) = x.to_dyadic();
    let (sign, mag) = m.into_parts();
    out.push(match sign {
        Sign::NoSign => 0,
        Sign::Plus => 1,
        Sign::Minus => 2,
    });
    out.extend_from_slice(&e.to_le_bytes());
    let bytes = mag.to_bytes_le();
    out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
    out.extend_from_slice(&bytes);
}

pub fn encode_series(series: &LinearizerSeries) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(series.context().bits() as u32).to_le_bytes());
    out.extend_from_slice(&(series.n_terms() as u32).to_le_bytes());
    let cf = series.alpha().to_string();
    out.extend_from_slice(&(cf.len() as u32).to_le_bytes());
    out.extend_from_slice(cf.as_bytes());
    for (i, b) in series.coefficients().iter().enumerate() {
        out.extend_from_slice(&(i as u32 + 1).to_le_bytes());
        put_real(&mut out, &b.re);
        put_real(&mut out, &b.im);
    }
    let sum = fnv1a(&out);
    out.extend_from_slice(&sum.to_le_bytes());
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], SiegelError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len()).ok_or_else(|| corrupt("truncated"))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, SiegelError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn i64(&mut self) -> Result<i64, SiegelError> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn real(&mut self, ctx: PrecisionContext) -> Result<HpReal, SiegelError> {
        let sign = match self.take(1)?[0] {
            0 => Sign::NoSign,
            1 => Sign::Plus,
            2 => Sign::Minus,
            s => return Err(corrupt(&format!("bad sign byte {s}"))),
        };
        let e = self.i64()?;
        let len = self.u32()? as usize;
        let mag = BigUint::from_bytes_le(self.take(len)?);
        Ok(HpReal::from_dyadic(&BigInt::from_biguint(sign, mag), e, ctx))
    }
}

fn corrupt(msg: &str) -> SiegelError {
    SiegelError::Corrupt(msg.to_string())
}

pub fn decode_series(bytes: &[u8]) -> Result<LinearizerSeries, SiegelError> {
    if bytes.len() < MAGIC.len() + 8 {
        return Err(corrupt("truncated"));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 8);
    if fnv1a(body) != u64::from_le_bytes(tail.try_into().unwrap()) {
        return Err(corrupt("checksum mismatch"));
    }
    let mut r = Reader { buf: body, pos: 0 };
    if r.take(MAGIC.len())? != MAGIC {
        return Err(corrupt("bad magic"));
    }
    let ctx = PrecisionContext::new(r.u32()? as usize).map_err(|e| corrupt(&e.to_string()))?;
    let n = r.u32()? as usize;
    let cf_len = r.u32()? as usize;
    let cf: CFExpansion = std::str::from_utf8(r.take(cf_len)?)
        .map_err(|_| corrupt("expansion is not UTF-8"))?
        .parse()
        .map_err(|e: crate::cfrac::CfError| corrupt(&e.to_string()))?;
    let mut coeffs = Vec::with_capacity(n.min(1 << 20));
    for i in 1..=n {
        if r.u32()? as usize != i {
            return Err(corrupt("record index out of order"));
        }
        let re = r.real(ctx)?;
        let im = r.real(ctx)?;
        coeffs.push(HpComplex::new(re, im));
    }
    if r.pos != body.len() {
        return Err(corrupt("trailing bytes"));
    }
    LinearizerSeries::from_coefficients(cf, coeffs, ctx)
}
