use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign, Word};
use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::PrecisionContext;

const RM: RoundingMode = RoundingMode::ToEven;
const WORD_BITS: i64 = Word::BITS as i64;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Multiply `x` by `2^k` without intermediate overflow.
fn ldexp(mut x: f64, mut k: i64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    if k > 2200 {
        return x.signum() * f64::INFINITY;
    }
    if k < -2200 {
        return 0.0 * x.signum();
    }
    while k > 600 {
        x *= 2f64.powi(600);
        k -= 600;
    }
    while k < -600 {
        x *= 2f64.powi(-600);
        k += 600;
    }
    x * 2f64.powi(k as i32)
}

/// Correctly rounded real number with a fixed significand width.
#[derive(Clone)]
pub struct HpReal {
    v: BigFloat,
    p: usize,
}

impl HpReal {
    fn wrap(v: BigFloat, p: usize) -> Self {
        Self { v, p }
    }

    pub fn zero(ctx: PrecisionContext) -> Self {
        Self::from_i64(0, ctx)
    }

    pub fn one(ctx: PrecisionContext) -> Self {
        Self::from_i64(1, ctx)
    }

    pub fn from_i64(n: i64, ctx: PrecisionContext) -> Self {
        // integer constructors reject widths below one word
        let mut v = BigFloat::from_i64(n, ctx.bits().max(WORD_BITS as usize));
        v.set_precision(ctx.bits(), RM).expect("precision change");
        Self::wrap(v, ctx.bits())
    }

    pub fn from_f64(x: f64, ctx: PrecisionContext) -> Self {
        Self::wrap(BigFloat::from_f64(x, ctx.bits()), ctx.bits())
    }

    pub fn from_bigint(n: &BigInt, ctx: PrecisionContext) -> Self {
        if n.is_zero() {
            return Self::zero(ctx);
        }
        let words = n.magnitude().to_u64_digits();
        let sign = if n.is_negative() { Sign::Neg } else { Sign::Pos };
        let e = (words.len() as i64 * WORD_BITS) as i32;
        let mut v = BigFloat::from_words(&words, sign, e);
        v.set_precision(ctx.bits(), RM).expect("precision change");
        Self::wrap(v, ctx.bits())
    }

    pub fn from_biguint(n: &BigUint, ctx: PrecisionContext) -> Self {
        Self::from_bigint(&BigInt::from(n.clone()), ctx)
    }

    pub fn from_ratio(r: &BigRational, ctx: PrecisionContext) -> Self {
        let guard = ctx.with_guard(32);
        let num = Self::from_bigint(r.numer(), guard);
        let den = Self::from_bigint(r.denom(), guard);
        (&num / &den).round_to(ctx)
    }

    /// Parses a decimal literal such as `0.6180339887498949` or `-1.5e-3`.
    pub fn parse(s: &str, ctx: PrecisionContext) -> Option<Self> {
        let v = with_consts(|cc| BigFloat::parse(s.trim(), Radix::Dec, ctx.bits(), RM, cc));
        if v.is_nan() {
            None
        } else {
            Some(Self::wrap(v, ctx.bits()))
        }
    }

    pub fn pi(ctx: PrecisionContext) -> Self {
        Self::wrap(with_consts(|cc| cc.pi(ctx.bits(), RM)), ctx.bits())
    }

    pub fn precision(&self) -> usize {
        self.p
    }

    pub fn context(&self) -> PrecisionContext {
        PrecisionContext::new(self.p).expect("stored precision is valid")
    }

    pub fn round_to(&self, ctx: PrecisionContext) -> Self {
        let mut v = self.v.clone();
        if !v.is_zero() {
            v.set_precision(ctx.bits(), RM).expect("precision change");
        }
        Self::wrap(v, ctx.bits())
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.v.abs(), self.p)
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.v.sqrt(self.p, RM), self.p)
    }

    pub fn ln(&self) -> Self {
        Self::wrap(with_consts(|cc| self.v.ln(self.p, RM, cc)), self.p)
    }

    pub fn exp(&self) -> Self {
        Self::wrap(with_consts(|cc| self.v.exp(self.p, RM, cc)), self.p)
    }

    pub fn sin(&self) -> Self {
        Self::wrap(with_consts(|cc| self.v.sin(self.p, RM, cc)), self.p)
    }

    pub fn cos(&self) -> Self {
        Self::wrap(with_consts(|cc| self.v.cos(self.p, RM, cc)), self.p)
    }

    pub fn powi(&self, n: usize) -> Self {
        Self::wrap(self.v.powi(n, self.p, RM), self.p)
    }

    pub fn recip(&self) -> Self {
        Self::wrap(self.v.reciprocal(self.p, RM), self.p)
    }

    /// Fractional part in `[0, 1)`.
    pub fn frac(&self) -> Self {
        let fl = Self::wrap(self.v.floor(), self.p);
        self - &fl
    }

    pub fn floor(&self) -> BigInt {
        let fl = self.v.floor();
        let (n, e) = decompose(&fl);
        if e >= 0 {
            n << (e as usize)
        } else {
            // exact integer: the shifted-out bits are zero
            n >> ((-e) as usize)
        }
    }

    /// Exact binary decomposition `value = mantissa * 2^exponent`.
    pub fn to_dyadic(&self) -> (BigInt, i64) {
        decompose(&self.v)
    }

    /// Exactly `mantissa * 2^exponent`; later arithmetic rounds to `ctx`.
    pub fn from_dyadic(mantissa: &BigInt, exponent: i64, ctx: PrecisionContext) -> Self {
        let width = ctx.bits().max(mantissa.bits() as usize);
        let m = Self::from_bigint(mantissa, PrecisionContext { bits: width });
        Self::wrap(m.mul_pow2(exponent).v, ctx.bits())
    }

    /// Exact scaling by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        let mut v = self.v.clone();
        if let Some(e) = v.exponent() {
            if !v.is_zero() {
                let e = (e as i64 + k).clamp(i32::MIN as i64, i32::MAX as i64);
                v.set_exponent(e as i32);
            }
        }
        Self::wrap(v, self.p)
    }

    /// `log2 |x|` as a double, finite for any nonzero finite `x`.
    pub fn log2_abs(&self) -> f64 {
        if self.v.is_zero() {
            return f64::NEG_INFINITY;
        }
        match self.v.exponent() {
            Some(e) => self.mul_pow2(-(e as i64)).to_f64().abs().log2() + e as f64,
            None => f64::NAN,
        }
    }

    /// Exponent `e` such that one unit in the last place equals `2^e`.
    pub fn ulp_exponent(&self) -> i64 {
        match self.v.exponent() {
            Some(e) if !self.v.is_zero() => e as i64 - self.p as i64,
            _ => -(self.p as i64),
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.v.is_nan() {
            return f64::NAN;
        }
        if self.v.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.v.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        match self.v.as_raw_parts() {
            Some((words, _, sign, e, _)) if !words.is_empty() => {
                let top = *words.last().unwrap();
                let next = if words.len() > 1 { words[words.len() - 2] } else { 0 };
                let mant = top as f64 + next as f64 * 2f64.powi(-64);
                let x = ldexp(mant, e as i64 - WORD_BITS);
                if sign == Sign::Neg {
                    -x
                } else {
                    x
                }
            }
            _ => 0.0,
        }
    }

    pub fn as_bigfloat(&self) -> &BigFloat {
        &self.v
    }

    pub fn to_string_radix10(&self) -> String {
        format!("{}", self.v)
    }
}

fn decompose(v: &BigFloat) -> (BigInt, i64) {
    match v.as_raw_parts() {
        Some((words, _, sign, e, _)) if !v.is_zero() => {
            let mag = BigUint::new(
                words
                    .iter()
                    .flat_map(|w| [(*w & 0xffff_ffff) as u32, (*w >> 32) as u32])
                    .collect(),
            );
            let s = if sign == Sign::Neg { BigSign::Minus } else { BigSign::Plus };
            let n = BigInt::from_biguint(s, mag);
            (n, e as i64 - words.len() as i64 * WORD_BITS)
        }
        _ => (BigInt::zero(), 0),
    }
}

impl fmt::Debug for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl fmt::Display for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl PartialEq for HpReal {
    fn eq(&self, other: &Self) -> bool {
        self.v.cmp(&other.v) == Some(0)
    }
}

impl PartialOrd for HpReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|c| c.cmp(&0))
    }
}

macro_rules! real_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&HpReal> for &HpReal {
            type Output = HpReal;
            fn $m(self, rhs: &HpReal) -> HpReal {
                let p = self.p.max(rhs.p);
                HpReal::wrap(self.v.$m(&rhs.v, p, RM), p)
            }
        }
        impl $tr<HpReal> for HpReal {
            type Output = HpReal;
            fn $m(self, rhs: HpReal) -> HpReal {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&HpReal> for HpReal {
            type Output = HpReal;
            fn $m(self, rhs: &HpReal) -> HpReal {
                (&self).$m(rhs)
            }
        }
    };
}

real_binop!(Add, add);
real_binop!(Sub, sub);
real_binop!(Mul, mul);
real_binop!(Div, div);

impl Neg for &HpReal {
    type Output = HpReal;
    fn neg(self) -> HpReal {
        let mut v = self.v.clone();
        v.inv_sign();
        HpReal::wrap(v, self.p)
    }
}

impl Neg for HpReal {
    type Output = HpReal;
    fn neg(self) -> HpReal {
        -&self
    }
}

/// Complex number over [`HpReal`] components.
#[derive(Clone, Debug, PartialEq)]
pub struct HpComplex {
    pub re: HpReal,
    pub im: HpReal,
}

impl HpComplex {
    pub fn new(re: HpReal, im: HpReal) -> Self {
        Self { re, im }
    }

    pub fn zero(ctx: PrecisionContext) -> Self {
        Self::new(HpReal::zero(ctx), HpReal::zero(ctx))
    }

    pub fn one(ctx: PrecisionContext) -> Self {
        Self::new(HpReal::one(ctx), HpReal::zero(ctx))
    }

    pub fn from_c64(z: Complex64, ctx: PrecisionContext) -> Self {
        Self::new(HpReal::from_f64(z.re, ctx), HpReal::from_f64(z.im, ctx))
    }

    pub fn from_real(re: HpReal) -> Self {
        let ctx = re.context();
        Self::new(re, HpReal::zero(ctx))
    }

    /// `exp(2 pi i x)` for a real number of turns `x`.
    pub fn cis_turns(x: &HpReal) -> Self {
        let ctx = x.context();
        let guard = ctx.with_guard(32);
        let two_pi = &HpReal::pi(guard) * &HpReal::from_i64(2, guard);
        let angle = &two_pi * &x.frac().round_to(guard);
        Self::new(angle.cos().round_to(ctx), angle.sin().round_to(ctx))
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> HpReal {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn abs(&self) -> HpReal {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: &HpReal) -> Self {
        Self::new(&self.re * s, &self.im * s)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn context(&self) -> PrecisionContext {
        self.re.context()
    }

    pub fn round_to(&self, ctx: PrecisionContext) -> Self {
        Self::new(self.re.round_to(ctx), self.im.round_to(ctx))
    }
}

impl Add<&HpComplex> for &HpComplex {
    type Output = HpComplex;
    fn add(self, rhs: &HpComplex) -> HpComplex {
        HpComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&HpComplex> for &HpComplex {
    type Output = HpComplex;
    fn sub(self, rhs: &HpComplex) -> HpComplex {
        HpComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&HpComplex> for &HpComplex {
    type Output = HpComplex;
    fn mul(self, rhs: &HpComplex) -> HpComplex {
        let re = &(&self.re * &rhs.re) - &(&self.im * &rhs.im);
        let im = &(&self.re * &rhs.im) + &(&self.im * &rhs.re);
        HpComplex::new(re, im)
    }
}

impl Div<&HpComplex> for &HpComplex {
    type Output = HpComplex;
    fn div(self, rhs: &HpComplex) -> HpComplex {
        let d = rhs.norm_sqr();
        let num = self * &rhs.conj();
        HpComplex::new(&num.re / &d, &num.im / &d)
    }
}

impl Neg for &HpComplex {
    type Output = HpComplex;
    fn neg(self) -> HpComplex {
        HpComplex::new(-&self.re, -&self.im)
    }
}

macro_rules! owned_complex_op {
    ($tr:ident, $m:ident) => {
        impl $tr<HpComplex> for HpComplex {
            type Output = HpComplex;
            fn $m(self, rhs: HpComplex) -> HpComplex {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&HpComplex> for HpComplex {
            type Output = HpComplex;
            fn $m(self, rhs: &HpComplex) -> HpComplex {
                (&self).$m(rhs)
            }
        }
    };
}

owned_complex_op!(Add, add);
owned_complex_op!(Sub, sub);
owned_complex_op!(Mul, mul);
owned_complex_op!(Div, div);
