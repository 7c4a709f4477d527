//! Linearizing coordinate of `lambda z + z^2` at an irrational rotation number,
//! its conformal radius, and the sub-disk decomposition of orbits.

mod cache;
mod fate;
mod invert;

pub use cache::{decode_series, encode_series};
pub use fate::{classify_orbit_lm, classify_orbit_with, write_fate_csv, FateStatus, OrbitFate, ESCAPE_RADIUS};
pub use invert::{invert_linearizer, SubdiskTable, TRUST_FACTOR};

use num_complex::Complex64;
use thiserror::Error;

use crate::cfrac::{value, CFExpansion, CfError};
use crate::numkit::{HpComplex, HpReal, NumError, PrecisionContext};

/// Fewest terms accepted by the radius estimator.
pub const MIN_RADIUS_TERMS: usize = 64;

#[derive(Debug, Error)]
pub enum SiegelError {
    #[error("rotation number must be irrational")]
    RationalAlpha,
    #[error("need at least {need} terms, got {have}")]
    TooFewTerms { need: usize, have: usize },
    #[error("small divisor |lambda^{m} - lambda| vanishes at working precision")]
    SmallDivisor { m: usize },
    #[error("radius {rho} outside the trust region (limit {limit})")]
    TrustRegion { rho: f64, limit: f64 },
    #[error("truncation error {bound:e} at radius {rho} exceeds 1e-10")]
    Truncation { rho: f64, bound: f64 },
    #[error("boundary of the sub-disk of radius {rho} is not starlike")]
    NotStarlike { rho: f64 },
    #[error("corrupt coefficient record: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Cf(#[from] CfError),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Least-squares line through `(m, ln|b_m|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitDiagnostics {
    pub first_index: usize,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square deviation from the line.
    pub rms_residual: f64,
}

impl FitDiagnostics {
    pub fn radius(&self) -> f64 {
        (-self.slope).exp()
    }
}

/// Coefficients `b_1 = 1, b_2, ..., b_n` of `phi(zeta) = sum b_m zeta^m`.
#[derive(Debug, Clone)]
pub struct LinearizerSeries {
    alpha: CFExpansion,
    ctx: PrecisionContext,
    lambda: Complex64,
    coeffs: Vec<HpComplex>,
    /// `b_m R^m` with `R = radius_estimate`, for double evaluation.
    scaled: Vec<Complex64>,
    scaled_max: f64,
    radius_estimate: f64,
    fit: FitDiagnostics,
}

fn ln_abs(z: &HpComplex) -> f64 {
    z.norm_sqr().log2_abs() * 0.5 * std::f64::consts::LN_2
}

fn fit_line(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    (slope, intercept, rms)
}

impl LinearizerSeries {
    /// Assembles a series from stored coefficients.
    pub fn from_coefficients(alpha: CFExpansion, coeffs: Vec<HpComplex>, ctx: PrecisionContext) -> Result<Self, SiegelError> {
        if alpha.is_rational() {
            return Err(SiegelError::RationalAlpha);
        }
        if coeffs.len() < 2 {
            return Err(SiegelError::TooFewTerms { need: 2, have: coeffs.len() });
        }
        if coeffs[0].to_c64() != Complex64::new(1.0, 0.0) {
            return Err(SiegelError::Corrupt("b_1 must equal 1".into()));
        }
        let a = value(&alpha, ctx.with_guard(32))?;
        let lambda = HpComplex::cis_turns(&a).to_c64();
        let fit = Self::fit_window(&coeffs, coeffs.len() / 2);
        let radius_estimate = fit.radius();
        let r = HpReal::from_f64(radius_estimate, ctx);
        let mut power = r.clone();
        let mut scaled = Vec::with_capacity(coeffs.len());
        for b in &coeffs {
            scaled.push(b.scale(&power).to_c64());
            power = &power * &r;
        }
        let scaled_max = scaled.iter().map(|c| c.norm()).fold(0.0, f64::max);
        Ok(Self { alpha, ctx, lambda, coeffs, scaled, scaled_max, radius_estimate, fit })
    }

    /// Fit over indices `m >= n - window + 1`.
    fn fit_window(coeffs: &[HpComplex], window: usize) -> FitDiagnostics {
        let n = coeffs.len();
        let first = (n + 1 - window.clamp(2, n)).max(1);
        let pts: Vec<(f64, f64)> = (first..=n).map(|m| (m as f64, ln_abs(&coeffs[m - 1]))).collect();
        let (slope, intercept, rms_residual) = fit_line(&pts);
        FitDiagnostics { first_index: first, slope, intercept, rms_residual }
    }

    pub fn alpha(&self) -> &CFExpansion {
        &self.alpha
    }

    pub fn context(&self) -> PrecisionContext {
        self.ctx
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn n_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self) -> &[HpComplex] {
        &self.coeffs
    }

    /// `b_m` for `m >= 1`, rounded to double (may overflow for large `m`).
    pub fn coefficient(&self, m: usize) -> Complex64 {
        self.coeffs[m - 1].to_c64()
    }

    pub fn radius_estimate(&self) -> f64 {
        self.radius_estimate
    }

    pub fn fit_diagnostics(&self) -> FitDiagnostics {
        self.fit
    }

    /// Number of terms needed for double accuracy at `|zeta| = s`.
    fn terms_for(&self, s: f64) -> usize {
        let w = s / self.radius_estimate;
        if w <= 0.0 {
            return 1;
        }
        if w >= 0.99 || self.scaled_max <= 0.0 {
            return self.scaled.len();
        }
        let need = ((1e-18 * (1.0 - w) * w / self.scaled_max).ln() / w.ln()).ceil();
        (need.max(1.0) as usize).min(self.scaled.len())
    }

    /// `phi(zeta)` in double precision.
    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        self.eval_with_derivative(zeta).0
    }

    /// `(phi(zeta), phi'(zeta))` in double precision.
    pub fn eval_with_derivative(&self, zeta: Complex64) -> (Complex64, Complex64) {
        let r = self.radius_estimate;
        let w = zeta / r;
        let m = self.terms_for(zeta.norm());
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in self.scaled[..m].iter().rev() {
            dp = dp * w + p;
            p = p * w + c;
        }
        // p(w) = sum c_j w^{j-1}; phi = w p(w); phi' = (p + w p'(w)) / r
        (w * p, (p + w * dp) / r)
    }

    /// `phi(zeta)` evaluated with every stored term at the series precision.
    pub fn eval_hp(&self, zeta: &HpComplex) -> HpComplex {
        let mut acc = HpComplex::zero(self.ctx);
        for b in self.coeffs.iter().rev() {
            acc = &(&acc * zeta) + b;
        }
        &acc * zeta
    }

    /// Estimated truncation error of the stored series at `|zeta| = rho`.
    pub fn truncation_bound(&self, rho: f64) -> f64 {
        let w = rho / self.radius_estimate;
        if w >= 1.0 {
            return f64::INFINITY;
        }
        let n = self.coeffs.len() as f64;
        (self.fit.intercept + (n + 1.0) * (rho.ln() + self.fit.slope)).exp() / (1.0 - w)
    }

    /// `max |phi(lambda zeta) - lambda phi(zeta) - phi(zeta)^2|` over `samples` points of `|zeta| = s`.
    pub fn functional_residual(&self, s: f64, samples: usize) -> f64 {
        (0..samples)
            .map(|j| {
                let zeta = Complex64::from_polar(s, std::f64::consts::TAU * j as f64 / samples as f64);
                let p = self.eval(zeta);
                (self.eval(self.lambda * zeta) - self.lambda * p - p * p).norm()
            })
            .fold(0.0, f64::max)
    }

    /// The same series for `-alpha`: conjugated coefficients.
    pub fn conjugate(&self) -> Result<Self, SiegelError> {
        let neg = negate_cf(&self.alpha)?;
        let coeffs = self.coeffs.iter().map(HpComplex::conj).collect();
        Self::from_coefficients(neg, coeffs, self.ctx)
    }
}

/// Expansion of `-x` from that of `x = [a0; a1, a2, ...]`:
/// `[-a0 - 1; 1, a1 - 1, a2, ...]`, or `[-a0 - 1; a2 + 1, a3, ...]` when `a1 = 1`.
fn negate_cf(cf: &CFExpansion) -> Result<CFExpansion, SiegelError> {
    use crate::cfrac::Tail;
    use num_bigint::BigUint;
    use num_traits::One;
    let Tail::Periodic(period) = cf.tail() else {
        return Err(SiegelError::RationalAlpha);
    };
    let mut digits = cf.prefix().to_vec();
    while digits.len() < 2 {
        digits.extend(period.iter().cloned());
    }
    let one = BigUint::one();
    let a1 = digits.remove(0);
    if a1 > one {
        digits.insert(0, &a1 - &one);
        digits.insert(0, one);
    } else {
        digits[0] += one;
    }
    Ok(CFExpansion::new(-cf.a0() - 1, digits, cf.tail().clone())?)
}

/// `b_1..b_n` from `b_m (lambda^m - lambda) = sum_{i+j=m} b_i b_j`.
pub fn linearizer_coeffs(alpha: &CFExpansion, n: usize, ctx: PrecisionContext) -> Result<LinearizerSeries, SiegelError> {
    if alpha.is_rational() {
        return Err(SiegelError::RationalAlpha);
    }
    if n < 2 {
        return Err(SiegelError::TooFewTerms { need: 2, have: n });
    }
    if n > 500 && ctx.bits() < 128 {
        log::warn!("{n} terms at {} bits: small divisors may swamp the working precision", ctx.bits());
    }
    // guard bits absorb the growth of m * alpha
    let a = value(alpha, ctx.with_guard(32 + usize::BITS as usize - n.leading_zeros() as usize))?;
    let lambda = HpComplex::cis_turns(&a).round_to(ctx);
    let tiny = HpReal::from_f64(16.0 * ctx.epsilon(), ctx);
    let mut coeffs: Vec<HpComplex> = Vec::with_capacity(n);
    coeffs.push(HpComplex::one(ctx));
    for m in 2..=n {
        let ma = &a * &HpReal::from_i64(m as i64, a.context());
        let lm = HpComplex::cis_turns(&ma.frac()).round_to(ctx);
        let divisor = &lm - &lambda;
        if divisor.abs() <= tiny {
            return Err(SiegelError::SmallDivisor { m });
        }
        let mut acc = HpComplex::zero(ctx);
        for i in 1..=(m - 1) / 2 {
            acc = &acc + &(&coeffs[i - 1] * &coeffs[m - i - 1]);
        }
        acc = &acc + &acc;
        if m % 2 == 0 {
            let h = &coeffs[m / 2 - 1];
            acc = &acc + &(h * h);
        }
        coeffs.push(&acc / &divisor);
    }
    LinearizerSeries::from_coefficients(alpha.clone(), coeffs, ctx)
}

/// Radius with the spread between half- and quarter-window fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusEstimate {
    pub value: f64,
    pub uncertainty: f64,
    /// `ln|b_m|` bends upward across the window: growth looks faster than geometric.
    pub divergence_suspected: bool,
}

pub fn conformal_radius_estimate(series: &LinearizerSeries) -> Result<RadiusEstimate, SiegelError> {
    let n = series.n_terms();
    if n < MIN_RADIUS_TERMS {
        return Err(SiegelError::TooFewTerms { need: MIN_RADIUS_TERMS, have: n });
    }
    let half = series.fit;
    let quarter = LinearizerSeries::fit_window(&series.coeffs, n / 4);
    // slope over the third quarter against the last quarter
    let third = {
        let lo = n / 2 + 1;
        let hi = 3 * n / 4;
        let pts: Vec<(f64, f64)> = (lo..=hi).map(|m| (m as f64, ln_abs(&series.coeffs[m - 1]))).collect();
        fit_line(&pts).0
    };
    let bend = quarter.slope - third;
    let divergence_suspected = bend > 0.25 * third.abs().max(0.2);
    Ok(RadiusEstimate {
        value: half.radius(),
        uncertainty: (half.radius() - quarter.radius()).abs(),
        divergence_suspected,
    })
}
