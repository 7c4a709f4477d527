use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{HpComplex, HpReal, NumError, PrecisionContext};

const MAX_ITER_DOUBLE: usize = 500;
const MAX_ITER_WIDE: usize = 400;

/// Dense polynomial with complex coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    /// Builds a polynomial, dropping exactly-zero leading coefficients.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `z`.
    pub fn identity() -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots.iter().fold(Self::constant(Complex64::new(1.0, 0.0)), |acc, &r| {
            acc.mul(&Self::new(vec![-r, Complex64::new(1.0, 0.0)]))
        })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex64::new(0.0, 0.0)
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by a single Horner sweep.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `sum |c_k| |z|^k`, the scale against which residuals are judged.
    pub fn abs_eval(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(Complex64::new(0.0, 0.0));
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        Self::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(zero)
                        + other.coeffs.get(k).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Self::constant(Complex64::new(1.0, 0.0));
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// All roots in double precision.
    pub fn roots(&self) -> Result<Vec<Complex64>, NumError> {
        aberth_double(self)
    }
}

fn check_degree(p: &Polynomial) -> Result<(), NumError> {
    if p.is_zero() {
        return Err(NumError::Degenerate("zero polynomial has no finite root set"));
    }
    if p.degree() == 0 {
        return Err(NumError::Degenerate("constant polynomial has no roots"));
    }
    Ok(())
}

/// Splits off the exact root at zero of multiplicity `m`.
fn strip_zero_roots(p: &Polynomial) -> (usize, Polynomial) {
    let zero = Complex64::new(0.0, 0.0);
    let m = p.coeffs.iter().take_while(|&&c| c == zero).count();
    (m, Polynomial::new(p.coeffs[m..].to_vec()))
}

fn initial_guesses(p: &Polynomial) -> Vec<Complex64> {
    let d = p.degree();
    let lead = p.leading().norm();
    // radius of the circle that carries the geometric mean of the root moduli
    let r = (p.coeffs[0].norm() / lead).powf(1.0 / d as f64);
    let r = if r.is_finite() && r > 0.0 { r } else { 1.0 };
    (0..d)
        .map(|k| Complex64::from_polar(r, TAU * k as f64 / d as f64 + 0.4))
        .collect()
}

fn aberth_double(p: &Polynomial) -> Result<Vec<Complex64>, NumError> {
    check_degree(p)?;
    let (m, q) = strip_zero_roots(p);
    let mut roots = vec![Complex64::new(0.0, 0.0); m];
    if q.degree() == 0 {
        return Ok(roots);
    }
    if q.degree() == 1 {
        roots.push(-q.coeffs[0] / q.coeffs[1]);
        return Ok(roots);
    }
    let eps = f64::EPSILON;
    let mut z = initial_guesses(&q);
    let d = z.len();
    let mut done = vec![false; d];
    let mut iterations = 0;
    while iterations < MAX_ITER_DOUBLE && done.iter().any(|&f| !f) {
        iterations += 1;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (v, dv) = q.eval_with_derivative(z[i]);
            if v.norm() <= 4.0 * eps * q.abs_eval(z[i]) {
                done[i] = true;
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = z[i] - z[j];
                    if diff.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                if step.norm() <= eps * z[i].norm() {
                    done[i] = true;
                }
            } else {
                // nudge off a critical point of q
                let kick = Complex64::new(eps.sqrt(), eps.sqrt()) * (1.0 + z[i].norm());
                z[i] += kick;
            }
        }
    }
    let worst = z
        .iter()
        .map(|&r| q.eval(r).norm() / q.abs_eval(r).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    if worst > 1e3 * eps && done.iter().any(|&f| !f) {
        return Err(NumError::NoConvergence { iterations, residual: worst });
    }
    roots.extend(z);
    Ok(roots)
}

struct HpPoly {
    coeffs: Vec<HpComplex>,
    abs: Vec<HpReal>,
}

impl HpPoly {
    fn from_poly(p: &Polynomial, ctx: PrecisionContext) -> Self {
        let coeffs: Vec<_> = p.coeffs.iter().map(|&c| HpComplex::from_c64(c, ctx)).collect();
        let abs = coeffs.iter().map(|c| c.abs()).collect();
        Self { coeffs, abs }
    }

    fn eval_with_derivative(&self, z: &HpComplex) -> (HpComplex, HpComplex) {
        let ctx = z.context();
        let mut p = HpComplex::zero(ctx);
        let mut dp = HpComplex::zero(ctx);
        for c in self.coeffs.iter().rev() {
            dp = &(&dp * z) + &p;
            p = &(&p * z) + c;
        }
        (p, dp)
    }

    fn abs_eval(&self, z: &HpComplex) -> HpReal {
        let r = z.abs();
        let ctx = r.context();
        self.abs.iter().rev().fold(HpReal::zero(ctx), |acc, c| &(&acc * &r) + c)
    }
}

fn aberth_wide(p: &Polynomial, ctx: PrecisionContext) -> Result<Vec<HpComplex>, NumError> {
    let start = aberth_double(p)?;
    let (m, q) = strip_zero_roots(p);
    let mut roots: Vec<HpComplex> = (0..m).map(|_| HpComplex::zero(ctx)).collect();
    let mut z: Vec<HpComplex> = start[m..].iter().map(|&r| HpComplex::from_c64(r, ctx)).collect();
    if z.is_empty() {
        return Ok(roots);
    }
    let hq = HpPoly::from_poly(&q, ctx);
    let stop = HpReal::from_f64(16.0 * ctx.epsilon(), ctx);
    let d = z.len();
    let mut done = vec![false; d];
    let mut iterations = 0;
    while iterations < MAX_ITER_WIDE && done.iter().any(|&f| !f) {
        iterations += 1;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (v, dv) = hq.eval_with_derivative(&z[i]);
            if v.abs() <= &stop * &hq.abs_eval(&z[i]) {
                done[i] = true;
                continue;
            }
            if dv.is_zero() {
                continue;
            }
            let ratio = &v / &dv;
            let mut repulsion = HpComplex::zero(ctx);
            for j in 0..d {
                if j != i {
                    let diff = &z[i] - &z[j];
                    if !diff.is_zero() {
                        repulsion = &repulsion + &(&HpComplex::one(ctx) / &diff);
                    }
                }
            }
            let denom = &HpComplex::one(ctx) - &(&ratio * &repulsion);
            if denom.is_zero() {
                continue;
            }
            let step = &ratio / &denom;
            z[i] = &z[i] - &step;
        }
    }
    roots.extend(z);
    Ok(roots)
}

/// Every root of `p` with multiplicity, refined to the precision of `ctx`.
///
/// Double contexts run Aberth–Ehrlich iteration directly; wider contexts
/// polish the double roots with the same simultaneous correction carried
/// out in the wide arithmetic.
pub fn poly_roots(p: &Polynomial, ctx: PrecisionContext) -> Result<Vec<HpComplex>, NumError> {
    check_degree(p)?;
    if ctx.is_double() {
        return Ok(aberth_double(p)?
            .into_iter()
            .map(|r| HpComplex::from_c64(r, ctx))
            .collect());
    }
    aberth_wide(p, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn difference_of_squares() {
        let r = sorted(Polynomial::from_real(&[-1.0, 0.0, 1.0]).roots().unwrap());
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn cube_roots_of_unity_pair() {
        // quadratic formula: (-1 +- i sqrt 3) / 2
        let oracle = [c(-0.5, 3f64.sqrt() / 2.0), c(-0.5, -(3f64.sqrt()) / 2.0)];
        let r = Polynomial::from_real(&[1.0, 1.0, 1.0]).roots().unwrap();
        for o in oracle {
            assert!(r.iter().any(|x| (x - o).norm() < 1e-14));
        }
    }

    #[test]
    fn constructed_cubic() {
        let p = Polynomial::from_real(&[-6.0, 11.0, -6.0, 1.0]);
        let r = sorted(p.roots().unwrap());
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - c(want, 0.0)).norm() < 1e-12, "{got}");
        }
    }

    #[test]
    fn zero_polynomial_is_degenerate() {
        let z = Polynomial::new(vec![c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            poly_roots(&z, PrecisionContext::double()),
            Err(NumError::Degenerate(_))
        ));
    }

    #[test]
    fn exact_zero_roots_are_split_off() {
        let p = Polynomial::from_real(&[0.0, 0.0, -1.0, 1.0]);
        let r = sorted(p.roots().unwrap());
        assert_eq!(r[0], c(0.0, 0.0));
        assert_eq!(r[1], c(0.0, 0.0));
        assert!((r[2] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn double_root_meets_backward_error() {
        let p = Polynomial::from_roots(&[c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 1.0)]);
        let ctx = PrecisionContext::double();
        for r in poly_roots(&p, ctx).unwrap() {
            let z = r.to_c64();
            let bound = 1e3 * ctx.epsilon() * p.max_abs_coeff() * (1.0 + z.norm()).powi(3);
            assert!(p.eval(z).norm() <= bound);
        }
    }

    #[test]
    fn wide_refinement_reaches_wide_residual() {
        let ctx = PrecisionContext::wide();
        let p = Polynomial::from_real(&[1.0, 1.0, 1.0]);
        let hp = HpPoly::from_poly(&p, ctx);
        for r in poly_roots(&p, ctx).unwrap() {
            let (v, _) = hp.eval_with_derivative(&r);
            let bound = 1e3 * ctx.epsilon() * (1.0 + r.abs().to_f64()).powi(2);
            assert!(v.abs().to_f64() <= bound, "{:e}", v.abs().to_f64());
        }
    }

    #[test]
    fn derivative_and_arithmetic() {
        let p = Polynomial::from_real(&[1.0, 2.0, 3.0]);
        assert_eq!(p.derivative(), Polynomial::from_real(&[2.0, 6.0]));
        assert_eq!(p.sub(&p), Polynomial::from_real(&[0.0]));
        assert_eq!(Polynomial::identity().pow(3), Polynomial::from_real(&[0.0, 0.0, 0.0, 1.0]));
    }
}
