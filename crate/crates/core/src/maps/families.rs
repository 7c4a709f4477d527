use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{HoloMap, MapError, Sphere, POLE_GUARD};
use crate::cfrac::{value, CFExpansion};
use crate::numkit::{HpComplex, Polynomial, PrecisionContext};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn cis_turns(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * x.rem_euclid(1.0))
}

/// `N(z) / D(z)` with reciprocal evaluation next to a pole.
/// `den_scale` bounds the terms summed into `den`, so a denominator below its
/// rounding error counts as an exact pole.
fn eval_quotient(num: Complex64, den: Complex64, den_scale: f64, near_pole: bool) -> Sphere {
    if den.norm() <= 4.0 * f64::EPSILON * den_scale {
        return Sphere::Infinity;
    }
    if near_pole {
        let recip = den / num;
        if recip == ZERO || !num.is_finite() {
            return Sphere::Infinity;
        }
        return Sphere::from(recip.inv());
    }
    if den == ZERO {
        return Sphere::Infinity;
    }
    Sphere::from(num / den)
}

/// `P(z) = lambda z + z^2` with `lambda = exp(2 pi i alpha)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSiegelMap {
    pub alpha: f64,
    pub lambda: Complex64,
}

impl QuadraticSiegelMap {
    pub fn new(alpha: f64) -> Self {
        Self { alpha, lambda: cis_turns(alpha) }
    }

    /// Multiplier computed from the exact expansion at wide precision.
    pub fn from_cf(alpha: &CFExpansion) -> Result<Self, MapError> {
        let ctx = PrecisionContext::wide();
        let a = value(alpha, ctx).map_err(|e| MapError::InvalidParameter(e.to_string()))?;
        let lambda = HpComplex::cis_turns(&a).to_c64();
        Ok(Self { alpha: a.frac().to_f64(), lambda })
    }

    /// The critical point `-lambda / 2`.
    pub fn critical_point(&self) -> Complex64 {
        -self.lambda / 2.0
    }
}

impl HoloMap for QuadraticSiegelMap {
    fn family(&self) -> &'static str {
        "quadratic"
    }

    fn describe(&self) -> String {
        format!("family=quadratic alpha={}", self.alpha)
    }

    fn eval(&self, z: Complex64) -> Sphere {
        Sphere::from(self.lambda * z + z * z)
    }

    fn at_infinity(&self) -> Sphere {
        Sphere::Infinity
    }

    fn derivative(&self, z: Complex64) -> Result<Complex64, MapError> {
        Ok(self.lambda + 2.0 * z)
    }

    fn rational_form(&self) -> (Polynomial, Polynomial) {
        (Polynomial::new(vec![ZERO, self.lambda, ONE]), Polynomial::constant(ONE))
    }

    fn free_critical_points(&self) -> Vec<Complex64> {
        vec![self.critical_point()]
    }

    fn step(&self, z: Complex64) -> Complex64 {
        self.lambda * z + z * z
    }
}

/// `Q(z) = u z^2 (z - a) / (1 - k z)` with `k = (2a - 3) / (a - 2)`.
///
/// Critical points are `0, 1, infinity` and `c = a(a - 2) / (2a - 3)`; the
/// single pole is `b = (a - 2) / (2a - 3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicHermanMap {
    pub a: Complex64,
    pub u: Complex64,
    k: Complex64,
}

impl CubicHermanMap {
    pub fn new(a: Complex64, u: Complex64) -> Result<Self, MapError> {
        const FORBIDDEN: [f64; 5] = [0.0, 1.0, 1.5, 2.0, 3.0];
        if let Some(bad) = FORBIDDEN.iter().find(|&&x| (a - Complex64::new(x, 0.0)).norm() < 1e-12) {
            return Err(MapError::InvalidParameter(format!("a = {bad} degenerates the cubic family")));
        }
        if u.norm() < 1e-300 || !u.is_finite() || !a.is_finite() {
            return Err(MapError::InvalidParameter("u must be finite and nonzero".into()));
        }
        Ok(Self { a, u, k: (2.0 * a - 3.0) / (a - 2.0) })
    }

    /// The free critical point `a(a - 2) / (2a - 3)`.
    pub fn c(&self) -> Complex64 {
        self.a * (self.a - 2.0) / (2.0 * self.a - 3.0)
    }

    /// The pole `(a - 2) / (2a - 3)`.
    pub fn pole(&self) -> Complex64 {
        (self.a - 2.0) / (2.0 * self.a - 3.0)
    }

    fn parts(&self, z: Complex64) -> (Complex64, Complex64) {
        (self.u * z * z * (z - self.a), ONE - self.k * z)
    }
}

impl HoloMap for CubicHermanMap {
    fn family(&self) -> &'static str {
        "cubic-herman"
    }

    fn describe(&self) -> String {
        format!("family=cubic-herman a={} u={}", fmt_c(self.a), fmt_c(self.u))
    }

    fn eval(&self, z: Complex64) -> Sphere {
        let (n, d) = self.parts(z);
        eval_quotient(n, d, 1.0 + (self.k * z).norm(), (z - self.pole()).norm() < POLE_GUARD)
    }

    fn at_infinity(&self) -> Sphere {
        Sphere::Infinity
    }

    fn derivative(&self, z: Complex64) -> Result<Complex64, MapError> {
        let d = ONE - self.k * z;
        if (z - self.pole()).norm() < POLE_GUARD || d == ZERO {
            return Err(MapError::PoleDerivative(z));
        }
        let k = self.k;
        let a = self.a;
        let num = -2.0 * k * z * z * z + (3.0 + a * k) * z * z - 2.0 * a * z;
        Ok(self.u * num / (d * d))
    }

    fn rational_form(&self) -> (Polynomial, Polynomial) {
        (
            Polynomial::new(vec![ZERO, ZERO, -self.u * self.a, self.u]),
            Polynomial::new(vec![ONE, -self.k]),
        )
    }

    fn free_critical_points(&self) -> Vec<Complex64> {
        vec![ONE, self.c()]
    }

    fn superattracting_zero(&self) -> bool {
        true
    }

    fn parameter(&self) -> Option<Complex64> {
        Some(self.u)
    }

    fn parameter_derivative(&self, z: Complex64) -> Option<Complex64> {
        let (n, d) = self.parts(z);
        Some(n / (self.u * d))
    }

    fn with_parameter(&self, p: Complex64) -> Option<Box<dyn HoloMap>> {
        CubicHermanMap::new(self.a, p).ok().map(|m| Box::new(m) as Box<dyn HoloMap>)
    }

    fn step(&self, z: Complex64) -> Complex64 {
        let (n, d) = self.parts(z);
        n / d
    }
}

/// `f_t(z) = exp(2 pi i t) z^2 (z - a) / (1 - a z)`; `a = 3` is the
/// critically-marked Blaschke form, `a > 3` the smooth circle diffeomorphisms.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeMap {
    pub t: f64,
    pub a: Complex64,
    rot: Complex64,
}

impl BlaschkeMap {
    pub fn new(t: f64, a: f64) -> Result<Self, MapError> {
        if !(a >= 3.0) || !a.is_finite() || !t.is_finite() {
            return Err(MapError::InvalidParameter(format!("Blaschke family needs real a >= 3, got {a}")));
        }
        Ok(Self::with_complex_a(t, Complex64::new(a, 0.0)))
    }

    /// Unchecked constructor; a non-real `a` breaks circle invariance.
    pub fn with_complex_a(t: f64, a: Complex64) -> Self {
        Self { t, a, rot: cis_turns(t) }
    }

    pub fn with_t(&self, t: f64) -> Self {
        Self::with_complex_a(t, self.a)
    }
}

impl HoloMap for BlaschkeMap {
    fn family(&self) -> &'static str {
        "blaschke"
    }

    fn describe(&self) -> String {
        format!("family=blaschke t={} a={}", self.t, fmt_c(self.a))
    }

    fn eval(&self, z: Complex64) -> Sphere {
        let n = self.rot * z * z * (z - self.a);
        let d = ONE - self.a * z;
        let near = self.a != ZERO && (z - self.a.inv()).norm() < POLE_GUARD;
        eval_quotient(n, d, 1.0 + (self.a * z).norm(), near)
    }

    fn at_infinity(&self) -> Sphere {
        Sphere::Infinity
    }

    fn derivative(&self, z: Complex64) -> Result<Complex64, MapError> {
        let d = ONE - self.a * z;
        if d.norm() < POLE_GUARD * self.a.norm().max(1.0) {
            return Err(MapError::PoleDerivative(z));
        }
        let a = self.a;
        let num = -2.0 * a * z * z * z + (3.0 + a * a) * z * z - 2.0 * a * z;
        Ok(self.rot * num / (d * d))
    }

    fn rational_form(&self) -> (Polynomial, Polynomial) {
        (
            Polynomial::new(vec![ZERO, ZERO, -self.rot * self.a, self.rot]),
            Polynomial::new(vec![ONE, -self.a]),
        )
    }

    fn superattracting_zero(&self) -> bool {
        true
    }

    fn preserves_unit_circle(&self) -> bool {
        self.a.im == 0.0
    }

    fn step(&self, z: Complex64) -> Complex64 {
        self.rot * z * z * (z - self.a) / (ONE - self.a * z)
    }
}

/// `h_q(z) = z^2 (q - z) / (1 + conj(q) z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntipodalCubic {
    pub q: Complex64,
}

impl AntipodalCubic {
    pub fn new(q: Complex64) -> Result<Self, MapError> {
        if !q.is_finite() {
            return Err(MapError::InvalidParameter("q must be finite".into()));
        }
        Ok(Self { q })
    }
}

impl HoloMap for AntipodalCubic {
    fn family(&self) -> &'static str {
        "antipodal"
    }

    fn describe(&self) -> String {
        format!("family=antipodal q={}", fmt_c(self.q))
    }

    fn eval(&self, z: Complex64) -> Sphere {
        let n = z * z * (self.q - z);
        let d = ONE + self.q.conj() * z;
        let near = self.q != ZERO && (z + self.q.conj().inv()).norm() < POLE_GUARD;
        eval_quotient(n, d, 1.0 + (self.q * z).norm(), near)
    }

    fn at_infinity(&self) -> Sphere {
        Sphere::Infinity
    }

    fn derivative(&self, z: Complex64) -> Result<Complex64, MapError> {
        let d = ONE + self.q.conj() * z;
        if d.norm() < POLE_GUARD * self.q.norm().max(1.0) {
            return Err(MapError::PoleDerivative(z));
        }
        let q = self.q;
        let num = 2.0 * q * z + (q.norm_sqr() - 3.0) * z * z - 2.0 * q.conj() * z * z * z;
        Ok(num / (d * d))
    }

    fn rational_form(&self) -> (Polynomial, Polynomial) {
        (
            Polynomial::new(vec![ZERO, ZERO, self.q, -ONE]),
            Polynomial::new(vec![ONE, self.q.conj()]),
        )
    }

    fn superattracting_zero(&self) -> bool {
        true
    }
}

/// `z -> z^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub degree: u32,
}

impl Monomial {
    pub fn new(degree: u32) -> Result<Self, MapError> {
        if degree < 2 {
            return Err(MapError::InvalidParameter("monomial degree must be at least 2".into()));
        }
        Ok(Self { degree })
    }
}

impl HoloMap for Monomial {
    fn family(&self) -> &'static str {
        "monomial"
    }

    fn describe(&self) -> String {
        format!("family=monomial degree={}", self.degree)
    }

    fn eval(&self, z: Complex64) -> Sphere {
        Sphere::from(z.powu(self.degree))
    }

    fn at_infinity(&self) -> Sphere {
        Sphere::Infinity
    }

    fn derivative(&self, z: Complex64) -> Result<Complex64, MapError> {
        Ok(self.degree as f64 * z.powu(self.degree - 1))
    }

    fn rational_form(&self) -> (Polynomial, Polynomial) {
        let mut c = vec![ZERO; self.degree as usize + 1];
        c[self.degree as usize] = ONE;
        (Polynomial::new(c), Polynomial::constant(ONE))
    }

    fn superattracting_zero(&self) -> bool {
        true
    }

    fn preserves_unit_circle(&self) -> bool {
        true
    }

    fn step(&self, z: Complex64) -> Complex64 {
        z.powu(self.degree)
    }
}

/// The rigid rotation `z -> exp(2 pi i alpha) z`.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidRotation {
    pub alpha: f64,
    pub lambda: Complex64,
}

impl RigidRotation {
    pub fn new(alpha: f64) -> Self {
        Self { alpha, lambda: cis_turns(alpha) }
    }
}

impl HoloMap for RigidRotation {
    fn family(&self) -> &'static str {
        "rotation"
    }

    fn describe(&self) -> String {
        format!("family=rotation alpha={}", self.alpha)
    }

    fn eval(&self, z: Complex64) -> Sphere {
        Sphere::from(self.lambda * z)
    }

    fn at_infinity(&self) -> Sphere {
        Sphere::Infinity
    }

    fn derivative(&self, _z: Complex64) -> Result<Complex64, MapError> {
        Ok(self.lambda)
    }

    fn rational_form(&self) -> (Polynomial, Polynomial) {
        (Polynomial::new(vec![ZERO, self.lambda]), Polynomial::constant(ONE))
    }

    fn preserves_unit_circle(&self) -> bool {
        true
    }

    fn step(&self, z: Complex64) -> Complex64 {
        self.lambda * z
    }
}

pub(crate) fn fmt_c(z: Complex64) -> String {
    if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ring_map() -> CubicHermanMap {
        CubicHermanMap::new(c(2.0, 0.1), c(-3.98404183, 3.28819628)).unwrap()
    }

    fn central_difference(m: &dyn HoloMap, z: Complex64) -> Complex64 {
        let h = 1e-6 * (1.0 + z.norm());
        let f = |w: Complex64| m.eval(w).finite().unwrap();
        (f(z + h) - f(z - h)) / (2.0 * h)
    }

    #[test]
    fn origin_fixed_for_quadratic() {
        for alpha in [0.0, 0.3, 0.618] {
            assert_eq!(QuadraticSiegelMap::new(alpha).eval(ZERO), Sphere::Finite(ZERO));
        }
    }

    #[test]
    fn cubic_fixes_zero_and_infinity() {
        let q = ring_map();
        assert_eq!(q.eval(ZERO), Sphere::Finite(ZERO));
        assert_eq!(q.at_infinity(), Sphere::Infinity);
        assert_eq!(q.eval_sphere(Sphere::Infinity), Sphere::Infinity);
        assert_eq!(q.eval(q.pole()), Sphere::Infinity);
    }

    #[test]
    fn blaschke_fixes_rotation_at_one() {
        for (t, a) in [(0.0, 4.0), (0.25, 3.0), (0.7, 5.5)] {
            let f = BlaschkeMap::new(t, a).unwrap();
            let w = f.eval(ONE).finite().unwrap();
            assert!((w - cis_turns(t)).norm() < 1e-15);
        }
        assert!(BlaschkeMap::new(0.1, 2.0).is_err());
    }

    #[test]
    fn quadratic_critical_point() {
        let p = QuadraticSiegelMap::new(0.3819660112501051);
        assert!(p.derivative(p.critical_point()).unwrap().norm() < 1e-15);
        assert_eq!(Monomial::new(2).unwrap().derivative(ONE).unwrap(), c(2.0, 0.0));
    }

    #[test]
    fn cubic_critical_points() {
        let q = ring_map();
        assert!(q.derivative(ONE).unwrap().norm() < 1e-13);
        assert!(q.derivative(q.c()).unwrap().norm() < 1e-13);
        assert!(q.derivative(ZERO).unwrap().norm() == 0.0);
        assert!(matches!(q.derivative(q.pole()), Err(MapError::PoleDerivative(_))));
    }

    #[test]
    fn critical_set_is_exactly_zero_one_c() {
        // numerator of Q' up to the factor u: -2k z^3 + (3 + a k) z^2 - 2 a z
        let q = ring_map();
        let k = (2.0 * q.a - 3.0) / (q.a - 2.0);
        let num = Polynomial::new(vec![ZERO, -2.0 * q.a, 3.0 + q.a * k, -2.0 * k]);
        let roots = num.roots().unwrap();
        assert_eq!(roots.len(), 3);
        for expected in [ZERO, ONE, q.c()] {
            assert!(roots.iter().any(|r| (r - expected).norm() < 1e-12), "{expected}");
        }
    }

    #[test]
    fn degenerate_cubic_parameters() {
        for a in [0.0, 1.0, 1.5, 2.0, 3.0] {
            assert!(CubicHermanMap::new(c(a, 0.0), ONE).is_err());
        }
        assert!(CubicHermanMap::new(c(2.0, 0.1), ZERO).is_err());
    }

    #[test]
    fn derivatives_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let maps: Vec<Box<dyn HoloMap>> = vec![
            Box::new(QuadraticSiegelMap::new(0.618)),
            Box::new(ring_map()),
            Box::new(BlaschkeMap::new(0.3, 4.0).unwrap()),
            Box::new(AntipodalCubic::new(c(1.5, -0.7)).unwrap()),
            Box::new(Monomial::new(3).unwrap()),
            Box::new(RigidRotation::new(0.2)),
        ];
        for m in &maps {
            for _ in 0..50 {
                let z = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                let exact = m.derivative(z).unwrap();
                let fd = central_difference(m.as_ref(), z);
                assert!((exact - fd).norm() <= 1e-6 * exact.norm().max(1.0), "{} at {z}", m.family());
            }
        }
    }

    #[test]
    fn conjugate_symmetry_of_quadratic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = QuadraticSiegelMap::new(0.2718);
        let pm = QuadraticSiegelMap::new(-0.2718);
        for _ in 0..100 {
            let z = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let lhs = pm.eval(z.conj()).finite().unwrap().conj();
            assert!((lhs - p.eval(z).finite().unwrap()).norm() < 1e-14);
        }
    }

    #[test]
    fn unit_circle_invariance_on_dense_grid() {
        for (t, a) in [(0.0, 3.0), (0.37, 4.0), (0.9, 10.0)] {
            let f = BlaschkeMap::new(t, a).unwrap();
            let worst = (0..10_000)
                .map(|j| {
                    let z = Complex64::from_polar(1.0, TAU * j as f64 / 1e4);
                    (f.eval(z).finite().unwrap().norm() - 1.0).abs()
                })
                .fold(0.0, f64::max);
            assert!(worst < 1e-12, "t={t} a={a}: {worst:e}");
        }
    }

    #[test]
    fn parameter_derivative_matches_difference() {
        let q = ring_map();
        let z = c(0.4, 0.3);
        let h = 1e-7;
        let shifted = q.with_parameter(q.u + h).unwrap();
        let fd = (shifted.eval(z).finite().unwrap() - q.eval(z).finite().unwrap()) / h;
        assert!((fd - q.parameter_derivative(z).unwrap()).norm() < 1e-6);
    }

    #[test]
    fn near_pole_uses_reciprocal() {
        let q = ring_map();
        let z = q.pole() + c(1e-12, 0.0);
        match q.eval(z) {
            Sphere::Finite(w) => assert!(w.norm() > 1e9),
            Sphere::Infinity => {}
        }
    }

    #[test]
    fn golden_multiplier_from_cf() {
        let p = QuadraticSiegelMap::from_cf(&CFExpansion::golden()).unwrap();
        let g = (5f64.sqrt() - 1.0) / 2.0;
        assert!((p.alpha - g).abs() < 1e-15);
        assert!((p.lambda - cis_turns(g)).norm() < 1e-15);
    }

    #[test]
    fn complex_formatting() {
        assert_eq!(fmt_c(c(2.0, 0.1)), "2+0.1i");
        assert_eq!(fmt_c(c(-3.98404183, 3.28819628)), "-3.98404183+3.28819628i");
        assert_eq!(fmt_c(c(1.0, -2.0)), "1-2i");
    }
}
