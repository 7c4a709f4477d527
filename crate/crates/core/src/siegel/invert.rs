use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::{LinearizerSeries, SiegelError};

/// Largest admissible `rho / radius_estimate`.
pub const TRUST_FACTOR: f64 = 0.8;

const RESIDUAL_TOL: f64 = 1e-10;
const TRUNCATION_TOL: f64 = 1e-10;

fn check_rho(series: &LinearizerSeries, rho: f64) -> Result<(), SiegelError> {
    let limit = TRUST_FACTOR * series.radius_estimate();
    if !(rho > 0.0) || rho > limit * (1.0 + 1e-12) {
        return Err(SiegelError::TrustRegion { rho, limit });
    }
    let bound = series.truncation_bound(rho);
    if bound > TRUNCATION_TOL {
        return Err(SiegelError::Truncation { rho, bound });
    }
    Ok(())
}

fn newton(series: &LinearizerSeries, target: Complex64, mut zeta: Complex64, cap: f64) -> Option<Complex64> {
    for _ in 0..60 {
        let (p, dp) = series.eval_with_derivative(zeta);
        let g = p - target;
        if g.norm() < 1e-15 * target.norm().max(1e-3) {
            return Some(zeta);
        }
        if dp == Complex64::new(0.0, 0.0) {
            return None;
        }
        let next = zeta - g / dp;
        if !next.is_finite() || next.norm() > cap {
            return None;
        }
        let converged = (next - zeta).norm() < 1e-16 * next.norm().max(1e-3);
        zeta = next;
        if converged {
            return Some(zeta);
        }
    }
    Some(zeta)
}

/// The point `zeta` with `phi(zeta) = z` and `|zeta| < rho`, if there is one.
///
/// Newton's method starts at `zeta = z` (`phi'(0) = 1`) and falls back to
/// continuation along `s z`, `s` in `(0, 1]`. The Koebe growth bound
/// `|phi(zeta)| <= |zeta| / (1 - |zeta|/r)^2` rejects far points without iterating.
pub fn invert_linearizer(series: &LinearizerSeries, z: Complex64, rho: f64) -> Result<Option<Complex64>, SiegelError> {
    check_rho(series, rho)?;
    Ok(invert_unchecked(series, z, rho))
}

pub(super) fn invert_unchecked(series: &LinearizerSeries, z: Complex64, rho: f64) -> Option<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Some(z);
    }
    let r = series.radius_estimate();
    let koebe = rho / (1.0 - rho / r).powi(2);
    if z.norm() > koebe {
        return None;
    }
    let cap = 0.95 * r;
    let accept = |zeta: Complex64| {
        let res = (series.eval(zeta) - z).norm();
        (res < RESIDUAL_TOL && zeta.norm() < rho).then_some(zeta)
    };
    if let Some(zeta) = newton(series, z, z, cap) {
        if let Some(ok) = accept(zeta) {
            return Some(ok);
        }
        if (series.eval(zeta) - z).norm() < RESIDUAL_TOL {
            // converged, but outside the sub-disk
            return None;
        }
    }
    let mut zeta = Complex64::new(0.0, 0.0);
    const STEPS: usize = 16;
    for k in 1..=STEPS {
        let target = z * (k as f64 / STEPS as f64);
        zeta = newton(series, target, zeta, cap)?;
    }
    accept(zeta)
}

/// Fast membership test for `phi(D(rho))` when its boundary is starlike
/// about the origin: the boundary is sampled as a polygon indexed by angle.
#[derive(Debug, Clone)]
pub struct SubdiskTable {
    rho: f64,
    vertices: Vec<Complex64>,
    angles: Vec<f64>,
    inner: f64,
    outer: f64,
}

impl SubdiskTable {
    pub fn new(series: &LinearizerSeries, rho: f64, samples: usize) -> Result<Self, SiegelError> {
        check_rho(series, rho)?;
        let samples = samples.max(64);
        let vertices: Vec<Complex64> =
            (0..samples).map(|j| series.eval(Complex64::from_polar(rho, TAU * j as f64 / samples as f64))).collect();
        let mut angles = Vec::with_capacity(samples + 1);
        let mut theta = vertices[0].arg();
        angles.push(theta);
        for j in 1..=samples {
            let step = (vertices[j % samples] / vertices[j - 1]).arg();
            if !(step > 0.0 && step < PI / 4.0) {
                return Err(SiegelError::NotStarlike { rho });
            }
            theta += step;
            angles.push(theta);
        }
        if (theta - angles[0] - TAU).abs() > 1e-9 {
            return Err(SiegelError::NotStarlike { rho });
        }
        let inner = vertices
            .iter()
            .zip(vertices.iter().cycle().skip(1))
            .map(|(a, b)| distance_to_line(*a, *b))
            .fold(f64::INFINITY, f64::min);
        let outer = vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Ok(Self { rho, vertices, angles, inner, outer })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        if r < self.inner {
            return true;
        }
        if r > self.outer {
            return false;
        }
        let t0 = self.angles[0];
        let t = t0 + (z.arg() - t0).rem_euclid(TAU);
        let j = self.angles.partition_point(|&a| a <= t).saturating_sub(1).min(self.vertices.len() - 1);
        let a = self.vertices[j];
        let b = self.vertices[(j + 1) % self.vertices.len()];
        let e = b - a;
        let d = z - a;
        e.re * d.im - e.im * d.re > 0.0
    }
}

/// Distance from the origin to the line through `a` and `b`.
fn distance_to_line(a: Complex64, b: Complex64) -> f64 {
    let e = b - a;
    (a.re * e.im - a.im * e.re).abs() / e.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfrac::CFExpansion;
    use crate::numkit::PrecisionContext;
    use crate::siegel::linearizer_coeffs;

    fn golden() -> LinearizerSeries {
        linearizer_coeffs(&CFExpansion::golden(), 256, PrecisionContext::new(128).unwrap()).unwrap()
    }

    #[test]
    fn origin_and_round_trip() {
        let s = golden();
        let rho = 0.5 * s.radius_estimate();
        assert_eq!(invert_linearizer(&s, Complex64::new(0.0, 0.0), rho).unwrap(), Some(Complex64::new(0.0, 0.0)));
        let half = Complex64::new(rho / 2.0, 0.0);
        let zeta = invert_linearizer(&s, s.eval(half), rho).unwrap().unwrap();
        assert!((zeta - half).norm() < 1e-10);
        for j in 0..16 {
            let w = Complex64::from_polar(0.9 * rho, TAU * j as f64 / 16.0);
            let zeta = invert_linearizer(&s, s.eval(w), rho).unwrap().unwrap();
            assert!((zeta - w).norm() < 1e-10);
        }
    }

    #[test]
    fn far_points_and_trust_region() {
        let s = golden();
        let rho = 0.5 * s.radius_estimate();
        assert_eq!(invert_linearizer(&s, Complex64::new(10.0, 0.0), rho).unwrap(), None);
        let outside = s.eval(Complex64::new(0.7 * s.radius_estimate(), 0.0));
        assert_eq!(invert_linearizer(&s, outside, rho).unwrap(), None);
        assert!(matches!(
            invert_linearizer(&s, Complex64::new(0.0, 0.0), 0.9 * s.radius_estimate()),
            Err(SiegelError::TrustRegion { .. })
        ));
    }

    #[test]
    fn short_series_fails_truncation() {
        let s = linearizer_coeffs(&CFExpansion::golden(), 64, PrecisionContext::double()).unwrap();
        assert!(matches!(
            invert_linearizer(&s, Complex64::new(0.0, 0.0), 0.8 * s.radius_estimate()),
            Err(SiegelError::Truncation { .. })
        ));
    }

    #[test]
    fn table_agrees_with_inversion() {
        let s = golden();
        let rho = 0.5 * s.radius_estimate();
        let table = SubdiskTable::new(&s, rho, 4096).unwrap();
        let mut disagreements = 0;
        let mut total = 0;
        for i in -40..=40 {
            for j in -40..=40 {
                let z = Complex64::new(i as f64, j as f64) * (0.3 / 40.0);
                total += 1;
                if table.contains(z) != invert_linearizer(&s, z, rho).unwrap().is_some() {
                    disagreements += 1;
                }
            }
        }
        // only points within the polygon's chord error of the boundary may differ
        assert!(disagreements * 200 < total, "{disagreements}/{total}");
    }
}
