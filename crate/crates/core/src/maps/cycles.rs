use num_complex::Complex64;

use super::{HoloMap, MapError, Sphere};
use crate::numkit::Polynomial;

/// Largest fixed-point polynomial degree handed to the root finder.
pub const MAX_ITERATE_DEGREE: usize = 81;

const GROUP_TOL: f64 = 1e-6;
const RESIDUAL_TOL: f64 = 1e-8;

/// One periodic cycle, starting at its smallest point in `(re, im)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord {
    pub period: usize,
    pub points: Vec<Complex64>,
    /// Product of derivatives along the cycle; `None` if it passes a pole.
    pub multiplier: Option<Complex64>,
    /// Largest `|f^period(z) - z|` over the cycle.
    pub residual: f64,
}

/// Numerator and denominator of the `p`-th iterate.
pub fn iterate_rational(map: &dyn HoloMap, p: usize) -> (Polynomial, Polynomial) {
    let (n1, d1) = map.rational_form();
    let deg = n1.degree().max(d1.degree());
    let mut n = Polynomial::identity();
    let mut d = Polynomial::constant(Complex64::new(1.0, 0.0));
    for _ in 0..p {
        // homogeneous substitution z = n / d into n1 / d1
        let npow: Vec<Polynomial> = (0..=deg).map(|i| n.pow(i)).collect();
        let dpow: Vec<Polynomial> = (0..=deg).map(|i| d.pow(i)).collect();
        let compose = |c: &Polynomial| {
            let mut acc = Polynomial::constant(Complex64::new(0.0, 0.0));
            for (i, &ci) in c.coeffs().iter().enumerate() {
                if ci != Complex64::new(0.0, 0.0) {
                    acc = acc.add(&npow[i].mul(&dpow[deg - i]).scale(ci));
                }
            }
            acc
        };
        let next_n = compose(&n1);
        let next_d = compose(&d1);
        n = next_n;
        d = next_d;
    }
    (n, d)
}

fn orbit_value(map: &dyn HoloMap, z: Complex64, k: usize) -> Option<Complex64> {
    let mut w = z;
    for _ in 0..k {
        w = map.eval(w).finite()?;
    }
    Some(w)
}

/// `f^k(z)` and its derivative by the chain rule.
fn iterate_with_derivative(map: &dyn HoloMap, z: Complex64, k: usize) -> Option<(Complex64, Complex64)> {
    let mut w = z;
    let mut dw = Complex64::new(1.0, 0.0);
    for _ in 0..k {
        dw *= map.derivative(w).ok()?;
        w = map.eval(w).finite()?;
    }
    Some((w, dw))
}

fn polish(map: &dyn HoloMap, z0: Complex64, p: usize) -> Complex64 {
    let residual = |z: Complex64| orbit_value(map, z, p).map_or(f64::INFINITY, |w| (w - z).norm());
    let mut z = z0;
    let mut best = residual(z);
    for _ in 0..30 {
        let Some((w, dw)) = iterate_with_derivative(map, z, p) else { break };
        let g = w - z;
        let dg = dw - 1.0;
        if dg == Complex64::new(0.0, 0.0) {
            break;
        }
        let cand = z - g / dg;
        let r = residual(cand);
        if !(r < best) {
            break;
        }
        z = cand;
        best = r;
        if best == 0.0 {
            break;
        }
    }
    z
}

fn order_key(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// All finite cycles whose minimal period divides `p`.
///
/// Roots of `N_p(z) - z D_p(z)` are polished by Newton's method on
/// `f^p(z) - z`, assigned a minimal period and grouped into cycles.
/// Output order is deterministic: each cycle starts at its smallest point and
/// cycles are sorted by that point.
pub fn periodic_points(map: &dyn HoloMap, p: usize) -> Result<Vec<CycleRecord>, MapError> {
    if p == 0 {
        return Err(MapError::InvalidParameter("period must be at least 1".into()));
    }
    let d = map.degree();
    let degree = (d as f64).powi(p as i32);
    if degree > MAX_ITERATE_DEGREE as f64 {
        return Err(MapError::DegreeOverflow { degree: degree.min(usize::MAX as f64) as usize, budget: MAX_ITERATE_DEGREE });
    }
    let (n, den) = iterate_rational(map, p);
    let fixed = n.sub(&den.mul(&Polynomial::identity()));
    let roots = fixed.roots()?;

    let mut cycles: Vec<CycleRecord> = Vec::new();
    let seen = |cycles: &[CycleRecord], z: Complex64| {
        cycles.iter().any(|c| c.points.iter().any(|w| (w - z).norm() <= GROUP_TOL * (1.0 + z.norm())))
    };
    for r in roots {
        let z = polish(map, r, p);
        if seen(&cycles, z) {
            continue;
        }
        let Some(wp) = orbit_value(map, z, p) else { continue };
        let residual = (wp - z).norm();
        if residual > RESIDUAL_TOL * z.norm().max(1.0) {
            log::warn!("discarding periodic point {z}: residual {residual:e}");
            continue;
        }
        let period = (1..=p)
            .filter(|k| p % k == 0)
            .find(|&k| orbit_value(map, z, k).is_some_and(|w| (w - z).norm() <= GROUP_TOL * (1.0 + z.norm())))
            .unwrap_or(p);
        let mut points = Vec::with_capacity(period);
        let mut w = z;
        let mut multiplier = Some(Complex64::new(1.0, 0.0));
        for _ in 0..period {
            points.push(w);
            multiplier = match (multiplier, map.derivative(w)) {
                (Some(m), Ok(dw)) => Some(m * dw),
                _ => None,
            };
            match map.eval(w) {
                Sphere::Finite(next) => w = next,
                Sphere::Infinity => break,
            }
        }
        if points.len() != period {
            continue;
        }
        let start = (0..period).min_by(|&i, &j| order_key(&points[i], &points[j])).unwrap_or(0);
        points.rotate_left(start);
        let residual = points
            .iter()
            .map(|&q| orbit_value(map, q, period).map_or(f64::INFINITY, |w| (w - q).norm()))
            .fold(0.0, f64::max);
        cycles.push(CycleRecord { period, points, multiplier, residual });
    }
    cycles.sort_by(|a, b| order_key(&a.points[0], &b.points[0]));
    Ok(cycles)
}
