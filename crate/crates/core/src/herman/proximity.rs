use super::curve::{winding_of, FourierCurve};
use super::HermanError;
use crate::maps::{periodic_points, CycleRecord, HoloMap};

/// Distances below this count as lying on the curve.
pub const ON_CURVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The bounded complementary component.
    Interior,
    Exterior,
    /// Some cycle point lies within [`ON_CURVE_TOL`] of the curve.
    OnCurve,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Interior => "interior",
            Side::Exterior => "exterior",
            Side::OnCurve => "on-curve",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Proximity {
    pub cycle: CycleRecord,
    /// Largest distance from a cycle point to the sampled curve.
    pub distance: f64,
    pub side: Side,
}

/// Repelling cycles of period at most `p_max`, with their distance to the
/// curve and the complementary component that holds them.
pub fn cycle_proximity(map: &dyn HoloMap, p_max: usize, curve: &FourierCurve) -> Result<Vec<Proximity>, HermanError> {
    if !(1..=4).contains(&p_max) {
        return Err(HermanError::InvalidArgument(format!("p_max = {p_max} outside 1..=4")));
    }
    let samples = curve.samples((8 * curve.m()).max(4096));
    let mut out = Vec::new();
    for p in 1..=p_max {
        for cycle in periodic_points(map, p)? {
            if cycle.period != p || !cycle.multiplier.is_some_and(|m| m.norm() > 1.0) {
                continue;
            }
            let dists: Vec<f64> = cycle
                .points
                .iter()
                .map(|z| samples.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min))
                .collect();
            let distance = dists.iter().copied().fold(0.0, f64::max);
            let side = if dists.iter().any(|&d| d < ON_CURVE_TOL) {
                Side::OnCurve
            } else if winding_of(&samples, cycle.points[0]) != 0 {
                Side::Interior
            } else {
                Side::Exterior
            };
            out.push(Proximity { cycle, distance, side });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use crate::maps::{Monomial, RigidRotation};

    #[test]
    fn squaring_map_fixed_point_on_circle() {
        let curve = FourierCurve::circle(1.0, 0.3, 4);
        let prox = cycle_proximity(&Monomial::new(2).unwrap(), 1, &curve).unwrap();
        let one = prox.iter().find(|p| (p.cycle.points[0] - Complex64::new(1.0, 0.0)).norm() < 1e-9).unwrap();
        assert!(one.distance < 1e-12);
        assert_eq!(one.side, Side::OnCurve);
        assert!((one.cycle.multiplier.unwrap() - Complex64::new(2.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn squaring_map_two_cycle_side() {
        let curve = FourierCurve::circle(0.5, 0.3, 4);
        let prox = cycle_proximity(&Monomial::new(2).unwrap(), 2, &curve).unwrap();
        let two: Vec<_> = prox.iter().filter(|p| p.cycle.period == 2).collect();
        assert_eq!(two.len(), 1);
        assert_eq!(two[0].side, Side::Exterior);
        assert!((two[0].distance - 0.5).abs() < 1e-3);
    }

    #[test]
    fn no_repelling_cycles() {
        let curve = FourierCurve::circle(0.5, 0.3, 4);
        assert!(cycle_proximity(&RigidRotation::new(0.3), 2, &curve).unwrap().is_empty());
        assert!(cycle_proximity(&RigidRotation::new(0.3), 5, &curve).is_err());
    }
}
