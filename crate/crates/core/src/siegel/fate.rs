use std::io::Write;

use num_complex::Complex64;

use super::invert::{invert_unchecked, TRUST_FACTOR};
use super::{invert_linearizer, LinearizerSeries, SiegelError};

/// Orbits leaving this disk escape, since the filled Julia set lies in the closed disk of radius 2.
pub const ESCAPE_RADIUS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FateStatus {
    Escaped,
    EnteredSubdisk,
    Undecided,
}

impl FateStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            FateStatus::Escaped => "escaped",
            FateStatus::EnteredSubdisk => "entered_subdisk",
            FateStatus::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitFate {
    pub status: FateStatus,
    /// Iterations performed.
    pub steps: usize,
    /// First `k` with `P^k(z0)` in the sub-disk.
    pub entry_step: Option<usize>,
}

/// Iterates `lambda z + z^2` from `z0` for at most `k_max` steps.
///
/// `inside` decides membership in the target sub-disk. `confined` may report
/// points of a strictly larger invariant sub-disk: such orbits circle on
/// invariant curves outside the target forever, so iteration stops there and
/// the fate stays undecided.
pub fn classify_orbit_with(
    lambda: Complex64,
    z0: Complex64,
    k_max: usize,
    inside: impl Fn(Complex64) -> bool,
    confined: impl Fn(Complex64) -> bool,
) -> OrbitFate {
    let mut z = z0;
    for k in 0..=k_max {
        if z.norm() > ESCAPE_RADIUS || !z.is_finite() {
            return OrbitFate { status: FateStatus::Escaped, steps: k, entry_step: None };
        }
        if inside(z) {
            return OrbitFate { status: FateStatus::EnteredSubdisk, steps: k, entry_step: Some(k) };
        }
        if confined(z) {
            return OrbitFate { status: FateStatus::Undecided, steps: k, entry_step: None };
        }
        if k < k_max {
            z = lambda * z + z * z;
        }
    }
    OrbitFate { status: FateStatus::Undecided, steps: k_max, entry_step: None }
}

/// Fate of `z0` relative to the invariant sub-disk of conformal radius `rho`.
pub fn classify_orbit_lm(series: &LinearizerSeries, z0: Complex64, rho: f64, k_max: usize) -> Result<OrbitFate, SiegelError> {
    invert_linearizer(series, Complex64::new(0.0, 0.0), rho)?;
    let outer = TRUST_FACTOR * series.radius_estimate();
    let confined = |z: Complex64| rho < outer && invert_unchecked(series, z, outer).is_some();
    Ok(classify_orbit_with(series.lambda(), z0, k_max, |z| invert_unchecked(series, z, rho).is_some(), confined))
}

/// CSV rows `re,im,status,steps,entry_step`.
pub fn write_fate_csv<W: Write>(rows: &[(Complex64, OrbitFate)], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["re", "im", "status", "steps", "entry_step"])?;
    for (z, f) in rows {
        w.write_record([
            z.re.to_string(),
            z.im.to_string(),
            f.status.as_str().to_string(),
            f.steps.to_string(),
            f.entry_step.map(|k| k.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
