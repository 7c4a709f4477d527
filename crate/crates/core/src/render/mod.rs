//! Escape-time classification of dynamical and parameter planes, pixel
//! counting areas and P6 pixmap output.

mod ppm;

pub use ppm::{encode_image, write_image, Palette};

use std::io::Write;
use std::path::PathBuf;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::maps::{CubicHermanMap, HoloMap, MapError};
use crate::siegel::{classify_orbit_with, FateStatus, LinearizerSeries, SiegelError, SubdiskTable, TRUST_FACTOR};

/// Boundary vertices of the sub-disk polygons used by [`classify_lm`].
const SUBDISK_SAMPLES: usize = 4096;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("invalid raster: {0}")]
    InvalidSpec(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Siegel(#[from] SiegelError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterSpec {
    pub center: Complex64,
    pub width: f64,
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
    pub max_iter: u32,
    pub escape_out: f64,
    pub capture_in: f64,
}

impl RasterSpec {
    pub fn new(center: Complex64, width: f64, height: f64, nx: usize, ny: usize, max_iter: u32) -> Result<Self, RenderError> {
        let s = Self { center, width, height, nx, ny, max_iter, escape_out: 1e6, capture_in: 1e-6 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), RenderError> {
        if self.nx == 0 || self.ny == 0 {
            return Err(RenderError::InvalidSpec("pixel counts must be at least 1".into()));
        }
        if !(self.width > 0.0 && self.height > 0.0) {
            return Err(RenderError::InvalidSpec("extents must be positive".into()));
        }
        if !(self.escape_out > self.capture_in && self.capture_in > 0.0) {
            return Err(RenderError::InvalidSpec(format!(
                "need escape_out > capture_in > 0, got {} and {}",
                self.escape_out, self.capture_in
            )));
        }
        Ok(())
    }

    /// Same window at another resolution.
    pub fn with_resolution(&self, nx: usize, ny: usize) -> Self {
        Self { nx, ny, ..*self }
    }

    /// Centre of pixel `(ix, iy)`; row 0 is the top edge.
    pub fn pixel_center(&self, ix: usize, iy: usize) -> Complex64 {
        let dx = self.width / self.nx as f64;
        let dy = self.height / self.ny as f64;
        Complex64::new(
            self.center.re - self.width / 2.0 + (ix as f64 + 0.5) * dx,
            self.center.im + self.height / 2.0 - (iy as f64 + 0.5) * dy,
        )
    }

    pub fn pixel_area(&self) -> f64 {
        self.width * self.height / (self.nx * self.ny) as f64
    }
}

/// Fate of one orbit; `k` is the first iteration that met the test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fate {
    ToInfinity(u32),
    ToZero(u32),
    BoundedOther,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PixelCode {
    Orbit(Fate),
    /// Fates of the critical points `1` and `c` in a parameter plane.
    Critical(Fate, Fate),
    /// Fate relative to a Siegel sub-disk.
    Subdisk(FateStatus),
}

/// A [`PixelCode`] with iteration counts dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CodeClass {
    ToInfinity,
    ToZero,
    BoundedOther,
    Critical(FateClass, FateClass),
    Escaped,
    EnteredSubdisk,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FateClass {
    Infinity,
    Zero,
    Bounded,
}

impl Fate {
    pub fn class(&self) -> FateClass {
        match self {
            Fate::ToInfinity(_) => FateClass::Infinity,
            Fate::ToZero(_) => FateClass::Zero,
            Fate::BoundedOther => FateClass::Bounded,
        }
    }
}

impl PixelCode {
    pub fn class(&self) -> CodeClass {
        match *self {
            PixelCode::Orbit(Fate::ToInfinity(_)) => CodeClass::ToInfinity,
            PixelCode::Orbit(Fate::ToZero(_)) => CodeClass::ToZero,
            PixelCode::Orbit(Fate::BoundedOther) => CodeClass::BoundedOther,
            PixelCode::Critical(a, b) => CodeClass::Critical(a.class(), b.class()),
            PixelCode::Subdisk(FateStatus::Escaped) => CodeClass::Escaped,
            PixelCode::Subdisk(FateStatus::EnteredSubdisk) => CodeClass::EnteredSubdisk,
            PixelCode::Subdisk(FateStatus::Undecided) => CodeClass::Undecided,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationRaster {
    pub spec: RasterSpec,
    /// Row-major, top row first.
    pub codes: Vec<PixelCode>,
}

impl ClassificationRaster {
    pub fn code(&self, ix: usize, iy: usize) -> PixelCode {
        self.codes[iy * self.spec.nx + ix]
    }

    pub fn count(&self, filter: impl Fn(&PixelCode) -> bool) -> usize {
        self.codes.iter().filter(|c| filter(c)).count()
    }
}

fn rasterize(spec: &RasterSpec, pixel: impl Fn(Complex64) -> PixelCode + Sync) -> Result<ClassificationRaster, RenderError> {
    spec.validate()?;
    let codes: Vec<PixelCode> = (0..spec.ny)
        .into_par_iter()
        .flat_map_iter(|iy| (0..spec.nx).map(move |ix| (ix, iy)).collect::<Vec<_>>())
        .map(|(ix, iy)| pixel(spec.pixel_center(ix, iy)))
        .collect();
    Ok(ClassificationRaster { spec: *spec, codes })
}

/// Escape-time fate of `z0`.
///
/// Capture by `0` needs `|z| < capture_in` and a contracting step
/// `|f(z)| <= |z|/2`, so orbits merely passing near `0` are not captured.
pub fn orbit_fate(map: &dyn HoloMap, z0: Complex64, spec: &RasterSpec) -> Fate {
    let zero_test = map.superattracting_zero();
    let mut z = z0;
    for k in 0..=spec.max_iter {
        if !z.is_finite() || z.norm() > spec.escape_out {
            return Fate::ToInfinity(k);
        }
        let next = map.step(z);
        if zero_test && z.norm() < spec.capture_in && next.norm() <= z.norm() / 2.0 {
            return Fate::ToZero(k);
        }
        z = next;
    }
    Fate::BoundedOther
}

pub fn classify_dynamical(map: &dyn HoloMap, spec: &RasterSpec) -> Result<ClassificationRaster, RenderError> {
    rasterize(spec, |z| PixelCode::Orbit(orbit_fate(map, z, spec)))
}

/// Parameter plane of `Q_{a,u}` over `u`, coded by the fates of the
/// critical points `1` and `c`.
pub fn classify_parameter(a: Complex64, spec: &RasterSpec) -> Result<ClassificationRaster, RenderError> {
    // validates a once; u = 0 is the only further exclusion
    CubicHermanMap::new(a, Complex64::new(1.0, 0.0))?;
    rasterize(spec, |u| match CubicHermanMap::new(a, u) {
        Ok(q) => PixelCode::Critical(orbit_fate(&q, Complex64::new(1.0, 0.0), spec), orbit_fate(&q, q.c(), spec)),
        // Q is identically 0
        Err(_) => PixelCode::Critical(Fate::ToZero(1), Fate::ToZero(1)),
    })
}

/// Fates of `lambda z + z^2` relative to the sub-disk `phi(D(rho))`.
///
/// Orbits reaching `phi(D(0.8 R))` without entering the target stay
/// undecided, since they lie on invariant curves that avoid it.
pub fn classify_lm(series: &LinearizerSeries, rho: f64, spec: &RasterSpec) -> Result<ClassificationRaster, RenderError> {
    let target = SubdiskTable::new(series, rho, SUBDISK_SAMPLES)?;
    let outer_rho = TRUST_FACTOR * series.radius_estimate();
    let outer = if rho < outer_rho { Some(SubdiskTable::new(series, outer_rho, SUBDISK_SAMPLES)?) } else { None };
    let lambda = series.lambda();
    rasterize(spec, |z| {
        let fate = classify_orbit_with(lambda, z, spec.max_iter as usize, |w| target.contains(w), |w| {
            outer.as_ref().is_some_and(|o| o.contains(w))
        });
        PixelCode::Subdisk(fate.status)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaEstimate {
    pub value: f64,
    pub pixel_count: usize,
    pub resolution: (usize, usize),
    /// `|value - previous| / previous` against a coarser estimate.
    pub refinement_delta: Option<f64>,
}

pub fn area_from_raster(
    raster: &ClassificationRaster,
    filter: impl Fn(&PixelCode) -> bool,
    previous: Option<&AreaEstimate>,
) -> AreaEstimate {
    let pixel_count = raster.count(filter);
    let value = pixel_count as f64 * raster.spec.pixel_area();
    let refinement_delta = previous.map(|p| if p.value == 0.0 { if value == 0.0 { 0.0 } else { f64::INFINITY } } else { (value - p.value).abs() / p.value });
    AreaEstimate { value, pixel_count, resolution: (raster.spec.nx, raster.spec.ny), refinement_delta }
}

/// CSV rows `filter,resolution,value,delta`; the resolution reads `NXxNY`.
pub fn write_area_csv<W: Write>(rows: &[(String, AreaEstimate)], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["filter", "resolution", "value", "delta"])?;
    for (name, a) in rows {
        w.write_record([
            name.clone(),
            format!("{}x{}", a.resolution.0, a.resolution.1),
            a.value.to_string(),
            a.refinement_delta.map_or(String::new(), |d| d.to_string()),
        ])?;
    }
    w.flush()?;
    Ok(())
}
