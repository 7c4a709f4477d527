use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{ClassificationRaster, CodeClass, FateClass, RenderError};

/// Colours keyed by [`CodeClass`]; unknown classes are drawn black.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Palette {
    colors: BTreeMap<CodeClass, [u8; 3]>,
}

impl Palette {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with(mut self, class: CodeClass, rgb: [u8; 3]) -> Self {
        self.colors.insert(class, rgb);
        self
    }

    pub fn get(&self, class: CodeClass) -> Option<[u8; 3]> {
        self.colors.get(&class).copied()
    }

    /// White escaping, blue captured, black bounded; the parameter plane
    /// and sub-disk classes get distinct colours as well.
    pub fn standard() -> Self {
        use FateClass::*;
        let mut p = Self::empty()
            .with(CodeClass::ToInfinity, [255, 255, 255])
            .with(CodeClass::ToZero, [40, 80, 200])
            .with(CodeClass::BoundedOther, [0, 0, 0])
            .with(CodeClass::Escaped, [255, 255, 255])
            .with(CodeClass::EnteredSubdisk, [230, 200, 40])
            .with(CodeClass::Undecided, [0, 0, 0]);
        let shade = |f: FateClass| match f {
            Infinity => 255u8,
            Zero => 150,
            Bounded => 0,
        };
        for a in [Infinity, Zero, Bounded] {
            for b in [Infinity, Zero, Bounded] {
                p = p.with(CodeClass::Critical(a, b), [shade(a), shade(b), if a == b { shade(a) } else { 90 }]);
            }
        }
        p
    }
}

/// Binary P6 pixmap of the raster, top row first.
pub fn encode_image<W: Write>(raster: &ClassificationRaster, palette: &Palette, mut out: W) -> std::io::Result<()> {
    write!(out, "P6\n{} {}\n255\n", raster.spec.nx, raster.spec.ny)?;
    let mut missing = BTreeSet::new();
    let mut payload = Vec::with_capacity(3 * raster.codes.len());
    for code in &raster.codes {
        let class = code.class();
        let rgb = palette.get(class).unwrap_or_else(|| {
            missing.insert(class);
            [0, 0, 0]
        });
        payload.extend_from_slice(&rgb);
    }
    for class in missing {
        log::warn!("palette has no colour for {class:?}; drawing it black");
    }
    out.write_all(&payload)?;
    out.flush()
}

pub fn write_image(raster: &ClassificationRaster, palette: &Palette, path: &Path) -> Result<(), RenderError> {
    let io = |source| RenderError::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io)?;
    encode_image(raster, palette, BufWriter::new(file)).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::{Fate, PixelCode, RasterSpec};
    use num_complex::Complex64;

    fn raster(codes: Vec<PixelCode>) -> ClassificationRaster {
        let spec = RasterSpec::new(Complex64::new(0.0, 0.0), 1.0, 1.0, codes.len(), 1, 1).unwrap();
        ClassificationRaster { spec, codes }
    }

    #[test]
    fn single_white_pixel() {
        let r = raster(vec![PixelCode::Orbit(Fate::ToInfinity(1))]);
        let mut buf = Vec::new();
        encode_image(&r, &Palette::empty().with(CodeClass::ToInfinity, [255; 3]), &mut buf).unwrap();
        assert_eq!(buf, b"P6\n1 1\n255\n\xff\xff\xff");
    }

    #[test]
    fn two_pixels_and_missing_colour() {
        let r = raster(vec![PixelCode::Orbit(Fate::ToZero(3)), PixelCode::Orbit(Fate::BoundedOther)]);
        let mut buf = Vec::new();
        encode_image(&r, &Palette::empty().with(CodeClass::ToZero, [1, 2, 3]), &mut buf).unwrap();
        let header = b"P6\n2 1\n255\n";
        assert_eq!(&buf[..header.len()], header);
        assert_eq!(&buf[header.len()..], &[1, 2, 3, 0, 0, 0]);
    }

    #[test]
    fn write_errors_carry_the_path() {
        let r = raster(vec![PixelCode::Orbit(Fate::BoundedOther)]);
        let err = write_image(&r, &Palette::standard(), Path::new("/nonexistent-dir/x.ppm")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.ppm"));
    }
}
