use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{
    AntipodalCubic, BlaschkeMap, CubicHermanMap, HoloMap, MapError, Monomial, QuadraticSiegelMap, RigidRotation,
};

/// Loosely typed parameters; each family reads the ones it needs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MapParams {
    pub alpha: Option<f64>,
    pub t: Option<f64>,
    pub a: Option<Complex64>,
    pub u: Option<Complex64>,
    pub q: Option<Complex64>,
    pub degree: Option<u32>,
}

impl MapParams {
    fn need<T: Copy>(v: Option<T>, name: &'static str) -> Result<T, MapError> {
        v.ok_or(MapError::MissingParameter(name))
    }
}

pub type MapBuilder = fn(&MapParams) -> Result<Box<dyn HoloMap>, MapError>;

struct Entry {
    summary: &'static str,
    build: MapBuilder,
}

/// Map families keyed by name.
pub struct MapRegistry {
    entries: BTreeMap<&'static str, Entry>,
}

impl MapRegistry {
    pub fn empty() -> Self {
        Self { entries: BTreeMap::new() }
    }

    pub fn register(&mut self, name: &'static str, summary: &'static str, build: MapBuilder) {
        self.entries.insert(name, Entry { summary, build });
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn summary(&self, name: &str) -> Option<&'static str> {
        self.entries.get(name).map(|e| e.summary)
    }

    pub fn build(&self, name: &str, params: &MapParams) -> Result<Box<dyn HoloMap>, MapError> {
        let entry = self.entries.get(name).ok_or_else(|| MapError::UnknownFamily(name.to_string()))?;
        (entry.build)(params)
    }
}

impl Default for MapRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register("quadratic", "lambda z + z^2 (alpha)", |p| {
            Ok(Box::new(QuadraticSiegelMap::new(MapParams::need(p.alpha, "alpha")?)))
        });
        r.register("cubic-herman", "u z^2 (z - a) / (1 - k z) (a, u)", |p| {
            Ok(Box::new(CubicHermanMap::new(MapParams::need(p.a, "a")?, MapParams::need(p.u, "u")?)?))
        });
        r.register("blaschke", "e(t) z^2 (z - a) / (1 - a z) (t, a real >= 3)", |p| {
            let a = MapParams::need(p.a, "a")?;
            if a.im != 0.0 {
                return Err(MapError::InvalidParameter("Blaschke parameter a must be real".into()));
            }
            Ok(Box::new(BlaschkeMap::new(MapParams::need(p.t, "t")?, a.re)?))
        });
        r.register("antipodal", "z^2 (q - z) / (1 + conj(q) z) (q)", |p| {
            Ok(Box::new(AntipodalCubic::new(MapParams::need(p.q, "q")?)?))
        });
        r.register("monomial", "z^d (degree, default 2)", |p| Ok(Box::new(Monomial::new(p.degree.unwrap_or(2))?)));
        r.register("rotation", "e(alpha) z (alpha)", |p| Ok(Box::new(RigidRotation::new(MapParams::need(p.alpha, "alpha")?))));
        r
    }
}

/// Parses `x`, `yi`, `x+yi` or `x-yi`.
pub fn parse_complex(s: &str) -> Result<Complex64, MapError> {
    let bad = || MapError::InvalidParameter(format!("cannot parse complex number `{s}`"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not part of an exponent or the leading sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(j) => (body[..j].parse::<f64>().map_err(|_| bad())?, &body[j..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}
