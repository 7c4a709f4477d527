use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;

use ringlab_core::cfrac::{brjuno_partial_sum, classify, convergents, expand, value, CFExpansion};
use ringlab_core::circle::{rotation_number, solve_param_for_rotation, EstimatorRegistry, RotationEstimator, SolveOptions};
use ringlab_core::herman::{
    abc_experiment, find_ring_seed, invariant_curve_newton, winding_rotation_number, write_abc_csv, CurveInit, NewtonOptions, Window,
};
use ringlab_core::maps::{parse_complex, periodic_points, CubicHermanMap, HoloMap, MapParams, MapRegistry};
use ringlab_core::numkit::{HpReal, PrecisionContext};
use ringlab_core::render::{
    area_from_raster, classify_dynamical, classify_lm, classify_parameter, encode_image, write_area_csv, AreaEstimate,
    ClassificationRaster, CodeClass, FateClass, Palette, PixelCode, RasterSpec,
};
use ringlab_core::siegel::{conformal_radius_estimate, decode_series, encode_series, linearizer_coeffs, LinearizerSeries};

use crate::output::write_atomic;
use crate::{pre, Cache, CliError, RunConfig};

type Fields = Vec<(String, String)>;

fn field(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

pub(crate) fn dispatch(cfg: &RunConfig, cache: &Cache) -> Result<Fields, CliError> {
    let mut fields = vec![field("command", &cfg.command)];
    fields.extend(match cfg.command.as_str() {
        "cf" => cf(cfg)?,
        "brjuno" => brjuno(cfg)?,
        "siegel-radius" => siegel_radius(cfg, cache)?,
        "rotnum" => rotnum(cfg)?,
        "solve-t" => solve_t(cfg)?,
        "render-julia" => render_julia(cfg)?,
        "render-param" => render_param(cfg)?,
        "herman-rot" => herman_rot(cfg)?,
        "herman-curve" => herman_curve(cfg)?,
        "abc-table" => abc_table(cfg)?,
        "area" => area(cfg, cache)?,
        "cycles" => cycles(cfg)?,
        other => return Err(pre(format!("unknown command `{other}`"))),
    });
    Ok(fields)
}

fn ctx(cfg: &RunConfig) -> Result<PrecisionContext, CliError> {
    Ok(PrecisionContext::new(cfg.bits)?)
}

fn alpha(cfg: &RunConfig) -> Result<CFExpansion, CliError> {
    Ok(CFExpansion::from_str(&cfg.alpha)?)
}

fn alpha_f64(cfg: &RunConfig) -> Result<f64, CliError> {
    Ok(value(&alpha(cfg)?, PrecisionContext::double())?.to_f64())
}

fn complex(s: &str) -> Result<Complex64, CliError> {
    Ok(parse_complex(s)?)
}

fn estimator(cfg: &RunConfig) -> Result<Arc<dyn RotationEstimator>, CliError> {
    Ok(EstimatorRegistry::default().get(&cfg.estimator)?)
}

fn window(cfg: &RunConfig) -> Result<Window, CliError> {
    Ok(Window::new(complex(&cfg.window_min)?, complex(&cfg.window_max)?))
}

fn cubic(cfg: &RunConfig) -> Result<CubicHermanMap, CliError> {
    Ok(CubicHermanMap::new(complex(&cfg.a)?, complex(&cfg.u)?)?)
}

/// Family parameters read from the config; unparsable optional ones are left unset.
fn map_params(cfg: &RunConfig, family: &str) -> MapParams {
    let a = if family == "blaschke" { Some(Complex64::new(cfg.circle_a, 0.0)) } else { parse_complex(&cfg.a).ok() };
    MapParams {
        alpha: alpha_f64(cfg).ok(),
        t: Some(cfg.t),
        a,
        u: parse_complex(&cfg.u).ok(),
        q: parse_complex(&cfg.q).ok(),
        degree: Some(cfg.degree),
    }
}

fn build_map(cfg: &RunConfig, family: &str) -> Result<Box<dyn HoloMap>, CliError> {
    Ok(MapRegistry::default().build(family, &map_params(cfg, family))?)
}

fn raster_spec(cfg: &RunConfig, nx: usize, ny: usize) -> Result<RasterSpec, CliError> {
    let mut s = RasterSpec::new(complex(&cfg.center)?, cfg.width, cfg.height, nx, ny, cfg.max_iter)?;
    s.escape_out = cfg.escape_out;
    s.capture_in = cfg.capture_in;
    s.validate()?;
    Ok(s)
}

fn artifact(cfg: &RunConfig, fill: impl FnOnce(&mut dyn std::io::Write) -> std::io::Result<()>) -> Result<Option<String>, CliError> {
    if cfg.out.is_empty() {
        return Ok(None);
    }
    write_atomic(Path::new(&cfg.out), fill).map_err(|e| pre(format!("cannot write {}: {e}", cfg.out)))?;
    Ok(Some(cfg.out.clone()))
}

fn csv_io(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn cf(cfg: &RunConfig) -> Result<Fields, CliError> {
    let cf = if cfg.x.is_empty() {
        alpha(cfg)?.truncate(cfg.terms)?
    } else {
        let ctx = ctx(cfg)?;
        let x = HpReal::parse(&cfg.x, ctx).ok_or_else(|| pre(format!("cannot parse number `{}`", cfg.x)))?;
        expand(&x, cfg.terms)?.cf
    };
    let digits = cf.prefix().to_vec();
    let mut fields = vec![field("a0", cf.a0()), field("digits", join(&digits))];
    if !digits.is_empty() {
        let table = convergents(&cf, digits.len())?;
        fields.push(field("p", table.p(digits.len())));
        fields.push(field("q", table.q(digits.len())));
    }
    Ok(fields)
}

fn brjuno(cfg: &RunConfig) -> Result<Fields, CliError> {
    let cf = alpha(cfg)?;
    let sum = brjuno_partial_sum(&cf, cfg.terms)?;
    let report = classify(&cf, cfg.terms, 1)?;
    Ok(vec![
        field("terms", cfg.terms),
        field("brjuno_sum", sum),
        field("bounded_type_on_prefix", report.bounded_type_on_prefix),
        field("max_digit", report.max_digit),
    ])
}

fn series_key(cf: &CFExpansion, terms: usize, bits: usize) -> String {
    format!("linearizer v1 alpha={cf} terms={terms} bits={bits}")
}

/// Linearizer coefficients through the cache.
pub(crate) fn cached_series(cache: &Cache, cf: &CFExpansion, terms: usize, ctx: PrecisionContext) -> Result<LinearizerSeries, CliError> {
    cache.get_or_compute(
        &series_key(cf, terms, ctx.bits()),
        encode_series,
        |b| decode_series(b).ok(),
        || linearizer_coeffs(cf, terms, ctx).map_err(CliError::from),
    )
}

fn siegel_radius(cfg: &RunConfig, cache: &Cache) -> Result<Fields, CliError> {
    let series = cached_series(cache, &alpha(cfg)?, cfg.terms, ctx(cfg)?)?;
    let r = conformal_radius_estimate(&series)?;
    Ok(vec![
        field("r", r.value),
        field("uncertainty", r.uncertainty),
        field("divergence_suspected", r.divergence_suspected),
        field("terms", cfg.terms),
        field("bits", cfg.bits),
    ])
}

fn rotnum(cfg: &RunConfig) -> Result<Fields, CliError> {
    let map = build_map(cfg, &cfg.circle_family)?;
    let r = rotation_number(map.as_ref(), 0.0, cfg.iters, estimator(cfg)?.as_ref())?;
    Ok(vec![field("rho", r.value), field("error_bound", r.error_bound), field("iterations", r.iterations), field("method", r.method.as_str())])
}

fn solve_t(cfg: &RunConfig) -> Result<Fields, CliError> {
    let opts = SolveOptions { estimator: estimator(cfg)?, ..SolveOptions::default() };
    let r = solve_param_for_rotation(cfg.circle_a, &alpha(cfg)?, cfg.tol, &opts)?;
    Ok(vec![
        field("t", r.t),
        field("rho", r.rotation.value),
        field("residual", r.residual),
        field("error_bound", r.rotation.error_bound),
        field("bisection_steps", r.bisection_steps),
    ])
}

fn counts(r: &ClassificationRaster, classes: &[(&str, CodeClass)]) -> Fields {
    classes.iter().map(|(name, c)| field(name, r.count(|p| p.class() == *c))).collect()
}

fn write_pixmap(cfg: &RunConfig, r: &ClassificationRaster) -> Result<Fields, CliError> {
    let mut fields = Vec::new();
    if let Some(p) = artifact(cfg, |w| encode_image(r, &Palette::standard(), w))? {
        fields.push(field("out", p));
    }
    Ok(fields)
}

fn render_julia(cfg: &RunConfig) -> Result<Fields, CliError> {
    let map = build_map(cfg, &cfg.family)?;
    let r = classify_dynamical(map.as_ref(), &raster_spec(cfg, cfg.nx, cfg.ny)?)?;
    let mut fields = counts(&r, &[("to_infinity", CodeClass::ToInfinity), ("to_zero", CodeClass::ToZero), ("bounded_other", CodeClass::BoundedOther)]);
    fields.extend(write_pixmap(cfg, &r)?);
    Ok(fields)
}

fn render_param(cfg: &RunConfig) -> Result<Fields, CliError> {
    let r = classify_parameter(complex(&cfg.a)?, &raster_spec(cfg, cfg.nx, cfg.ny)?)?;
    let both = CodeClass::Critical(FateClass::Bounded, FateClass::Bounded);
    let escape = CodeClass::Critical(FateClass::Infinity, FateClass::Infinity);
    let mut fields = counts(&r, &[("bounded_bounded", both), ("escape_escape", escape)]);
    fields.extend(write_pixmap(cfg, &r)?);
    Ok(fields)
}

fn herman_rot(cfg: &RunConfig) -> Result<Fields, CliError> {
    let q = cubic(cfg)?;
    let seed = find_ring_seed(&q, window(cfg)?, cfg.seed_budget)?;
    let w = winding_rotation_number(&q, seed.seed, cfg.iters, estimator(cfg)?.as_ref())?;
    Ok(vec![
        field("rho", w.value),
        field("error_bound", w.error_bound),
        field("iterations", w.iterations),
        field("seed", format_c(seed.seed)),
        field("log_spread", seed.log_spread),
    ])
}

fn format_c(z: Complex64) -> String {
    if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

fn herman_curve(cfg: &RunConfig) -> Result<Fields, CliError> {
    let q = cubic(cfg)?;
    let seed = find_ring_seed(&q, window(cfg)?, cfg.seed_budget)?;
    let opts = NewtonOptions { tol: cfg.tol, ..NewtonOptions::default() };
    let r = invariant_curve_newton(&q, alpha_f64(cfg)?, CurveInit::Orbit { seed: seed.seed, points: cfg.iters }, cfg.modes, &opts)?;
    let mut fields = vec![
        field("residual", r.curve.residual),
        field("dense_residual", r.dense_residual),
        field("modes", r.curve.m()),
        field("steps", r.steps),
    ];
    if let Some(u) = r.parameter {
        fields.push(field("u", format_c(u)));
    }
    if let Some(du) = r.correction {
        fields.push(field("u_correction", format_c(du)));
    }
    if let Some(p) = artifact(cfg, |w| r.curve.write_csv(w).map_err(csv_io))? {
        fields.push(field("out", p));
    }
    Ok(fields)
}

fn abc_table(cfg: &RunConfig) -> Result<Fields, CliError> {
    let ratio = BigRational::from_str(&cfg.ratio).map_err(|e| pre(format!("ratio `{}`: {e}", cfg.ratio)))?;
    let ns: Vec<usize> = cfg
        .ns
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| pre(format!("bad index list `{}`", cfg.ns))))
        .collect::<Result<_, _>>()?;
    let report = abc_experiment(&alpha(cfg)?, &ratio, cfg.tail, &ns, cfg.terms, ctx(cfg)?)?;
    let mut fields = vec![
        field("r_alpha", report.baseline.value),
        field("r_target", report.target),
        field("distances", join(report.rows.iter().map(|r| r.distance))),
        field("uncertainties", join(report.rows.iter().map(|r| r.uncertainty))),
    ];
    if let Some(p) = artifact(cfg, |w| write_abc_csv(&report.rows, w).map_err(csv_io))? {
        fields.push(field("out", p));
    }
    Ok(fields)
}

fn area(cfg: &RunConfig, cache: &Cache) -> Result<Fields, CliError> {
    let classify = |nx: usize, ny: usize| -> Result<ClassificationRaster, CliError> {
        let spec = raster_spec(cfg, nx, ny)?;
        match cfg.filter.as_str() {
            "lm" => {
                let series = cached_series(cache, &alpha(cfg)?, cfg.terms, ctx(cfg)?)?;
                let rho = cfg.rho_frac * conformal_radius_estimate(&series)?.value;
                Ok(classify_lm(&series, rho, &spec)?)
            }
            _ => Ok(classify_dynamical(build_map(cfg, &cfg.family)?.as_ref(), &spec)?),
        }
    };
    let filter: fn(&PixelCode) -> bool = match cfg.filter.as_str() {
        "bounded" => |c| c.class() != CodeClass::ToInfinity,
        "bounded-other" => |c| c.class() == CodeClass::BoundedOther,
        "to-zero" => |c| c.class() == CodeClass::ToZero,
        "lm" => |c| c.class() == CodeClass::Undecided,
        other => return Err(pre(format!("unknown filter `{other}` (bounded, bounded-other, to-zero, lm)"))),
    };
    let coarse = area_from_raster(&classify((cfg.nx / 2).max(1), (cfg.ny / 2).max(1))?, filter, None);
    let fine = area_from_raster(&classify(cfg.nx, cfg.ny)?, filter, Some(&coarse));
    let rows: Vec<(String, AreaEstimate)> = vec![(cfg.filter.clone(), coarse), (cfg.filter.clone(), fine)];
    let mut fields = vec![
        field("area", fine.value),
        field("coarse_area", coarse.value),
        field("delta", fine.refinement_delta.unwrap_or(f64::NAN)),
    ];
    if let Some(p) = artifact(cfg, |w| write_area_csv(&rows, w).map_err(csv_io))? {
        fields.push(field("out", p));
    }
    Ok(fields)
}

fn cycles(cfg: &RunConfig) -> Result<Fields, CliError> {
    let map = build_map(cfg, &cfg.family)?;
    let mut all = Vec::new();
    for p in 1..=cfg.period {
        all.extend(periodic_points(map.as_ref(), p)?.into_iter().filter(|c| c.period == p));
    }
    let repelling = all.iter().filter(|c| c.multiplier.is_some_and(|m| m.norm() > 1.0)).count();
    let mut fields = vec![field("cycles", all.len()), field("repelling", repelling)];
    let written = artifact(cfg, |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["period", "re", "im", "multiplier_re", "multiplier_im", "residual"]).map_err(csv_io)?;
        for c in &all {
            let m = c.multiplier.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            for z in &c.points {
                out.write_record([c.period.to_string(), z.re.to_string(), z.im.to_string(), m.re.to_string(), m.im.to_string(), c.residual.to_string()])
                    .map_err(csv_io)?;
            }
        }
        out.flush()
    })?;
    if let Some(p) = written {
        fields.push(field("out", p));
    }
    Ok(fields)
}
