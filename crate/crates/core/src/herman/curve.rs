use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::{ring_orbit, winding_lift, HermanError};
use crate::circle::{ConvergentAccelerated, RotationEstimator};
use crate::maps::HoloMap;

const SMALL_DIVISOR: f64 = 1e-12;

/// Trigonometric polynomial `h(theta) = sum_{|k| <= M} c_k e(k theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCurve {
    modes: Vec<Complex64>,
    m: usize,
    pub alpha: f64,
    /// Sup of `|h(theta + alpha) - f(h(theta))|` on the `4M` grid.
    pub residual: f64,
    /// Tolerance the residual was certified against.
    pub tol: f64,
}

fn fft(buf: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan = if inverse { planner.plan_fft_inverse(buf.len()) } else { planner.plan_fft_forward(buf.len()) };
    plan.process(buf);
}

/// Fourier coefficients `k = -m..=m` of equally spaced samples.
fn analyze(samples: &[Complex64], m: usize) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    fft(&mut buf, false);
    let scale = 1.0 / n as f64;
    (-(m as i64)..=m as i64)
        .map(|k| if k.unsigned_abs() as usize * 2 < n { buf[k.rem_euclid(n as i64) as usize] * scale } else { Complex64::new(0.0, 0.0) })
        .collect()
}

impl FourierCurve {
    /// Modes listed from `c_{-M}` to `c_M`.
    pub fn new(modes: Vec<Complex64>, alpha: f64) -> Result<Self, HermanError> {
        if modes.len() % 2 == 0 || modes.len() < 3 {
            return Err(HermanError::InvalidArgument(format!("need 2M + 1 >= 3 modes, got {}", modes.len())));
        }
        let m = modes.len() / 2;
        Ok(Self { modes, m, alpha, residual: f64::INFINITY, tol: 0.0 })
    }

    /// `h(theta) = radius e(theta)`.
    pub fn circle(radius: f64, alpha: f64, m: usize) -> Self {
        let m = m.max(1);
        let mut modes = vec![Complex64::new(0.0, 0.0); 2 * m + 1];
        modes[m + 1] = Complex64::new(radius, 0.0);
        Self { modes, m, alpha, residual: f64::INFINITY, tol: 0.0 }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn modes(&self) -> &[Complex64] {
        &self.modes
    }

    pub fn mode(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.m {
            return Complex64::new(0.0, 0.0);
        }
        self.modes[(k + self.m as i64) as usize]
    }

    fn indexed(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.modes.iter().enumerate().map(move |(i, &c)| (i as i64 - self.m as i64, c))
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        self.indexed().map(|(k, c)| c * Complex64::from_polar(1.0, TAU * (k as f64 * theta).rem_euclid(1.0))).sum()
    }

    /// Samples on `n` equally spaced angles of `sum c_k w_k e(k theta)`.
    fn synth(&self, n: usize, weight: impl Fn(i64) -> Complex64) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (k, c) in self.indexed() {
            buf[k.rem_euclid(n as i64) as usize] += c * weight(k);
        }
        fft(&mut buf, true);
        buf
    }

    pub fn samples(&self, n: usize) -> Vec<Complex64> {
        self.synth(n, |_| Complex64::new(1.0, 0.0))
    }

    /// Samples of `h(theta + shift)`.
    pub fn shifted_samples(&self, n: usize, shift: f64) -> Vec<Complex64> {
        self.synth(n, |k| Complex64::from_polar(1.0, TAU * (k as f64 * shift).rem_euclid(1.0)))
    }

    /// Samples of `h'(theta + shift)`.
    pub fn derivative_samples(&self, n: usize, shift: f64) -> Vec<Complex64> {
        self.synth(n, |k| Complex64::new(0.0, TAU * k as f64) * Complex64::from_polar(1.0, TAU * (k as f64 * shift).rem_euclid(1.0)))
    }

    /// Winding number of the sampled image around `p`.
    pub fn winding_about(&self, p: Complex64, n: usize) -> i64 {
        winding_of(&self.samples(n), p)
    }

    /// Sup of `|h(theta + alpha) - f(h(theta))|` over `n` angles.
    pub fn conjugacy_residual(&self, map: &dyn HoloMap, n: usize) -> f64 {
        let h = self.samples(n);
        let hs = self.shifted_samples(n, self.alpha);
        h.par_iter()
            .zip(hs.par_iter())
            .map(|(&z, &w)| match map.eval(z).finite() {
                Some(fz) => (fz - w).norm(),
                None => f64::INFINITY,
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Rotates the parameter so that `c_1` is real and positive.
    pub fn gauge(&mut self) {
        let c1 = self.mode(1);
        if c1.norm() == 0.0 {
            return;
        }
        let phi = c1.arg();
        let m = self.m as i64;
        for (i, c) in self.modes.iter_mut().enumerate() {
            *c *= Complex64::from_polar(1.0, -phi * (i as i64 - m) as f64);
        }
    }

    fn resized(&self, m: usize) -> Self {
        let modes = (-(m as i64)..=m as i64).map(|k| self.mode(k)).collect();
        Self { modes, m, ..self.clone() }
    }

    /// Lines `k,re,im` for every mode.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "re", "im"])?;
        for (k, c) in self.indexed() {
            w.write_record([k.to_string(), c.re.to_string(), c.im.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn winding_of(points: &[Complex64], p: Complex64) -> i64 {
    let n = points.len();
    let total: f64 = (0..n).map(|j| ((points[(j + 1) % n] - p) / (points[j] - p)).arg()).sum();
    (total / TAU).round() as i64
}

#[derive(Debug, Clone)]
pub enum CurveInit {
    Curve(FourierCurve),
    /// Weighted Birkhoff averages along the orbit of `seed`.
    Orbit { seed: Complex64, points: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_steps: usize,
    /// Solve for the map parameter alongside the curve when the family has one.
    pub unfold: bool,
    pub max_m: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_steps: 50, unfold: true, max_m: 4096 }
    }
}

#[derive(Debug)]
pub struct NewtonResult {
    pub curve: FourierCurve,
    /// The corrected map when the parameter moved; `None` means the input map.
    pub map: Option<Box<dyn HoloMap>>,
    pub parameter: Option<Complex64>,
    /// Parameter change applied by the unfolding.
    pub correction: Option<Complex64>,
    pub steps: usize,
    /// Residual on a grid four times denser than the solve grid.
    pub dense_residual: f64,
    pub history: Vec<f64>,
}

fn bump(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        (-1.0 / (t * (1.0 - t))).exp()
    }
}

/// Modes `-m..=m` from weighted Birkhoff averages of an orbit rotating by `rho`.
fn modes_from_orbit(orbit: &[Complex64], rho: f64, m: usize) -> Vec<Complex64> {
    let n = orbit.len();
    let weights: Vec<f64> = (0..n).map(|j| bump((j as f64 + 0.5) / n as f64)).collect();
    let total: f64 = weights.iter().sum();
    (-(m as i64)..=m as i64)
        .into_par_iter()
        .map(|k| {
            let step = Complex64::from_polar(1.0, -TAU * (k as f64 * rho).rem_euclid(1.0));
            let mut phase = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, (&z, &w)) in orbit.iter().zip(&weights).enumerate() {
                if j % 1024 == 0 {
                    phase = Complex64::from_polar(1.0, -TAU * ((k as f64 * rho).rem_euclid(1.0) * j as f64).rem_euclid(1.0));
                }
                acc += z * w * phase;
                phase *= step;
            }
            acc / total
        })
        .collect()
}

fn check_divisors(alpha: f64, m: usize) -> Result<(), HermanError> {
    for k in 1..=m as i64 {
        let value = (Complex64::from_polar(1.0, TAU * (k as f64 * alpha).rem_euclid(1.0)) - 1.0).norm();
        if value < SMALL_DIVISOR {
            return Err(HermanError::SmallDivisor { k, value });
        }
    }
    Ok(())
}

fn borrow<'a>(current: &'a Option<Box<dyn HoloMap>>, original: &'a dyn HoloMap) -> &'a dyn HoloMap {
    current.as_deref().unwrap_or(original)
}

/// Solves `h(theta + alpha) = f(h(theta))` for a curve `h` with `M` modes.
///
/// Each step writes the correction as `h' W`, which turns the linearized
/// equation into `W(theta + alpha) - W(theta) = E / h'(theta + alpha)` and is
/// solved mode by mode. The mean of the right-hand side is the obstruction;
/// with `unfold` it is cancelled by moving the map parameter along
/// `df/dp`, otherwise it is dropped. `M` doubles when a step fails to halve
/// the residual.
pub fn invariant_curve_newton(
    map: &dyn HoloMap,
    alpha: f64,
    initial: CurveInit,
    m: usize,
    opts: &NewtonOptions,
) -> Result<NewtonResult, HermanError> {
    if m < 1 || m > opts.max_m {
        return Err(HermanError::InvalidArgument(format!("M = {m} outside 1..={}", opts.max_m)));
    }
    if !(opts.tol > 0.0) {
        return Err(HermanError::InvalidArgument("tolerance must be positive".into()));
    }
    check_divisors(alpha, m)?;
    let mut curve = match initial {
        CurveInit::Curve(c) => c.resized(m),
        CurveInit::Orbit { seed, points } => {
            let orbit = ring_orbit(map, seed, points.max(1000))?;
            let lift = winding_lift(&orbit)?;
            let rho = ConvergentAccelerated.estimate(&lift)?.0.rem_euclid(1.0);
            let modes = modes_from_orbit(&orbit, rho, m);
            FourierCurve { modes, m, alpha, residual: f64::INFINITY, tol: 0.0 }
        }
    };
    curve.alpha = alpha;
    curve.tol = opts.tol;
    curve.gauge();

    let unfold = opts.unfold && map.parameter().is_some();
    let start_param = map.parameter();
    let mut current: Option<Box<dyn HoloMap>> = None;
    let mut history = Vec::new();
    let mut best: Option<(f64, FourierCurve)> = None;
    let mut m = curve.m;

    for step in 0..=opts.max_steps {
        let f = borrow(&current, map);
        let n = 4 * m;
        let h = curve.samples(n);
        let hs = curve.shifted_samples(n, alpha);
        let errs: Vec<Complex64> = h
            .par_iter()
            .zip(hs.par_iter())
            .map(|(&z, &w)| f.eval(z).finite().map_or(Complex64::new(f64::INFINITY, 0.0), |fz| fz - w))
            .collect();
        let residual = errs.iter().map(|e| e.norm()).fold(0.0, f64::max);
        history.push(residual);
        if residual.is_finite() && best.as_ref().is_none_or(|b| residual < b.0) {
            curve.residual = residual;
            best = Some((residual, curve.clone()));
        }
        if !residual.is_finite() {
            break;
        }
        if residual <= opts.tol {
            let dense_residual = curve.conjugacy_residual(f, 16 * m);
            if dense_residual <= 10.0 * opts.tol {
                let w = curve.winding_about(Complex64::new(0.0, 0.0), n);
                if w != 1 {
                    return Err(HermanError::BadWinding(w));
                }
                let parameter = f.parameter();
                let correction = match (parameter, start_param) {
                    (Some(p), Some(p0)) if unfold => Some(p - p0),
                    _ => None,
                };
                return Ok(NewtonResult { curve, map: current, parameter, correction, steps: step, dense_residual, history });
            }
        }
        if step == opts.max_steps {
            break;
        }
        // refine the truncation when progress stalls
        if history.len() >= 2 && residual > 0.5 * history[history.len() - 2] && 2 * m <= opts.max_m {
            m *= 2;
            check_divisors(alpha, m)?;
            curve = curve.resized(m);
            continue;
        }

        let n = 4 * m;
        let hps = curve.derivative_samples(n, alpha);
        let g: Vec<Complex64> = errs.iter().zip(&hps).map(|(e, d)| e / d).collect();
        let g_hat = analyze(&g, m);
        let mut du = Complex64::new(0.0, 0.0);
        if unfold {
            let p: Vec<Complex64> = h
                .iter()
                .zip(&hps)
                .map(|(&z, d)| f.parameter_derivative(z).unwrap_or_default() / d)
                .collect();
            let p_hat = analyze(&p, m);
            if p_hat[m].norm() > 0.0 {
                du = -g_hat[m] / p_hat[m];
            }
            let p_hat_scaled: Vec<Complex64> = p_hat.iter().map(|c| c * du).collect();
            let w_hat = solve_cohomological(&g_hat, Some(&p_hat_scaled), alpha, m);
            curve = apply_correction(&curve, &w_hat, n);
        } else {
            let w_hat = solve_cohomological(&g_hat, None, alpha, m);
            curve = apply_correction(&curve, &w_hat, n);
        }
        curve.gauge();
        if du != Complex64::new(0.0, 0.0) {
            let p = f.parameter().unwrap_or_default() + du;
            current = Some(f.with_parameter(p).ok_or_else(|| HermanError::InvalidArgument("family has no parameter".into()))?);
        }
    }
    let (residual, best) = best.unwrap_or((f64::INFINITY, curve));
    Err(HermanError::NoConvergence { steps: opts.max_steps, residual, best: Box::new(best) })
}

fn solve_cohomological(g_hat: &[Complex64], p_hat: Option<&[Complex64]>, alpha: f64, m: usize) -> Vec<Complex64> {
    (0..g_hat.len())
        .map(|i| {
            let k = i as i64 - m as i64;
            if k == 0 {
                return Complex64::new(0.0, 0.0);
            }
            let rhs = g_hat[i] + p_hat.map_or(Complex64::new(0.0, 0.0), |p| p[i]);
            rhs / (Complex64::from_polar(1.0, TAU * (k as f64 * alpha).rem_euclid(1.0)) - 1.0)
        })
        .collect()
}

fn apply_correction(curve: &FourierCurve, w_hat: &[Complex64], n: usize) -> FourierCurve {
    let m = curve.m;
    let w = FourierCurve { modes: w_hat.to_vec(), m, ..curve.clone() }.samples(n);
    let h = curve.samples(n);
    let hp = curve.derivative_samples(n, 0.0);
    let updated: Vec<Complex64> = h.iter().zip(&hp).zip(&w).map(|((z, d), w)| z + d * w).collect();
    FourierCurve { modes: analyze(&updated, m), ..curve.clone() }
}
