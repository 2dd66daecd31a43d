//! Adaptive quadrature on finite intervals, Cauchy principal values,
//! oscillatory (Fourier) integrals and semi-infinite tail control.

mod gauss_kronrod;
mod legendre;
mod stencil;

pub use legendre::gauss_legendre;
pub use stencil::fd_weights;

use crate::error::{Error, Result};
use gauss_kronrod::{gk21, Segment};
use num_complex::Complex64;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

pub const DEFAULT_MAX_SUBDIVISIONS: usize = 20_000;
pub const DEFAULT_MAX_PANELS: usize = 2_000_000;

/// A complex-valued integrand with optional structural hints.
pub struct Integrand<F> {
    f: F,
    breakpoints: Vec<f64>,
    max_subdivisions: usize,
}

impl<F: Fn(f64) -> Complex64> Integrand<F> {
    pub fn new(f: F) -> Self {
        Self { f, breakpoints: Vec::new(), max_subdivisions: DEFAULT_MAX_SUBDIVISIONS }
    }

    /// Points where the integrand is not smooth; intervals are split there.
    pub fn with_breakpoints(mut self, mut pts: Vec<f64>) -> Self {
        pts.retain(|x| x.is_finite());
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        self.breakpoints = pts;
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    pub fn eval(&self, u: f64) -> Complex64 {
        (self.f)(u)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }
}

/// Wrap a real-valued function.
pub fn real<F: Fn(f64) -> f64>(f: F) -> Integrand<impl Fn(f64) -> Complex64> {
    Integrand::new(move |u| Complex64::new(f(u), 0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    fn zero() -> Self {
        Self { value: Complex64::new(0.0, 0.0), error_estimate: 0.0, evaluations: 0 }
    }

    fn accumulate(&mut self, o: QuadratureResult) {
        self.value += o.value;
        self.error_estimate += o.error_estimate;
        self.evaluations += o.evaluations;
    }

    fn negate(mut self) -> Self {
        self.value = -self.value;
        self
    }
}

struct ByError(Segment);

impl PartialEq for ByError {
    fn eq(&self, o: &Self) -> bool {
        self.0.err == o.0.err
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for ByError {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.err.total_cmp(&o.0.err)
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("quadrature tolerance must be positive, got {tol}")))
    }
}

/// Globally adaptive Gauss–Kronrod (G10/K21) quadrature of `f` over `[a, b]`.
///
/// `tol` is absolute; it is floored at a few ulps of the accumulated |f| so that
/// unreachable requests terminate. Breakpoints of the integrand inside the
/// interval become initial subdivision points.
pub fn adaptive_integral<F: Fn(f64) -> Complex64>(f: &Integrand<F>, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    check_tol(tol)?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("integration limits must be finite, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadratureResult::zero());
    }
    if a > b {
        return adaptive_integral(f, b, a, tol).map(QuadratureResult::negate);
    }
    let mut cuts = vec![a];
    cuts.extend(f.breakpoints.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);

    let eval = |u: f64| f.eval(u);
    let mut heap = BinaryHeap::new();
    let mut finished: Vec<Segment> = Vec::new();
    let mut evaluations = 0usize;
    for w in cuts.windows(2) {
        heap.push(ByError(gk21(&eval, w[0], w[1])));
        evaluations += 21;
    }
    let mut subdivisions = heap.len();
    loop {
        let (value, err, abs) = totals(heap.iter().map(|s| &s.0).chain(finished.iter()));
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::NonFinite(format!("integrand is not finite on [{a}, {b}]")));
        }
        let target = tol.max(100.0 * f64::EPSILON * abs);
        if err <= target {
            return Ok(QuadratureResult { value, error_estimate: err, evaluations });
        }
        let Some(ByError(worst)) = heap.pop() else {
            // Only unsplittable (roundoff-limited) segments remain.
            return Ok(QuadratureResult { value, error_estimate: err, evaluations });
        };
        if subdivisions >= f.max_subdivisions {
            return Err(Error::Quadrature(format!(
                "no convergence on [{a}, {b}] after {subdivisions} subdivisions (estimate {err:.3e}, tol {tol:.3e})"
            )));
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            finished.push(worst);
            continue;
        }
        heap.push(ByError(gk21(&eval, worst.a, mid)));
        heap.push(ByError(gk21(&eval, mid, worst.b)));
        evaluations += 42;
        subdivisions += 1;
    }
}

fn totals<'a>(segs: impl Iterator<Item = &'a Segment>) -> (Complex64, f64, f64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut e = 0.0;
    let mut abs = 0.0;
    for s in segs {
        v += s.value;
        e += s.err;
        abs += s.value.norm();
    }
    (v, e, abs)
}

/// Cauchy principal value PV ∫_a^b f(u)/(u - pole) du.
///
/// A window symmetric about the pole is integrated with the singularity
/// subtracted, `(f(u) - f(pole)) / (u - pole)`, split at the pole; the rest
/// of the interval is regular. Reversing the limits negates the result.
pub fn pv_integral<F: Fn(f64) -> Complex64>(f: &Integrand<F>, pole: f64, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    check_tol(tol)?;
    if a > b {
        return pv_integral(f, pole, b, a, tol).map(QuadratureResult::negate);
    }
    if !(pole > a && pole < b) {
        return Err(Error::InvalidArgument(format!("pole {pole} must lie strictly inside ({a}, {b})")));
    }
    let f0 = f.eval(pole);
    if !(f0.re.is_finite() && f0.im.is_finite()) {
        return Err(Error::NonFinite(format!("integrand is not finite at the pole {pole}")));
    }
    let r = (pole - a).min(b - pole);
    let sub = Integrand {
        f: |u: f64| (f.eval(u) - f0) / (u - pole),
        breakpoints: f.breakpoints.clone(),
        max_subdivisions: f.max_subdivisions,
    };
    let reg = Integrand {
        f: |u: f64| f.eval(u) / (u - pole),
        breakpoints: f.breakpoints.clone(),
        max_subdivisions: f.max_subdivisions,
    };
    let mut out = adaptive_integral(&sub, pole - r, pole, tol / 4.0)?;
    out.accumulate(adaptive_integral(&sub, pole, pole + r, tol / 4.0)?);
    if pole - r > a {
        out.accumulate(adaptive_integral(&reg, a, pole - r, tol / 2.0)?);
    }
    if pole + r < b {
        out.accumulate(adaptive_integral(&reg, pole + r, b, tol / 2.0)?);
    }
    Ok(out)
}

/// ∫_a^b e^{itu} f(u) du with panels no wider than half an oscillation period.
pub fn fourier_integral<F: Fn(f64) -> Complex64>(f: &Integrand<F>, t: f64, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    check_tol(tol)?;
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("frequency {t} is not finite")));
    }
    if a > b {
        return fourier_integral(f, t, b, a, tol).map(QuadratureResult::negate);
    }
    let osc = Integrand {
        f: |u: f64| f.eval(u) * Complex64::from_polar(1.0, t * u),
        breakpoints: f.breakpoints.clone(),
        max_subdivisions: f.max_subdivisions,
    };
    if t == 0.0 || a == b {
        return adaptive_integral(&osc, a, b, tol);
    }
    let width = std::f64::consts::PI / t.abs();
    let panels = (b - a) / width;
    if panels > DEFAULT_MAX_PANELS as f64 {
        return Err(Error::PanelOverflow { panels, budget: DEFAULT_MAX_PANELS });
    }
    let mut cuts = vec![a];
    cuts.extend(f.breakpoints.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);

    let total = b - a;
    let mut out = QuadratureResult::zero();
    // Neumaier-compensated sum of panel values.
    let mut comp = Complex64::new(0.0, 0.0);
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let n = ((hi - lo) / width).ceil().max(1.0) as usize;
        let h = (hi - lo) / n as f64;
        for k in 0..n {
            let pa = lo + k as f64 * h;
            let pb = if k + 1 == n { hi } else { lo + (k + 1) as f64 * h };
            let r = adaptive_integral(&osc, pa, pb, tol * (pb - pa) / total)?;
            let s = out.value + r.value;
            comp.re += if out.value.re.abs() >= r.value.re.abs() { (out.value.re - s.re) + r.value.re } else { (r.value.re - s.re) + out.value.re };
            comp.im += if out.value.im.abs() >= r.value.im.abs() { (out.value.im - s.im) + r.value.im } else { (r.value.im - s.im) + out.value.im };
            out.value = s;
            out.error_estimate += r.error_estimate;
            out.evaluations += r.evaluations;
        }
    }
    out.value += comp;
    Ok(out)
}

/// Which semi-infinite tail an endpoint expansion describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tail {
    /// ∫_B^∞
    Upper,
    /// ∫_{-∞}^B
    Lower,
}

/// Asymptotic value of a semi-infinite Fourier tail from endpoint derivatives
/// (repeated integration by parts). Returns the value and a remainder
/// estimate equal to the magnitude of the last retained term.
pub fn oscillatory_tail(t: f64, endpoint: f64, derivs: &[Complex64], tail: Tail) -> (Complex64, f64) {
    let it = Complex64::new(0.0, t);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut last = 0.0;
    let mut pow = it;
    for (k, d) in derivs.iter().enumerate() {
        let term = if k % 2 == 0 { *d } else { -*d } / pow;
        last = term.norm();
        sum += term;
        pow *= it;
    }
    let phase = Complex64::from_polar(1.0, t * endpoint);
    let value = match tail {
        Tail::Upper => -phase * sum,
        Tail::Lower => phase * sum,
    };
    (value, last)
}

/// Envelope of |f(u)| for large u, used to pick truncation points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailModel {
    /// |f(u)| <= coefficient * u^(-exponent), exponent > 1.
    PowerLaw { coefficient: f64, exponent: f64 },
    /// |f(u)| <= coefficient * exp(-rate * u), rate > 0.
    Exponential { coefficient: f64, rate: f64 },
}

impl TailModel {
    /// Bound on ∫_U^∞ |f|.
    pub fn bound(&self, u: f64) -> f64 {
        match *self {
            TailModel::PowerLaw { coefficient, exponent } => coefficient * u.powf(1.0 - exponent) / (exponent - 1.0),
            TailModel::Exponential { coefficient, rate } => coefficient * (-rate * u).exp() / rate,
        }
    }

    /// Smallest U >= start whose tail bound is below tol/10.
    pub fn cutoff(&self, start: f64, tol: f64) -> Result<f64> {
        check_tol(tol)?;
        let target = tol / 10.0;
        let u = match *self {
            TailModel::PowerLaw { coefficient, exponent } => {
                if exponent <= 1.0 {
                    return Err(Error::InvalidArgument(format!("power-law tail exponent {exponent} <= 1 is not integrable")));
                }
                (coefficient / ((exponent - 1.0) * target)).powf(1.0 / (exponent - 1.0))
            }
            TailModel::Exponential { coefficient, rate } => {
                if rate <= 0.0 {
                    return Err(Error::InvalidArgument(format!("exponential tail rate {rate} must be positive")));
                }
                (coefficient / (rate * target)).ln() / rate
            }
        };
        let u = if u.is_finite() { u.max(start) } else { start };
        Ok(u * (1.0 + 1e-12))
    }
}
