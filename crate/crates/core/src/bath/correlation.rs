use super::{c_hat_beta, c_hat_jet, j_coth, j_coth_jet, j_jet, spectral_density};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::model::BathSpec;
use crate::quadrature::{fourier_integral, oscillatory_tail, real, Tail, TailModel};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

const FIRST_CUTOFF: f64 = 16.0;
const MAX_CUTOFF: f64 = 1e8;

/// ∫_0^∞ e^{itu} f(u) du for a smooth f with an integrable power-law or
/// exponential tail.
///
/// The domain is cut at U (doubling from 16) as soon as either the absolute
/// tail bound `tail_bound(U)` drops below tol/10, or, for t != 0, the
/// integration-by-parts series built from `jet(U)` has decreasing terms with
/// the last one below tol/10; in the latter case the series is added.
fn half_line<F, J, B>(f: F, jet: J, tail_bound: B, t: f64, tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> f64,
    J: Fn(f64) -> Jet,
    B: Fn(f64) -> f64,
{
    let mut cutoff = FIRST_CUTOFF;
    let tail = loop {
        if tail_bound(cutoff) < tol / 10.0 {
            break Complex64::new(0.0, 0.0);
        }
        if t != 0.0 {
            let d = jet(cutoff).derivatives();
            let mags: Vec<f64> = d.iter().enumerate().map(|(k, x)| x.abs() / t.abs().powi(k as i32 + 1)).collect();
            let decreasing = mags.windows(2).all(|w| w[1] <= w[0]);
            if decreasing && mags[mags.len() - 1] < tol / 10.0 {
                let derivs: Vec<Complex64> = d.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                break oscillatory_tail(t, cutoff, &derivs, Tail::Upper).0;
            }
        }
        cutoff *= 2.0;
        if cutoff > MAX_CUTOFF {
            return Err(Error::Quadrature(format!("no truncation point found for the Fourier half-line integral at t = {t}")));
        }
    };
    let g = real(&f).with_breakpoints(vec![1.0]);
    Ok(fourier_integral(&g, t, 0.0, cutoff, tol / 2.0)?.value + tail)
}

fn reflect(j: Jet) -> Jet {
    let mut c = j.c;
    for (k, x) in c.iter_mut().enumerate() {
        if k % 2 == 1 {
            *x = -*x;
        }
    }
    Jet { c }
}

/// Thermal correlation function c_β(t) = ∫_ℝ e^{itu} 4π|g_β(u)|^2 du = (2/π) ∫_ℝ e^{itu} ĉ_β(u) du.
///
/// `tol` is an absolute tolerance on the value. C_β(t) = Re c_β(t).
pub fn correlation_function(bath: &BathSpec, t: f64, tol: f64) -> Result<Complex64> {
    check(t, tol)?;
    let b = *bath;
    let scale = 2.0 / PI;
    let w2 = b.amplitude.norm_sqr();
    // (2/π) ĉ_β(u) <= 4π|w|^2 sup h^2 / (1 - e^{-βU}) u^{2-2q} on u >= U
    let pos_bound = |u: f64| {
        let coefficient = 4.0 * PI * w2 * b.profile.sup_from(u).powi(2) / -(-b.beta * u).exp_m1();
        TailModel::PowerLaw { coefficient, exponent: 2.0 * b.q - 2.0 }.bound(u)
    };
    // (2/π) ĉ_β(-u) <= 4π|w|^2 sup h^2 U^{2-2q} / (1 - e^{-βU}) e^{-βu} on u >= U
    let neg_bound = |u: f64| {
        let coefficient = 4.0 * PI * w2 * b.profile.sup_from(u).powi(2) * u.powf(2.0 - 2.0 * b.q) / -(-b.beta * u).exp_m1();
        TailModel::Exponential { coefficient, rate: b.beta }.bound(u)
    };
    let pos = half_line(|u| scale * c_hat_beta(&b, u), |u| c_hat_jet(&b, u).scale(scale), pos_bound, t, tol / 2.0)?;
    let neg = half_line(|u| scale * c_hat_beta(&b, -u), |u| reflect(c_hat_jet(&b, -u)).scale(scale), neg_bound, -t, tol / 2.0)?;
    Ok(pos + neg)
}

/// c_β(t) from the spectral density alone:
/// (2/π) ∫_0^∞ J(ω) [coth(βω/2) cos ωt + i sin ωt] dω.
pub fn correlation_function_direct(bath: &BathSpec, t: f64, tol: f64) -> Result<Complex64> {
    check(t, tol)?;
    let b = *bath;
    let j = spectral_density(&b)?;
    let c = 2.0 * PI * PI * b.amplitude.norm_sqr();
    let env = |u: f64, extra: f64| {
        TailModel::PowerLaw { coefficient: c * b.profile.sup_from(u).powi(2) * extra, exponent: 2.0 * b.q - 2.0 }.bound(u)
    };
    let coth_part = half_line(
        |w| j_coth(&b, w),
        |w| j_coth_jet(&b, w),
        |u| env(u, 1.0 / (0.5 * b.beta * u).tanh()),
        t,
        tol / 4.0,
    )?;
    let sin_part = if t == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        half_line(|w| j.eval(w).unwrap_or(0.0), |w| j_jet(&b, w), |u| env(u, 1.0), t, tol / 4.0)?
    };
    Ok(Complex64::new(coth_part.re, sin_part.im) * (2.0 / PI))
}

fn check(t: f64, tol: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} is not finite")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecaySample {
    pub t: f64,
    /// C_β(t) = Re c_β(t)
    pub c: f64,
    /// |t^4 C_β(t)|
    pub t4_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub samples: Vec<DecaySample>,
    pub sup_t4_ratio: f64,
    /// Least-squares slope of ln|C| against ln t over [t_max/10, t_max];
    /// None with fewer than two usable points.
    pub fitted_exponent: Option<f64>,
    /// True when no fit is possible or the fitted exponent is at most -3.5.
    pub bounded: bool,
}

/// Sample C_β on `t_grid` and measure how fast |C_β| decays.
pub fn decay_check(bath: &BathSpec, t_grid: &[f64], tol: f64) -> Result<DecayReport> {
    let mut samples = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let c = correlation_function(bath, t, tol)?.re;
        samples.push(DecaySample { t, c, t4_ratio: (t.powi(4) * c).abs() });
    }
    let sup_t4_ratio = samples.iter().map(|s| s.t4_ratio).fold(0.0, f64::max);
    let t_max = t_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pts: Vec<(f64, f64)> =
        samples.iter().filter(|s| s.t > 0.0 && s.t >= t_max / 10.0 && s.c != 0.0).map(|s| (s.t.ln(), s.c.abs().ln())).collect();
    let fitted_exponent = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    } else {
        None
    };
    let bounded = fitted_exponent.map_or(true, |e| e <= -3.5);
    Ok(DecayReport { samples, sup_t4_ratio, fitted_exponent, bounded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RadialProfile;

    fn reference() -> BathSpec {
        BathSpec::new(1.0, 0.5, 2.5, RadialProfile::One).unwrap()
    }

    /// Trapezoidal sum of e^{itu}(2/π)ĉ(u) on [-U, U] plus the leading
    /// non-oscillatory tail 2π U^{-2} (t = 0 only).
    fn riemann(bath: &BathSpec, t: f64) -> Complex64 {
        let (u_max, n) = (4000.0, 1_600_000usize);
        let h = 2.0 * u_max / n as f64;
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..=n {
            let u = -u_max + i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            s += Complex64::from_polar(w * 2.0 / PI * c_hat_beta(bath, u), t * u);
        }
        s * h
    }

    #[test]
    fn matches_riemann_sum_oracle() {
        let b = reference();
        for &t in &[0.7, 2.0] {
            let c = correlation_function(&b, t, 1e-10).unwrap();
            assert!((c - riemann(&b, t)).norm() < 1e-6, "t = {t}: {c} vs {}", riemann(&b, t));
        }
    }

    #[test]
    fn two_routes_agree() {
        let b = BathSpec::new(0.7, 0.5, 2.5, RadialProfile::ExpCutoff { kappa: 3.0 }).unwrap();
        for &t in &[0.0, 0.3, 5.0, 40.0] {
            let a = correlation_function(&b, t, 1e-10).unwrap();
            let d = correlation_function_direct(&b, t, 1e-10).unwrap();
            assert!((a - d).norm() < 1e-8, "t = {t}: {a} vs {d}");
        }
    }

    #[test]
    fn hermitian_in_time() {
        let b = reference();
        let a = correlation_function(&b, 1.3, 1e-10).unwrap();
        let m = correlation_function(&b, -1.3, 1e-10).unwrap();
        assert!((a - m.conj()).norm() < 1e-9);
        let z = correlation_function(&b, 0.0, 1e-10).unwrap();
        assert!(z.im.abs() < 1e-12 && z.re > 0.0);
    }

    #[test]
    fn single_point_decay_report() {
        let r = decay_check(&reference(), &[10.0], 1e-10).unwrap();
        assert_eq!(r.samples.len(), 1);
        assert_eq!(r.sup_t4_ratio, r.samples[0].t4_ratio);
        assert!(r.fitted_exponent.is_none());
    }
}
