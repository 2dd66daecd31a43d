use super::ThermalFormFactor;
use crate::error::{Error, Result};
use crate::jet::{Jet, ORDER};
use crate::model::{BathSpec, RadialProfile};
use crate::quadrature::{adaptive_integral, fd_weights, gauss_legendre, real};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

const FIRST_CUTOFF: f64 = 16.0;
const MAX_CUTOFF: f64 = 1e9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMethod {
    /// Exact derivatives by Taylor arithmetic.
    Analytic,
    /// High-order finite differences of g_β.
    FiniteDifference,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaNorms {
    /// γ_0 ..= γ_4
    pub gamma: [f64; 5],
    pub method: GammaMethod,
}

impl GammaNorms {
    pub fn get(&self, j: usize) -> f64 {
        self.gamma[j]
    }
}

/// Finite-difference evaluator of ∂^j g_β.
struct Stencil<'a> {
    g: &'a ThermalFormFactor,
    j: usize,
    half_width: usize,
    h_min: f64,
    h_max: f64,
}

impl<'a> Stencil<'a> {
    fn new(g: &'a ThermalFormFactor, j: usize) -> Self {
        let b = g.bath();
        let kappa = match b.profile {
            RadialProfile::One => f64::INFINITY,
            RadialProfile::ExpCutoff { kappa } => kappa,
        };
        let scale = 1f64.min(kappa).min(1.0 / b.beta);
        Self { g, j, half_width: if j <= 2 { 4 } else { 5 }, h_min: 1e-3 * scale, h_max: 0.02 * scale }
    }

    /// |u| at which the step or the stencil layout switches.
    fn kinks(&self) -> Vec<f64> {
        let m = self.half_width as f64;
        vec![m * self.h_min, (m + 1.0) * self.h_min, (m + 1.0) * self.h_max]
    }

    fn eval(&self, u: f64) -> Complex64 {
        if self.j == 0 {
            return self.g.eval(u);
        }
        let m = self.half_width;
        let h = (u.abs() / (m + 1) as f64).clamp(self.h_min, self.h_max);
        let offsets: Vec<f64> = if u.abs() > m as f64 * h {
            (0..=2 * m).map(|k| (k as f64 - m as f64) * h).collect()
        } else {
            // one-sided, pointing away from the origin
            let s = if u >= 0.0 { 1.0 } else { -1.0 };
            (0..=2 * m).map(|k| s * k as f64 * h).collect()
        };
        let w = fd_weights(0.0, &offsets, self.j);
        offsets.iter().zip(&w[self.j]).map(|(&d, &c)| self.g.eval(u + d) * c).sum()
    }
}

/// ∫_0^b f by 20-point Gauss–Legendre on panels with ratio 1.1 between 1e-10 and b.
fn composite<F: Fn(f64) -> f64>(f: F, b: f64, extra: &[f64]) -> f64 {
    let (x, w) = gauss_legendre(20);
    let mut cuts = vec![0.0];
    let mut c = 1e-10;
    while c < b {
        cuts.push(c);
        c *= 1.1;
    }
    cuts.extend(extra.iter().copied().filter(|&e| e < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .map(|p| {
            let (mid, half) = (0.5 * (p[0] + p[1]), 0.5 * (p[1] - p[0]));
            half * x.iter().zip(&w).map(|(&xi, &wi)| wi * f(mid + half * xi)).sum::<f64>()
        })
        .sum()
}

/// Pick a half-line cutoff: U doubles until the tail estimate F(U)/ρ(U) < tol/10.
fn cutoff<F: Fn(f64) -> f64, R: Fn(f64) -> f64>(f: F, rate: R, tol: f64) -> Result<f64> {
    let mut u = FIRST_CUTOFF;
    while f(u) / rate(u) >= tol / 10.0 {
        u *= 2.0;
        if u > MAX_CUTOFF {
            return Err(Error::Quadrature("integrand tail decays too slowly".into()));
        }
    }
    Ok(u)
}

/// γ_j = ‖∂_u^j g_β‖ in L^2(ℝ × S^2), i.e. γ_j^2 = 4π ∫ |∂_u^j g_β(u)|^2 du.
///
/// `tol` is an absolute tolerance on γ_j^2. Orders beyond the smoothness of
/// g_β at u = 0 give `Error::DivergentNorm`.
pub fn gamma_norm(bath: &BathSpec, j: usize, method: GammaMethod, tol: f64) -> Result<f64> {
    if j > ORDER {
        return Err(Error::InvalidArgument(format!("derivative order {j} exceeds {ORDER}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let g = ThermalFormFactor::new(bath);
    if j > g.max_finite_order() {
        return Err(Error::DivergentNorm { j });
    }
    let b = *bath;
    let stencil = Stencil::new(&g, j);
    let density = |u: f64| -> f64 {
        let d = match method {
            _ if u == 0.0 && j == 0 => g.eval(0.0),
            GammaMethod::Analytic if u == 0.0 => g.derivatives(f64::MIN_POSITIVE)[j],
            GammaMethod::Analytic => g.derivatives(u)[j],
            GammaMethod::FiniteDifference => stencil.eval(u),
        };
        4.0 * PI * d.norm_sqr()
    };
    let decay = match b.profile {
        RadialProfile::One => 0.0,
        RadialProfile::ExpCutoff { kappa } => 2.0 / kappa,
    };
    // |∂^j g_β|^2 ∼ u^{-(2q+2j-2)} h^2 on the right, e^{-βu} times that on the left.
    let power = 2.0 * b.q + 2.0 * j as f64 - 3.0;
    let upper = cutoff(&density, |u| power / u + decay, tol / 2.0)?;
    let lower = cutoff(|u| density(-u), |u| power / u + decay + b.beta, tol / 2.0)?;
    let total = match method {
        GammaMethod::Analytic => {
            let f = real(&density).with_max_subdivisions(100_000);
            let right = adaptive_integral(&f.with_breakpoints(vec![1.0]), 0.0, upper, tol / 4.0)?;
            let f = real(&density).with_max_subdivisions(100_000);
            let left = adaptive_integral(&f.with_breakpoints(vec![-1.0]), -lower, 0.0, tol / 4.0)?;
            right.value.re + left.value.re
        }
        // Difference quotients carry rounding noise far above tol, which defeats
        // adaptive error control; use a fixed composite rule on a geometric grid
        // that also contains every point where the stencil changes shape.
        GammaMethod::FiniteDifference => {
            let kinks = stencil.kinks();
            composite(&density, upper, &kinks) + composite(|u| density(-u), lower, &kinks)
        }
    };
    if !total.is_finite() {
        return Err(Error::DivergentNorm { j });
    }
    Ok(total.max(0.0).sqrt())
}

pub fn gamma_norms(bath: &BathSpec, method: GammaMethod, tol: f64) -> Result<GammaNorms> {
    let mut gamma = [0.0; 5];
    for (j, x) in gamma.iter_mut().enumerate() {
        *x = gamma_norm(bath, j, method, tol)?;
    }
    Ok(GammaNorms { gamma, method })
}

/// ‖|k|^{-s} g^{(ℓ)}‖ in L^2(ℝ^3, d^3k), with g^{(ℓ)} the ℓ-th radial derivative:
/// 4π|w|^2 ∫_0^∞ k^{2-2s} (g_r^{(ℓ)}(k))^2 dk.
///
/// `ell = -1` is the zero function. Infinite norms (from the k → 0 behaviour)
/// are reported as `Error::DivergentRadialNorm`.
pub fn radial_norm(bath: &BathSpec, ell: i32, s: f64, tol: f64) -> Result<f64> {
    if ell < 0 {
        return Ok(0.0);
    }
    let l = ell as usize;
    if l > ORDER {
        return Err(Error::InvalidArgument(format!("radial derivative order {ell} exceeds {ORDER}")));
    }
    // Leading non-polynomial power of g_r at 0 that survives ℓ derivatives.
    let lead = bath
        .small_k_expansion(0.0, 64.0)
        .into_iter()
        .map(|(e, _)| e)
        .find(|&e| !(e.fract().abs() < 1e-12 && e >= 0.0 && (e as usize) < l))
        .unwrap_or(f64::INFINITY);
    if lead - l as f64 - s <= -1.5 {
        return Err(Error::DivergentRadialNorm(format!(
            "|k|^-{s} g^({ell}) is not square integrable at k = 0 (leading power k^{})",
            lead - l as f64 - s
        )));
    }
    let b = *bath;
    let w2 = b.amplitude.norm_sqr();
    let density = move |k: f64| -> f64 {
        if k == 0.0 {
            return 0.0;
        }
        let d = b.radial_jet(Jet::variable(k)).derivative(l);
        4.0 * PI * w2 * k.powf(2.0 - 2.0 * s) * d * d
    };
    let decay = match b.profile {
        RadialProfile::One => 0.0,
        RadialProfile::ExpCutoff { kappa } => 2.0 / kappa,
    };
    let power = 2.0 * b.q + 2.0 * l as f64 + 2.0 * s - 3.0;
    let upper = cutoff(density, |u| power / u + decay, tol)?;
    let f = real(density).with_breakpoints(vec![1e-6, 1e-3, 1.0]).with_max_subdivisions(100_000);
    let v = adaptive_integral(&f, 0.0, upper, tol)?.value.re;
    Ok(v.max(0.0).sqrt())
}

/// Right side of the β-explicit bound on γ_j with unit constant:
///
///   max_{0<=r<=j} β^r (‖g^{(j-r)}‖ + ‖|k|^{-1} g^{(j-r-1)}‖)
///               + β^{-1/2} (‖|k|^{-r-1/2} g^{(j-r)}‖ + ‖|k|^{-r-3/2} g^{(j-r-1)}‖).
///
/// Only meaningful (and only accepted) for p > 2.
pub fn lemma1_bound(bath: &BathSpec, j: usize, tol: f64) -> Result<f64> {
    if bath.p <= 2.0 {
        return Err(Error::InvalidArgument(format!("the radial-norm bound applies to p > 2, got p = {}", bath.p)));
    }
    let mut best: f64 = 0.0;
    for r in 0..=j {
        let a = (j - r) as i32;
        let r_f = r as f64;
        let low = bath.beta.powi(r as i32) * (radial_norm(bath, a, 0.0, tol)? + radial_norm(bath, a - 1, 1.0, tol)?);
        let high = bath.beta.powf(-0.5) * (radial_norm(bath, a, r_f + 0.5, tol)? + radial_norm(bath, a - 1, r_f + 1.5, tol)?);
        best = best.max(low + high);
    }
    Ok(best)
}
