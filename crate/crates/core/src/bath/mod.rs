//! Quantities derived from the form factor and temperature: spectral density
//! J, rate function ĉ_β, thermal form factor g_β, correlation function c_β(t),
//! derivative norms γ_j, the radial-norm bound on γ_j and the decay check.

mod correlation;
mod gamma;
mod thermal;

pub use correlation::{correlation_function, correlation_function_direct, decay_check, DecayReport, DecaySample};
pub use gamma::{gamma_norm, gamma_norms, lemma1_bound, radial_norm, GammaMethod, GammaNorms};
pub use thermal::ThermalFormFactor;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::model::BathSpec;
use crate::quadrature::{adaptive_integral, real};
use serde::Serialize;
use std::f64::consts::PI;

// Taylor coefficients of x / (1 - e^{-x}) = 1 + x/2 + Σ B_2k x^2k / (2k)!.
const BOSE_SERIES: [f64; 19] = [
    1.0,
    0.5,
    1.0 / 12.0,
    0.0,
    -1.0 / 720.0,
    0.0,
    1.0 / 30240.0,
    0.0,
    -1.0 / 1209600.0,
    0.0,
    1.0 / 47900160.0,
    0.0,
    -691.0 / 1307674368000.0,
    0.0,
    1.0 / 74724249600.0,
    0.0,
    -3617.0 / 10670622842880000.0,
    0.0,
    43867.0 / 5109094217170944000.0,
];

/// x / (1 - e^{-x}), analytic through x = 0.
pub fn bose_ratio(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        1.0 + x / 2.0 + x * x / 12.0 - x.powi(4) / 720.0
    } else {
        x / -(-x).exp_m1()
    }
}

pub(crate) fn bose_ratio_jet(x: Jet) -> Jet {
    if x.value().abs() < 0.5 {
        x.poly(&BOSE_SERIES)
    } else {
        x / (-x.scale(-1.0).exp_m1())
    }
}

/// y coth y, analytic through y = 0.
pub fn y_coth_y(y: f64) -> f64 {
    if y.abs() < 1e-3 {
        1.0 + y * y / 3.0 - y.powi(4) / 45.0
    } else {
        y / y.tanh()
    }
}

/// (x/2) / sinh(x/2), analytic through x = 0.
pub fn half_x_over_sinh(x: f64) -> f64 {
    let y = 0.5 * x;
    if y.abs() < 1e-4 {
        1.0 - y * y / 6.0
    } else if y.abs() > 700.0 {
        0.0
    } else {
        y / y.sinh()
    }
}

/// Power-law exponent classification of J(ω) ∼ ω^s at small ω.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Ohmicity {
    SubOhmic,
    Ohmic,
    SuperOhmic,
}

/// Spectral density J(ω) = (π/2) ω^2 ∫_{S^2} |g(ω, Σ)|^2 dΣ = 2π^2 ω^2 |w|^2 g_r(ω)^2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralDensity {
    bath: BathSpec,
}

pub fn spectral_density(bath: &BathSpec) -> Result<SpectralDensity> {
    let r = crate::model::assumption1_check(bath);
    if !r.passed {
        return Err(Error::InadmissibleBath(r.violations.join("; ")));
    }
    Ok(SpectralDensity { bath: *bath })
}

impl SpectralDensity {
    pub fn bath(&self) -> &BathSpec {
        &self.bath
    }

    pub fn eval(&self, omega: f64) -> Result<f64> {
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(Error::InvalidArgument(format!("spectral density needs a finite omega >= 0, got {omega}")));
        }
        Ok(j_of(&self.bath, omega))
    }

    pub fn eval_grid(&self, omegas: &[f64]) -> Result<Vec<f64>> {
        omegas.iter().map(|&w| self.eval(w)).collect()
    }

    /// s in J ∼ ω^s as ω → 0.
    pub fn infrared_exponent(&self) -> f64 {
        2.0 * self.bath.p + 2.0
    }

    /// J ∼ ω^(2 - 2q) as ω → ∞ (times the profile).
    pub fn ultraviolet_exponent(&self) -> f64 {
        2.0 - 2.0 * self.bath.q
    }

    pub fn ohmicity(&self) -> Ohmicity {
        let s = self.infrared_exponent();
        if (s - 1.0).abs() < 1e-12 {
            Ohmicity::Ohmic
        } else if s < 1.0 {
            Ohmicity::SubOhmic
        } else {
            Ohmicity::SuperOhmic
        }
    }

    /// ∫_0^∞ J.
    pub fn total_weight(&self, tol: f64) -> Result<f64> {
        self.integral_from(0.0, tol)
    }

    /// ∫_{ω0}^∞ J, with the far tail bounded by the power-law envelope.
    pub fn integral_from(&self, omega0: f64, tol: f64) -> Result<f64> {
        let b = self.bath;
        let c = 2.0 * PI * PI * b.amplitude.norm_sqr();
        let mut upper = omega0.max(1.0) * 2.0;
        // ∫_U^∞ J <= c sup h^2 U^{3-2q} / (2q-3)
        while c * b.profile.sup_from(upper).powi(2) * upper.powf(3.0 - 2.0 * b.q) / (2.0 * b.q - 3.0) > tol / 10.0 {
            upper *= 2.0;
            if upper > 1e12 {
                return Err(Error::Quadrature("spectral density tail does not decay fast enough".into()));
            }
        }
        let f = real(|w: f64| j_of(&b, w)).with_breakpoints(vec![1.0]);
        Ok(adaptive_integral(&f, omega0, upper, tol)?.value.re)
    }
}

fn j_of(b: &BathSpec, omega: f64) -> f64 {
    2.0 * PI * PI * b.amplitude.norm_sqr() * omega * b.radial_weight(omega)
}

/// ĉ_β(u) = J(|u|) / |1 - e^{-βu}|, with its limit at u = 0 (nonzero only in the Ohmic case).
pub fn c_hat_beta(bath: &BathSpec, u: f64) -> f64 {
    2.0 * PI * PI * bath.amplitude.norm_sqr() * bath.radial_weight(u) * bose_ratio(bath.beta * u) / bath.beta
}

/// Jet of ĉ_β at u != 0.
pub(crate) fn c_hat_jet(bath: &BathSpec, u: f64) -> Jet {
    let uj = Jet::variable(u);
    let v = if u > 0.0 { uj } else { -uj };
    let h = bath.profile.jet(v);
    let rw = v.powf(2.0 * bath.p + 1.0) * h * h / {
        let d = v.powf(bath.p + bath.q) + 1.0;
        d * d
    };
    (rw * bose_ratio_jet(uj.scale(bath.beta))).scale(2.0 * PI * PI * bath.amplitude.norm_sqr() / bath.beta)
}

/// J(ω) coth(βω/2) for ω > 0, as a jet.
pub(crate) fn j_coth_jet(bath: &BathSpec, omega: f64) -> Jet {
    let v = Jet::variable(omega);
    let h = bath.profile.jet(v);
    let d = v.powf(bath.p + bath.q) + 1.0;
    let rw = v.powf(2.0 * bath.p + 1.0) * h * h / (d * d);
    let e = v.scale(-bath.beta).exp();
    let coth = (e + 1.0) / (-(e + (-1.0)));
    (rw * v * coth).scale(2.0 * PI * PI * bath.amplitude.norm_sqr())
}

pub(crate) fn j_jet(bath: &BathSpec, omega: f64) -> Jet {
    let v = Jet::variable(omega);
    let h = bath.profile.jet(v);
    let d = v.powf(bath.p + bath.q) + 1.0;
    (v.powf(2.0 * bath.p + 2.0) * h * h / (d * d)).scale(2.0 * PI * PI * bath.amplitude.norm_sqr())
}

/// J(|u|) coth(β|u|/2), finite at u = 0.
pub fn j_coth(bath: &BathSpec, u: f64) -> f64 {
    let a = u.abs();
    2.0 * PI * PI * bath.amplitude.norm_sqr() * bath.radial_weight(a) * (2.0 / bath.beta) * y_coth_y(0.5 * bath.beta * a)
}
