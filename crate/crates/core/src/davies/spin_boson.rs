//! Closed forms for the two-level system H_S = diag(Δ/2, -Δ/2).
//!
//! Labels follow the physics convention: level 1 is the upper state (E_1 = Δ/2),
//! level 2 the lower one. In the energy basis used elsewhere (ascending energies)
//! level 1 is index 1 and level 2 is index 0.
//!
//! Every principal value here is folded onto the half-line, so this path is
//! independent of the whole-line kernel used by the general construction.

use super::kernel::truncation;
use crate::bath::{c_hat_beta, j_coth, spectral_density};
use crate::error::{Error, Result};
use crate::model::{BathSpec, SystemModel};
use crate::quadrature::{adaptive_integral, pv_integral, real};
use crate::quantum::{CMat, Superoperator, I};
use ndarray::{array, Array2};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Δ = E_1 - E_2 and G in the (upper, lower) labelling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinBosonParams {
    pub delta: f64,
    pub g11: f64,
    pub g22: f64,
    /// ⟨φ_1, G φ_2⟩
    pub g12: Complex64,
}

pub fn spin_boson_params(sys: &SystemModel) -> Result<SpinBosonParams> {
    if sys.dim() != 2 {
        return Err(Error::DimensionMismatch(format!("spin-boson closed forms need N = 2, got N = {}", sys.dim())));
    }
    let e = sys.energies();
    let g = sys.coupling_energy_basis();
    Ok(SpinBosonParams { delta: e[1] - e[0], g11: g[[1, 1]].re, g22: g[[0, 0]].re, g12: g[[1, 0]] })
}

/// Thermalization rate γ1, decoherence rate γ2 and coherence shift x2.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SpinBosonRates {
    pub gamma1: f64,
    pub gamma2: f64,
    pub x2: f64,
}

/// ∫_0^∞ J(u)/u du = PV ∫_ℝ ĉ_β(u)/u du.
fn j_over_u(bath: &BathSpec, tol: f64) -> Result<f64> {
    let j = spectral_density(bath)?;
    let cut = truncation(bath, 0.0, tol / 4.0)?;
    let f = real(move |u| if u > 0.0 { j.eval(u).unwrap_or(0.0) / u } else { 0.0 }).with_breakpoints(vec![1.0]);
    Ok(adaptive_integral(&f, 0.0, cut, tol / 2.0)?.value.re)
}

/// s(ω) = PV ∫_ℝ ĉ_β(u)/(ω - u) du, folded to ∫_0^∞ [ĉ_β(u)/(ω - u) + ĉ_β(-u)/(ω + u)] du.
pub(crate) fn folded_shift(bath: &BathSpec, omega: f64, tol: f64) -> Result<f64> {
    if omega == 0.0 {
        return Ok(-j_over_u(bath, tol)?);
    }
    let b = *bath;
    let w = omega.abs();
    let cut = truncation(bath, w, tol / 4.0)?;
    // numerator over (u - |ω|)
    let sign = omega.signum();
    let f = real(move |u| {
        let (near, far) = if sign > 0.0 { (c_hat_beta(&b, u), c_hat_beta(&b, -u)) } else { (c_hat_beta(&b, -u), c_hat_beta(&b, u)) };
        sign * (-near + far * (u - w) / (u + w))
    })
    .with_breakpoints(vec![1.0]).with_max_subdivisions(100_000);
    Ok(pv_integral(&f, w, 0.0, cut, tol / 2.0)?.value.re)
}

/// γ1 = |G12|^2 J(Δ) coth(βΔ/2), γ2 = γ1/2 + ĉ_β(0)(G11 - G22)^2/2,
/// x2 = (1/π)(G22^2 - G11^2) ∫_0^∞ J/u + (1/π)|G12|^2 PV ∫_0^∞ J(u)coth(βu/2) 2Δ/(Δ^2 - u^2) du.
pub fn spin_boson_rates(sys: &SystemModel, bath: &BathSpec, tol: f64) -> Result<SpinBosonRates> {
    let p = spin_boson_params(sys)?;
    let j = spectral_density(bath)?;
    let d = p.delta;
    let g12 = p.g12.norm_sqr();
    let gamma1 = g12 * j.eval(d)? / (0.5 * bath.beta * d).tanh();
    let gamma2 = 0.5 * gamma1 + 0.5 * c_hat_beta(bath, 0.0) * (p.g11 - p.g22).powi(2);
    let b = *bath;
    let cut = truncation(bath, d, tol / 8.0)?;
    let f = real(move |u| -2.0 * d * j_coth(&b, u) / (d + u)).with_breakpoints(vec![1.0]).with_max_subdivisions(100_000);
    let pv = pv_integral(&f, d, 0.0, cut, tol / 4.0)?.value.re;
    let x2 = ((p.g22 * p.g22 - p.g11 * p.g11) * j_over_u(bath, tol / 4.0)? + g12 * pv) / PI;
    Ok(SpinBosonRates { gamma1, gamma2, x2 })
}

/// The two-level generator written out term by term (energy basis, ascending):
///
///   Kρ = -½ĉ(0)(G11 - G22)^2 (p1ρp2 + p2ρp1)
///        + ĉ(Δ)|G12|^2 (ρ11 p2 - ½{p1, ρ}) + ĉ(-Δ)|G12|^2 (ρ22 p1 - ½{p2, ρ}) - i[H_LS, ρ],
///   H_LS = (1/π) Σ_{k,l} |G_kl|^2 s(E_k - E_l) p_k.
pub fn explicit_generator(sys: &SystemModel, bath: &BathSpec, tol: f64) -> Result<Superoperator> {
    let p = spin_boson_params(sys)?;
    let d = p.delta;
    let g12 = p.g12.norm_sqr();
    let s0 = folded_shift(bath, 0.0, tol)?;
    let h1 = (p.g11 * p.g11 * s0 + g12 * folded_shift(bath, d, tol)?) / PI;
    let h2 = (p.g22 * p.g22 * s0 + g12 * folded_shift(bath, -d, tol)?) / PI;
    let deph = 0.5 * c_hat_beta(bath, 0.0) * (p.g11 - p.g22).powi(2);
    let down = c_hat_beta(bath, d) * g12;
    let up = c_hat_beta(bath, -d) * g12;
    // index 1 = level 1, index 0 = level 2
    let h_ls: CMat = array![[Complex64::new(h2, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), Complex64::new(h1, 0.0)]];
    Ok(Superoperator::from_map(2, |rho| {
        let mut k: CMat = Array2::zeros((2, 2));
        // p1ρp2 + p2ρp1 keeps the coherences
        k[[1, 0]] -= deph * rho[[1, 0]];
        k[[0, 1]] -= deph * rho[[0, 1]];
        k[[0, 0]] += down * rho[[1, 1]];
        k[[1, 1]] -= down * rho[[1, 1]];
        k[[1, 0]] -= 0.5 * down * rho[[1, 0]];
        k[[0, 1]] -= 0.5 * down * rho[[0, 1]];
        k[[1, 1]] += up * rho[[0, 0]];
        k[[0, 0]] -= up * rho[[0, 0]];
        k[[1, 0]] -= 0.5 * up * rho[[1, 0]];
        k[[0, 1]] -= 0.5 * up * rho[[0, 1]];
        k - (h_ls.dot(rho) - rho.dot(&h_ls)).mapv(|z| I * z)
    }))
}

/// Level-shift spectra in closed form.
#[derive(Clone, Debug)]
pub struct SpinBosonSpectra {
    /// a_0^{(0)} = 0, a_0^{(1)} = 2iγ1.
    pub a0: [Complex64; 2],
    /// x2 + i(γ1 + ĉ(0)(G11 - G22)^2)
    pub a_delta: Complex64,
    /// Λ_{-Δ} flips the sign of the principal-value terms: -conj(a_Δ).
    pub a_minus_delta: Complex64,
    /// Λ_0 on (φ_1⊗φ_1, φ_2⊗φ_2): iγ0'[[e^{βΔ/2}, -1], [-1, e^{-βΔ/2}]].
    pub lambda0: CMat,
    /// γ0' = |G12|^2 J(Δ) / sinh(βΔ/2).
    pub gamma0_prime: f64,
}

pub fn spin_boson_spectra(sys: &SystemModel, bath: &BathSpec, tol: f64) -> Result<SpinBosonSpectra> {
    let p = spin_boson_params(sys)?;
    let r = spin_boson_rates(sys, bath, tol)?;
    let j = spectral_density(bath)?.eval(p.delta)?;
    let x = 0.5 * bath.beta * p.delta;
    let gamma0_prime = p.g12.norm_sqr() * j / x.sinh();
    let a_delta = Complex64::new(r.x2, r.gamma1 + c_hat_beta(bath, 0.0) * (p.g11 - p.g22).powi(2));
    let c = |v: f64| Complex64::new(0.0, gamma0_prime * v);
    Ok(SpinBosonSpectra {
        a0: [Complex64::new(0.0, 0.0), Complex64::new(0.0, 2.0 * r.gamma1)],
        a_delta,
        a_minus_delta: -a_delta.conj(),
        lambda0: array![[c(x.exp()), c(-1.0)], [c(-1.0), c((-x).exp())]],
        gamma0_prime,
    })
}
