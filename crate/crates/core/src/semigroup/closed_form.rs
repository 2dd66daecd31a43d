use crate::davies::{spin_boson_params, SpinBosonRates};
use crate::error::Result;
use crate::model::{gibbs_populations, SystemModel};
use crate::quantum::CMat;
use num_complex::Complex64;

/// Two-level Markovian state at time t (energy basis; index 1 is the upper level):
///
///   ρ_11(t) = e^{-λ²γ1 t} ρ_11(0) + (1 - e^{-λ²γ1 t}) (ρ_β)_11
///   ρ_12(t) = e^{-it(Δ + λ²x2)} e^{-λ²γ2 t} ρ_12(0)
pub fn spin_boson_closed_form(sys: &SystemModel, rates: &SpinBosonRates, beta: f64, lambda: f64, rho0: &CMat, t: f64) -> Result<CMat> {
    let p = spin_boson_params(sys)?;
    let gibbs_upper = gibbs_populations(sys, beta)?[1];
    let l2 = lambda * lambda;
    let relax = (-l2 * rates.gamma1 * t).exp();
    let upper = relax * rho0[[1, 1]].re + (1.0 - relax) * gibbs_upper;
    let coh = rho0[[1, 0]] * Complex64::new(-l2 * rates.gamma2 * t, -(p.delta + l2 * rates.x2) * t).exp();
    let mut out = CMat::zeros((2, 2));
    out[[1, 1]] = Complex64::new(upper, 0.0);
    out[[0, 0]] = Complex64::new(1.0 - upper, 0.0);
    out[[1, 0]] = coh;
    out[[0, 1]] = coh.conj();
    Ok(out)
}
