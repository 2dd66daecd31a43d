//! Perturbation-theory parameter ledger and coupling-threshold estimates.
//!
//! Every "≺" relation of the underlying bounds is evaluated with constant 1;
//! the numbers are order-of-magnitude indicators, not rigorous thresholds.

use crate::bath::GammaNorms;
use crate::davies::LevelShiftOperator;
use crate::error::{Error, Result};
use crate::model::{default_bohr_frequencies, SystemModel};
use crate::quantum::op_norm;
use crate::tolerances::Tolerances;
use serde::Serialize;

pub const CONSTANT_CONVENTION: &str = "ORDER-OF-MAGNITUDE: all suppressed constants set to 1";

/// a, α, δ, κ, g of the level-shift perturbation theory, optionally extended
/// by the κ-chain and the resulting thresholds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamLedger {
    /// Smallest nonzero imaginary part among the level-shift eigenvalues.
    pub a: f64,
    /// Largest spectral radius of the Λ_e.
    pub alpha: f64,
    /// Smallest same-e eigenvalue gap (+∞ if every block is 1x1).
    pub delta: f64,
    /// Largest operator norm of a spectral projection.
    pub kappa: f64,
    /// Smallest gap between distinct Bohr frequencies.
    pub g: f64,
    pub chain: Option<KappaChain>,
    pub lambda0: Option<f64>,
    pub lambda0_reduced: Option<f64>,
    pub c0: Option<f64>,
    pub constant_convention: &'static str,
}

impl ParamLedger {
    /// A ledger from given values (e.g. low-temperature estimates).
    pub fn from_values(a: f64, alpha: f64, delta: f64, kappa: f64, g: f64) -> Self {
        Self {
            a,
            alpha,
            delta,
            kappa,
            g,
            chain: None,
            lambda0: None,
            lambda0_reduced: None,
            c0: None,
            constant_convention: CONSTANT_CONVENTION,
        }
    }

    /// Attach the κ-chain and fill in both λ₀ variants.
    pub fn with_chain(mut self, chain: KappaChain) -> Self {
        self.lambda0 = Some(lambda0(&self, &chain));
        self.lambda0_reduced = Some(lambda0_reduced(&self));
        self.chain = Some(chain);
        self
    }

    pub fn with_threshold(mut self, temperature: f64, c0_prime: f64) -> Result<Self> {
        self.c0 = Some(coupling_threshold(&self, temperature, c0_prime)?);
        self.lambda0_reduced = Some(lambda0_reduced(&self));
        Ok(self)
    }
}

/// a, α, δ, κ, g from the level shift operators of `sys`.
///
/// Eigenvalues with |Im| ≤ `tol.imag_zero` count as real.
pub fn param_ledger(spectra: &[LevelShiftOperator], sys: &SystemModel, tol: &Tolerances) -> Result<ParamLedger> {
    let eig = || spectra.iter().flat_map(|l| l.eigenvalues.iter());
    let a = eig().filter(|z| z.im.abs() > tol.imag_zero).map(|z| z.im).fold(f64::INFINITY, f64::min);
    if !a.is_finite() {
        return Err(Error::FgrViolated("every level-shift eigenvalue is real, so a is undefined".into()));
    }
    let alpha = eig().map(|z| z.norm()).fold(0.0, f64::max);
    let delta = spectra.iter().map(LevelShiftOperator::min_gap).fold(f64::INFINITY, f64::min);
    let kappa = spectra.iter().flat_map(|l| l.projection_norms.iter().copied()).fold(0.0, f64::max);
    let g = default_bohr_frequencies(sys, tol)?.min_gap();
    Ok(ParamLedger::from_values(a, alpha, delta, kappa, g))
}

/// Low-temperature spin-boson estimates: a ≍ 1, α ≍ β, δ ≍ 1, κ = 1, g = Δ.
pub fn spin_boson_low_temperature_ledger(delta: f64, beta: f64) -> ParamLedger {
    ParamLedger::from_values(1.0, beta, 1.0, 1.0, delta)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KappaChain {
    pub lambda: f64,
    pub c1: f64,
    pub kappa1: f64,
    pub kappa0: f64,
    /// ‖I P_R‖ = √2 ‖G‖ γ₀.
    pub ip_r: f64,
}

/// c₁(β, λ) = e^{|λ|γ₂} [1 + γ₀ + e^{|λ|γ₂}(γ₂ + γ₀γ₃ + |λ|(γ₂ + γ₃ + γ₄))].
pub fn c1(gammas: &GammaNorms, lambda: f64) -> f64 {
    let [g0, _, g2, g3, g4] = gammas.gamma;
    let l = lambda.abs();
    let e = (l * g2).exp();
    e * (1.0 + g0 + e * (g2 + g0 * g3 + l * (g2 + g3 + g4)))
}

/// κ₁ = c₁(β, λ) (γ₀ + γ₃)².
pub fn kappa1(gammas: &GammaNorms, lambda: f64) -> f64 {
    c1(gammas, lambda) * (gammas.get(0) + gammas.get(3)).powi(2)
}

/// κ₀ = max[1, 1/g, κ/a, ακ, κ₁(1+κ₁)(1+g+1/g), κ₁(1+κ₁⁴)κ M] with
/// M = max{1, (1+α)/δ, 1/a, (1+κ)/(aδ), κ²(κ/a (1+κ³/δ³)(1+1/a) + 1/δ²)}.
pub fn kappa0(ledger: &ParamLedger, kappa1: f64) -> f64 {
    let ParamLedger { a, alpha, delta, kappa, g, .. } = *ledger;
    let m = [
        1.0,
        (1.0 + alpha) / delta,
        1.0 / a,
        (1.0 + kappa) / (a * delta),
        kappa * kappa * (kappa / a * (1.0 + kappa.powi(3) / delta.powi(3)) * (1.0 + 1.0 / a) + 1.0 / (delta * delta)),
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    [
        1.0,
        1.0 / g,
        kappa / a,
        alpha * kappa,
        kappa1 * (1.0 + kappa1) * (1.0 + g + 1.0 / g),
        kappa1 * (1.0 + kappa1.powi(4)) * kappa * m,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max)
}

/// √2 ‖G‖ γ₀ (operator norm of the coupling).
pub fn ip_r_norm(sys: &SystemModel, gammas: &GammaNorms) -> Result<f64> {
    Ok(std::f64::consts::SQRT_2 * op_norm(sys.coupling())? * gammas.get(0))
}

/// (c₁, κ₁, κ₀, ‖IP_R‖) at coupling `lambda`.
pub fn kappa_chain(sys: &SystemModel, gammas: &GammaNorms, lambda: f64, ledger: &ParamLedger) -> Result<KappaChain> {
    let k1 = kappa1(gammas, lambda);
    Ok(KappaChain { lambda, c1: c1(gammas, lambda), kappa1: k1, kappa0: kappa0(ledger, k1), ip_r: ip_r_norm(sys, gammas)? })
}

/// λ₀ = min[1, a, δ/κ², ‖IP_R‖, g^{3/2}] / max[1, κ₁κ(1 + κ₁κ/δ), α, κ₁].
pub fn lambda0(ledger: &ParamLedger, chain: &KappaChain) -> f64 {
    let ParamLedger { a, alpha, delta, kappa, g, .. } = *ledger;
    let k1 = chain.kappa1;
    let num = [1.0, a, delta / (kappa * kappa), chain.ip_r, g.powf(1.5)].into_iter().fold(f64::INFINITY, f64::min);
    let den = [1.0, k1 * kappa * (1.0 + k1 * kappa / delta), alpha, k1].into_iter().fold(f64::NEG_INFINITY, f64::max);
    num / den
}

/// The ratio min[1, a, δ/κ², g^{3/2}] / max[1, α, κ(1 + κ/δ)] (no κ₁, no ‖IP_R‖).
pub fn lambda0_reduced(ledger: &ParamLedger) -> f64 {
    let ParamLedger { a, alpha, delta, kappa, g, .. } = *ledger;
    let num = [1.0, a, delta / (kappa * kappa), g.powf(1.5)].into_iter().fold(f64::INFINITY, f64::min);
    let den = [1.0, alpha, kappa * (1.0 + kappa / delta)].into_iter().fold(f64::NEG_INFINITY, f64::max);
    num / den
}

/// c₀ = c₀′ T²⁴ (min[1, a, δ/κ², g^{3/2}] / max[1, α, κ(1 + κ/δ)])^{4/3}.
pub fn coupling_threshold(ledger: &ParamLedger, temperature: f64, c0_prime: f64) -> Result<f64> {
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(Error::InvalidArgument(format!("temperature must be positive, got {temperature}")));
    }
    if !(c0_prime.is_finite() && c0_prime > 0.0) {
        return Err(Error::InvalidArgument(format!("c0' must be positive, got {c0_prime}")));
    }
    let ParamLedger { a, alpha, delta, kappa, g, .. } = *ledger;
    for (name, v) in [("a", a), ("delta", delta), ("kappa", kappa), ("g", g)] {
        if !(v > 0.0) {
            return Err(Error::InvalidArgument(format!("ledger parameter {name} = {v} must be positive")));
        }
    }
    if !alpha.is_finite() || !kappa.is_finite() {
        return Err(Error::InvalidArgument(format!("ledger has a non-finite denominator (alpha = {alpha}, kappa = {kappa})")));
    }
    Ok(c0_prime * temperature.powi(24) * lambda0_reduced(ledger).powf(4.0 / 3.0))
}

/// Least-squares slope of ln c₀ against ln T.
pub fn log_log_slope(temperatures: &[f64], values: &[f64]) -> f64 {
    let x: Vec<f64> = temperatures.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{gamma_norms, GammaMethod};
    use crate::davies::{lso_spectra, simplicity_check, spin_boson_spectra};
    use crate::model::{BathSpec, RadialProfile};
    use crate::quantum::{ONE, ZERO};
    use approx::assert_relative_eq;
    use ndarray::array;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn spin_boson() -> SystemModel {
        let g = array![[Complex64::new(0.3, 0.0), ONE], [ONE, Complex64::new(-0.3, 0.0)]];
        SystemModel::spin_boson(1.0, g, &Tolerances::default()).unwrap()
    }

    fn bath(beta: f64) -> BathSpec {
        BathSpec::new(beta, 0.5, 2.5, RadialProfile::One).unwrap()
    }

    fn norms(g: [f64; 5]) -> GammaNorms {
        GammaNorms { gamma: g, method: GammaMethod::Analytic }
    }

    #[test]
    fn spin_boson_ledger_matches_closed_forms() {
        let sys = spin_boson();
        let tol = Tolerances::default().with_quad(1e-11);
        let b = bath(1.0);
        let spectra = lso_spectra(&sys, &b, &tol).unwrap();
        let l = param_ledger(&spectra, &sys, &tol).unwrap();
        assert_relative_eq!(l.g, 1.0, max_relative = 1e-12);
        assert_relative_eq!(l.kappa, 1.0, max_relative = 1e-9);
        assert_eq!(l.delta, simplicity_check(&spectra, 0.0).min_gap);
        let cf = spin_boson_spectra(&sys, &b, 1e-11).unwrap();
        let a = cf.a0[1].im.min(cf.a_delta.im);
        let alpha = cf.a0[1].norm().max(cf.a_delta.norm());
        assert_relative_eq!(l.a, a, max_relative = 1e-6);
        assert_relative_eq!(l.alpha, alpha, max_relative = 1e-6);
        assert_relative_eq!(l.delta, cf.a0[1].norm(), max_relative = 1e-6);
        assert!(l.a <= l.alpha && l.delta <= 2.0 * l.alpha && l.kappa >= 1.0 - 1e-12);
    }

    #[test]
    fn diagonal_coupling_has_no_decay() {
        let tol = Tolerances::default();
        let sys = SystemModel::spin_boson(1.0, array![[ONE, ZERO], [ZERO, -ONE]], &tol).unwrap();
        let spectra = lso_spectra(&sys, &bath(1.0), &tol).unwrap();
        assert!(matches!(param_ledger(&spectra, &sys, &tol), Err(Error::FgrViolated(_))));
    }

    #[test]
    fn c1_at_zero_coupling() {
        let g = norms([0.7, 1.1, 1.9, 2.3, 4.0]);
        assert_relative_eq!(c1(&g, 0.0), 1.0 + 0.7 + 1.9 + 0.7 * 2.3, max_relative = 1e-15);
        assert_relative_eq!(kappa1(&g, 0.0), c1(&g, 0.0) * 3.0f64.powi(2), max_relative = 1e-15);
    }

    #[test]
    fn reference_chain_is_pinned() {
        // p = 3/2, q = 3, h = 1, w = i, β = 1, λ = 0.1
        let b = BathSpec::new(1.0, 1.5, 3.0, RadialProfile::One).unwrap().with_amplitude(Complex64::new(0.0, 1.0)).unwrap();
        let g = gamma_norms(&b, GammaMethod::Analytic, 1e-10).unwrap();
        let ch = (c1(&g, 0.1), kappa1(&g, 0.1));
        assert_relative_eq!(ch.0, REFERENCE_C1, max_relative = 1e-8);
        assert_relative_eq!(ch.1, REFERENCE_KAPPA1, max_relative = 1e-8);
    }

    // first computed run
    const REFERENCE_C1: f64 = 1.574_109_105_772_977e3;
    const REFERENCE_KAPPA1: f64 = 3.825_614_458_942_852e6;

    #[test]
    fn threshold_scales_with_temperature_and_prefactor() {
        let l = ParamLedger::from_values(0.5, 3.0, 0.8, 1.2, 1.0);
        let c = coupling_threshold(&l, 0.3, 1.0).unwrap();
        assert_relative_eq!(coupling_threshold(&l, 0.6, 1.0).unwrap(), c * 2f64.powi(24), max_relative = 1e-12);
        assert_relative_eq!(coupling_threshold(&l, 0.3, 2.0).unwrap(), 2.0 * c, max_relative = 1e-15);
        let bad = ParamLedger::from_values(0.5, 3.0, 0.0, 1.2, 1.0);
        assert!(coupling_threshold(&bad, 0.3, 1.0).is_err());
        assert!(coupling_threshold(&l, 0.0, 1.0).is_err());
    }

    #[test]
    fn low_temperature_estimates_give_76_over_3() {
        let ts: Vec<f64> = (0..10).map(|k| 0.05 * 10f64.powf(k as f64 / 9.0)).collect();
        let c: Vec<f64> = ts.iter().map(|&t| coupling_threshold(&spin_boson_low_temperature_ledger(1.0, 1.0 / t), t, 1.0).unwrap()).collect();
        assert_relative_eq!(log_log_slope(&ts, &c), 76.0 / 3.0, max_relative = 1e-10);
    }

    #[test]
    fn computed_threshold_increases_with_temperature() {
        let sys = spin_boson();
        let tol = Tolerances::default().with_quad(1e-10);
        let mut prev = 0.0;
        for t in [0.05, 0.1, 0.2, 0.5] {
            let spectra = lso_spectra(&sys, &bath(1.0 / t), &tol).unwrap();
            let c = coupling_threshold(&param_ledger(&spectra, &sys, &tol).unwrap(), t, 1.0).unwrap();
            assert!(c > prev);
            prev = c;
        }
    }

    proptest! {
        #[test]
        fn kappa1_is_monotone(g in prop::array::uniform5(0.0f64..5.0), j in 0usize..5, bump in 0.0f64..2.0, lambda in -0.5f64..0.5) {
            let mut h = g;
            h[j] += bump;
            prop_assert!(kappa1(&norms(h), lambda) >= kappa1(&norms(g), lambda));
        }

        #[test]
        fn lambda0_is_below_reduced_ratio_when_chain_is_large(k1 in 1.0f64..50.0) {
            let l = ParamLedger::from_values(0.5, 3.0, 0.8, 1.2, 1.0);
            let chain = KappaChain { lambda: 0.0, c1: 1.0, kappa1: k1, kappa0: kappa0(&l, k1), ip_r: 10.0 };
            prop_assert!(lambda0(&l, &chain) <= lambda0_reduced(&l) * (1.0 + 1e-12));
            prop_assert!(chain.kappa0 >= 1.0);
        }
    }
}
