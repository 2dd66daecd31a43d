use crate::error::{Error, Result};
use crate::jet::Jet;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Radial profile h of the form factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialProfile {
    /// h = 1
    One,
    /// h(k) = exp(-k / kappa)
    ExpCutoff { kappa: f64 },
}

impl RadialProfile {
    pub fn eval(&self, k: f64) -> f64 {
        match *self {
            RadialProfile::One => 1.0,
            RadialProfile::ExpCutoff { kappa } => (-k / kappa).exp(),
        }
    }

    pub fn jet(&self, k: Jet) -> Jet {
        match *self {
            RadialProfile::One => Jet::constant(1.0),
            RadialProfile::ExpCutoff { kappa } => k.scale(-1.0 / kappa).exp(),
        }
    }

    /// sup_{k >= u} |h(k)|.
    pub fn sup_from(&self, u: f64) -> f64 {
        match *self {
            RadialProfile::One => 1.0,
            RadialProfile::ExpCutoff { kappa } => (-u.max(0.0) / kappa).exp(),
        }
    }

    /// Taylor coefficients of h at 0+.
    pub fn taylor_at_zero(&self, n: usize) -> Vec<f64> {
        match *self {
            RadialProfile::One => (0..n).map(|k| if k == 0 { 1.0 } else { 0.0 }).collect(),
            RadialProfile::ExpCutoff { kappa } => {
                let mut c = vec![1.0; n];
                for k in 1..n {
                    c[k] = c[k - 1] * (-1.0 / kappa) / k as f64;
                }
                c
            }
        }
    }

    fn validate(&self) -> Option<String> {
        match *self {
            RadialProfile::One => None,
            RadialProfile::ExpCutoff { kappa } if !(kappa.is_finite() && kappa > 0.0) => {
                Some(format!("exp_cutoff kappa must be positive and finite, got {kappa}"))
            }
            _ => None,
        }
    }
}

/// Thermal bath with radial form factor g(k) = w k^p h(k) / (1 + k^(p+q)).
///
/// `amplitude` w is a constant complex prefactor (default 1). Its phase does
/// not enter rates or spectral densities but decides how the thermal form
/// factor is continued to negative frequencies (see `bath::ThermalFormFactor`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    pub profile: RadialProfile,
    pub amplitude: Complex64,
}

pub const ADMISSIBLE_HALF_INTEGER_P: [f64; 3] = [-0.5, 0.5, 1.5];

impl BathSpec {
    pub fn new(beta: f64, p: f64, q: f64, profile: RadialProfile) -> Result<Self> {
        Self { beta, p, q, profile, amplitude: Complex64::new(1.0, 0.0) }.validated()
    }

    pub fn with_amplitude(self, w: Complex64) -> Result<Self> {
        Self { amplitude: w, ..self }.validated()
    }

    pub fn with_beta(self, beta: f64) -> Result<Self> {
        Self { beta, ..self }.validated()
    }

    fn validated(self) -> Result<Self> {
        let report = assumption1_check(&self);
        if report.passed {
            Ok(self)
        } else {
            Err(Error::InadmissibleBath(report.violations.join("; ")))
        }
    }

    pub fn temperature(&self) -> f64 {
        1.0 / self.beta
    }

    /// g_r(k) = k^p h(k) / (1 + k^(p+q)), k > 0.
    pub fn radial_form_factor(&self, k: f64) -> f64 {
        k.powf(self.p) * self.profile.eval(k) / (1.0 + k.powf(self.p + self.q))
    }

    pub fn form_factor(&self, k: f64) -> Complex64 {
        self.amplitude * self.radial_form_factor(k)
    }

    /// ∫_{S^2} |g(k, Σ)|^2 dΣ = 4π |w|^2 g_r(k)^2.
    pub fn angular_integral(&self, k: f64) -> f64 {
        4.0 * PI * self.amplitude.norm_sqr() * self.radial_form_factor(k).powi(2)
    }

    /// k g_r(k)^2 = k^(2p+1) h^2 / (1 + k^(p+q))^2, finite at k = 0 for every admissible p.
    pub fn radial_weight(&self, k: f64) -> f64 {
        let k = k.abs();
        k.powf(2.0 * self.p + 1.0) * self.profile.eval(k).powi(2) / (1.0 + k.powf(self.p + self.q)).powi(2)
    }

    /// Bound on radial_weight(k) for k >= u > 0.
    pub fn radial_weight_envelope(&self, u: f64) -> f64 {
        u.powf(1.0 - 2.0 * self.q) * self.profile.sup_from(u).powi(2)
    }

    /// Jet of g_r / w at a positive expansion point.
    pub fn radial_jet(&self, k: Jet) -> Jet {
        k.powf(self.p) * self.profile.jet(k) / (k.powf(self.p + self.q) + 1.0)
    }

    /// True for the Ohmic case p = -1/2, the only one with a nonzero zero-frequency rate.
    pub fn is_ohmic(&self) -> bool {
        (self.p + 0.5).abs() < 1e-12
    }

    /// Expansion of k^shift g_r(k) at 0+: (exponent, coefficient) pairs,
    /// exponents ascending, terms with |exponent| <= max_exponent.
    pub fn small_k_expansion(&self, shift: f64, max_exponent: f64) -> Vec<(f64, f64)> {
        let m = self.p + self.q;
        let h = self.profile.taylor_at_zero(12);
        let mut terms: Vec<(f64, f64)> = Vec::new();
        for (k, &hk) in h.iter().enumerate() {
            if hk == 0.0 {
                continue;
            }
            for n in 0..8 {
                let e = self.p + shift + k as f64 + n as f64 * m;
                if e > max_exponent {
                    break;
                }
                let c = hk * if n % 2 == 0 { 1.0 } else { -1.0 };
                match terms.iter_mut().find(|(x, _)| (x - e).abs() < 1e-9) {
                    Some(t) => t.1 += c,
                    None => terms.push((e, c)),
                }
            }
        }
        terms.retain(|(_, c)| c.abs() > 1e-14);
        terms.sort_by(|a, b| a.0.total_cmp(&b.0));
        terms
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assumption1Report {
    pub p_admissible: bool,
    pub q_admissible: bool,
    pub profile_regular: bool,
    pub profile_nonzero_at_origin: bool,
    pub violations: Vec<String>,
    pub passed: bool,
}

/// Check the admissibility conditions on (p, q, h, beta, w).
///
/// p must be -1/2, 1/2, 3/2 or exceed 2; q must exceed 2; h and its first four
/// radial derivatives must be finite and bounded on (0, ∞) with h(0+) != 0.
pub fn assumption1_check(bath: &BathSpec) -> Assumption1Report {
    let mut violations = Vec::new();
    let p_admissible = bath.p.is_finite() && (ADMISSIBLE_HALF_INTEGER_P.iter().any(|&x| (bath.p - x).abs() < 1e-12) || bath.p > 2.0);
    if !p_admissible {
        violations.push(format!("p = {} is not in {{-1/2, 1/2, 3/2}} ∪ (2, ∞)", bath.p));
    }
    let q_admissible = bath.q.is_finite() && bath.q > 2.0;
    if !q_admissible {
        violations.push(format!("q = {} must exceed 2", bath.q));
    }
    if !(bath.beta.is_finite() && bath.beta > 0.0) {
        violations.push(format!("beta = {} must be positive and finite", bath.beta));
    }
    if !(bath.amplitude.norm() > 0.0 && bath.amplitude.norm().is_finite()) {
        violations.push(format!("amplitude {} must be nonzero and finite", bath.amplitude));
    }
    let mut profile_regular = true;
    if let Some(msg) = bath.profile.validate() {
        violations.push(msg);
        profile_regular = false;
    }
    let mut profile_nonzero_at_origin = false;
    if profile_regular {
        let mut sup = [0.0f64; 5];
        for i in 0..=120 {
            let k = 10f64.powf(-8.0 + 12.0 * i as f64 / 120.0);
            let d = bath.profile.jet(Jet::variable(k)).derivatives();
            for j in 0..5 {
                if !d[j].is_finite() {
                    profile_regular = false;
                }
                sup[j] = sup[j].max(d[j].abs());
            }
        }
        if !profile_regular || sup.iter().any(|&s| s > 1e12) {
            profile_regular = false;
            violations.push("radial profile or one of its first four derivatives is unbounded".into());
        }
        profile_nonzero_at_origin = bath.profile.eval(1e-12).abs() > 1e-10;
        if !profile_nonzero_at_origin {
            violations.push("radial profile vanishes at the origin".into());
        }
    }
    let passed = violations.is_empty();
    Assumption1Report { p_admissible, q_admissible, profile_regular, profile_nonzero_at_origin, violations, passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(p: f64, q: f64) -> BathSpec {
        BathSpec { beta: 1.0, p, q, profile: RadialProfile::One, amplitude: Complex64::new(1.0, 0.0) }
    }

    #[test]
    fn admissible_exponents() {
        assert!(assumption1_check(&raw(0.5, 2.5)).passed);
        assert!(assumption1_check(&raw(-0.5, 3.0)).passed);
        assert!(assumption1_check(&raw(2.7, 2.1)).passed);
        let r = assumption1_check(&raw(1.0, 3.0));
        assert!(!r.passed && !r.p_admissible);
        let r = assumption1_check(&raw(0.5, 2.0));
        assert!(!r.passed && !r.q_admissible);
        assert!(BathSpec::new(1.0, 1.0, 3.0, RadialProfile::One).is_err());
        assert!(BathSpec::new(1.0, 0.5, 3.0, RadialProfile::ExpCutoff { kappa: -1.0 }).is_err());
    }

    #[test]
    fn small_k_expansion_merges_colliding_exponents() {
        let b = BathSpec::new(1.0, 0.5, 2.5, RadialProfile::ExpCutoff { kappa: 1.0 }).unwrap();
        // k^0.5 (1 - k + k^2/2 - k^3/6 ...)(1 - k^3 + ...): exponent 3.5 collects -1/6 - 1
        let t = b.small_k_expansion(0.0, 5.0);
        let c35 = t.iter().find(|(e, _)| (e - 3.5).abs() < 1e-9).unwrap().1;
        assert!((c35 + 7.0 / 6.0).abs() < 1e-14);
        assert_eq!(t[0], (0.5, 1.0));
    }

    #[test]
    fn radial_weight_is_k_times_square() {
        let b = BathSpec::new(2.0, 1.5, 3.0, RadialProfile::ExpCutoff { kappa: 3.0 }).unwrap();
        for &k in &[0.1, 1.0, 7.0] {
            let g = b.radial_form_factor(k);
            assert!((b.radial_weight(k) - k * g * g).abs() < 1e-15 * (1.0 + k * g * g));
            assert!(b.radial_weight(k) <= b.radial_weight_envelope(k) * (1.0 + 1e-12));
        }
        let ohmic = BathSpec::new(1.0, -0.5, 3.0, RadialProfile::One).unwrap();
        assert_eq!(ohmic.radial_weight(0.0), 1.0);
    }
}
