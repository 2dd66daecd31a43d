use super::{bose_ratio, bose_ratio_jet};
use crate::jet::Jet;
use crate::model::BathSpec;
use num_complex::Complex64;

/// Thermal form factor
///
///   g_β(u) = sqrt(u / (1 - e^{-βu})) |u|^{1/2} × { g(u),       u >= 0
///                                                { -conj g(-u), u < 0
///
/// on ℝ (angular dependence is trivial for radial form factors).
/// 4π |g_β(u)|^2 = (2/π) ĉ_β(u).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalFormFactor {
    bath: BathSpec,
}

impl ThermalFormFactor {
    pub fn new(bath: &BathSpec) -> Self {
        Self { bath: *bath }
    }

    pub fn bath(&self) -> &BathSpec {
        &self.bath
    }

    fn branch_amplitude(&self, u: f64) -> Complex64 {
        if u >= 0.0 {
            self.bath.amplitude
        } else {
            -self.bath.amplitude.conj()
        }
    }

    pub fn eval(&self, u: f64) -> Complex64 {
        let b = &self.bath;
        let v = u.abs();
        let s = (bose_ratio(b.beta * u) / b.beta).sqrt();
        let radial = v.powf(b.p + 0.5) * b.profile.eval(v) / (1.0 + v.powf(b.p + b.q));
        self.branch_amplitude(u) * (s * radial)
    }

    /// g_β and its first four derivatives at u != 0.
    pub fn derivatives(&self, u: f64) -> [Complex64; 5] {
        debug_assert!(u != 0.0);
        let b = &self.bath;
        let uj = Jet::variable(u);
        let v = if u > 0.0 { uj } else { -uj };
        let s = (bose_ratio_jet(uj.scale(b.beta)).scale(1.0 / b.beta)).sqrt();
        let radial = v.powf(b.p + 0.5) * b.profile.jet(v) / (v.powf(b.p + b.q) + 1.0);
        let d = (s * radial).derivatives();
        let w = self.branch_amplitude(u);
        d.map(|x| w * x)
    }

    /// Largest j for which ∂^j g_β is square integrable near u = 0.
    ///
    /// Near 0, |u|^{1/2} g_r(|u|) = Σ c_e |u|^e. Continued to u < 0 the odd part
    /// of the amplitude (Re w) multiplies sgn(u)|u|^e, which is smooth only for odd
    /// integer e; the even part (Im w) multiplies |u|^e, smooth only for even
    /// integer e. A non-smooth term |u|^e caps j at e (integer e) or below e + 1/2.
    pub fn max_finite_order(&self) -> usize {
        let b = &self.bath;
        let odd = b.amplitude.re.abs() > 1e-14 * b.amplitude.norm();
        let even = b.amplitude.im.abs() > 1e-14 * b.amplitude.norm();
        let mut jmax = usize::MAX;
        for (e, _) in b.small_k_expansion(0.5, 8.0) {
            let round = e.round();
            let is_int = (e - round).abs() < 1e-9 && round >= 0.0;
            let smooth_odd = is_int && (round as i64) % 2 == 1;
            let smooth_even = is_int && (round as i64) % 2 == 0;
            let rough = (odd && !smooth_odd) || (even && !smooth_even);
            if rough {
                let cap = if is_int { round as usize } else { (e + 0.5 - 1e-9).ceil() as usize - 1 };
                jmax = jmax.min(cap);
            }
        }
        jmax
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::c_hat_beta;
    use crate::model::RadialProfile;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn bath(p: f64, q: f64, w: Complex64) -> BathSpec {
        BathSpec::new(1.0, p, q, RadialProfile::One).unwrap().with_amplitude(w).unwrap()
    }

    #[test]
    fn square_modulus_is_rate_function() {
        let t = ThermalFormFactor::new(&bath(0.5, 2.5, Complex64::new(0.6, 0.8)));
        for &u in &[-3.0, -0.2, 1e-6, 0.5, 4.0] {
            assert_relative_eq!(4.0 * PI * t.eval(u).norm_sqr(), 2.0 / PI * c_hat_beta(t.bath(), u), max_relative = 1e-13);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let t = ThermalFormFactor::new(&BathSpec::new(1.7, 1.5, 3.0, RadialProfile::ExpCutoff { kappa: 2.0 }).unwrap());
        for &u in &[-1.3, -0.2, 0.3, 2.0] {
            let d = t.derivatives(u);
            let h = 1e-5;
            let fd = (t.eval(u + h) - t.eval(u - h)) / (2.0 * h);
            assert!((d[0] - t.eval(u)).norm() < 1e-14);
            assert!((d[1] - fd).norm() < 1e-8 * d[1].norm().max(1.0));
        }
    }

    #[test]
    fn smoothness_classification() {
        let re = Complex64::new(1.0, 0.0);
        let im = Complex64::new(0.0, 1.0);
        // p = 1/2: sgn(u)|u| = u smooth with real amplitude; first rough term sgn(u)|u|^4 caps at 4
        assert_eq!(ThermalFormFactor::new(&bath(0.5, 2.5, re)).max_finite_order(), 4);
        // p = 3/2 needs the even continuation
        assert_eq!(ThermalFormFactor::new(&bath(1.5, 3.0, re)).max_finite_order(), 2);
        assert!(ThermalFormFactor::new(&bath(1.5, 3.0, im)).max_finite_order() >= 4);
        // Ohmic: real amplitude gives a jump at 0
        assert_eq!(ThermalFormFactor::new(&bath(-0.5, 3.0, re)).max_finite_order(), 0);
        assert!(ThermalFormFactor::new(&bath(-0.5, 3.0, im)).max_finite_order() >= 2);
        // p = 2.5: |u|^3 odd-continued is u^3
        assert!(ThermalFormFactor::new(&bath(2.5, 3.0, re)).max_finite_order() >= 4);
        // p = 3: |u|^3.5 gives j < 4
        assert_eq!(ThermalFormFactor::new(&bath(3.0, 3.0, re)).max_finite_order(), 3);
    }

    proptest! {
        #[test]
        fn kms_symmetry(u in 0.01f64..30.0, beta in 0.2f64..4.0) {
            let t = ThermalFormFactor::new(&bath(0.5, 2.5, Complex64::new(1.0, 0.0)).with_beta(beta).unwrap());
            let lhs = t.eval(-u).norm_sqr();
            let rhs = (-beta * u).exp() * t.eval(u).norm_sqr();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
        }
    }
}
