//! Weights of the second-order bath kernel and their boundary values
//! ∫ W(u) (u - u0 + i0)^{-1} du = -iπ W(u0) + PV ∫ W(u)/(u - u0) du.

use crate::bath::c_hat_beta;
use crate::error::Result;
use crate::model::BathSpec;
use crate::quadrature::{pv_integral, real, TailModel};
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

/// The three u-weights: W1 = (2/π)ĉ_β(u), W2 = e^{-βu/2} W1 (even), W4(u) = W1(-u).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Weight {
    Direct,
    Cross,
    Reflected,
}

pub(crate) fn weight(bath: &BathSpec, kind: Weight, u: f64) -> f64 {
    let w1 = |x: f64| 2.0 / PI * c_hat_beta(bath, x);
    match kind {
        Weight::Direct => w1(u),
        // (2/π) J(|u|) / (2 sinh(β|u|/2)), written without overflow
        Weight::Cross => {
            let a = u.abs();
            4.0 * PI * bath.amplitude.norm_sqr() * bath.radial_weight(a) * crate::bath::half_x_over_sinh(bath.beta * a) / bath.beta
        }
        Weight::Reflected => w1(-u),
    }
}

/// Truncation point for ∫ W(u)/(u - u0): every weight is bounded by
/// C u^{2-2q} with C = 4π|w|^2 sup h^2 / (1 - e^{-βU}), and |u - u0| >= u/2 for u >= 2|u0|.
pub(crate) fn truncation(bath: &BathSpec, u0: f64, tol: f64) -> Result<f64> {
    let mut u = (4.0 * u0.abs()).max(16.0);
    loop {
        let c = 4.0 * PI * bath.amplitude.norm_sqr() * bath.profile.sup_from(u).powi(2) / -(-bath.beta * u).exp_m1();
        let bound = TailModel::PowerLaw { coefficient: 2.0 * c, exponent: 2.0 * bath.q - 1.0 };
        let cut = bound.cutoff(u, tol)?;
        if cut <= u * (1.0 + 1e-9) {
            return Ok(u);
        }
        u = cut;
    }
}

/// PV ∫_ℝ W(u)/(u - u0) du.
pub fn weight_pv(bath: &BathSpec, kind: Weight, u0: f64, tol: f64) -> Result<f64> {
    let cut = truncation(bath, u0, tol / 2.0)?;
    let b = *bath;
    let f = real(move |u| weight(&b, kind, u)).with_breakpoints(vec![0.0]).with_max_subdivisions(100_000);
    Ok(pv_integral(&f, u0, -cut, cut, tol / 2.0)?.value.re)
}

/// Memoized boundary values R(W, u0) = -iπ W(u0) + PV ∫ W(u)/(u - u0) du.
///
/// Thread-safe, so one cache can be shared by all Bohr frequencies.
pub struct Resolvents {
    bath: BathSpec,
    tol: f64,
    cache: Mutex<HashMap<(Weight, i64), Complex64>>,
}

impl Resolvents {
    pub fn new(bath: &BathSpec, tol: f64) -> Self {
        Self { bath: *bath, tol, cache: Mutex::new(HashMap::new()) }
    }

    pub fn bath(&self) -> &BathSpec {
        &self.bath
    }

    pub fn get(&self, kind: Weight, u0: f64) -> Result<Complex64> {
        // Bohr-frequency differences are rounded so that equal frequencies share an entry.
        let key = (kind, (u0 * 1e9).round() as i64);
        if let Some(v) = self.cache.lock().expect("resolvent cache poisoned").get(&key) {
            return Ok(*v);
        }
        let pv = weight_pv(&self.bath, kind, u0, self.tol)?;
        let v = Complex64::new(pv, -PI * weight(&self.bath, kind, u0));
        self.cache.lock().expect("resolvent cache poisoned").insert(key, v);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RadialProfile;
    use approx::assert_relative_eq;

    #[test]
    fn weights_are_related() {
        let b = BathSpec::new(1.3, 0.5, 2.5, RadialProfile::ExpCutoff { kappa: 2.0 }).unwrap();
        for &u in &[-3.0, -0.4, 0.2, 1.0, 6.0] {
            let w1 = weight(&b, Weight::Direct, u);
            assert_relative_eq!(weight(&b, Weight::Cross, u), (-0.5 * b.beta * u).exp() * w1, max_relative = 1e-13);
            assert_relative_eq!(weight(&b, Weight::Reflected, u), (-b.beta * u).exp() * w1, max_relative = 1e-13);
        }
    }

    #[test]
    fn even_weight_has_zero_pv_at_origin() {
        let b = BathSpec::new(1.0, 0.5, 2.5, RadialProfile::One).unwrap();
        assert!(weight_pv(&b, Weight::Cross, 0.0, 1e-11).unwrap().abs() < 1e-10);
        // W1 + W4 is even as well
        let s = weight_pv(&b, Weight::Direct, 0.0, 1e-11).unwrap() + weight_pv(&b, Weight::Reflected, 0.0, 1e-11).unwrap();
        assert!(s.abs() < 1e-10);
    }

    #[test]
    fn cache_returns_same_value() {
        let b = BathSpec::new(1.0, 0.5, 2.5, RadialProfile::One).unwrap();
        let r = Resolvents::new(&b, 1e-10);
        let a = r.get(Weight::Direct, 1.0).unwrap();
        assert_eq!(a, r.get(Weight::Direct, 1.0 + 1e-13).unwrap());
        assert_relative_eq!(a.im, -PI * weight(&b, Weight::Direct, 1.0), max_relative = 1e-14);
    }
}
