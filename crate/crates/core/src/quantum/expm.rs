use super::{condition_number, devectorize, eig, ensure_square, identity, vectorize, CMat, Superoperator};
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;
use ndarray_linalg::{Inverse, Norm};
use num_complex::Complex64;

/// Padé-13 numerator coefficients.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(a: &CMat) -> f64 {
    a.columns().into_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm(a: &CMat) -> Result<CMat> {
    let n = ensure_square(a, "matrix")?;
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(Error::NonFinite("expm argument".into()));
    }
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.mapv(|z| z / 2f64.powi(s));
    let id = identity(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let b = |k: usize| Complex64::new(PADE13[k], 0.0);
    let sc = |m: &CMat, k: usize| m.mapv(|z| z * b(k));

    let inner_u = a6.dot(&(sc(&a6, 13) + sc(&a4, 11) + sc(&a2, 9)));
    let u = a.dot(&(inner_u + sc(&a6, 7) + sc(&a4, 5) + sc(&a2, 3) + sc(&id, 1)));
    let inner_v = a6.dot(&(sc(&a6, 12) + sc(&a4, 10) + sc(&a2, 8)));
    let v = inner_v + sc(&a6, 6) + sc(&a4, 4) + sc(&a2, 2) + sc(&id, 0);

    let mut r = (&v - &u).inv()?.dot(&(&v + &u));
    for _ in 0..s {
        r = r.dot(&r);
    }
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExpmMethod {
    /// Spectral decomposition when well conditioned, scaling-and-squaring otherwise.
    #[default]
    Auto,
    Spectral,
    ScalingSquaring,
}

#[derive(Clone, Debug)]
struct Spectral {
    values: Vec<Complex64>,
    vecs: CMat,
    inv: CMat,
}

/// Reusable t -> exp(tL) for one generator.
#[derive(Clone, Debug)]
pub struct Propagator {
    generator: CMat,
    dim: usize,
    spectral: Option<Spectral>,
    condition: f64,
    fallback: bool,
}

impl Propagator {
    pub fn new(l: &Superoperator, method: ExpmMethod, tol: &Tolerances) -> Result<Self> {
        let generator = l.matrix().clone();
        let mut out = Self { generator, dim: l.dim(), spectral: None, condition: f64::NAN, fallback: false };
        if method == ExpmMethod::ScalingSquaring {
            return Ok(out);
        }
        let (values, vecs) = eig(&out.generator)?;
        let condition = condition_number(&vecs)?;
        out.condition = condition;
        if condition < tol.max_condition {
            let inv = vecs.inv()?;
            out.spectral = Some(Spectral { values, vecs, inv });
        } else if method == ExpmMethod::Spectral {
            return Err(Error::DefectiveGenerator { condition });
        } else {
            log::debug!("generator eigenvectors ill conditioned ({condition:.3e}); using scaling and squaring");
            out.fallback = true;
        }
        Ok(out)
    }

    /// True when `Auto` had to abandon the spectral path.
    pub fn used_fallback(&self) -> bool {
        self.fallback
    }

    /// Eigenvector condition number (NaN when the spectral path was not attempted).
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// exp(tL) as an N^2 x N^2 matrix.
    pub fn exp(&self, t: f64) -> Result<CMat> {
        match &self.spectral {
            Some(sp) => {
                let mut scaled = sp.vecs.clone();
                for (j, mut col) in scaled.columns_mut().into_iter().enumerate() {
                    let f = (sp.values[j] * t).exp();
                    col.mapv_inplace(|z| z * f);
                }
                Ok(scaled.dot(&sp.inv))
            }
            None => expm(&self.generator.mapv(|z| z * t)),
        }
    }

    pub fn apply(&self, t: f64, rho: &CMat) -> Result<CMat> {
        if rho.dim() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch(format!("state is {:?}, expected {1}x{1}", rho.dim(), self.dim)));
        }
        let v = vectorize(rho);
        let out = match &self.spectral {
            Some(sp) => {
                let mut c = sp.inv.dot(&v);
                for (j, z) in c.iter_mut().enumerate() {
                    *z *= (sp.values[j] * t).exp();
                }
                sp.vecs.dot(&c)
            }
            None => self.exp(t)?.dot(&v),
        };
        devectorize(&out, self.dim)
    }
}

/// exp(tL) rho0 for a single time.
pub fn expm_apply(l: &Superoperator, t: f64, rho0: &CMat, method: ExpmMethod, tol: &Tolerances) -> Result<CMat> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} is not finite")));
    }
    Propagator::new(l, method, tol)?.apply(t, rho0)
}

/// Frobenius-norm relative difference, for diagnostics.
pub fn relative_difference(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm_l2() / a.norm_l2().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{commutator_superop, dagger, ONE, ZERO};
    use ndarray::array;

    #[test]
    fn expm_of_pauli_rotation() {
        // exp(-i theta X) = cos theta - i sin theta X
        let theta = 2.3;
        let x = array![[ZERO, Complex64::new(0.0, -theta)], [Complex64::new(0.0, -theta), ZERO]];
        let e = expm(&x).unwrap();
        assert!((e[[0, 0]] - Complex64::new(theta.cos(), 0.0)).norm() < 1e-14);
        assert!((e[[0, 1]] - Complex64::new(0.0, -theta.sin())).norm() < 1e-14);
    }

    #[test]
    fn expm_large_norm_uses_squaring() {
        let a = array![[Complex64::new(-30.0, 0.0), Complex64::new(5.0, 0.0)], [ZERO, Complex64::new(-31.0, 0.0)]];
        let e = expm(&a).unwrap();
        // upper triangular: off-diagonal = 5 (e^-30 - e^-31)
        let want = 5.0 * ((-30f64).exp() - (-31f64).exp());
        assert!((e[[0, 1]].re - want).abs() < 1e-12 * want);
        assert!((e[[0, 0]].re - (-30f64).exp()).abs() < 1e-12 * (-30f64).exp());
    }

    #[test]
    fn spectral_and_pade_agree_on_unitary_evolution() {
        let h = array![[ONE, Complex64::new(0.3, 0.4)], [Complex64::new(0.3, -0.4), -ONE]];
        let tol = Tolerances::default();
        let l = commutator_superop(&h, &tol).unwrap();
        let rho = array![[Complex64::new(0.6, 0.0), Complex64::new(0.2, 0.1)], [Complex64::new(0.2, -0.1), Complex64::new(0.4, 0.0)]];
        let a = expm_apply(&l, 3.7, &rho, ExpmMethod::Spectral, &tol).unwrap();
        let b = expm_apply(&l, 3.7, &rho, ExpmMethod::ScalingSquaring, &tol).unwrap();
        let u = expm(&h.mapv(|z| z * Complex64::new(0.0, -3.7))).unwrap();
        let c = u.dot(&rho).dot(&dagger(&u));
        assert!(relative_difference(&a, &b) < 1e-12);
        assert!(relative_difference(&a, &c) < 1e-12);
    }

    #[test]
    fn defective_generator_falls_back() {
        // Jordan block: not diagonalizable.
        let mut m = CMat::zeros((4, 4));
        m[[0, 1]] = ONE;
        let l = Superoperator::new(2, m).unwrap();
        let tol = Tolerances::default();
        let p = Propagator::new(&l, ExpmMethod::Auto, &tol).unwrap();
        assert!(p.used_fallback());
        let e = p.exp(2.0).unwrap();
        assert!((e[[0, 1]] - Complex64::new(2.0, 0.0)).norm() < 1e-14);
        assert!(matches!(Propagator::new(&l, ExpmMethod::Spectral, &tol), Err(Error::DefectiveGenerator { .. })));
    }
}
