use super::{eigh, ensure_finite, ensure_square, hermitian_residual, max_abs, singular_values, trace, CMat};
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;
use ndarray::Array2;
use num_complex::Complex64;

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    rho: CMat,
}

impl DensityMatrix {
    pub fn new(rho: CMat, tol: &Tolerances) -> Result<Self> {
        ensure_square(&rho, "density matrix")?;
        ensure_finite(&rho, "density matrix")?;
        let herm = hermitian_residual(&rho);
        if herm > tol.hermitian.max(tol.psd) * max_abs(&rho).max(1.0) {
            return Err(Error::NotHermitian { what: "density matrix", residual: herm });
        }
        let tr = trace(&rho);
        if (tr - 1.0).norm() > tol.trace {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let (vals, _) = eigh(&rho)?;
        let min = vals.first().copied().unwrap_or(0.0);
        if min < -tol.psd {
            return Err(Error::InvalidState(format!("minimum eigenvalue {min:.3e} below -{:.1e}", tol.psd)));
        }
        Ok(Self { rho })
    }

    /// Wrap without validation, e.g. for propagated states whose checks are reported separately.
    pub fn new_unchecked(rho: CMat) -> Self {
        Self { rho }
    }

    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidArgument("state vector has zero norm".into()));
        }
        let n = psi.len();
        Ok(Self { rho: Array2::from_shape_fn((n, n), |(i, j)| psi[i] * psi[j].conj() / (norm * norm)) })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self { rho: Array2::eye(n).mapv(|z: Complex64| z / n as f64) }
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.rho
    }

    pub fn into_matrix(self) -> CMat {
        self.rho
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(eigh(&self.rho)?.0[0])
    }
}

impl AsRef<CMat> for DensityMatrix {
    fn as_ref(&self) -> &CMat {
        &self.rho
    }
}

/// 1/2 ||a - b||_1.
pub fn trace_distance(a: &CMat, b: &CMat) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", a.dim(), b.dim())));
    }
    Ok(0.5 * singular_values(&(a - b))?.iter().sum::<f64>())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Partial trace over one factor of H_A (x) H_B, with composite index `a*d_B + b`.
pub fn partial_trace(rho: &CMat, dims: (usize, usize), keep: Subsystem) -> Result<CMat> {
    let (da, db) = dims;
    if rho.dim() != (da * db, da * db) {
        return Err(Error::DimensionMismatch(format!("{:?} is not square of size {da}*{db}", rho.dim())));
    }
    Ok(match keep {
        Subsystem::A => Array2::from_shape_fn((da, da), |(a, a2)| (0..db).map(|b| rho[[a * db + b, a2 * db + b]]).sum()),
        Subsystem::B => Array2::from_shape_fn((db, db), |(b, b2)| (0..da).map(|a| rho[[a * db + b, a * db + b2]]).sum()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::kron;
    use approx::assert_relative_eq;
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trace_distance_orthogonal_pure_states() {
        let a = DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let b = DensityMatrix::pure(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_relative_eq!(trace_distance(a.matrix(), b.matrix()).unwrap(), 1.0, epsilon = 1e-14);
        assert_eq!(trace_distance(a.matrix(), a.matrix()).unwrap(), 0.0);
    }

    #[test]
    fn invalid_states_rejected() {
        let tol = Tolerances::default();
        let neg = array![[c(1.5, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-0.5, 0.0)]];
        assert!(DensityMatrix::new(neg, &tol).is_err());
        let bad_trace = array![[c(0.5, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.2, 0.0)]];
        assert!(DensityMatrix::new(bad_trace, &tol).is_err());
        assert!(DensityMatrix::new(DensityMatrix::maximally_mixed(3).into_matrix(), &tol).is_ok());
    }

    #[test]
    fn partial_trace_of_product() {
        let ra = array![[c(0.7, 0.0), c(0.1, 0.2)], [c(0.1, -0.2), c(0.3, 0.0)]];
        let rb = DensityMatrix::maximally_mixed(3).into_matrix();
        let joint = kron(&ra, &rb);
        let got_a = partial_trace(&joint, (2, 3), Subsystem::A).unwrap();
        let got_b = partial_trace(&joint, (2, 3), Subsystem::B).unwrap();
        for (x, y) in got_a.iter().zip(ra.iter()) {
            assert!((x - y).norm() < 1e-15);
        }
        for (x, y) in got_b.iter().zip(rb.iter()) {
            assert!((x - y).norm() < 1e-15);
        }
    }
}
