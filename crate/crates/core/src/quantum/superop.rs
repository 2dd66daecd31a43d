use super::{conj, dagger, ensure_square, identity, kron, CMat, CVec, I};
use crate::error::{Error, Result};
use crate::tolerances::Tolerances;
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use std::ops::{Add, Mul};

/// Column stacking: entry `(i, j)` goes to position `i + n*j`.
pub fn vectorize(m: &CMat) -> CVec {
    let (n, k) = m.dim();
    let mut v = Array1::zeros(n * k);
    for j in 0..k {
        for i in 0..n {
            v[i + n * j] = m[[i, j]];
        }
    }
    v
}

pub fn devectorize(v: &CVec, n: usize) -> Result<CMat> {
    if v.len() != n * n {
        return Err(Error::DimensionMismatch(format!("vector of length {} cannot be reshaped to {n}x{n}", v.len())));
    }
    Ok(Array2::from_shape_fn((n, n), |(i, j)| v[i + n * j]))
}

/// Linear map on N x N matrices acting on column-stacked vectors:
/// vec(A X B) = (B^T (x) A) vec(X).
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    dim: usize,
    mat: CMat,
}

impl Superoperator {
    pub fn new(dim: usize, mat: CMat) -> Result<Self> {
        if mat.dim() != (dim * dim, dim * dim) {
            return Err(Error::DimensionMismatch(format!(
                "superoperator on {dim}x{dim} matrices must be {0}x{0}, got {1:?}",
                dim * dim,
                mat.dim()
            )));
        }
        Ok(Self { dim, mat })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, mat: Array2::zeros((dim * dim, dim * dim)) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, mat: identity(dim * dim) }
    }

    /// X -> left X right.
    pub fn sandwich(left: &CMat, right: &CMat) -> Self {
        Self { dim: left.nrows(), mat: kron(&right.t().to_owned(), left) }
    }

    /// Build the matrix of an arbitrary linear map by applying it to matrix units.
    pub fn from_map(dim: usize, f: impl Fn(&CMat) -> CMat) -> Self {
        let n2 = dim * dim;
        let mut mat = Array2::zeros((n2, n2));
        for j in 0..dim {
            for i in 0..dim {
                let mut e = Array2::zeros((dim, dim));
                e[[i, j]] = Complex64::new(1.0, 0.0);
                let col = vectorize(&f(&e));
                mat.column_mut(i + dim * j).assign(&col);
            }
        }
        Self { dim, mat }
    }

    /// Dimension N of the underlying matrices.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn apply(&self, x: &CMat) -> Result<CMat> {
        if x.dim() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch(format!("operand is {:?}, expected {1}x{1}", x.dim(), self.dim)));
        }
        devectorize(&self.mat.dot(&vectorize(x)), self.dim)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { dim: self.dim, mat: self.mat.mapv(|z| z * s) }
    }

    /// max_X |tr L(X)| over matrix units, i.e. how far the map is from trace-annihilating.
    pub fn trace_annihilation_residual(&self) -> f64 {
        let n = self.dim;
        let mut r = 0.0f64;
        for col in 0..n * n {
            let mut t = Complex64::new(0.0, 0.0);
            for i in 0..n {
                t += self.mat[[i + n * i, col]];
            }
            r = r.max(t.norm());
        }
        r
    }

    /// max |L(X^dagger) - L(X)^dagger| over matrix units.
    pub fn hermiticity_preservation_residual(&self) -> f64 {
        let n = self.dim;
        let mut r = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                // L(E_ji) must equal L(E_ij)^dagger
                for a in 0..n {
                    for b in 0..n {
                        let lhs = self.mat[[a + n * b, j + n * i]];
                        let rhs = self.mat[[b + n * a, i + n * j]].conj();
                        r = r.max((lhs - rhs).norm());
                    }
                }
            }
        }
        r
    }
}

impl Add for &Superoperator {
    type Output = Superoperator;
    fn add(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!(self.dim, rhs.dim, "superoperator dimensions differ");
        Superoperator { dim: self.dim, mat: &self.mat + &rhs.mat }
    }
}

impl Mul<&Superoperator> for &Superoperator {
    type Output = Superoperator;
    fn mul(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!(self.dim, rhs.dim, "superoperator dimensions differ");
        Superoperator { dim: self.dim, mat: self.mat.dot(&rhs.mat) }
    }
}

/// The superoperator X -> -i[H, X].
pub fn commutator_superop(h: &CMat, tol: &Tolerances) -> Result<Superoperator> {
    let n = ensure_square(h, "Hamiltonian")?;
    let res = super::hermitian_residual(h);
    if res > tol.hermitian * super::max_abs(h).max(1.0) {
        return Err(Error::NotHermitian { what: "Hamiltonian", residual: res });
    }
    let id = identity(n);
    let mat = (kron(&id, h) - kron(&h.t().to_owned(), &id)).mapv(|z| -I * z);
    Ok(Superoperator { dim: n, mat })
}

/// Lindblad dissipator X -> rate (A X A^dagger - 1/2 {A^dagger A, X}).
pub fn dissipator(a: &CMat, rate: f64) -> Result<Superoperator> {
    let n = ensure_square(a, "jump operator")?;
    let id = identity(n);
    let ada = dagger(a).dot(a);
    let mut mat = kron(&conj(a), a);
    mat = mat - kron(&id, &ada).mapv(|z| z * 0.5) - kron(&ada.t().to_owned(), &id).mapv(|z| z * 0.5);
    mat.mapv_inplace(|z| z * rate);
    Ok(Superoperator { dim: n, mat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{commutator, ONE, ZERO};
    use approx::assert_relative_eq;
    use ndarray::array;

    fn sample() -> CMat {
        array![[Complex64::new(0.3, 0.1), Complex64::new(-1.0, 2.0)], [Complex64::new(0.5, 0.0), Complex64::new(0.0, -0.7)]]
    }

    #[test]
    fn vectorize_roundtrip() {
        let m = sample();
        let v = vectorize(&m);
        assert_eq!(v[1], m[[1, 0]]);
        assert_eq!(v[2], m[[0, 1]]);
        assert_eq!(devectorize(&v, 2).unwrap(), m);
    }

    #[test]
    fn sandwich_matches_products() {
        let a = sample();
        let b = dagger(&a);
        let x = array![[ONE, I], [ZERO, Complex64::new(2.0, 0.0)]];
        let s = Superoperator::sandwich(&a, &b);
        let lhs = s.apply(&x).unwrap();
        let rhs = a.dot(&x).dot(&b);
        for (l, r) in lhs.iter().zip(rhs.iter()) {
            assert_relative_eq!(l.re, r.re, epsilon = 1e-14);
            assert_relative_eq!(l.im, r.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn commutator_superop_matches_direct() {
        let h = array![[ONE, Complex64::new(0.2, -0.3)], [Complex64::new(0.2, 0.3), -ONE]];
        let l = commutator_superop(&h, &Tolerances::default()).unwrap();
        let x = sample();
        let direct = commutator(&h, &x).mapv(|z| -I * z);
        let got = l.apply(&x).unwrap();
        for (a, b) in got.iter().zip(direct.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
        assert!(l.trace_annihilation_residual() < 1e-14);
    }

    #[test]
    fn non_hermitian_hamiltonian_rejected() {
        let err = commutator_superop(&sample(), &Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { .. }));
    }

    #[test]
    fn dissipator_is_trace_annihilating_and_hermiticity_preserving() {
        let d = dissipator(&sample(), 0.7).unwrap();
        assert!(d.trace_annihilation_residual() < 1e-14);
        assert!(d.hermiticity_preservation_residual() < 1e-14);
        let via_map = Superoperator::from_map(2, |x| {
            let a = sample();
            let ada = dagger(&a).dot(&a);
            (a.dot(x).dot(&dagger(&a)) - (ada.dot(x) + x.dot(&ada)).mapv(|z| z * 0.5)).mapv(|z| z * 0.7)
        });
        for (a, b) in d.matrix().iter().zip(via_map.matrix().iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
