//! Finite-dimensional quantum primitives: density matrices, column-stacked
//! superoperators, matrix exponentials, Choi-based CPTP checks.

mod choi;
mod density;
mod expm;
mod superop;

pub use choi::{choi_of_map, is_cptp, ChoiMatrix, CptpReport};
pub use density::{partial_trace, trace_distance, DensityMatrix, Subsystem};
pub use expm::{expm, expm_apply, relative_difference, ExpmMethod, Propagator};
pub use superop::{commutator_superop, devectorize, dissipator, vectorize, Superoperator};

use crate::error::{Error, Result};
use ndarray::{Array1, Array2, Axis, ShapeBuilder};
use ndarray_linalg::{Eig, Eigh, UPLO, SVD};
use num_complex::Complex64;

pub type CMat = Array2<Complex64>;
pub type CVec = Array1<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity(n: usize) -> CMat {
    Array2::eye(n)
}

pub fn dagger(m: &CMat) -> CMat {
    m.t().mapv(|z| z.conj())
}

pub fn conj(m: &CMat) -> CMat {
    m.mapv(|z| z.conj())
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diag().sum()
}

/// Kronecker product; index `(i, k)` of `a` and `(j, l)` of `b` land at `(i*nb + j, k*mb + l)`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, k), &x) in a.indexed_iter() {
        if x == ZERO {
            continue;
        }
        let mut blk = out.slice_mut(ndarray::s![i * br..(i + 1) * br, k * bc..(k + 1) * bc]);
        blk.zip_mut_with(b, |o, &y| *o = x * y);
    }
    out
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// max |m - m^dagger|.
pub fn hermitian_residual(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut r = 0.0f64;
    for i in 0..n {
        for j in i..n {
            r = r.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    r
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + &dagger(m)).mapv(|z| z * 0.5)
}

pub fn ensure_square(m: &CMat, what: &str) -> Result<usize> {
    let (r, c) = m.dim();
    if r != c || r == 0 {
        return Err(Error::DimensionMismatch(format!("{what} must be square and non-empty, got {r}x{c}")));
    }
    Ok(r)
}

pub fn ensure_finite(m: &CMat, what: &str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("{what} contains non-finite entries")))
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues. Eigenvectors are
/// columns, phase-fixed so that their largest-modulus component is real positive.
pub fn eigh(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    // LAPACK is handed a column-major copy: for row-major input the Hermitian
    // driver effectively sees the transpose and returns conjugated eigenvectors.
    let mut a = Array2::zeros(m.dim().f());
    a.assign(&hermitian_part(m));
    let (vals, mut vecs) = a.eigh(UPLO::Upper)?;
    fix_phases(&mut vecs);
    Ok((vals.to_vec(), vecs))
}

fn fix_phases(vecs: &mut CMat) {
    for mut col in vecs.axis_iter_mut(Axis(1)) {
        let mut best = ZERO;
        let mut best_abs = -1.0;
        for &z in col.iter() {
            // ties resolved towards the first component
            if z.norm() > best_abs * (1.0 + 1e-12) {
                best = z;
                best_abs = z.norm();
            }
        }
        if best_abs > 0.0 {
            let phase = best.conj() / best_abs;
            col.mapv_inplace(|z| z * phase);
        }
    }
}

/// General eigendecomposition; eigenvectors are columns.
pub fn eig(m: &CMat) -> Result<(Vec<Complex64>, CMat)> {
    let (vals, vecs) = m.eig()?;
    Ok((vals.to_vec(), vecs))
}

pub fn singular_values(m: &CMat) -> Result<Vec<f64>> {
    let (_, s, _) = m.svd(false, false)?;
    Ok(s.to_vec())
}

/// 2-norm condition number.
pub fn condition_number(m: &CMat) -> Result<f64> {
    let s = singular_values(m)?;
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(if min > 0.0 { max / min } else { f64::INFINITY })
}

/// Spectral (operator 2-) norm.
pub fn op_norm(m: &CMat) -> Result<f64> {
    Ok(singular_values(m)?.into_iter().fold(0.0, f64::max))
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a.dot(b) - b.dot(a)
}

/// Rotate an operator from the original basis into the basis given by the columns of `v`.
pub fn to_basis(op: &CMat, v: &CMat) -> CMat {
    dagger(v).dot(op).dot(v)
}

pub fn from_basis(op: &CMat, v: &CMat) -> CMat {
    v.dot(op).dot(&dagger(v))
}

pub fn diag_matrix(d: &[f64]) -> CMat {
    let mut m = Array2::zeros((d.len(), d.len()));
    for (i, &x) in d.iter().enumerate() {
        m[[i, i]] = Complex64::new(x, 0.0);
    }
    m
}
