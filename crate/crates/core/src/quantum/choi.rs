use super::{eigh, hermitian_residual, CMat, Superoperator};
use crate::error::Result;
use crate::tolerances::Tolerances;
use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

/// Choi matrix C = sum_ij E_ij (x) Phi(E_ij), composite index `i*N + a`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    dim: usize,
    mat: CMat,
}

impl ChoiMatrix {
    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

pub fn choi_of_map(phi: &Superoperator) -> ChoiMatrix {
    let n = phi.dim();
    let s = phi.matrix();
    let mat = Array2::from_shape_fn((n * n, n * n), |(r, c)| {
        let (i, a) = (r / n, r % n);
        let (j, b) = (c / n, c % n);
        s[[a + n * b, i + n * j]]
    });
    ChoiMatrix { dim: n, mat }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CptpReport {
    pub min_eigenvalue: f64,
    /// max_ij |tr_out C - 1|_ij
    pub trace_residual: f64,
    pub hermiticity_residual: f64,
    pub is_cptp: bool,
}

/// Complete positivity via the Choi spectrum, trace preservation via its partial trace.
pub fn is_cptp(phi: &Superoperator, tol: &Tolerances) -> Result<CptpReport> {
    let choi = choi_of_map(phi);
    let n = choi.dim;
    let herm = hermitian_residual(&choi.mat);
    let (vals, _) = eigh(&choi.mat)?;
    let min_eigenvalue = vals[0];
    let mut trace_residual = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let s: Complex64 = (0..n).map(|a| choi.mat[[i * n + a, j * n + a]]).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            trace_residual = trace_residual.max((s - want).norm());
        }
    }
    let is_cptp = min_eigenvalue >= -tol.psd && trace_residual <= tol.trace.max(tol.psd) && herm <= tol.psd;
    Ok(CptpReport { min_eigenvalue, trace_residual, hermiticity_residual: herm, is_cptp })
}
