//! Markovian propagation ρ_M(t) = e^{t(L_S + λ²K)} ρ_M(0), stationary states and spectra.
//!
//! States are in the energy basis, like the generator.

mod closed_form;

pub use closed_form::spin_boson_closed_form;

use crate::davies::DaviesGenerator;
use crate::error::{Error, Result};
use crate::quantum::{
    condition_number, devectorize, eig, eigh, hermitian_part, hermitian_residual, trace, CMat, CVec, DensityMatrix, ExpmMethod,
    Propagator,
};
use crate::tolerances::Tolerances;
use log::warn;
use ndarray::Array1;
use ndarray_linalg::{Inverse, SVD};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub rho: CMat,
    /// |tr ρ - 1|
    pub trace_residual: f64,
    pub hermitian_residual: f64,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    /// Eigenvector condition number of the generator (NaN if the spectral path was skipped).
    pub condition: f64,
    pub used_fallback: bool,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn max_trace_residual(&self) -> f64 {
        self.points.iter().map(|p| p.trace_residual).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.points.iter().map(|p| p.min_eigenvalue).fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidArgument("empty time grid".into()));
    }
    if t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidArgument("time grid must be finite and non-negative".into()));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("time grid must be ascending".into()));
    }
    Ok(())
}

/// ρ_M(t) on `t_grid`, via the spectral decomposition of L when it is well
/// conditioned (no step accumulation at long times), scaling and squaring otherwise.
pub fn evolve(gen: &DaviesGenerator, lambda: f64, rho0: &DensityMatrix, t_grid: &[f64], tol: &Tolerances) -> Result<Trajectory> {
    check_grid(t_grid)?;
    if rho0.dim() != gen.dim() {
        return Err(Error::DimensionMismatch(format!("state is {0}x{0}, generator acts on {1}x{1}", rho0.dim(), gen.dim())));
    }
    let prop = Propagator::new(&gen.lindbladian(lambda), ExpmMethod::Auto, tol)?;
    let mut points = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let rho = prop.apply(t, rho0.matrix())?;
        if rho.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite(format!("propagated state at t = {t}")));
        }
        points.push(TrajectoryPoint {
            t,
            trace_residual: (trace(&rho) - 1.0).norm(),
            hermitian_residual: hermitian_residual(&rho),
            min_eigenvalue: eigh(&rho)?.0[0],
            rho,
        });
    }
    Ok(Trajectory { points, condition: prop.condition(), used_fallback: prop.used_fallback() })
}

/// The kernel vector of L = L_S + λ²K as a density matrix.
pub fn stationary_state(gen: &DaviesGenerator, lambda: f64, tol: &Tolerances) -> Result<DensityMatrix> {
    if lambda == 0.0 {
        return Err(Error::InvalidArgument("the stationary state of the free dynamics is not unique; need λ != 0".into()));
    }
    let l = gen.lindbladian(lambda);
    let (_, s, vt) = l.matrix().svd(false, true)?;
    let vt = vt.expect("requested right singular vectors");
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let dim = s.iter().filter(|&&x| x <= tol.kernel * smax).count();
    if dim != 1 {
        return Err(Error::NonUniqueStationary { dim });
    }
    let v: CVec = vt.row(vt.nrows() - 1).mapv(|z| z.conj());
    let rho = devectorize(&v, gen.dim())?;
    let tr = trace(&rho);
    if tr.norm() == 0.0 {
        return Err(Error::Linalg("kernel vector is traceless".into()));
    }
    Ok(DensityMatrix::new_unchecked(hermitian_part(&rho.mapv(|z| z / tr))))
}

/// e^{tL} = Σ_j e^{tε_j} P_j with P_j = r_j l_j^T.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Complex64>,
    right: CMat,
    left: CMat,
    pub condition: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectrumSummary {
    pub max_real_part: f64,
    /// Eigenvalues with |ε| below tol.imag_zero.
    pub zero_count: usize,
    pub condition: f64,
}

impl SpectralDecomposition {
    pub fn projection(&self, j: usize) -> CMat {
        let r = self.right.column(j).to_owned().insert_axis(ndarray::Axis(1));
        let l = self.left.row(j).to_owned().insert_axis(ndarray::Axis(0));
        r.dot(&l)
    }

    pub fn summary(&self, tol: &Tolerances) -> SpectrumSummary {
        SpectrumSummary {
            max_real_part: self.eigenvalues.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max),
            zero_count: self.eigenvalues.iter().filter(|e| e.norm() <= tol.imag_zero).count(),
            condition: self.condition,
        }
    }

    /// Σ_j e^{tε_j} P_j applied to a vectorized state.
    pub fn apply_vec(&self, t: f64, v: &CVec) -> CVec {
        let c: Array1<Complex64> = self.left.dot(v);
        let scaled = Array1::from_iter(c.iter().zip(&self.eigenvalues).map(|(c, e)| c * (e * t).exp()));
        self.right.dot(&scaled)
    }
}

/// Eigenvalues and spectral projections of L = L_S + λ²K, ordered by decreasing real part.
pub fn spectral_decomposition(gen: &DaviesGenerator, lambda: f64, tol: &Tolerances) -> Result<SpectralDecomposition> {
    let l = gen.lindbladian(lambda);
    let (vals, vecs) = eig(l.matrix())?;
    let condition = condition_number(&vecs)?;
    if !(condition < tol.max_condition) {
        warn!("generator is numerically defective (eigenvector condition {condition:.3e})");
        return Err(Error::DefectiveGenerator { condition });
    }
    let inv = vecs.inv()?;
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[b].re.total_cmp(&vals[a].re).then(vals[a].im.total_cmp(&vals[b].im)));
    let n2 = vals.len();
    let right = CMat::from_shape_fn((n2, n2), |(i, j)| vecs[[i, order[j]]]);
    let left = CMat::from_shape_fn((n2, n2), |(i, j)| inv[[order[i], j]]);
    Ok(SpectralDecomposition { eigenvalues: order.iter().map(|&j| vals[j]).collect(), right, left, condition })
}
