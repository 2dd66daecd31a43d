use super::kernel::{Resolvents, Weight};
use crate::error::{Error, Result};
use crate::model::{default_bohr_frequencies, BathSpec, SystemModel};
use crate::quantum::{condition_number, eig, op_norm, CMat};
use crate::tolerances::Tolerances;
use ndarray::Array2;
use ndarray_linalg::Inverse;
use num_complex::Complex64;
use rayon::prelude::*;

/// Level shift operator Λ_e on the span of φ_a ⊗ φ_b with E_a - E_b = e.
#[derive(Clone, Debug)]
pub struct LevelShiftOperator {
    pub e: f64,
    /// Doubled-basis labels (a, b) of the rows/columns of `matrix`.
    pub pairs: Vec<(usize, usize)>,
    pub matrix: CMat,
    /// Sorted by imaginary part, then real part.
    pub eigenvalues: Vec<Complex64>,
    pub projections: Vec<CMat>,
    pub projection_norms: Vec<f64>,
}

impl LevelShiftOperator {
    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    /// Position of the doubled-basis label (a, b), if it belongs to this block.
    pub fn index_of(&self, pair: (usize, usize)) -> Option<usize> {
        self.pairs.iter().position(|&p| p == pair)
    }

    /// Smallest |a^{(s)} - a^{(s')}| over distinct eigenvalue indices; +∞ for a 1x1 block.
    pub fn min_gap(&self) -> f64 {
        let a = &self.eigenvalues;
        let mut gap = f64::INFINITY;
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                gap = gap.min((a[i] - a[j]).norm());
            }
        }
        gap
    }
}

/// Λ_e at the Bohr frequency `e` (grouped with the default tolerance).
pub fn level_shift_operator(sys: &SystemModel, bath: &BathSpec, e: f64, tol: &Tolerances) -> Result<LevelShiftOperator> {
    let bohr = default_bohr_frequencies(sys, tol)?;
    let idx = bohr.index_of(e).ok_or_else(|| Error::InvalidArgument(format!("{e} is not a Bohr frequency")))?;
    let res = Resolvents::new(bath, tol.quad);
    build(sys, bohr.frequencies[idx], &bohr.transitions[idx], &res, tol)
}

/// Λ_e for every Bohr frequency, ascending in e. The blocks share one resolvent cache.
pub fn lso_spectra(sys: &SystemModel, bath: &BathSpec, tol: &Tolerances) -> Result<Vec<LevelShiftOperator>> {
    let bohr = default_bohr_frequencies(sys, tol)?;
    let res = Resolvents::new(bath, tol.quad);
    bohr.frequencies
        .par_iter()
        .zip(bohr.transitions.par_iter())
        .map(|(&e, pairs)| build(sys, e, pairs, &res, tol))
        .collect()
}

/// Matrix elements of Λ_e between x = (a, b) and y = (c, d):
///
///   -½ δ_bd Σ_k G_ak G_kc R1(e - E_k + E_b)
///   +½ G_ac conj(G_bd) [R2(e - E_c + E_b) + R2(e - E_a + E_d)]
///   -½ δ_ac Σ_l conj(G_bl) conj(G_ld) R4(e - E_a + E_l)
///
/// with R(W, u0) = -iπ W(u0) + PV ∫ W(u)/(u - u0) du.
fn build(sys: &SystemModel, e: f64, pairs: &[(usize, usize)], res: &Resolvents, tol: &Tolerances) -> Result<LevelShiftOperator> {
    let g = sys.coupling_energy_basis();
    let en = sys.energies();
    let n = sys.dim();
    let m = pairs.len();
    let mut mat: CMat = Array2::zeros((m, m));
    for (x, &(a, b)) in pairs.iter().enumerate() {
        for (y, &(c, d)) in pairs.iter().enumerate() {
            let mut v = Complex64::new(0.0, 0.0);
            if b == d {
                for k in 0..n {
                    let amp = g[[a, k]] * g[[k, c]];
                    if amp.norm() > 0.0 {
                        v -= 0.5 * amp * res.get(Weight::Direct, e - en[k] + en[b])?;
                    }
                }
            }
            let cross = g[[a, c]] * g[[b, d]].conj();
            if cross.norm() > 0.0 {
                v += 0.5 * cross * (res.get(Weight::Cross, e - en[c] + en[b])? + res.get(Weight::Cross, e - en[a] + en[d])?);
            }
            if a == c {
                for l in 0..n {
                    let amp = (g[[b, l]] * g[[l, d]]).conj();
                    if amp.norm() > 0.0 {
                        v -= 0.5 * amp * res.get(Weight::Reflected, e - en[a] + en[l])?;
                    }
                }
            }
            mat[[x, y]] = v;
        }
    }
    let (eigenvalues, projections) = spectral_projections(&mat, e, tol)?;
    let projection_norms = projections.iter().map(op_norm).collect::<Result<_>>()?;
    Ok(LevelShiftOperator { e, pairs: pairs.to_vec(), matrix: mat, eigenvalues, projections, projection_norms })
}

fn spectral_projections(mat: &CMat, e: f64, tol: &Tolerances) -> Result<(Vec<Complex64>, Vec<CMat>)> {
    let (vals, vecs) = eig(mat)?;
    let condition = condition_number(&vecs)?;
    if !(condition <= tol.max_condition) {
        return Err(Error::DefectiveLevelShift { e, condition });
    }
    let left = vecs.inv()?;
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&i, &j| vals[i].im.total_cmp(&vals[j].im).then(vals[i].re.total_cmp(&vals[j].re)));
    let m = vals.len();
    let eigenvalues = order.iter().map(|&s| vals[s]).collect();
    let projections = order.iter().map(|&s| Array2::from_shape_fn((m, m), |(i, j)| vecs[[i, s]] * left[[s, j]])).collect();
    Ok((eigenvalues, projections))
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SimplicityReport {
    pub passed: bool,
    /// min over e of the smallest eigenvalue gap within Λ_e (+∞ if all blocks are 1x1).
    pub min_gap: f64,
    /// Bohr frequency attaining `min_gap`.
    pub worst_frequency: Option<f64>,
}

/// All level shift operators have simple spectrum, with gaps above `tol_gap`.
pub fn simplicity_check(spectra: &[LevelShiftOperator], tol_gap: f64) -> SimplicityReport {
    let mut min_gap = f64::INFINITY;
    let mut worst_frequency = None;
    for l in spectra {
        let g = l.min_gap();
        if g < min_gap {
            min_gap = g;
            worst_frequency = Some(l.e);
        }
    }
    SimplicityReport { passed: min_gap > tol_gap, min_gap, worst_frequency }
}
