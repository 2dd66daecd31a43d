use super::BathSpec;
use crate::error::{Error, Result};
use crate::quantum::{self, diag_matrix, eigh, ensure_finite, ensure_square, hermitian_residual, max_abs, CMat, DensityMatrix};
use crate::tolerances::Tolerances;
use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

/// System Hamiltonian and coupling operator, with the energy eigenbasis cached.
///
/// Eigenvalues are ascending. `coupling_energy_basis` is V^dagger G V where
/// the columns of V are the eigenvectors; all generators are built in this basis.
#[derive(Clone, Debug)]
pub struct SystemModel {
    hamiltonian: CMat,
    coupling: CMat,
    energies: Vec<f64>,
    eigenvectors: CMat,
    coupling_eb: CMat,
}

impl SystemModel {
    pub fn new(hamiltonian: CMat, coupling: CMat, tol: &Tolerances) -> Result<Self> {
        let n = ensure_square(&hamiltonian, "H_S")?;
        let m = ensure_square(&coupling, "G")?;
        if n != m {
            return Err(Error::DimensionMismatch(format!("H_S is {n}x{n} but G is {m}x{m}")));
        }
        ensure_finite(&hamiltonian, "H_S")?;
        ensure_finite(&coupling, "G")?;
        for (what, op) in [("H_S", &hamiltonian), ("G", &coupling)] {
            let r = hermitian_residual(op);
            if r > tol.hermitian * max_abs(op).max(1.0) {
                return Err(Error::NotHermitian { what, residual: r });
            }
        }
        let (energies, eigenvectors) = eigh(&hamiltonian)?;
        let coupling_eb = quantum::hermitian_part(&quantum::to_basis(&coupling, &eigenvectors));
        Ok(Self { hamiltonian, coupling, energies, eigenvectors, coupling_eb })
    }

    /// Two-level system H_S = diag(Δ/2, -Δ/2) with the given coupling (in that basis).
    pub fn spin_boson(delta: f64, coupling: CMat, tol: &Tolerances) -> Result<Self> {
        Self::new(diag_matrix(&[delta / 2.0, -delta / 2.0]), coupling, tol)
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn eigenvectors(&self) -> &CMat {
        &self.eigenvectors
    }

    pub fn hamiltonian(&self) -> &CMat {
        &self.hamiltonian
    }

    pub fn coupling(&self) -> &CMat {
        &self.coupling
    }

    pub fn coupling_energy_basis(&self) -> &CMat {
        &self.coupling_eb
    }

    pub fn hamiltonian_energy_basis(&self) -> CMat {
        diag_matrix(&self.energies)
    }

    pub fn to_energy_basis(&self, op: &CMat) -> CMat {
        quantum::to_basis(op, &self.eigenvectors)
    }

    pub fn from_energy_basis(&self, op: &CMat) -> CMat {
        quantum::from_basis(op, &self.eigenvectors)
    }

    pub fn spread(&self) -> f64 {
        self.energies[self.energies.len() - 1] - self.energies[0]
    }

    /// Distinct energy levels (grouped with `tol`), each with its eigenvector indices.
    pub fn levels(&self, tol: f64) -> Vec<(f64, Vec<usize>)> {
        let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
        for (i, &e) in self.energies.iter().enumerate() {
            match out.last_mut() {
                Some((e0, idx)) if (e - *e0).abs() <= tol => idx.push(i),
                _ => out.push((e, vec![i])),
            }
        }
        for (e, idx) in out.iter_mut() {
            *e = idx.iter().map(|&i| self.energies[i]).sum::<f64>() / idx.len() as f64;
        }
        out
    }
}

/// Distinct Bohr frequencies e = E_m - E_n with their transitions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BohrSpectrum {
    /// Ascending and symmetric under e -> -e; contains 0.
    pub frequencies: Vec<f64>,
    pub multiplicities: Vec<usize>,
    /// For each frequency, the index pairs (m, n) with E_m - E_n ≈ e.
    pub transitions: Vec<Vec<(usize, usize)>>,
    pub group_tol: f64,
}

impl BohrSpectrum {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn index_of(&self, e: f64) -> Option<usize> {
        self.frequencies.iter().position(|&x| (x - e).abs() <= self.group_tol.max(1e-300))
    }

    pub fn zero_index(&self) -> usize {
        self.frequencies.len() / 2
    }

    /// Smallest nonzero |e - e'| between distinct Bohr frequencies.
    pub fn min_gap(&self) -> f64 {
        self.frequencies.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }
}

/// Group all E_m - E_n into Bohr frequencies.
///
/// Differences closer than `group_tol` are merged (single linkage); a merged
/// cluster wider than `group_tol` is reported as ambiguous.
pub fn bohr_frequencies(sys: &SystemModel, group_tol: f64) -> Result<BohrSpectrum> {
    if !(group_tol.is_finite() && group_tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("group_tol must be non-negative, got {group_tol}")));
    }
    let e = sys.energies();
    let n = e.len();
    let mut diffs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for m in 0..n {
        for k in 0..n {
            diffs.push((e[m] - e[k], m, k));
        }
    }
    diffs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut clusters: Vec<Vec<(f64, usize, usize)>> = Vec::new();
    for d in diffs {
        match clusters.last_mut() {
            Some(c) if d.0 - c.last().unwrap().0 <= group_tol => c.push(d),
            _ => clusters.push(vec![d]),
        }
    }
    for c in &clusters {
        let span = c.last().unwrap().0 - c[0].0;
        if span > group_tol {
            return Err(Error::AmbiguousGrouping { span, tol: group_tol });
        }
    }
    let means: Vec<f64> = clusters.iter().map(|c| c.iter().map(|d| d.0).sum::<f64>() / c.len() as f64).collect();
    let k = clusters.len();
    let frequencies: Vec<f64> = (0..k).map(|i| 0.5 * (means[i] - means[k - 1 - i])).collect();
    let multiplicities = clusters.iter().map(|c| c.len()).collect();
    let transitions = clusters.iter().map(|c| c.iter().map(|d| (d.1, d.2)).collect()).collect();
    Ok(BohrSpectrum { frequencies, multiplicities, transitions, group_tol })
}

/// Default grouping for a system: `tol.group` or `1e-9 * spread(E)`.
pub fn default_bohr_frequencies(sys: &SystemModel, tol: &Tolerances) -> Result<BohrSpectrum> {
    bohr_frequencies(sys, tol.group_tol(sys.spread()))
}

/// Gibbs state e^{-β H_S}/Z in the energy basis (diagonal).
pub fn gibbs_state(sys: &SystemModel, beta: f64) -> Result<DensityMatrix> {
    Ok(DensityMatrix::new_unchecked(diag_matrix(&gibbs_populations(sys, beta)?)))
}

pub fn gibbs_populations(sys: &SystemModel, beta: f64) -> Result<Vec<f64>> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidArgument(format!("beta must be finite and non-negative, got {beta}")));
    }
    let e0 = sys.energies()[0];
    let w: Vec<f64> = sys.energies().iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / z).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FgrReport {
    /// min over pairs of distinct levels of ||P_E G P_E'||_F^2 ∫_{S^2}|g(|E - E'|)|^2.
    pub value: f64,
    pub minimizing_pair: (f64, f64),
    pub satisfied: bool,
}

/// Fermi-golden-rule constant. Degenerate levels enter through their
/// eigenprojections, so the value does not depend on the eigenbasis chosen
/// inside a degenerate level.
pub fn fgr_value(sys: &SystemModel, bath: &BathSpec, tol: &Tolerances) -> Result<FgrReport> {
    let levels = sys.levels(tol.group_tol(sys.spread()));
    if levels.len() < 2 {
        return Err(Error::NoBohrTransitions);
    }
    let g = sys.coupling_energy_basis();
    let gnorm2: f64 = g.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let mut best = (f64::INFINITY, (0.0, 0.0));
    let mut scale = 0.0f64;
    for (a, (ea, ia)) in levels.iter().enumerate() {
        for (eb, ib) in levels.iter().skip(a + 1) {
            let w: f64 = ia.iter().flat_map(|&i| ib.iter().map(move |&j| (i, j))).map(|(i, j)| g[[i, j]].norm_sqr()).sum();
            let ang = bath.angular_integral((ea - eb).abs());
            scale = scale.max(ang);
            let v = w * ang;
            if v < best.0 {
                best = (v, (*ea, *eb));
            }
        }
    }
    // Entries at rounding level of a rotated diagonal coupling count as zero.
    let floor = 1e-24 * gnorm2 * scale;
    let value = if best.0 <= floor { 0.0 } else { best.0 };
    Ok(FgrReport { value, minimizing_pair: best.1, satisfied: value > 0.0 })
}

/// (e^{-βE_1/2}, ..., e^{-βE_N/2}) / sqrt(Z): the Gibbs vector in the doubled basis φ_j ⊗ φ_j.
pub fn gibbs_root_weights(sys: &SystemModel, beta: f64) -> Result<Vec<f64>> {
    Ok(gibbs_populations(sys, beta)?.into_iter().map(f64::sqrt).collect())
}

pub fn random_hermitian(n: usize, mut next: impl FnMut() -> f64) -> CMat {
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        m[[i, i]] = Complex64::new(next(), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(next(), next());
            m[[i, j]] = z;
            m[[j, i]] = z.conj();
        }
    }
    m
}
