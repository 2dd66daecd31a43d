use super::kernel::{Resolvents, Weight};
use crate::bath::c_hat_beta;
use crate::error::{Error, Result};
use crate::model::{default_bohr_frequencies, fgr_value, BathSpec, BohrSpectrum, SystemModel};
use crate::quantum::{commutator_superop, dagger, diag_matrix, dissipator, hermitian_part, CMat, Superoperator};
use crate::tolerances::Tolerances;
use log::warn;
use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

/// One jump channel A_ω = Σ_{E_n - E_m = ω} P_m G P_n with rate ĉ_β(ω).
#[derive(Clone, Debug)]
pub struct JumpChannel {
    pub omega: f64,
    pub rate: f64,
    /// PV-integral coefficient of A_ω^† A_ω in the Lamb-shift Hamiltonian.
    pub shift: f64,
    pub operator: CMat,
}

/// Davies generator K (energy basis) with its building blocks.
#[derive(Clone, Debug)]
pub struct DaviesGenerator {
    pub k: Superoperator,
    pub lamb_shift: CMat,
    pub channels: Vec<JumpChannel>,
    pub bohr: BohrSpectrum,
    energies: Vec<f64>,
    eigenvectors: CMat,
    beta: f64,
}

impl DaviesGenerator {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// L_S = -i[H_S, ·] in the energy basis.
    pub fn system_part(&self) -> Superoperator {
        commutator_superop(&diag_matrix(&self.energies), &Tolerances::default()).expect("diagonal Hamiltonian is Hermitian")
    }

    /// L = L_S + λ^2 K.
    pub fn lindbladian(&self, lambda: f64) -> Superoperator {
        &self.system_part() + &self.k.scale(Complex64::new(lambda * lambda, 0.0))
    }

    /// A superoperator given in the energy basis, rewritten in the basis H_S was specified in.
    pub fn to_original_basis(&self, s: &Superoperator) -> Superoperator {
        // vec(V X V^†) = (conj(V) ⊗ V) vec(X)
        let u = crate::quantum::kron(&self.eigenvectors.mapv(|z| z.conj()), &self.eigenvectors);
        Superoperator::new(self.dim(), u.dot(s.matrix()).dot(&dagger(&u))).expect("dimensions agree")
    }
}

/// Lamb-shift coefficient S(ω) = (1/π) PV ∫ ĉ_β(u)/(ω - u) du = -(1/2) PV ∫ W1(u)/(u - ω) du.
pub fn lamb_shift_coefficient(res: &Resolvents, omega: f64) -> Result<f64> {
    Ok(-0.5 * res.get(Weight::Direct, omega)?.re)
}

/// Davies generator
///
///   K ρ = Σ_ω ĉ_β(ω) (A_ω ρ A_ω^† - ½{A_ω^† A_ω, ρ}) - i[H_LS, ρ],   H_LS = Σ_ω S(ω) A_ω^† A_ω,
///
/// in the energy basis. Jump operators are grouped with the Bohr-frequency tolerance.
pub fn davies_generator(sys: &SystemModel, bath: &BathSpec, tol: &Tolerances) -> Result<DaviesGenerator> {
    let res = Resolvents::new(bath, tol.quad);
    davies_generator_with(sys, bath, tol, &res)
}

pub(crate) fn davies_generator_with(sys: &SystemModel, bath: &BathSpec, tol: &Tolerances, res: &Resolvents) -> Result<DaviesGenerator> {
    if sys.dim() >= 2 {
        match fgr_value(sys, bath, tol) {
            Ok(r) if !r.satisfied => warn!("Fermi golden rule constant vanishes; the stationary state need not be unique"),
            _ => {}
        }
    }
    let bohr = default_bohr_frequencies(sys, tol)?;
    let n = sys.dim();
    let g = sys.coupling_energy_basis();
    let channels: Vec<JumpChannel> = bohr
        .frequencies
        .par_iter()
        .zip(bohr.transitions.par_iter())
        .map(|(&omega, pairs)| {
            // (hi, lo) with E_hi - E_lo = ω; A_ω takes hi to lo
            let mut a: CMat = Array2::zeros((n, n));
            for &(hi, lo) in pairs {
                a[[lo, hi]] = g[[lo, hi]];
            }
            let rate = c_hat_beta(bath, omega);
            let shift = lamb_shift_coefficient(res, omega)?;
            Ok(JumpChannel { omega, rate, shift, operator: a })
        })
        .collect::<Result<_>>()?;
    let mut k = Superoperator::zeros(n);
    let mut h_ls: CMat = Array2::zeros((n, n));
    for ch in &channels {
        if ch.operator.iter().all(|z| z.norm() == 0.0) {
            continue;
        }
        k = &k + &dissipator(&ch.operator, ch.rate)?;
        let ada = dagger(&ch.operator).dot(&ch.operator);
        h_ls = h_ls + ada.mapv(|z| z * ch.shift);
    }
    let h_ls = hermitian_part(&h_ls);
    let tol_h = Tolerances { hermitian: 1e-9, ..*tol };
    k = &k + &commutator_superop(&h_ls, &tol_h)?;
    if k.matrix().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("Davies generator".into()));
    }
    Ok(DaviesGenerator {
        k,
        lamb_shift: h_ls,
        channels,
        bohr,
        energies: sys.energies().to_vec(),
        eigenvectors: sys.eigenvectors().clone(),
        beta: bath.beta,
    })
}
