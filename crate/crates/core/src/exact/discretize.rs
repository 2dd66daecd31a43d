use crate::bath::spectral_density;
use crate::error::{Error, Result};
use crate::model::BathSpec;
use crate::quadrature::gauss_legendre;
use crate::tolerances::Tolerances;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Placement of the bath modes on [0, ω_max].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    GaussLegendre,
    Midpoint,
    /// Midpoint rule in x for ω(x) = center + width·sinh(θ(x)), θ linear in x:
    /// nodes cluster around `center` (typically the Bohr frequency).
    Stretched { center: f64, width: f64 },
}

/// A finite set of modes with couplings g_k and per-mode occupation cutoffs.
///
/// With the interaction λ G ⊗ (1/√2) Σ_k (g_k a_k^† + conj(g_k) a_k) the weights
/// g_k^2 = J(ω_k) w_k / π reproduce the continuum rates: π Σ_k g_k^2 δ(ω - ω_k) ≈ J(ω).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncatedBath {
    pub omegas: Vec<f64>,
    pub couplings: Vec<f64>,
    pub n_max: Vec<usize>,
    pub beta: f64,
    pub omega_max: f64,
    /// ∫_{ω_max}^∞ J / ∫_0^∞ J.
    pub spectral_tail: f64,
}

impl TruncatedBath {
    pub fn n_modes(&self) -> usize {
        self.omegas.len()
    }

    /// Dimension of the truncated Fock space.
    pub fn fock_dim(&self) -> usize {
        self.n_max.iter().map(|n| n + 1).product()
    }

    /// π Σ g_k^2, the discrete counterpart of ∫_0^{ω_max} J.
    pub fn reconstructed_weight(&self) -> f64 {
        PI * self.couplings.iter().map(|g| g * g).sum::<f64>()
    }

    /// Smallest spacing between distinct mode frequencies (ω_1 for a single mode).
    pub fn min_spacing(&self) -> f64 {
        let mut w = self.omegas.clone();
        w.sort_by(f64::total_cmp);
        if w.len() == 1 {
            return w[0];
        }
        w.windows(2).map(|p| p[1] - p[0]).fold(f64::INFINITY, f64::min)
    }

    /// Largest horizon allowed before the discrete bath can rephase: π / Δω_min.
    pub fn recurrence_limit(&self) -> f64 {
        0.5 * 2.0 * PI / self.min_spacing()
    }

    /// Smallest cutoffs whose thermal tail e^{-βω(n_max+1)} is below `tail_tol` (at least 1).
    pub fn with_occupation_cutoffs(mut self, tail_tol: f64) -> Self {
        let l = (1.0 / tail_tol).ln();
        self.n_max = self.omegas.iter().map(|&w| ((l / (self.beta * w)).floor() as usize).max(1)).collect();
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = vec![n_max; self.omegas.len()];
        self
    }
}

/// Discretize J on [0, ω_max] with `n_modes` nodes. Cutoffs are chosen so the
/// thermal tail of every mode is below `tol.tail`.
pub fn discretize_bath(bath: &BathSpec, n_modes: usize, omega_max: f64, scheme: Scheme, tol: &Tolerances) -> Result<TruncatedBath> {
    if n_modes == 0 {
        return Err(Error::InvalidArgument("need at least one bath mode".into()));
    }
    if !(omega_max > 0.0 && omega_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("omega_max must be positive, got {omega_max}")));
    }
    let j = spectral_density(bath)?;
    let total = j.total_weight(tol.quad)?;
    let spectral_tail = j.integral_from(omega_max, tol.quad)? / total;
    if spectral_tail > tol.tail {
        return Err(Error::SpectralTail { tail: spectral_tail, tol: tol.tail });
    }
    let (omegas, weights): (Vec<f64>, Vec<f64>) = match scheme {
        Scheme::GaussLegendre => {
            let (x, w) = gauss_legendre(n_modes);
            x.iter().zip(&w).map(|(&x, &w)| (0.5 * omega_max * (x + 1.0), 0.5 * omega_max * w)).unzip()
        }
        Scheme::Midpoint => {
            let h = omega_max / n_modes as f64;
            (0..n_modes).map(|k| ((k as f64 + 0.5) * h, h)).unzip()
        }
        Scheme::Stretched { center, width } => {
            if !(width > 0.0) || !(0.0..=omega_max).contains(&center) {
                return Err(Error::InvalidArgument(format!("stretched grid needs width > 0 and center in [0, {omega_max}]")));
            }
            let t0 = (-center / width).asinh();
            let t1 = ((omega_max - center) / width).asinh();
            let dt = (t1 - t0) / n_modes as f64;
            (0..n_modes)
                .map(|k| {
                    let th = t0 + (k as f64 + 0.5) * dt;
                    (center + width * th.sinh(), width * th.cosh() * dt)
                })
                .unzip()
        }
    };
    let couplings = omegas.iter().zip(&weights).map(|(&w, &dw)| Ok((j.eval(w)? * dw / PI).sqrt())).collect::<Result<Vec<f64>>>()?;
    Ok(TruncatedBath { omegas, couplings, n_max: vec![1; n_modes], beta: bath.beta, omega_max, spectral_tail }.with_occupation_cutoffs(tol.tail))
}

/// Product of truncated per-mode Gibbs states.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThermalBathState {
    /// populations[k][n] ∝ e^{-βω_k n}, n = 0..=n_max_k, normalized after truncation.
    pub populations: Vec<Vec<f64>>,
    /// Untruncated weight above n_max_k: e^{-βω_k (n_max_k + 1)}.
    pub tails: Vec<f64>,
}

impl ThermalBathState {
    pub fn mean_occupation(&self, mode: usize) -> f64 {
        self.populations[mode].iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// Diagonal of the product state, in the order of `fock_index` (last mode fastest).
    pub fn diagonal(&self) -> Vec<f64> {
        let mut out = vec![1.0];
        for pops in &self.populations {
            out = out.iter().flat_map(|&a| pops.iter().map(move |&p| a * p)).collect();
        }
        out
    }
}

pub fn thermal_bath_state(tb: &TruncatedBath, beta: f64, tail_tol: f64) -> Result<ThermalBathState> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    let mut populations = Vec::with_capacity(tb.n_modes());
    let mut tails = Vec::with_capacity(tb.n_modes());
    for (k, (&w, &n_max)) in tb.omegas.iter().zip(&tb.n_max).enumerate() {
        let tail = (-beta * w * (n_max as f64 + 1.0)).exp();
        if tail > tail_tol {
            return Err(Error::ThermalTail { mode: k, tail, tol: tail_tol });
        }
        let raw: Vec<f64> = (0..=n_max).map(|n| (-beta * w * n as f64).exp()).collect();
        let z: f64 = raw.iter().sum();
        populations.push(raw.into_iter().map(|p| p / z).collect());
        tails.push(tail);
    }
    Ok(ThermalBathState { populations, tails })
}
