use super::discretize::{thermal_bath_state, TruncatedBath};
use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::quantum::{eigh, trace, CMat, CVec, DensityMatrix};
use crate::tolerances::Tolerances;
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactMethod {
    /// Eigendecomposition up to `eigen_budget`, Krylov above.
    #[default]
    Auto,
    Eigen,
    Krylov,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactOptions {
    pub method: ExactMethod,
    /// Largest composite dimension handled by dense diagonalization.
    pub eigen_budget: usize,
    /// Largest composite dimension accepted at all.
    pub max_dim: usize,
    pub krylov_dim: usize,
    /// Allowed Krylov error per unit time, per pure state.
    pub krylov_tol: f64,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self { method: ExactMethod::Auto, eigen_budget: 2048, max_dim: 1 << 18, krylov_dim: 30, krylov_tol: 1e-11 }
    }
}

#[derive(Clone, Debug)]
pub struct ExactTrajectory {
    pub times: Vec<f64>,
    /// Reduced system states (energy basis).
    pub states: Vec<CMat>,
    /// max_t |tr ρ_SR(t) - 1|
    pub max_trace_residual: f64,
    pub dim: usize,
    pub method: ExactMethod,
}

/// Composite-space Hamiltonian
///   H_λ = H_S ⊗ 1 + 1 ⊗ Σ ω_k a_k^† a_k + λ G ⊗ (1/√2) Σ g_k (a_k^† + a_k)
/// as sparse rows; composite index a·d_B + b with the last mode fastest in b.
pub(crate) struct SparseHamiltonian {
    pub dim: usize,
    pub rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseHamiltonian {
    pub fn new(sys: &SystemModel, tb: &TruncatedBath, lambda: f64) -> Self {
        let n = sys.dim();
        let db = tb.fock_dim();
        let dim = n * db;
        let m = tb.n_modes();
        let mut strides = vec![1usize; m];
        for k in (0..m.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * (tb.n_max[k + 1] + 1);
        }
        let occ = |b: usize, k: usize| (b / strides[k]) % (tb.n_max[k] + 1);
        let g = sys.coupling_energy_basis();
        let e = sys.energies();
        let mut rows = vec![Vec::new(); dim];
        for a in 0..n {
            for b in 0..db {
                let free: f64 = (0..m).map(|k| tb.omegas[k] * occ(b, k) as f64).sum();
                rows[a * db + b].push((a * db + b, Complex64::new(e[a] + free, 0.0)));
            }
        }
        if lambda != 0.0 {
            for a in 0..n {
                for a2 in 0..n {
                    let gaa = g[[a, a2]];
                    if gaa.norm() == 0.0 {
                        continue;
                    }
                    for b in 0..db {
                        for k in 0..m {
                            let nk = occ(b, k);
                            let c = gaa * (lambda * tb.couplings[k] / std::f64::consts::SQRT_2);
                            if nk < tb.n_max[k] {
                                rows[a * db + b + strides[k]].push((a2 * db + b, c * ((nk + 1) as f64).sqrt()));
                            }
                            if nk > 0 {
                                rows[a * db + b - strides[k]].push((a2 * db + b, c * (nk as f64).sqrt()));
                            }
                        }
                    }
                }
            }
        }
        Self { dim, rows }
    }

    pub fn apply(&self, x: &CVec) -> CVec {
        Array1::from_iter(self.rows.iter().map(|r| r.iter().map(|&(j, v)| v * x[j]).sum::<Complex64>()))
    }

    pub fn dense(&self) -> CMat {
        let mut h = Array2::zeros((self.dim, self.dim));
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                h[[i, j]] += v;
            }
        }
        h
    }
}

/// V_t ρ_S = tr_R e^{-itH_λ}(ρ_S ⊗ ω_{R,β})e^{itH_λ} on `t_grid`.
pub fn exact_evolve(
    sys: &SystemModel,
    tb: &TruncatedBath,
    lambda: f64,
    rho_s0: &DensityMatrix,
    t_grid: &[f64],
    tol: &Tolerances,
    opts: &ExactOptions,
) -> Result<ExactTrajectory> {
    crate::semigroup::check_grid(t_grid)?;
    if rho_s0.dim() != sys.dim() {
        return Err(Error::DimensionMismatch(format!("initial state is {0}x{0}, system is {1}x{1}", rho_s0.dim(), sys.dim())));
    }
    let dim = sys.dim() * tb.fock_dim();
    if dim > opts.max_dim {
        return Err(Error::BudgetExceeded { dim, budget: opts.max_dim });
    }
    let method = match opts.method {
        ExactMethod::Auto if dim <= opts.eigen_budget => ExactMethod::Eigen,
        ExactMethod::Auto => ExactMethod::Krylov,
        ExactMethod::Eigen if dim > opts.eigen_budget => return Err(Error::BudgetExceeded { dim, budget: opts.eigen_budget }),
        m => m,
    };
    let bath_state = thermal_bath_state(tb, tb.beta, tol.tail)?;
    let h = SparseHamiltonian::new(sys, tb, lambda);
    let (states, traces) = match method {
        ExactMethod::Eigen => eigen_path(&h, sys.dim(), rho_s0.matrix(), &bath_state.diagonal(), t_grid)?,
        _ => krylov_path(&h, sys.dim(), rho_s0.matrix(), &bath_state.diagonal(), t_grid, opts)?,
    };
    let max_trace_residual = traces.iter().map(|t| (t - 1.0).abs()).fold(0.0, f64::max);
    Ok(ExactTrajectory { times: t_grid.to_vec(), states, max_trace_residual, dim, method })
}

fn reduce_from_columns(x: &CMat, v: &CMat, n: usize) -> CMat {
    // Σ_b (X V^†)[(a,b),(a',b)]
    let db = x.nrows() / n;
    Array2::from_shape_fn((n, n), |(a, a2)| {
        (0..db).map(|b| x.row(a * db + b).iter().zip(v.row(a2 * db + b).iter()).map(|(p, q)| p * q.conj()).sum::<Complex64>()).sum()
    })
}

fn eigen_path(h: &SparseHamiltonian, n: usize, rho_s: &CMat, bath: &[f64], t_grid: &[f64]) -> Result<(Vec<CMat>, Vec<f64>)> {
    let (energies, v) = eigh(&h.dense())?;
    let db = bath.len();
    // ρ̃0 = V^† (ρ_S ⊗ ρ_B) V
    let mut rho0_v: CMat = Array2::zeros((h.dim, h.dim));
    for a in 0..n {
        for a2 in 0..n {
            let r = rho_s[[a, a2]];
            if r.norm() == 0.0 {
                continue;
            }
            for b in 0..db {
                let w = r * bath[b];
                let mut row = rho0_v.row_mut(a * db + b);
                row.scaled_add(w, &v.row(a2 * db + b));
            }
        }
    }
    let tilde = v.t().mapv(|z| z.conj()).dot(&rho0_v);
    let mut states = Vec::with_capacity(t_grid.len());
    let mut traces = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let phase: Vec<Complex64> = energies.iter().map(|&e| Complex64::from_polar(1.0, -e * t)).collect();
        let rt = Array2::from_shape_fn(tilde.dim(), |(i, j)| tilde[[i, j]] * phase[i] * phase[j].conj());
        let x = v.dot(&rt);
        let red = reduce_from_columns(&x, &v, n);
        traces.push(trace(&red).re);
        states.push(red);
    }
    Ok((states, traces))
}

fn krylov_path(h: &SparseHamiltonian, n: usize, rho_s: &CMat, bath: &[f64], t_grid: &[f64], opts: &ExactOptions) -> Result<(Vec<CMat>, Vec<f64>)> {
    let (s_vals, s_vecs) = eigh(rho_s)?;
    let db = bath.len();
    let mut jobs = Vec::new();
    for (i, &s) in s_vals.iter().enumerate() {
        for (b, &p) in bath.iter().enumerate() {
            let w = s * p;
            if w > 1e-15 {
                jobs.push((i, b, w));
            }
        }
    }
    let horizon = t_grid.last().copied().unwrap_or(0.0).max(1e-300);
    let partial: Vec<Vec<CMat>> = jobs
        .par_iter()
        .map(|&(i, b, w)| {
            let mut psi: CVec = Array1::zeros(h.dim);
            for a in 0..n {
                psi[a * db + b] = s_vecs[[a, i]];
            }
            let mut t_now = 0.0;
            let mut out = Vec::with_capacity(t_grid.len());
            for &t in t_grid {
                psi = lanczos_propagate(h, psi, t - t_now, opts, horizon)?;
                t_now = t;
                let red = Array2::from_shape_fn((n, n), |(a, a2)| {
                    (0..db).map(|bb| psi[a * db + bb] * psi[a2 * db + bb].conj()).sum::<Complex64>() * w
                });
                out.push(red);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut states: Vec<CMat> = vec![Array2::zeros((n, n)); t_grid.len()];
    for job in partial {
        for (acc, r) in states.iter_mut().zip(job) {
            *acc += &r;
        }
    }
    let traces = states.iter().map(|s| trace(s).re).collect();
    Ok((states, traces))
}

/// e^{-iτH} ψ by Lanczos steps with local error control.
fn lanczos_propagate(h: &SparseHamiltonian, mut psi: CVec, tau: f64, opts: &ExactOptions, horizon: f64) -> Result<CVec> {
    let mut left = tau;
    let mut step = tau;
    let mut guard = 0;
    while left > 0.0 {
        step = step.min(left);
        let (next, err) = lanczos_step(h, &psi, step, opts.krylov_dim)?;
        if err <= opts.krylov_tol * step / horizon.max(step) || step < 1e-12 {
            psi = next;
            left -= step;
            if err < 0.01 * opts.krylov_tol * step / horizon.max(step) {
                step *= 2.0;
            }
        } else {
            step *= 0.5;
        }
        guard += 1;
        if guard > 1_000_000 {
            return Err(Error::Krylov("step size collapsed".into()));
        }
    }
    Ok(psi)
}

fn lanczos_step(h: &SparseHamiltonian, psi: &CVec, tau: f64, m_max: usize) -> Result<(CVec, f64)> {
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Ok((psi.clone(), 0.0));
    }
    let m_max = m_max.min(h.dim).max(1);
    let mut basis: Vec<CVec> = vec![psi.mapv(|z| z / norm)];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    loop {
        let j = basis.len() - 1;
        let mut w = h.apply(&basis[j]);
        let a: Complex64 = basis[j].iter().zip(w.iter()).map(|(p, q)| p.conj() * q).sum();
        alpha.push(a.re);
        // full reorthogonalization, twice
        for _ in 0..2 {
            for v in &basis {
                let c: Complex64 = v.iter().zip(w.iter()).map(|(p, q)| p.conj() * q).sum();
                w.scaled_add(-c, v);
            }
        }
        let b = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if basis.len() == m_max || b < 1e-14 * (1.0 + alpha.iter().fold(0.0f64, |x, y| x.max(y.abs()))) {
            beta.push(b);
            break;
        }
        beta.push(b);
        basis.push(w.mapv(|z| z / b));
    }
    let m = alpha.len();
    let mut t = Array2::<f64>::zeros((m, m));
    for i in 0..m {
        t[[i, i]] = alpha[i];
        if i + 1 < m {
            t[[i, i + 1]] = beta[i];
            t[[i + 1, i]] = beta[i];
        }
    }
    let (ev, u) = t.eigh(UPLO::Upper)?;
    // c = exp(-iτT) e_1
    let c: Vec<Complex64> =
        (0..m).map(|i| (0..m).map(|k| u[[i, k]] * u[[0, k]] * Complex64::from_polar(1.0, -ev[k] * tau)).sum()).collect();
    let err = norm * beta[m - 1] * c[m - 1].norm();
    let mut out: CVec = Array1::zeros(h.dim);
    for (v, &ci) in basis.iter().zip(&c) {
        out.scaled_add(ci * norm, v);
    }
    if out.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Krylov("non-finite Krylov iterate".into()));
    }
    Ok((out, err))
}

/// Coherence decay factor of the single-mode independent-boson model
/// (G diagonal, coupling λG ⊗ (g/√2)(a^† + a)):
///   |ρ_12(t)| / |ρ_12(0)| = exp[-λ²(G11 - G22)² g² coth(βω/2)(1 - cos ωt) / (2ω²)].
pub fn independent_boson_coherence(lambda: f64, g_diff: f64, g: f64, omega: f64, beta: f64, t: f64) -> f64 {
    let c = 1.0 / (0.5 * beta * omega).tanh();
    (-(lambda * g_diff * g).powi(2) * c * (1.0 - (omega * t).cos()) / (2.0 * omega * omega)).exp()
}
