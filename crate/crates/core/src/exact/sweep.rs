use super::discretize::TruncatedBath;
use super::propagate::{exact_evolve, ExactOptions};
use crate::davies::davies_generator;
use crate::error::{Error, Result};
use crate::model::{BathSpec, SystemModel};
use crate::quantum::{trace_distance, DensityMatrix};
use crate::semigroup::evolve;
use crate::tolerances::Tolerances;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapRow {
    pub lambda: f64,
    /// D(λ) = max_t ½‖V_t ρ_S - ρ_M(t)‖_1
    pub d: f64,
    /// (t, trace distance) on the sampling grid.
    pub profile: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapSweep {
    pub rows: Vec<GapRow>,
    /// Log–log slope of D against λ over the entries with λ, D > 0.
    pub fitted_exponent: Option<f64>,
    pub horizon: f64,
    pub recurrence_limit: f64,
    pub composite_dim: usize,
}

/// Distance between the exact reduced dynamics of the discretized bath and
/// the Davies semigroup of the continuum bath, for each coupling in `lambdas`.
///
/// The horizon must stay below the recurrence limit π/Δω_min of the discrete bath.
#[allow(clippy::too_many_arguments)]
pub fn markov_gap_sweep(
    sys: &SystemModel,
    bath: &BathSpec,
    tb: &TruncatedBath,
    lambdas: &[f64],
    rho_s0: &DensityMatrix,
    horizon: f64,
    n_times: usize,
    tol: &Tolerances,
    opts: &ExactOptions,
) -> Result<GapSweep> {
    let limit = tb.recurrence_limit();
    if !(horizon > 0.0) || horizon > limit {
        return Err(Error::RecurrenceHorizon { horizon, limit });
    }
    if n_times < 2 {
        return Err(Error::InvalidArgument("need at least two sample times".into()));
    }
    let gen = davies_generator(sys, bath, tol)?;
    let grid: Vec<f64> = (0..n_times).map(|k| horizon * k as f64 / (n_times - 1) as f64).collect();
    let rows = lambdas
        .par_iter()
        .map(|&lambda| {
            let exact = exact_evolve(sys, tb, lambda, rho_s0, &grid, tol, opts)?;
            let markov = evolve(&gen, lambda, rho_s0, &grid, tol)?;
            let profile = grid
                .iter()
                .zip(exact.states.iter().zip(&markov.points))
                .map(|(&t, (e, m))| Ok((t, trace_distance(e, &m.rho)?)))
                .collect::<Result<Vec<_>>>()?;
            let d = profile.iter().map(|p| p.1).fold(0.0, f64::max);
            Ok(GapRow { lambda, d, profile })
        })
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.lambda > 0.0 && r.d > 0.0).map(|r| (r.lambda.ln(), r.d.ln())).collect();
    let fitted_exponent = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        (sxx > 0.0).then(|| pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
    } else {
        None
    };
    Ok(GapSweep { rows, fitted_exponent, horizon, recurrence_limit: limit, composite_dim: sys.dim() * tb.fock_dim() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{discretize_bath, Scheme};
    use crate::model::RadialProfile;
    use crate::quantum::ONE;
    use ndarray::array;

    #[test]
    fn recurrence_guard_and_zero_coupling() {
        let tol = Tolerances::default();
        let sys = SystemModel::spin_boson(1.0, array![[ONE * 0.3, ONE], [ONE, ONE * -0.3]], &tol).unwrap();
        let bath = BathSpec::new(2.0, 0.5, 2.5, RadialProfile::ExpCutoff { kappa: 1.0 }).unwrap();
        let tb = discretize_bath(&bath, 3, 6.0, Scheme::Midpoint, &tol).unwrap();
        let rho = DensityMatrix::maximally_mixed(2);
        let opts = ExactOptions::default();
        let err = markov_gap_sweep(&sys, &bath, &tb, &[0.1], &rho, 10.0, 5, &tol, &opts).unwrap_err();
        assert!(matches!(err, Error::RecurrenceHorizon { .. }));
        let s = markov_gap_sweep(&sys, &bath, &tb, &[0.0], &rho, 1.0, 5, &tol, &opts).unwrap();
        assert!(s.rows[0].d < 1e-12);
        assert!(s.fitted_exponent.is_none());
    }
}
