use approx::assert_relative_eq;
use davies_core::bath::{gamma_norms, GammaMethod};
use davies_core::davies::{davies_generator, lso_spectra, simplicity_check};
use davies_core::model::{assumption1_check, fgr_value, gibbs_state, random_hermitian, BathSpec, RadialProfile, SystemModel};
use davies_core::quantum::{diag_matrix, max_abs, trace_distance, DensityMatrix};
use davies_core::semigroup::evolve;
use davies_core::threshold::{coupling_threshold, kappa_chain, param_ledger};
use davies_core::Tolerances;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn system(seed: u64) -> SystemModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_hermitian(3, || rng.gen_range(-1.0..1.0));
    SystemModel::new(diag_matrix(&[-0.7, 0.1, 1.2]), g, &Tolerances::default()).unwrap()
}

#[test]
fn three_level_pipeline_relaxes_to_gibbs() {
    let tol = Tolerances::default();
    let sys = system(11);
    let bath = BathSpec::new(1.5, 0.5, 2.5, RadialProfile::ExpCutoff { kappa: 2.0 }).unwrap();
    assert!(assumption1_check(&bath).passed);
    assert!(fgr_value(&sys, &bath, &tol).unwrap().satisfied);

    let spectra = lso_spectra(&sys, &bath, &tol).unwrap();
    assert!(simplicity_check(&spectra, 1e-8).passed);
    let gen = davies_generator(&sys, &bath, &tol).unwrap();

    let rho0 = DensityMatrix::pure(&[1.0.into(), 0.0.into(), 0.0.into()]).unwrap();
    let ts: Vec<f64> = (0..=8).map(|k| 50.0 * k as f64).collect();
    let traj = evolve(&gen, 0.4, &rho0, &ts, &tol).unwrap();
    assert!(traj.max_trace_residual() < 1e-10);
    assert!(traj.min_eigenvalue() > -1e-10);
    let gibbs = gibbs_state(&sys, bath.beta).unwrap();
    let last = &traj.points.last().unwrap().rho;
    assert!(trace_distance(last, gibbs.matrix()).unwrap() < 1e-6);

    let ledger = param_ledger(&spectra, &sys, &tol).unwrap();
    assert!(ledger.a > 0.0 && ledger.delta > 0.0 && ledger.g > 0.0);
    let c0 = coupling_threshold(&ledger, bath.temperature(), 1.0).unwrap();
    assert!(c0.is_finite() && c0 > 0.0);
}

#[test]
fn smooth_bath_admits_full_kappa_chain() {
    let tol = Tolerances::default();
    let sys = system(3);
    let bath = BathSpec::new(1.0, 1.5, 3.0, RadialProfile::One).unwrap().with_amplitude(num_complex::Complex64::new(0.0, 1.0)).unwrap();
    let gammas = gamma_norms(&bath, GammaMethod::Analytic, 1e-10).unwrap();
    let spectra = lso_spectra(&sys, &bath, &tol).unwrap();
    let ledger = param_ledger(&spectra, &sys, &tol).unwrap();
    let chain = kappa_chain(&sys, &gammas, 0.05, &ledger).unwrap();
    let ledger = ledger.with_chain(chain);
    assert!(ledger.lambda0.unwrap() > 0.0);
    assert!(ledger.lambda0.unwrap() <= ledger.lambda0_reduced.unwrap() * (1.0 + 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gibbs_is_stationary_for_random_couplings(seed in 0u64..1000, beta in 0.3f64..3.0) {
        let tol = Tolerances::default().with_quad(1e-10);
        let sys = system(seed);
        let bath = BathSpec::new(beta, 0.5, 2.5, RadialProfile::One).unwrap();
        let gen = davies_generator(&sys, &bath, &tol).unwrap();
        let gibbs = gibbs_state(&sys, beta).unwrap();
        let out = gen.lindbladian(0.3).apply(gibbs.matrix()).unwrap();
        prop_assert!(max_abs(&out) < 1e-9);
        assert_relative_eq!(gibbs.matrix().diag().iter().map(|z| z.re).sum::<f64>(), 1.0, epsilon = 1e-12);
    }
}
