use crate::config::{Config, InitialState};
use crate::output::{num, Emitter};
use crate::{Cli, CliError, Command};
use davies_core::bath::{correlation_function, correlation_function_direct, decay_check, gamma_norm, spectral_density, GammaMethod, GammaNorms};
use davies_core::davies::{davies_generator, explicit_generator, lso_spectra, simplicity_check, spin_boson_rates, LevelShiftOperator};
use davies_core::exact::{discretize_bath, markov_gap_sweep, ExactOptions};
use davies_core::model::{assumption1_check, fgr_value, BathSpec, SystemModel};
use davies_core::quantum::{relative_difference, trace_distance, CMat, DensityMatrix};
use davies_core::semigroup::{evolve, spectral_decomposition, spin_boson_closed_form, stationary_state};
use davies_core::threshold::{kappa_chain, param_ledger, spin_boson_low_temperature_ledger, ParamLedger};
use davies_core::Tolerances;
use log::info;
use ndarray::array;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::path::PathBuf;

const REFERENCE_CONFIG: &str = r#"{
    "system": {"N": 2, "H_S": [[[0.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]], "G": [[[0.3, 0], [1, 0]], [[1, 0], [-0.3, 0]]]},
    "bath": {"p": 0.5, "q": 2.5, "h": "one", "beta": 1.0},
    "lambda": 0.1
}"#;

struct Ctx {
    cfg: Config,
    out: Emitter,
}

fn load(cli: &Cli, name: &'static str, args: Value, fallback: Option<&str>) -> Result<Ctx, CliError> {
    let text = match (&cli.common.config, fallback) {
        (Some(p), _) => std::fs::read_to_string(p).map_err(|e| CliError::validation(format!("cannot read config {}: {e}", p.display())))?,
        (None, Some(t)) => t.to_string(),
        (None, None) => return Err(CliError::validation(format!("`{name}` needs --config PATH"))),
    };
    let cfg = Config::parse(&text)?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| CliError::validation(e.to_string()))?;
    let dir = cli.common.out.clone().or_else(|| cfg.output_dir.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out"));
    let inputs = json!({"command": name, "config": raw, "args": args});
    let out = Emitter::new(&dir, &inputs, name, cli.common.seed)?;
    info!("{name}: inputs digest {}", out.digest);
    Ok(Ctx { cfg, out })
}

pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    match &cli.command {
        Command::Fgr => fgr(load(cli, "fgr", json!({}), None)?),
        Command::Generator => generator(load(cli, "generator", json!({}), None)?),
        Command::Evolve { t_max, n_times } => {
            evolve_cmd(load(cli, "evolve", json!({"t_max": t_max, "n_times": n_times}), None)?, *t_max, *n_times, cli.common.seed)
        }
        Command::Correlation { t_min, t_max, n_points, omega_max } => correlation(
            load(cli, "correlation", json!({"t_min": t_min, "t_max": t_max, "n_points": n_points, "omega_max": omega_max}), None)?,
            *t_min,
            *t_max,
            *n_points,
            *omega_max,
        ),
        Command::Bench { lambda } => bench(load(cli, "bench", json!({"lambda": lambda}), None)?, lambda.clone(), cli.common.seed),
        Command::Threshold { temperature, c0_prime } => {
            threshold(load(cli, "threshold", json!({"temperature": temperature, "c0_prime": c0_prime}), None)?, *temperature, *c0_prime)
        }
        Command::SpinbosonDemo { t_max, n_times } => {
            demo(load(cli, "spinboson-demo", json!({"t_max": t_max, "n_times": n_times}), Some(REFERENCE_CONFIG))?, *t_max, *n_times)
        }
    }
}

fn c(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn mat(m: &CMat) -> Value {
    Value::Array(m.rows().into_iter().map(|r| Value::Array(r.iter().map(|z| c(*z)).collect())).collect())
}

fn grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![t0];
    }
    (0..n).map(|k| t0 + (t1 - t0) * k as f64 / (n - 1) as f64).collect()
}

fn fgr(ctx: Ctx) -> Result<Vec<PathBuf>, CliError> {
    let Ctx { cfg, out } = ctx;
    let tol = cfg.tolerances();
    let sys = cfg.system()?;
    let b = &cfg.bath;
    // the admissibility report is produced even for a bath the constructor would reject
    let raw_bath = BathSpec { beta: b.beta, p: b.p, q: b.q, profile: b.h, amplitude: b.amplitude.map_or(Complex64::new(1.0, 0.0), |[r, i]| Complex64::new(r, i)) };
    let a1 = assumption1_check(&raw_bath);
    let bath = cfg.bath()?;
    let f = fgr_value(&sys, &bath, &tol)?;
    let path = out.json("fgr.json", &json!({"assumption1": a1, "fgr": f}))?;
    if !f.satisfied {
        return Err(CliError::validation(format!(
            "FGR condition violated: min transition weight is {} (levels {} and {}); report in {}",
            f.value,
            f.minimizing_pair.0,
            f.minimizing_pair.1,
            path.display()
        )));
    }
    Ok(vec![path])
}

fn lso_json(l: &LevelShiftOperator) -> Value {
    json!({
        "e": l.e,
        "pairs": l.pairs,
        "matrix": mat(&l.matrix),
        "eigenvalues": l.eigenvalues.iter().map(|z| c(*z)).collect::<Vec<_>>(),
        "projection_norms": l.projection_norms,
    })
}

fn generator(ctx: Ctx) -> Result<Vec<PathBuf>, CliError> {
    let Ctx { cfg, out } = ctx;
    let tol = cfg.tolerances();
    let sys = cfg.system()?;
    let bath = cfg.bath()?;
    let gen = davies_generator(&sys, &bath, &tol)?;
    let spectra = lso_spectra(&sys, &bath, &tol)?;
    let simple = simplicity_check(&spectra, 1e-8);
    let spec = spectral_decomposition(&gen, cfg.lambda, &tol)?;
    let report = json!({
        "basis": "energy",
        "energies": sys.energies(),
        "bohr_frequencies": gen.bohr.frequencies,
        "channels": gen.channels.iter().map(|ch| json!({"omega": ch.omega, "rate": ch.rate, "shift": ch.shift, "operator": mat(&ch.operator)})).collect::<Vec<_>>(),
        "lamb_shift": mat(&gen.lamb_shift),
        "k": mat(gen.k.matrix()),
        "k_original_basis": mat(gen.to_original_basis(&gen.k).matrix()),
        "trace_annihilation_residual": gen.k.trace_annihilation_residual(),
        "hermiticity_preservation_residual": gen.k.hermiticity_preservation_residual(),
        "level_shift_operators": spectra.iter().map(lso_json).collect::<Vec<_>>(),
        "simplicity": {"passed": simple.passed, "min_gap": num(simple.min_gap), "worst_frequency": simple.worst_frequency},
        "lindbladian_spectrum": {
            "lambda": cfg.lambda,
            "eigenvalues": spec.eigenvalues.iter().map(|z| c(*z)).collect::<Vec<_>>(),
            "summary": spec.summary(&tol),
        },
    });
    Ok(vec![out.json("generator.json", &report)?])
}

fn initial_state(cfg: &Config, sys: &SystemModel, seed: Option<u64>, tol: &Tolerances) -> Result<DensityMatrix, CliError> {
    let n = sys.dim();
    let spec = cfg.evolve.as_ref().map(|e| e.rho0.clone()).unwrap_or(InitialState::Excited);
    Ok(match spec {
        InitialState::Excited => {
            let mut psi = vec![Complex64::new(0.0, 0.0); n];
            psi[n - 1] = Complex64::new(1.0, 0.0);
            DensityMatrix::pure(&psi)?
        }
        InitialState::MaximallyMixed => DensityMatrix::maximally_mixed(n),
        InitialState::Random => {
            let seed = seed.ok_or_else(|| CliError::validation("\"rho0\": \"random\" needs --seed"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            DensityMatrix::pure(&psi)?
        }
        InitialState::Matrix(m) => DensityMatrix::new(sys.to_energy_basis(&Config::initial_matrix(&m, n)?), tol)?,
    })
}

fn evolve_cmd(ctx: Ctx, t_max: Option<f64>, n_times: Option<usize>, seed: Option<u64>) -> Result<Vec<PathBuf>, CliError> {
    let Ctx { cfg, out } = ctx;
    let tol = cfg.tolerances();
    let sys = cfg.system()?;
    let bath = cfg.bath()?;
    let t_max = t_max.or(cfg.evolve.as_ref().map(|e| e.t_max)).unwrap_or(50.0);
    let n_times = n_times.or(cfg.evolve.as_ref().map(|e| e.n_times)).unwrap_or(101);
    if !(t_max >= 0.0 && t_max.is_finite()) || n_times < 2 {
        return Err(CliError::validation("need finite t_max >= 0 and n_times >= 2"));
    }
    let rho0 = initial_state(&cfg, &sys, seed, &tol)?;
    let gen = davies_generator(&sys, &bath, &tol)?;
    let traj = evolve(&gen, cfg.lambda, &rho0, &grid(0.0, t_max, n_times), &tol)?;
    let n = sys.dim();
    let mut header = vec!["t".to_string(), "trace_residual".into(), "min_eigenvalue".into()];
    for i in 0..n {
        for j in 0..n {
            header.push(format!("re_rho_{i}{j}"));
            header.push(format!("im_rho_{i}{j}"));
        }
    }
    let rows: Vec<Vec<f64>> = traj
        .points
        .iter()
        .map(|p| {
            let mut r = vec![p.t, p.trace_residual, p.min_eigenvalue];
            r.extend(p.rho.iter().flat_map(|z| [z.re, z.im]));
            r
        })
        .collect();
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    let csv = out.csv("trajectory.csv", &["basis: energy (ascending)".into(), format!("lambda: {}", cfg.lambda)], &h, &rows)?;
    let stationary = if cfg.lambda != 0.0 { Some(stationary_state(&gen, cfg.lambda, &tol)?) } else { None };
    let last = &traj.points.last().expect("grid is nonempty").rho;
    let report = json!({
        "lambda": cfg.lambda,
        "max_trace_residual": traj.max_trace_residual(),
        "min_eigenvalue": traj.min_eigenvalue(),
        "used_fallback": traj.used_fallback,
        "final_state": mat(last),
        "stationary_state": stationary.as_ref().map(|s| mat(s.matrix())),
        "final_distance_to_stationary": match &stationary { Some(s) => Some(trace_distance(last, s.matrix())?), None => None },
    });
    Ok(vec![csv, out.json("evolve.json", &report)?])
}

fn gamma_table(bath: &BathSpec, tol: f64) -> Vec<Option<f64>> {
    (0..5)
        .map(|j| gamma_norm(bath, j, GammaMethod::Analytic, tol).or_else(|_| gamma_norm(bath, j, GammaMethod::FiniteDifference, tol)).ok())
        .collect()
}

fn correlation(ctx: Ctx, t_min: f64, t_max: f64, n_points: usize, omega_max: f64) -> Result<Vec<PathBuf>, CliError> {
    let Ctx { cfg, out } = ctx;
    if !(t_min >= 0.0 && t_max >= t_min && omega_max > 0.0) || n_points == 0 {
        return Err(CliError::validation("need 0 <= t_min <= t_max, omega_max > 0, n_points >= 1"));
    }
    let tol = cfg.tolerances();
    let bath = cfg.bath()?;
    let j = spectral_density(&bath)?;
    let omegas = grid(0.0, omega_max, 201);
    let jr: Vec<Vec<f64>> = omegas.iter().zip(j.eval_grid(&omegas)?).map(|(w, v)| vec![*w, v]).collect();
    let notes = [format!("infrared exponent: {}", j.infrared_exponent()), format!("ohmicity: {:?}", j.ohmicity())];
    let p1 = out.csv("spectral_density.csv", &notes, &["omega", "J"], &jr)?;
    let qt = tol.quad.max(1e-10);
    let ts = grid(t_min, t_max, n_points);
    let mut rows = Vec::with_capacity(ts.len());
    let mut dual = 0.0f64;
    for &t in &ts {
        let a = correlation_function(&bath, t, qt)?;
        let b = correlation_function_direct(&bath, t, qt)?;
        dual = dual.max((a - b).norm());
        rows.push(vec![t, a.re, a.im, b.re, b.im, (t.powi(4) * a.re).abs()]);
    }
    let p2 = out.csv("correlation.csv", &[], &["t", "re_c", "im_c", "re_c_direct", "im_c_direct", "t4_abs_re_c"], &rows)?;
    let decay = decay_check(&bath, &ts, qt)?;
    let report = json!({
        "gamma": gamma_table(&bath, qt),
        "c_at_zero": c(correlation_function(&bath, 0.0, qt)?),
        "dual_route_max_difference": dual,
        "decay": decay,
    });
    Ok(vec![p1, p2, out.json("correlation.json", &report)?])
}

fn bench(ctx: Ctx, lambdas: Option<Vec<f64>>, seed: Option<u64>) -> Result<Vec<PathBuf>, CliError> {
    let Ctx { cfg, out } = ctx;
    let bc = cfg.bench.clone().ok_or_else(|| CliError::validation("config /bench: required by `bench`"))?;
    let lambdas = lambdas.or(bc.lambdas.clone()).unwrap_or_else(|| vec![0.2, 0.1, 0.05]);
    if lambdas.is_empty() || lambdas.iter().any(|l| !l.is_finite()) {
        return Err(CliError::validation("--lambda: need finite couplings"));
    }
    let tol = cfg.tolerances();
    let sys = cfg.system()?;
    let bath = cfg.bath()?;
    let mut tb = discretize_bath(&bath, bc.n_modes, bc.omega_max, bc.scheme, &tol)?;
    if let Some(n) = bc.n_max {
        tb = tb.with_n_max(n);
    }
    let rho0 = initial_state(&cfg, &sys, seed, &tol)?;
    let sweep = markov_gap_sweep(&sys, &bath, &tb, &lambdas, &rho0, bc.horizon, bc.n_times, &tol, &ExactOptions::default())?;
    let rows: Vec<Vec<f64>> = sweep.rows.iter().map(|r| vec![r.lambda, r.d]).collect();
    let notes = [
        format!("horizon: {}", sweep.horizon),
        format!("recurrence_limit: {}", sweep.recurrence_limit),
        format!("composite_dim: {}", sweep.composite_dim),
    ];
    let p1 = out.csv("bench.csv", &notes, &["lambda", "D"], &rows)?;
    let prof: Vec<Vec<f64>> = sweep.rows.iter().flat_map(|r| r.profile.iter().map(move |&(t, d)| vec![r.lambda, t, d])).collect();
    let p2 = out.csv("bench_profiles.csv", &[], &["lambda", "t", "trace_distance"], &prof)?;
    let report = json!({"bath": tb, "sweep": sweep});
    Ok(vec![p1, p2, out.json("bench.json", &report)?])
}

fn ledger_json(l: &ParamLedger) -> Value {
    json!({
        "a": num(l.a),
        "alpha": num(l.alpha),
        "delta": num(l.delta),
        "kappa": num(l.kappa),
        "g": num(l.g),
        "chain": l.chain,
        "lambda0": l.lambda0.map(num),
        "lambda0_reduced": l.lambda0_reduced.map(num),
        "c0": l.c0.map(num),
        "constant_convention": l.constant_convention,
    })
}

fn threshold(ctx: Ctx, temperature: Option<f64>, c0_prime: f64) -> Result<Vec<PathBuf>, CliError> {
    let Ctx { cfg, out } = ctx;
    let tol = cfg.tolerances();
    let sys = cfg.system()?;
    let bath = cfg.bath()?;
    let t = temperature.unwrap_or(1.0 / bath.beta);
    let spectra = lso_spectra(&sys, &bath, &tol)?;
    let mut ledger = param_ledger(&spectra, &sys, &tol)?;
    let gammas = gamma_table(&bath, tol.quad.max(1e-10));
    if let [Some(g0), Some(g1), Some(g2), Some(g3), Some(g4)] = gammas[..] {
        let norms = GammaNorms { gamma: [g0, g1, g2, g3, g4], method: GammaMethod::Analytic };
        let chain = kappa_chain(&sys, &norms, cfg.lambda, &ledger)?;
        ledger = ledger.with_chain(chain);
    }
    let ledger = ledger.with_threshold(t, c0_prime)?;
    let mut report = json!({"temperature": t, "c0_prime": c0_prime, "gamma": gammas, "ledger": ledger_json(&ledger)});
    if ledger.chain.is_none() {
        report["chain_note"] = json!("some derivative norm diverges for this bath; kappa chain and lambda0 omitted");
    }
    if sys.dim() == 2 {
        let est = spin_boson_low_temperature_ledger(sys.energies()[1] - sys.energies()[0], 1.0 / t).with_threshold(t, c0_prime)?;
        report["low_temperature_estimate"] = ledger_json(&est);
    }
    Ok(vec![out.json("threshold.json", &report)?])
}

fn demo(ctx: Ctx, t_max: f64, n_times: usize) -> Result<Vec<PathBuf>, CliError> {
    let Ctx { cfg, out } = ctx;
    if cfg.system.n != 2 {
        return Err(CliError::validation("spinboson-demo needs a two-level system (N = 2)"));
    }
    if !(t_max >= 0.0 && t_max.is_finite()) || n_times < 2 {
        return Err(CliError::validation("need finite t_max >= 0 and n_times >= 2"));
    }
    let tol = cfg.tolerances();
    let sys = cfg.system()?;
    let bath = cfg.bath()?;
    let qt = tol.quad.max(1e-11);
    let rates = spin_boson_rates(&sys, &bath, qt)?;
    let gen = davies_generator(&sys, &bath, &tol)?;
    let explicit = explicit_generator(&sys, &bath, qt)?;
    let k_diff = relative_difference(gen.k.matrix(), explicit.matrix());
    let l = cfg.lambda;
    let p1 = out.csv(
        "rates.csv",
        &[format!("lambda: {l}")],
        &["gamma1", "gamma2", "x2", "lambda2_gamma1", "lambda2_gamma2", "lambda2_x2"],
        &[vec![rates.gamma1, rates.gamma2, rates.x2, l * l * rates.gamma1, l * l * rates.gamma2, l * l * rates.x2]],
    )?;
    let half = Complex64::new(0.5, 0.0);
    let rho0 = DensityMatrix::new(array![[half, Complex64::new(0.3, 0.2)], [Complex64::new(0.3, -0.2), half]], &tol)?;
    let ts = grid(0.0, t_max, n_times);
    let traj = evolve(&gen, l, &rho0, &ts, &tol)?;
    let mut rows = Vec::with_capacity(ts.len());
    let mut worst = 0.0f64;
    for p in &traj.points {
        let cf = spin_boson_closed_form(&sys, &rates, bath.beta, l, rho0.matrix(), p.t)?;
        let d = (&cf - &p.rho).iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst = worst.max(d);
        rows.push(vec![p.t, cf[[1, 1]].re, p.rho[[1, 1]].re, cf[[1, 0]].re, cf[[1, 0]].im, p.rho[[1, 0]].re, p.rho[[1, 0]].im, d]);
    }
    let p2 = out.csv(
        "trajectory_diff.csv",
        &["basis: energy; index 1 is the upper level".into()],
        &["t", "p_upper_closed", "p_upper_generator", "re_coh_closed", "im_coh_closed", "re_coh_generator", "im_coh_generator", "max_abs_diff"],
        &rows,
    )?;
    let report = json!({
        "rates": rates,
        "generator_vs_explicit_relative": k_diff,
        "trajectory_max_abs_diff": worst,
        "lambda": l,
        "bath": bath,
    });
    Ok(vec![p1, p2, out.json("spinboson_demo.json", &report)?])
}
