use crate::CliError;
use davies_core::exact::Scheme;
use davies_core::model::{BathSpec, RadialProfile, SystemModel};
use davies_core::quantum::CMat;
use davies_core::Tolerances;
use ndarray::Array2;
use num_complex::Complex64;
use serde::Deserialize;
use serde_path_to_error::{Path, Segment};

/// Complex number as `[re, im]`.
pub type Pair = [f64; 2];

/// A square complex matrix, either as rows or as one row-major list.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Rows(Vec<Vec<Pair>>),
    Flat(Vec<Pair>),
}

impl MatrixSpec {
    fn to_matrix(&self, n: usize, pointer: &str) -> Result<CMat, CliError> {
        let flat: Vec<Pair> = match self {
            MatrixSpec::Rows(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(CliError::validation(format!("{pointer}: expected {n} rows of {n} entries")));
                }
                rows.concat()
            }
            MatrixSpec::Flat(v) => v.clone(),
        };
        if flat.len() != n * n {
            return Err(CliError::validation(format!("{pointer}: expected {} entries, found {}", n * n, flat.len())));
        }
        Ok(Array2::from_shape_fn((n, n), |(i, j)| {
            let [re, im] = flat[i * n + j];
            Complex64::new(re, im)
        }))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "H_S")]
    pub h_s: MatrixSpec,
    #[serde(rename = "G")]
    pub g: MatrixSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub p: f64,
    pub q: f64,
    #[serde(default = "default_profile")]
    pub h: RadialProfile,
    pub beta: f64,
    /// Constant complex prefactor of the form factor.
    #[serde(default)]
    pub amplitude: Option<Pair>,
}

fn default_profile() -> RadialProfile {
    RadialProfile::One
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub quad: Option<f64>,
    pub psd: Option<f64>,
    pub group: Option<f64>,
    pub tail: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub n_modes: usize,
    /// Fixed Fock cutoff for every mode; by default chosen from the thermal tail.
    #[serde(default)]
    pub n_max: Option<usize>,
    pub omega_max: f64,
    pub horizon: f64,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default = "default_n_times")]
    pub n_times: usize,
    #[serde(default)]
    pub lambdas: Option<Vec<f64>>,
}

fn default_scheme() -> Scheme {
    Scheme::Midpoint
}

fn default_n_times() -> usize {
    41
}

/// Initial state for `evolve`.
#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// Highest energy eigenstate.
    Excited,
    MaximallyMixed,
    /// Random pure state drawn with `--seed`.
    Random,
    /// Density matrix in the basis H_S is given in.
    Matrix(MatrixSpec),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub t_max: f64,
    #[serde(default = "default_n_times")]
    pub n_times: usize,
    #[serde(default = "default_initial")]
    pub rho0: InitialState,
}

fn default_initial() -> InitialState {
    InitialState::Excited
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub system: SystemConfig,
    pub bath: BathConfig,
    pub lambda: f64,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default)]
    pub bench: Option<BenchConfig>,
    #[serde(default)]
    pub evolve: Option<EvolveConfig>,
    #[serde(default)]
    pub output_dir: Option<String>,
}

/// `a.b[2].c` style path as a JSON pointer `/a/b/2/c`.
pub fn json_pointer(path: &Path) -> String {
    let mut s = String::new();
    for seg in path.iter() {
        s.push('/');
        match seg {
            Segment::Seq { index } => s.push_str(&index.to_string()),
            Segment::Map { key } => s.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => s.push_str(variant),
            Segment::Unknown => s.push('?'),
        }
    }
    if s.is_empty() {
        s.push('/');
    }
    s
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Config = serde_path_to_error::deserialize(de)
            .map_err(|e| CliError::validation(format!("config {}: {}", json_pointer(e.path()), e.inner())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.system.n == 0 {
            return Err(CliError::validation("config /system/N: must be positive"));
        }
        if !self.lambda.is_finite() {
            return Err(CliError::validation("config /lambda: must be finite"));
        }
        if let Some(b) = &self.bench {
            if b.n_modes == 0 {
                return Err(CliError::validation("config /bench/n_modes: must be positive"));
            }
            if !(b.omega_max > 0.0) {
                return Err(CliError::validation("config /bench/omega_max: must be positive"));
            }
            if !(b.horizon > 0.0) {
                return Err(CliError::validation("config /bench/horizon: must be positive"));
            }
        }
        if let Some(e) = &self.evolve {
            if !(e.t_max >= 0.0) || e.n_times < 2 {
                return Err(CliError::validation("config /evolve: need t_max >= 0 and n_times >= 2"));
            }
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        let d = Tolerances::default();
        let t = &self.tolerances;
        Tolerances {
            quad: t.quad.unwrap_or(d.quad),
            psd: t.psd.unwrap_or(d.psd),
            group: t.group.or(d.group),
            tail: t.tail.unwrap_or(d.tail),
            ..d
        }
    }

    pub fn system(&self) -> Result<SystemModel, CliError> {
        let n = self.system.n;
        let h = self.system.h_s.to_matrix(n, "config /system/H_S")?;
        let g = self.system.g.to_matrix(n, "config /system/G")?;
        Ok(SystemModel::new(h, g, &self.tolerances())?)
    }

    pub fn bath(&self) -> Result<BathSpec, CliError> {
        let b = &self.bath;
        let spec = BathSpec::new(b.beta, b.p, b.q, b.h)?;
        Ok(match b.amplitude {
            Some([re, im]) => spec.with_amplitude(Complex64::new(re, im))?,
            None => spec,
        })
    }

    pub fn initial_matrix(spec: &MatrixSpec, n: usize) -> Result<CMat, CliError> {
        spec.to_matrix(n, "config /evolve/rho0/matrix")
    }
}
