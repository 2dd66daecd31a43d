use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Errors fall into two families: *validation* failures (the caller asked for
/// something ill-posed: wrong shapes, a non-Hermitian Hamiltonian, a budget
/// violation) and *numerical* failures (a well-posed request that could not be
/// computed to tolerance). [`Error::is_validation`] separates them; the CLI
/// maps them to distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} is not Hermitian (residual {residual:.3e})")]
    NotHermitian { what: &'static str, residual: f64 },

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("oscillatory quadrature needs {panels:.3e} panels (budget {budget})")]
    PanelOverflow { panels: f64, budget: usize },

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("ambiguous Bohr frequency grouping: a cluster spans {span:.3e} > group_tol {tol:.3e}")]
    AmbiguousGrouping { span: f64, tol: f64 },

    #[error("no Bohr transitions: all system energies coincide")]
    NoBohrTransitions,

    #[error("bath violates the admissibility conditions: {0}")]
    InadmissibleBath(String),

    #[error("derivative norm of order {j} diverges")]
    DivergentNorm { j: usize },

    #[error("radial norm diverges: {0}")]
    DivergentRadialNorm(String),

    #[error("Fermi golden rule condition violated: {0}")]
    FgrViolated(String),

    #[error("level shift operator at Bohr frequency {e} is not diagonalizable (eigenvector condition {condition:.3e})")]
    DefectiveLevelShift { e: f64, condition: f64 },

    #[error("generator spectrum is defective (eigenvector condition {condition:.3e})")]
    DefectiveGenerator { condition: f64 },

    #[error("stationary state is not unique (kernel dimension {dim})")]
    NonUniqueStationary { dim: usize },

    #[error("composite Hilbert space dimension {dim} exceeds the budget {budget}")]
    BudgetExceeded { dim: usize, budget: usize },

    #[error("horizon {horizon} exceeds the recurrence guard {limit:.6} of the discretized bath")]
    RecurrenceHorizon { horizon: f64, limit: f64 },

    #[error("thermal tail {tail:.3e} of mode {mode} exceeds tolerance {tol:.3e}; increase its occupation cutoff")]
    ThermalTail { mode: usize, tail: f64, tol: f64 },

    #[error("relative spectral density tail {tail:.3e} above omega_max exceeds tolerance {tol:.3e}; raise omega_max")]
    SpectralTail { tail: f64, tol: f64 },

    #[error("Krylov propagation failed: {0}")]
    Krylov(String),
}

impl Error {
    /// True for caller errors (bad input, violated preconditions, budgets);
    /// false for numerical failures.
    pub fn is_validation(&self) -> bool {
        use Error::*;
        matches!(
            self,
            DimensionMismatch(_)
                | InvalidArgument(_)
                | NotHermitian { .. }
                | InvalidState(_)
                | AmbiguousGrouping { .. }
                | NoBohrTransitions
                | InadmissibleBath(_)
                | FgrViolated(_)
                | BudgetExceeded { .. }
                | RecurrenceHorizon { .. }
                | ThermalTail { .. }
                | SpectralTail { .. }
                | PanelOverflow { .. }
        )
    }
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}
