use serde::{Deserialize, Serialize};

/// All numerical thresholds in one place.
///
/// Every routine that needs a threshold takes (or derives one from) this
/// record, so a run is reproducible from its tolerances alone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute quadrature tolerance.
    pub quad: f64,
    /// Smallest admissible eigenvalue (as `-psd`) of a density or Choi matrix.
    pub psd: f64,
    /// Bohr-frequency grouping tolerance; `None` means `1e-9 * spread(E)`.
    pub group: Option<f64>,
    /// Thermal / spectral tail weight allowed to be discarded.
    pub tail: f64,
    /// Max entrywise |A - A^dagger| for a matrix to count as Hermitian (relative to max |A|).
    pub hermitian: f64,
    /// Allowed |tr(rho) - 1|.
    pub trace: f64,
    /// Relative singular-value threshold below which a vector is in a kernel.
    pub kernel: f64,
    /// Eigenvector condition number above which a spectral decomposition is rejected.
    pub max_condition: f64,
    /// Imaginary parts below this are treated as zero when classifying eigenvalues.
    pub imag_zero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad: 1e-12,
            psd: 1e-10,
            group: None,
            tail: 1e-6,
            hermitian: 1e-12,
            trace: 1e-10,
            kernel: 1e-9,
            max_condition: 1e8,
            imag_zero: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn with_quad(mut self, quad: f64) -> Self {
        self.quad = quad;
        self
    }

    /// Grouping tolerance for an energy spread `spread`.
    pub fn group_tol(&self, spread: f64) -> f64 {
        self.group.unwrap_or(1e-9 * spread.max(f64::MIN_POSITIVE))
    }
}
