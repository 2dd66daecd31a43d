//! System and bath parameters, Bohr frequencies, Gibbs states and the
//! Fermi-golden-rule diagnostic.

mod bath;
mod system;

pub use bath::{assumption1_check, Assumption1Report, BathSpec, RadialProfile, ADMISSIBLE_HALF_INTEGER_P};
pub use system::{
    bohr_frequencies, default_bohr_frequencies, fgr_value, gibbs_populations, gibbs_root_weights, gibbs_state, random_hermitian, BohrSpectrum,
    FgrReport, SystemModel,
};
