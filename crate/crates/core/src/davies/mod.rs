//! Davies generator, level shift operators and the two-level closed forms.

mod generator;
mod kernel;
mod lso;
mod spin_boson;

pub use generator::{davies_generator, lamb_shift_coefficient, DaviesGenerator, JumpChannel};
pub use kernel::{weight_pv, Resolvents, Weight};
pub use lso::{level_shift_operator, lso_spectra, simplicity_check, LevelShiftOperator, SimplicityReport};
pub use spin_boson::{
    explicit_generator, spin_boson_params, spin_boson_rates, spin_boson_spectra, SpinBosonParams, SpinBosonRates, SpinBosonSpectra,
};

#[allow(unused_imports)]
pub(crate) use generator::davies_generator_with;
