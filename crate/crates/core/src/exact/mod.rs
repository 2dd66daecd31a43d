//! Numerically exact reference dynamics for a discretized, truncated bath.

mod discretize;
mod propagate;
mod sweep;

pub use discretize::{discretize_bath, thermal_bath_state, Scheme, ThermalBathState, TruncatedBath};
pub use propagate::{exact_evolve, independent_boson_coherence, ExactMethod, ExactOptions, ExactTrajectory};
pub use sweep::{markov_gap_sweep, GapRow, GapSweep};
