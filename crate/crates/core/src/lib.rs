//! Fidelity susceptibility of the Lipkin-Meshkov-Glick model.
//!
//! * [`model`]: Hamiltonian in the Dicke basis and exact ground states.
//! * [`reduced`]: subsystem density matrices and entanglement entropy.
//! * [`fidelity`]: Uhlmann fidelity, Bures distance, global and reduced
//!   susceptibilities, h sweeps.
//! * [`analytic`]: thermodynamic-limit closed forms.
//! * [`fit`], [`peak`]: scaling fits and peak refinement used by reports.

pub mod analytic;
pub mod error;
pub mod fidelity;
pub mod fit;
mod linalg;
pub mod model;
pub mod peak;
pub mod reduced;
mod tridiag;

pub use analytic::{AnalyticPoint, Phase};
pub use error::{Error, Result};
pub use fidelity::{
    bures_distance_sq, fs_finite_difference, fs_spectral, sweep, sweep_point, uhlmann_fidelity,
    Delta, FidelityState, Method, PointOutcome, SweepPoint,
};
pub use model::{build_hamiltonian, energy_density, ground_state, BandedHamiltonian, DickeGroundState, ModelParams};
pub use reduced::{hypergeometric_weight, reduce, von_neumann_entropy, Bipartition, ReducedDensity};
