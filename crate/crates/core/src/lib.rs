//! Single-shot thermodynamic transitions for finite-dimensional systems.
//!
//! States are classical population vectors over the energy levels of a
//! [`System`]. The crate answers four questions about a pair of states
//! `rho -> sigma`:
//!
//! * can `rho` be converted into `sigma` deterministically
//!   ([`curve::thermo_majorizes`]),
//! * what is the largest probability with which `sigma` can be produced
//!   ([`transition::max_transition_probability`]) and which protocol achieves
//!   it ([`transition::build_protocol`]),
//! * how much work must be invested, or can be extracted
//!   ([`work::work_of_transition`]),
//! * how the above change with catalysts, coherences or work
//!   ([`catalytic`], [`work::pstar_with_work`]).
//!
//! With all energies equal the same routines reduce to ordinary
//! majorization (noisy operations), and [`locc`] reuses the machinery for
//! bipartite pure-state entanglement.
//!
//! Every numerical claim can be cross-checked with the linear-programming
//! oracle in [`oracle`], which works directly with Gibbs-stochastic matrices
//! and shares no code with the curve routines.

pub mod catalytic;
pub mod curve;
mod error;
pub mod linalg;
pub mod locc;
pub mod oracle;
pub mod state;
pub mod transition;
pub mod work;

pub use error::{Error, Result};
pub use state::{DensityMatrix, Mode, State, System};

/// Absolute tolerance for normalization and for comparing probabilities.
pub const TOL: f64 = 1e-9;
