//! Solvers and simulators for an infinite population of point entities
//! immigrating into continuous space under repulsion from the existing
//! population.
//!
//! The toolkit covers four levels of description and their cross-checks:
//!
//! - [`kinetic`]: deterministic mean-field solver for
//!   `d/dt rho = b(x) exp(-(phi * rho)(x))` on a periodic grid (RK4 and a
//!   contraction fixed-point oracle), envelope bounds, and existence-horizon
//!   formulas;
//! - [`patches`]: the two-patch ODE system with its conserved invariant and
//!   pattern-formation asymptote;
//! - [`microsim`]: exact stochastic simulation of the microscopic pure-birth
//!   process by thinning, with moment observables and growth bounds;
//! - [`meso`]: the scaling ladder connecting the two levels, empirical
//!   density and pair-correlation estimators, and convergence reports.
//!
//! All types are immutable after construction and safe to share across
//! threads; replica simulations parallelize over per-replica RNG streams.

// negated comparisons like `!(v > 0.0)` are deliberate: they reject NaN
// along with the wrong sign
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod kinetic;
pub mod meso;
pub mod microsim;
pub mod patches;
pub mod potential;
pub mod rate;
pub mod report;

pub use error::{Error, Result};
pub use grid::{discretize, Point, ScalarField, TorusDomain};
pub use kinetic::{
    homogeneous_exact, solve, solve_picard, Convolver, EnvelopeBounds, HorizonParams,
    KineticConfig, KineticSolution, Method, PicardOptions, RhsVariant,
};
pub use microsim::{Configuration, EventLog, WindowSpec};
pub use patches::{PatchParams, PatchState};
pub use potential::{Floor, Potential, PotentialKind};
pub use rate::{build_attraction_rate, PatchRegion, RateField};
