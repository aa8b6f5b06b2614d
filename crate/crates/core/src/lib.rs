//! Finite-volume laboratory for two first-order systems on the flat unit
//! torus: isentropic gas dynamics and shallow granular flow with dry
//! Coulomb friction.
//!
//! States are cell-averaged height/momentum pairs.  Plain fields and
//! whole ensembles can be lifted to generalized Young measures
//! (oscillation atoms, concentration mass, concentration directions on
//! an anisotropic sphere), so that energy, admissibility, weak-form and
//! deposition diagnostics apply to oscillating or concentrating data as
//! well as to single runs.

// `!(x > 0.0)` guards reject NaN; `x <= 0.0` would let it through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index loops here walk several same-length arrays in lockstep.
#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod diagnostics;
mod error;
pub mod grid;
pub mod model;
pub mod physics;
pub mod presets;
pub mod solver;
pub mod state;
pub mod young;

pub use algebra::{Mat2, Vec2};
pub use error::{Error, Result};
pub use grid::TorusGrid;
pub use model::{ForceField, Model, ModelParams};
pub use solver::SolverConfig;
pub use state::{sample_strong, ConservedState, StrongSolution, DRY_FLOOR};
pub use young::{Exponents, YoungMeasureCell, YoungMeasureField};
