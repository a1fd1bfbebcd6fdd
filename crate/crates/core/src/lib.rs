//! Robust submodular minimization and maximization.
//!
//! Four problems share one toolkit: `min_{X ∈ 𝒞} max_i f_i(X)`,
//! `max_{X ∈ 𝒞} min_i g_i(X)`, and the two constrained variants pairing a
//! worst-case objective with submodular cover or knapsack constraints.
//! Solvers work through modular bounds of the functions (see [`bounds`]),
//! and [`oracle`] provides exact answers on small instances to check them.

pub mod bounds;
pub mod constraints;
pub mod error;
pub mod function;
pub mod generate;
pub mod oracle;
pub mod par;
pub mod robust_max;
pub mod robust_min;
pub mod scsc_scsk;
pub mod set;

pub use error::{Error, Result};
pub use function::{FunctionSpec, SetFunction};
pub use set::{ElementSet, GroundSet};
