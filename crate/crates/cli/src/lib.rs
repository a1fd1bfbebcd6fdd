//! Instance files, solver dispatch, oracle audits and the synthetic
//! experiment behind the `robsub` binary.

pub mod audit;
pub mod experiment;
pub mod instance;
pub mod solve;
