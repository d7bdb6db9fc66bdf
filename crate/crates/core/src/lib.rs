//! Waveform relaxation solvers for heat and wave equations on split domains.

pub mod bounds;
pub mod data;
pub mod error;
pub mod grid;
pub mod harness;
pub mod kernels;
pub mod methods;
pub mod problem;
pub mod projection;

pub use error::{Result, WrError};
