//! Test problems, grid generators, error norms, convergence sweeps and
//! reporting.

pub mod config;
pub mod convergence;
pub mod diagnostics;
pub mod grids;
pub mod norms;
pub mod output;
pub mod problems;
pub mod recon;
