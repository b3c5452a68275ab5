//! Semidiscrete residual assembly, SSP Runge-Kutta stepping and the global
//! CFL time step.

mod engine;
mod rk;

pub use engine::{cfl_dt, Discretization, FieldState, SchemeConfig, StepCache};
pub use rk::RkScheme;
