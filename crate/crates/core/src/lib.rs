pub mod error;
pub mod mesh;
pub mod quadrature;
pub mod reconstruction;
pub mod physics;
pub mod integrator;
pub mod indicator;
pub mod amr;
pub mod harness;
