use super::ConservationLaw;
use crate::reconstruction::Vars;

/// Linear advection with constant velocity; `η = u²`, `ψ = a·u²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Advection {
    pub velocity: [f64; 2],
}

impl Advection {
    pub fn new(velocity: [f64; 2]) -> Self {
        Advection { velocity }
    }
}

impl ConservationLaw for Advection {
    fn name(&self) -> &str {
        "advection"
    }

    fn components(&self) -> usize {
        1
    }

    fn flux(&self, u: &Vars, _x: [f64; 2], axis: usize) -> Vars {
        [self.velocity[axis] * u[0], 0.0, 0.0, 0.0]
    }

    fn max_speed(&self, _u: &Vars, _x: [f64; 2], axis: usize) -> f64 {
        self.velocity[axis].abs()
    }

    fn entropy(&self, u: &Vars) -> f64 {
        u[0] * u[0]
    }

    fn entropy_flux(&self, u: &Vars, _x: [f64; 2], axis: usize) -> f64 {
        self.velocity[axis] * u[0] * u[0]
    }
}

/// Rotating flow `v = (−y, x)·f(r)/(0.385·r)` with `f = tanh(r)/cosh²(r)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Swirl;

impl Swirl {
    /// `f(r)/(0.385·r)`, continuous at the origin.
    pub fn angular_rate(r: f64) -> f64 {
        let c = r.cosh();
        let f_over_r = if r < 1e-8 { 1.0 } else { r.tanh() / r };
        f_over_r / (c * c) / 0.385
    }

    pub fn velocity(x: [f64; 2]) -> [f64; 2] {
        let w = Self::angular_rate(x[0].hypot(x[1]));
        [-x[1] * w, x[0] * w]
    }
}

impl ConservationLaw for Swirl {
    fn name(&self) -> &str {
        "swirl"
    }

    fn components(&self) -> usize {
        1
    }

    fn flux(&self, u: &Vars, x: [f64; 2], axis: usize) -> Vars {
        [Self::velocity(x)[axis] * u[0], 0.0, 0.0, 0.0]
    }

    fn max_speed(&self, _u: &Vars, x: [f64; 2], axis: usize) -> f64 {
        Self::velocity(x)[axis].abs()
    }

    fn entropy(&self, u: &Vars) -> f64 {
        u[0] * u[0]
    }

    fn entropy_flux(&self, u: &Vars, x: [f64; 2], axis: usize) -> f64 {
        Self::velocity(x)[axis] * u[0] * u[0]
    }
}

/// Inviscid Burgers equation `u_t + (u²/2)_x = 0` (the same flux is used
/// along every axis); `η = u²`, `ψ = 2u³/3`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Burgers;

impl ConservationLaw for Burgers {
    fn name(&self) -> &str {
        "burgers"
    }

    fn components(&self) -> usize {
        1
    }

    fn flux(&self, u: &Vars, _x: [f64; 2], _axis: usize) -> Vars {
        [0.5 * u[0] * u[0], 0.0, 0.0, 0.0]
    }

    fn max_speed(&self, u: &Vars, _x: [f64; 2], _axis: usize) -> f64 {
        u[0].abs()
    }

    fn entropy(&self, u: &Vars) -> f64 {
        u[0] * u[0]
    }

    fn entropy_flux(&self, u: &Vars, _x: [f64; 2], _axis: usize) -> f64 {
        2.0 / 3.0 * u[0] * u[0] * u[0]
    }
}
