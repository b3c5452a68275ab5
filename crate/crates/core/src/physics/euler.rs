use super::ConservationLaw;
use crate::reconstruction::Vars;

/// Compressible Euler equations for an ideal gas in 1D `(ρ, ρv, E)` or 2D
/// `(ρ, ρu, ρv, E)`, with the physical entropy `η = −ρ·ln(p·ρ^−γ)/(γ−1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Euler {
    pub dim: usize,
    pub gamma: f64,
}

impl Euler {
    pub fn new(dim: usize) -> Self {
        Euler { dim, gamma: 1.4 }
    }

    fn energy_index(&self) -> usize {
        self.dim + 1
    }

    pub fn pressure(&self, u: &Vars) -> f64 {
        let rho = u[0];
        let e = u[self.energy_index()];
        let kin: f64 = (0..self.dim).map(|a| u[1 + a] * u[1 + a]).sum::<f64>() / rho;
        (self.gamma - 1.0) * (e - 0.5 * kin)
    }

    pub fn sound_speed(&self, u: &Vars) -> f64 {
        (self.gamma * self.pressure(u) / u[0]).sqrt()
    }

    /// Conserved state from `(ρ, v..., p)`.
    pub fn from_primitive(&self, w: &[f64]) -> Vars {
        let mut u = [0.0; 4];
        let rho = w[0];
        u[0] = rho;
        let mut kin = 0.0;
        for a in 0..self.dim {
            u[1 + a] = rho * w[1 + a];
            kin += w[1 + a] * w[1 + a];
        }
        u[self.energy_index()] = w[self.dim + 1] / (self.gamma - 1.0) + 0.5 * rho * kin;
        u
    }

    /// `(ρ, v..., p)` from the conserved state.
    pub fn to_primitive(&self, u: &Vars) -> Vars {
        let mut w = [0.0; 4];
        w[0] = u[0];
        for a in 0..self.dim {
            w[1 + a] = u[1 + a] / u[0];
        }
        w[self.dim + 1] = self.pressure(u);
        w
    }
}

impl ConservationLaw for Euler {
    fn name(&self) -> &str {
        "euler"
    }

    fn components(&self) -> usize {
        self.dim + 2
    }

    fn flux(&self, u: &Vars, _x: [f64; 2], axis: usize) -> Vars {
        let p = self.pressure(u);
        let vn = u[1 + axis] / u[0];
        let mut f = [0.0; 4];
        f[0] = u[1 + axis];
        for a in 0..self.dim {
            f[1 + a] = u[1 + a] * vn;
        }
        f[1 + axis] += p;
        let e = self.energy_index();
        f[e] = (u[e] + p) * vn;
        f
    }

    fn max_speed(&self, u: &Vars, _x: [f64; 2], axis: usize) -> f64 {
        (u[1 + axis] / u[0]).abs() + self.sound_speed(u)
    }

    fn entropy(&self, u: &Vars) -> f64 {
        let p = self.pressure(u);
        -u[0] * (p.ln() - self.gamma * u[0].ln()) / (self.gamma - 1.0)
    }

    fn entropy_flux(&self, u: &Vars, _x: [f64; 2], axis: usize) -> f64 {
        u[1 + axis] / u[0] * self.entropy(u)
    }

    fn admissible(&self, u: &Vars) -> bool {
        u[0] > 0.0 && u[0].is_finite() && self.pressure(u) > 0.0
    }

    fn reflect(&self, u: &Vars, axis: usize) -> Option<Vars> {
        let mut r = *u;
        r[1 + axis] = -r[1 + axis];
        Some(r)
    }
}
