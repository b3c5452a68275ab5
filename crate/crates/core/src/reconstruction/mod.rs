//! CWENO third-order reconstruction on non-uniform 1D grids and quad-tree
//! neighborhoods, plus the minmod linear reconstruction.

mod cweno1d;
mod cweno2d;
mod minmod;
mod plan;
mod poly;

pub use cweno1d::{optimal_1d, reconstruct_1d, Cweno1d};
pub use cweno2d::{blend_2d, linear_fit_2d, optimal_poly_2d, sector_planes_2d, Blend2d, LsFit, Sample};
pub use minmod::{minmod, reconstruct_minmod_1d, reconstruct_minmod_2d};
pub use plan::ReconPlan;
pub use poly::{Quadratic, ReconPolynomial, Vars, MAX_VARS};

use crate::error::ReconError;

/// How the nonlinear-weight regularization ε is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Epsilon {
    /// ε = c·h_j
    Scaled(f64),
    /// ε fixed, independent of the cell size
    Constant(f64),
}

impl Epsilon {
    pub fn value(self, h: f64) -> f64 {
        match self {
            Epsilon::Scaled(c) => c * h,
            Epsilon::Constant(e) => e,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CwenoConfig {
    /// Linear weight of the central polynomial P_0.
    pub alpha0: f64,
    pub epsilon: Epsilon,
}

impl Default for CwenoConfig {
    fn default() -> Self {
        CwenoConfig {
            alpha0: 0.5,
            epsilon: Epsilon::Scaled(1.0),
        }
    }
}

impl CwenoConfig {
    pub fn with_constant_epsilon(eps: f64) -> Self {
        CwenoConfig {
            epsilon: Epsilon::Constant(eps),
            ..Default::default()
        }
    }

    /// Linear weight of each directional polynomial: (1 − α_0)/2^d.
    pub fn sector_weight(&self, dim: usize) -> f64 {
        (1.0 - self.alpha0) / (1 << dim) as f64
    }

    pub fn validate(&self) -> Result<(), ReconError> {
        if !(self.alpha0 > 0.0 && self.alpha0 < 1.0) {
            return Err(ReconError::Geometry("alpha0 must lie in (0, 1)"));
        }
        let e = self.epsilon.value(1.0);
        if !(e > 0.0 && e.is_finite()) {
            return Err(ReconError::Geometry("epsilon must be positive"));
        }
        Ok(())
    }
}

/// Blends candidate polynomials (central first) with WENO weights
/// `ω = α/(ε+β)²`, normalized. Returns the blended polynomial, the
/// normalized weights and the indicators.
pub(crate) fn nonlinear_blend<const N: usize>(
    cands: &[Quadratic; N],
    alphas: &[f64; N],
    h: f64,
    eps: f64,
) -> (Quadratic, [f64; N], [f64; N]) {
    let mut beta = [0.0; N];
    let mut w = [0.0; N];
    let mut sum = 0.0;
    for g in 0..N {
        beta[g] = cands[g].beta(h);
        let d = eps + beta[g];
        w[g] = alphas[g] / (d * d);
        sum += w[g];
    }
    let mut out = Quadratic::default();
    for g in 0..N {
        w[g] /= sum;
        out.add_scaled(&cands[g], w[g]);
    }
    (out, w, beta)
}

#[cfg(test)]
mod tests;
