use super::{nonlinear_blend, CwenoConfig, Quadratic};
use crate::error::ReconError;

/// Result of a 1D CWENO reconstruction on cell j.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cweno1d {
    pub poly: Quadratic,
    pub optimal: Quadratic,
    /// P_0, P_1 (left), P_2 (right).
    pub candidates: [Quadratic; 3],
    pub beta: [f64; 3],
    pub weights: [f64; 3],
}

fn check(h: [f64; 3]) -> Result<(), ReconError> {
    if h.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(ReconError::Geometry("cell sizes must be positive"));
    }
    Ok(())
}

fn divided_differences(u: [f64; 3], h: [f64; 3]) -> (f64, f64, f64) {
    let dl = (u[1] - u[0]) / (0.5 * (h[0] + h[1]));
    let dr = (u[2] - u[1]) / (0.5 * (h[1] + h[2]));
    let d2 = (dr - dl) / (0.5 * (h[0] + 2.0 * h[1] + h[2]));
    (dl, dr, d2)
}

/// The parabola with the three cell averages `u` over contiguous cells of
/// sizes `h` (left, center, right), in the basis of the center cell.
pub fn optimal_1d(u: [f64; 3], h: [f64; 3]) -> Result<Quadratic, ReconError> {
    check(h)?;
    let (dl, dr, d2) = divided_differences(u, h);
    let s = h[0] + h[1] + h[2];
    let px = ((h[1] + 2.0 * h[2]) * dl + (h[1] + 2.0 * h[0]) * dr) / (2.0 * s);
    let pxx = 3.0 * (2.0 * h[1] + h[0] + h[2]) * d2 / (2.0 * s);
    Ok(Quadratic {
        u: u[1],
        px,
        pxx,
        ..Default::default()
    })
}

/// Third-order CWENO reconstruction on the center cell of three contiguous
/// cells.
pub fn reconstruct_1d(u: [f64; 3], h: [f64; 3], cfg: &CwenoConfig) -> Result<Cweno1d, ReconError> {
    let opt = optimal_1d(u, h)?;
    let (dl, dr, _) = divided_differences(u, h);
    let a0 = cfg.alpha0;
    let ag = cfg.sector_weight(1);
    let p1 = Quadratic::linear(u[1], dl, 0.0);
    let p2 = Quadratic::linear(u[1], dr, 0.0);
    let mut p0 = opt;
    p0.add_scaled(&p1, -ag);
    p0.add_scaled(&p2, -ag);
    let p0 = p0.scaled(1.0 / a0);
    let cands = [p0, p1, p2];
    let (poly, weights, beta) = nonlinear_blend(&cands, &[a0, ag, ag], h[1], cfg.epsilon.value(h[1]));
    Ok(Cweno1d {
        poly,
        optimal: opt,
        candidates: cands,
        beta,
        weights,
    })
}
