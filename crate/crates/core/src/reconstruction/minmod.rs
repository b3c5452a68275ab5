use super::{Quadratic, Sample};

pub fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Limited linear reconstruction from three contiguous cells (left, center,
/// right).
pub fn reconstruct_minmod_1d(u: [f64; 3], h: [f64; 3]) -> Quadratic {
    let dl = (u[1] - u[0]) / (0.5 * (h[0] + h[1]));
    let dr = (u[2] - u[1]) / (0.5 * (h[1] + h[2]));
    Quadratic::linear(u[1], minmod(dl, dr), 0.0)
}

fn one_sided(uj: f64, side: &[Sample], axis: usize) -> f64 {
    let n = side.len() as f64;
    let u = side.iter().map(|s| s.u).sum::<f64>() / n;
    let d = side.iter().map(|s| s.offset[axis]).sum::<f64>() / n;
    (u - uj) / d
}

/// Per-axis minmod slopes from the face neighbors across `[XLo, XHi, YLo, YHi]`.
/// Several half-face neighbors on one side are averaged first.
pub fn reconstruct_minmod_2d(uj: f64, faces: [&[Sample]; 4]) -> Quadratic {
    let px = minmod(one_sided(uj, faces[0], 0), one_sided(uj, faces[1], 0));
    let py = minmod(one_sided(uj, faces[2], 1), one_sided(uj, faces[3], 1));
    Quadratic::linear(uj, px, py)
}
