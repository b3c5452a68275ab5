use nalgebra::DMatrix;

use super::{nonlinear_blend, CwenoConfig, Quadratic};
use crate::error::ReconError;

/// Cell average `u` of a neighbor whose center lies at `offset` from the
/// center of the reconstructed cell and whose size is `h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub offset: [f64; 2],
    pub h: f64,
    pub u: f64,
}

/// Least-squares fit; `rank_deficient` is set when a fallback was used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LsFit {
    pub poly: Quadratic,
    pub rank_deficient: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Blend2d {
    pub poly: Quadratic,
    pub central: Quadratic,
    /// Normalized weights of `[P_0, P_NE, P_NW, P_SE, P_SW]`.
    pub weights: [f64; 5],
    pub beta: [f64; 5],
}

const RANK_TOL: f64 = 1e-10;

/// Pseudo-inverse of a matrix with already scaled columns, and whether its
/// numerical rank is below full column rank.
fn pinv(a: DMatrix<f64>) -> (DMatrix<f64>, bool) {
    let cols = a.ncols();
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let tol = RANK_TOL * smax.max(f64::MIN_POSITIVE);
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    let p = svd.pseudo_inverse(tol).expect("u and v were computed");
    (p, rank < cols)
}

/// Operator mapping `r_k = U_k − U_j` to `(p_x, p_y, p_xx, p_xy, p_yy)` for
/// the least-squares optimal quadratic (`5 × n`, row major). A rank-deficient
/// system falls back to a linear least-squares fit with zero quadratic part.
pub(crate) fn optimal_operator(hj: f64, geom: &[([f64; 2], f64)]) -> (Vec<f64>, bool) {
    let n = geom.len();
    let mut out = vec![0.0; 5 * n];
    if n >= 5 {
        let a = DMatrix::from_fn(n, 5, |k, c| {
            let (d, hk) = geom[k];
            let x = d[0] / hj;
            let y = d[1] / hj;
            let r = (hk / hj) * (hk / hj);
            match c {
                0 => x,
                1 => y,
                2 => 0.5 * (x * x + (r - 1.0) / 12.0),
                3 => x * y,
                _ => 0.5 * (y * y + (r - 1.0) / 12.0),
            }
        });
        let (p, deficient) = pinv(a);
        if !deficient {
            let scale = [hj, hj, hj * hj, hj * hj, hj * hj];
            for c in 0..5 {
                for k in 0..n {
                    out[c * n + k] = p[(c, k)] / scale[c];
                }
            }
            return (out, false);
        }
    }
    let (lin, _) = plane_operator(hj, geom);
    out[..2 * n].copy_from_slice(&lin);
    (out, true)
}

/// Operator mapping `r_k` to `(p_x, p_y)` of the least-squares plane (`2 × n`).
pub(crate) fn plane_operator(hj: f64, geom: &[([f64; 2], f64)]) -> (Vec<f64>, bool) {
    let n = geom.len();
    if n == 0 {
        return (Vec::new(), true);
    }
    let a = DMatrix::from_fn(n, 2, |k, c| geom[k].0[c] / hj);
    let (p, deficient) = pinv(a);
    let mut out = vec![0.0; 2 * n];
    for c in 0..2 {
        for k in 0..n {
            out[c * n + k] = p[(c, k)] / hj;
        }
    }
    (out, deficient)
}

fn geometry(samples: &[Sample]) -> Vec<([f64; 2], f64)> {
    samples.iter().map(|s| (s.offset, s.h)).collect()
}

fn check(hj: f64) -> Result<(), ReconError> {
    if !(hj > 0.0 && hj.is_finite()) {
        return Err(ReconError::Geometry("cell size must be positive"));
    }
    Ok(())
}

/// Least-squares optimal quadratic matching `u_j` exactly and the neighbor
/// averages in the least-squares sense.
pub fn optimal_poly_2d(hj: f64, uj: f64, samples: &[Sample]) -> Result<LsFit, ReconError> {
    check(hj)?;
    let n = samples.len();
    let (op, deficient) = optimal_operator(hj, &geometry(samples));
    let mut c = [0.0; 5];
    for (row, v) in c.iter_mut().enumerate() {
        *v = (0..n).map(|k| op[row * n + k] * (samples[k].u - uj)).sum();
    }
    Ok(LsFit {
        poly: Quadratic {
            u: uj,
            px: c[0],
            py: c[1],
            pxx: c[2],
            pxy: c[3],
            pyy: c[4],
        },
        rank_deficient: deficient,
    })
}

/// Least-squares plane through `u_j` fitted to the given neighbors.
pub fn linear_fit_2d(hj: f64, uj: f64, samples: &[Sample]) -> Result<LsFit, ReconError> {
    check(hj)?;
    let n = samples.len();
    let (op, deficient) = plane_operator(hj, &geometry(samples));
    let px = (0..n).map(|k| op[k] * (samples[k].u - uj)).sum();
    let py = (0..n).map(|k| op[n + k] * (samples[k].u - uj)).sum();
    Ok(LsFit {
        poly: Quadratic::linear(uj, px, py),
        rank_deficient: deficient,
    })
}

/// The four directional planes `[NE, NW, SE, SW]`.
pub fn sector_planes_2d(hj: f64, uj: f64, stencils: [&[Sample]; 4]) -> Result<[LsFit; 4], ReconError> {
    let mut out = [LsFit {
        poly: Quadratic::constant(uj),
        rank_deficient: false,
    }; 4];
    for (g, st) in stencils.iter().enumerate() {
        out[g] = linear_fit_2d(hj, uj, st)?;
    }
    Ok(out)
}

/// CWENO blend of the optimal quadratic and the four sector planes.
pub fn blend_2d(opt: &Quadratic, planes: &[Quadratic; 4], cfg: &CwenoConfig, hj: f64) -> Blend2d {
    let a0 = cfg.alpha0;
    let ag = cfg.sector_weight(2);
    let mut p0 = *opt;
    for p in planes {
        p0.add_scaled(p, -ag);
    }
    let p0 = p0.scaled(1.0 / a0);
    let cands = [p0, planes[0], planes[1], planes[2], planes[3]];
    let (poly, weights, beta) = nonlinear_blend(&cands, &[a0, ag, ag, ag, ag], hj, cfg.epsilon.value(hj));
    Blend2d {
        poly,
        central: p0,
        weights,
        beta,
    }
}
