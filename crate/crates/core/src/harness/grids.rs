//! Non-uniform 1D grids for reconstruction tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    Uniform,
    /// Centers at `j/N + 0.01·sin(20πj/N)`.
    QuasiUniform,
    /// Centers at `j/N + 0.25·r_j/N` with `r_j` uniform in `[−½, ½]`.
    Random { seed: u64 },
}

/// Whether the generated points are cell centers (interfaces at the
/// midpoints) or the cell interfaces themselves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointRole {
    Centers,
    Interfaces,
}

/// Contiguous cells `[faces[j], faces[j+1]]`, periodic with period
/// `faces[N] − faces[0]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid1d {
    pub faces: Vec<f64>,
}

impl Grid1d {
    pub fn len(&self) -> usize {
        self.faces.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn size(&self, j: usize) -> f64 {
        self.faces[j + 1] - self.faces[j]
    }

    pub fn center(&self, j: usize) -> f64 {
        0.5 * (self.faces[j] + self.faces[j + 1])
    }

    pub fn period(&self) -> f64 {
        self.faces[self.len()] - self.faces[0]
    }
}

const MAX_DRAWS: usize = 100;

/// Grid of `n` cells spanning one period of length `hi − lo`, built from the
/// points `x_j`, `j = 1..=n`, of `kind` (mapped from `[0, 1]`). With
/// [`PointRole::Centers`] the grid is shifted against `[lo, hi]` by less than
/// a cell. Uniform grids ignore `role`.
pub fn recon_test_grid(kind: GridKind, role: PointRole, n: usize, lo: f64, hi: f64) -> Result<Grid1d, HarnessError> {
    if n < 4 {
        return Err(HarnessError::Config(format!("grid needs at least 4 cells, got {n}")));
    }
    let len = hi - lo;
    let nf = n as f64;
    let pts: Vec<f64> = match kind {
        GridKind::Uniform => {
            let faces = (0..=n).map(|k| lo + len * k as f64 / nf).collect();
            return Ok(Grid1d { faces });
        }
        GridKind::QuasiUniform => (1..=n)
            .map(|j| {
                let t = j as f64 / nf;
                t + 0.1 * (20.0 * std::f64::consts::PI * t).sin() / 10.0
            })
            .collect(),
        GridKind::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut draw = 0;
            loop {
                let c: Vec<f64> = (1..=n)
                    .map(|j| j as f64 / nf + 0.25 / nf * (rng.gen::<f64>() - 0.5))
                    .collect();
                if c.windows(2).all(|w| w[0] < w[1]) && c[n - 1] - 1.0 < c[0] {
                    break c;
                }
                draw += 1;
                if draw == MAX_DRAWS {
                    return Err(HarnessError::Config("could not draw a monotone random grid".into()));
                }
            }
        }
    };
    let mut faces = Vec::with_capacity(n + 1);
    match role {
        PointRole::Centers => {
            faces.push(0.5 * (pts[n - 1] - 1.0 + pts[0]));
            faces.extend(pts.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        }
        PointRole::Interfaces => {
            faces.push(pts[n - 1] - 1.0);
            faces.extend_from_slice(&pts[..n - 1]);
        }
    }
    faces.push(faces[0] + 1.0);
    if faces.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarnessError::Config("non-monotone grid".into()));
    }
    Ok(Grid1d {
        faces: faces.into_iter().map(|f| lo + len * f).collect(),
    })
}
