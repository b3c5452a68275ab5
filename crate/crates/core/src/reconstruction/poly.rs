use crate::error::ReconError;

/// Maximum number of conserved components handled by the solver.
pub const MAX_VARS: usize = 4;

/// Per-component state vector; only the first `m` entries are meaningful.
pub type Vars = [f64; MAX_VARS];

/// Quadratic in the cell-centered, mean-preserving basis
///
/// `u + px·dx + py·dy + ½pxx·(dx² − h²/12) + pxy·dx·dy + ½pyy·(dy² − h²/12)`
///
/// where `(dx, dy)` is the offset from the cell center. In 1D the y terms are
/// zero.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quadratic {
    pub u: f64,
    pub px: f64,
    pub py: f64,
    pub pxx: f64,
    pub pxy: f64,
    pub pyy: f64,
}

impl Quadratic {
    pub fn constant(u: f64) -> Self {
        Quadratic {
            u,
            ..Default::default()
        }
    }

    pub fn linear(u: f64, px: f64, py: f64) -> Self {
        Quadratic {
            u,
            px,
            py,
            ..Default::default()
        }
    }

    pub fn eval(&self, h: f64, d: [f64; 2]) -> f64 {
        let m = h * h / 12.0;
        self.u
            + self.px * d[0]
            + self.py * d[1]
            + 0.5 * self.pxx * (d[0] * d[0] - m)
            + self.pxy * d[0] * d[1]
            + 0.5 * self.pyy * (d[1] * d[1] - m)
    }

    /// Exact mean over the box `[lo, hi]` given as offsets from the center.
    /// In 1D pass `lo[1] = hi[1] = 0` and keep `py = pxy = pyy = 0`.
    pub fn mean_over(&self, h: f64, lo: [f64; 2], hi: [f64; 2]) -> f64 {
        let m = h * h / 12.0;
        let mx = 0.5 * (lo[0] + hi[0]);
        let my = 0.5 * (lo[1] + hi[1]);
        let mxx = (lo[0] * lo[0] + lo[0] * hi[0] + hi[0] * hi[0]) / 3.0;
        let myy = (lo[1] * lo[1] + lo[1] * hi[1] + hi[1] * hi[1]) / 3.0;
        self.u + self.px * mx + self.py * my + 0.5 * self.pxx * (mxx - m) + self.pxy * mx * my + 0.5 * self.pyy * (myy - m)
    }

    /// Smoothness indicator: `h²(px² + py²) + h⁴(13/12 pxx² + 7/6 pxy² + 13/12 pyy²)`.
    pub fn beta(&self, h: f64) -> f64 {
        let h2 = h * h;
        h2 * (self.px * self.px + self.py * self.py)
            + h2 * h2
                * (13.0 / 12.0 * self.pxx * self.pxx
                    + 7.0 / 6.0 * self.pxy * self.pxy
                    + 13.0 / 12.0 * self.pyy * self.pyy)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Quadratic {
            u: self.u * s,
            px: self.px * s,
            py: self.py * s,
            pxx: self.pxx * s,
            pxy: self.pxy * s,
            pyy: self.pyy * s,
        }
    }

    pub fn add_scaled(&mut self, other: &Quadratic, s: f64) {
        self.u += s * other.u;
        self.px += s * other.px;
        self.py += s * other.py;
        self.pxx += s * other.pxx;
        self.pxy += s * other.pxy;
        self.pyy += s * other.pyy;
    }

    pub fn is_finite(&self) -> bool {
        [self.u, self.px, self.py, self.pxx, self.pxy, self.pyy]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// Reconstruction of all components over one cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconPolynomial {
    pub dim: usize,
    pub h: f64,
    pub m: usize,
    pub comps: [Quadratic; MAX_VARS],
}

impl ReconPolynomial {
    pub fn constant(dim: usize, h: f64, m: usize, u: &Vars) -> Self {
        let mut comps = [Quadratic::default(); MAX_VARS];
        for c in 0..m {
            comps[c] = Quadratic::constant(u[c]);
        }
        ReconPolynomial { dim, h, m, comps }
    }

    fn check_inside(&self, d: [f64; 2]) -> Result<(), ReconError> {
        let lim = 0.5 * self.h * (1.0 + 1e-12);
        if (0..self.dim).any(|a| d[a].abs() > lim) {
            return Err(ReconError::OutsideCell { offset: d, h: self.h });
        }
        Ok(())
    }

    /// Value at offset `d` from the cell center (closed cell).
    pub fn evaluate(&self, d: [f64; 2]) -> Result<Vars, ReconError> {
        self.check_inside(d)?;
        Ok(self.eval(d))
    }

    /// Unchecked evaluation for hot loops.
    #[inline]
    pub fn eval(&self, d: [f64; 2]) -> Vars {
        let mut out = [0.0; MAX_VARS];
        for c in 0..self.m {
            out[c] = self.comps[c].eval(self.h, d);
        }
        out
    }

    /// Exact average over a sub-box `[lo, hi]` of the cell (offsets from the
    /// center).
    pub fn average_over(&self, lo: [f64; 2], hi: [f64; 2]) -> Result<Vars, ReconError> {
        self.check_inside(lo)?;
        self.check_inside(hi)?;
        let mut out = [0.0; MAX_VARS];
        for c in 0..self.m {
            out[c] = self.comps[c].mean_over(self.h, lo, hi);
        }
        Ok(out)
    }

    /// Averages over the 2^d children, in child order `cx + 2·cy`.
    pub fn child_averages(&self) -> Vec<Vars> {
        let q = 0.5 * self.h;
        let n = 1 << self.dim;
        (0..n)
            .map(|k| {
                let mut lo = [0.0; 2];
                let mut hi = [0.0; 2];
                for a in 0..self.dim {
                    if (k >> a) & 1 == 1 {
                        hi[a] = q;
                    } else {
                        lo[a] = -q;
                    }
                }
                let mut out = [0.0; MAX_VARS];
                for c in 0..self.m {
                    out[c] = self.comps[c].mean_over(self.h, lo, hi);
                }
                out
            })
            .collect()
    }
}
