//! Gauss-Legendre rules.

use crate::reconstruction::{Vars, MAX_VARS};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Rule mapped to `[0, 1]` (weights sum to one).
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (
        x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
        w.iter().map(|t| 0.5 * t).collect(),
    )
}

/// Average of `f` over the cube of side `h` centered at `center`, by an
/// `n`-point tensor Gauss rule.
pub fn cell_average(dim: usize, center: [f64; 2], h: f64, n: usize, f: impl Fn([f64; 2]) -> Vars) -> Vars {
    let (x, w) = gauss_legendre_unit(n);
    let mut out = [0.0; MAX_VARS];
    let ny = if dim == 2 { n } else { 1 };
    for iy in 0..ny {
        let (py, wy) = if dim == 2 {
            (center[1] + (x[iy] - 0.5) * h, w[iy])
        } else {
            (center[1], 1.0)
        };
        for ix in 0..n {
            let v = f([center[0] + (x[ix] - 0.5) * h, py]);
            for c in 0..MAX_VARS {
                out[c] += wy * w[ix] * v[c];
            }
        }
    }
    out
}

/// Offsets of the 2-point rule on a cell-centered interval of unit length.
pub const GAUSS2_HALF: f64 = 0.288_675_134_594_812_9;
