//! Reconstruction-only accuracy tables in one and two dimensions.

use std::f64::consts::PI;
use std::io::{self, Write};

use super::grids::{recon_test_grid, Grid1d, GridKind, PointRole};
use crate::error::HarnessError;
use crate::mesh::{Domain, Src, Topology, TreeMesh};
use crate::quadrature::gauss_legendre_unit;
use crate::reconstruction::{linear_fit_2d, optimal_poly_2d, reconstruct_1d, CwenoConfig, Quadratic, ReconPlan, Sample, Vars};

/// Interfaces closer than this to the jump are taken to coincide with it.
const JUMP_TOL: f64 = 1e-12;

/// Test profiles of the 1D tables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile1d {
    /// `sin(2πx − sin(2πx)/π)` on `[0, 1]`, periodic.
    Smooth,
    /// `e^{−x²} + 0.1·H(x − at)` on `[−½, ½]`.
    Jump { at: f64 },
}

impl Profile1d {
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Profile1d::Smooth => (0.0, 1.0),
            Profile1d::Jump { .. } => (-0.5, 0.5),
        }
    }

    /// One-sided limit from the left (`upper = false`) or right.
    pub fn limit(&self, x: f64, upper: bool) -> f64 {
        match *self {
            Profile1d::Smooth => {
                let s = (2.0 * PI * x).sin();
                (2.0 * PI * x - s / PI).sin()
            }
            Profile1d::Jump { at } => {
                let on_jump = (x - at).abs() <= JUMP_TOL;
                let step = if (x > at && !on_jump) || (on_jump && upper) { 0.1 } else { 0.0 };
                (-x * x).exp() + step
            }
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.limit(x, true)
    }

    /// Average over `[a, b]`, split at the jump.
    pub fn average(&self, a: f64, b: f64) -> f64 {
        let (x, w) = gauss_legendre_unit(8);
        let integ = |a: f64, b: f64, upper: bool| -> f64 {
            (b - a) * x.iter().zip(&w).map(|(t, w)| w * self.limit(a + t * (b - a), upper)).sum::<f64>()
        };
        match *self {
            Profile1d::Jump { at } if a < at - JUMP_TOL && at + JUMP_TOL < b => {
                (integ(a, at, false) + integ(at, b, true)) / (b - a)
            }
            Profile1d::Jump { at } if b <= at + JUMP_TOL => integ(a, b, false) / (b - a),
            _ => integ(a, b, true) / (b - a),
        }
    }
}

/// One row of an accuracy table; rates are relative to the previous row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableRow {
    pub n: usize,
    pub l1: f64,
    pub linf: f64,
    pub rate_l1: Option<f64>,
    pub rate_linf: Option<f64>,
}

/// Fills in the rates `log2(E_prev/E)` (resolution doubles between rows).
pub fn with_rates(rows: &mut [TableRow]) {
    for k in 1..rows.len() {
        rows[k].rate_l1 = Some((rows[k - 1].l1 / rows[k].l1).log2());
        rows[k].rate_linf = Some((rows[k - 1].linf / rows[k].linf).log2());
    }
}

pub fn write_table<W: Write>(rows: &[TableRow], mut w: W) -> io::Result<()> {
    writeln!(w, "N,L1,rate_L1,Linf,rate_Linf")?;
    let r = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_default();
    for row in rows {
        writeln!(w, "{},{:.3e},{},{:.3e},{}", row.n, row.l1, r(row.rate_l1), row.linf, r(row.rate_linf))?;
    }
    Ok(())
}

/// Compares the reconstructed boundary values `U^±_{j±1/2}` of every cell
/// with the one-sided limits of the profile, with periodic wrap-around.
/// `‖E‖₁ = Σ_j h_j·(|e⁻_j| + |e⁺_j|)/2` over the period and `‖E‖_∞` is the
/// maximum over all `2N` values.
pub fn recon_errors_1d(profile: Profile1d, grid: &Grid1d, cfg: &CwenoConfig) -> Result<(f64, f64), HarnessError> {
    let n = grid.len();
    let p = grid.period();
    let cell = |j: isize| -> (f64, f64) {
        let k = j.rem_euclid(n as isize) as usize;
        (grid.faces[k], grid.faces[k + 1])
    };
    let avg: Vec<f64> = (-1..=n as isize)
        .map(|j| {
            let (a, b) = cell(j);
            profile.average(a, b)
        })
        .collect();
    let size = |j: isize| {
        let (a, b) = cell(j);
        b - a
    };
    let mut sum = 0.0;
    let mut max: f64 = 0.0;
    for j in 0..n {
        let i = j as isize;
        let u = [avg[j], avg[j + 1], avg[j + 2]];
        let h = [size(i - 1), size(i), size(i + 1)];
        let rec = reconstruct_1d(u, h, cfg).map_err(|e| HarnessError::Config(e.to_string()))?;
        let (a, b) = cell(i);
        let el = (rec.poly.eval(h[1], [-0.5 * h[1], 0.0]) - profile.limit(a, true)).abs();
        let er = (rec.poly.eval(h[1], [0.5 * h[1], 0.0]) - profile.limit(b, false)).abs();
        sum += 0.5 * h[1] * (el + er);
        max = max.max(el).max(er);
    }
    Ok((sum / p, max))
}

/// Table over the resolutions `ns` on grids of the given kind.
pub fn recon_table_1d(
    profile: Profile1d,
    kind: GridKind,
    role: PointRole,
    ns: &[usize],
    cfg: &CwenoConfig,
) -> Result<Vec<TableRow>, HarnessError> {
    let (lo, hi) = profile.domain();
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let grid = recon_test_grid(kind, role, n, lo, hi)?;
        let (l1, linf) = recon_errors_1d(profile, &grid, cfg)?;
        rows.push(TableRow {
            n,
            l1,
            linf,
            rate_l1: None,
            rate_linf: None,
        });
    }
    with_rates(&mut rows);
    Ok(rows)
}

/// Test function of the 2D tables, `sin(2πx)·cos(2πy)`, periodic on the
/// unit square.
pub fn smooth_2d(x: [f64; 2]) -> f64 {
    (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos()
}

/// Exact average of [`smooth_2d`] over a box.
pub fn smooth_2d_average(lo: [f64; 2], hi: [f64; 2]) -> f64 {
    let k = 2.0 * PI;
    let ix = ((k * lo[0]).cos() - (k * hi[0]).cos()) / (k * (hi[0] - lo[0]));
    let iy = ((k * hi[1]).sin() - (k * lo[1]).sin()) / (k * (hi[1] - lo[1]));
    ix * iy
}

fn periodic_square() -> Domain {
    Domain::rectangle([0.0, 0.0], [1.0, 1.0]).with_all_periodic()
}

/// Uniform periodic `n × n` mesh of the unit square.
pub fn uniform_grid_2d(n: usize) -> Result<TreeMesh, HarnessError> {
    Ok(TreeMesh::build_uniform(&periodic_square(), n, 0)?)
}

fn exact_averages(mesh: &TreeMesh, topo: &Topology) -> Vec<Vars> {
    let mut u = vec![[0.0; 4]; topo.capacity];
    for &id in &topo.leaves {
        let (lo, hi) = mesh.cell_box(id);
        u[id.index()][0] = smooth_2d_average(lo, hi);
    }
    u
}

fn samples(topo: &Topology, id: crate::mesh::CellId, u: &[Vars]) -> Vec<Sample> {
    topo.neighbors(id)
        .iter()
        .map(|e| Sample {
            offset: e.offset,
            h: e.h,
            u: match e.src {
                Src::Cell(k) => u[k.index()][0],
                Src::Ghost(_) => unreachable!("periodic mesh"),
            },
        })
        .collect()
}

/// `‖P_OPT − P¹_OPT‖₂²`, the integral of the squared difference over the
/// cell (exact: the 3-point tensor Gauss rule integrates quartics).
pub fn linear_defect(h: f64, p_opt: &Quadratic, p_lin: &Quadratic) -> f64 {
    let mut d = *p_opt;
    d.add_scaled(p_lin, -1.0);
    let (x, w) = gauss_legendre_unit(3);
    let mut s = 0.0;
    for iy in 0..3 {
        for ix in 0..3 {
            let v = d.eval(h, [(x[ix] - 0.5) * h, (x[iy] - 0.5) * h]);
            s += w[ix] * w[iy] * v * v;
        }
    }
    s * h * h
}

/// Adaptive grid `G_0`: an `n_start²` grid refined
/// recursively, up to `levels` times, wherever
/// `‖P¹_OPT − P_OPT‖₂² > tol·h_j²`. `G_k` subdivides every cell of `G_0`
/// into `4^k` cells.
pub fn recon_adaptive_grid_2d(n_start: usize, levels: u8, tol: f64, k: u8) -> Result<TreeMesh, HarnessError> {
    let mut mesh = TreeMesh::build_uniform(&periodic_square(), n_start, levels + k)?;
    loop {
        let topo = Topology::build(&mesh);
        let u = exact_averages(&mesh, &topo);
        let mut flagged = Vec::new();
        for &id in &topo.leaves {
            if mesh.level(id) >= levels {
                continue;
            }
            let h = topo.h[id.index()];
            let uj = u[id.index()][0];
            let s = samples(&topo, id, &u);
            let opt = optimal_poly_2d(h, uj, &s).map_err(|e| HarnessError::Config(e.to_string()))?;
            let lin = linear_fit_2d(h, uj, &s).map_err(|e| HarnessError::Config(e.to_string()))?;
            if linear_defect(h, &opt.poly, &lin.poly) > tol * h * h {
                flagged.push(id);
            }
        }
        if flagged.is_empty() {
            break;
        }
        for id in flagged {
            if mesh.is_leaf(id) && mesh.level(id) < levels {
                mesh.refine(id)?;
            }
        }
    }
    for _ in 0..k {
        for id in mesh.leaves() {
            if mesh.is_leaf(id) {
                mesh.refine(id)?;
            }
        }
    }
    Ok(mesh)
}

/// Point-sampled errors of the reconstruction of the exact averages on a
/// `ref_n²` grid of cell centers.
pub fn recon_errors_2d(mesh: &TreeMesh, cfg: &CwenoConfig, ref_n: usize) -> Result<(f64, f64), HarnessError> {
    let topo = Topology::build(mesh);
    if ref_n as f64 * topo.min_h() < 1.0 - 1e-9 {
        return Err(HarnessError::Config(format!(
            "reference grid {ref_n}² is coarser than the finest cell {}",
            topo.min_h()
        )));
    }
    let u = exact_averages(mesh, &topo);
    let plan = ReconPlan::build(&topo, 3, *cfg);
    let mut polys = vec![None; topo.capacity];
    let mut sum = 0.0;
    let mut max: f64 = 0.0;
    let dx = 1.0 / ref_n as f64;
    for iy in 0..ref_n {
        for ix in 0..ref_n {
            let p = [(ix as f64 + 0.5) * dx, (iy as f64 + 0.5) * dx];
            let id = mesh.locate(p)?;
            let poly = *polys[id.index()].get_or_insert_with(|| plan.reconstruct(&topo, id, 1, &u, &[]));
            let c = mesh.center(id);
            let e = (poly.eval([p[0] - c[0], p[1] - c[1]])[0] - smooth_2d(p)).abs();
            sum += e;
            max = max.max(e);
        }
    }
    Ok((sum / (ref_n * ref_n) as f64, max))
}

/// Uniform-grid table for `n = n0·2^k`, `k < rows`.
pub fn recon_table_2d_uniform(n0: usize, rows: usize, cfg: &CwenoConfig) -> Result<Vec<TableRow>, HarnessError> {
    let mut out = Vec::new();
    for k in 0..rows {
        let n = n0 << k;
        let mesh = uniform_grid_2d(n)?;
        let (l1, linf) = recon_errors_2d(&mesh, cfg, 2 * n)?;
        out.push(TableRow {
            n,
            l1,
            linf,
            rate_l1: None,
            rate_linf: None,
        });
    }
    with_rates(&mut out);
    Ok(out)
}

/// Adaptive-grid table: row `k` is `G_k` with `N_C = n_start·2^k`.
pub fn recon_table_2d_adaptive(n_start: usize, levels: u8, tol: f64, rows: usize, cfg: &CwenoConfig) -> Result<Vec<TableRow>, HarnessError> {
    let mut out = Vec::new();
    for k in 0..rows {
        let mesh = recon_adaptive_grid_2d(n_start, levels, tol, k as u8)?;
        let finest = (1.0 / mesh.min_leaf_size()).round() as usize;
        let (l1, linf) = recon_errors_2d(&mesh, cfg, 2 * finest)?;
        out.push(TableRow {
            n: n_start << k,
            l1,
            linf,
            rate_l1: None,
            rate_linf: None,
        });
    }
    with_rates(&mut out);
    Ok(out)
}
