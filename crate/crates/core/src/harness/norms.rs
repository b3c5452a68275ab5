//! Cell-average error norms and stored fine-grid reference solutions.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::amr::{AdaptConfig, Controller};
use crate::error::HarnessError;
use crate::harness::problems::Problem;
use crate::integrator::SchemeConfig;
use crate::mesh::{CellId, Domain, TreeMesh};
use crate::physics::ConservationLaw;
use crate::quadrature::cell_average;
use crate::reconstruction::{Vars, MAX_VARS};

/// `(‖E‖₁, ‖E‖_∞)` of one component: the volume-weighted mean and the
/// maximum of `|u_j − v_j|` over the leaves.
pub fn cell_error_norms(
    mesh: &TreeMesh,
    leaves: &[CellId],
    u: &[Vars],
    comp: usize,
    mut exact: impl FnMut(CellId) -> f64,
) -> (f64, f64) {
    let mut l1 = 0.0;
    let mut linf: f64 = 0.0;
    for &id in leaves {
        let e = (u[id.index()][comp] - exact(id)).abs();
        l1 += mesh.volume(id) * e;
        linf = linf.max(e);
    }
    (l1 / mesh.domain().volume(), linf)
}

/// Exact cell average of component 0 at time `t` for problems with a known
/// solution.
pub fn exact_cell_average(problem: &Problem, mesh: &TreeMesh, id: CellId, t: f64) -> Option<f64> {
    if !problem.has_exact() {
        return None;
    }
    let (lo, hi) = mesh.cell_box(id);
    if let Some(v) = problem.exact_average_1d(t, lo[0], hi[0]) {
        return Some(v);
    }
    let avg = cell_average(mesh.dim(), mesh.center(id), mesh.size(id), 6, |x| {
        problem.exact(t, x).expect("problem has an exact solution")
    });
    Some(avg[0])
}

const MAGIC: &str = "cweno-reference";

/// Cell averages on a uniform grid, stored as a text header line followed by
/// little-endian doubles in row-major order (x fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceSolution {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub dim: usize,
    pub n: [usize; 2],
    pub components: usize,
    pub t: f64,
    pub data: Vec<f64>,
}

impl ReferenceSolution {
    /// Samples leaf averages of a uniform (level-0 only) mesh.
    pub fn from_uniform(mesh: &TreeMesh, u: &[Vars], components: usize, t: f64) -> Result<Self, HarnessError> {
        let n = mesh.n0();
        let leaves = mesh.leaves();
        if leaves.len() != n[0] * n[1] || leaves.iter().any(|&id| mesh.level(id) != 0) {
            return Err(HarnessError::Config("reference mesh is not uniform".into()));
        }
        let d = mesh.domain();
        let mut data = vec![0.0; leaves.len() * components];
        let h = mesh.h0();
        for id in leaves {
            let c = mesh.center(id);
            let ix = ((c[0] - d.lo[0]) / h) as usize;
            let iy = if d.dim == 2 { ((c[1] - d.lo[1]) / h) as usize } else { 0 };
            let k = (iy * n[0] + ix) * components;
            data[k..k + components].copy_from_slice(&u[id.index()][..components]);
        }
        Ok(ReferenceSolution {
            lo: d.lo,
            hi: d.hi,
            dim: d.dim,
            n,
            components,
            t,
            data,
        })
    }

    fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / self.n[axis] as f64
    }

    pub fn value(&self, ix: usize, iy: usize) -> &[f64] {
        let k = (iy * self.n[0] + ix) * self.components;
        &self.data[k..k + self.components]
    }

    /// Average of component `comp` over a box, weighting reference cells by
    /// their overlap.
    pub fn average_over(&self, lo: [f64; 2], hi: [f64; 2], comp: usize) -> f64 {
        let axes = if self.dim == 2 { 2 } else { 1 };
        let mut ranges = [(0usize, 0usize); 2];
        for a in 0..2 {
            if a >= axes {
                ranges[a] = (0, 1);
                continue;
            }
            let h = self.spacing(a);
            let first = (((lo[a] - self.lo[a]) / h).floor().max(0.0) as usize).min(self.n[a] - 1);
            let last = (((hi[a] - self.lo[a]) / h).ceil() as usize).clamp(first + 1, self.n[a]);
            ranges[a] = (first, last);
        }
        let overlap = |a: usize, i: usize| -> f64 {
            if a >= axes {
                return 1.0;
            }
            let h = self.spacing(a);
            let c_lo = self.lo[a] + i as f64 * h;
            (hi[a].min(c_lo + h) - lo[a].max(c_lo)).max(0.0)
        };
        let mut sum = 0.0;
        let mut wsum = 0.0;
        for iy in ranges[1].0..ranges[1].1 {
            let wy = overlap(1, iy);
            for ix in ranges[0].0..ranges[0].1 {
                let w = wy * overlap(0, ix);
                sum += w * self.value(ix, iy)[comp];
                wsum += w;
            }
        }
        sum / wsum
    }

    pub fn check_domain(&self, d: &Domain) -> Result<(), HarnessError> {
        let same = d.dim == self.dim
            && (0..d.dim).all(|a| (d.lo[a] - self.lo[a]).abs() < 1e-12 && (d.hi[a] - self.hi[a]).abs() < 1e-12);
        if same {
            Ok(())
        } else {
            Err(HarnessError::DomainMismatch(format!(
                "reference covers {:?}..{:?}, run covers {:?}..{:?}",
                self.lo, self.hi, d.lo, d.hi
            )))
        }
    }

    pub fn write<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "{MAGIC} dim={} nx={} ny={} components={} t={:e} lo={:e},{:e} hi={:e},{:e}",
            self.dim, self.n[0], self.n[1], self.components, self.t, self.lo[0], self.lo[1], self.hi[0], self.hi[1]
        )?;
        for v in &self.data {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read<R: Read>(r: R) -> Result<Self, HarnessError> {
        let mut r = BufReader::new(r);
        let mut header = String::new();
        r.read_line(&mut header)?;
        let bad = |m: &str| HarnessError::Config(format!("reference header: {m}"));
        let mut fields = header.split_whitespace();
        if fields.next() != Some(MAGIC) {
            return Err(bad("missing magic"));
        }
        let mut get = |key: &str| -> Result<String, HarnessError> {
            let f = fields.next().ok_or_else(|| bad("truncated"))?;
            f.strip_prefix(key)
                .and_then(|s| s.strip_prefix('='))
                .map(str::to_string)
                .ok_or_else(|| bad(key))
        };
        let num = |s: String| s.parse::<f64>().map_err(|_| bad(&s));
        let int = |s: String| s.parse::<usize>().map_err(|_| bad(&s));
        let pair = |s: String| -> Result<[f64; 2], HarnessError> {
            let (a, b) = s.split_once(',').ok_or_else(|| bad(&s))?;
            Ok([num(a.into())?, num(b.into())?])
        };
        let dim = int(get("dim")?)?;
        let n = [int(get("nx")?)?, int(get("ny")?)?];
        let components = int(get("components")?)?;
        let t = num(get("t")?)?;
        let lo = pair(get("lo")?)?;
        let hi = pair(get("hi")?)?;
        if components == 0 || components > MAX_VARS || n[0] == 0 || n[1] == 0 {
            return Err(bad("sizes"));
        }
        let len = n[0] * n[1] * components;
        let mut bytes = vec![0u8; len * 8];
        r.read_exact(&mut bytes)?;
        let data = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Ok(ReferenceSolution {
            lo,
            hi,
            dim,
            n,
            components,
            t,
            data,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), HarnessError> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::read(File::open(path)?)
    }
}

/// Runs `problem` on a uniform grid of `n` cells along x to `t_final`.
pub fn compute_reference(problem: &Problem, n: usize, scheme: SchemeConfig, t_final: f64) -> Result<ReferenceSolution, HarnessError> {
    let mesh = TreeMesh::build_uniform(&problem.domain, n, 0)?;
    let init = |x: [f64; 2]| problem.initial(x);
    let mut ctl = Controller::new(mesh, &problem.law, problem.bcs, scheme, AdaptConfig::disabled(), init)?;
    ctl.run_until(t_final, |_, _| {})?;
    ReferenceSolution::from_uniform(&ctl.mesh, &ctl.state.u, problem.law.components(), ctl.t)
}

/// Loads a stored reference, or computes and stores it when `path` does
/// not exist. A stored file must match the problem's domain and `t_final`.
pub fn load_or_compute_reference(
    path: &Path,
    problem: &Problem,
    n: usize,
    scheme: SchemeConfig,
    t_final: f64,
) -> Result<ReferenceSolution, HarnessError> {
    if path.exists() {
        let r = ReferenceSolution::load(path)?;
        r.check_domain(&problem.domain)?;
        if r.n[0] != n || (r.t - t_final).abs() > 1e-12 * t_final.max(1.0) {
            return Err(HarnessError::Config(format!(
                "{} holds N = {} at t = {}, wanted N = {n} at t = {t_final}",
                path.display(),
                r.n[0],
                r.t
            )));
        }
        return Ok(r);
    }
    let r = compute_reference(problem, n, scheme, t_final)?;
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    r.save(path)?;
    Ok(r)
}

/// Errors of component `comp` on `mesh` against reference averages over each
/// leaf.
pub fn reference_error_norms(
    mesh: &TreeMesh,
    u: &[Vars],
    comp: usize,
    reference: &ReferenceSolution,
) -> Result<(f64, f64), HarnessError> {
    reference.check_domain(mesh.domain())?;
    let leaves = mesh.leaves();
    Ok(cell_error_norms(mesh, &leaves, u, comp, |id| {
        let (lo, hi) = mesh.cell_box(id);
        reference.average_over(lo, hi, comp)
    }))
}
