use super::cweno2d::{optimal_operator, plane_operator};
use super::{blend_2d, minmod, CwenoConfig, Quadratic, ReconPolynomial, Vars, MAX_VARS};
use crate::mesh::{sector_contains, CellId, Side, Src, Topology};

const MAX_NBRS: usize = 32;

/// Per-epoch reconstruction plan: the least-squares operators of every leaf
/// are factored once per mesh topology and reused by all stages and steps.
#[derive(Clone, Debug)]
pub struct ReconPlan {
    dim: usize,
    order: usize,
    cfg: CwenoConfig,
    start: Vec<u32>,
    ops: Vec<f64>,
    /// Leaves whose optimal quadratic fell back to a linear fit.
    pub rank_deficient_optimal: usize,
    /// Sector planes solved by the minimum-norm fallback.
    pub rank_deficient_sector: usize,
}

impl ReconPlan {
    /// `order` 3 selects CWENO, 2 selects minmod.
    pub fn build(topo: &Topology, order: usize, cfg: CwenoConfig) -> Self {
        let mut plan = ReconPlan {
            dim: topo.dim,
            order,
            cfg,
            start: vec![0; topo.capacity],
            ops: Vec::new(),
            rank_deficient_optimal: 0,
            rank_deficient_sector: 0,
        };
        if topo.dim == 2 && order >= 3 {
            let mut geom = Vec::with_capacity(MAX_NBRS);
            let mut sub = Vec::with_capacity(MAX_NBRS);
            let mut idx = Vec::with_capacity(MAX_NBRS);
            for &id in &topo.leaves {
                let nb = topo.neighbors(id);
                let n = nb.len();
                assert!(n <= MAX_NBRS, "neighborhood too large");
                let hj = topo.h[id.index()];
                geom.clear();
                geom.extend(nb.iter().map(|e| (e.offset, e.h)));
                plan.start[id.index()] = plan.ops.len() as u32;
                let (opt, def) = optimal_operator(hj, &geom);
                plan.rank_deficient_optimal += def as usize;
                plan.ops.extend_from_slice(&opt);
                for q in 0..4 {
                    sub.clear();
                    idx.clear();
                    for (k, e) in nb.iter().enumerate() {
                        if sector_contains(q, e.half_flags) {
                            sub.push((e.offset, e.h));
                            idx.push(k);
                        }
                    }
                    let (op, def) = plane_operator(hj, &sub);
                    plan.rank_deficient_sector += def as usize;
                    let base = plan.ops.len();
                    plan.ops.resize(base + 2 * n, 0.0);
                    let ns = sub.len();
                    for row in 0..2 {
                        for (s, &k) in idx.iter().enumerate() {
                            plan.ops[base + row * n + k] = op[row * ns + s];
                        }
                    }
                }
            }
        }
        plan
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn config(&self) -> &CwenoConfig {
        &self.cfg
    }

    /// Reconstruction of leaf `id` from slot-indexed averages `u` and ghost
    /// averages `ghosts` (indexed like `Topology::ghosts`).
    pub fn reconstruct(&self, topo: &Topology, id: CellId, m: usize, u: &[Vars], ghosts: &[Vars]) -> ReconPolynomial {
        let hj = topo.h[id.index()];
        let uj = &u[id.index()];
        let nb = topo.neighbors(id);
        let val = |s: Src| -> &Vars {
            match s {
                Src::Cell(k) => &u[k.index()],
                Src::Ghost(g) => &ghosts[g as usize],
            }
        };
        let mut comps = [Quadratic::default(); MAX_VARS];
        if self.dim == 1 {
            let mut left = None;
            let mut right = None;
            for e in nb {
                if e.offset[0] < 0.0 {
                    left = Some(e);
                } else {
                    right = Some(e);
                }
            }
            let (l, r) = (left.expect("left neighbor"), right.expect("right neighbor"));
            let (ul, ur) = (val(l.src), val(r.src));
            let h = [l.h, hj, r.h];
            for c in 0..m {
                let us = [ul[c], uj[c], ur[c]];
                comps[c] = if self.order >= 3 {
                    super::reconstruct_1d(us, h, &self.cfg).expect("positive sizes").poly
                } else {
                    super::reconstruct_minmod_1d(us, h)
                };
            }
        } else if self.order >= 3 {
            let n = nb.len();
            let mut r = [[0.0; MAX_VARS]; MAX_NBRS];
            for (k, e) in nb.iter().enumerate() {
                let v = val(e.src);
                for c in 0..m {
                    r[k][c] = v[c] - uj[c];
                }
            }
            let ops = &self.ops[self.start[id.index()] as usize..];
            for c in 0..m {
                let mut co = [0.0; 5];
                for (row, v) in co.iter_mut().enumerate() {
                    let o = &ops[row * n..row * n + n];
                    *v = (0..n).map(|k| o[k] * r[k][c]).sum();
                }
                let opt = Quadratic {
                    u: uj[c],
                    px: co[0],
                    py: co[1],
                    pxx: co[2],
                    pxy: co[3],
                    pyy: co[4],
                };
                let mut planes = [Quadratic::default(); 4];
                for (q, p) in planes.iter_mut().enumerate() {
                    let o = &ops[5 * n + 2 * q * n..];
                    let px = (0..n).map(|k| o[k] * r[k][c]).sum();
                    let py = (0..n).map(|k| o[n + k] * r[k][c]).sum();
                    *p = Quadratic::linear(uj[c], px, py);
                }
                comps[c] = blend_2d(&opt, &planes, &self.cfg, hj).poly;
            }
        } else {
            for c in 0..m {
                let mut slopes = [0.0; 2];
                for a in 0..2 {
                    let mut one = [0.0; 2];
                    for (s, side) in [Side::ALL[2 * a], Side::ALL[2 * a + 1]].into_iter().enumerate() {
                        let bit = 1u8 << side as u8;
                        let (mut su, mut sd, mut cnt) = (0.0, 0.0, 0.0);
                        for e in nb.iter().filter(|e| e.face_sides & bit != 0) {
                            su += val(e.src)[c];
                            sd += e.offset[a];
                            cnt += 1.0;
                        }
                        one[s] = (su / cnt - uj[c]) / (sd / cnt);
                    }
                    slopes[a] = minmod(one[0], one[1]);
                }
                comps[c] = Quadratic::linear(uj[c], slopes[0], slopes[1]);
            }
        }
        ReconPolynomial {
            dim: self.dim,
            h: hj,
            m,
            comps,
        }
    }
}
