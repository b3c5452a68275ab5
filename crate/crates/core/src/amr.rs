//! Adaptation controller driven by the numerical entropy production.

use std::io::{self, Write};

use log::warn;

use crate::error::SolverError;
use crate::indicator::{entropy_production, update_entropy_production, EntropyField};
use crate::integrator::{Discretization, FieldState, SchemeConfig};
use crate::mesh::{CellId, Topology, TreeMesh};
use crate::physics::{Boundaries, ConservationLaw};
use crate::quadrature::cell_average;
use crate::reconstruction::{Vars, MAX_VARS};

/// Thresholds of the controller.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptConfig {
    /// Cells with `|S_j| > s_ref` are refined.
    pub s_ref: f64,
    /// Families whose children all have `|S_j| < s_coa` are merged.
    pub s_coa: f64,
    /// Refinement passes allowed per step.
    pub max_iters: usize,
    /// Recompute only the domain of dependence of new cells after a
    /// refinement pass (otherwise the whole step is recomputed).
    pub local_recompute: bool,
}

impl AdaptConfig {
    /// `S_coa = S_ref / 2^(order+1)` and `max_level + 2` passes per step.
    pub fn new(s_ref: f64, order: usize, max_level: u8) -> Self {
        AdaptConfig {
            s_ref,
            s_coa: s_ref / 2f64.powi(order as i32 + 1),
            max_iters: max_level as usize + 2,
            local_recompute: true,
        }
    }

    /// A controller that never changes the mesh.
    pub fn disabled() -> Self {
        AdaptConfig {
            s_ref: f64::INFINITY,
            s_coa: 0.0,
            max_iters: 0,
            local_recompute: true,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let ok = self.s_ref > 0.0 && self.s_coa >= 0.0 && (self.s_coa < self.s_ref || self.s_ref == f64::INFINITY);
        if ok {
            Ok(())
        } else {
            Err(SolverError::BadThresholds {
                s_ref: self.s_ref,
                s_coa: self.s_coa,
            })
        }
    }
}

/// Per-step record of the controller.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepStats {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    /// Leaves of the mesh the accepted step was computed on.
    pub n_leaves: usize,
    pub n_refined: usize,
    pub n_coarsened: usize,
    pub max_s: f64,
    pub iterations: usize,
    /// Full recomputations forced by a smaller minimum cell size.
    pub restarts: usize,
}

impl StepStats {
    pub const CSV_HEADER: &'static str = "step,t,dt,N_leaves,N_refined,N_coarsened,max_abs_S";

    pub fn write_csv_row<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "{},{:.17e},{:.17e},{},{},{},{:e}",
            self.step, self.t, self.dt, self.n_leaves, self.n_refined, self.n_coarsened, self.max_s
        )
    }
}

/// Leaves within `rings` vertex-neighbor rings of the seeds. Ghosts are
/// never included.
pub fn domain_of_dependence(topo: &Topology, seeds: &[bool], rings: usize) -> Vec<bool> {
    let mut set = seeds.to_vec();
    set.resize(topo.capacity, false);
    for _ in 0..rings {
        set = topo.expand(&set);
    }
    set
}

type InitFn<'a> = Box<dyn Fn([f64; 2]) -> Vars + 'a>;

/// Mesh, state and time of an adaptive run.
pub struct Controller<'a, L: ConservationLaw + ?Sized> {
    pub mesh: TreeMesh,
    pub disc: Discretization<'a, L>,
    pub state: FieldState,
    pub cfg: AdaptConfig,
    pub t: f64,
    pub steps: usize,
    /// Entropy production of the last accepted step (on the mesh before
    /// coarsening).
    pub entropy: Option<(Topology, EntropyField)>,
    initial: Option<InitFn<'a>>,
}

impl<'a, L: ConservationLaw + ?Sized> Controller<'a, L> {
    /// Starts from the cell averages of `init` on `mesh`. During the first
    /// step, refined cells are filled from `init` as well.
    pub fn new(
        mesh: TreeMesh,
        law: &'a L,
        bcs: Boundaries,
        scheme: SchemeConfig,
        cfg: AdaptConfig,
        init: impl Fn([f64; 2]) -> Vars + 'a,
    ) -> Result<Self, SolverError> {
        cfg.validate()?;
        let disc = Discretization::new(&mesh, law, bcs, scheme)?;
        let state = FieldState::from_fn(&disc.topo, |id| {
            cell_average(mesh.dim(), mesh.center(id), mesh.size(id), 3, &init)
        });
        Ok(Controller {
            mesh,
            disc,
            state,
            cfg,
            t: 0.0,
            steps: 0,
            entropy: None,
            initial: Some(Box::new(init)),
        })
    }

    /// Starts from given averages; refined cells are always prolonged from
    /// the reconstruction.
    pub fn from_state(
        mesh: TreeMesh,
        law: &'a L,
        bcs: Boundaries,
        scheme: SchemeConfig,
        cfg: AdaptConfig,
        state: FieldState,
    ) -> Result<Self, SolverError> {
        cfg.validate()?;
        let disc = Discretization::new(&mesh, law, bcs, scheme)?;
        state.check(&disc.topo)?;
        Ok(Controller {
            mesh,
            disc,
            state,
            cfg,
            t: 0.0,
            steps: 0,
            entropy: None,
            initial: None,
        })
    }

    fn rebuild(&mut self) -> Result<(), SolverError> {
        self.disc = Discretization::new(&self.mesh, self.disc.law, self.disc.bcs, self.disc.cfg)?;
        Ok(())
    }

    /// Advances by one accepted step of size at most `dt_cap`.
    pub fn step(&mut self, dt_cap: f64) -> Result<StepStats, SolverError> {
        let rk = self.disc.cfg.rk();
        let max_level = self.mesh.max_level();
        let analytic = if self.steps == 0 { self.initial.take() } else { None };

        let mut dt = self.disc.cfl_dt(&self.state, dt_cap)?;
        let (mut next, mut cache) = self.disc.ssp_rk_step(&rk, &self.state, dt)?;
        let mut ent = entropy_production(&self.disc, &rk, &cache)?;
        let mut n_refined = 0;
        let mut iterations = 0;
        let mut restarts = 0;
        loop {
            let flagged: Vec<CellId> = self
                .disc
                .topo
                .leaves
                .iter()
                .copied()
                .filter(|id| ent.s[id.index()].abs() > self.cfg.s_ref && self.mesh.level(*id) < max_level)
                .collect();
            if flagged.is_empty() {
                break;
            }
            if iterations == self.cfg.max_iters {
                warn!(
                    "t = {}: {} cells still flagged after {} refinement passes",
                    self.t,
                    flagged.len(),
                    iterations
                );
                break;
            }
            iterations += 1;

            let old_min_h = self.disc.topo.min_h();
            let mut u = std::mem::take(&mut self.state.u);
            let mut seeds: Vec<CellId> = Vec::new();
            for id in flagged {
                if !self.mesh.is_leaf(id) {
                    continue;
                }
                let rf = self.mesh.refine(id)?;
                u.resize(self.mesh.capacity(), [0.0; MAX_VARS]);
                for p in rf.cascaded.iter().copied().chain(std::iter::once(id)) {
                    let kids = self.mesh.children(p).expect("just refined").to_vec();
                    let fill: Vec<Vars> = if let Some(f) = &analytic {
                        let mut v: Vec<Vars> = kids
                            .iter()
                            .map(|&c| cell_average(self.mesh.dim(), self.mesh.center(c), self.mesh.size(c), 3, f))
                            .collect();
                        // shift by the quadrature defect so the family keeps the parent's mass
                        let n = v.len() as f64;
                        for k in 0..MAX_VARS {
                            let mean = v.iter().map(|x| x[k]).sum::<f64>() / n;
                            let shift = u[p.index()][k] - mean;
                            for x in v.iter_mut() {
                                x[k] += shift;
                            }
                        }
                        v
                    } else if p.index() < self.disc.topo.capacity && self.disc.topo.is_leaf[p.index()] {
                        cache.recon_n[p.index()].child_averages()
                    } else {
                        vec![u[p.index()]; kids.len()]
                    };
                    for (&c, v) in kids.iter().zip(fill) {
                        u[c.index()] = v;
                    }
                    n_refined += 1;
                    seeds.extend_from_slice(&kids);
                }
            }
            self.rebuild()?;
            self.state = FieldState {
                epoch: self.disc.topo.epoch,
                u,
            };
            let topo = &self.disc.topo;
            let finer = topo.min_h() < old_min_h;
            if finer {
                restarts += 1;
                dt = self.disc.cfl_dt(&self.state, dt_cap)?;
            }
            if finer || !self.cfg.local_recompute {
                (next, cache) = self.disc.ssp_rk_step(&rk, &self.state, dt)?;
                ent = entropy_production(&self.disc, &rk, &cache)?;
            } else {
                let mut mask = vec![false; topo.capacity];
                for c in &seeds {
                    if topo.is_leaf[c.index()] {
                        mask[c.index()] = true;
                    }
                }
                let (n2, changed) = self.disc.recompute_local(&rk, &self.state, &mut cache, &mask)?;
                next = n2;
                let region = domain_of_dependence(topo, &changed, 1);
                update_entropy_production(&self.disc, &rk, &cache, Some(&region), &mut ent)?;
            }
        }

        let max_s = ent.max_abs(&self.disc.topo);
        let n_leaves = self.disc.topo.leaves.len();
        self.state = next;
        self.t += dt;
        self.steps += 1;

        // coarsening of families whose children all produce little entropy
        let mut n_coarsened = 0;
        let mut parents: Vec<CellId> = Vec::new();
        for &id in &self.disc.topo.leaves {
            if let Some(p) = self.mesh.parent(id) {
                if self.mesh.children(p).map(|k| k[0]) == Some(id) {
                    parents.push(p);
                }
            }
        }
        let nc = 1usize << self.mesh.dim();
        // legality is judged on the mesh before any merge, so the result
        // does not depend on the traversal order
        let merge: Vec<CellId> = parents
            .into_iter()
            .filter(|&p| {
                self.mesh.children(p).is_some_and(|kids| {
                    kids.iter()
                        .all(|&c| self.mesh.is_leaf(c) && ent.s[c.index()].abs() < self.cfg.s_coa)
                }) && self.mesh.can_coarsen(p).is_ok()
            })
            .collect();
        for p in merge {
            let kids = self.mesh.children(p).expect("family checked above").to_vec();
            let mut avg = [0.0; MAX_VARS];
            for &c in &kids {
                for k in 0..MAX_VARS {
                    avg[k] += self.state.u[c.index()][k];
                }
            }
            for v in avg.iter_mut() {
                *v /= nc as f64;
            }
            self.mesh.coarsen(p)?;
            self.state.u[p.index()] = avg;
            n_coarsened += 1;
        }
        let topo_used = self.disc.topo.clone();
        if n_coarsened > 0 {
            self.rebuild()?;
            self.state.epoch = self.disc.topo.epoch;
        }
        self.entropy = Some((topo_used, ent));
        Ok(StepStats {
            step: self.steps,
            t: self.t,
            dt,
            n_leaves,
            n_refined,
            n_coarsened,
            max_s,
            iterations,
            restarts,
        })
    }

    /// Steps until `t_final`, calling `on_step` after every accepted step.
    pub fn run_until(&mut self, t_final: f64, mut on_step: impl FnMut(&Self, &StepStats)) -> Result<Vec<StepStats>, SolverError> {
        let mut out = Vec::new();
        while self.t < t_final * (1.0 - 1e-14) {
            let st = self.step(t_final - self.t)?;
            on_step(self, &st);
            out.push(st);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests;
