use super::RkScheme;
use crate::error::{PhysicsError, SolverError};
use crate::mesh::{CellId, Face, FaceSide, Topology, TreeMesh};
use crate::physics::{apply_bc, llf_axis, Boundaries, ConservationLaw};
use crate::reconstruction::{CwenoConfig, ReconPlan, ReconPolynomial, Vars, MAX_VARS};

/// Spatial order, reconstruction parameters and CFL number of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeConfig {
    /// 3: CWENO + SSP-RK3 with 2-point Gauss faces; 2: minmod + Heun with
    /// midpoint faces.
    pub order: usize,
    pub cweno: CwenoConfig,
    pub cfl: f64,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            order: 3,
            cweno: CwenoConfig::default(),
            cfl: 0.45,
        }
    }
}

impl SchemeConfig {
    pub fn with_order(order: usize) -> Self {
        SchemeConfig {
            order,
            ..Self::default()
        }
    }

    pub fn rk(&self) -> RkScheme {
        RkScheme::for_order(self.order)
    }
}

/// Cell averages indexed by `CellId::index`, tagged with the mesh epoch they
/// belong to. Slots of non-leaf cells hold stale values.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub epoch: u64,
    pub u: Vec<Vars>,
}

impl FieldState {
    pub fn from_fn(topo: &Topology, mut f: impl FnMut(CellId) -> Vars) -> Self {
        let mut u = vec![[0.0; MAX_VARS]; topo.capacity];
        for &id in &topo.leaves {
            u[id.index()] = f(id);
        }
        FieldState { epoch: topo.epoch, u }
    }

    pub fn check(&self, topo: &Topology) -> Result<(), SolverError> {
        if self.epoch != topo.epoch || self.u.len() < topo.capacity {
            return Err(SolverError::StaleState {
                state: self.epoch,
                mesh: topo.epoch,
            });
        }
        Ok(())
    }

    pub fn get(&self, id: CellId) -> &Vars {
        &self.u[id.index()]
    }

    /// `Σ_j |Ω_j| U_j` over the leaves, summed in leaf order.
    pub fn total(&self, topo: &Topology) -> Vars {
        let mut s = [0.0; MAX_VARS];
        for &id in &topo.leaves {
            let v = topo.volume(id);
            for c in 0..MAX_VARS {
                s[c] += v * self.u[id.index()][c];
            }
        }
        s
    }
}

/// A mesh topology with its reconstruction plan, law and boundary data.
pub struct Discretization<'a, L: ConservationLaw + ?Sized> {
    pub topo: Topology,
    pub plan: ReconPlan,
    pub law: &'a L,
    pub bcs: Boundaries,
    pub cfg: SchemeConfig,
}

/// Stage data of one step, kept so the entropy production and local
/// recomputation can reuse it. Arrays are slot-indexed.
#[derive(Clone, Debug)]
pub struct StepCache {
    pub epoch: u64,
    pub dt: f64,
    /// `U^(i)`; entry 0 is `U^n`.
    pub stage_u: Vec<Vec<Vars>>,
    /// `R^(i) = −Q(∂Ω_j; F^(i))/|Ω_j|`.
    pub stage_r: Vec<Vec<Vars>>,
    /// Outward `Q(∂Ω_j; Ψ^(i))`.
    pub stage_psi: Vec<Vec<f64>>,
    /// Reconstructions of `U^n`.
    pub recon_n: Vec<ReconPolynomial>,
    pub u_next: Vec<Vars>,
}

impl StepCache {
    fn new(stages: usize, capacity: usize, blank: ReconPolynomial) -> Self {
        StepCache {
            epoch: 0,
            dt: 0.0,
            stage_u: vec![vec![[0.0; MAX_VARS]; capacity]; stages],
            stage_r: vec![vec![[0.0; MAX_VARS]; capacity]; stages],
            stage_psi: vec![vec![0.0; capacity]; stages],
            recon_n: vec![blank; capacity],
            u_next: vec![[0.0; MAX_VARS]; capacity],
        }
    }

    fn resize(&mut self, capacity: usize, blank: ReconPolynomial) {
        for v in &mut self.stage_u {
            v.resize(capacity, [0.0; MAX_VARS]);
        }
        for v in &mut self.stage_r {
            v.resize(capacity, [0.0; MAX_VARS]);
        }
        for v in &mut self.stage_psi {
            v.resize(capacity, 0.0);
        }
        self.recon_n.resize(capacity, blank);
        self.u_next.resize(capacity, [0.0; MAX_VARS]);
    }
}

fn admissible<L: ConservationLaw + ?Sized>(law: &L, u: &Vars, x: [f64; 2]) -> Result<(), PhysicsError> {
    if law.admissible(u) {
        Ok(())
    } else {
        Err(PhysicsError::Positivity {
            state: u[..law.components()].to_vec(),
            location: format!("x = {x:?}"),
        })
    }
}

fn shifted(c: [f64; 2], d: [f64; 2]) -> [f64; 2] {
    [c[0] + d[0], c[1] + d[1]]
}

impl<'a, L: ConservationLaw + ?Sized> Discretization<'a, L> {
    pub fn new(mesh: &TreeMesh, law: &'a L, bcs: Boundaries, cfg: SchemeConfig) -> Result<Self, SolverError> {
        bcs.validate(law, mesh.domain())?;
        let topo = Topology::build(mesh);
        let plan = ReconPlan::build(&topo, cfg.order, cfg.cweno);
        Ok(Discretization {
            topo,
            plan,
            law,
            bcs,
            cfg,
        })
    }

    pub fn components(&self) -> usize {
        self.law.components()
    }

    fn blank(&self) -> ReconPolynomial {
        ReconPolynomial::constant(self.topo.dim, 0.0, self.components(), &[0.0; MAX_VARS])
    }

    /// Ghost averages for `u`.
    pub fn ghosts(&self, u: &[Vars]) -> Vec<Vars> {
        let mut g = Vec::with_capacity(self.topo.ghosts.len());
        apply_bc(&self.topo, u, self.law, &self.bcs, &mut g);
        g
    }

    /// Reconstructions of the leaves in `set` (all leaves when `None`);
    /// other slots hold a zero placeholder.
    pub fn reconstruct(&self, u: &[Vars], set: Option<&[bool]>) -> Vec<ReconPolynomial> {
        let ghosts = self.ghosts(u);
        let m = self.components();
        let mut out = vec![self.blank(); self.topo.capacity];
        for &id in &self.topo.leaves {
            if set.map_or(true, |s| s[id.index()]) {
                out[id.index()] = self.plan.reconstruct(&self.topo, id, m, u, &ghosts);
            }
        }
        out
    }

    /// Integrated numerical flux and entropy flux through a face, oriented
    /// along `+axis`.
    fn face_flux(&self, face: &Face, recon: &[ReconPolynomial]) -> Result<(Vars, f64), SolverError> {
        let topo = &self.topo;
        let dim = topo.dim;
        let t = 1 - face.axis;
        let mut flux = [0.0; MAX_VARS];
        let mut ent = 0.0;
        for &(s, w) in face.tangent_rule(dim, self.cfg.order) {
            let mut om = face.minus_offset;
            let mut op = face.plus_offset;
            if dim == 2 {
                om[t] += s * face.len;
                op[t] += s * face.len;
            }
            let (ul, ur, x) = match (face.minus, face.plus) {
                (FaceSide::Cell(a), FaceSide::Cell(b)) => (
                    recon[a.index()].eval(om),
                    recon[b.index()].eval(op),
                    shifted(topo.center[a.index()], om),
                ),
                (FaceSide::Cell(a), FaceSide::Wall(side)) => {
                    let ui = recon[a.index()].eval(om);
                    (ui, self.bcs.outer_state(self.law, side, &ui), shifted(topo.center[a.index()], om))
                }
                (FaceSide::Wall(side), FaceSide::Cell(b)) => {
                    let ui = recon[b.index()].eval(op);
                    (self.bcs.outer_state(self.law, side, &ui), ui, shifted(topo.center[b.index()], op))
                }
                (FaceSide::Wall(_), FaceSide::Wall(_)) => unreachable!("face without cells"),
            };
            admissible(self.law, &ul, x)?;
            admissible(self.law, &ur, x)?;
            let f = llf_axis(self.law, face.axis, x, &ul, &ur);
            let wl = w * face.len;
            for c in 0..MAX_VARS {
                flux[c] += wl * f.flux[c];
            }
            ent += wl * f.entropy_flux;
        }
        Ok((flux, ent))
    }

    /// Residual `R_j = −Q(∂Ω_j; F)/|Ω_j|` and outward entropy flux
    /// quadrature for the leaves in `active` (all when `None`). Each face is
    /// evaluated once; per-cell sums run over the cell's faces in ascending
    /// order so any subset reproduces the full evaluation bitwise. Returns
    /// the reconstructions used.
    pub fn compute_rhs(
        &self,
        u: &[Vars],
        active: Option<&[bool]>,
        r: &mut [Vars],
        psi: &mut [f64],
    ) -> Result<Vec<ReconPolynomial>, SolverError> {
        let topo = &self.topo;
        let need = active.map(|a| topo.expand(a));
        let recon = self.reconstruct(u, need.as_deref());
        let on = |s: FaceSide| match s {
            FaceSide::Cell(id) => active.map_or(true, |a| a[id.index()]),
            FaceSide::Wall(_) => false,
        };
        let mut fq = vec![([0.0; MAX_VARS], 0.0); topo.faces.len()];
        for (fi, face) in topo.faces.iter().enumerate() {
            if on(face.minus) || on(face.plus) {
                fq[fi] = self.face_flux(face, &recon)?;
            }
        }
        for &id in &topo.leaves {
            if !active.map_or(true, |a| a[id.index()]) {
                continue;
            }
            let mut acc = [0.0; MAX_VARS];
            let mut p = 0.0;
            for &fi in topo.faces_of(id) {
                let face = &topo.faces[fi as usize];
                let sgn = if face.minus == FaceSide::Cell(id) { 1.0 } else { -1.0 };
                let (f, e) = &fq[fi as usize];
                for c in 0..MAX_VARS {
                    acc[c] += sgn * f[c];
                }
                p += sgn * e;
            }
            let vol = topo.volume(id);
            let mut out = [0.0; MAX_VARS];
            for c in 0..MAX_VARS {
                out[c] = -acc[c] / vol;
            }
            r[id.index()] = out;
            psi[id.index()] = p;
        }
        Ok(recon)
    }

    /// Quadrature nodes (absolute positions) and weights on the segments
    /// shared by leaves `j` and `k`.
    pub fn face_quadrature_nodes(&self, j: CellId, k: CellId) -> Result<Vec<([f64; 2], f64)>, SolverError> {
        let topo = &self.topo;
        let mut out = Vec::new();
        for &fi in topo.faces_of(j) {
            let face = &topo.faces[fi as usize];
            let (own, other, off) = if face.minus == FaceSide::Cell(j) {
                (j, face.plus, 0)
            } else {
                (j, face.minus, 1)
            };
            if other != FaceSide::Cell(k) {
                continue;
            }
            for (om, op, w) in face.nodes(topo.dim, self.cfg.order) {
                let d = if off == 0 { om } else { op };
                out.push((shifted(topo.center[own.index()], d), w));
            }
        }
        if out.is_empty() {
            return Err(SolverError::NotAdjacent(j, k));
        }
        Ok(out)
    }

    /// Global time step `cfl·min h / max_j Σ_axes λ_axis(U_j)`, capped by
    /// `dt_cap` (used when every wave speed vanishes).
    pub fn cfl_dt(&self, state: &FieldState, dt_cap: f64) -> Result<f64, SolverError> {
        state.check(&self.topo)?;
        cfl_dt(&self.topo, &state.u, self.law, self.cfg.cfl, dt_cap)
    }

    /// One SSP-RK step of size `dt` on the whole mesh.
    pub fn ssp_rk_step(&self, rk: &RkScheme, state: &FieldState, dt: f64) -> Result<(FieldState, StepCache), SolverError> {
        state.check(&self.topo)?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SolverError::BadTimeStep(dt));
        }
        let mut cache = StepCache::new(rk.stages(), self.topo.capacity, self.blank());
        cache.epoch = self.topo.epoch;
        cache.dt = dt;
        self.run_stages(rk, &state.u, &mut cache, None)?;
        let next = FieldState {
            epoch: self.topo.epoch,
            u: cache.u_next.clone(),
        };
        Ok((next, cache))
    }

    /// Recomputes a cached step after the mesh changed only at the leaves
    /// in `seeds` (newly created cells). `cache` comes from the same step on
    /// the previous mesh and `state` holds `U^n` on the current mesh. Only
    /// the cells whose stage values can depend on the seeds are recomputed;
    /// the result equals a full recomputation bitwise. Returns the new
    /// state and the set of cells whose `U^{n+1}` was recomputed.
    pub fn recompute_local(
        &self,
        rk: &RkScheme,
        state: &FieldState,
        cache: &mut StepCache,
        seeds: &[bool],
    ) -> Result<(FieldState, Vec<bool>), SolverError> {
        state.check(&self.topo)?;
        if cache.stage_r.len() != rk.stages() {
            return Err(SolverError::MissingStageCache);
        }
        let blank = self.blank();
        cache.resize(self.topo.capacity, blank);
        cache.epoch = self.topo.epoch;
        let mut seed = seeds.to_vec();
        seed.resize(self.topo.capacity, false);
        let regions = self.dependence_regions(&seed, rk.stages());
        self.run_stages(rk, &state.u, cache, Some(&regions))?;
        let next = FieldState {
            epoch: self.topo.epoch,
            u: cache.u_next.clone(),
        };
        Ok((next, regions.last().cloned().unwrap_or(seed)))
    }

    /// Cells whose stage-`i` residual can change when the seeds change: two
    /// vertex-neighbor rings per stage (one for the reconstruction stencil,
    /// one for the face fluxes).
    pub fn dependence_regions(&self, seeds: &[bool], stages: usize) -> Vec<Vec<bool>> {
        let mut out = Vec::with_capacity(stages);
        let mut cur = seeds.to_vec();
        for _ in 0..stages {
            cur = self.topo.expand(&self.topo.expand(&cur));
            out.push(cur.clone());
        }
        out
    }

    fn run_stages(
        &self,
        rk: &RkScheme,
        u_n: &[Vars],
        cache: &mut StepCache,
        regions: Option<&[Vec<bool>]>,
    ) -> Result<(), SolverError> {
        let topo = &self.topo;
        let dt = cache.dt;
        let m = self.components();
        let in_set = |set: Option<&Vec<bool>>, id: CellId| set.map_or(true, |s| s[id.index()]);
        cache.stage_u[0][..u_n.len()].copy_from_slice(u_n);
        for i in 0..rk.stages() {
            if i > 0 {
                let set = regions.map(|r| &r[i - 1]);
                for &id in &topo.leaves {
                    if !in_set(set, id) {
                        continue;
                    }
                    let mut v = u_n[id.index()];
                    for (k, &a) in rk.a[i].iter().enumerate() {
                        if a != 0.0 {
                            let rs = &cache.stage_r[k][id.index()];
                            for c in 0..m {
                                v[c] += dt * a * rs[c];
                            }
                        }
                    }
                    cache.stage_u[i][id.index()] = v;
                }
            }
            let active = regions.map(|r| r[i].as_slice());
            let mut r = std::mem::take(&mut cache.stage_r[i]);
            let mut p = std::mem::take(&mut cache.stage_psi[i]);
            let res = self.compute_rhs(&cache.stage_u[i], active, &mut r, &mut p);
            cache.stage_r[i] = r;
            cache.stage_psi[i] = p;
            let recon = res?;
            if i == 0 {
                for &id in &topo.leaves {
                    if active.map_or(true, |a| a[id.index()]) {
                        cache.recon_n[id.index()] = recon[id.index()];
                    }
                }
            }
        }
        let set = regions.and_then(|r| r.last());
        for &id in &topo.leaves {
            if !in_set(set, id) {
                continue;
            }
            let mut v = u_n[id.index()];
            for (k, &b) in rk.b.iter().enumerate() {
                let rs = &cache.stage_r[k][id.index()];
                for c in 0..m {
                    v[c] += dt * b * rs[c];
                }
            }
            cache.u_next[id.index()] = v;
        }
        Ok(())
    }
}

/// Global CFL time step over the leaves of `topo`.
pub fn cfl_dt<L: ConservationLaw + ?Sized>(
    topo: &Topology,
    u: &[Vars],
    law: &L,
    cfl: f64,
    dt_cap: f64,
) -> Result<f64, SolverError> {
    let mut lam: f64 = 0.0;
    for &id in &topo.leaves {
        let v = &u[id.index()];
        let x = topo.center[id.index()];
        if !law.admissible(v) {
            return Err(PhysicsError::Positivity {
                state: v[..law.components()].to_vec(),
                location: format!("x = {x:?}"),
            }
            .into());
        }
        let s: f64 = (0..topo.dim).map(|a| law.max_speed(v, x, a)).sum();
        lam = lam.max(s);
    }
    let dt = if lam > 0.0 {
        (cfl * topo.min_h() / lam).min(dt_cap)
    } else {
        dt_cap
    };
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SolverError::BadTimeStep(dt));
    }
    Ok(dt)
}
