//! Numerical entropy production per cell and step.

use std::io::{self, Write};

use crate::error::SolverError;
use crate::integrator::{Discretization, RkScheme, StepCache};
use crate::mesh::Topology;
use crate::physics::ConservationLaw;
use crate::quadrature::GAUSS2_HALF;
use crate::reconstruction::{ReconPolynomial, Vars};

/// Entropy production rate `S_j` of the last step, slot-indexed.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyField {
    pub epoch: u64,
    pub s: Vec<f64>,
}

impl EntropyField {
    pub fn max_abs(&self, topo: &Topology) -> f64 {
        topo.leaves
            .iter()
            .map(|id| self.s[id.index()].abs())
            .fold(0.0, f64::max)
    }

    /// CSV dump `cell_id,level,S` over the leaves.
    pub fn write_csv<W: Write>(&self, topo: &Topology, mut w: W) -> io::Result<()> {
        writeln!(w, "cell_id,level,S")?;
        for &id in &topo.leaves {
            writeln!(w, "{},{},{:e}", id.index(), topo.level[id.index()], self.s[id.index()])?;
        }
        Ok(())
    }
}

/// Cell average of `η(U)`: midpoint rule for `order ≤ 2`, tensor 2-point
/// Gauss on the reconstruction otherwise. Falls back to the midpoint rule
/// when the reconstruction is inadmissible at a node.
pub fn cell_entropy<L: ConservationLaw + ?Sized>(law: &L, poly: &ReconPolynomial, avg: &Vars, order: usize) -> f64 {
    if order <= 2 {
        return law.entropy(avg);
    }
    let g = GAUSS2_HALF * poly.h;
    let ny = if poly.dim == 2 { 2 } else { 1 };
    let w = 1.0 / (2 * ny) as f64;
    let mut sum = 0.0;
    for iy in 0..ny {
        let dy = if poly.dim == 2 { [-g, g][iy] } else { 0.0 };
        for dx in [-g, g] {
            let u = poly.eval([dx, dy]);
            if !law.admissible(&u) {
                return law.entropy(avg);
            }
            sum += w * law.entropy(&u);
        }
    }
    sum
}

/// `S_j = (⟨η(U^{n+1})⟩ − ⟨η(U^n)⟩)/Δt + Σ_i b_i Q(∂Ω_j; Ψ^(i))/|Ω_j|` on
/// every leaf.
pub fn entropy_production<L: ConservationLaw + ?Sized>(
    disc: &Discretization<'_, L>,
    rk: &RkScheme,
    cache: &StepCache,
) -> Result<EntropyField, SolverError> {
    let mut field = EntropyField {
        epoch: disc.topo.epoch,
        s: vec![0.0; disc.topo.capacity],
    };
    update_entropy_production(disc, rk, cache, None, &mut field)?;
    Ok(field)
}

/// Recomputes `S_j` for the leaves in `region` (all when `None`).
pub fn update_entropy_production<L: ConservationLaw + ?Sized>(
    disc: &Discretization<'_, L>,
    rk: &RkScheme,
    cache: &StepCache,
    region: Option<&[bool]>,
    field: &mut EntropyField,
) -> Result<(), SolverError> {
    let topo = &disc.topo;
    if cache.stage_psi.len() != rk.stages() || cache.recon_n.len() < topo.capacity {
        return Err(SolverError::MissingStageCache);
    }
    if cache.epoch != topo.epoch {
        return Err(SolverError::StaleState {
            state: cache.epoch,
            mesh: topo.epoch,
        });
    }
    let order = disc.cfg.order;
    let recon_next = if order > 2 {
        Some(disc.reconstruct(&cache.u_next, region))
    } else {
        None
    };
    field.s.resize(topo.capacity, 0.0);
    field.epoch = topo.epoch;
    for &id in &topo.leaves {
        let i = id.index();
        if !region.map_or(true, |r| r[i]) {
            continue;
        }
        let eta_n = cell_entropy(disc.law, &cache.recon_n[i], &cache.stage_u[0][i], order);
        let eta_np1 = match &recon_next {
            Some(rc) => cell_entropy(disc.law, &rc[i], &cache.u_next[i], order),
            None => disc.law.entropy(&cache.u_next[i]),
        };
        let flux: f64 = rk.b.iter().enumerate().map(|(k, b)| b * cache.stage_psi[k][i]).sum();
        field.s[i] = (eta_np1 - eta_n) / cache.dt + flux / topo.volume(id);
    }
    Ok(())
}
