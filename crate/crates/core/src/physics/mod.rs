//! Conservation laws, entropy pairs, Local Lax-Friedrichs fluxes and boundary
//! conditions.

mod euler;
mod scalar;

pub use euler::Euler;
pub use scalar::{Advection, Burgers, Swirl};

use crate::error::PhysicsError;
use crate::mesh::{Domain, Side, Topology};
use crate::reconstruction::Vars;

/// A system `u_t + ∇·f(u, x) = 0` with an entropy pair.
pub trait ConservationLaw: Sync {
    fn name(&self) -> &str;

    /// Number of conserved components `m`.
    fn components(&self) -> usize;

    /// Physical flux along `axis` at position `x`.
    fn flux(&self, u: &Vars, x: [f64; 2], axis: usize) -> Vars;

    /// Upper bound of the spectral radius of the flux Jacobian along `axis`.
    fn max_speed(&self, u: &Vars, x: [f64; 2], axis: usize) -> f64;

    fn entropy(&self, u: &Vars) -> f64;

    fn entropy_flux(&self, u: &Vars, x: [f64; 2], axis: usize) -> f64;

    fn admissible(&self, u: &Vars) -> bool {
        u[..self.components()].iter().all(|v| v.is_finite())
    }

    /// Mirror state across a wall normal to `axis`; `None` for laws without a
    /// velocity field.
    fn reflect(&self, _u: &Vars, _axis: usize) -> Option<Vars> {
        None
    }
}

/// The model catalog as a single statically dispatched type.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    Advection(Advection),
    Swirl(Swirl),
    Burgers(Burgers),
    Euler(Euler),
}

macro_rules! dispatch {
    ($self:ident, $m:ident => $e:expr) => {
        match $self {
            Model::Advection($m) => $e,
            Model::Swirl($m) => $e,
            Model::Burgers($m) => $e,
            Model::Euler($m) => $e,
        }
    };
}

impl ConservationLaw for Model {
    fn name(&self) -> &str {
        dispatch!(self, m => m.name())
    }
    fn components(&self) -> usize {
        dispatch!(self, m => m.components())
    }
    #[inline]
    fn flux(&self, u: &Vars, x: [f64; 2], axis: usize) -> Vars {
        dispatch!(self, m => m.flux(u, x, axis))
    }
    #[inline]
    fn max_speed(&self, u: &Vars, x: [f64; 2], axis: usize) -> f64 {
        dispatch!(self, m => m.max_speed(u, x, axis))
    }
    #[inline]
    fn entropy(&self, u: &Vars) -> f64 {
        dispatch!(self, m => m.entropy(u))
    }
    #[inline]
    fn entropy_flux(&self, u: &Vars, x: [f64; 2], axis: usize) -> f64 {
        dispatch!(self, m => m.entropy_flux(u, x, axis))
    }
    fn admissible(&self, u: &Vars) -> bool {
        dispatch!(self, m => m.admissible(u))
    }
    fn reflect(&self, u: &Vars, axis: usize) -> Option<Vars> {
        dispatch!(self, m => m.reflect(u, axis))
    }
}

/// Numerical flux and entropy flux through a face oriented along `+axis`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaceFlux {
    pub flux: Vars,
    pub entropy_flux: f64,
    pub alpha: f64,
}

/// LLF flux in the `+axis` direction between the state `ul` on the minus side
/// and `ur` on the plus side:
/// `F = ½[f(ul) + f(ur) − α(ur − ul)]`, `Ψ = ½[ψ(ul) + ψ(ur) − α(η(ur) − η(ul))]`.
#[inline]
pub fn llf_axis<L: ConservationLaw + ?Sized>(law: &L, axis: usize, x: [f64; 2], ul: &Vars, ur: &Vars) -> FaceFlux {
    let m = law.components();
    let alpha = law.max_speed(ul, x, axis).max(law.max_speed(ur, x, axis));
    let fl = law.flux(ul, x, axis);
    let fr = law.flux(ur, x, axis);
    let mut flux = [0.0; 4];
    for c in 0..m {
        flux[c] = 0.5 * (fl[c] + fr[c] - alpha * (ur[c] - ul[c]));
    }
    let entropy_flux = 0.5
        * (law.entropy_flux(ul, x, axis) + law.entropy_flux(ur, x, axis)
            - alpha * (law.entropy(ur) - law.entropy(ul)));
    FaceFlux {
        flux,
        entropy_flux,
        alpha,
    }
}

fn check<L: ConservationLaw + ?Sized>(law: &L, u: &Vars, x: [f64; 2]) -> Result<(), PhysicsError> {
    if law.admissible(u) {
        Ok(())
    } else {
        Err(PhysicsError::Positivity {
            state: u[..law.components()].to_vec(),
            location: format!("{x:?}"),
        })
    }
}

/// LLF flux through a face whose normal (pointing from the inner state to the
/// outer state) is `normal_sign · e_axis`, projected on that normal.
pub fn llf_flux<L: ConservationLaw + ?Sized>(
    law: &L,
    axis: usize,
    normal_sign: f64,
    x: [f64; 2],
    u_in: &Vars,
    u_out: &Vars,
) -> Result<Vars, PhysicsError> {
    check(law, u_in, x)?;
    check(law, u_out, x)?;
    let (ul, ur) = if normal_sign > 0.0 { (u_in, u_out) } else { (u_out, u_in) };
    let mut f = llf_axis(law, axis, x, ul, ur).flux;
    for v in f.iter_mut() {
        *v *= normal_sign.signum();
    }
    Ok(f)
}

/// Entropy flux companion of [`llf_flux`], with the same α.
pub fn llf_entropy_flux<L: ConservationLaw + ?Sized>(
    law: &L,
    axis: usize,
    normal_sign: f64,
    x: [f64; 2],
    u_in: &Vars,
    u_out: &Vars,
) -> Result<f64, PhysicsError> {
    check(law, u_in, x)?;
    check(law, u_out, x)?;
    let (ul, ur) = if normal_sign > 0.0 { (u_in, u_out) } else { (u_out, u_in) };
    Ok(normal_sign.signum() * llf_axis(law, axis, x, ul, ur).entropy_flux)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryCondition {
    Periodic,
    FreeFlow,
    /// Mirror the normal velocity (Euler only).
    Reflecting,
    /// Prescribed conserved state.
    Dirichlet(Vars),
}

/// Boundary condition per domain side, indexed like [`Side`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Boundaries {
    pub sides: [BoundaryCondition; 4],
}

impl Boundaries {
    pub fn uniform(bc: BoundaryCondition) -> Self {
        Boundaries { sides: [bc; 4] }
    }

    pub fn periodic() -> Self {
        Self::uniform(BoundaryCondition::Periodic)
    }

    pub fn with(mut self, side: Side, bc: BoundaryCondition) -> Self {
        self.sides[side as usize] = bc;
        self
    }

    pub fn get(&self, side: Side) -> BoundaryCondition {
        self.sides[side as usize]
    }

    pub fn validate<L: ConservationLaw + ?Sized>(&self, law: &L, domain: &Domain) -> Result<(), PhysicsError> {
        for &side in Side::sides(domain.dim) {
            let bc = self.get(side);
            let periodic = domain.periodic[side.axis()];
            match bc {
                BoundaryCondition::Periodic if !periodic => {
                    return Err(PhysicsError::BoundaryConfig(format!(
                        "{side:?} is periodic but the domain axis is not"
                    )))
                }
                _ if periodic && bc != BoundaryCondition::Periodic => {
                    return Err(PhysicsError::BoundaryConfig(format!(
                        "{side:?} lies on a periodic axis"
                    )))
                }
                BoundaryCondition::Reflecting => {
                    if law.reflect(&[1.0, 0.0, 0.0, 1.0], side.axis()).is_none() {
                        return Err(PhysicsError::BoundaryConfig(format!(
                            "reflecting walls need a velocity field, {} has none",
                            law.name()
                        )));
                    }
                }
                BoundaryCondition::Dirichlet(u) if !law.admissible(&u) => {
                    return Err(PhysicsError::BoundaryConfig("inadmissible Dirichlet state".into()));
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Outer state seen across a boundary face on `side` given the inner
    /// state (cell average or reconstructed trace).
    #[inline]
    pub fn outer_state<L: ConservationLaw + ?Sized>(&self, law: &L, side: Side, inner: &Vars) -> Vars {
        match self.get(side) {
            BoundaryCondition::Periodic | BoundaryCondition::FreeFlow => *inner,
            BoundaryCondition::Reflecting => law.reflect(inner, side.axis()).unwrap_or(*inner),
            BoundaryCondition::Dirichlet(u) => u,
        }
    }
}

/// Ghost averages for every ghost of the topology.
pub fn apply_bc<L: ConservationLaw + ?Sized>(topo: &Topology, u: &[Vars], law: &L, bcs: &Boundaries, ghosts: &mut Vec<Vars>) {
    ghosts.clear();
    ghosts.extend(
        topo.ghosts
            .iter()
            .map(|g| match g.corner {
                None => bcs.outer_state(law, g.side, &u[g.owner.index()]),
                Some(c) => {
                    // reflections first, so a mirrored half domain sees the
                    // same corner state as the full one
                    let (a, b) = if bcs.get(c) == BoundaryCondition::Reflecting { (c, g.side) } else { (g.side, c) };
                    bcs.outer_state(law, b, &bcs.outer_state(law, a, &u[g.owner.index()]))
                }
            }),
    );
}

#[cfg(test)]
mod tests;
