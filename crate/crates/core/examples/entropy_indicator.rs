//! Numerical entropy production on uniform Burgers grids: it decays with h
//! while the solution is smooth and grows once a shock has formed.

use cweno_amr::amr::{AdaptConfig, Controller};
use cweno_amr::harness::problems::{Problem, ProblemId};
use cweno_amr::integrator::SchemeConfig;
use cweno_amr::mesh::TreeMesh;

fn max_production(p: &Problem, n: usize, t: f64) -> Result<f64, Box<dyn std::error::Error>> {
    let mesh = TreeMesh::build_uniform(&p.domain, n, 0)?;
    let mut ctl = Controller::new(mesh, &p.law, p.bcs, SchemeConfig::default(), AdaptConfig::disabled(), |x| p.initial(x))?;
    ctl.run_until(t, |_, _| {})?;
    let (topo, s) = ctl.entropy.as_ref().expect("a step was taken");
    Ok(s.max_abs(topo))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Problem::new(ProblemId::BurgersStanding);
    println!("N,max|S| t=0.1,max|S| t=0.35");
    for n in [64, 128, 256, 512] {
        println!("{n},{:.3e},{:.3e}", max_production(&p, n, 0.1)?, max_production(&p, n, 0.35)?);
    }
    Ok(())
}
