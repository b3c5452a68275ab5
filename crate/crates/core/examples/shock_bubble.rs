//! Shock hitting a light bubble, computed on the full channel and on its
//! upper half with a reflecting wall. The two agree to round-off.

use cweno_amr::amr::{AdaptConfig, Controller};
use cweno_amr::harness::diagnostics::{mirror_defect, overlap_defect};
use cweno_amr::harness::problems::{Problem, ProblemId};
use cweno_amr::integrator::SchemeConfig;
use cweno_amr::mesh::TreeMesh;
use cweno_amr::reconstruction::Vars;

fn run(id: ProblemId) -> Result<(TreeMesh, Vec<Vars>), Box<dyn std::error::Error>> {
    let p = Problem::new(id);
    let mesh = TreeMesh::build_uniform(&p.domain, 34, 2)?;
    let mut ctl = Controller::new(mesh, &p.law, p.bcs, SchemeConfig::default(), AdaptConfig::new(1.0, 3, 2), |x| p.initial(x))?;
    let stats = ctl.run_until(p.t_final, |_, _| {})?;
    println!("{}: {} steps, final leaves {}", p.id.name(), stats.len(), ctl.mesh.leaf_count());
    Ok((ctl.mesh, ctl.state.u))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (full_mesh, full) = run(ProblemId::ShockBubble)?;
    let (half_mesh, half) = run(ProblemId::ShockBubbleHalf)?;
    match mirror_defect(&full_mesh, &full, 0.0, 2, 4) {
        Some(d) => println!("mirror defect {d:.1e}"),
        None => println!("full mesh is not mirror symmetric"),
    }
    match overlap_defect(&half_mesh, &half, &full_mesh, &full, 4) {
        Some(d) => println!("half vs full defect {d:.1e}"),
        None => println!("half and full meshes differ"),
    }
    Ok(())
}
