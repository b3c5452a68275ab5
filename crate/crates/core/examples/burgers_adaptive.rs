//! Adaptive run of the moving-shock Burgers problem. Prints the step log
//! every 20 steps and the final error against the exact solution.

use cweno_amr::amr::{AdaptConfig, Controller};
use cweno_amr::harness::problems::{Problem, ProblemId};
use cweno_amr::integrator::SchemeConfig;
use cweno_amr::mesh::TreeMesh;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Problem::new(ProblemId::BurgersMoving);
    let max_level = 4;
    let mesh = TreeMesh::build_uniform(&p.domain, 32, max_level)?;
    let cfg = AdaptConfig::new(1e-2, 3, max_level);
    let mut ctl = Controller::new(mesh, &p.law, p.bcs, SchemeConfig::default(), cfg, |x| p.initial(x))?;
    let stats = ctl.run_until(p.t_final, |_, s| {
        if s.step % 20 == 0 {
            println!(
                "step {:4} t {:.4} leaves {:4} +{} -{} max|S| {:.2e}",
                s.step, s.t, s.n_leaves, s.n_refined, s.n_coarsened, s.max_s
            );
        }
    })?;
    let avg = stats.iter().map(|s| s.n_leaves).sum::<usize>() as f64 / stats.len() as f64;

    let mut l1 = 0.0;
    for id in ctl.mesh.leaves() {
        let (lo, hi) = ctl.mesh.cell_box(id);
        let exact = p.exact_average_1d(p.t_final, lo[0], hi[0]).expect("exact solution");
        l1 += (hi[0] - lo[0]) * (ctl.state.u[id.index()][0] - exact).abs();
    }
    println!("{} steps, <N> = {avg:.1}, final leaves {}, L1 error {l1:.3e}", stats.len(), ctl.mesh.leaf_count());
    Ok(())
}
