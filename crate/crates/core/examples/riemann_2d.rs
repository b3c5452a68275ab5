//! Four-state 2D Riemann problem on an adaptive quadtree. Writes the final
//! leaves (center, size, density) to riemann_2d.csv.

use std::fs::File;
use std::io::BufWriter;

use cweno_amr::amr::{AdaptConfig, Controller};
use cweno_amr::harness::diagnostics::{finest_near_jumps, min_density_pressure};
use cweno_amr::harness::output::write_solution_csv;
use cweno_amr::harness::problems::{Problem, ProblemId};
use cweno_amr::integrator::SchemeConfig;
use cweno_amr::mesh::TreeMesh;
use cweno_amr::physics::Euler;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Problem::new(ProblemId::Riemann2d);
    let law = Euler::new(2);
    let max_level = 3;
    let mesh = TreeMesh::build_uniform(&p.domain, 16, max_level)?;
    let mut ctl = Controller::new(mesh, &p.law, p.bcs, SchemeConfig::default(), AdaptConfig::new(1.0, 3, max_level), |x| p.initial(x))?;
    let mut min_rho = f64::INFINITY;
    let stats = ctl.run_until(p.t_final, |c, s| {
        min_rho = min_rho.min(min_density_pressure(&law, &c.mesh, &c.state.u).0);
        if s.step % 25 == 0 {
            println!("step {:4} t {:.4} leaves {}", s.step, s.t, s.n_leaves);
        }
    })?;
    write_solution_csv(&ctl.mesh, &ctl.state.u, 4, BufWriter::new(File::create("riemann_2d.csv")?))?;
    let near = finest_near_jumps(&ctl.mesh, &ctl.state.u, 0, 10.0, 3).unwrap_or(0.0);
    println!(
        "{} steps, final leaves {}, min density {min_rho:.3}, finest cells near jumps {near:.2}",
        stats.len(),
        ctl.mesh.leaf_count()
    );
    Ok(())
}
