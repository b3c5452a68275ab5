//! Smooth swirling flow on an adaptive quadtree against the uniform grid
//! with the same finest cell size.

use cweno_amr::harness::convergence::{run_case, ExperimentPlan};
use cweno_amr::harness::problems::ProblemId;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (label, levels) in [("uniform", 1u8), ("adaptive", 3)] {
        let mut plan = ExperimentPlan::new(ProblemId::Swirl, 3, if levels == 1 { 64 } else { 16 }, 1);
        plan.levels = levels;
        plan.s0 = 1e-2;
        plan.validate()?;
        let r = run_case(&plan, 0, None)?.report;
        println!(
            "{label:>8}: <N> = {:.0}, L1 = {:.3e}, {} steps",
            r.avg_n,
            r.l1.unwrap_or(f64::NAN),
            r.steps
        );
    }
    Ok(())
}
