//! Convergence of the full scheme on smooth linear transport, uniform
//! refinement with N0 = 20·2^k.

use cweno_amr::harness::convergence::{mean_eoc, run_convergence, ExperimentPlan};
use cweno_amr::harness::output::write_errors_csv;
use cweno_amr::harness::problems::ProblemId;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let plan = ExperimentPlan::new(ProblemId::Lintra1, 3, 20, 5);
    let cases = run_convergence(&plan, None)?;
    write_errors_csv(cases.iter().map(|c| &c.report), std::io::stdout().lock())?;
    let reports: Vec<_> = cases.into_iter().map(|c| c.report).collect();
    if let Some(e) = mean_eoc(&reports) {
        println!("mean EOC {e:.2}");
    }
    Ok(())
}
