use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cweno_amr::error::HarnessError;
use cweno_amr::harness::config::{Config, Settings};
use cweno_amr::harness::convergence::{mean_eoc, run_case, run_convergence, ExperimentPlan};
use cweno_amr::harness::grids::{GridKind, PointRole};
use cweno_amr::harness::norms::{load_or_compute_reference, ReferenceSolution};
use cweno_amr::harness::output::{write_case, write_errors_csv, write_sweep};
use cweno_amr::harness::problems::Problem;
use cweno_amr::harness::recon::{recon_table_1d, recon_table_2d_adaptive, recon_table_2d_uniform, write_table, Profile1d};
use cweno_amr::physics::ConservationLaw;
use cweno_amr::reconstruction::CwenoConfig;

#[derive(Parser)]
#[command(name = "cweno-amr", version, about = "Adaptive CWENO finite volume runs and accuracy tables")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Single run at N0 (or M) cells.
    Run(RunArgs),
    /// Convergence sequence k = 0..=K.
    Sweep(RunArgs),
    /// Reconstruction-only error table.
    ReconTable(ReconArgs),
}

#[derive(Args)]
struct RunArgs {
    /// key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra key=value overrides, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long = "n0")]
    n0: Option<usize>,
    #[arg(long = "m")]
    m: Option<usize>,
    #[arg(long = "k")]
    k: Option<usize>,
    #[arg(long)]
    levels: Option<u8>,
    #[arg(long)]
    level_policy: Option<String>,
    #[arg(long = "s0")]
    s0: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    reference: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    Smooth,
    Quasi,
    Random,
    Jump,
    Uniform2d,
    Adaptive2d,
}

#[derive(Clone, Copy, ValueEnum)]
enum Points {
    Centers,
    Interfaces,
}

#[derive(Args)]
struct ReconArgs {
    #[arg(long, value_enum, default_value = "smooth")]
    table: Table,
    /// Role of the generated points on non-uniform grids.
    #[arg(long, value_enum, default_value = "interfaces")]
    points: Points,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Constant ε instead of ε = h.
    #[arg(long)]
    eps_const: Option<f64>,
    /// Jump location of the discontinuous profile.
    #[arg(long, default_value_t = 1.0 / 640.0)]
    jump_at: f64,
    /// Refinement tolerance of the adaptive 2D grid.
    #[arg(long, default_value_t = 0.01)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn settings(&self) -> Result<Settings, HarnessError> {
        let mut cfg = match &self.config {
            Some(p) => Config::parse(&fs::read_to_string(p)?)?,
            None => Config::default(),
        };
        let flags: [(&str, Option<String>); 13] = [
            ("problem", self.problem.clone()),
            ("order", self.order.map(|v| v.to_string())),
            ("N0", self.n0.map(|v| v.to_string())),
            ("M", self.m.map(|v| v.to_string())),
            ("K", self.k.map(|v| v.to_string())),
            ("levels", self.levels.map(|v| v.to_string())),
            ("level_policy", self.level_policy.clone()),
            ("S0", self.s0.map(|v| v.to_string())),
            ("s", self.s.map(|v| v.to_string())),
            ("cfl", self.cfl.map(|v| v.to_string())),
            ("t_final", self.t_final.map(|v| v.to_string())),
            ("out_dir", self.out_dir.as_ref().map(|p| p.display().to_string())),
            ("reference", self.reference.as_ref().map(|p| p.display().to_string())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        cfg.apply_overrides(self.set.iter().map(String::as_str))?;
        cfg.settings()
    }
}

fn reference_for(s: &Settings) -> Result<Option<ReferenceSolution>, HarnessError> {
    let problem = Problem::new(s.plan.problem);
    if problem.has_exact() {
        return Ok(None);
    }
    match &s.reference {
        Some(path) => Ok(Some(load_or_compute_reference(
            path,
            &problem,
            s.reference_n,
            s.plan.scheme(),
            s.plan.final_time(),
        )?)),
        None => Ok(None),
    }
}

fn run(args: &RunArgs, sweep: bool) -> Result<(), HarnessError> {
    let s = args.settings()?;
    let comps = Problem::new(s.plan.problem).law.components();
    let reference = reference_for(&s)?;
    let stdout = io::stdout();
    if sweep {
        let cases = run_convergence(&s.plan, reference.as_ref())?;
        write_sweep(&s.out_dir, &cases, comps)?;
        write_errors_csv(cases.iter().map(|c| &c.report), stdout.lock())?;
        if let Some(e) = mean_eoc(&cases.iter().map(|c| c.report.clone()).collect::<Vec<_>>()) {
            println!("mean EOC {e:.2}");
        }
    } else {
        let plan = ExperimentPlan {
            m: s.n0.unwrap_or(s.plan.m),
            k_max: 1,
            ..s.plan.clone()
        };
        plan.validate()?;
        let case = run_case(&plan, 0, reference.as_ref())?;
        write_case(&s.out_dir, &case, comps)?;
        let mut w = fs::File::create(s.out_dir.join("errors.csv"))?;
        write_errors_csv([&case.report], &mut w)?;
        write_errors_csv([&case.report], stdout.lock())?;
        if let Some(f) = &case.report.failure {
            return Err(HarnessError::Config(format!("run failed: {f}")));
        }
    }
    Ok(())
}

fn recon_table(a: &ReconArgs) -> Result<(), HarnessError> {
    let cfg = a.eps_const.map_or_else(CwenoConfig::default, CwenoConfig::with_constant_epsilon);
    let role = match a.points {
        Points::Centers => PointRole::Centers,
        Points::Interfaces => PointRole::Interfaces,
    };
    let ns: Vec<usize> = (0..8).map(|k| 20 << k).collect();
    let rows = match a.table {
        Table::Smooth => recon_table_1d(Profile1d::Smooth, GridKind::Uniform, role, &ns, &cfg)?,
        Table::Quasi => recon_table_1d(Profile1d::Smooth, GridKind::QuasiUniform, role, &ns, &cfg)?,
        Table::Random => recon_table_1d(Profile1d::Smooth, GridKind::Random { seed: a.seed }, role, &ns, &cfg)?,
        Table::Jump => recon_table_1d(Profile1d::Jump { at: a.jump_at }, GridKind::Uniform, role, &ns, &cfg)?,
        Table::Uniform2d => recon_table_2d_uniform(8, 5, &cfg)?,
        Table::Adaptive2d => recon_table_2d_adaptive(8, 3, a.tol, 4, &cfg)?,
    };
    match &a.out {
        Some(p) => write_table(&rows, fs::File::create(p)?)?,
        None => write_table(&rows, io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Run(a) => run(a, false),
        Cmd::Sweep(a) => run(a, true),
        Cmd::ReconTable(a) => recon_table(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(io::stderr(), "error: {e}");
            ExitCode::FAILURE
        }
    }
}
