//! Convergence sequences `N_0 = M·2^k`, `S_ref = S_0·s^(−k)`.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use log::{info, warn};

use crate::amr::{AdaptConfig, Controller, StepStats};
use crate::error::HarnessError;
use crate::harness::norms::{cell_error_norms, exact_cell_average, reference_error_norms, ReferenceSolution};
use crate::harness::problems::{Problem, ProblemId};
use crate::integrator::SchemeConfig;
use crate::mesh::TreeMesh;
use crate::reconstruction::{CwenoConfig, Vars};

/// How the number of cell sizes grows along a sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LevelPolicy {
    /// `ℓ = L`.
    Fixed,
    /// `ℓ = L + k`.
    Plus,
    /// `ℓ = L + 2k`.
    PlusPlus,
}

impl LevelPolicy {
    /// Number of cell sizes of run `k` starting from `base`.
    pub fn levels(self, base: u8, k: usize) -> u8 {
        let extra = match self {
            LevelPolicy::Fixed => 0,
            LevelPolicy::Plus => k,
            LevelPolicy::PlusPlus => 2 * k,
        };
        base.saturating_add(extra as u8)
    }
}

impl FromStr for LevelPolicy {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fixed" => Ok(LevelPolicy::Fixed),
            "plus" => Ok(LevelPolicy::Plus),
            "plusplus" => Ok(LevelPolicy::PlusPlus),
            _ => Err(HarnessError::Config(format!("unknown level policy `{s}`"))),
        }
    }
}

impl fmt::Display for LevelPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LevelPolicy::Fixed => "fixed",
            LevelPolicy::Plus => "plus",
            LevelPolicy::PlusPlus => "plusplus",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPlan {
    pub problem: ProblemId,
    pub order: usize,
    /// Base resolution `M`; run `k` starts from `N_0 = M·2^k` cells along x.
    pub m: usize,
    /// Last index of the sequence; runs `k = 0..=K`.
    pub k_max: usize,
    /// Number of cell sizes `L` of run 0 (1 means a uniform grid).
    pub levels: u8,
    pub policy: LevelPolicy,
    pub s0: f64,
    pub s: f64,
    /// Overrides the problem's final time.
    pub t_final: Option<f64>,
    pub cfl: f64,
    pub cweno: CwenoConfig,
    /// Seed of any randomized input, recorded for reproducibility.
    pub seed: u64,
}

impl ExperimentPlan {
    pub fn new(problem: ProblemId, order: usize, m: usize, k_max: usize) -> Self {
        ExperimentPlan {
            problem,
            order,
            m,
            k_max,
            levels: 1,
            policy: LevelPolicy::Fixed,
            s0: 1.0,
            s: 1.0,
            t_final: None,
            cfl: SchemeConfig::default().cfl,
            cweno: CwenoConfig::default(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let err = |m: String| Err(HarnessError::Config(m));
        if !(self.s >= 1.0) {
            return err(format!("threshold scaling s = {} must be at least 1", self.s));
        }
        if self.k_max < 1 {
            return err("a sequence needs K >= 1".into());
        }
        if self.order != 2 && self.order != 3 {
            return err(format!("order {} not in {{2, 3}}", self.order));
        }
        if self.m == 0 || self.levels == 0 {
            return err("M and the level count must be positive".into());
        }
        if !(self.s0 > 0.0) {
            return err(format!("S0 = {} must be positive", self.s0));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return err(format!("cfl = {} outside (0, 1]", self.cfl));
        }
        if let Some(t) = self.t_final {
            if !(t > 0.0 && t.is_finite()) {
                return err(format!("t_final = {t} must be positive"));
            }
        }
        self.cweno.validate().map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn n0(&self, k: usize) -> usize {
        self.m << k
    }

    pub fn levels_at(&self, k: usize) -> u8 {
        self.policy.levels(self.levels, k)
    }

    pub fn s_ref(&self, k: usize) -> f64 {
        self.s0 * self.s.powi(-(k as i32))
    }

    pub fn scheme(&self) -> SchemeConfig {
        SchemeConfig {
            order: self.order,
            cweno: self.cweno,
            cfl: self.cfl,
        }
    }

    pub fn final_time(&self) -> f64 {
        self.t_final.unwrap_or_else(|| Problem::new(self.problem).t_final)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub k: usize,
    pub n0: usize,
    pub levels: u8,
    pub s_ref: f64,
    /// Mean leaf count over the accepted steps.
    pub avg_n: f64,
    pub final_n: usize,
    pub steps: usize,
    pub t: f64,
    pub l1: Option<f64>,
    pub linf: Option<f64>,
    /// `log2(E_{k−1}/E_k)` of the L1 errors.
    pub eoc: Option<f64>,
    pub wall_time: Duration,
    pub failure: Option<String>,
}

/// Final state of a run.
#[derive(Clone, Debug)]
pub struct CaseResult {
    pub report: RunReport,
    pub mesh: TreeMesh,
    pub u: Vec<Vars>,
    pub steps: Vec<StepStats>,
}

/// `log2(e_prev/e_next)`.
pub fn eoc(e_prev: f64, e_next: f64) -> f64 {
    (e_prev / e_next).log2()
}

/// Runs case `k` of `plan`. Errors are measured against the exact solution
/// when the problem has one, otherwise against `reference` if given.
pub fn run_case(plan: &ExperimentPlan, k: usize, reference: Option<&ReferenceSolution>) -> Result<CaseResult, HarnessError> {
    let problem = Problem::new(plan.problem);
    let levels = plan.levels_at(k);
    let n0 = plan.n0(k);
    let s_ref = plan.s_ref(k);
    let t_final = plan.final_time();
    let mesh = TreeMesh::build_uniform(&problem.domain, n0, levels - 1)?;
    let cfg = AdaptConfig::new(s_ref, plan.order, levels - 1);
    let init = |x: [f64; 2]| problem.initial(x);
    let started = Instant::now();
    let mut ctl = Controller::new(mesh, &problem.law, problem.bcs, plan.scheme(), cfg, init)?;
    let mut leaf_sum = 0usize;
    let run = ctl.run_until(t_final, |_, st| leaf_sum += st.n_leaves);
    let wall_time = started.elapsed();
    let (steps, failure) = match run {
        Ok(s) => (s, None),
        Err(e) => {
            warn!("{} k={k}: run aborted at t = {}: {e}", plan.problem, ctl.t);
            (Vec::new(), Some(e.to_string()))
        }
    };
    let n_steps = if failure.is_none() { steps.len() } else { ctl.steps };
    let avg_n = if n_steps == 0 { ctl.mesh.leaf_count() as f64 } else { leaf_sum as f64 / n_steps as f64 };
    let (l1, linf) = if failure.is_some() {
        (None, None)
    } else if problem.has_exact() {
        let leaves = ctl.mesh.leaves();
        let t = ctl.t;
        let mesh = &ctl.mesh;
        let (a, b) = cell_error_norms(mesh, &leaves, &ctl.state.u, 0, |id| {
            exact_cell_average(&problem, mesh, id, t).expect("exact solution")
        });
        (Some(a), Some(b))
    } else if let Some(r) = reference {
        let (a, b) = reference_error_norms(&ctl.mesh, &ctl.state.u, 0, r)?;
        (Some(a), Some(b))
    } else {
        (None, None)
    };
    let report = RunReport {
        k,
        n0,
        levels,
        s_ref,
        avg_n,
        final_n: ctl.mesh.leaf_count(),
        steps: n_steps,
        t: ctl.t,
        l1,
        linf,
        eoc: None,
        wall_time,
        failure,
    };
    info!(
        "{} k={k} N0={n0} levels={levels} S_ref={s_ref:e}: <N>={avg_n:.1} L1={:?} in {:.2?}",
        plan.problem, report.l1, wall_time
    );
    Ok(CaseResult {
        report,
        mesh: ctl.mesh,
        u: ctl.state.u,
        steps,
    })
}

/// Runs `k = 0..=K` concurrently and fills in the EOC between consecutive
/// runs. A run that fails to set up is reported as failed; the sequence
/// continues.
pub fn run_convergence(plan: &ExperimentPlan, reference: Option<&ReferenceSolution>) -> Result<Vec<CaseResult>, HarnessError> {
    plan.validate()?;
    let outcomes: Vec<Result<CaseResult, HarnessError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..=plan.k_max)
            .map(|k| scope.spawn(move || run_case(plan, k, reference)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("run panicked")).collect()
    });
    let problem = Problem::new(plan.problem);
    let mut out: Vec<CaseResult> = Vec::with_capacity(outcomes.len());
    for (k, r) in outcomes.into_iter().enumerate() {
        let case = match r {
            Ok(c) => c,
            Err(e) => {
                warn!("{} k={k}: {e}", plan.problem);
                let mesh = TreeMesh::build_uniform(&problem.domain, plan.n0(k), 0)?;
                CaseResult {
                    report: RunReport {
                        k,
                        n0: plan.n0(k),
                        levels: plan.levels_at(k),
                        s_ref: plan.s_ref(k),
                        avg_n: f64::NAN,
                        final_n: 0,
                        steps: 0,
                        t: 0.0,
                        l1: None,
                        linf: None,
                        eoc: None,
                        wall_time: Duration::ZERO,
                        failure: Some(e.to_string()),
                    },
                    u: Vec::new(),
                    mesh,
                    steps: Vec::new(),
                }
            }
        };
        out.push(case);
    }
    fill_eoc(out.iter_mut().map(|c| &mut c.report));
    Ok(out)
}

/// Sets the EOC of every report from the L1 error of its predecessor.
pub fn fill_eoc<'a>(reports: impl IntoIterator<Item = &'a mut RunReport>) {
    let mut prev: Option<f64> = None;
    for r in reports {
        r.eoc = match (prev, r.l1) {
            (Some(a), Some(b)) => Some(eoc(a, b)),
            _ => None,
        };
        prev = r.l1;
    }
}

/// Mean of the available EOCs.
pub fn mean_eoc(reports: &[RunReport]) -> Option<f64> {
    let v: Vec<f64> = reports.iter().filter_map(|r| r.eoc).collect();
    if v.is_empty() {
        None
    } else {
        Some(v.iter().sum::<f64>() / v.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn report(k: usize, l1: Option<f64>) -> RunReport {
        RunReport {
            k,
            n0: 16 << k,
            levels: 1,
            s_ref: 1.0,
            avg_n: 0.0,
            final_n: 0,
            steps: 0,
            t: 0.0,
            l1,
            linf: None,
            eoc: None,
            wall_time: Duration::ZERO,
            failure: None,
        }
    }

    #[test]
    fn synthetic_third_order_sequence() {
        let mut rs: Vec<RunReport> = (0..5).map(|k| report(k, Some(0.7 * 2f64.powi(-3 * k as i32)))).collect();
        fill_eoc(rs.iter_mut());
        assert_eq!(rs[0].eoc, None);
        for r in &rs[1..] {
            assert_eq!(r.eoc, Some(3.0));
        }
        assert_eq!(mean_eoc(&rs), Some(3.0));
    }

    #[test]
    fn missing_errors_break_the_chain() {
        let mut rs = vec![report(0, Some(1.0)), report(1, None), report(2, Some(0.25))];
        fill_eoc(rs.iter_mut());
        assert!(rs.iter().all(|r| r.eoc.is_none()));
    }

    #[test]
    fn sequence_conventions() {
        let mut p = ExperimentPlan::new(ProblemId::BurgersStanding, 3, 16, 3);
        p.levels = 3;
        p.policy = LevelPolicy::PlusPlus;
        p.s0 = 0.5;
        p.s = 2.0;
        assert_eq!(p.n0(2), 64);
        assert_eq!(p.levels_at(2), 7);
        assert_eq!(p.s_ref(3), 0.0625);
        assert_eq!(LevelPolicy::Plus.levels(4, 3), 7);
        assert_eq!(LevelPolicy::Fixed.levels(4, 3), 4);
        assert_eq!("plusplus".parse::<LevelPolicy>().unwrap(), LevelPolicy::PlusPlus);
        assert!("more".parse::<LevelPolicy>().is_err());
        p.validate().unwrap();
        assert!(ExperimentPlan { s: 0.5, ..p.clone() }.validate().is_err());
        assert!(ExperimentPlan { k_max: 0, ..p.clone() }.validate().is_err());
        assert!(ExperimentPlan { order: 4, ..p }.validate().is_err());
    }

    #[test]
    fn uniform_runs_average_the_fixed_count() {
        let mut p = ExperimentPlan::new(ProblemId::Lintra1, 3, 20, 1);
        p.t_final = Some(0.05);
        let runs = run_convergence(&p, None).unwrap();
        for (k, c) in runs.iter().enumerate() {
            assert_eq!(c.report.avg_n, (20 << k) as f64);
            assert!(c.report.steps > 0 && c.report.l1.unwrap() < 1e-2, "{:?}", c.report);
        }
        assert!(runs[1].report.eoc.unwrap() > 2.5);
    }

    #[test]
    fn reruns_are_bitwise_identical() {
        let mut p = ExperimentPlan::new(ProblemId::BurgersStanding, 3, 16, 1);
        p.levels = 3;
        p.s0 = 0.05;
        p.s = 2.0;
        p.t_final = Some(0.2);
        let a = run_convergence(&p, None).unwrap();
        let b = run_convergence(&p, None).unwrap();
        for (x, y) in a.iter().zip(&b) {
            let strip = |r: &RunReport| RunReport {
                wall_time: Duration::ZERO,
                ..r.clone()
            };
            assert_eq!(strip(&x.report), strip(&y.report));
            assert_eq!(x.steps, y.steps);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn eoc_recovers_power_laws(c in 1e-6f64..10.0, p in 0.5f64..5.0) {
            let e0 = c;
            let e1 = c * 2f64.powf(-p);
            prop_assert!((eoc(e0, e1) - p).abs() < 1e-12);
        }
    }
}
