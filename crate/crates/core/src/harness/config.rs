//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::HarnessError;
use crate::harness::convergence::ExperimentPlan;
use crate::harness::problems::ProblemId;
use crate::reconstruction::{CwenoConfig, Epsilon};

pub const KEYS: [&str; 18] = [
    "problem",
    "order",
    "N0",
    "M",
    "K",
    "levels",
    "level_policy",
    "S0",
    "s",
    "cfl",
    "t_final",
    "eps_mode",
    "eps_const",
    "out_dir",
    "seed",
    "reference",
    "reference_N",
    "eps_scale",
];

/// Raw key/value pairs; later assignments win.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

/// Typed settings of a `run` or `sweep` invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub plan: ExperimentPlan,
    /// Single-run resolution; `run` uses `N0` if given, else `M`.
    pub n0: Option<usize>,
    pub out_dir: PathBuf,
    /// Stored reference for problems without an exact solution.
    pub reference: Option<PathBuf>,
    /// Resolution of a reference computed on demand.
    pub reference_n: usize,
}

impl Config {
    /// Parses `key = value` lines. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("line {}: expected key = value", i + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        if !KEYS.contains(&key) {
            return Err(HarnessError::Config(format!("unknown key `{key}`")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Applies `key=value` overrides.
    pub fn apply_overrides<'a>(&mut self, pairs: impl IntoIterator<Item = &'a str>) -> Result<(), HarnessError> {
        for p in pairs {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("override `{p}` is not key=value")))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, HarnessError> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| HarnessError::Config(format!("bad value `{v}` for `{key}`")))
            })
            .transpose()
    }

    pub fn settings(&self) -> Result<Settings, HarnessError> {
        let problem: ProblemId = self
            .get("problem")
            .ok_or_else(|| HarnessError::Config("`problem` is required".into()))?
            .parse()?;
        let order = self.parsed("order")?.unwrap_or(3);
        let n0: Option<usize> = self.parsed("N0")?;
        let m = self.parsed("M")?.or(n0).unwrap_or(16);
        let k_max = self.parsed("K")?.unwrap_or(1);
        let mut plan = ExperimentPlan::new(problem, order, m, k_max);
        plan.levels = self.parsed("levels")?.unwrap_or(1);
        if let Some(p) = self.get("level_policy") {
            plan.policy = p.parse()?;
        }
        plan.s0 = self.parsed("S0")?.unwrap_or(plan.s0);
        plan.s = self.parsed("s")?.unwrap_or(plan.s);
        plan.cfl = self.parsed("cfl")?.unwrap_or(plan.cfl);
        plan.t_final = self.parsed("t_final")?;
        plan.seed = self.parsed("seed")?.unwrap_or(0);
        plan.cweno = match self.get("eps_mode").unwrap_or("h") {
            "h" => CwenoConfig {
                epsilon: Epsilon::Scaled(self.parsed("eps_scale")?.unwrap_or(1.0)),
                ..CwenoConfig::default()
            },
            "const" => CwenoConfig::with_constant_epsilon(
                self.parsed("eps_const")?
                    .ok_or_else(|| HarnessError::Config("eps_mode = const needs eps_const".into()))?,
            ),
            other => return Err(HarnessError::Config(format!("unknown eps_mode `{other}`"))),
        };
        Ok(Settings {
            plan,
            n0,
            out_dir: PathBuf::from(self.get("out_dir").unwrap_or("out")),
            reference: self.get("reference").map(PathBuf::from),
            reference_n: self.parsed("reference_N")?.unwrap_or(16384),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::convergence::LevelPolicy;

    const SAMPLE: &str = "
# standing shock, third order
problem = burgers-standing
order = 3
M = 16
K = 3
levels = 3
level_policy = plusplus
S0 = 1e-2
s = 2   # shocks
out_dir = runs/burgers
";

    #[test]
    fn parses_a_sweep() {
        let s = Config::parse(SAMPLE).unwrap().settings().unwrap();
        assert_eq!(s.plan.problem, ProblemId::BurgersStanding);
        assert_eq!((s.plan.m, s.plan.k_max, s.plan.levels), (16, 3, 3));
        assert_eq!(s.plan.policy, LevelPolicy::PlusPlus);
        assert_eq!((s.plan.s0, s.plan.s), (1e-2, 2.0));
        assert_eq!(s.out_dir, PathBuf::from("runs/burgers"));
        assert_eq!(s.plan.cweno, CwenoConfig::default());
        assert!(s.plan.validate().is_ok());
    }

    #[test]
    fn overrides_win() {
        let mut c = Config::parse(SAMPLE).unwrap();
        c.apply_overrides(["order=2", "eps_mode=const", "eps_const=1e-6"]).unwrap();
        let s = c.settings().unwrap();
        assert_eq!(s.plan.order, 2);
        assert_eq!(s.plan.cweno.epsilon, Epsilon::Constant(1e-6));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Config::parse("problem burgers").is_err());
        assert!(Config::parse("colour = blue").is_err());
        assert!(Config::parse("order = 3").unwrap().settings().is_err());
        assert!(Config::parse("problem = sod").unwrap().settings().is_err());
        assert!(Config::parse("problem = lintra1\norder = three").unwrap().settings().is_err());
        assert!(Config::parse("problem = lintra1\neps_mode = const").unwrap().settings().is_err());
    }

    #[test]
    fn single_run_resolution() {
        let s = Config::parse("problem = shu-osher\nN0 = 32\nlevels = 6").unwrap().settings().unwrap();
        assert_eq!((s.n0, s.plan.m), (Some(32), 32));
    }
}
