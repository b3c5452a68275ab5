//! Catalog of test problems.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::HarnessError;
use crate::mesh::{Domain, Side};
use crate::physics::{Advection, BoundaryCondition, Boundaries, Burgers, Euler, Model, Swirl};
use crate::reconstruction::Vars;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemId {
    Lintra1,
    Lintra2,
    Swirl,
    BurgersStanding,
    BurgersMoving,
    ShuOsher,
    Riemann2d,
    ShockBubble,
    /// Upper half of the shock-bubble domain with a reflecting wall at `y = 0`.
    ShockBubbleHalf,
}

impl ProblemId {
    pub const ALL: [ProblemId; 9] = [
        ProblemId::Lintra1,
        ProblemId::Lintra2,
        ProblemId::Swirl,
        ProblemId::BurgersStanding,
        ProblemId::BurgersMoving,
        ProblemId::ShuOsher,
        ProblemId::Riemann2d,
        ProblemId::ShockBubble,
        ProblemId::ShockBubbleHalf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemId::Lintra1 => "lintra1",
            ProblemId::Lintra2 => "lintra2",
            ProblemId::Swirl => "swirl",
            ProblemId::BurgersStanding => "burgers-standing",
            ProblemId::BurgersMoving => "burgers-moving",
            ProblemId::ShuOsher => "shu-osher",
            ProblemId::Riemann2d => "riemann2d",
            ProblemId::ShockBubble => "shock-bubble",
            ProblemId::ShockBubbleHalf => "shock-bubble-half",
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProblemId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| HarnessError::UnknownProblem(s.to_string()))
    }
}

/// A fully specified initial-boundary value problem.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub id: ProblemId,
    pub law: Model,
    pub domain: Domain,
    pub bcs: Boundaries,
    pub t_final: f64,
}

const SHU_OSHER_LEFT: [f64; 3] = [3.857143, 2.629369, 10.333333];

const RIEMANN_STATES: [[f64; 4]; 4] = [
    // (ρ, u, v, p) for x<½,y<½ / x<½,y>½ / x>½,y<½ / x>½,y>½
    [0.8, 0.1, 0.1, 1.0],
    [1.0222, -0.6179, 0.1, 1.0],
    [1.0, 0.1, 0.8276, 1.0],
    [0.531, 0.1, 0.1, 0.4],
];

const BUBBLE_SHOCKED: [f64; 4] = [3.6666666666666666, 2.7136021011998722, 0.0, 10.0];
const BUBBLE_GAS: [f64; 4] = [0.1, 0.0, 0.0, 1.0];
const BUBBLE_AMBIENT: [f64; 4] = [1.0, 0.0, 0.0, 1.0];

/// Default final time of the 2D Riemann problem.
pub const RIEMANN_T_FINAL: f64 = 0.25;

/// Final time of the moving-shock Burgers problem.
pub const BURGERS_MOVING_T_FINAL: f64 = 0.55;

fn lintra1_u0(x: f64) -> f64 {
    (PI * x - (PI * x).sin() / PI).sin()
}

fn lintra2_u0(x: f64) -> f64 {
    (PI * x).sin() + 0.25 * (15.0 * PI * x).sin() * (-20.0 * x * x).exp()
}

/// Wraps `x` into `[lo, lo + len)`.
fn wrap(x: f64, lo: f64, len: f64) -> f64 {
    lo + (x - lo).rem_euclid(len)
}

impl Problem {
    pub fn new(id: ProblemId) -> Self {
        let euler1 = Model::Euler(Euler::new(1));
        let euler2 = Model::Euler(Euler::new(2));
        let (law, domain, bcs, t_final) = match id {
            ProblemId::Lintra1 | ProblemId::Lintra2 => (
                Model::Advection(Advection::new([1.0, 0.0])),
                Domain::interval(-1.0, 1.0).with_all_periodic(),
                Boundaries::periodic(),
                if id == ProblemId::Lintra1 { 1.0 } else { 2.0 },
            ),
            ProblemId::Swirl => (
                Model::Swirl(Swirl),
                Domain::rectangle([-4.0, -4.0], [4.0, 4.0]),
                Boundaries::uniform(BoundaryCondition::FreeFlow),
                4.0,
            ),
            ProblemId::BurgersStanding | ProblemId::BurgersMoving => (
                Model::Burgers(Burgers),
                Domain::interval(-1.0, 1.0).with_all_periodic(),
                Boundaries::periodic(),
                if id == ProblemId::BurgersStanding { 0.35 } else { BURGERS_MOVING_T_FINAL },
            ),
            ProblemId::ShuOsher => (
                euler1,
                Domain::interval(0.0, 1.0),
                Boundaries::uniform(BoundaryCondition::FreeFlow),
                0.2,
            ),
            ProblemId::Riemann2d => (
                euler2,
                Domain::rectangle([0.0, 0.0], [1.0, 1.0]),
                Boundaries::uniform(BoundaryCondition::FreeFlow),
                RIEMANN_T_FINAL,
            ),
            ProblemId::ShockBubble | ProblemId::ShockBubbleHalf => {
                let e = Euler::new(2);
                let y_lo = if id == ProblemId::ShockBubble { -0.5 } else { 0.0 };
                let bcs = Boundaries::uniform(BoundaryCondition::Reflecting)
                    .with(Side::XLo, BoundaryCondition::Dirichlet(e.from_primitive(&BUBBLE_SHOCKED)))
                    .with(Side::XHi, BoundaryCondition::FreeFlow);
                (euler2, Domain::rectangle([-0.1, y_lo], [1.6, 0.5]), bcs, 0.4)
            }
        };
        Problem {
            id,
            law,
            domain,
            bcs,
            t_final,
        }
    }

    pub fn dim(&self) -> usize {
        self.domain.dim
    }

    /// Initial conserved state at `x`.
    pub fn initial(&self, x: [f64; 2]) -> Vars {
        let scalar = |v: f64| [v, 0.0, 0.0, 0.0];
        match self.id {
            ProblemId::Lintra1 => scalar(lintra1_u0(x[0])),
            ProblemId::Lintra2 => scalar(lintra2_u0(x[0])),
            ProblemId::Swirl => scalar(-(0.5 * x[1]).tanh()),
            ProblemId::BurgersStanding | ProblemId::BurgersMoving => scalar(BurgersExact::new(self.id).u0(x[0])),
            ProblemId::ShuOsher => {
                let e = Euler::new(1);
                if x[0] <= 0.25 {
                    e.from_primitive(&SHU_OSHER_LEFT)
                } else {
                    e.from_primitive(&[1.0 + 0.2 * (16.0 * PI * x[0]).sin(), 0.0, 1.0])
                }
            }
            ProblemId::Riemann2d => {
                let k = 2 * (x[0] > 0.5) as usize + (x[1] > 0.5) as usize;
                Euler::new(2).from_primitive(&RIEMANN_STATES[k])
            }
            ProblemId::ShockBubble | ProblemId::ShockBubbleHalf => {
                let e = Euler::new(2);
                let w = if x[0] < 0.0 {
                    BUBBLE_SHOCKED
                } else if (x[0] - 0.3).hypot(x[1]) < 0.2 {
                    BUBBLE_GAS
                } else {
                    BUBBLE_AMBIENT
                };
                e.from_primitive(&w)
            }
        }
    }

    pub fn has_exact(&self) -> bool {
        matches!(
            self.id,
            ProblemId::Lintra1 | ProblemId::Lintra2 | ProblemId::Swirl | ProblemId::BurgersStanding | ProblemId::BurgersMoving
        )
    }

    /// Exact point value at time `t`, where known.
    pub fn exact(&self, t: f64, x: [f64; 2]) -> Option<Vars> {
        let scalar = |v: f64| Some([v, 0.0, 0.0, 0.0]);
        match self.id {
            ProblemId::Lintra1 => scalar(lintra1_u0(wrap(x[0] - t, -1.0, 2.0))),
            ProblemId::Lintra2 => scalar(lintra2_u0(wrap(x[0] - t, -1.0, 2.0))),
            ProblemId::Swirl => {
                let a = t * Swirl::angular_rate(x[0].hypot(x[1]));
                scalar(-(0.5 * x[1] * a.cos() - 0.5 * x[0] * a.sin()).tanh())
            }
            ProblemId::BurgersStanding | ProblemId::BurgersMoving => scalar(BurgersExact::new(self.id).value(x[0], t)),
            _ => None,
        }
    }

    /// Exact average over an interval at time `t`, for the 1D problems with a
    /// closed-form solution. Burgers averages are exact across shocks.
    pub fn exact_average_1d(&self, t: f64, a: f64, b: f64) -> Option<f64> {
        match self.id {
            ProblemId::BurgersStanding | ProblemId::BurgersMoving => Some(BurgersExact::new(self.id).average(a, b, t)),
            _ => None,
        }
    }
}

/// Entropy solution of Burgers' equation with smooth periodic data of zero
/// mean, from the Hopf-Lax formula
/// `Φ(x, t) = min_y [U₀(y) + (x − y)²/(2t)]`, `u = ∂Φ/∂x = (x − y*)/t`,
/// where `U₀` is a primitive of the initial data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BurgersExact {
    /// Coefficients `a_k` of `u₀ = Σ a_k·sin(kπx)`.
    modes: [(f64, f64); 2],
}

const HOPF_LAX_SAMPLES: usize = 4096;

impl BurgersExact {
    pub fn new(id: ProblemId) -> Self {
        let modes = match id {
            ProblemId::BurgersMoving => [(-1.0, 1.0), (0.2, 5.0)],
            _ => [(-1.0, 1.0), (0.0, 5.0)],
        };
        BurgersExact { modes }
    }

    pub fn u0(&self, x: f64) -> f64 {
        self.modes.iter().map(|&(a, k)| a * (k * PI * x).sin()).sum()
    }

    fn du0(&self, x: f64) -> f64 {
        self.modes.iter().map(|&(a, k)| a * k * PI * (k * PI * x).cos()).sum()
    }

    fn primitive(&self, x: f64) -> f64 {
        self.modes.iter().map(|&(a, k)| -a * (k * PI * x).cos() / (k * PI)).sum()
    }

    fn max_speed(&self) -> f64 {
        self.modes.iter().map(|m| m.0.abs()).sum()
    }

    /// `(y*, Φ(x, t))`.
    fn minimize(&self, x: f64, t: f64) -> (f64, f64) {
        let g = |y: f64| self.primitive(y) + (x - y) * (x - y) / (2.0 * t);
        let dg = |y: f64| self.u0(y) - (x - y) / t;
        let reach = self.max_speed() * t * 1.01 + 1e-12;
        let (lo, hi) = (x - reach, x + reach);
        let n = HOPF_LAX_SAMPLES;
        let dy = (hi - lo) / n as f64;
        let vals: Vec<f64> = (0..=n).map(|i| g(lo + i as f64 * dy)).collect();
        let mut best = (lo, f64::INFINITY);
        for i in 0..=n {
            let left = if i > 0 { vals[i - 1] } else { f64::INFINITY };
            let right = if i < n { vals[i + 1] } else { f64::INFINITY };
            if vals[i] > left || vals[i] > right {
                continue;
            }
            // safeguarded Newton on G' within the bracket around the sample
            let (mut a, mut b) = ((lo + (i as f64 - 1.0) * dy).max(lo), (lo + (i as f64 + 1.0) * dy).min(hi));
            let mut y = lo + i as f64 * dy;
            if dg(a) < 0.0 && dg(b) > 0.0 {
                for _ in 0..100 {
                    let d = dg(y);
                    if d < 0.0 {
                        a = y;
                    } else {
                        b = y;
                    }
                    let step = d / (self.du0(y) + 1.0 / t);
                    let mut next = y - step;
                    if !(next > a && next < b) {
                        next = 0.5 * (a + b);
                    }
                    if (next - y).abs() <= 1e-16 * (1.0 + y.abs()) {
                        y = next;
                        break;
                    }
                    y = next;
                }
            }
            let v = g(y);
            if v < best.1 {
                best = (y, v);
            }
        }
        best
    }

    pub fn value(&self, x: f64, t: f64) -> f64 {
        if t <= 0.0 {
            return self.u0(x);
        }
        let (y, _) = self.minimize(x, t);
        (x - y) / t
    }

    /// `Φ(x, t)`, a primitive in `x` of the solution.
    pub fn potential(&self, x: f64, t: f64) -> f64 {
        if t <= 0.0 {
            return self.primitive(x);
        }
        self.minimize(x, t).1
    }

    /// Exact average over `[a, b]` at time `t`.
    pub fn average(&self, a: f64, b: f64, t: f64) -> f64 {
        (self.potential(b, t) - self.potential(a, t)) / (b - a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::ConservationLaw;

    #[test]
    fn names_round_trip() {
        for id in ProblemId::ALL {
            assert_eq!(id.name().parse::<ProblemId>().unwrap(), id);
        }
        assert!(matches!("sod".parse::<ProblemId>(), Err(HarnessError::UnknownProblem(_))));
    }

    #[test]
    fn lintra1_returns_after_one_period_shift() {
        let p = Problem::new(ProblemId::Lintra1);
        for x in [-0.9, -0.3, 0.2, 0.75] {
            let want = lintra1_u0(wrap(x - 1.0, -1.0, 2.0));
            assert_eq!(p.exact(1.0, [x, 0.0]).unwrap()[0], want);
            let shifted = if x - 1.0 < -1.0 { x + 1.0 } else { x - 1.0 };
            assert!((want - lintra1_u0(shifted)).abs() < 1e-15);
        }
    }

    #[test]
    fn swirl_exact_at_final_time() {
        let p = Problem::new(ProblemId::Swirl);
        let (x, y) = (1.3, -0.7);
        let r = (x * x + y * y as f64).sqrt();
        let f = r.tanh() / r.cosh().powi(2);
        let a = 4.0 * f / (0.385 * r);
        let want = -(y / 2.0 * a.cos() - x / 2.0 * a.sin()).tanh();
        assert!((p.exact(4.0, [x, y]).unwrap()[0] - want).abs() < 1e-14);
        assert_eq!(p.exact(0.0, [x, y]).unwrap(), p.initial([x, y]));
    }

    #[test]
    fn riemann_lower_left_state() {
        let p = Problem::new(ProblemId::Riemann2d);
        let e = Euler::new(2);
        let w = e.to_primitive(&p.initial([0.2, 0.3]));
        for (got, want) in w.iter().zip([0.8, 0.1, 0.1, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn shock_bubble_layout() {
        let full = Problem::new(ProblemId::ShockBubble);
        let half = Problem::new(ProblemId::ShockBubbleHalf);
        assert_eq!(full.domain.lo, [-0.1, -0.5]);
        assert_eq!(half.domain.lo, [-0.1, 0.0]);
        assert_eq!(half.bcs.get(Side::YLo), BoundaryCondition::Reflecting);
        assert!(matches!(full.bcs.get(Side::XLo), BoundaryCondition::Dirichlet(_)));
        assert_eq!(full.initial([0.3, 0.1])[0], 0.1);
        assert_eq!(full.initial([0.3, 0.25])[0], 1.0);
        for p in [&full, &half] {
            p.bcs.validate(&p.law, &p.domain).unwrap();
            assert!(p.law.admissible(&p.initial([-0.05, 0.2])));
        }
    }

    /// Standing shock: for `x > 0` the solution is `u₀(ξ)` on the rightmost
    /// characteristic `ξ − t·sin(πξ) = x`, solved by bisection.
    fn characteristic_standing(x: f64, t: f64) -> f64 {
        let s = x.signum();
        let x = x.abs();
        let xi_m = (1.0 / (PI * t)).acos() / PI;
        let (mut a, mut b) = (xi_m, 1.0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m - t * (PI * m).sin() < x {
                a = m;
            } else {
                b = m;
            }
        }
        -s * (PI * a).sin()
    }

    #[test]
    fn hopf_lax_matches_characteristics() {
        let ex = BurgersExact::new(ProblemId::BurgersStanding);
        for x in [-0.9, -0.5, -0.05, -1e-3, 1e-3, 0.02, 0.4, 0.8, 0.99] {
            let got = ex.value(x, 0.35);
            assert!((got - characteristic_standing(x, 0.35)).abs() < 1e-10, "x = {x}");
        }
        // the average over a cell straddling the shock is the mean of the two
        // smooth branches
        let h = 0.01;
        let avg = ex.average(-h, h, 0.35);
        assert!(avg.abs() < 1e-13);
        let (x, w) = crate::quadrature::gauss_legendre_unit(12);
        let right: f64 = x.iter().zip(&w).map(|(t, w)| w * characteristic_standing(t * h, 0.35)).sum();
        assert!((ex.average(0.0, h, 0.35) - right).abs() < 1e-12);
    }

    #[test]
    fn hopf_lax_before_breaking_is_the_smooth_solution() {
        let ex = BurgersExact::new(ProblemId::BurgersMoving);
        let t = 0.05;
        for xi in [-0.7, -0.2, 0.1, 0.45] {
            let x = xi + t * ex.u0(xi);
            assert!((ex.value(x, t) - ex.u0(xi)).abs() < 1e-11);
        }
        let total = ex.average(-1.0, 1.0, 0.35);
        assert!(total.abs() < 1e-13);
    }
}
