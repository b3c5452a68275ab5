/// Explicit Runge-Kutta scheme in Butcher form with a strictly lower
/// triangular `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct RkScheme {
    pub order: usize,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl RkScheme {
    /// Three-stage third-order SSP scheme.
    pub fn ssp3() -> Self {
        RkScheme {
            order: 3,
            a: vec![vec![], vec![1.0], vec![0.25, 0.25]],
            b: vec![1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
        }
    }

    /// Heun's method, the two-stage second-order SSP scheme.
    pub fn heun() -> Self {
        RkScheme {
            order: 2,
            a: vec![vec![], vec![1.0]],
            b: vec![0.5, 0.5],
        }
    }

    /// The scheme paired with a reconstruction of order `r`.
    pub fn for_order(r: usize) -> Self {
        if r >= 3 {
            Self::ssp3()
        } else {
            Self::heun()
        }
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// Abscissa `c_i = Σ_k a_ik`.
    pub fn c(&self, i: usize) -> f64 {
        self.a[i].iter().sum()
    }

    /// One step of `y' = f(y)` for a plain vector system.
    pub fn step_ode(&self, y: &[f64], dt: f64, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Vec<f64> {
        let mut k: Vec<Vec<f64>> = Vec::with_capacity(self.stages());
        for i in 0..self.stages() {
            let mut yi = y.to_vec();
            for (kk, &a) in k.iter().zip(&self.a[i]) {
                for (v, d) in yi.iter_mut().zip(kk) {
                    *v += dt * a * d;
                }
            }
            k.push(f(&yi));
        }
        let mut out = y.to_vec();
        for (kk, &b) in k.iter().zip(&self.b) {
            for (v, d) in out.iter_mut().zip(kk) {
                *v += dt * b * d;
            }
        }
        out
    }
}
