//! Multistart coordinate search over input covariances.
//!
//! A covariance over the active nodes is parameterized by a complex
//! lower-triangular factor `L` with unit-norm rows, so that `Q = D L Lᴴ D`
//! with `D = diag(sqrt(P))` meets every power constraint with equality. The
//! parameters are the off-diagonal entries of `L`; each diagonal entry is
//! `sqrt(1 - Σ|l|²)`, and rows whose off-diagonal part exceeds unit norm are
//! rescaled onto the boundary (full correlation). Independent inputs are the
//! origin. The search itself is derivative free: each sweep tries `±step`
//! along every coordinate and halves the step after a sweep without progress.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{CMatrix, C64};

/// Knobs for [`multistart`] and the bound maximizers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Cap on coordinate sweeps per restart.
    pub max_iters: usize,
    /// The search stops once the step falls below this value.
    pub tol: f64,
    pub seed: u64,
    /// 1-based `(i, j)` noise-covariance entries that the bound may choose
    /// freely; each is scanned over 11 points in `[-0.99, 0.99]` and the
    /// smallest maximized bound is kept.
    pub free_noise: Vec<[usize; 2]>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { restarts: 32, max_iters: 2000, tol: 1e-6, seed: 0, free_noise: Vec::new() }
    }
}

impl OptimizerConfig {
    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Maps a real parameter vector to a full-power covariance.
#[derive(Clone, Debug)]
pub struct CovarianceParam {
    power: Vec<f64>,
    active: Vec<usize>,
}

impl CovarianceParam {
    /// `active` lists the 0-based nodes whose correlations are optimized; every
    /// other node is independent at full power.
    pub fn new(power: Vec<f64>, active: Vec<usize>) -> Self {
        CovarianceParam { power, active }
    }

    pub fn n_params(&self) -> usize {
        let m = self.active.len();
        m * m.saturating_sub(1)
    }

    /// Row `r` owns the `2r` real parameters of its `r` off-diagonal entries.
    fn offset(row: usize) -> usize {
        row * row.saturating_sub(1)
    }

    /// All zeros: independent inputs.
    pub fn identity_start(&self) -> Vec<f64> {
        vec![0.0; self.n_params()]
    }

    pub fn random_start(&self, rng: &mut impl Rng) -> Vec<f64> {
        (0..self.n_params()).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    pub fn to_matrix(&self, x: &[f64]) -> CMatrix {
        let n = self.power.len();
        let m = self.active.len();
        let mut l = CMatrix::zeros(m, m);
        for r in 0..m {
            let base = Self::offset(r);
            for c in 0..r {
                l[(r, c)] = C64::new(x[base + 2 * c], x[base + 2 * c + 1]);
            }
            let off: f64 = (0..r).map(|c| l[(r, c)].norm_sqr()).sum();
            if off <= 1.0 {
                l[(r, r)] = C64::new((1.0 - off).sqrt(), 0.0);
            } else {
                let inv = off.sqrt().recip();
                for c in 0..r {
                    l[(r, c)] *= inv;
                }
            }
        }
        let corr = &l * l.adjoint();
        let mut q = CMatrix::zeros(n, n);
        for i in 0..n {
            q[(i, i)] = C64::new(self.power[i], 0.0);
        }
        for (a, &i) in self.active.iter().enumerate() {
            for (b, &j) in self.active.iter().enumerate() {
                let s = (self.power[i] * self.power[j]).sqrt();
                q[(i, j)] = if i == j { C64::new(self.power[i], 0.0) } else { corr[(a, b)] * s };
            }
        }
        q
    }
}

/// Gains smaller than this (relative) are rounding noise and do not count as
/// progress; otherwise flat optima keep the step from shrinking.
const IMPROVE_REL: f64 = 1e-12;

/// Result of one local search.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Maximizes `f` by coordinate search from `x0`. Non-finite objective values
/// count as `-inf`.
pub fn coordinate_search(
    f: impl Fn(&[f64]) -> f64,
    x0: Vec<f64>,
    step0: f64,
    max_iters: usize,
    tol: f64,
) -> SearchOutcome {
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let mut x = x0;
    let mut best = eval(&x);
    let mut step = step0;
    let mut iterations = 0;
    let mut converged = x.is_empty();
    while !converged && iterations < max_iters {
        iterations += 1;
        let mut improved = false;
        for j in 0..x.len() {
            let origin = x[j];
            for dir in [1.0, -1.0] {
                x[j] = origin + dir * step;
                let v = eval(&x);
                if v > best + IMPROVE_REL * best.abs().max(1.0) {
                    best = v;
                    improved = true;
                    break;
                }
                x[j] = origin;
            }
        }
        if !improved {
            step *= 0.5;
            converged = step < tol;
        }
    }
    SearchOutcome { x, value: best, iterations, converged }
}

/// Best result over all restarts.
#[derive(Clone, Debug)]
pub struct MultistartOutcome {
    pub q: CMatrix,
    pub value: f64,
    pub best_restart: usize,
    pub per_restart: Vec<f64>,
    pub iterations: usize,
    pub converged: usize,
}

/// Restart 0 starts from independent inputs, the rest from seeded random
/// factors. Restarts run in parallel; the reduction keeps the lowest-index
/// maximizer so the outcome does not depend on scheduling.
pub fn multistart<F>(param: &CovarianceParam, objective: F, cfg: &OptimizerConfig) -> MultistartOutcome
where
    F: Fn(&CMatrix) -> f64 + Sync,
{
    let restarts = cfg.restarts.max(1);
    let outcomes: Vec<SearchOutcome> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let x0 = if r == 0 {
                param.identity_start()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                param.random_start(&mut rng)
            };
            coordinate_search(|x| objective(&param.to_matrix(x)), x0, 0.5, cfg.max_iters, cfg.tol)
        })
        .collect();
    let mut best = 0;
    for (r, o) in outcomes.iter().enumerate() {
        if o.value > outcomes[best].value {
            best = r;
        }
    }
    MultistartOutcome {
        q: param.to_matrix(&outcomes[best].x),
        value: outcomes[best].value,
        best_restart: best,
        per_restart: outcomes.iter().map(|o| o.value).collect(),
        iterations: outcomes.iter().map(|o| o.iterations).sum(),
        converged: outcomes.iter().filter(|o| o.converged).count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    #[test]
    fn parameterized_covariance_meets_power_exactly() {
        let param = CovarianceParam::new(vec![2.0, 0.0, 0.5, 3.0], vec![0, 2, 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let q = param.to_matrix(&param.random_start(&mut rng));
            for (i, p) in [2.0, 0.0, 0.5, 3.0].into_iter().enumerate() {
                assert!((q[(i, i)].re - p).abs() < 1e-12);
            }
            assert!(linalg::is_psd(&q, 1e-12));
            assert_eq!(q[(1, 0)].norm(), 0.0);
        }
    }

    #[test]
    fn identity_start_is_independent() {
        let param = CovarianceParam::new(vec![1.0, 4.0], vec![0, 1]);
        let q = param.to_matrix(&param.identity_start());
        assert_eq!(q[(0, 1)].norm(), 0.0);
        assert_eq!(q[(1, 1)].re, 4.0);
    }

    #[test]
    fn search_finds_concave_maximum() {
        let out = coordinate_search(|x| -(x[0] - 0.3).powi(2) - (x[1] + 1.2).powi(2), vec![0.0, 0.0], 0.5, 2000, 1e-9);
        assert!(out.converged);
        assert!((out.x[0] - 0.3).abs() < 1e-6 && (out.x[1] + 1.2).abs() < 1e-6);
    }

    #[test]
    fn multistart_is_reproducible() {
        let param = CovarianceParam::new(vec![1.0, 1.0], vec![0, 1]);
        let obj = |q: &CMatrix| q[(0, 1)].re - 0.1 * q[(0, 1)].im.abs();
        let cfg = OptimizerConfig::default().with_restarts(4).with_seed(3);
        let a = multistart(&param, obj, &cfg);
        let b = multistart(&param, obj, &cfg);
        assert_eq!(a.per_restart, b.per_restart);
        assert!((a.value - 1.0).abs() < 1e-6);
    }
}
