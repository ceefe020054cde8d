//! Random instances and an entropy oracle shared by the integration tests.
//!
//! The oracle assembles the joint covariance of `(X_1..X_n, Y_1..Y_n)` from
//! its block formula and computes conditional entropies by an explicit
//! Schur complement and LU determinant. It shares no code with the library
//! engine, which works on square-root factors.
#![allow(dead_code)]

use std::f64::consts::{E, PI};

use coopifc::bounds::InputCovariance;
use coopifc::model::ChannelParams;
use coopifc::{CMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
    })
}

/// `G Gᴴ` with `G` of size `n x rank`.
pub fn random_psd(rng: &mut impl Rng, n: usize, rank: usize) -> CMatrix {
    let g = random_matrix(rng, n, rank, 1.0);
    &g * g.adjoint()
}

/// Full-rank covariance with `Q[i][i] = u_i P_i`, `u_i ∈ [0.5, 1]`; nodes with
/// zero power get zero rows.
pub fn random_input_cov(rng: &mut impl Rng, p: &[f64]) -> CMatrix {
    let n = p.len();
    let m = random_psd(rng, n, n) + CMatrix::identity(n, n) * C64::new(0.1, 0.0);
    let scale: Vec<f64> = (0..n)
        .map(|i| (p[i] * rng.random_range(0.5..1.0) / m[(i, i)].re).sqrt())
        .collect();
    CMatrix::from_fn(n, n, |r, c| m[(r, c)] * scale[r] * scale[c])
}

/// Unit-diagonal positive definite matrix, block diagonal over `blocks`
/// (consecutive sizes summing to `n`).
pub fn random_noise(rng: &mut impl Rng, blocks: &[usize]) -> CMatrix {
    let n: usize = blocks.iter().sum();
    let mut out = CMatrix::identity(n, n);
    let mut at = 0;
    for &b in blocks {
        let m = random_psd(rng, b, b) + CMatrix::identity(b, b);
        let mix = rng.random_range(0.0..0.9);
        for r in 0..b {
            for c in 0..b {
                if r != c {
                    let corr = m[(r, c)] / (m[(r, r)].re * m[(c, c)].re).sqrt();
                    out[(at + r, at + c)] = corr * mix;
                }
            }
        }
        at += b;
    }
    out
}

/// Random `K`-pair channel with zero self-gains, powers in `[0.1, 10]`,
/// gains up to `gain` in magnitude and fully correlated noise.
pub fn random_channel(rng: &mut impl Rng, k: usize, gain: f64) -> ChannelParams {
    let n = 2 * k;
    let mut h = random_matrix(rng, n, n, gain);
    for i in 0..n {
        h[(i, i)] = C64::new(0.0, 0.0);
    }
    let p: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..10.0)).collect();
    let c: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
    ChannelParams::new(k, h, p, random_noise(rng, &[n]), c).unwrap()
}

pub fn random_q(rng: &mut impl Rng, ch: &ChannelParams) -> InputCovariance {
    InputCovariance::for_channel(random_input_cov(rng, &ch.p), ch).unwrap()
}

/// Variable index into the oracle's joint covariance (1-based node numbers).
#[derive(Clone, Copy, Debug)]
pub enum V {
    X(usize),
    Y(usize),
}

pub struct Oracle {
    n: usize,
    m: CMatrix,
}

impl Oracle {
    pub fn new(ch: &ChannelParams, q: &InputCovariance) -> Self {
        let n = ch.n_nodes();
        let q = q.matrix();
        let hq = &ch.h * q;
        let yy = &hq * ch.h.adjoint() + &ch.sigma_z;
        let mut m = CMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(q);
        m.view_mut((n, 0), (n, n)).copy_from(&hq);
        m.view_mut((0, n), (n, n)).copy_from(&hq.adjoint());
        m.view_mut((n, n), (n, n)).copy_from(&yy);
        Oracle { n, m }
    }

    /// Oracle over an arbitrary covariance of `2n` variables ordered
    /// `X_1..X_n, Y_1..Y_n`.
    pub fn from_matrix(m: CMatrix) -> Self {
        Oracle { n: m.nrows() / 2, m }
    }

    fn idx(&self, v: V) -> usize {
        match v {
            V::X(i) => i - 1,
            V::Y(i) => self.n + i - 1,
        }
    }

    fn block(&self, a: &[V], b: &[V]) -> CMatrix {
        CMatrix::from_fn(a.len(), b.len(), |r, c| self.m[(self.idx(a[r]), self.idx(b[c]))])
    }

    /// `h(t | g)` in bits; `g` must have a nonsingular covariance.
    pub fn h(&self, t: &[V], g: &[V]) -> f64 {
        let mut s = self.block(t, t);
        if !g.is_empty() {
            let inv = self.block(g, g).try_inverse().expect("conditioning block is singular");
            s -= self.block(t, g) * inv * self.block(g, t);
        }
        t.len() as f64 * (PI * E).log2() + s.determinant().re.log2()
    }

    /// `I(a; b | c) = h(b | c) - h(b | a, c)`.
    pub fn mi(&self, a: &[V], b: &[V], c: &[V]) -> f64 {
        let ac: Vec<V> = a.iter().chain(c).copied().collect();
        self.h(b, c) - self.h(b, &ac)
    }
}
