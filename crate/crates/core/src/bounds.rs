//! Cut-set and sum-rate outer bounds for the two-pair cooperative channel,
//! evaluated over jointly Gaussian inputs.
//!
//! Every bound is `in-band mutual information + out-of-band budget`. The
//! in-band part is computed exactly by [`crate::gaussinfo`] for a given input
//! covariance; [`maximize`] searches the covariance, and [`sum_rate_upper`]
//! combines the separately maximized bounds into a sum-rate upper bound.
//!
//! Bound identifiers for two pairs (sources 1, 2; destinations 3, 4):
//!
//! | id         | bound                                            |
//! |------------|--------------------------------------------------|
//! | `CutR1a`   | `R1 <= I(X1,X2,X4; Y3 | X3)`                     |
//! | `CutR1b`   | `R1 <= I(X1,X4; Y2,Y3 | X2,X3)`                  |
//! | `CutR1c`   | `R1 <= I(X1; Y2,Y3,Y4 | X2,X3,X4)`               |
//! | `CutR2a`   | `R2 <= I(X1,X2,X3; Y4 | X4)`                     |
//! | `CutR2b`   | `R2 <= I(X2,X3; Y1,Y4 | X4,X1)`                  |
//! | `CutR2c`   | `R2 <= I(X2; Y1,Y3,Y4 | X4,X1,X3)`               |
//! | `CutSum`   | `R1+R2 <= I(X1,X2; Y3,Y4 | X4,X3)`               |
//! | `Thm2a`    | `R1+R2 <= I(X1; Y3,Y2 | Y4,X2,X3,X4) + I(X1,X2,X3; Y4 | X4)` |
//! | `Thm2b`    | `R1+R2 <= I(X2; Y4,Y1 | Y3,X1,X3,X4) + I(X1,X2,X4; Y3 | X3)` |
//! | `MimoUltimate` | `R1+R2 <= max log2 det(I + H_d Q H_dᴴ) + C3 + C4` |
//!
//! `Thm2b` is obtained from `Thm2a` by exchanging the user pairs.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::gaussinfo::{joint_covariance, mutual_info, VarSet};
use crate::linalg;
use crate::model::ChannelParams;
use crate::optimize::{multistart, CovarianceParam, OptimizerConfig};
use crate::{CMatrix, Error, Result, C64};

/// Joint covariance of the channel inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct InputCovariance {
    q: CMatrix,
}

impl InputCovariance {
    /// Hermitian PSD to `1e-9`.
    pub fn new(q: CMatrix) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::DimensionMismatch { expected: q.nrows(), found: q.ncols() });
        }
        if !linalg::is_hermitian(&q, 1e-9) {
            return Err(Error::InvalidParams("input covariance is not Hermitian".into()));
        }
        if !linalg::is_psd(&q, 1e-9) {
            return Err(Error::NotPsd { min_eigenvalue: linalg::min_eigenvalue(&q) });
        }
        Ok(InputCovariance { q })
    }

    /// Additionally enforces `Q[i][i] <= P[i]`.
    pub fn for_channel(q: CMatrix, ch: &ChannelParams) -> Result<Self> {
        let cov = Self::new(q)?;
        cov.check_power(&ch.p)?;
        Ok(cov)
    }

    pub fn check_power(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.q.nrows() {
            return Err(Error::DimensionMismatch { expected: p.len(), found: self.q.nrows() });
        }
        for (i, &budget) in p.iter().enumerate() {
            let value = self.q[(i, i)].re;
            if value > budget + 1e-9 * budget.max(1.0) {
                return Err(Error::PowerExceeded { node: i + 1, value, budget });
            }
        }
        Ok(())
    }

    /// Independent inputs with the given powers.
    pub fn diagonal(p: &[f64]) -> Self {
        let n = p.len();
        InputCovariance { q: CMatrix::from_fn(n, n, |r, c| if r == c { C64::new(p[r], 0.0) } else { C64::new(0.0, 0.0) }) }
    }

    pub fn zeros(n: usize) -> Self {
        InputCovariance { q: CMatrix::zeros(n, n) }
    }

    pub(crate) fn from_trusted(q: CMatrix) -> Self {
        InputCovariance { q }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.q
    }

    /// Relabels nodes: node `i` becomes node `perm[i]` (0-based).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.q.nrows();
        let mut q = CMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                q[(perm[r], perm[c])] = self.q[(r, c)];
            }
        }
        InputCovariance { q }
    }

    pub fn swap_users(&self) -> Self {
        self.permuted(&[1, 0, 3, 2])
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(s)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("covariance must be square".into()));
        }
        Self::new(CMatrix::from_fn(n, n, |r, c| C64::new(rows[r][c][0], rows[r][c][1])))
    }
}

impl Serialize for InputCovariance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.q.nrows())
            .map(|r| (0..self.q.ncols()).map(|c| [self.q[(r, c)].re, self.q[(r, c)].im]).collect())
            .collect();
        rows.serialize(s)
    }
}

/// A network cut: the node set `S` on the transmitting side (1-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CutSpec {
    nodes: BTreeSet<usize>,
    n_nodes: usize,
}

impl CutSpec {
    /// Requires `∅ ⊊ S ⊊ [1..n_nodes]`.
    pub fn new(nodes: impl IntoIterator<Item = usize>, n_nodes: usize) -> Result<Self> {
        let nodes: BTreeSet<usize> = nodes.into_iter().collect();
        if nodes.is_empty() {
            return Err(Error::InvalidCut("S is empty".into()));
        }
        if let Some(&bad) = nodes.iter().find(|&&i| i == 0 || i > n_nodes) {
            return Err(Error::InvalidCut(format!("node {bad} outside 1..={n_nodes}")));
        }
        if nodes.len() == n_nodes {
            return Err(Error::InvalidCut("S contains every node".into()));
        }
        Ok(CutSpec { nodes, n_nodes })
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().copied()
    }

    pub fn complement(&self) -> Vec<usize> {
        (1..=self.n_nodes).filter(|i| !self.nodes.contains(i)).collect()
    }

    /// `I(X(S); Y(Sᶜ) | X(Sᶜ))` as a single term.
    fn term(&self) -> MiTerm {
        let s: Vec<usize> = self.nodes().collect();
        let sc = self.complement();
        MiTerm { a: VarSet::xs(&s), b: VarSet::ys(&sc), c: VarSet::xs(&sc) }
    }
}

impl fmt::Display for CutSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.nodes().map(|i| i.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

/// Identity of an evaluated bound; see the module docs for the table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BoundId {
    CutR1a,
    CutR1b,
    CutR1c,
    CutR2a,
    CutR2b,
    CutR2c,
    CutSum,
    Thm2a,
    Thm2b,
    GenericCut(CutSpec),
    MimoUltimate,
}

impl BoundId {
    pub const CUTSET: [BoundId; 7] = [
        BoundId::CutR1a,
        BoundId::CutR1b,
        BoundId::CutR1c,
        BoundId::CutR2a,
        BoundId::CutR2b,
        BoundId::CutR2c,
        BoundId::CutSum,
    ];

    pub const SUM_RATE: [BoundId; 2] = [BoundId::Thm2a, BoundId::Thm2b];

    /// All named bounds used by [`sum_rate_upper`].
    pub fn named() -> Vec<BoundId> {
        let mut v = Self::CUTSET.to_vec();
        v.extend(Self::SUM_RATE);
        v.push(BoundId::MimoUltimate);
        v
    }

    pub fn label(&self) -> String {
        match self {
            BoundId::CutR1a => "cut-r1a".into(),
            BoundId::CutR1b => "cut-r1b".into(),
            BoundId::CutR1c => "cut-r1c".into(),
            BoundId::CutR2a => "cut-r2a".into(),
            BoundId::CutR2b => "cut-r2b".into(),
            BoundId::CutR2c => "cut-r2c".into(),
            BoundId::CutSum => "cut-sum".into(),
            BoundId::Thm2a => "thm2a".into(),
            BoundId::Thm2b => "thm2b".into(),
            BoundId::GenericCut(cut) => format!("cut:{cut}"),
            BoundId::MimoUltimate => "mimo-ultimate".into(),
        }
    }

    /// The cut realizing a named cut-set bound.
    pub fn cut(&self) -> Option<CutSpec> {
        let nodes: &[usize] = match self {
            BoundId::CutR1a => &[1, 2, 4],
            BoundId::CutR1b => &[1, 4],
            BoundId::CutR1c => &[1],
            BoundId::CutR2a => &[1, 2, 3],
            BoundId::CutR2b => &[2, 3],
            BoundId::CutR2c => &[2],
            BoundId::CutSum => &[1, 2],
            BoundId::GenericCut(cut) => return Some(cut.clone()),
            _ => return None,
        };
        Some(CutSpec::new(nodes.iter().copied(), 4).expect("valid named cut"))
    }

    fn needs_two_pairs(&self) -> bool {
        !matches!(self, BoundId::GenericCut(_))
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("cut:") {
            let nodes = rest
                .split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| Error::InvalidCut(format!("bad node '{t}'"))))
                .collect::<Result<Vec<_>>>()?;
            // The node count is unknown here; it is re-checked at evaluation.
            let n = nodes.iter().copied().max().unwrap_or(0).max(4) + 1;
            return Ok(BoundId::GenericCut(CutSpec::new(nodes, n)?));
        }
        BoundId::named()
            .into_iter()
            .find(|b| b.label() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown bound '{s}'")))
    }
}

impl Serialize for BoundId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for BoundId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `I(a; b | c)`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct MiTerm {
    pub a: VarSet,
    pub b: VarSet,
    pub c: VarSet,
}

fn mi(a: &[usize], b: &[usize], c_y: &[usize], c_x: &[usize]) -> MiTerm {
    MiTerm { a: VarSet::xs(a), b: VarSet::ys(b), c: VarSet::ys(c_y).union(&VarSet::xs(c_x)) }
}

/// In-band mutual-information terms of a bound; `None` for the MIMO limit.
pub(crate) fn terms(id: &BoundId) -> Option<Vec<MiTerm>> {
    match id {
        BoundId::Thm2a => Some(vec![mi(&[1], &[3, 2], &[4], &[2, 3, 4]), mi(&[1, 2, 3], &[4], &[], &[4])]),
        BoundId::Thm2b => Some(vec![mi(&[2], &[4, 1], &[3], &[1, 3, 4]), mi(&[1, 2, 4], &[3], &[], &[3])]),
        BoundId::MimoUltimate => None,
        other => Some(vec![other.cut().expect("cut bound").term()]),
    }
}

/// Out-of-band entropy charged to a bound.
///
/// With explicit budgets on the channel, the second cut of each user charges
/// `delta1_bits` and the third cut and both sum-rate bounds charge
/// `delta2_bits`. Otherwise, and for the remaining bounds, every output the
/// bound observes contributes its capacity `C_ℓ`.
pub fn oob_budget(ch: &ChannelParams, id: &BoundId) -> f64 {
    if let Some(b) = ch.budget {
        match id {
            BoundId::CutR1b | BoundId::CutR2b => return b.delta1_bits,
            BoundId::CutR1c | BoundId::CutR2c | BoundId::Thm2a | BoundId::Thm2b => return b.delta2_bits,
            _ => {}
        }
    }
    let observed: BTreeSet<usize> = match terms(id) {
        Some(ts) => ts
            .iter()
            .flat_map(|t| t.b.vars().iter().chain(t.c.vars()))
            .filter(|v| !v.is_input())
            .map(|v| v.node())
            .collect(),
        None => (ch.k + 1..=ch.n_nodes()).collect(),
    };
    observed.into_iter().filter(|&l| l <= ch.c.len()).map(|l| ch.c[l - 1]).sum()
}

/// One evaluated bound right-hand side, in bits per channel use.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundValue {
    pub id: BoundId,
    pub inband_bits: f64,
    pub oob_budget_bits: f64,
    pub total_bits: f64,
}

fn check_ids(ch: &ChannelParams, id: &BoundId) -> Result<()> {
    if id.needs_two_pairs() && ch.k != 2 {
        return Err(Error::InvalidParams(format!("bound {id} is defined for two user pairs, got K={}", ch.k)));
    }
    if let BoundId::GenericCut(cut) = id {
        if let Some(bad) = cut.nodes().find(|&i| i > ch.n_nodes()) {
            return Err(Error::InvalidCut(format!("node {bad} outside 1..={}", ch.n_nodes())));
        }
    }
    Ok(())
}

/// The fully cooperative MIMO mutual information
/// `log2 det(Σ_d + H_ds Q_s H_dsᴴ) - log2 det(Σ_d)` from sources to
/// destinations, evaluated as `I(X_sources; Y_destinations)` with the
/// destination inputs silenced.
fn mimo_inband(ch: &ChannelParams, q: &InputCovariance) -> Result<f64> {
    let k = ch.k;
    let n = ch.n_nodes();
    let mut qs = q.matrix().clone();
    for i in k..n {
        qs.row_mut(i).fill(C64::new(0.0, 0.0));
        qs.column_mut(i).fill(C64::new(0.0, 0.0));
    }
    let jc = joint_covariance(ch, &InputCovariance::from_trusted(qs))?;
    let src: Vec<usize> = (1..=k).collect();
    let dst: Vec<usize> = (k + 1..=n).collect();
    mutual_info(&jc, &VarSet::xs(&src), &VarSet::ys(&dst), &VarSet::empty())
}

fn inband(ch: &ChannelParams, q: &InputCovariance, id: &BoundId) -> Result<f64> {
    match terms(id) {
        None => mimo_inband(ch, q),
        Some(ts) => {
            let jc = joint_covariance(ch, q)?;
            ts.iter().map(|t| mutual_info(&jc, &t.a, &t.b, &t.c)).sum()
        }
    }
}

/// Evaluates one bound at a fixed input covariance.
pub fn eval_bound(ch: &ChannelParams, q: &InputCovariance, id: &BoundId) -> Result<BoundValue> {
    check_ids(ch, id)?;
    let inband_bits = inband(ch, q, id)?;
    let oob_budget_bits = oob_budget(ch, id);
    Ok(BoundValue { id: id.clone(), inband_bits, oob_budget_bits, total_bits: inband_bits + oob_budget_bits })
}

/// The seven cut-set bounds in [`BoundId::CUTSET`] order.
pub fn eval_cutset(ch: &ChannelParams, q: &InputCovariance) -> Result<Vec<BoundValue>> {
    BoundId::CUTSET.iter().map(|id| eval_bound(ch, q, id)).collect()
}

/// `[Thm2a, Thm2b]`.
pub fn eval_thm2(ch: &ChannelParams, q: &InputCovariance) -> Result<Vec<BoundValue>> {
    BoundId::SUM_RATE.iter().map(|id| eval_bound(ch, q, id)).collect()
}

/// `I(X(S); Y(Sᶜ) | X(Sᶜ))` plus the capacities of the out-of-band links
/// received in `Sᶜ`. Works for any number of pairs.
pub fn eval_generic_cut(ch: &ChannelParams, q: &InputCovariance, cut: &CutSpec) -> Result<BoundValue> {
    eval_bound(ch, q, &BoundId::GenericCut(cut.clone()))
}

/// Summary of a bound maximization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizerTrace {
    /// Coordinate sweeps summed over restarts (and noise grid points).
    pub iterations: usize,
    pub restarts: usize,
    pub best_restart: usize,
    pub best_per_restart: Vec<f64>,
    pub converged_restarts: usize,
    /// Chosen values of the free noise entries, when any were declared.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_offdiag: Option<Vec<f64>>,
}

/// A maximized bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub id: BoundId,
    pub inband_bits: f64,
    pub oob_budget_bits: f64,
    pub total_bits: f64,
    #[serde(rename = "Q_star")]
    pub q_star: InputCovariance,
    pub optimizer_trace: OptimizerTrace,
}

const NOISE_GRID: usize = 11;
const NOISE_LIMIT: f64 = 0.99;

fn noise_grid_points(free: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..NOISE_GRID)
        .map(|i| -NOISE_LIMIT + 2.0 * NOISE_LIMIT * i as f64 / (NOISE_GRID - 1) as f64)
        .collect();
    let mut points = vec![Vec::new()];
    for _ in 0..free {
        points = points
            .into_iter()
            .flat_map(|p| axis.iter().map(move |&v| {
                let mut p = p.clone();
                p.push(v);
                p
            }))
            .collect();
    }
    points
}

fn with_noise(ch: &ChannelParams, entries: &[[usize; 2]], values: &[f64]) -> Result<ChannelParams> {
    let mut out = ch.clone();
    for (&[i, j], &v) in entries.iter().zip(values) {
        if i == 0 || j == 0 || i > ch.n_nodes() || j > ch.n_nodes() || i == j {
            return Err(Error::InvalidParams(format!("free noise entry ({i},{j}) is not an off-diagonal entry")));
        }
        out.sigma_z[(i - 1, j - 1)] = C64::new(v, 0.0);
        out.sigma_z[(j - 1, i - 1)] = C64::new(v, 0.0);
    }
    Ok(out)
}

fn maximize_fixed_noise(ch: &ChannelParams, id: &BoundId, cfg: &OptimizerConfig) -> (InputCovariance, crate::optimize::MultistartOutcome) {
    let n = ch.n_nodes();
    let candidates: Vec<usize> = match id {
        BoundId::MimoUltimate => (0..ch.k).collect(),
        _ => (0..n).collect(),
    };
    let active = candidates.into_iter().filter(|&i| ch.p[i] > 0.0).collect();
    let param = CovarianceParam::new(ch.p.clone(), active);
    let objective = |q: &CMatrix| {
        inband(ch, &InputCovariance::from_trusted(q.clone()), id).unwrap_or(f64::NEG_INFINITY)
    };
    let out = multistart(&param, objective, cfg);
    (InputCovariance::from_trusted(out.q.clone()), out)
}

/// Approximately maximizes a bound over full-power Gaussian input covariances.
///
/// Declared free noise entries are scanned on a grid and the smallest
/// maximized value is reported, since any admissible noise correlation yields
/// a valid bound.
pub fn maximize(ch: &ChannelParams, id: &BoundId, cfg: &OptimizerConfig) -> Result<BoundReport> {
    check_ids(ch, id)?;
    let grid = noise_grid_points(cfg.free_noise.len());
    let mut best: Option<(f64, InputCovariance, OptimizerTrace)> = None;
    let mut iterations = 0;
    for values in grid {
        let trial = with_noise(ch, &cfg.free_noise, &values)?;
        if !cfg.free_noise.is_empty() && linalg::min_eigenvalue(&trial.sigma_z) <= 1e-9 {
            continue;
        }
        let (q, out) = maximize_fixed_noise(&trial, id, cfg);
        if !out.value.is_finite() {
            // Every trial point failed; report why at the starting point.
            inband(&trial, &q, id)?;
            return Err(Error::Degenerate { eigenvalue: f64::NAN });
        }
        iterations += out.iterations;
        if best.as_ref().is_none_or(|(v, _, _)| out.value < *v) {
            let trace = OptimizerTrace {
                iterations: 0,
                restarts: out.per_restart.len(),
                best_restart: out.best_restart,
                best_per_restart: out.per_restart,
                converged_restarts: out.converged,
                noise_offdiag: (!cfg.free_noise.is_empty()).then(|| values.clone()),
            };
            best = Some((out.value, q, trace));
        }
    }
    let (inband_bits, q_star, mut optimizer_trace) =
        best.ok_or_else(|| Error::InvalidParams("no admissible noise covariance on the grid".into()))?;
    optimizer_trace.iterations = iterations;
    let oob_budget_bits = oob_budget(ch, id);
    Ok(BoundReport {
        id: id.clone(),
        inband_bits,
        oob_budget_bits,
        total_bits: inband_bits + oob_budget_bits,
        q_star,
        optimizer_trace,
    })
}

/// Fully cooperative sum-rate limit: MIMO capacity from the sources to the
/// destinations under per-antenna power constraints, plus `C3 + C4`.
pub fn mimo_ultimate(ch: &ChannelParams, cfg: &OptimizerConfig) -> Result<f64> {
    Ok(maximize(ch, &BoundId::MimoUltimate, cfg)?.total_bits)
}

/// One candidate sum-rate bound: a sum-rate bound or a sum of one bound on
/// each user's rate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumRateTerm {
    pub label: String,
    pub bits: f64,
}

/// Sum-rate upper bound with its breakdown.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumRateReport {
    pub headline_bits: f64,
    pub binding: String,
    pub constituents: Vec<SumRateTerm>,
    pub reports: Vec<BoundReport>,
}

/// `min` over the separately maximized sum-rate bounds and every pairing of
/// one rate bound per user. Since `min_i max_Q B_i >= max_Q min_i B_i`, this is
/// a valid, possibly loose, upper bound.
pub fn sum_rate_upper(ch: &ChannelParams, cfg: &OptimizerConfig) -> Result<SumRateReport> {
    let reports: Vec<BoundReport> = BoundId::named().iter().map(|id| maximize(ch, id, cfg)).collect::<Result<_>>()?;
    let total = |id: &BoundId| reports.iter().find(|r| &r.id == id).map(|r| r.total_bits).expect("named bound");
    let mut constituents = Vec::new();
    for r1 in [BoundId::CutR1a, BoundId::CutR1b, BoundId::CutR1c] {
        for r2 in [BoundId::CutR2a, BoundId::CutR2b, BoundId::CutR2c] {
            constituents.push(SumRateTerm { label: format!("{r1} + {r2}"), bits: total(&r1) + total(&r2) });
        }
    }
    for id in [BoundId::CutSum, BoundId::Thm2a, BoundId::Thm2b, BoundId::MimoUltimate] {
        constituents.push(SumRateTerm { label: id.label(), bits: total(&id) });
    }
    let mut binding = 0;
    for (i, c) in constituents.iter().enumerate() {
        if c.bits < constituents[binding].bits {
            binding = i;
        }
    }
    Ok(SumRateReport {
        headline_bits: constituents[binding].bits,
        binding: constituents[binding].label.clone(),
        constituents,
        reports,
    })
}
