//! Channel description, SNR-exponent parameterization and cooperation modes.
//!
//! A [`ChannelParams`] holds everything the bound evaluators need: the gain
//! matrix `H` (entry `(ℓ, i)` is the gain from transmitter `i` to receiver `ℓ`),
//! per-node average powers, the noise covariance and the out-of-band capacities.
//! Out-of-band signals are never simulated; they only enter through their
//! entropy budgets (see [`OobBudget`]).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::{log2_1p, CMatrix, Error, Result, C64};

/// Entropy budgets for the out-of-band signal of a source.
///
/// `delta1_bits` bounds the out-of-band entropy when only the
/// other source, the own destination and its output are known; `delta2_bits`
/// bounds it when both destinations' inputs and outputs are known as well.
/// Always `delta2_bits <= delta1_bits`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OobBudget {
    pub delta1_bits: f64,
    pub delta2_bits: f64,
}

impl OobBudget {
    /// Budgets from GDoF exponents, scaled by `log2(1 + snr)`.
    pub fn from_exponents(delta1: f64, delta2: f64, snr: f64) -> Self {
        let unit = log2_1p(snr);
        let scale = |d: f64| if d == 0.0 { 0.0 } else { d * unit };
        OobBudget {
            delta1_bits: scale(delta1),
            delta2_bits: scale(delta2),
        }
    }
}

/// Gaussian cooperative interference channel with `K` source/destination pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelParams {
    /// Number of source/destination pairs.
    pub k: usize,
    /// `2K x 2K` complex gains.
    pub h: CMatrix,
    /// Average power per node (linear scale).
    pub p: Vec<f64>,
    /// Hermitian noise covariance with unit diagonal.
    pub sigma_z: CMatrix,
    /// Out-of-band capacity `C_ℓ` received by node `ℓ`, in bits per channel use.
    pub c: Vec<f64>,
    /// Explicit out-of-band budgets; when absent every bound charges the
    /// capacities of the out-of-band links it crosses.
    pub budget: Option<OobBudget>,
}

impl ChannelParams {
    /// Checks dimensions only; the remaining invariants are reported by
    /// [`validate_channel`].
    pub fn new(k: usize, h: CMatrix, p: Vec<f64>, sigma_z: CMatrix, c: Vec<f64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParams("K must be positive".into()));
        }
        let n = 2 * k;
        for (rows, cols) in [h.shape(), sigma_z.shape()] {
            if rows != n {
                return Err(Error::DimensionMismatch { expected: n, found: rows });
            }
            if cols != n {
                return Err(Error::DimensionMismatch { expected: n, found: cols });
            }
        }
        for len in [p.len(), c.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, found: len });
            }
        }
        Ok(ChannelParams { k, h, p, sigma_z, c, budget: None })
    }

    /// Real gains, unit noise, no out-of-band links.
    pub fn from_real_gains(k: usize, gains: &[Vec<f64>], p: Vec<f64>) -> Result<Self> {
        let n = 2 * k;
        if gains.len() != n || gains.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: gains.len() });
        }
        let h = CMatrix::from_fn(n, n, |r, c| C64::new(gains[r][c], 0.0));
        ChannelParams::new(k, h, p, CMatrix::identity(n, n), vec![0.0; n])
    }

    pub fn n_nodes(&self) -> usize {
        2 * self.k
    }

    pub fn with_budget(mut self, budget: OobBudget) -> Self {
        self.budget = Some(budget);
        self
    }

    /// `|h[ℓ][i]|^2 P_i` with 0-based indices.
    pub fn received_power(&self, row: usize, col: usize) -> f64 {
        self.h[(row, col)].norm_sqr() * self.p[col]
    }

    /// Relabels nodes: node `i` of `self` becomes node `perm[i]` (0-based).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n_nodes();
        assert_eq!(perm.len(), n, "permutation length");
        let mut out = self.clone();
        for r in 0..n {
            for c in 0..n {
                out.h[(perm[r], perm[c])] = self.h[(r, c)];
                out.sigma_z[(perm[r], perm[c])] = self.sigma_z[(r, c)];
            }
            out.p[perm[r]] = self.p[r];
            out.c[perm[r]] = self.c[r];
        }
        out
    }

    /// Exchanges the roles of the two user pairs (`1<->2`, `3<->4`).
    pub fn swap_users(&self) -> Self {
        assert_eq!(self.k, 2, "swap_users is defined for two user pairs");
        self.permuted(&[1, 0, 3, 2])
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: ChannelFile = serde_json::from_str(s)?;
        file.into_params()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&ChannelFile::from_params(self)).expect("channel serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(self) -> C64 {
        match self {
            Entry::Real(re) => C64::new(re, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelFile {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "H")]
    h: Vec<Vec<Entry>>,
    #[serde(rename = "P")]
    p: Vec<f64>,
    #[serde(rename = "SigmaZ")]
    sigma_z: Vec<Vec<Entry>>,
    #[serde(rename = "C")]
    c: Vec<f64>,
    #[serde(rename = "Delta", default, skip_serializing_if = "Option::is_none")]
    delta: Option<[f64; 2]>,
}

fn to_matrix(rows: &[Vec<Entry>], n: usize, what: &str) -> Result<CMatrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("{what} must be {n}x{n}")));
    }
    Ok(CMatrix::from_fn(n, n, |r, c| rows[r][c].value()))
}

fn from_matrix(m: &CMatrix) -> Vec<Vec<Entry>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| Entry::Complex([m[(r, c)].re, m[(r, c)].im])).collect())
        .collect()
}

impl ChannelFile {
    fn into_params(self) -> Result<ChannelParams> {
        let n = 2 * self.k;
        let h = to_matrix(&self.h, n, "H")?;
        let sigma_z = to_matrix(&self.sigma_z, n, "SigmaZ")?;
        let mut ch = ChannelParams::new(self.k, h, self.p, sigma_z, self.c)?;
        if let Some([d1, d2]) = self.delta {
            ch.budget = Some(OobBudget { delta1_bits: d1, delta2_bits: d2 });
        }
        Ok(ch)
    }

    fn from_params(ch: &ChannelParams) -> Self {
        ChannelFile {
            k: ch.k,
            h: from_matrix(&ch.h),
            p: ch.p.clone(),
            sigma_z: from_matrix(&ch.sigma_z),
            c: ch.c.clone(),
            delta: ch.budget.map(|b| [b.delta1_bits, b.delta2_bits]),
        }
    }
}

/// One violated channel invariant.
#[derive(Clone, Debug, PartialEq)]
pub enum Diagnostic {
    NoiseNotHermitian,
    NoiseDiagonal { node: usize, value: f64 },
    NoiseNotPsd { min_eigenvalue: f64 },
    SelfGain { node: usize },
    NegativePower { node: usize, value: f64 },
    NegativeCapacity { node: usize, value: f64 },
    InvalidBudget,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NoiseNotHermitian => write!(f, "noise covariance not Hermitian"),
            Diagnostic::NoiseDiagonal { node, value } => {
                write!(f, "noise variance {value} at node {node} is not 1")
            }
            Diagnostic::NoiseNotPsd { .. } => write!(f, "noise covariance not PSD"),
            Diagnostic::SelfGain { node } => write!(f, "self-gain nonzero at node {node}"),
            Diagnostic::NegativePower { node, value } => {
                write!(f, "negative power {value} at node {node}")
            }
            Diagnostic::NegativeCapacity { node, value } => {
                write!(f, "negative out-of-band capacity {value} at node {node}")
            }
            Diagnostic::InvalidBudget => {
                write!(f, "out-of-band budgets must satisfy 0 <= delta2 <= delta1")
            }
        }
    }
}

/// Empty iff every [`ChannelParams`] invariant holds. Dimensions are enforced at
/// construction and are not re-checked here.
pub fn validate_channel(ch: &ChannelParams) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let n = ch.n_nodes();
    if !linalg::is_hermitian(&ch.sigma_z, 1e-12) {
        out.push(Diagnostic::NoiseNotHermitian);
    }
    for i in 0..n {
        let d = ch.sigma_z[(i, i)];
        if d != C64::new(1.0, 0.0) {
            out.push(Diagnostic::NoiseDiagonal { node: i + 1, value: d.re });
        }
    }
    let min_ev = linalg::min_eigenvalue(&ch.sigma_z);
    if !(min_ev >= -1e-9) {
        out.push(Diagnostic::NoiseNotPsd { min_eigenvalue: min_ev });
    }
    for i in 0..n {
        if ch.h[(i, i)] != C64::new(0.0, 0.0) {
            out.push(Diagnostic::SelfGain { node: i + 1 });
        }
    }
    for (i, &p) in ch.p.iter().enumerate() {
        if !(p >= 0.0) {
            out.push(Diagnostic::NegativePower { node: i + 1, value: p });
        }
    }
    for (i, &c) in ch.c.iter().enumerate() {
        if !(c >= 0.0) {
            out.push(Diagnostic::NegativeCapacity { node: i + 1, value: c });
        }
    }
    if let Some(b) = ch.budget {
        if !(b.delta2_bits >= 0.0 && b.delta2_bits <= b.delta1_bits) {
            out.push(Diagnostic::InvalidBudget);
        }
    }
    out
}

/// SNR exponents of the symmetric two-pair channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricParams {
    pub snr: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub alpha_tilde: f64,
    #[serde(default)]
    pub beta_s: f64,
    #[serde(default)]
    pub beta_d: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub kappa: f64,
}

/// Names of the exponents in [`SymmetricParams`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exponent {
    Alpha,
    AlphaTilde,
    BetaS,
    BetaD,
    Gamma,
    Kappa,
}

impl SymmetricParams {
    pub fn new(snr: f64, alpha: f64) -> Self {
        SymmetricParams {
            snr,
            alpha,
            alpha_tilde: 0.0,
            beta_s: 0.0,
            beta_d: 0.0,
            gamma: 0.0,
            kappa: 0.0,
        }
    }

    pub fn get(&self, e: Exponent) -> f64 {
        match e {
            Exponent::Alpha => self.alpha,
            Exponent::AlphaTilde => self.alpha_tilde,
            Exponent::BetaS => self.beta_s,
            Exponent::BetaD => self.beta_d,
            Exponent::Gamma => self.gamma,
            Exponent::Kappa => self.kappa,
        }
    }

    pub fn set(&mut self, e: Exponent, v: f64) {
        let slot = match e {
            Exponent::Alpha => &mut self.alpha,
            Exponent::AlphaTilde => &mut self.alpha_tilde,
            Exponent::BetaS => &mut self.beta_s,
            Exponent::BetaD => &mut self.beta_d,
            Exponent::Gamma => &mut self.gamma,
            Exponent::Kappa => &mut self.kappa,
        };
        *slot = v;
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.snr > 0.0 && self.snr.is_finite()) {
            return Err(Error::InvalidParams(format!("snr must be positive, got {}", self.snr)));
        }
        for e in [
            Exponent::Alpha,
            Exponent::AlphaTilde,
            Exponent::BetaS,
            Exponent::BetaD,
            Exponent::Gamma,
            Exponent::Kappa,
        ] {
            let v = self.get(e);
            if !(v >= 0.0) {
                return Err(Error::InvalidParams(format!("exponent {e:?} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let sym: SymmetricParams = serde_json::from_str(s)?;
        sym.validate()?;
        Ok(sym)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

/// Builds the symmetric two-pair channel.
///
/// Powers are 1 and the SNR scaling lives in the gains, so the received powers
/// `|h[ℓ][i]|^2 P_i` are
///
/// ```text
///   .            snr^βs        snr^γ        snr^(γα̃)
///   snr^βs       .             snr^(γα̃)     snr^γ
///   snr          snr^α         .            snr^βd
///   snr^α        snr           snr^βd       .
/// ```
///
/// with zero self-gains. Sources receive `κ log2(1+snr)` bits out-of-band,
/// destinations nothing. Gains must be finite; an infinite `κ` is allowed and
/// gives infinite out-of-band capacity.
pub fn build_symmetric(sym: &SymmetricParams) -> Result<ChannelParams> {
    sym.validate()?;
    for e in [Exponent::Alpha, Exponent::AlphaTilde, Exponent::BetaS, Exponent::BetaD, Exponent::Gamma] {
        if !sym.get(e).is_finite() {
            return Err(Error::InvalidParams(format!(
                "exponent {e:?} is infinite; no finite channel realizes it"
            )));
        }
    }
    let s = sym.snr;
    let pw = |e: f64| s.powf(e);
    let cross_dest = pw(sym.gamma * sym.alpha_tilde);
    let sq = [
        [0.0, pw(sym.beta_s), pw(sym.gamma), cross_dest],
        [pw(sym.beta_s), 0.0, cross_dest, pw(sym.gamma)],
        [s, pw(sym.alpha), 0.0, pw(sym.beta_d)],
        [pw(sym.alpha), s, pw(sym.beta_d), 0.0],
    ];
    let h = CMatrix::from_fn(4, 4, |r, c| C64::new(sq[r][c].sqrt(), 0.0));
    let oob = if sym.kappa == 0.0 { 0.0 } else { sym.kappa * log2_1p(s) };
    ChannelParams::new(2, h, vec![1.0; 4], CMatrix::identity(4, 4), vec![oob, oob, 0.0, 0.0])
}

/// Cooperation regimes with a closed-form or preset treatment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeTag {
    NoCoop,
    InBandSource,
    OutOfBandSource,
    OutputFeedback,
    RateLimitedFeedback,
    TwoWayLike,
    Ultimate,
}

impl ModeTag {
    pub const ALL: [ModeTag; 7] = [
        ModeTag::NoCoop,
        ModeTag::InBandSource,
        ModeTag::OutOfBandSource,
        ModeTag::OutputFeedback,
        ModeTag::RateLimitedFeedback,
        ModeTag::TwoWayLike,
        ModeTag::Ultimate,
    ];

    /// The six modes drawn in the comparison figures (two-way-like is omitted
    /// because its bound is not known to be tight).
    pub const FIGURE: [ModeTag; 6] = [
        ModeTag::NoCoop,
        ModeTag::InBandSource,
        ModeTag::OutOfBandSource,
        ModeTag::OutputFeedback,
        ModeTag::RateLimitedFeedback,
        ModeTag::Ultimate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModeTag::NoCoop => "no-coop",
            ModeTag::InBandSource => "in-band-source",
            ModeTag::OutOfBandSource => "out-of-band-source",
            ModeTag::OutputFeedback => "output-feedback",
            ModeTag::RateLimitedFeedback => "rate-limited-feedback",
            ModeTag::TwoWayLike => "two-way-like",
            ModeTag::Ultimate => "ultimate",
        }
    }
}

impl fmt::Display for ModeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModeTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModeTag::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown mode '{s}'")))
    }
}

/// Which in-band cooperation links physically exist. Source-to-destination
/// links always exist.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoopLinks {
    pub source_source: bool,
    pub dest_dest: bool,
    pub dest_source: bool,
}

/// A cooperation preset: exponent overrides plus the out-of-band budget
/// assignment, parameterized by a single cooperation strength `beta`.
#[derive(Clone, Debug, PartialEq)]
pub struct CooperationMode {
    pub tag: ModeTag,
    pub beta: f64,
    /// GDoF budget of the out-of-band signal under the weaker conditioning.
    pub delta1: f64,
    /// GDoF budget under the stronger conditioning; `delta2 <= delta1`.
    pub delta2: f64,
    pub overrides: BTreeMap<Exponent, f64>,
    pub links: CoopLinks,
}

impl CooperationMode {
    pub fn preset(tag: ModeTag, beta: f64) -> Self {
        use Exponent::*;
        let zero_all = |keep: &[(Exponent, f64)]| {
            let mut m: BTreeMap<Exponent, f64> =
                [BetaS, BetaD, Gamma, AlphaTilde, Kappa].into_iter().map(|e| (e, 0.0)).collect();
            m.extend(keep.iter().copied());
            m
        };
        let none = CoopLinks::default();
        let (overrides, delta1, delta2, links) = match tag {
            ModeTag::NoCoop => (zero_all(&[]), 0.0, 0.0, none),
            ModeTag::InBandSource => (
                zero_all(&[(BetaS, beta)]),
                0.0,
                0.0,
                CoopLinks { source_source: true, ..none },
            ),
            ModeTag::OutOfBandSource => (zero_all(&[(Kappa, beta)]), beta, beta, none),
            // Unlimited out-of-band feedback: nothing remains unknown once both
            // destination outputs are given.
            ModeTag::OutputFeedback => {
                (zero_all(&[(Kappa, f64::INFINITY)]), f64::INFINITY, 0.0, none)
            }
            ModeTag::RateLimitedFeedback | ModeTag::TwoWayLike => {
                (zero_all(&[(Kappa, beta)]), beta, 0.0, none)
            }
            ModeTag::Ultimate => (
                [(BetaS, f64::INFINITY), (BetaD, f64::INFINITY)].into_iter().collect(),
                0.0,
                0.0,
                CoopLinks { source_source: true, dest_dest: true, dest_source: false },
            ),
        };
        CooperationMode { tag, beta, delta1, delta2, overrides, links }
    }
}

/// The result of applying a [`CooperationMode`] to base exponents.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSetup {
    pub sym: SymmetricParams,
    pub delta1: f64,
    pub delta2: f64,
    pub links: CoopLinks,
}

pub fn apply_mode(mode: &CooperationMode, base: &SymmetricParams) -> ModeSetup {
    let mut sym = *base;
    for (&e, &v) in &mode.overrides {
        sym.set(e, v);
    }
    ModeSetup { sym, delta1: mode.delta1, delta2: mode.delta2, links: mode.links }
}

impl ModeSetup {
    /// The symmetric channel with absent cooperation links removed, silent
    /// destinations given zero power, and the mode's out-of-band budgets attached.
    pub fn channel(&self) -> Result<ChannelParams> {
        let mut sym = self.sym;
        // Exponents of absent links do not matter; keep them finite.
        if !self.links.source_source {
            sym.beta_s = 0.0;
        }
        if !self.links.dest_dest {
            sym.beta_d = 0.0;
        }
        if !self.links.dest_source {
            sym.gamma = 0.0;
            sym.alpha_tilde = 0.0;
        }
        let mut ch = build_symmetric(&sym)?;
        let zero = C64::new(0.0, 0.0);
        if !self.links.source_source {
            ch.h[(0, 1)] = zero;
            ch.h[(1, 0)] = zero;
        }
        if !self.links.dest_dest {
            ch.h[(2, 3)] = zero;
            ch.h[(3, 2)] = zero;
        }
        if !self.links.dest_source {
            for r in 0..2 {
                for c in 2..4 {
                    ch.h[(r, c)] = zero;
                }
            }
        }
        if !self.links.dest_dest && !self.links.dest_source {
            ch.p[2] = 0.0;
            ch.p[3] = 0.0;
        }
        Ok(ch.with_budget(OobBudget::from_exponents(self.delta1, self.delta2, self.sym.snr)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_gains_match_exponent_table() {
        let ch = build_symmetric(&SymmetricParams::new(100.0, 0.5)).unwrap();
        assert!((ch.received_power(2, 0) - 100.0).abs() < 1e-12);
        assert!((ch.received_power(2, 1) - 10.0).abs() < 1e-12);
        assert!((ch.received_power(0, 1) - 1.0).abs() < 1e-12);
        assert_eq!(ch.c, vec![0.0; 4]);
        assert_eq!(ch.sigma_z, CMatrix::identity(4, 4));
    }

    #[test]
    fn unit_snr_gives_unit_gains() {
        let sym = SymmetricParams {
            snr: 1.0,
            alpha: 1.7,
            alpha_tilde: 0.3,
            beta_s: 2.0,
            beta_d: 0.1,
            gamma: 0.4,
            kappa: 0.0,
        };
        let ch = build_symmetric(&sym).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let want = if r == c { 0.0 } else { 1.0 };
                assert!((ch.received_power(r, c) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn source_link_exponent() {
        let mut sym = SymmetricParams::new(1e4, 0.0);
        sym.beta_s = 0.5;
        let ch = build_symmetric(&sym).unwrap();
        let oracle = 10f64.powi(4).powf(0.5);
        assert!((ch.received_power(0, 1) - oracle).abs() < 1e-9);
        assert!((oracle - 100.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_exponents() {
        let mut sym = SymmetricParams::new(10.0, -0.1);
        assert!(build_symmetric(&sym).is_err());
        sym.alpha = 0.1;
        sym.snr = 0.0;
        assert!(build_symmetric(&sym).is_err());
        sym.snr = 10.0;
        sym.beta_s = f64::INFINITY;
        assert!(build_symmetric(&sym).is_err());
    }

    #[test]
    fn kappa_sets_source_capacities() {
        let mut sym = SymmetricParams::new(7.0, 0.2);
        sym.kappa = 0.5;
        let ch = build_symmetric(&sym).unwrap();
        assert!((ch.c[0] - 1.5).abs() < 1e-12);
        assert_eq!(ch.c[0], ch.c[1]);
        assert_eq!(&ch.c[2..], &[0.0, 0.0]);
    }

    #[test]
    fn mode_presets() {
        let mut base = SymmetricParams::new(100.0, 0.7);
        base.beta_s = 0.9;
        base.gamma = 0.2;
        base.kappa = 3.0;

        let s = apply_mode(&CooperationMode::preset(ModeTag::NoCoop, 0.3), &base);
        assert_eq!((s.sym.beta_s, s.sym.beta_d, s.sym.gamma, s.sym.alpha_tilde, s.sym.kappa), (0.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!(s.sym.alpha, 0.7);

        let s = apply_mode(&CooperationMode::preset(ModeTag::InBandSource, 0.3), &base);
        assert_eq!(s.sym.beta_s, 0.3);
        assert_eq!((s.sym.beta_d, s.sym.gamma, s.sym.kappa), (0.0, 0.0, 0.0));
        assert_eq!((s.delta1, s.delta2), (0.0, 0.0));

        let s = apply_mode(&CooperationMode::preset(ModeTag::OutOfBandSource, 0.3), &base);
        assert_eq!(s.sym.kappa, 0.3);
        assert_eq!((s.delta1, s.delta2), (0.3, 0.3));

        let s = apply_mode(&CooperationMode::preset(ModeTag::RateLimitedFeedback, 0.3), &base);
        assert_eq!(s.sym.kappa, 0.3);
        assert_eq!((s.delta1, s.delta2), (0.3, 0.0));

        for tag in ModeTag::ALL {
            let m = CooperationMode::preset(tag, 0.3);
            assert!(m.delta2 <= m.delta1, "{tag}");
        }
    }

    #[test]
    fn no_coop_channel_has_no_cooperation_links() {
        let base = SymmetricParams { snr: 50.0, alpha: 1.3, alpha_tilde: 0.5, beta_s: 1.0, beta_d: 1.0, gamma: 1.0, kappa: 1.0 };
        let ch = apply_mode(&CooperationMode::preset(ModeTag::NoCoop, 0.4), &base).channel().unwrap();
        assert_eq!(ch.c, vec![0.0; 4]);
        for (r, c) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
            assert_eq!(ch.h[(r, c)].norm(), 0.0);
        }
        assert!(validate_channel(&ch).is_empty());
    }

    #[test]
    fn ultimate_has_no_finite_channel() {
        let s = apply_mode(&CooperationMode::preset(ModeTag::Ultimate, 1.0), &SymmetricParams::new(10.0, 1.0));
        assert!(s.channel().is_err());
    }

    #[test]
    fn validation_diagnostics() {
        let ch = build_symmetric(&SymmetricParams::new(10.0, 0.5)).unwrap();
        assert!(validate_channel(&ch).is_empty());

        let mut bad = ch.clone();
        bad.h[(0, 0)] = C64::new(1.0, 0.0);
        let diags: Vec<String> = validate_channel(&bad).iter().map(|d| d.to_string()).collect();
        assert_eq!(diags, vec!["self-gain nonzero at node 1".to_string()]);

        let mut bad = ch.clone();
        bad.sigma_z[(0, 1)] = C64::new(1.5, 0.0);
        bad.sigma_z[(1, 0)] = C64::new(1.5, 0.0);
        let diags: Vec<String> = validate_channel(&bad).iter().map(|d| d.to_string()).collect();
        assert_eq!(diags, vec!["noise covariance not PSD".to_string()]);

        let mut bad = ch;
        bad.p[2] = -1.0;
        assert_eq!(validate_channel(&bad), vec![Diagnostic::NegativePower { node: 3, value: -1.0 }]);
    }

    #[test]
    fn non_psd_oracle_agrees() {
        // 1 ± 1.5 are the eigenvalues of the 2x2 block.
        let mut m = CMatrix::identity(4, 4);
        m[(0, 1)] = C64::new(1.5, 0.0);
        m[(1, 0)] = C64::new(1.5, 0.0);
        assert!((linalg::min_eigenvalue(&m) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let mut ch = build_symmetric(&SymmetricParams::new(10.0, 0.5)).unwrap();
        ch.h[(2, 1)] = C64::new(0.3, -1.2);
        let ch = ch.with_budget(OobBudget { delta1_bits: 1.0, delta2_bits: 0.5 });
        let back = ChannelParams::from_json_str(&ch.to_json_string()).unwrap();
        assert_eq!(back, ch);
    }

    #[test]
    fn json_accepts_real_noise_entries() {
        let s = r#"{"K":1,"H":[[[0,0],[0,0]],[[2,0],[0,0]]],"P":[1,0],"SigmaZ":[[1,0],[0,1]],"C":[0,0]}"#;
        let ch = ChannelParams::from_json_str(s).unwrap();
        assert_eq!(ch.h[(1, 0)], C64::new(2.0, 0.0));
        assert!(ChannelParams::from_json_str("{not json").is_err());
    }

    #[test]
    fn swap_users_is_an_involution() {
        let mut sym = SymmetricParams::new(30.0, 0.4);
        sym.gamma = 0.3;
        sym.alpha_tilde = 2.0;
        let mut ch = build_symmetric(&sym).unwrap();
        ch.c[0] = 2.0;
        assert_eq!(ch.swap_users().swap_users(), ch);
        assert_eq!(ch.swap_users().c[1], 2.0);
    }
}
