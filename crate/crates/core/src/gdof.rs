//! Closed-form generalized degrees of freedom of the symmetric channel.
//!
//! `d` is the per-user rate normalized by `log2(1 + snr)` in the high-SNR
//! limit. Outer-bound lines are naturally stated for the sum `2d`; they are
//! kept in that unit by [`gdof_bounds`] and halved when a per-user value is
//! reported.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::bounds::BoundId;
use crate::model::{apply_mode, CooperationMode, ModeSetup, ModeTag, SymmetricParams};
use crate::{Error, Result};

/// Exponents entering the GDoF outer bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExponentParams {
    pub alpha: f64,
    pub alpha_tilde: f64,
    pub beta_s: f64,
    pub beta_d: f64,
    pub gamma: f64,
    pub delta1: f64,
    pub delta2: f64,
}

impl ExponentParams {
    pub fn no_coop(alpha: f64) -> Self {
        ExponentParams { alpha, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha, self.alpha_tilde, self.beta_s, self.beta_d, self.gamma, self.delta1, self.delta2];
        if all.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidParams(format!("exponents must be nonnegative: {self:?}")));
        }
        if self.delta2 > self.delta1 {
            return Err(Error::InvalidParams(format!(
                "delta2 = {} exceeds delta1 = {}",
                self.delta2, self.delta1
            )));
        }
        Ok(())
    }

    /// Exponents of a cooperation mode applied to a symmetric channel. Links
    /// the mode does not have contribute zero exponents.
    pub fn from_setup(setup: &ModeSetup) -> Self {
        let l = setup.links;
        let s = &setup.sym;
        ExponentParams {
            alpha: s.alpha,
            alpha_tilde: if l.dest_source { s.alpha_tilde } else { 0.0 },
            beta_s: if l.source_source { s.beta_s } else { 0.0 },
            beta_d: if l.dest_dest { s.beta_d } else { 0.0 },
            gamma: if l.dest_source { s.gamma } else { 0.0 },
            delta1: setup.delta1,
            delta2: setup.delta2,
        }
    }
}

/// Every outer-bound line in units of `2d`, plus the binding minimum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GdofBounds {
    pub lines: Vec<(BoundId, f64)>,
    pub min_two_d: f64,
    pub binding: BoundId,
}

impl GdofBounds {
    pub fn d(&self) -> f64 {
        self.min_two_d / 2.0
    }
}

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

fn max3(a: f64, b: f64, c: f64) -> f64 {
    a.max(b).max(c)
}

/// Evaluates the GDoF outer bound. The lines are, with per-user lines doubled:
///
/// ```text
///   2d <= 2 max{1, α, βd}                        (first cut of each user)
///   2d <= 2 (max{βs+βd, 1+γ} + Δ1)               (second cut)
///   2d <= 2 (max{βs, 1, α} + Δ2)                 (third cut)
///   2d <= 2 max{1, α}  (α != 1),   2d <= 1  (α = 1)   (full cooperation)
///   2d <= max{1, α, βd} + [max{βs, 1} - α]⁺ + Δ2  (sum-rate bound)
/// ```
///
/// None of the lines involves `α̃`.
pub fn gdof_bounds(e: &ExponentParams) -> GdofBounds {
    let ExponentParams { alpha: a, beta_s: bs, beta_d: bd, gamma: g, delta1: d1, delta2: d2, .. } = *e;
    let mimo = if a == 1.0 { 1.0 } else { 2.0 * a.max(1.0) };
    let lines = vec![
        (BoundId::CutR1a, 2.0 * max3(1.0, a, bd)),
        (BoundId::CutR1b, 2.0 * ((bs + bd).max(1.0 + g) + d1)),
        (BoundId::CutR1c, 2.0 * (max3(bs, 1.0, a) + d2)),
        (BoundId::MimoUltimate, mimo),
        (BoundId::Thm2b, max3(1.0, a, bd) + pos(bs.max(1.0) - a) + d2),
    ];
    let mut best = 0;
    for (i, (_, v)) in lines.iter().enumerate() {
        if *v < lines[best].1 {
            best = i;
        }
    }
    GdofBounds { min_two_d: lines[best].1, binding: lines[best].0.clone(), lines }
}

/// Which form of the W-curve to evaluate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum WCurveForm {
    /// `min{max{1-α, α}, max{1-α/2, α/2}, 1}`.
    #[default]
    Corrected,
    /// `min{min{1-α, α}, max{1-α/2, α/2}, 1}`, which gives `d(0) = 0`.
    Printed,
}

/// Symmetric GDoF of the interference channel without cooperation.
pub fn w_curve(alpha: f64) -> f64 {
    w_curve_with(alpha, WCurveForm::Corrected)
}

pub fn w_curve_with(alpha: f64, form: WCurveForm) -> f64 {
    let first = match form {
        WCurveForm::Corrected => (1.0 - alpha).max(alpha),
        WCurveForm::Printed => (1.0 - alpha).min(alpha),
    };
    first.min(v_curve(alpha)).min(1.0)
}

/// Symmetric GDoF with unlimited output feedback.
pub fn v_curve(alpha: f64) -> f64 {
    (1.0 - alpha / 2.0).max(alpha / 2.0)
}

/// Where a per-mode value comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    /// A named closed-form curve.
    Curve(&'static str),
    /// The binding outer-bound line.
    Bound(BoundId),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Curve(name) => f.write_str(name),
            Provenance::Bound(id) => write!(f, "{id}"),
        }
    }
}

impl Serialize for Provenance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Per-user symmetric GDoF of a mode.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeValue {
    pub d: f64,
    /// Whether `d` is known to be the exact GDoF rather than only an upper
    /// bound on it.
    pub tight: bool,
    pub provenance: Provenance,
}

fn from_bounds(mode: ModeTag, alpha: f64, beta: f64, tight: bool) -> Result<ModeValue> {
    let setup = apply_mode(&CooperationMode::preset(mode, beta), &SymmetricParams::new(1.0, alpha));
    let e = ExponentParams::from_setup(&setup);
    e.validate()?;
    let b = gdof_bounds(&e);
    Ok(ModeValue { d: b.d(), tight, provenance: Provenance::Bound(b.binding) })
}

/// Per-user symmetric GDoF of a cooperation mode at interference level `alpha`
/// and cooperation strength `beta`.
pub fn mode_curve(mode: ModeTag, alpha: f64, beta: f64) -> Result<ModeValue> {
    if !(alpha >= 0.0) || !(beta >= 0.0) {
        return Err(Error::InvalidParams(format!("alpha and beta must be nonnegative, got {alpha}, {beta}")));
    }
    let curve = |d: f64, name: &'static str| Ok(ModeValue { d, tight: true, provenance: Provenance::Curve(name) });
    match mode {
        ModeTag::NoCoop => curve(w_curve(alpha), "W"),
        ModeTag::OutputFeedback => curve(v_curve(alpha), "V"),
        ModeTag::RateLimitedFeedback => {
            let (v, w) = (v_curve(alpha), w_curve(alpha) + beta);
            if v <= w {
                curve(v, "V")
            } else {
                curve(w, "W+beta")
            }
        }
        ModeTag::Ultimate => curve(if alpha == 1.0 { 0.5 } else { alpha.max(1.0) }, "MIMO"),
        ModeTag::InBandSource => from_bounds(mode, alpha, beta, !(alpha < 2.0 / 3.0 && beta < alpha / 2.0)),
        ModeTag::OutOfBandSource => {
            from_bounds(mode, alpha, beta, !(alpha < 2.0 / 3.0 && beta < alpha.min(2.0 - 3.0 * alpha)))
        }
        ModeTag::TwoWayLike => from_bounds(mode, alpha, beta, false),
    }
}

/// One point of a symmetric GDoF curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GdofPoint {
    pub alpha: f64,
    pub d: f64,
    pub tight: bool,
    pub provenance: Provenance,
}

impl GdofPoint {
    pub fn two_d(&self) -> f64 {
        2.0 * self.d
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GdofCurve {
    pub mode: ModeTag,
    pub beta: f64,
    pub points: Vec<GdofPoint>,
}

/// Uniform α grid `start..=end`, written `A:B:STEP`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaGrid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl AlphaGrid {
    pub fn new(start: f64, end: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && step.is_finite()) {
            return Err(Error::InvalidGrid("grid bounds must be finite".into()));
        }
        if !(end > start) || !(step > 0.0) {
            return Err(Error::InvalidGrid("grid not increasing".into()));
        }
        if start < 0.0 {
            return Err(Error::InvalidGrid("alpha must be nonnegative".into()));
        }
        Ok(AlphaGrid { start, end, step })
    }

    /// `[0, 3]` in steps of `0.005`.
    pub fn figure() -> Self {
        AlphaGrid { start: 0.0, end: 3.0, step: 0.005 }
    }

    /// `n + 1` points with `n = round((end - start) / step)`, computed as
    /// `start + (end - start) * i / n` so that every grid value with an exact
    /// representation (such as `α = 1`) is hit exactly.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.end - self.start) / self.step).round().max(1.0) as usize;
        let span = self.end - self.start;
        (0..=n).map(|i| self.start + span * i as f64 / n as f64).collect()
    }
}

impl FromStr for AlphaGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidGrid(format!("expected A:B:STEP, got '{s}'")));
        }
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::InvalidGrid(format!("bad number '{t}'")));
        AlphaGrid::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)
    }
}

/// Pointwise [`mode_curve`]; `alphas` must be strictly increasing.
pub fn sweep(mode: ModeTag, beta: f64, alphas: &[f64]) -> Result<GdofCurve> {
    if alphas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid("grid not increasing".into()));
    }
    let points = alphas
        .par_iter()
        .map(|&alpha| {
            let v = mode_curve(mode, alpha, beta)?;
            Ok(GdofPoint { alpha, d: v.d, tight: v.tight, provenance: v.provenance })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GdofCurve { mode, beta, points })
}

pub const CSV_HEADER: &str = "alpha,mode,beta,d,two_d,tight";

/// Writes curves as CSV with six decimals.
pub fn write_csv(mut w: impl Write, curves: &[GdofCurve]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for c in curves {
        for p in &c.points {
            writeln!(
                w,
                "{:.6},{},{:.6},{:.6},{:.6},{}",
                p.alpha,
                c.mode,
                c.beta,
                p.d,
                p.two_d(),
                u8::from(p.tight)
            )?;
        }
    }
    Ok(())
}

/// One parsed CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub alpha: f64,
    pub mode: ModeTag,
    pub beta: f64,
    pub d: f64,
    pub two_d: f64,
    pub tight: bool,
}

pub fn read_csv(r: impl BufRead) -> Result<Vec<CsvRow>> {
    let mut lines = r.lines();
    let header = lines.next().transpose()?;
    if header.as_deref().map(str::trim) != Some(CSV_HEADER) {
        return Err(Error::Parse("missing CSV header".into()));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        let bad = || Error::Parse(format!("line {}: malformed row '{line}'", i + 2));
        if f.len() != 6 {
            return Err(bad());
        }
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
        rows.push(CsvRow {
            alpha: num(f[0])?,
            mode: f[1].parse().map_err(|_| bad())?,
            beta: num(f[2])?,
            d: num(f[3])?,
            two_d: num(f[4])?,
            tight: match f[5] {
                "0" => false,
                "1" => true,
                _ => return Err(bad()),
            },
        });
    }
    Ok(rows)
}
