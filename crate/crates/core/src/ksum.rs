//! Partial-sum-rate outer bounds for `K` user pairs.
//!
//! For users `S = (u1, .., um)` and the remaining users `T`, the bound on
//! `R_u1 + .. + R_um` is a chain of `m` mutual-information terms. Term `j`
//! reveals the intended output `Y_{uj+K}` together with one side output (all of
//! `Y_T` for the first term, `Y_{u(j-1)}` afterwards), and conditions on the
//! inputs of earlier users, the inputs of `T` and every output revealed before:
//!
//! ```text
//! K = 4, S = (1, 2, 3):
//!   I(X1,X2,X3 ; Y5,Y4 | X4)
//!   I(X2,X3 ; Y6,Y1 | X1,X4,Y5,Y4)
//!   I(X3 ; Y7,Y2 | X1,X2,X4,Y6,Y1,Y5,Y4)
//! ```
//!
//! Terms are single-letter. Destination inputs can additionally be placed in
//! every conditioning set (see [`DestInputs`]).

use std::fmt;

use serde::Serialize;

use crate::bounds::InputCovariance;
use crate::gaussinfo::{cond_entropy, joint_covariance, mutual_info, Var, VarSet};
use crate::model::ChannelParams;
use crate::{Error, Result};

/// One term `I(A; B | C)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MITermSpec {
    pub a: VarSet,
    pub b: VarSet,
    pub c: VarSet,
}

impl fmt::Display for MITermSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = |s: &VarSet| s.vars().iter().map(Var::to_string).collect::<Vec<_>>().join(",");
        if self.c.is_empty() {
            write!(f, "I({} ; {})", sep(&self.a), sep(&self.b))
        } else {
            write!(f, "I({} ; {} | {})", sep(&self.a), sep(&self.b), sep(&self.c))
        }
    }
}

/// Whether destination inputs `X_{K+1..2K}` join every conditioning set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DestInputs {
    /// Condition on source inputs only.
    #[default]
    Omit,
    Condition,
    /// `Condition` when some destination has positive power, else `Omit`.
    Auto,
}

impl DestInputs {
    pub fn resolve(self, ch: &ChannelParams) -> DestInputs {
        match self {
            DestInputs::Auto if ch.p[ch.k..].iter().any(|&p| p > 0.0) => DestInputs::Condition,
            DestInputs::Auto => DestInputs::Omit,
            other => other,
        }
    }
}

impl std::str::FromStr for DestInputs {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omit" => Ok(DestInputs::Omit),
            "condition" => Ok(DestInputs::Condition),
            "auto" => Ok(DestInputs::Auto),
            _ => Err(Error::InvalidParams(format!("unknown destination-input policy '{s}'"))),
        }
    }
}

/// A generated partial-sum-rate bound.
#[derive(Clone, Debug, PartialEq)]
pub struct SumBoundSpec {
    pub k: usize,
    /// Users of the partial sum in chain order (1-based).
    pub order: Vec<usize>,
    pub terms: Vec<MITermSpec>,
    /// True when destination inputs were added to the conditioning sets.
    pub dest_inputs: bool,
}

impl SumBoundSpec {
    /// One term per line.
    pub fn render(&self) -> String {
        self.terms.iter().map(|t| format!("{t}\n")).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let names = |s: &VarSet| s.vars().iter().map(Var::to_string).collect::<Vec<_>>();
        serde_json::json!({
            "K": self.k,
            "S": self.order,
            "dest_inputs": self.dest_inputs,
            "terms": self.terms.iter().map(|t| serde_json::json!({
                "A": names(&t.a),
                "B": names(&t.b),
                "C": names(&t.c),
                "text": t.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for SumBoundSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Checks `1 <= |order| <= K`, `K >= 2`, indices in range and distinct.
pub fn validate_order(k: usize, order: &[usize]) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidSubset(format!("need at least two users, got K={k}")));
    }
    if order.is_empty() {
        return Err(Error::InvalidSubset("empty user subset".into()));
    }
    if let Some(&u) = order.iter().find(|&&u| u == 0 || u > k) {
        return Err(Error::InvalidSubset(format!("user index out of range: {u} not in 1..={k}")));
    }
    for (i, u) in order.iter().enumerate() {
        if order[..i].contains(u) {
            return Err(Error::InvalidSubset(format!("user {u} listed twice")));
        }
    }
    Ok(())
}

/// The chain for users in the given order, conditioning on source inputs only.
pub fn generate_terms(k: usize, order: &[usize]) -> Result<SumBoundSpec> {
    generate_terms_with(k, order, DestInputs::Omit)
}

/// [`generate_terms`] with an explicit destination-input policy. `Auto` is
/// treated as `Omit` here since no channel is known.
pub fn generate_terms_with(k: usize, order: &[usize], dest: DestInputs) -> Result<SumBoundSpec> {
    validate_order(k, order)?;
    let rest: Vec<usize> = (1..=k).filter(|u| !order.contains(u)).collect();
    let dest_inputs = dest == DestInputs::Condition;
    let mut revealed: Vec<Vec<Var>> = Vec::new();
    let mut terms = Vec::with_capacity(order.len());
    for (j, &u) in order.iter().enumerate() {
        let mut b = vec![Var::Y(u + k)];
        if j == 0 {
            b.extend(rest.iter().map(|&v| Var::Y(v)));
        } else {
            b.push(Var::Y(order[j - 1]));
        }
        let a = order[j..].iter().map(|&v| Var::X(v));
        let mut c: Vec<Var> = order[..j].iter().map(|&v| Var::X(v)).collect();
        c.extend(rest.iter().map(|&v| Var::X(v)));
        if dest_inputs {
            c.extend((k + 1..=2 * k).map(Var::X));
        }
        for prev in revealed.iter().rev() {
            c.extend(prev.iter().copied());
        }
        terms.push(MITermSpec { a: VarSet::new(a)?, b: VarSet::new(b.clone())?, c: VarSet::new(c)? });
        revealed.push(b);
    }
    Ok(SumBoundSpec { k, order: order.to_vec(), terms, dest_inputs })
}

fn check_channel(ch: &ChannelParams, spec: &SumBoundSpec) -> Result<()> {
    if ch.k != spec.k {
        return Err(Error::InvalidParams(format!("channel has K={}, bound was generated for K={}", ch.k, spec.k)));
    }
    Ok(())
}

/// In-band value of the chain: the sum of its mutual informations.
pub fn eval_terms(ch: &ChannelParams, q: &InputCovariance, spec: &SumBoundSpec) -> Result<f64> {
    check_channel(ch, spec)?;
    let jc = joint_covariance(ch, q)?;
    spec.terms.iter().map(|t| mutual_info(&jc, &t.a, &t.b, &t.c)).sum()
}

/// Recomputes the chain in grouped form
/// `Σ_j h(B_j | C_j) - h(B_1, .., B_m | A_1, C_1)` and returns the absolute
/// difference from [`eval_terms`].
pub fn consistency_check(ch: &ChannelParams, q: &InputCovariance, spec: &SumBoundSpec) -> Result<f64> {
    let chained = eval_terms(ch, q, spec)?;
    let jc = joint_covariance(ch, q)?;
    let mut grouped = 0.0;
    for t in &spec.terms {
        grouped += cond_entropy(&jc, &t.b, &t.c)?;
    }
    let all_b: VarSet = spec.terms.iter().flat_map(|t| t.b.vars().iter().copied()).collect();
    let first = &spec.terms[0];
    let all_inputs: VarSet = first.a.union(&first.c);
    grouped -= cond_entropy(&jc, &all_b, &all_inputs)?;
    Ok((chained - grouped).abs())
}

/// Out-of-band budget charged to a partial sum: `Σ C_u` over `u ∈ S`.
pub fn oob_budget(ch: &ChannelParams, order: &[usize]) -> f64 {
    order.iter().map(|&u| ch.c[u - 1]).sum()
}

/// Value of one ordering of a partial sum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderValue {
    pub order: Vec<usize>,
    pub inband_bits: f64,
    pub total_bits: f64,
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Evaluates every ordering of `subset`; the smallest total is the tightest
/// generated bound. Orderings are listed in lexicographic order.
pub fn eval_all_orders(
    ch: &ChannelParams,
    q: &InputCovariance,
    subset: &[usize],
    dest: DestInputs,
) -> Result<Vec<OrderValue>> {
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    validate_order(ch.k, &sorted)?;
    let dest = dest.resolve(ch);
    permutations(&sorted)
        .into_iter()
        .map(|order| {
            let spec = generate_terms_with(ch.k, &order, dest)?;
            let inband_bits = eval_terms(ch, q, &spec)?;
            let total_bits = inband_bits + oob_budget(ch, &order);
            Ok(OrderValue { order, inband_bits, total_bits })
        })
        .collect()
}

/// The ordering with the smallest total; ties go to the first in
/// lexicographic order.
pub fn tightest_order(
    ch: &ChannelParams,
    q: &InputCovariance,
    subset: &[usize],
    dest: DestInputs,
) -> Result<OrderValue> {
    let all = eval_all_orders(ch, q, subset, dest)?;
    let mut best = 0;
    for (i, v) in all.iter().enumerate() {
        if v.total_bits < all[best].total_bits {
            best = i;
        }
    }
    Ok(all[best].clone())
}
