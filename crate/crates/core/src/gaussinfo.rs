//! Differential entropy and conditional mutual information of jointly Gaussian
//! proper-complex vectors.
//!
//! Conditional covariances are Schur complements
//! `S = Σ_TT - Σ_TG Σ_GG⁻¹ Σ_GT` and entropies are `log2 det(πe S)`. Both are
//! computed from a factor of the covariance by Gram-Schmidt projection (see
//! [`JointCov`]). Conditioning variables that are numerically linear
//! combinations of earlier ones (silent nodes, perfectly correlated inputs)
//! are dropped, which is the exact limit of a vanishing ridge.

use std::collections::HashMap;
use std::f64::consts::{E, PI};
use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::bounds::InputCovariance;
use crate::linalg;
use crate::model::ChannelParams;
use crate::{CMatrix, Error, Result, C64};

/// A conditional standard deviation below this fraction of the unconditional
/// one is treated as deterministic.
const DEGENERATE_REL: f64 = 1e-14;
/// Negative mutual information down to this value is rounding noise.
const CLAMP_TOL: f64 = 1e-9;

/// A node variable: the channel input `X_i` or output `Y_i` of node `i`
/// (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    X(usize),
    Y(usize),
}

impl Var {
    pub fn node(self) -> usize {
        match self {
            Var::X(i) | Var::Y(i) => i,
        }
    }

    pub fn is_input(self) -> bool {
        matches!(self, Var::X(_))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "X{i}"),
            Var::Y(i) => write!(f, "Y{i}"),
        }
    }
}

/// Ordered set of node variables without duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarSet(Vec<Var>);

impl VarSet {
    pub fn new(vars: impl IntoIterator<Item = Var>) -> Result<Self> {
        let vars: Vec<Var> = vars.into_iter().collect();
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::InvalidVarSet(format!("duplicate variable {v}")));
            }
        }
        Ok(VarSet(vars))
    }

    pub fn empty() -> Self {
        VarSet(Vec::new())
    }

    /// Inputs of the given 1-based nodes. Panics on duplicates.
    pub fn xs(nodes: &[usize]) -> Self {
        VarSet::new(nodes.iter().map(|&i| Var::X(i))).expect("distinct nodes")
    }

    /// Outputs of the given 1-based nodes. Panics on duplicates.
    pub fn ys(nodes: &[usize]) -> Self {
        VarSet::new(nodes.iter().map(|&i| Var::Y(i))).expect("distinct nodes")
    }

    pub fn vars(&self) -> &[Var] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Var) -> bool {
        self.0.contains(&v)
    }

    pub fn is_disjoint(&self, other: &VarSet) -> bool {
        self.0.iter().all(|v| !other.contains(*v))
    }

    /// `self` followed by the members of `other` not already present.
    pub fn union(&self, other: &VarSet) -> VarSet {
        let mut out = self.0.clone();
        out.extend(other.0.iter().filter(|v| !self.contains(**v)));
        VarSet(out)
    }

    pub fn push(&mut self, v: Var) -> Result<()> {
        if self.contains(v) {
            return Err(Error::InvalidVarSet(format!("duplicate variable {v}")));
        }
        self.0.push(v);
        Ok(())
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromIterator<Var> for VarSet {
    /// Silently drops repeated variables.
    fn from_iter<I: IntoIterator<Item = Var>>(iter: I) -> Self {
        let mut out = VarSet::empty();
        for v in iter {
            let _ = out.push(v);
        }
        out
    }
}

/// Covariance of a labeled jointly Gaussian vector.
///
/// Alongside the covariance `Σ` it keeps a factor `A` with `Σ = A Aᴴ`; each
/// coordinate is a row of `A`, i.e. a vector in the span of independent
/// standard sources. Conditioning is orthogonal projection of these rows,
/// which never forms the products `Σ_TG Σ_GG⁻¹ Σ_GT` that lose all precision
/// once gains reach `snr^α` with `α ≥ 2`.
#[derive(Clone, Debug)]
pub struct JointCov {
    labels: Vec<Var>,
    index: HashMap<Var, usize>,
    m: CMatrix,
    rows: Vec<DVector<C64>>,
}

impl JointCov {
    /// Labels must be unique and `m` Hermitian PSD with eigenvalues no lower
    /// than `-1e-9` times the largest one.
    pub fn new(labels: Vec<Var>, m: CMatrix) -> Result<Self> {
        if m.nrows() != labels.len() || m.ncols() != labels.len() {
            return Err(Error::DimensionMismatch { expected: labels.len(), found: m.nrows() });
        }
        if !linalg::is_hermitian(&m, 1e-9) {
            return Err(Error::InvalidParams("joint covariance is not Hermitian".into()));
        }
        let ev = linalg::hermitian_eigenvalues(&m);
        if let (Some(&lo), Some(&hi)) = (ev.first(), ev.last()) {
            if lo < -1e-9 * hi.max(0.0) {
                return Err(Error::NotPsd { min_eigenvalue: lo });
            }
        }
        let factor = linalg::psd_factor(&m);
        Self::from_factor(labels, m, &factor)
    }

    fn from_factor(labels: Vec<Var>, m: CMatrix, factor: &CMatrix) -> Result<Self> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, &v) in labels.iter().enumerate() {
            if index.insert(v, i).is_some() {
                return Err(Error::InvalidVarSet(format!("duplicate label {v}")));
            }
        }
        let rows = (0..factor.nrows()).map(|r| factor.row(r).transpose()).collect();
        Ok(JointCov { labels, index, m, rows })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Var] {
        &self.labels
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    fn indices(&self, set: &VarSet) -> Result<Vec<usize>> {
        set.vars()
            .iter()
            .map(|v| {
                self.index
                    .get(v)
                    .copied()
                    .ok_or_else(|| Error::InvalidVarSet(format!("{v} is not a coordinate")))
            })
            .collect()
    }
}

/// Covariance of `(X_1..X_2K, Y_1..Y_2K)` with `Y = H X + Z`:
/// `[[Q, Q Hᴴ], [H Q, H Q Hᴴ + Σ_Z]]`. Out-of-band components are not
/// represented.
pub fn joint_covariance(ch: &ChannelParams, q: &InputCovariance) -> Result<JointCov> {
    let n = ch.n_nodes();
    let qm = q.matrix();
    if qm.nrows() != n || qm.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: qm.nrows() });
    }
    let hq = &ch.h * qm;
    let yy = &hq * ch.h.adjoint() + &ch.sigma_z;
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(qm);
    m.view_mut((n, 0), (n, n)).copy_from(&hq);
    m.view_mut((0, n), (n, n)).copy_from(&hq.adjoint());
    m.view_mut((n, n), (n, n)).copy_from(&yy);

    // X = F w, Y = H F w + L z with independent standard w, z.
    let f = linalg::psd_factor(qm);
    let l = linalg::psd_factor(&ch.sigma_z);
    let mut a = CMatrix::zeros(2 * n, 2 * n);
    a.view_mut((0, 0), (n, n)).copy_from(&f);
    a.view_mut((n, 0), (n, n)).copy_from(&(&ch.h * &f));
    a.view_mut((n, n), (n, n)).copy_from(&l);
    let labels: Vec<Var> = (1..=n).map(Var::X).chain((1..=n).map(Var::Y)).collect();
    JointCov::from_factor(labels, m, &a)
}

/// Orthonormal basis under construction; conditioning on a variable adds the
/// normalized part of its row that is not yet spanned.
struct Basis(Vec<DVector<C64>>);

impl Basis {
    /// Component of `v` orthogonal to the basis. Projecting twice keeps the
    /// residual accurate to rounding relative to `|v|`.
    fn residual(&self, v: &DVector<C64>) -> DVector<C64> {
        let mut r = v.clone();
        for _ in 0..2 {
            for e in &self.0 {
                let c = e.dotc(&r);
                r.axpy(-c, e, C64::new(1.0, 0.0));
            }
        }
        r
    }

    /// Adds `v`; returns the squared norm of its new component, or `None` when
    /// `v` is numerically in the span already.
    fn push(&mut self, v: &DVector<C64>) -> Option<f64> {
        let scale = v.norm();
        let r = self.residual(v);
        let norm = r.norm();
        if scale == 0.0 || norm <= DEGENERATE_REL * scale {
            return None;
        }
        self.0.push(r.unscale(norm));
        Some(norm * norm)
    }
}

fn check_args(target: &VarSet, given: &VarSet) -> Result<()> {
    if target.is_empty() {
        return Err(Error::InvalidVarSet("empty target".into()));
    }
    if !target.is_disjoint(given) {
        return Err(Error::InvalidVarSet(format!("target {target} overlaps conditioning {given}")));
    }
    Ok(())
}

fn conditioned_basis(jc: &JointCov, given: &VarSet) -> Result<Basis> {
    let mut basis = Basis(Vec::new());
    for i in jc.indices(given)? {
        basis.push(&jc.rows[i]);
    }
    Ok(basis)
}

/// Conditional covariance of `target` given `given`.
pub fn conditional_covariance(jc: &JointCov, target: &VarSet, given: &VarSet) -> Result<CMatrix> {
    check_args(target, given)?;
    let t = jc.indices(target)?;
    let basis = conditioned_basis(jc, given)?;
    let res: Vec<DVector<C64>> = t.iter().map(|&i| basis.residual(&jc.rows[i])).collect();
    Ok(CMatrix::from_fn(t.len(), t.len(), |r, c| res[c].dotc(&res[r])))
}

/// `h(target | given) = log2 det(πe S)` in bits.
///
/// Fails with [`Error::Degenerate`] when some target coordinate is a
/// deterministic function of the conditioning and the other targets, up to a
/// relative `1e-14`.
pub fn cond_entropy(jc: &JointCov, target: &VarSet, given: &VarSet) -> Result<f64> {
    check_args(target, given)?;
    let t = jc.indices(target)?;
    let mut basis = conditioned_basis(jc, given)?;
    let mut log_det = 0.0;
    for &i in &t {
        match basis.push(&jc.rows[i]) {
            Some(pivot) => log_det += pivot.log2(),
            None => {
                let s = conditional_covariance(jc, target, given)?;
                return Err(Error::Degenerate { eigenvalue: linalg::min_eigenvalue(&s) });
            }
        }
    }
    Ok(t.len() as f64 * (PI * E).log2() + log_det)
}

/// `I(A; B | C) = h(B|C) - h(B|A,C)` in bits.
///
/// Values in `[-1e-9, 0)` are rounding noise and clamped to zero; anything
/// more negative is reported as an error.
pub fn mutual_info(jc: &JointCov, a: &VarSet, b: &VarSet, c: &VarSet) -> Result<f64> {
    let raw = mutual_info_raw(jc, a, b, c)?;
    if raw >= 0.0 {
        Ok(raw)
    } else if raw >= -CLAMP_TOL {
        Ok(0.0)
    } else {
        Err(Error::NegativeInformation(raw))
    }
}

/// [`mutual_info`] without the clamp.
pub fn mutual_info_raw(jc: &JointCov, a: &VarSet, b: &VarSet, c: &VarSet) -> Result<f64> {
    if !(a.is_disjoint(b) && a.is_disjoint(c) && b.is_disjoint(c)) {
        return Err(Error::InvalidVarSet(format!("I({a};{b}|{c}) arguments overlap")));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    Ok(cond_entropy(jc, b, c)? - cond_entropy(jc, b, &a.union(c))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[&[f64]]) -> CMatrix {
        CMatrix::from_fn(rows.len(), rows.len(), |r, c| C64::new(rows[r][c], 0.0))
    }

    fn scalar_channel(gain_sq: f64) -> JointCov {
        // Y = h X + Z with unit power and noise.
        let h = gain_sq.sqrt();
        JointCov::new(vec![Var::X(1), Var::Y(2)], real(&[&[1.0, h], &[h, gain_sq + 1.0]])).unwrap()
    }

    #[test]
    fn scalar_joint_covariance_block_formula() {
        let ch = ChannelParams::from_real_gains(1, &[vec![0.0, 0.0], vec![1.0, 0.0]], vec![1.0, 0.0]).unwrap();
        let q = InputCovariance::diagonal(&[1.0, 0.0]);
        let jc = joint_covariance(&ch, &q).unwrap();
        let x1 = 0;
        let y2 = 3;
        assert_eq!(jc.matrix()[(x1, x1)].re, 1.0);
        assert_eq!(jc.matrix()[(x1, y2)].re, 1.0);
        assert_eq!(jc.matrix()[(y2, y2)].re, 2.0);
    }

    #[test]
    fn zero_input_leaves_noise() {
        let mut ch = ChannelParams::from_real_gains(1, &[vec![0.0, 0.7], vec![1.3, 0.0]], vec![1.0, 1.0]).unwrap();
        ch.sigma_z[(0, 1)] = C64::new(0.4, 0.1);
        ch.sigma_z[(1, 0)] = C64::new(0.4, -0.1);
        let jc = joint_covariance(&ch, &InputCovariance::zeros(2)).unwrap();
        let y = jc.matrix().view((2, 2), (2, 2)).into_owned();
        assert_eq!(y, ch.sigma_z);
    }

    #[test]
    fn symmetric_destination_variance() {
        use crate::model::{build_symmetric, SymmetricParams};
        let ch = build_symmetric(&SymmetricParams::new(100.0, 0.5)).unwrap();
        let jc = joint_covariance(&ch, &InputCovariance::diagonal(&[1.0, 1.0, 0.0, 0.0])).unwrap();
        // Y3 sits at index 4 + 2.
        assert!((jc.matrix()[(6, 6)].re - 111.0).abs() < 1e-9);
    }

    #[test]
    fn scalar_entropy_closed_form() {
        let jc = JointCov::new(vec![Var::Y(1)], real(&[&[2.0]])).unwrap();
        let h = cond_entropy(&jc, &VarSet::ys(&[1]), &VarSet::empty()).unwrap();
        assert!((h - (PI * E * 2.0).log2()).abs() < 1e-12);
        assert!((h - 4.094_2).abs() < 1e-4);
    }

    #[test]
    fn independent_conditioning_is_ignored() {
        let m = real(&[&[2.0, 0.3, 0.0], &[0.3, 1.0, 0.0], &[0.0, 0.0, 5.0]]);
        let jc = JointCov::new(vec![Var::Y(1), Var::Y(2), Var::X(3)], m).unwrap();
        let t = VarSet::ys(&[1, 2]);
        let a = cond_entropy(&jc, &t, &VarSet::empty()).unwrap();
        let b = cond_entropy(&jc, &t, &VarSet::xs(&[3])).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn output_given_input_is_noise_entropy() {
        let jc = scalar_channel(1.0);
        let h = cond_entropy(&jc, &VarSet::ys(&[2]), &VarSet::xs(&[1])).unwrap();
        assert!((h - (PI * E).log2()).abs() < 1e-9);
    }

    #[test]
    fn scalar_mutual_information() {
        let jc = scalar_channel(3.0);
        let i = mutual_info(&jc, &VarSet::xs(&[1]), &VarSet::ys(&[2]), &VarSet::empty()).unwrap();
        assert!((i - 2.0).abs() < 1e-9);
    }

    #[test]
    fn multiple_access_sum() {
        let m = real(&[&[1.0, 0.0, 1.0], &[0.0, 1.0, 1.0], &[1.0, 1.0, 3.0]]);
        let jc = JointCov::new(vec![Var::X(1), Var::X(2), Var::Y(3)], m).unwrap();
        let i = mutual_info(&jc, &VarSet::xs(&[1, 2]), &VarSet::ys(&[3]), &VarSet::empty()).unwrap();
        assert!((i - 3f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn unlinked_input_carries_nothing() {
        let ch = ChannelParams::from_real_gains(
            2,
            &[vec![0.0; 4], vec![0.0; 4], vec![2.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]],
            vec![1.0; 4],
        )
        .unwrap();
        let jc = joint_covariance(&ch, &InputCovariance::diagonal(&[1.0; 4])).unwrap();
        let i = mutual_info(&jc, &VarSet::xs(&[1]), &VarSet::ys(&[4]), &VarSet::xs(&[2, 3])).unwrap();
        assert_eq!(i, 0.0);
    }

    #[test]
    fn deterministic_target_is_degenerate() {
        let jc = JointCov::new(vec![Var::X(1), Var::Y(2)], real(&[&[0.0, 0.0], &[0.0, 1.0]])).unwrap();
        let err = cond_entropy(&jc, &VarSet::xs(&[1]), &VarSet::empty()).unwrap_err();
        assert!(matches!(err, Error::Degenerate { .. }));
    }

    #[test]
    fn singular_conditioning_is_regularized() {
        // X1 = X2 exactly; conditioning on both equals conditioning on one.
        let m = real(&[&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0], &[1.0, 1.0, 2.0]]);
        let jc = JointCov::new(vec![Var::X(1), Var::X(2), Var::Y(3)], m).unwrap();
        let both = cond_entropy(&jc, &VarSet::ys(&[3]), &VarSet::xs(&[1, 2])).unwrap();
        let one = cond_entropy(&jc, &VarSet::ys(&[3]), &VarSet::xs(&[1])).unwrap();
        assert!((both - one).abs() < 1e-9);
    }

    #[test]
    fn argument_checks() {
        let jc = scalar_channel(1.0);
        let x = VarSet::xs(&[1]);
        assert!(mutual_info(&jc, &x, &x, &VarSet::empty()).is_err());
        assert!(cond_entropy(&jc, &VarSet::empty(), &x).is_err());
        assert!(cond_entropy(&jc, &VarSet::ys(&[7]), &x).is_err());
        assert!(VarSet::new([Var::X(1), Var::X(1)]).is_err());
        assert!(JointCov::new(vec![Var::X(1), Var::X(1)], CMatrix::identity(2, 2)).is_err());
        assert!(JointCov::new(vec![Var::X(1)], real(&[&[-1.0]])).is_err());
    }
}
