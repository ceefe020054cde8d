//! The Gaussian information engine on a small hand-built covariance and on a
//! channel: entropies, conditional covariances and the chain rule.
//!
//! ```text
//! cargo run --example gaussian_information
//! ```

use coopifc::bounds::InputCovariance;
use coopifc::gaussinfo::{cond_entropy, conditional_covariance, joint_covariance, mutual_info, JointCov, Var, VarSet};
use coopifc::model::{build_symmetric, SymmetricParams};
use coopifc::{CMatrix, C64};

fn main() -> coopifc::Result<()> {
    // Y3 = X1 + X2 + Z with unit powers.
    let m = CMatrix::from_fn(3, 3, |r, c| {
        let rows = [[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [1.0, 1.0, 3.0]];
        C64::new(rows[r][c], 0.0)
    });
    let jc = JointCov::new(vec![Var::X(1), Var::X(2), Var::Y(3)], m)?;
    let (x1, x2, y3) = (VarSet::xs(&[1]), VarSet::xs(&[2]), VarSet::ys(&[3]));
    let both = VarSet::xs(&[1, 2]);

    println!("multiple-access channel Y3 = X1 + X2 + Z");
    println!("  h(Y3)          = {:.6} bits", cond_entropy(&jc, &y3, &VarSet::empty())?);
    println!("  h(Y3 | X1)     = {:.6} bits", cond_entropy(&jc, &y3, &x1)?);
    println!("  I(X1,X2; Y3)   = {:.6} bits (log2 3 = {:.6})", mutual_info(&jc, &both, &y3, &VarSet::empty())?, 3f64.log2());
    let chain = mutual_info(&jc, &x1, &y3, &VarSet::empty())? + mutual_info(&jc, &x2, &y3, &x1)?;
    println!("  I(X1;Y3) + I(X2;Y3|X1) = {chain:.6} bits");

    // A symmetric two-pair channel at snr = 1000, alpha = 0.5.
    let ch = build_symmetric(&SymmetricParams::new(1e3, 0.5))?;
    let jc = joint_covariance(&ch, &InputCovariance::diagonal(&[1.0, 1.0, 0.0, 0.0]))?;
    let s = conditional_covariance(&jc, &VarSet::ys(&[3, 4]), &VarSet::xs(&[1]))?;
    println!("\nsymmetric channel, snr = 1e3, alpha = 0.5");
    println!("  Cov(Y3, Y4 | X1) real part:");
    for r in 0..2 {
        println!("    [{:>10.3} {:>10.3}]", s[(r, 0)].re, s[(r, 1)].re);
    }
    let direct = mutual_info(&jc, &VarSet::xs(&[1]), &VarSet::ys(&[3]), &VarSet::xs(&[2]))?;
    println!("  I(X1; Y3 | X2) = {direct:.6} bits (log2(1 + snr) = {:.6})", (1.0f64 + 1e3).log2());
    Ok(())
}
