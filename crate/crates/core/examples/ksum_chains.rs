//! Partial-sum-rate term chains for K user pairs: generation, evaluation on
//! a random Gaussian channel, the grouped-entropy consistency check, and the
//! tightest ordering.
//!
//! ```text
//! cargo run --release --example ksum_chains
//! ```

use coopifc::bounds::InputCovariance;
use coopifc::ksum::{consistency_check, eval_all_orders, eval_terms, generate_terms, generate_terms_with, DestInputs};
use coopifc::model::ChannelParams;
use coopifc::{CMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_channel(k: usize, rng: &mut impl Rng) -> coopifc::Result<ChannelParams> {
    let n = 2 * k;
    let h = CMatrix::from_fn(n, n, |r, c| {
        if r == c {
            C64::new(0.0, 0.0)
        } else {
            C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
        }
    });
    let mut p = vec![1.0; n];
    for v in &mut p[k..] {
        *v = 0.0;
    }
    ChannelParams::new(k, h, p, CMatrix::identity(n, n), vec![0.0; n])
}

fn main() -> coopifc::Result<()> {
    let spec = generate_terms(4, &[1, 2, 3])?;
    println!("K = 4, S = (1,2,3):\n{spec}");
    println!("with destination inputs:\n{}", generate_terms_with(4, &[1, 2, 3], DestInputs::Condition)?);

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ch = random_channel(4, &mut rng)?;
    let q = InputCovariance::diagonal(&ch.p);
    println!("random K = 4 channel, independent unit-power sources:");
    println!("  chain value         {:.6} bits", eval_terms(&ch, &q, &spec)?);
    println!("  grouped-form error  {:.2e}", consistency_check(&ch, &q, &spec)?);

    println!("\nall orderings of S = {{1,2,3}}:");
    let all = eval_all_orders(&ch, &q, &[1, 2, 3], DestInputs::Auto)?;
    for v in &all {
        println!("  {:?}  {:.6}", v.order, v.total_bits);
    }
    let best = all.iter().min_by(|a, b| a.total_bits.total_cmp(&b.total_bits)).expect("nonempty");
    println!("tightest: {:?}", best.order);
    Ok(())
}
