//! Cut-set and sum-rate bounds of a cooperative channel: values at a fixed
//! input covariance, then maximized, then combined into the sum-rate bound.
//!
//! ```text
//! cargo run --release --example cutset_bounds
//! ```

use coopifc::bounds::{eval_cutset, eval_generic_cut, eval_thm2, maximize, sum_rate_upper, CutSpec, InputCovariance};
use coopifc::model::{build_symmetric, SymmetricParams};
use coopifc::optimize::OptimizerConfig;

fn main() -> coopifc::Result<()> {
    // Sources hear each other at snr^0.4; destinations are silent.
    let mut sym = SymmetricParams::new(1e4, 0.6);
    sym.beta_s = 0.4;
    let mut ch = build_symmetric(&sym)?;
    ch.p[2] = 0.0;
    ch.p[3] = 0.0;

    let q = InputCovariance::diagonal(&ch.p);
    println!("independent full-power inputs:");
    for v in eval_cutset(&ch, &q)?.into_iter().chain(eval_thm2(&ch, &q)?) {
        println!("  {:<8} in-band {:>8.4}  budget {:>6.3}  total {:>8.4}", v.id.label(), v.inband_bits, v.oob_budget_bits, v.total_bits);
    }
    let cut = CutSpec::new([1, 3], 4)?;
    println!("  cut S = {{{cut}}}: {:.4}", eval_generic_cut(&ch, &q, &cut)?.total_bits);

    let cfg = OptimizerConfig::default().with_restarts(8);
    println!("\nmaximized over the input covariance (8 restarts):");
    let sr = sum_rate_upper(&ch, &cfg)?;
    for r in &sr.reports {
        println!(
            "  {:<14} {:>8.4} bits  (best restart {}, {} sweeps)",
            r.id.label(),
            r.total_bits,
            r.optimizer_trace.best_restart,
            r.optimizer_trace.iterations
        );
    }
    println!("\nsum-rate candidates:");
    for c in &sr.constituents {
        println!("  {:<20} {:>8.4}", c.label, c.bits);
    }
    println!("sum-rate upper bound: {:.4} bits ({})", sr.headline_bits, sr.binding);

    let single = maximize(&ch, &coopifc::bounds::BoundId::CutR1c, &cfg)?;
    println!("\nQ* for cut-r1c:\n{}", serde_json::to_string(&single.q_star).expect("serializable"));
    Ok(())
}
