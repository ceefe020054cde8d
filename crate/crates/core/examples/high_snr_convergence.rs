//! Compares the numerically maximized sum-rate bound with its closed-form
//! GDoF limit on the non-cooperative channel.
//!
//! ```text
//! cargo run --release --example high_snr_convergence -- [snr] [restarts]
//! ```

use std::time::Instant;

use coopifc::bounds::sum_rate_upper;
use coopifc::gdof::{gdof_bounds, ExponentParams};
use coopifc::log2_1p;
use coopifc::model::{apply_mode, CooperationMode, ModeTag, SymmetricParams};
use coopifc::optimize::OptimizerConfig;

fn main() -> coopifc::Result<()> {
    let mut args = std::env::args().skip(1);
    let snr: f64 = args.next().map_or(1e8, |s| s.parse().expect("snr"));
    let restarts: usize = args.next().map_or(8, |s| s.parse().expect("restarts"));
    let cfg = OptimizerConfig::default().with_restarts(restarts);
    let mode = CooperationMode::preset(ModeTag::NoCoop, 0.0);

    println!("snr = {snr:e}, restarts = {restarts}");
    println!("{:>6} {:>10} {:>10} {:>8}  binding", "alpha", "numeric", "closed", "gap");
    for i in 0..=12 {
        let alpha = 0.25 * i as f64;
        let start = Instant::now();
        let ch = apply_mode(&mode, &SymmetricParams::new(snr, alpha)).channel()?;
        let report = sum_rate_upper(&ch, &cfg)?;
        let numeric = report.headline_bits / log2_1p(snr);
        let closed = gdof_bounds(&ExponentParams::no_coop(alpha)).min_two_d;
        println!(
            "{alpha:>6.2} {numeric:>10.4} {closed:>10.4} {:>8.4}  {} ({:.2?})",
            numeric - closed,
            report.binding,
            start.elapsed()
        );
    }
    Ok(())
}
