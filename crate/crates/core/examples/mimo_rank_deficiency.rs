//! The fully cooperative MIMO limit under per-antenna power constraints: a
//! rank-one gain matrix loses one degree of freedom, a full-rank one does not.
//! Finite-SNR values approach the limits slowly (an additive constant over
//! `log2(1 + snr)`).
//!
//! ```text
//! cargo run --release --example mimo_rank_deficiency
//! ```

use coopifc::bounds::mimo_ultimate;
use coopifc::log2_1p;
use coopifc::model::ChannelParams;
use coopifc::optimize::OptimizerConfig;

fn dest_gains(g: [[f64; 2]; 2]) -> coopifc::Result<ChannelParams> {
    let mut rows = vec![vec![0.0; 4]; 4];
    rows[2][0] = g[0][0];
    rows[2][1] = g[0][1];
    rows[3][0] = g[1][0];
    rows[3][1] = g[1][1];
    ChannelParams::from_real_gains(2, &rows, vec![1.0, 1.0, 0.0, 0.0])
}

fn main() -> coopifc::Result<()> {
    let cfg = OptimizerConfig::default().with_restarts(8);
    println!("{:>8} {:>12} {:>12}", "snr", "rank one", "alpha = 0.5");
    for e in [2, 4, 8, 12, 16] {
        let snr = 10f64.powi(e);
        let s = snr.sqrt();
        let rank_one = mimo_ultimate(&dest_gains([[s, s], [s, s]])?, &cfg)? / log2_1p(snr);
        let c = snr.powf(0.25);
        let full = mimo_ultimate(&dest_gains([[s, c], [c, s]])?, &cfg)? / log2_1p(snr);
        println!("{:>8} {rank_one:>12.4} {full:>12.4}", format!("1e{e}"));
    }
    println!("rank one at any snr: log2(1 + 8 snr) / log2(1 + snr)");
    Ok(())
}
