//! Channel descriptions: the symmetric exponent model, cooperation presets,
//! JSON round trips and validation diagnostics.
//!
//! ```text
//! cargo run --example channel_files
//! ```

use coopifc::model::{apply_mode, build_symmetric, validate_channel, ChannelParams, CooperationMode, ModeTag, SymmetricParams};
use coopifc::C64;

fn main() -> coopifc::Result<()> {
    let mut sym = SymmetricParams::new(100.0, 0.5);
    sym.beta_s = 0.5;
    sym.kappa = 0.25;
    let ch = build_symmetric(&sym)?;
    println!("received powers |h|^2 P, snr = 100:");
    for r in 0..4 {
        let row: Vec<String> = (0..4).map(|c| format!("{:>8.2}", ch.received_power(r, c))).collect();
        println!("  {}", row.join(""));
    }
    println!("out-of-band capacities: {:?}", ch.c);

    for tag in ModeTag::ALL {
        let setup = apply_mode(&CooperationMode::preset(tag, 0.5), &SymmetricParams::new(1e3, 0.8));
        match setup.channel() {
            Ok(ch) => println!("{:<22} powers {:?} budget {:?}", tag.name(), ch.p, ch.budget),
            Err(e) => println!("{:<22} {e}", tag.name()),
        }
    }

    let json = ch.to_json_string();
    let back = ChannelParams::from_json_str(&json)?;
    println!("\nJSON round trip exact: {}", back == ch);

    let mut bad = ch.clone();
    bad.h[(0, 0)] = C64::new(0.3, 0.0);
    bad.sigma_z[(0, 1)] = C64::new(2.0, 0.0);
    bad.sigma_z[(1, 0)] = C64::new(2.0, 0.0);
    println!("diagnostics for a broken channel:");
    for d in validate_channel(&bad) {
        println!("  {d}");
    }
    Ok(())
}
