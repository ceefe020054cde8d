//! Closed-form symmetric GDoF: the W- and V-curves, every cooperation mode at
//! a few interference levels, and the data of the two comparison figures.
//!
//! ```text
//! cargo run --example gdof_curves -- [output-dir]
//! ```

use std::fs;
use std::path::PathBuf;

use coopifc::cli::{curves_svg, figure_curves};
use coopifc::gdof::{gdof_bounds, mode_curve, v_curve, w_curve, write_csv, ExponentParams};
use coopifc::model::ModeTag;

fn main() -> coopifc::Result<()> {
    println!("{:>6} {:>6} {:>6}", "alpha", "W", "V");
    for i in 0..=12 {
        let a = 0.25 * i as f64;
        println!("{a:>6.2} {:>6.3} {:>6.3}", w_curve(a), v_curve(a));
    }

    let beta = 0.125;
    println!("\nper-user d at beta = {beta}:");
    print!("{:>22}", "mode \\ alpha");
    let alphas = [0.25, 0.5, 1.0, 1.5, 2.5];
    for a in alphas {
        print!("{a:>8.2}");
    }
    println!();
    for mode in ModeTag::ALL {
        print!("{:>22}", mode.name());
        for a in alphas {
            let v = mode_curve(mode, a, beta)?;
            print!("{:>7.3}{}", v.d, if v.tight { ' ' } else { '*' });
        }
        println!();
    }
    println!("(* = upper bound not known to be tight)");

    let e = ExponentParams { alpha: 0.5, beta_s: 0.3, delta1: 0.2, delta2: 0.1, ..Default::default() };
    let b = gdof_bounds(&e);
    println!("\nbound lines (2d) for {e:?}:");
    for (id, v) in &b.lines {
        println!("  {:<14} {v:.3}", id.label());
    }
    println!("  binding: {} -> d = {:.3}", b.binding, b.d());

    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    fs::create_dir_all(&dir)?;
    for which in [2u8, 3] {
        let curves = figure_curves(which)?;
        let csv = dir.join(format!("fig{which}.csv"));
        write_csv(fs::File::create(&csv)?, &curves)?;
        let svg = dir.join(format!("fig{which}.svg"));
        fs::write(&svg, curves_svg(&format!("figure {which}"), &curves))?;
        println!("\nwrote {} and {}", csv.display(), svg.display());
    }
    Ok(())
}
