//! E_α(−x) on the negative axis: values, evaluation routes and their overlap.

use subdiff::harness::sci;
use subdiff::mittag_leffler::{ml_neg, MittagLeffler};

fn main() -> subdiff::Result<()> {
    println!("{:>6} {:>14} {:>14} {:>14}", "x", "E_0.3", "E_0.5", "E_0.9");
    for x in [0.0, 0.5, 1.0, 5.0, 20.0, 100.0, 1e4] {
        let v = [ml_neg(0.3, x)?, ml_neg(0.5, x)?, ml_neg(0.9, x)?];
        println!("{x:>6} {:>14} {:>14} {:>14}", sci(v[0], 8), sci(v[1], 8), sci(v[2], 8));
    }

    println!("\nswitch points and route agreement:");
    for alpha in [0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
        let ml = MittagLeffler::new(alpha)?;
        let (s, a) = ml.switch_points();
        let r = ml.check_overlap()?;
        println!(
            "  alpha = {alpha:<4}  series <= {s:.3}, asymptotic >= {a:.3}, worst disagreement {}",
            sci(r.max(), 1)
        );
    }
    Ok(())
}
