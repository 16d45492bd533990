//! Error as a function of time on a uniform and a graded mesh: the uniform
//! mesh loses accuracy in the initial layer.

use subdiff::harness::{error_trace, sci, StudyConfig};

fn main() -> subdiff::Result<()> {
    let alpha = 0.6;
    let config = StudyConfig::new(alpha);
    let uniform = error_trace(&config, 1.0, 160, 400)?;
    let graded = error_trace(&config, 8.0 / (5.0 * alpha), 160, 400)?;
    println!("{:>12} {:>12} | {:>12} {:>12}", "t (uniform)", "error", "t (graded)", "error");
    for n in [0, 1, 2, 4, 9, 19, 39, 79, 159] {
        println!(
            "{:>12} {:>12} | {:>12} {:>12}",
            sci(uniform[n].0, 3),
            sci(uniform[n].1, 3),
            sci(graded[n].0, 3),
            sci(graded[n].1, 3)
        );
    }
    Ok(())
}
