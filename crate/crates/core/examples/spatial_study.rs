//! Spatial convergence at a time resolution fine enough that the space error
//! dominates.

use subdiff::harness::{spatial_study, StudyConfig};

fn main() -> subdiff::Result<()> {
    for alpha in [0.3, 0.8] {
        let report = spatial_study(&StudyConfig::spatial_defaults(alpha))?;
        print!("{}", report.to_text());
    }
    Ok(())
}
