//! Temporal convergence for α = 0.4 on uniform and graded meshes, with space
//! refined together with time (M = N).

use subdiff::harness::{doubling, temporal_study, SpatialPolicy, StudyConfig};

fn main() -> subdiff::Result<()> {
    let mut config = StudyConfig::new(0.4);
    config.gammas = vec![1.0, 2.0, 3.0, 4.0];
    config.steps = doubling(20, 4);
    config.spatial = SpatialPolicy::TiedToN;
    let report = temporal_study(&config)?;
    print!("{}", report.to_text());
    println!("\n{}", report.to_csv());
    Ok(())
}
