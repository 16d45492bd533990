//! A problem with a source term and variable diffusivity, where no series
//! solution exists: the final-time error is measured against a much finer run.

use subdiff::mesh::GradedMesh;
use subdiff::solver::{run, InitialProjection, Scheme};
use subdiff::{Problem, SpaceFunction, SpatialSystem};

fn main() -> subdiff::Result<()> {
    let alpha = 0.7;
    let problem = Problem::new(alpha, SpaceFunction::zero())?
        .with_kappa(|x| 1.0 + 0.5 * (6.0 * x).sin())
        .with_reaction(|_| 1.0)
        .with_source(|x, t| (1.0 + t) * x * (1.0 - x));
    let gamma = 2.0 / (1.25 * alpha);
    let sys = SpatialSystem::build(0.0, 1.0, 200, &problem)?;

    let fine = run(&problem, &GradedMesh::new(1.0, 1280, gamma)?, &sys, Scheme::L1, InitialProjection::Ritz)?;
    let reference = fine.last().to_vec();
    println!("reference U(0.5, 1) = {:.10}", sys.evaluate(&reference, 0.5));

    let mut prev = None;
    for n in [20, 40, 80, 160] {
        for scheme in [Scheme::L1, Scheme::Gcn] {
            let h = run(&problem, &GradedMesh::new(1.0, n, gamma)?, &sys, scheme, InitialProjection::Ritz)?;
            let diff = sys.l2_error(h.last(), |x| sys.evaluate(&reference, x))?;
            print!("N = {n:>4} {scheme:<3}: ||U^N - U_ref|| = {diff:.3e}");
            if scheme == Scheme::L1 {
                if let Some(p) = prev {
                    print!("  (rate {:.2})", f64::log2(p / diff));
                }
                prev = Some(diff);
            }
            println!();
        }
    }
    Ok(())
}
