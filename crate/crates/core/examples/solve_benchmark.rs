//! One run of the L1 and GCN schemes on the benchmark problem
//! `u_0 = x(1 − x)`, `f = 0`, compared with the series solution.

use subdiff::harness::max_error;
use subdiff::mesh::GradedMesh;
use subdiff::mittag_leffler::SeriesSolution;
use subdiff::solver::{run, InitialProjection, Scheme};
use subdiff::SpatialSystem;

fn main() -> subdiff::Result<()> {
    let alpha = 0.5;
    let sol = SeriesSolution::new(alpha)?;
    let problem = sol.problem()?;
    let sys = SpatialSystem::build(0.0, 1.0, 400, &problem)?;

    for gamma in [1.0, 2.0, 3.2] {
        let mesh = GradedMesh::new(1.0, 80, gamma)?;
        for scheme in [Scheme::L1, Scheme::Gcn] {
            let history = run(&problem, &mesh, &sys, scheme, InitialProjection::L2)?;
            let e = max_error(&history, &sys, &sol, 4)?;
            let mid = sys.evaluate(history.last(), 0.5);
            println!(
                "gamma = {gamma:<3} {scheme:<3}: max error {e:.3e}, U(0.5, 1) = {mid:.8} (series {:.8})",
                sol.value(0.5, 1.0)?
            );
        }
    }
    Ok(())
}
