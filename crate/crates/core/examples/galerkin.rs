//! Piecewise-linear elements: assembly, projections and O(h²) L2 errors.

use std::f64::consts::PI;

use subdiff::fem1d::{Problem, SpaceFunction, SpatialSystem};

fn main() -> subdiff::Result<()> {
    let w = SpaceFunction::new(|x| (PI * x).sin()).with_derivative(|x| PI * (PI * x).cos());
    // variable diffusivity and a reaction term
    let problem = Problem::new(0.5, w.clone())?
        .with_kappa(|x| 1.0 + x * x)
        .with_reaction(|_| 2.0);

    println!("{:>5} {:>12} {:>12} {:>12}", "M", "L2 proj", "Ritz proj", "interp");
    let mut prev: Option<[f64; 3]> = None;
    for m in [8, 16, 32, 64, 128] {
        let sys = SpatialSystem::build(0.0, 1.0, m, &problem)?;
        let exact = |x: f64| (PI * x).sin();
        let errs = [
            sys.l2_error_refined(&sys.l2_project(&w)?, exact, 8)?,
            sys.l2_error_refined(&sys.ritz_project(&w)?, exact, 8)?,
            sys.l2_error_refined(&sys.interpolate(exact), exact, 8)?,
        ];
        print!("{m:>5}");
        for (i, e) in errs.iter().enumerate() {
            match prev {
                Some(p) => print!(" {e:>8.2e}({:.2})", (p[i] / e).log2()),
                None => print!(" {e:>12.3e}"),
            }
        }
        println!();
        prev = Some(errs);
    }
    Ok(())
}
