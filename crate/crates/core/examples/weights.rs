//! Weights of the L1 approximation of the fractional integral, checked
//! against direct quadrature of their defining integrals.

use subdiff::frackernel::{weight_oracle, WeightTable};
use subdiff::harness::sci;
use subdiff::mesh::GradedMesh;
use subdiff::special::gamma;

fn main() -> subdiff::Result<()> {
    let alpha = 0.4;
    let mesh = GradedMesh::new(1.0, 6, 3.0)?;
    let table = WeightTable::full(&mesh, alpha)?;

    println!("row n = 6 (alpha = {alpha}, gamma = 3):");
    println!("{:>3} {:>12} {:>12} {:>10}", "j", "omega", "omega-hat", "|diff|");
    for j in 1..=6 {
        let (w, wh) = (table.primary(6, j)?, table.secondary(6, j)?);
        let (qw, qwh) = weight_oracle(&mesh, alpha, 6, j)?;
        let diff = (w - qw).abs().max((wh - qwh).abs());
        println!("{j:>3} {:>12} {:>12} {:>10}", sci(w, 5), sci(wh, 5), sci(diff, 1));
    }

    // Σ_j ω_nj integrates the kernel over [0, t_n].
    let sum: f64 = table.row(6)?.primary.iter().sum();
    let exact = mesh.t(6).powf(alpha) / gamma(alpha + 1.0);
    println!("\nsum of row = {sum:.15}, t^a/G(a+1) = {exact:.15}");
    Ok(())
}
