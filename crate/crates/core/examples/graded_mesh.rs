//! Graded time meshes and their constant-free step inequalities.

use subdiff::mesh::GradedMesh;

fn main() -> subdiff::Result<()> {
    for gamma in [1.0, 2.0, 4.0] {
        let mesh = GradedMesh::new(1.0, 8, gamma)?;
        let nodes: Vec<String> = mesh.nodes().iter().map(|t| format!("{t:.5}")).collect();
        println!("gamma = {gamma}: [{}]", nodes.join(", "));
        println!("  first step {:.3e}, last step {:.3e}", mesh.step(1), mesh.step(8));
    }

    let mesh = GradedMesh::new(1.0, 640, 5.0)?;
    let report = mesh.check_properties();
    println!(
        "\ngamma = 5, N = 640: {} inequalities checked, {} violated",
        report.checked,
        report.violations.len()
    );
    Ok(())
}
