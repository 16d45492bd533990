//! Graded temporal meshes `t_i = (i τ)^γ` with `τ = T^{1/γ} / N`.

use crate::error::{Error, Result};

/// Temporal grid `0 = t_0 < t_1 < … < t_N = T`, graded towards `t = 0`.
///
/// Nodes are evaluated from the closed formula (never accumulated) and the
/// last node is pinned to `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedMesh {
    final_time: f64,
    gamma: f64,
    tau: f64,
    nodes: Vec<f64>,
}

impl GradedMesh {
    pub fn new(final_time: f64, steps: usize, gamma: f64) -> Result<Self> {
        if !(final_time > 0.0) || !final_time.is_finite() {
            return Err(Error::InvalidParameter(format!("final time must be > 0, got {final_time}")));
        }
        if steps < 1 {
            return Err(Error::InvalidParameter("need at least one time step".into()));
        }
        if !(gamma >= 1.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("grading exponent must be >= 1, got {gamma}")));
        }
        let tau = final_time.powf(1.0 / gamma) / steps as f64;
        let mut nodes: Vec<f64> = (0..=steps).map(|i| (i as f64 * tau).powf(gamma)).collect();
        nodes[steps] = final_time;
        Ok(Self { final_time, gamma, tau, nodes })
    }

    /// Uniform mesh (γ = 1).
    pub fn uniform(final_time: f64, steps: usize) -> Result<Self> {
        Self::new(final_time, steps, 1.0)
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    /// Number of subintervals N.
    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Base step τ.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn t(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// Length of the n-th subinterval, `τ_n = t_n − t_{n−1}` for `n ≥ 1`.
    pub fn step(&self, n: usize) -> f64 {
        self.nodes[n] - self.nodes[n - 1]
    }

    pub fn check_properties(&self) -> PropertyReport {
        check_mesh_properties(self)
    }
}

/// Which constant-free mesh inequality failed at a given index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshProperty {
    /// `t_n ≤ 2^γ t_{n−1}`
    Doubling,
    /// `γ τ t_{n−1}^{1−1/γ} ≤ τ_n`
    StepLowerBound,
    /// `τ_n ≤ γ τ t_n^{1−1/γ}`
    StepUpperBound,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PropertyReport {
    pub violations: Vec<(usize, MeshProperty)>,
    pub checked: usize,
}

impl PropertyReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

// `lhs <= rhs` up to a few ulps of `scale`. Both sides carry independent
// powf roundings (t_2 = 2^γ t_1 holds with equality), and step lengths are
// differences of nodes, so the slack is measured against t_n, not τ_n.
fn le_with_slack(lhs: f64, rhs: f64, scale: f64) -> bool {
    lhs <= rhs + 4.0 * f64::EPSILON * scale.abs()
}

/// Checks, for every `n ≥ 2`, the two mesh inequalities that carry no
/// unknown constant.
pub fn check_mesh_properties(mesh: &GradedMesh) -> PropertyReport {
    let g = mesh.gamma;
    let tau = mesh.tau;
    let expo = 1.0 - 1.0 / g;
    let mut report = PropertyReport::default();
    for n in 2..=mesh.steps() {
        let (prev, cur) = (mesh.t(n - 1), mesh.t(n));
        let step = mesh.step(n);
        report.checked += 1;
        if !le_with_slack(cur, 2f64.powf(g) * prev, cur) {
            report.violations.push((n, MeshProperty::Doubling));
        }
        if !le_with_slack(g * tau * prev.powf(expo), step, cur) {
            report.violations.push((n, MeshProperty::StepLowerBound));
        }
        if !le_with_slack(step, g * tau * cur.powf(expo), cur) {
            report.violations.push((n, MeshProperty::StepUpperBound));
        }
    }
    report
}
