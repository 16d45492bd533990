//! Time stepping: the L1 scheme and the generalized Crank–Nicolson (GCN)
//! scheme for `∂_t u + ∂_t I^α 𝒜u = f`, driven over a graded mesh.
//!
//! Both are obtained by integrating over `[t_{n−1}, t_n]` and replacing `u` in
//! `I^α 𝒜u` by an interpolant of the nodal values: piecewise linear for L1,
//! the midpoint average `(U^j + U^{j−1})/2` on each interval for GCN.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fem1d::{Problem, SpatialSystem};
use crate::frackernel::WeightTable;
use crate::mesh::GradedMesh;
use crate::special::gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Scheme {
    #[default]
    L1,
    Gcn,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::L1 => "l1",
            Scheme::Gcn => "gcn",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Scheme::L1),
            "gcn" => Ok(Scheme::Gcn),
            other => Err(Error::InvalidParameter(format!("unknown scheme '{other}' (expected l1 or gcn)"))),
        }
    }
}

/// How `U^0` is obtained from `u_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialProjection {
    /// Elliptic (Ritz) projection with respect to `𝒜`.
    Ritz,
    /// L2 projection onto the finite element space.
    #[default]
    L2,
}

/// All nodal coefficient vectors `U^0, …, U^N` of a run.
#[derive(Debug, Clone)]
pub struct SolutionHistory {
    mesh: GradedMesh,
    scheme: Scheme,
    coeffs: Vec<Vec<f64>>,
}

impl SolutionHistory {
    pub fn mesh(&self) -> &GradedMesh {
        &self.mesh
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// `U^n`
    pub fn at(&self, n: usize) -> &[f64] {
        &self.coeffs[n]
    }

    pub fn last(&self) -> &[f64] {
        self.coeffs.last().expect("history always holds U^0")
    }

    pub fn steps(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.mesh.nodes().iter().copied().zip(self.coeffs.iter().map(Vec::as_slice))
    }
}

fn check_step(table: &WeightTable, history: &[Vec<f64>], n: usize, dim: usize, load: &[f64]) -> Result<()> {
    if n == 0 || n > table.mesh().steps() {
        return Err(Error::Index(format!("step {n} outside 1..={}", table.mesh().steps())));
    }
    if history.len() < n {
        return Err(Error::Index(format!("step {n} needs U^0..U^{}, have {} vectors", n - 1, history.len())));
    }
    if load.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: load.len() });
    }
    if let Some(bad) = history[..n].iter().find(|u| u.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: bad.len() });
    }
    Ok(())
}

fn axpy(acc: &mut [f64], a: f64, x: &[f64]) {
    if a != 0.0 {
        for (y, v) in acc.iter_mut().zip(x) {
            *y += a * v;
        }
    }
}

/// `(w_n − w_{n−1})` for `j < n`, reading row `n − 1` only when it exists.
fn history_increment(table: &WeightTable, n: usize, j: usize, secondary: bool) -> Result<f64> {
    let get = |m: usize| if secondary { table.secondary(m, j) } else { table.primary(m, j) };
    Ok(get(n)? - get(n - 1)?)
}

/// One L1 step: returns `U^n` given `U^0..U^{n−1}` and the load `F^n`.
///
/// `(M + c_n G) U^n = (M − α c_n G) U^{n−1} − G Σ_{k<n} β_k U^k + F^n`,
/// `c_n = τ_n^α / Γ(α+2)`, where `β_k` collects the weight increments of the
/// linear interpolant on the intervals before `t_{n−1}`.
pub fn step_l1(sys: &SpatialSystem, table: &WeightTable, history: &[Vec<f64>], n: usize, load: &[f64]) -> Result<Vec<f64>> {
    check_step(table, history, n, sys.dim(), load)?;
    let mesh = table.mesh();
    let alpha = table.alpha();
    let c = mesh.step(n).powf(alpha) / gamma(alpha + 2.0);

    let mut acc = vec![0.0; sys.dim()];
    for j in 1..n {
        let d_omega = history_increment(table, n, j, false)?;
        let d_hat = history_increment(table, n, j, true)? / mesh.step(j);
        axpy(&mut acc, d_omega - d_hat, &history[j - 1]);
        axpy(&mut acc, d_hat, &history[j]);
    }
    axpy(&mut acc, alpha * c, &history[n - 1]);

    let mut rhs = sys.mass.mul_vec(&history[n - 1]);
    let g_acc = sys.stiff.mul_vec(&acc);
    for ((r, g), f) in rhs.iter_mut().zip(g_acc).zip(load) {
        *r += f - g;
    }
    sys.mass.combine(1.0, &sys.stiff, c).solve(&rhs)
}

/// One GCN step:
/// `(M + ω_nn/2 G) U^n = (M − ω_nn/2 G) U^{n−1} − G Σ_{j<n} (ω_nj − ω_{n−1,j})(U^j + U^{j−1})/2 + F^n`.
pub fn step_gcn(sys: &SpatialSystem, table: &WeightTable, history: &[Vec<f64>], n: usize, load: &[f64]) -> Result<Vec<f64>> {
    check_step(table, history, n, sys.dim(), load)?;
    let half = 0.5 * table.primary(n, n)?;

    let mut acc = vec![0.0; sys.dim()];
    for j in 1..n {
        let d = 0.5 * history_increment(table, n, j, false)?;
        axpy(&mut acc, d, &history[j - 1]);
        axpy(&mut acc, d, &history[j]);
    }
    axpy(&mut acc, half, &history[n - 1]);

    let mut rhs = sys.mass.mul_vec(&history[n - 1]);
    let g_acc = sys.stiff.mul_vec(&acc);
    for ((r, g), f) in rhs.iter_mut().zip(g_acc).zip(load) {
        *r += f - g;
    }
    sys.mass.combine(1.0, &sys.stiff, half).solve(&rhs)
}

/// Initial coefficients `U^0`.
pub fn initial_coefficients(problem: &Problem, sys: &SpatialSystem, init: InitialProjection) -> Result<Vec<f64>> {
    match init {
        InitialProjection::Ritz => sys.ritz_project(&problem.initial),
        InitialProjection::L2 => sys.l2_project(&problem.initial),
    }
}

/// Marches the chosen scheme from `t_0` to `t_N`.
pub fn run(
    problem: &Problem,
    mesh: &GradedMesh,
    sys: &SpatialSystem,
    scheme: Scheme,
    init: InitialProjection,
) -> Result<SolutionHistory> {
    if (problem.alpha - 0.0).is_nan() {
        return Err(Error::InvalidParameter("alpha is NaN".into()));
    }
    let mut table = WeightTable::rolling(mesh, problem.alpha)?;
    let mut coeffs = Vec::with_capacity(mesh.steps() + 1);
    coeffs.push(initial_coefficients(problem, sys, init)?);
    for n in 1..=mesh.steps() {
        let wrap = |e: Error| Error::Step { step: n, source: Box::new(e) };
        table.advance_to(n).map_err(wrap)?;
        let load = sys.load_vector(problem, mesh.t(n - 1), mesh.t(n)).map_err(wrap)?;
        let next = match scheme {
            Scheme::L1 => step_l1(sys, &table, &coeffs, n, &load),
            Scheme::Gcn => step_gcn(sys, &table, &coeffs, n, &load),
        }
        .map_err(wrap)?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step: n });
        }
        coeffs.push(next);
    }
    Ok(SolutionHistory { mesh: mesh.clone(), scheme, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem1d::SpaceFunction;

    fn setup(alpha: f64, elements: usize, steps: usize, gamma: f64) -> (Problem, GradedMesh, SpatialSystem) {
        let init = SpaceFunction::new(|x| x * (1.0 - x)).with_derivative(|x| 1.0 - 2.0 * x);
        let problem = Problem::new(alpha, init).unwrap();
        let mesh = GradedMesh::new(1.0, steps, gamma).unwrap();
        let sys = SpatialSystem::build(0.0, 1.0, elements, &problem).unwrap();
        (problem, mesh, sys)
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("l1".parse::<Scheme>().unwrap(), Scheme::L1);
        assert_eq!("GCN".parse::<Scheme>().unwrap(), Scheme::Gcn);
        assert!("cn".parse::<Scheme>().is_err());
        assert_eq!(Scheme::Gcn.to_string(), "gcn");
    }

    #[test]
    fn zero_data_stays_zero() {
        let problem = Problem::new(0.5, SpaceFunction::zero()).unwrap();
        let mesh = GradedMesh::new(1.0, 12, 2.0).unwrap();
        let sys = SpatialSystem::build(0.0, 1.0, 8, &problem).unwrap();
        for scheme in [Scheme::L1, Scheme::Gcn] {
            let h = run(&problem, &mesh, &sys, scheme, InitialProjection::Ritz).unwrap();
            assert!(h.iter().all(|(_, u)| u.iter().all(|&v| v == 0.0)));
        }
    }

    fn crank_nicolson(sys: &SpatialSystem, mesh: &GradedMesh, u0: Vec<f64>) -> Vec<Vec<f64>> {
        let mut out = vec![u0];
        for n in 1..=mesh.steps() {
            let k = mesh.step(n) / 2.0;
            let rhs = sys.mass.combine(1.0, &sys.stiff, -k).mul_vec(out.last().unwrap());
            out.push(sys.mass.combine(1.0, &sys.stiff, k).solve(&rhs).unwrap());
        }
        out
    }

    #[test]
    fn unit_order_reduces_to_crank_nicolson() {
        let (problem, mesh, sys) = setup(1.0, 10, 16, 2.5);
        let u0 = sys.l2_project(&problem.initial).unwrap();
        let cn = crank_nicolson(&sys, &mesh, u0);
        for scheme in [Scheme::L1, Scheme::Gcn] {
            let h = run(&problem, &mesh, &sys, scheme, InitialProjection::L2).unwrap();
            for (n, reference) in cn.iter().enumerate() {
                for (a, b) in h.at(n).iter().zip(reference) {
                    assert!((a - b).abs() <= 1e-13, "{scheme} step {n}");
                }
            }
        }
    }

    #[test]
    fn decays_and_is_deterministic() {
        let (problem, mesh, sys) = setup(0.5, 16, 20, 2.0);
        let a = run(&problem, &mesh, &sys, Scheme::L1, InitialProjection::L2).unwrap();
        let b = run(&problem, &mesh, &sys, Scheme::L1, InitialProjection::L2).unwrap();
        assert_eq!(a.last(), b.last());
        let mid = |u: &[f64]| u[u.len() / 2];
        assert!(mid(a.last()) < mid(a.at(0)) && mid(a.last()) > 0.0);
    }

    #[test]
    fn step_argument_checks() {
        let (_, mesh, sys) = setup(0.5, 4, 3, 1.0);
        let mut table = WeightTable::rolling(&mesh, 0.5).unwrap();
        table.advance_to(1).unwrap();
        let hist = vec![vec![0.0; 3]];
        assert!(matches!(step_l1(&sys, &table, &hist, 0, &[0.0; 3]), Err(Error::Index(_))));
        assert!(matches!(step_l1(&sys, &table, &hist, 2, &[0.0; 3]), Err(Error::Index(_))));
        assert!(matches!(
            step_gcn(&sys, &table, &hist, 1, &[0.0; 2]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
    }
}
