//! Continuous piecewise-linear Galerkin elements on a uniform partition of
//! an interval, with homogeneous Dirichlet conditions.
//!
//! Only interior nodes carry unknowns, so every matrix here is `d_h × d_h`
//! with `d_h = elements − 1`.

mod tridiag;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frackernel::check_alpha;
use crate::quad::{GAUSS2, GAUSS3, GAUSS4};

pub use tridiag::{tridiagonal_solve, SymTridiagonal};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A function of space with an optional analytic derivative.
#[derive(Clone)]
pub struct SpaceFunction {
    value: ScalarFn,
    derivative: Option<ScalarFn>,
}

impl SpaceFunction {
    pub fn new(value: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { value: Arc::new(value), derivative: None }
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0).with_derivative(|_| 0.0)
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    /// Analytic derivative when supplied, otherwise a fourth-order central
    /// difference.
    pub fn derivative(&self, x: f64) -> f64 {
        match &self.derivative {
            Some(d) => d(x),
            None => {
                let h = 1e-3 * x.abs().max(1.0);
                let f = &self.value;
                (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
            }
        }
    }
}

impl fmt::Debug for SpaceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpaceFunction")
            .field("analytic_derivative", &self.derivative.is_some())
            .finish()
    }
}

/// `∂_t u + ∂_t^{1−α} 𝒜u = f`, `𝒜u = −(κ u')' + d u`, with `u(·,0) = u_0`.
#[derive(Clone)]
pub struct Problem {
    pub alpha: f64,
    pub kappa: ScalarFn,
    pub reaction: ScalarFn,
    /// `None` means `f ≡ 0`.
    pub source: Option<SpaceTimeFn>,
    pub initial: SpaceFunction,
    pub exact: Option<SpaceTimeFn>,
}

impl Problem {
    /// κ = 1, d = 0, f = 0.
    pub fn new(alpha: f64, initial: SpaceFunction) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            alpha,
            kappa: Arc::new(|_| 1.0),
            reaction: Arc::new(|_| 0.0),
            source: None,
            initial,
            exact: None,
        })
    }

    pub fn with_kappa(mut self, k: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.kappa = Arc::new(k);
        self
    }

    pub fn with_reaction(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.reaction = Arc::new(d);
        self
    }

    pub fn with_source(mut self, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.source = Some(Arc::new(f));
        self
    }

    pub fn with_exact(mut self, u: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.exact = Some(Arc::new(u));
        self
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("alpha", &self.alpha)
            .field("has_source", &self.source.is_some())
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

/// Uniform P1 partition of `[a, b]` with assembled mass and stiffness matrices.
#[derive(Clone)]
pub struct SpatialSystem {
    a: f64,
    b: f64,
    elements: usize,
    h: f64,
    kappa: ScalarFn,
    reaction: ScalarFn,
    pub mass: SymTridiagonal,
    pub stiff: SymTridiagonal,
}

impl fmt::Debug for SpatialSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpatialSystem")
            .field("interval", &(self.a, self.b))
            .field("elements", &self.elements)
            .field("mass", &self.mass)
            .field("stiff", &self.stiff)
            .finish()
    }
}

impl SpatialSystem {
    /// Assembles `M = [⟨φ_q, φ_p⟩]` and `G = [A(φ_q, φ_p)]` with two-point
    /// Gauss quadrature on each element.
    pub fn build(a: f64, b: f64, elements: usize, problem: &Problem) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!("need a < b, got [{a}, {b}]")));
        }
        if elements < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 elements, got {elements}")));
        }
        let h = (b - a) / elements as f64;
        let dim = elements - 1;
        let mut m_diag = vec![0.0; dim];
        let mut m_off = vec![0.0; dim.saturating_sub(1)];
        let mut g_diag = vec![0.0; dim];
        let mut g_off = vec![0.0; dim.saturating_sub(1)];

        for e in 0..elements {
            let xl = a + e as f64 * h;
            let xr = if e + 1 == elements { b } else { xl + h };
            // local 2×2 matrices, index 0 = left node, 1 = right node
            let mut mloc = [[0.0; 2]; 2];
            let mut gloc = [[0.0; 2]; 2];
            for (x, w) in GAUSS2.on(xl, xr) {
                let k = (problem.kappa)(x);
                if !(k > 0.0) {
                    return Err(Error::NonPositiveDiffusivity { x, value: k });
                }
                let d = (problem.reaction)(x);
                let s = (x - xl) / h;
                let phi = [1.0 - s, s];
                let dphi = [-1.0 / h, 1.0 / h];
                for p in 0..2 {
                    for q in 0..2 {
                        mloc[p][q] += w * phi[p] * phi[q];
                        gloc[p][q] += w * (k * dphi[p] * dphi[q] + d * phi[p] * phi[q]);
                    }
                }
            }
            // global interior index of the element's left node is e − 1
            let left = e.checked_sub(1);
            let right = (e + 1 < elements).then_some(e);
            if let Some(l) = left {
                m_diag[l] += mloc[0][0];
                g_diag[l] += gloc[0][0];
            }
            if let Some(r) = right {
                m_diag[r] += mloc[1][1];
                g_diag[r] += gloc[1][1];
            }
            if let (Some(l), Some(_)) = (left, right) {
                m_off[l] += mloc[0][1];
                g_off[l] += gloc[0][1];
            }
        }

        Ok(Self {
            a,
            b,
            elements,
            h,
            kappa: problem.kappa.clone(),
            reaction: problem.reaction.clone(),
            mass: SymTridiagonal { diag: m_diag, off: m_off },
            stiff: SymTridiagonal { diag: g_diag, off: g_off },
        })
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    /// Number of interior unknowns `d_h`.
    pub fn dim(&self) -> usize {
        self.elements - 1
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.elements {
            self.b
        } else {
            self.a + i as f64 * self.h
        }
    }

    /// Interior node coordinates `x_1 … x_{d_h}`.
    pub fn interior_nodes(&self) -> Vec<f64> {
        (1..self.elements).map(|i| self.node(i)).collect()
    }

    fn element_bounds(&self, e: usize) -> (f64, f64) {
        (self.node(e), self.node(e + 1))
    }

    /// Coefficient of node `i` (0 ..= elements) in `coeffs`, zero on the boundary.
    fn nodal(coeffs: &[f64], i: usize) -> f64 {
        if i == 0 || i > coeffs.len() {
            0.0
        } else {
            coeffs[i - 1]
        }
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        Ok(())
    }

    /// Value of the finite element function with interior coefficients `coeffs` at `x`.
    pub fn evaluate(&self, coeffs: &[f64], x: f64) -> f64 {
        let e = (((x - self.a) / self.h).floor().max(0.0) as usize).min(self.elements - 1);
        let (xl, _) = self.element_bounds(e);
        let s = (x - xl) / self.h;
        Self::nodal(coeffs, e) * (1.0 - s) + Self::nodal(coeffs, e + 1) * s
    }

    /// Accumulates `∫ g φ_p` over the elements with the given rule,
    /// `g(x, s)` receiving the physical point and local coordinate.
    fn load_with(&self, rule: &crate::quad::GaussRule, mut g: impl FnMut(f64) -> (f64, f64)) -> Vec<f64> {
        // g returns (coefficient of φ, coefficient of φ')
        let mut r = vec![0.0; self.dim()];
        for e in 0..self.elements {
            let (xl, xr) = self.element_bounds(e);
            let (mut left, mut right) = (0.0, 0.0);
            for (x, w) in rule.on(xl, xr) {
                let s = (x - xl) / self.h;
                let (c0, c1) = g(x);
                left += w * (c0 * (1.0 - s) - c1 / self.h);
                right += w * (c0 * s + c1 / self.h);
            }
            if e > 0 {
                r[e - 1] += left;
            }
            if e + 1 < self.elements {
                r[e] += right;
            }
        }
        r
    }

    /// Ritz projection: solves `G c = [A(w, φ_p)]`, the right-hand side by
    /// four-point Gauss per element.
    pub fn ritz_project(&self, w: &SpaceFunction) -> Result<Vec<f64>> {
        let rhs = self.load_with(&GAUSS4, |x| {
            let k = (self.kappa)(x);
            let d = (self.reaction)(x);
            (d * w.value(x), k * w.derivative(x))
        });
        self.stiff.solve(&rhs)
    }

    /// L2 projection: solves `M c = [⟨w, φ_p⟩]`.
    pub fn l2_project(&self, w: &SpaceFunction) -> Result<Vec<f64>> {
        let rhs = self.load_with(&GAUSS4, |x| (w.value(x), 0.0));
        self.mass.solve(&rhs)
    }

    /// Nodal interpolant at interior nodes.
    pub fn interpolate(&self, w: impl Fn(f64) -> f64) -> Vec<f64> {
        self.interior_nodes().into_iter().map(w).collect()
    }

    /// `F_p = ∫_{t_start}^{t_end} ⟨f(t), φ_p⟩ dt`, three-point Gauss in time
    /// and two-point Gauss in space.
    pub fn load_vector(&self, problem: &Problem, t_start: f64, t_end: f64) -> Result<Vec<f64>> {
        if !(t_start < t_end) {
            return Err(Error::InvalidParameter(format!("need t_start < t_end, got {t_start} >= {t_end}")));
        }
        let Some(f) = &problem.source else {
            return Ok(vec![0.0; self.dim()]);
        };
        let mut total = vec![0.0; self.dim()];
        for (t, wt) in GAUSS3.on(t_start, t_end) {
            let part = self.load_with(&GAUSS2, |x| (f(x, t), 0.0));
            for (acc, v) in total.iter_mut().zip(part) {
                *acc += wt * v;
            }
        }
        Ok(total)
    }

    /// Residual `[A(w − R_h w, φ_p)]` of a candidate projection, for checking
    /// Galerkin orthogonality.
    pub fn ritz_residual(&self, w: &SpaceFunction, coeffs: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(coeffs)?;
        let rhs = self.load_with(&GAUSS4, |x| {
            let k = (self.kappa)(x);
            let d = (self.reaction)(x);
            (d * w.value(x), k * w.derivative(x))
        });
        let gc = self.stiff.mul_vec(coeffs);
        Ok(rhs.iter().zip(gc).map(|(r, g)| r - g).collect())
    }

    /// Two-point Gauss points on each element split into `refine` equal
    /// sub-elements.
    pub fn error_quadrature(&self, refine: usize) -> ErrorQuadrature {
        let refine = refine.max(1);
        let sub = self.h / refine as f64;
        let mut q = ErrorQuadrature::default();
        for e in 0..self.elements {
            let (xl, _) = self.element_bounds(e);
            for k in 0..refine {
                let sl = xl + k as f64 * sub;
                for (x, w) in GAUSS2.on(sl, sl + sub) {
                    q.points.push(x);
                    q.weights.push(w);
                    q.element.push(e);
                    q.local.push((x - xl) / self.h);
                }
            }
        }
        q
    }

    /// `‖U_h − g‖_{L2}` by two-point Gauss on the system's own partition.
    pub fn l2_error(&self, coeffs: &[f64], g: impl Fn(f64) -> f64) -> Result<f64> {
        self.l2_error_refined(coeffs, g, 1)
    }

    /// As [`Self::l2_error`], with each element split into `refine` pieces.
    pub fn l2_error_refined(&self, coeffs: &[f64], g: impl Fn(f64) -> f64, refine: usize) -> Result<f64> {
        let q = self.error_quadrature(refine);
        let reference: Vec<f64> = q.points.iter().map(|&x| g(x)).collect();
        q.l2_error(self, coeffs, &reference)
    }
}

/// Precomputed quadrature points for repeated L2 error evaluation.
#[derive(Debug, Clone, Default)]
pub struct ErrorQuadrature {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    element: Vec<usize>,
    local: Vec<f64>,
}

impl ErrorQuadrature {
    /// `(Σ w_i (U_h(x_i) − g_i)²)^{1/2}` where `g_i` is the reference at `points[i]`.
    pub fn l2_error(&self, sys: &SpatialSystem, coeffs: &[f64], reference: &[f64]) -> Result<f64> {
        sys.check_dim(coeffs)?;
        if reference.len() != self.points.len() {
            return Err(Error::DimensionMismatch { expected: self.points.len(), got: reference.len() });
        }
        let mut sum = 0.0;
        for (((&e, &s), &w), &g) in self.element.iter().zip(&self.local).zip(&self.weights).zip(reference) {
            let uh = SpatialSystem::nodal(coeffs, e) * (1.0 - s) + SpatialSystem::nodal(coeffs, e + 1) * s;
            let d = uh - g;
            sum += w * d * d;
        }
        Ok(sum.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(reaction: f64) -> Problem {
        Problem::new(0.5, SpaceFunction::zero()).unwrap().with_reaction(move |_| reaction)
    }

    #[test]
    fn two_elements_by_hand() {
        let sys = SpatialSystem::build(0.0, 1.0, 2, &unit(0.0)).unwrap();
        assert_eq!(sys.dim(), 1);
        assert!((sys.stiff.diag[0] - 4.0).abs() < 1e-14);
        assert!((sys.mass.diag[0] - 1.0 / 3.0).abs() < 1e-15);
        let sys = SpatialSystem::build(0.0, 1.0, 2, &unit(1.0)).unwrap();
        assert!((sys.stiff.diag[0] - (4.0 + 1.0 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn four_elements_by_hand() {
        let h = 0.25;
        let sys = SpatialSystem::build(0.0, 1.0, 4, &unit(0.0)).unwrap();
        for &d in &sys.stiff.diag {
            assert!((d - 2.0 / h).abs() < 1e-13);
        }
        for &o in &sys.stiff.off {
            assert!((o + 1.0 / h).abs() < 1e-13);
        }
        for &d in &sys.mass.diag {
            assert!((d - 2.0 * h / 3.0).abs() < 1e-15);
        }
        for &o in &sys.mass.off {
            assert!((o - h / 6.0).abs() < 1e-15);
        }
        // interior mass row sums equal ∫φ_p = h
        let ones = vec![1.0; 3];
        let row = sys.mass.mul_vec(&ones);
        assert!((row[1] - h).abs() < 1e-15);
    }

    #[test]
    fn bad_parameters() {
        let p = unit(0.0);
        assert!(matches!(SpatialSystem::build(1.0, 0.0, 4, &p), Err(Error::InvalidParameter(_))));
        assert!(matches!(SpatialSystem::build(0.0, 1.0, 1, &p), Err(Error::InvalidParameter(_))));
        let p = unit(0.0).with_kappa(|x| x - 0.5);
        assert!(matches!(
            SpatialSystem::build(0.0, 1.0, 4, &p),
            Err(Error::NonPositiveDiffusivity { .. })
        ));
    }

    #[test]
    fn variable_coefficients_stay_symmetric_positive() {
        let p = unit(0.0).with_kappa(|x| 1.0 + x * x).with_reaction(|x| (3.0 * x).sin().abs());
        let sys = SpatialSystem::build(-1.0, 2.0, 17, &p).unwrap();
        assert!(sys.stiff.pivots().iter().all(|&v| v > 0.0));
        assert!(sys.mass.pivots().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn ritz_identity_on_hat() {
        let sys = SpatialSystem::build(0.0, 1.0, 8, &unit(1.0)).unwrap();
        let k = 3usize; // interior index, node x_4
        let xk = sys.node(k + 1);
        let h = sys.h();
        let hat = SpaceFunction::new(move |x| (1.0 - (x - xk).abs() / h).max(0.0))
            .with_derivative(move |x| if (x - xk).abs() >= h { 0.0 } else if x < xk { 1.0 / h } else { -1.0 / h });
        let c = sys.ritz_project(&hat).unwrap();
        for (i, v) in c.iter().enumerate() {
            let e = if i == k { 1.0 } else { 0.0 };
            assert!((v - e).abs() < 1e-13, "{i}: {v}");
        }
        assert!(sys.ritz_project(&SpaceFunction::zero()).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ritz_orthogonality_residual() {
        let sys = SpatialSystem::build(0.0, 1.0, 25, &unit(1.0)).unwrap();
        let w = SpaceFunction::new(|x| x * (1.0 - x)).with_derivative(|x| 1.0 - 2.0 * x);
        let c = sys.ritz_project(&w).unwrap();
        let r = sys.ritz_residual(&w, &c).unwrap();
        assert!(r.iter().all(|v| v.abs() <= 1e-10));
        // finite-difference derivative gives the same projection
        let fd = SpaceFunction::new(|x| x * (1.0 - x));
        let c2 = sys.ritz_project(&fd).unwrap();
        for (a, b) in c.iter().zip(&c2) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn ritz_is_nodal_interpolation_without_reaction() {
        // in 1-D with κ = 1, d = 0 the Ritz projection interpolates at nodes
        let sys = SpatialSystem::build(0.0, 1.0, 10, &unit(0.0)).unwrap();
        let w = SpaceFunction::new(|x: f64| (2.0 * x).sin() * x * (1.0 - x));
        let c = sys.ritz_project(&w).unwrap();
        let i = sys.interpolate(|x| w.value(x));
        for (a, b) in c.iter().zip(&i) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn galerkin_consistency_for_discrete_functions() {
        let sys = SpatialSystem::build(0.0, 2.0, 9, &unit(0.0)).unwrap();
        let coeffs: Vec<f64> = (0..sys.dim()).map(|i| (i as f64 * 0.7).cos()).collect();
        let c2 = coeffs.clone();
        let s2 = sys.clone();
        let w = SpaceFunction::new(move |x| s2.evaluate(&c2, x));
        let proj = sys.l2_project(&w).unwrap();
        for (a, b) in proj.iter().zip(&coeffs) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn load_vectors() {
        let p = unit(0.0);
        let sys = SpatialSystem::build(0.0, 1.0, 10, &p).unwrap();
        assert!(sys.load_vector(&p, 0.0, 0.5).unwrap().iter().all(|&v| v == 0.0));
        let p1 = unit(0.0).with_source(|_, _| 1.0);
        let f = sys.load_vector(&p1, 0.2, 0.5).unwrap();
        assert!((f[4] - 0.3 * 0.1).abs() < 1e-15);
        assert!(matches!(sys.load_vector(&p1, 0.5, 0.5), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn load_vector_against_adaptive_oracle() {
        use crate::quad::Adaptive;
        let p = unit(0.0).with_source(|x, t| t * x);
        let sys = SpatialSystem::build(0.0, 1.0, 7, &p).unwrap();
        let (t0, t1) = (0.1, 0.35);
        let f = sys.load_vector(&p, t0, t1).unwrap();
        let h = sys.h();
        let q = Adaptive::with_tol(1e-15);
        for (i, fi) in f.iter().enumerate() {
            let xp = sys.node(i + 1);
            let hat = |x: f64| (1.0 - (x - xp).abs() / h).max(0.0);
            let space = q.integrate_split(|x| x * hat(x), &[xp - h, xp, xp + h]).unwrap();
            let time = q.integrate(|t| t, t0, t1).unwrap();
            assert!((fi - space * time).abs() <= 1e-10, "{i}");
        }
    }

    #[test]
    fn l2_error_cases() {
        let sys = SpatialSystem::build(0.0, 1.0, 6, &unit(0.0)).unwrap();
        // piecewise linear g reproduced exactly
        let c = sys.interpolate(|x| x * (1.0 - x));
        let cc = c.clone();
        let s2 = sys.clone();
        let e = sys.l2_error(&c, move |x| s2.evaluate(&cc, x)).unwrap();
        assert!(e <= 1e-15);
        // ‖φ_k‖ = √(2h/3)
        let mut unit_k = vec![0.0; sys.dim()];
        unit_k[2] = 1.0;
        let e = sys.l2_error(&unit_k, |_| 0.0).unwrap();
        assert!((e - (2.0 * sys.h() / 3.0).sqrt()).abs() < 1e-15);
        assert!(matches!(sys.l2_error(&[1.0], |_| 0.0), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn l2_error_of_sine() {
        use std::f64::consts::PI;
        let sys = SpatialSystem::build(0.0, 1.0, 400, &unit(0.0)).unwrap();
        let zero = vec![0.0; sys.dim()];
        let e = sys.l2_error(&zero, |x| (PI * x).sin()).unwrap();
        assert!((e - 0.5f64.sqrt()).abs() < 1e-5);
        let e = sys.l2_error_refined(&zero, |x| (PI * x).sin(), 4).unwrap();
        assert!((e - 0.5f64.sqrt()).abs() < 1e-7);
    }
}
