//! Riemann–Liouville kernel `ω_α(t) = t^{α−1}/Γ(α)` and the exact per-interval
//! weights of the piecewise-linear fractional integral.
//!
//! For a function linear on each `I_j = (t_{j−1}, t_j)`,
//! `(I^α U)(t_n) = Σ_j ω_{nj} U^{j−1} + ŵ_{nj} ∂U^j` with
//!
//! * `ω_{nj} = ∫_{I_j} ω_α(t_n − s) ds`
//! * `ŵ_{nj} = ∫_{I_j} ∫_s^{t_j} ω_α(t_n − q) dq ds = ∫_{I_j} (q − t_{j−1}) ω_α(t_n − q) dq`

use crate::error::{Error, Result};
use crate::mesh::GradedMesh;
use crate::quad::Adaptive;
use crate::special::gamma;

// Below this ratio τ_j / (t_n − t_j) the closed forms cancel badly and the
// series/expm1 forms take over (equivalently (t_n − t_j)/(t_n − t_{j−1}) > 0.9).
const CANCELLATION_RATIO: f64 = 1.0 / 9.0;

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("fractional exponent must lie in (0, 1], got {alpha}")))
    }
}

/// `ω_α(t) = t^{α−1} / Γ(α)` for `t > 0`.
pub fn kernel(alpha: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("kernel needs t > 0, got {t}")));
    }
    if alpha == 1.0 {
        return Ok(1.0);
    }
    Ok(t.powf(alpha - 1.0) / gamma(alpha))
}

fn check_indices(mesh: &GradedMesh, n: usize, j: usize) -> Result<()> {
    if j < 1 || j > n || n > mesh.steps() {
        return Err(Error::Index(format!(
            "need 1 <= j <= n <= {}, got n = {n}, j = {j}",
            mesh.steps()
        )));
    }
    Ok(())
}

/// Distances used by both weights: `b = t_n − t_j` and `τ_j`.
fn gaps(mesh: &GradedMesh, n: usize, j: usize) -> (f64, f64) {
    (mesh.t(n) - mesh.t(j), mesh.step(j))
}

fn primary_unchecked(mesh: &GradedMesh, alpha: f64, g1: f64, n: usize, j: usize) -> f64 {
    let (b, tau) = gaps(mesh, n, j);
    if alpha == 1.0 {
        return tau;
    }
    if b == 0.0 {
        return tau.powf(alpha) / g1;
    }
    let r = tau / b;
    if r < CANCELLATION_RATIO {
        b.powf(alpha) * (alpha * r.ln_1p()).exp_m1() / g1
    } else {
        let a = mesh.t(n) - mesh.t(j - 1);
        (a.powf(alpha) - b.powf(alpha)) / g1
    }
}

/// `(1+r)^p − 1 − p r` for small `r`, summed as a binomial series.
fn binomial_tail(p: f64, r: f64) -> f64 {
    let mut coeff = p; // C(p, 1)
    let mut power = r;
    let mut sum = 0.0;
    for k in 2..200 {
        coeff *= (p - (k - 1) as f64) / k as f64;
        power *= r;
        let term = coeff * power;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn secondary_unchecked(mesh: &GradedMesh, alpha: f64, g2: f64, n: usize, j: usize) -> f64 {
    let (b, tau) = gaps(mesh, n, j);
    if alpha == 1.0 {
        return 0.5 * tau * tau;
    }
    let p = alpha + 1.0;
    if b == 0.0 {
        return tau.powf(p) / g2;
    }
    let r = tau / b;
    if r < CANCELLATION_RATIO {
        b.powf(p) * binomial_tail(p, r) / g2
    } else {
        let a = mesh.t(n) - mesh.t(j - 1);
        (a.powf(p) - b.powf(p) - p * tau * b.powf(alpha)) / g2
    }
}

/// Exact `ω_{nj}`.
pub fn primary_weight(mesh: &GradedMesh, alpha: f64, n: usize, j: usize) -> Result<f64> {
    check_alpha(alpha)?;
    check_indices(mesh, n, j)?;
    Ok(primary_unchecked(mesh, alpha, gamma(alpha + 1.0), n, j))
}

/// Exact `ŵ_{nj}`.
pub fn secondary_weight(mesh: &GradedMesh, alpha: f64, n: usize, j: usize) -> Result<f64> {
    check_alpha(alpha)?;
    check_indices(mesh, n, j)?;
    Ok(secondary_unchecked(mesh, alpha, gamma(alpha + 2.0), n, j))
}

/// `(ω_{nj}, ŵ_{nj})` by adaptive quadrature of their defining integrals.
///
/// Used to check the closed forms. On the last interval (`j = n`) the kernel
/// is singular at `s = t_n`; there the inner integral is taken in the
/// variable `u = (t_n − s)^α`, in which the integrand is constant.
pub fn weight_oracle(mesh: &GradedMesh, alpha: f64, n: usize, j: usize) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    check_indices(mesh, n, j)?;
    let tn = mesh.t(n);
    let (lo, hi) = (mesh.t(j - 1), mesh.t(j));
    let g = gamma(alpha);
    // the relative part keeps the request above the roundoff floor of the estimate
    let quad = Adaptive { rel_tol: 1e-15, ..Adaptive::with_tol(1e-14) };
    let inner_quad = Adaptive { rel_tol: 1e-15, ..Adaptive::with_tol(1e-16) };
    let w = move |s: f64| (tn - s).powf(alpha - 1.0) / g;

    // ∫_x^{hi} ω_α(t_n − q) dq
    let inner = |x: f64| -> Result<f64> {
        if j == n {
            // dq = −(1/α) u^{1/α − 1} du, (t_n − q)^{α−1} = u^{1 − 1/α}
            let c = 1.0 / (alpha * g);
            inner_quad.integrate(|_u| c, 0.0, (tn - x).powf(alpha))
        } else {
            inner_quad.integrate(w, x, hi)
        }
    };

    let primary = inner(lo)?;

    // Collect the first inner failure instead of panicking inside the closure.
    let failure = std::cell::RefCell::new(None);
    let secondary = quad.integrate(
        |s| match inner(s) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        lo,
        hi,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok((primary, secondary))
}

/// Row `n` of the weight table: entries `j = 1..=n` stored at index `j − 1`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightRow {
    pub primary: Vec<f64>,
    pub secondary: Vec<f64>,
}

impl WeightRow {
    pub fn len(&self) -> usize {
        self.primary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primary.is_empty()
    }
}

/// Lower-triangular weights `ω_{nj}`, `ŵ_{nj}`, built row by row.
///
/// A rolling table keeps only rows `n − 1` and `n` once advanced to `n`; a
/// retained table keeps everything.
#[derive(Debug, Clone)]
pub struct WeightTable {
    mesh: GradedMesh,
    alpha: f64,
    gamma1: f64,
    gamma2: f64,
    retain_all: bool,
    rows: Vec<Option<WeightRow>>,
}

impl WeightTable {
    pub fn rolling(mesh: &GradedMesh, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let mut rows = vec![None; mesh.steps() + 1];
        rows[0] = Some(WeightRow::default());
        Ok(Self {
            mesh: mesh.clone(),
            alpha,
            gamma1: gamma(alpha + 1.0),
            gamma2: gamma(alpha + 2.0),
            retain_all: false,
            rows,
        })
    }

    /// Every row computed up front and kept.
    pub fn full(mesh: &GradedMesh, alpha: f64) -> Result<Self> {
        let mut table = Self::rolling(mesh, alpha)?;
        table.retain_all = true;
        table.advance_to(mesh.steps())?;
        Ok(table)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mesh(&self) -> &GradedMesh {
        &self.mesh
    }

    fn compute_row(&self, n: usize) -> WeightRow {
        let primary = (1..=n)
            .map(|j| primary_unchecked(&self.mesh, self.alpha, self.gamma1, n, j))
            .collect();
        let secondary = (1..=n)
            .map(|j| secondary_unchecked(&self.mesh, self.alpha, self.gamma2, n, j))
            .collect();
        WeightRow { primary, secondary }
    }

    /// Makes rows `n − 1` and `n` available, dropping older rows unless the
    /// table retains everything.
    pub fn advance_to(&mut self, n: usize) -> Result<()> {
        if n > self.mesh.steps() {
            return Err(Error::Index(format!("row {n} beyond N = {}", self.mesh.steps())));
        }
        let start = if self.retain_all { 1 } else { n.saturating_sub(1).max(1) };
        for k in start..=n {
            if self.rows[k].is_none() {
                self.rows[k] = Some(self.compute_row(k));
            }
        }
        if !self.retain_all {
            for k in 1..n.saturating_sub(1) {
                self.rows[k] = None;
            }
        }
        Ok(())
    }

    pub fn row(&self, n: usize) -> Result<&WeightRow> {
        self.rows
            .get(n)
            .and_then(Option::as_ref)
            .ok_or_else(|| Error::Index(format!("weight row {n} is not available")))
    }

    pub fn primary(&self, n: usize, j: usize) -> Result<f64> {
        check_indices(&self.mesh, n, j)?;
        Ok(self.row(n)?.primary[j - 1])
    }

    pub fn secondary(&self, n: usize, j: usize) -> Result<f64> {
        check_indices(&self.mesh, n, j)?;
        Ok(self.row(n)?.secondary[j - 1])
    }
}
