use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if off.len() + 1 != diag.len().max(1) {
            return Err(Error::DimensionMismatch { expected: diag.len().saturating_sub(1), got: off.len() });
        }
        Ok(Self { diag, off })
    }

    pub fn identity(n: usize) -> Self {
        Self { diag: vec![1.0; n], off: vec![0.0; n.saturating_sub(1)] }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `a·self + b·other`
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        let lin = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
        Self { diag: lin(&self.diag, &other.diag), off: lin(&self.off, &other.off) }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
    }

    /// Pivots of Gaussian elimination without pivoting; all positive iff the
    /// matrix is positive definite.
    pub fn pivots(&self) -> Vec<f64> {
        let mut piv = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let p = if i == 0 {
                self.diag[0]
            } else {
                self.diag[i] - self.off[i - 1] * self.off[i - 1] / piv[i - 1]
            };
            piv.push(p);
        }
        piv
    }

    /// Thomas elimination.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if rhs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: rhs.len() });
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut upper = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut pivot = self.diag[0];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::ZeroPivot { row: 0 });
        }
        x[0] = rhs[0] / pivot;
        for i in 1..n {
            upper[i - 1] = self.off[i - 1] / pivot;
            pivot = self.diag[i] - self.off[i - 1] * upper[i - 1];
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::ZeroPivot { row: i });
            }
            x[i] = (rhs[i] - self.off[i - 1] * x[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            x[i] -= upper[i] * x[i + 1];
        }
        Ok(x)
    }
}

/// Solves `matrix · x = rhs`.
pub fn tridiagonal_solve(matrix: &SymTridiagonal, rhs: &[f64]) -> Result<Vec<f64>> {
    matrix.solve(rhs)
}
