//! Independent references shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use subdiff::frackernel::weight_oracle;
use subdiff::mesh::GradedMesh;
use subdiff::Scheme;

/// Hand-assembled `M` and `G` for `κ = 1` and constant reaction `d` on a
/// uniform partition of `(0, 1)` into `elements` pieces.
pub fn dense_matrices(elements: usize, reaction: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let dim = elements - 1;
    let h = 1.0 / elements as f64;
    let mass = DMatrix::from_fn(dim, dim, |i, j| match i.abs_diff(j) {
        0 => 4.0 * h / 6.0,
        1 => h / 6.0,
        _ => 0.0,
    });
    let lap = DMatrix::from_fn(dim, dim, |i, j| match i.abs_diff(j) {
        0 => 2.0 / h,
        1 => -1.0 / h,
        _ => 0.0,
    });
    let stiff = &lap + &mass * reaction;
    (mass, stiff)
}

/// Solves the whole march at once. With `I_n = Σ_{j≤n} (interpolant weights)·U`,
/// the cumulative equations `M U^n + G I_n = M U^0 + Σ_{k≤n} F^k` form a
/// block-lower-triangular system in `U^1..U^N`. Weights come from quadrature.
pub fn dense_march(
    mesh: &GradedMesh,
    alpha: f64,
    scheme: Scheme,
    mass: &DMatrix<f64>,
    stiff: &DMatrix<f64>,
    u0: &[f64],
    loads: &[Vec<f64>],
) -> Vec<Vec<f64>> {
    let n_steps = mesh.steps();
    let d = u0.len();
    let size = n_steps * d;
    let mut a = DMatrix::<f64>::zeros(size, size);
    let mut rhs = DVector::<f64>::zeros(size);
    let u0v = DVector::from_column_slice(u0);
    let mu0 = mass * &u0v;
    let mut cumulative = DVector::<f64>::zeros(d);

    // coefficient of U^k in I_n; k = 0 goes to the right-hand side
    let add = |a: &mut DMatrix<f64>, rhs: &mut DVector<f64>, n: usize, k: usize, c: f64| {
        let block = stiff * c;
        if k == 0 {
            let shift = &block * &u0v;
            for r in 0..d {
                rhs[(n - 1) * d + r] -= shift[r];
            }
        } else {
            for r in 0..d {
                for s in 0..d {
                    a[((n - 1) * d + r, (k - 1) * d + s)] += block[(r, s)];
                }
            }
        }
    };

    for n in 1..=n_steps {
        for r in 0..d {
            for s in 0..d {
                a[((n - 1) * d + r, (n - 1) * d + s)] += mass[(r, s)];
            }
        }
        cumulative += DVector::from_column_slice(&loads[n - 1]);
        for r in 0..d {
            rhs[(n - 1) * d + r] += mu0[r] + cumulative[r];
        }
        for j in 1..=n {
            let (w, wh) = weight_oracle(mesh, alpha, n, j).expect("oracle");
            match scheme {
                Scheme::L1 => {
                    let tau = mesh.step(j);
                    add(&mut a, &mut rhs, n, j - 1, w - wh / tau);
                    add(&mut a, &mut rhs, n, j, wh / tau);
                }
                Scheme::Gcn => {
                    add(&mut a, &mut rhs, n, j - 1, 0.5 * w);
                    add(&mut a, &mut rhs, n, j, 0.5 * w);
                }
            }
        }
    }
    let sol = a.lu().solve(&rhs).expect("nonsingular");
    let mut out = vec![u0.to_vec()];
    for n in 0..n_steps {
        out.push(sol.rows(n * d, d).iter().copied().collect());
    }
    out
}

/// Crank–Nicolson for `M u' + G u = 0` on the given mesh, dense.
pub fn crank_nicolson(mesh: &GradedMesh, mass: &DMatrix<f64>, stiff: &DMatrix<f64>, u0: &[f64]) -> Vec<Vec<f64>> {
    let mut out = vec![u0.to_vec()];
    for n in 1..=mesh.steps() {
        let k = 0.5 * mesh.step(n);
        let prev = DVector::from_column_slice(out.last().unwrap());
        let rhs = (mass - stiff * k) * prev;
        let next = (mass + stiff * k).lu().solve(&rhs).expect("nonsingular");
        out.push(next.iter().copied().collect());
    }
    out
}

/// `e^{x²} erfc(x)`: direct for moderate `x`, asymptotic series beyond.
pub fn scaled_erfc(x: f64) -> f64 {
    if x <= 10.0 {
        return (x * x).exp() * libm::erfc(x);
    }
    // 1/(x√π) Σ (−1)^k (2k−1)!! / (2x²)^k; at x ≥ 10 the terms fall below
    // 1e-17 long before they start growing
    let z = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        term *= -((2 * k - 1) as f64) * z;
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum / (x * std::f64::consts::PI.sqrt())
}

pub fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(u, v)| u.iter().zip(v).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

pub fn max_rel_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let scale = b.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    max_abs_diff(a, b) / scale
}
