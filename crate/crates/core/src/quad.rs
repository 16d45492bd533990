//! Adaptive Gauss–Kronrod quadrature and fixed Gauss–Legendre rules.

use crate::error::{Error, Result};

/// Gauss–Legendre rule on [-1, 1] as (nodes, weights).
pub struct GaussRule {
    pub nodes: &'static [f64],
    pub weights: &'static [f64],
}

const FRAC_1_SQRT_3: f64 = 0.577_350_269_189_625_8;

pub const GAUSS2: GaussRule = GaussRule {
    nodes: &[-FRAC_1_SQRT_3, FRAC_1_SQRT_3],
    weights: &[1.0, 1.0],
};

pub const GAUSS3: GaussRule = GaussRule {
    nodes: &[-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4],
    weights: &[5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0],
};

pub const GAUSS4: GaussRule = GaussRule {
    nodes: &[
        -0.861_136_311_594_052_6,
        -0.339_981_043_584_856_3,
        0.339_981_043_584_856_3,
        0.861_136_311_594_052_6,
    ],
    weights: &[
        0.347_854_845_137_453_85,
        0.652_145_154_862_546_2,
        0.652_145_154_862_546_2,
        0.347_854_845_137_453_85,
    ],
};

impl GaussRule {
    /// Maps the rule onto [a, b]: yields (x, weight) pairs.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One G7/K15 panel: (kronrod estimate, |kronrod - gauss|).
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(mid);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(mid - dx) + f(mid + dx);
        kron += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

/// Adaptive bisection on G7/K15 panels until the summed error estimate is
/// below `abs_tol`.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self { abs_tol: 1e-14, rel_tol: 0.0, max_panels: 4000 }
    }
}

impl Adaptive {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self { abs_tol, ..Self::default() }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        // Global strategy: always split the panel with the largest error.
        let (v, e) = gk15(&f, a, b);
        let mut panels = vec![(a, b, v, e)];
        loop {
            let total: f64 = panels.iter().map(|p| p.2).sum();
            let err: f64 = panels.iter().map(|p| p.3).sum();
            let tol = self.abs_tol.max(self.rel_tol * total.abs());
            if err <= tol {
                return Ok(total);
            }
            if panels.len() >= self.max_panels {
                return Err(Error::NonConvergence { a, b, estimate: err });
            }
            let (worst, _) = panels
                .iter()
                .enumerate()
                .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
                .expect("nonempty");
            let (pa, pb, _, _) = panels.swap_remove(worst);
            let pm = 0.5 * (pa + pb);
            if pm <= pa || pm >= pb {
                // Interval can no longer be split in floating point.
                return Err(Error::NonConvergence { a, b, estimate: err });
            }
            let (v1, e1) = gk15(&f, pa, pm);
            let (v2, e2) = gk15(&f, pm, pb);
            panels.push((pa, pm, v1, e1));
            panels.push((pm, pb, v2, e2));
        }
    }

    /// Integrates over consecutive subintervals split at `points` (sorted).
    pub fn integrate_split(&self, f: impl Fn(f64) -> f64, points: &[f64]) -> Result<f64> {
        let pieces = points.len().saturating_sub(1).max(1) as f64;
        let sub = Self { abs_tol: self.abs_tol / pieces, ..*self };
        points.windows(2).map(|w| sub.integrate(&f, w[0], w[1])).sum()
    }
}
