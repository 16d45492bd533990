//! One-parameter Mittag-Leffler function on the negative real axis and the
//! eigenfunction-series solution of the benchmark problem.
//!
//! `E_α(−x)` is evaluated by one of three routes:
//!
//! * the power series `Σ (−x)^p / Γ(αp + 1)` (Neumaier-compensated) for small `x`;
//! * the Laplace-type integral
//!   `E_α(−x) = sin(απ)/(απ) ∫_0^∞ exp(−(xu)^{1/α}) / (u² + 2u cos απ + 1) du`,
//!   whose integrand is positive, for intermediate `x`;
//! * the algebraic expansion `Σ_{k≥1} (−1)^{k+1} x^{−k} / Γ(1 − αk)`, cut at its
//!   smallest term, for large `x`.
//!
//! Switch points depend on `α` and are chosen so that neighbouring routes
//! agree on an overlap band around each switch.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::fem1d::{Problem, SpaceFunction};
use crate::frackernel::check_alpha;
use crate::quad::Adaptive;
use crate::special::{gamma, recip_gamma};

/// Default truncation of the eigenfunction series.
pub const DEFAULT_TERMS: usize = 60;

const ASYMPTOTIC_TERMS: usize = 120;
const ASYMPTOTIC_AGREEMENT: f64 = 1e-13;
// Exponent at which exp(−(xu)^{1/α}) is negligible.
const TAIL_EXPONENT: f64 = 40.0;

/// `E_α(−x)` evaluator for a fixed `α ∈ (0, 1]`.
#[derive(Debug, Clone)]
pub struct MittagLeffler {
    alpha: f64,
    recip: Vec<f64>,
    series_switch: f64,
    asymptotic_switch: f64,
}

/// Largest disagreement between neighbouring routes on their overlap bands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapReport {
    pub series_integral: f64,
    pub integral_asymptotic: f64,
}

impl OverlapReport {
    pub fn max(&self) -> f64 {
        self.series_integral.max(self.integral_asymptotic)
    }
}

fn geometric(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    let ratio = (hi / lo).powf(1.0 / (count - 1) as f64);
    (0..count).map(move |i| lo * ratio.powi(i as i32))
}

impl MittagLeffler {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let recip = (0..=ASYMPTOTIC_TERMS)
            .map(|k| if k == 0 { 0.0 } else { recip_gamma(1.0 - alpha * k as f64) })
            .collect();
        let mut ml = Self {
            alpha,
            recip,
            // the largest series term is about exp(x^{1/α}); at twice the
            // switch this stays near e^9
            series_switch: 9f64.powf(alpha) / 2.0,
            asymptotic_switch: f64::INFINITY,
        };
        if alpha < 1.0 {
            ml.asymptotic_switch = ml.find_asymptotic_switch();
        }
        Ok(ml)
    }

    /// Shared evaluator for `alpha`, built once per distinct value.
    pub fn cached(alpha: f64) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<MittagLeffler>>>> = OnceLock::new();
        check_alpha(alpha)?;
        let cache = CACHE.get_or_init(Default::default);
        if let Some(ml) = cache.lock().expect("cache poisoned").get(&alpha.to_bits()) {
            return Ok(ml.clone());
        }
        let ml = Arc::new(Self::new(alpha)?);
        cache.lock().expect("cache poisoned").insert(alpha.to_bits(), ml.clone());
        Ok(ml)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `(series → integral, integral → asymptotic)` switch points.
    pub fn switch_points(&self) -> (f64, f64) {
        (self.series_switch, self.asymptotic_switch)
    }

    // Smallest x on a geometric grid from which the expansion matches the
    // integral over [x/2, 4x].
    fn find_asymptotic_switch(&self) -> f64 {
        let grid: Vec<f64> = geometric(0.5, 1.0e4, 97).collect();
        let ok: Vec<bool> = grid
            .iter()
            .map(|&x| match (self.asymptotic(x), self.integral(x)) {
                (Some(a), Ok(i)) => (a - i).abs() <= ASYMPTOTIC_AGREEMENT,
                _ => false,
            })
            .collect();
        // grid ratio is 2^{1/4} per step (0.5 → 1e4 over 96 steps ≈ 1.109); use index spans
        let per_octave = (2f64.ln() / (grid[1] / grid[0]).ln()).round() as usize;
        for i in 0..grid.len() {
            let lo = i.saturating_sub(per_octave);
            let hi = i + 2 * per_octave;
            if hi >= grid.len() {
                break;
            }
            if grid[i] >= self.series_switch && ok[lo..=hi].iter().all(|&b| b) {
                return grid[i];
            }
        }
        f64::INFINITY
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!("E_α(−x) needs finite x >= 0, got {x}")));
        }
        if x == 0.0 {
            return Ok(1.0);
        }
        if self.alpha == 1.0 {
            return Ok((-x).exp());
        }
        if x <= self.series_switch {
            return Ok(self.series(x));
        }
        if x >= self.asymptotic_switch {
            if let Some(v) = self.asymptotic(x) {
                return Ok(v);
            }
        }
        self.integral(x)
            .map_err(|e| Error::AccuracyLoss(format!("E_{}(−{x}): {e}", self.alpha)))
    }

    /// Power series with compensated summation; only accurate for moderate `x`.
    pub fn series(&self, x: f64) -> f64 {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        let mut past_peak = false;
        let mut prev = f64::INFINITY;
        for p in 0.. {
            let arg = self.alpha * p as f64 + 1.0;
            if arg > 170.0 {
                break;
            }
            let mag = x.powi(p) / gamma(arg);
            let term = if p % 2 == 0 { mag } else { -mag };
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
            past_peak |= mag < prev;
            prev = mag;
            if past_peak && mag <= 1e-17 * (sum + comp).abs().max(1e-300) {
                break;
            }
        }
        sum + comp
    }

    /// Algebraic expansion cut before its terms start growing; `None` when
    /// `α = 1` (the expansion vanishes identically) or `x ≤ 0`.
    pub fn asymptotic(&self, x: f64) -> Option<f64> {
        if self.alpha == 1.0 || !(x > 0.0) {
            return None;
        }
        let inv = 1.0 / x;
        let mut power = 1.0;
        let mut sum = 0.0;
        let mut last = f64::INFINITY;
        for k in 1..=ASYMPTOTIC_TERMS {
            power *= inv;
            let r = self.recip[k];
            if r == 0.0 {
                continue;
            }
            let term = power * r;
            if term.abs() > last {
                break;
            }
            last = term.abs();
            sum += if k % 2 == 1 { term } else { -term };
            if last <= 1e-18 * sum.abs() {
                break;
            }
        }
        Some(sum)
    }

    /// Laplace-type integral representation, valid for `0 < α < 1`, `x > 0`.
    pub fn integral(&self, x: f64) -> Result<f64> {
        let a = self.alpha;
        if !(a < 1.0) {
            return Err(Error::Domain("integral representation needs α < 1".into()));
        }
        if !(x > 0.0) {
            return Err(Error::Domain(format!("integral representation needs x > 0, got {x}")));
        }
        let (s, c) = (a * PI).sin_cos();
        let prefactor = s / (a * PI);
        let inv_a = 1.0 / a;
        let f = |u: f64| (-(x * u).powf(inv_a)).exp() / (u * u + 2.0 * u * c + 1.0);

        let upper = TAIL_EXPONENT.powf(a) / x;
        let mut points = vec![0.0, upper];
        // denominator minimum near u* = −cos απ with half-width ~ sin απ
        let centre = (-c).max(0.0);
        for p in [centre - s, centre, centre + s, 1.0 / x, 1.0] {
            points.push(p);
        }
        let mut p = 1.0;
        while p < upper {
            p *= 8.0;
            points.push(p);
        }
        points.retain(|&p| (0.0..=upper).contains(&p));
        points.sort_by(f64::total_cmp);
        points.dedup();

        let tol = 2e-15 / prefactor;
        let quad = Adaptive { abs_tol: tol, rel_tol: 0.0, max_panels: 20_000 };
        Ok(prefactor * quad.integrate_split(f, &points)?)
    }

    /// Compares neighbouring routes on `[X/2, 2X]` around each switch point.
    pub fn check_overlap(&self) -> Result<OverlapReport> {
        let mut report = OverlapReport { series_integral: 0.0, integral_asymptotic: 0.0 };
        if self.alpha == 1.0 {
            return Ok(report);
        }
        let xs = self.series_switch;
        for x in geometric(xs / 2.0, 2.0 * xs, 25) {
            let d = (self.series(x) - self.integral(x)?).abs();
            report.series_integral = report.series_integral.max(d);
        }
        let xa = self.asymptotic_switch;
        if xa.is_finite() {
            for x in geometric(xa / 2.0, 2.0 * xa, 25) {
                let asym = self.asymptotic(x).unwrap_or(f64::NAN);
                let d = (asym - self.integral(x)?).abs();
                report.integral_asymptotic = report.integral_asymptotic.max(if d.is_nan() { f64::INFINITY } else { d });
            }
        }
        Ok(report)
    }
}

/// `E_α(−x)` for `0 < α ≤ 1`, `x ≥ 0`.
pub fn ml_neg(alpha: f64, x: f64) -> Result<f64> {
    MittagLeffler::cached(alpha)?.eval(x)
}

/// Truncated eigen-expansion of the solution with `u_0 = x(1−x)` on `(0, 1)`,
/// constant diffusivity `κ`, constant reaction `d` and `f = 0`:
///
/// `u(x,t) = 8 Σ_m μ_m^{−3} sin(μ_m x) E_α(−(κ μ_m² + d) t^α)`, `μ_m = (2m+1)π`.
#[derive(Debug, Clone)]
pub struct SeriesSolution {
    alpha: f64,
    kappa: f64,
    reaction: f64,
    frequencies: Vec<f64>,
    coefficients: Vec<f64>,
    ml: Arc<MittagLeffler>,
}

impl SeriesSolution {
    /// κ = 1, d = 0, 60 terms.
    pub fn new(alpha: f64) -> Result<Self> {
        Self::with_params(alpha, 1.0, 0.0, DEFAULT_TERMS)
    }

    pub fn with_params(alpha: f64, kappa: f64, reaction: f64, n_terms: usize) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::InvalidParameter(format!("diffusivity must be > 0, got {kappa}")));
        }
        if !(reaction >= 0.0) {
            return Err(Error::InvalidParameter(format!("reaction must be >= 0, got {reaction}")));
        }
        if n_terms == 0 {
            return Err(Error::InvalidParameter("series needs at least one term".into()));
        }
        let frequencies: Vec<f64> = (0..n_terms).map(|m| (2 * m + 1) as f64 * PI).collect();
        let coefficients = frequencies.iter().map(|mu| 8.0 / (mu * mu * mu)).collect();
        Ok(Self { alpha, kappa, reaction, frequencies, coefficients, ml: MittagLeffler::cached(alpha)? })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn reaction(&self) -> f64 {
        self.reaction
    }

    pub fn n_terms(&self) -> usize {
        self.frequencies.len()
    }

    /// `μ_m`
    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// `8 μ_m^{−3}`
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Per-mode time factors `8 μ_m^{−3} E_α(−λ_m t^α)`.
    fn modal_amplitudes(&self, t: f64) -> Result<Vec<f64>> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("time must be >= 0, got {t}")));
        }
        let ta = t.powf(self.alpha);
        self.frequencies
            .iter()
            .zip(&self.coefficients)
            .map(|(mu, c)| Ok(c * self.ml.eval((self.kappa * mu * mu + self.reaction) * ta)?))
            .collect()
    }

    pub fn value(&self, x: f64, t: f64) -> Result<f64> {
        let amp = self.modal_amplitudes(t)?;
        Ok(self.frequencies.iter().zip(amp).map(|(mu, a)| a * (mu * x).sin()).sum())
    }

    /// Precomputes `sin(μ_m x_i)` for repeated evaluation at fixed points.
    pub fn grid(&self, points: &[f64]) -> SeriesGrid<'_> {
        let sines = points
            .iter()
            .map(|&x| self.frequencies.iter().map(|mu| (mu * x).sin()).collect())
            .collect();
        SeriesGrid { sol: self, sines }
    }

    /// The benchmark problem this series solves.
    pub fn problem(&self) -> Result<Problem> {
        let exact = self.clone();
        let (kappa, reaction) = (self.kappa, self.reaction);
        let init = SpaceFunction::new(|x| x * (1.0 - x)).with_derivative(|x| 1.0 - 2.0 * x);
        Ok(Problem::new(self.alpha, init)?
            .with_kappa(move |_| kappa)
            .with_reaction(move |_| reaction)
            .with_exact(move |x, t| exact.value(x, t).unwrap_or(f64::NAN)))
    }
}

/// Series solution tabulated at fixed spatial points.
pub struct SeriesGrid<'a> {
    sol: &'a SeriesSolution,
    sines: Vec<Vec<f64>>,
}

impl SeriesGrid<'_> {
    pub fn values(&self, t: f64) -> Result<Vec<f64>> {
        let amp = self.sol.modal_amplitudes(t)?;
        Ok(self
            .sines
            .iter()
            .map(|row| row.iter().zip(&amp).map(|(s, a)| s * a).sum())
            .collect())
    }
}

/// `u(x, t)` from the truncated series.
pub fn exact_solution(sol: &SeriesSolution, x: f64, t: f64) -> Result<f64> {
    sol.value(x, t)
}
