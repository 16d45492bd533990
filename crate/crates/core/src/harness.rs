//! Convergence studies against the series solution: the max-in-time L2
//! error `E_{N,M} = max_{1≤n≤N} ‖U_h^n − u(t_n)‖`, observed rates, CSV and
//! aligned-text output, and randomized self-checks of weights and meshes.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem1d::SpatialSystem;
use crate::frackernel::{secondary_weight, weight_oracle, WeightTable};
use crate::mesh::{GradedMesh, MeshProperty};
use crate::mittag_leffler::{MittagLeffler, OverlapReport, SeriesSolution, DEFAULT_TERMS};
use crate::solver::{run, InitialProjection, Scheme, SolutionHistory};
use crate::special::gamma;

/// Relative change under spatial (temporal) refinement above which a
/// temporal (spatial) study is flagged as not dominated by the intended error.
pub const DOMINANCE_THRESHOLD: f64 = 0.05;

/// Largest allowed disagreement between Mittag-Leffler evaluation routes.
pub const OVERLAP_TOLERANCE: f64 = 1e-10;

/// Default size of the partition on which the error norm is evaluated.
pub const REFERENCE_PIECES: usize = 2400;

pub const CSV_HEADER: &str = "study,alpha,gamma,scheme,N,M,error,rate";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyKind {
    Temporal,
    Spatial,
}

impl StudyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StudyKind::Temporal => "temporal",
            StudyKind::Spatial => "spatial",
        }
    }
}

/// How many elements a temporal-study run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpatialPolicy {
    Fixed(usize),
    /// `M = N`: space and time refined together.
    TiedToN,
}

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub alpha: f64,
    pub gammas: Vec<f64>,
    /// Time subintervals; the refinement axis of a temporal study, the fixed
    /// resolution (first entry) of a spatial study.
    pub steps: Vec<usize>,
    /// Space elements; the refinement axis of a spatial study.
    pub elements: Vec<usize>,
    pub final_time: f64,
    pub scheme: Scheme,
    /// Regularity exponent for the predicted rate `min{γ(σ+α), 2}`.
    pub sigma: f64,
    /// Used by temporal studies only.
    pub spatial: SpatialPolicy,
    pub terms: usize,
    pub reaction: f64,
    pub init: InitialProjection,
    pub norm: NormQuadrature,
    /// Rerun the finest cell with doubled resolution on the other axis.
    pub check_dominance: bool,
}

impl StudyConfig {
    /// Temporal-study defaults: T = 1, L1, σ = α/4, M = 1200, 60 series
    /// terms, `γ = 2/(σ+α)`, N = 20, 40, …, 320, L2 initial projection, error
    /// norm on a 2400-piece partition.
    pub fn new(alpha: f64) -> Self {
        let sigma = alpha / 4.0;
        Self {
            alpha,
            gammas: vec![2.0 / (sigma + alpha)],
            steps: doubling(20, 5),
            elements: vec![1200],
            final_time: 1.0,
            scheme: Scheme::L1,
            sigma,
            spatial: SpatialPolicy::Fixed(1200),
            terms: DEFAULT_TERMS,
            reaction: 0.0,
            init: InitialProjection::L2,
            norm: NormQuadrature::AtLeast(REFERENCE_PIECES),
            check_dominance: true,
        }
    }

    /// Spatial-study defaults: M = 10, 20, …, 160 at N = 1000 with γ = 8, so
    /// that `t_1^α` is negligible and the time error is far below the space error.
    pub fn spatial_defaults(alpha: f64) -> Self {
        Self { gammas: vec![8.0], steps: vec![1000], elements: doubling(10, 5), ..Self::new(alpha) }
    }

    pub fn predicted_rate(&self, gamma: f64) -> f64 {
        (gamma * (self.sigma + self.alpha)).min(2.0)
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if self.gammas.is_empty() || self.steps.is_empty() || self.elements.is_empty() {
            return bad("gamma, N and M lists must be nonempty");
        }
        if self.gammas.iter().any(|g| !(*g >= 1.0)) {
            return bad("every gamma must be >= 1");
        }
        if self.steps.contains(&0) || self.elements.iter().any(|&m| m < 2) {
            return bad("need N >= 1 and M >= 2");
        }
        if let SpatialPolicy::Fixed(m) = self.spatial {
            if m < 2 {
                return bad("need M >= 2");
            }
        }
        if self.terms == 0 {
            return bad("series needs at least one term");
        }
        Ok(())
    }

    fn elements_for(&self, steps: usize) -> usize {
        match self.spatial {
            SpatialPolicy::Fixed(m) => m,
            SpatialPolicy::TiedToN => steps,
        }
    }
}

/// `[start, 2 start, …]`, `count` entries.
pub fn doubling(start: usize, count: usize) -> Vec<usize> {
    (0..count).map(|k| start << k).collect()
}

/// Where the two-point Gauss rule of the error norm is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormQuadrature {
    /// On each run's own elements.
    OwnMesh,
    /// On each run's elements split until there are at least this many pieces.
    AtLeast(usize),
}

impl Default for NormQuadrature {
    fn default() -> Self {
        NormQuadrature::AtLeast(REFERENCE_PIECES)
    }
}

/// One row of a study table.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub study: StudyKind,
    pub alpha: f64,
    pub gamma: f64,
    pub scheme: Scheme,
    pub steps: usize,
    pub elements: usize,
    pub error: f64,
    /// `log2(E_prev / E)`; `None` on the first row of each table.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominanceWarning {
    pub gamma: f64,
    pub steps: usize,
    pub elements: usize,
    pub error: f64,
    pub refined_error: f64,
}

impl DominanceWarning {
    pub fn relative_change(&self) -> f64 {
        (self.refined_error - self.error).abs() / self.error
    }
}

#[derive(Debug, Clone)]
pub struct StudyReport {
    pub kind: StudyKind,
    pub config: StudyConfig,
    pub rows: Vec<RateRow>,
    pub warnings: Vec<DominanceWarning>,
}

impl StudyReport {
    /// Rows for one grading exponent, in refinement order.
    pub fn table(&self, gamma: f64) -> Vec<&RateRow> {
        self.rows.iter().filter(|r| r.gamma == gamma).collect()
    }

    pub fn errors(&self, gamma: f64) -> Vec<f64> {
        self.table(gamma).iter().map(|r| r.error).collect()
    }

    pub fn rates(&self, gamma: f64) -> Vec<f64> {
        self.table(gamma).iter().filter_map(|r| r.rate).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let rate = r.rate.map(|v| format!("{v:.4}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.study.as_str(),
                r.alpha,
                r.gamma,
                r.scheme,
                r.steps,
                r.elements,
                sci(r.error, 6),
                rate
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut out = format!("{} study, alpha = {}, scheme = {}\n", self.kind.as_str(), c.alpha, c.scheme);
        let mut gammas: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !gammas.contains(&r.gamma) {
                gammas.push(r.gamma);
            }
        }
        for g in gammas {
            let _ = write!(out, "\ngamma = {g}");
            if self.kind == StudyKind::Temporal {
                let _ = write!(out, "  (predicted rate {:.4})", c.predicted_rate(g));
            }
            let rate_label = if self.kind == StudyKind::Temporal { "r_t" } else { "r_x" };
            let _ = writeln!(out, "\n{:>6} {:>6} {:>14} {:>8}", "N", "M", "error", rate_label);
            for r in self.table(g) {
                let rate = r.rate.map(|v| format!("{v:.4}")).unwrap_or_default();
                let _ = writeln!(out, "{:>6} {:>6} {:>14} {:>8}", r.steps, r.elements, sci(r.error, 4), rate);
            }
        }
        for w in &self.warnings {
            let _ = writeln!(out, "\n{}", dominance_message(self.kind, w));
        }
        out
    }
}

fn dominance_message(kind: StudyKind, w: &DominanceWarning) -> String {
    let axis = match kind {
        StudyKind::Temporal => "doubling M",
        StudyKind::Spatial => "doubling N",
    };
    format!(
        "warning: gamma = {}, N = {}, M = {}: {axis} changes the error by {:.1}% ({} -> {})",
        w.gamma,
        w.steps,
        w.elements,
        100.0 * w.relative_change(),
        sci(w.error, 4),
        sci(w.refined_error, 4)
    )
}

impl DominanceWarning {
    pub fn message(&self, kind: StudyKind) -> String {
        dominance_message(kind, self)
    }
}

/// C-style `%.{prec}e`: the exponent has a sign and at least two digits.
pub fn sci(x: f64, prec: usize) -> String {
    let s = format!("{x:.prec$e}");
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ('-', d),
                None => ('+', exp),
            };
            format!("{mantissa}e{sign}{digits:0>2}")
        }
        None => s, // inf / NaN
    }
}

/// `log2(e_{k−1} / e_k)` for consecutive entries.
pub fn rates(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Fails unless every pair of neighbouring Mittag-Leffler routes agrees to
/// [`OVERLAP_TOLERANCE`] for this `α`.
pub fn validate_evaluator(alpha: f64) -> Result<OverlapReport> {
    let report = MittagLeffler::cached(alpha)?.check_overlap()?;
    if !(report.max() <= OVERLAP_TOLERANCE) {
        return Err(Error::AccuracyLoss(format!(
            "Mittag-Leffler routes disagree by {:e} for alpha = {alpha}",
            report.max()
        )));
    }
    Ok(report)
}

/// `(t_n, ‖U_h^n − u(t_n)‖)` for `n = 1..=N`, the norm by two-point Gauss on
/// each element split into `refine` pieces.
pub fn error_series(
    history: &SolutionHistory,
    sys: &SpatialSystem,
    sol: &SeriesSolution,
    refine: usize,
) -> Result<Vec<(f64, f64)>> {
    let q = sys.error_quadrature(refine);
    let grid = sol.grid(&q.points);
    history
        .iter()
        .skip(1)
        .map(|(t, u)| Ok((t, q.l2_error(sys, u, &grid.values(t)?)?)))
        .collect()
}

/// `E_{N,M} = max_{1≤n≤N} ‖U_h^n − u(t_n)‖`.
pub fn max_error(history: &SolutionHistory, sys: &SpatialSystem, sol: &SeriesSolution, refine: usize) -> Result<f64> {
    Ok(error_series(history, sys, sol, refine)?.into_iter().map(|(_, e)| e).fold(0.0, f64::max))
}

/// As [`max_error`] against an arbitrary reference `u(x, t)`.
pub fn max_error_against(
    history: &SolutionHistory,
    sys: &SpatialSystem,
    exact: impl Fn(f64, f64) -> f64,
    refine: usize,
) -> Result<f64> {
    let q = sys.error_quadrature(refine);
    let mut worst: f64 = 0.0;
    for (t, u) in history.iter().skip(1) {
        let reference: Vec<f64> = q.points.iter().map(|&x| exact(x, t)).collect();
        worst = worst.max(q.l2_error(sys, u, &reference)?);
    }
    Ok(worst)
}

/// One benchmark run and its error series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Cell {
    gamma_idx: usize,
    steps: usize,
    elements: usize,
    refine: usize,
}

fn run_cell(config: &StudyConfig, sol: &SeriesSolution, gamma: f64, cell: Cell) -> Result<Vec<(f64, f64)>> {
    let problem = sol.problem()?;
    let mesh = GradedMesh::new(config.final_time, cell.steps, gamma)?;
    let sys = SpatialSystem::build(0.0, 1.0, cell.elements, &problem)?;
    let history = run(&problem, &mesh, &sys, config.scheme, config.init)?;
    error_series(&history, &sys, sol, cell.refine)
}

fn series_for(config: &StudyConfig) -> Result<SeriesSolution> {
    validate_evaluator(config.alpha)?;
    SeriesSolution::with_params(config.alpha, 1.0, config.reaction, config.terms)
}

impl StudyConfig {
    fn refine_to(&self, elements: usize) -> usize {
        match self.norm {
            NormQuadrature::OwnMesh => 1,
            NormQuadrature::AtLeast(k) => k.div_ceil(elements).max(1),
        }
    }
}

fn execute(config: &StudyConfig, cells: Vec<Cell>, sol: &SeriesSolution) -> Result<Vec<f64>> {
    cells
        .into_par_iter()
        .map(|c| {
            let trace = run_cell(config, sol, config.gammas[c.gamma_idx], c)?;
            Ok(trace.into_iter().map(|(_, e)| e).fold(0.0, f64::max))
        })
        .collect()
}

fn assemble(
    config: &StudyConfig,
    kind: StudyKind,
    cells: &[Cell],
    errors: &[f64],
) -> Vec<RateRow> {
    let mut rows = Vec::with_capacity(cells.len());
    for (i, (c, &e)) in cells.iter().zip(errors).enumerate() {
        let first = i == 0 || cells[i - 1].gamma_idx != c.gamma_idx;
        rows.push(RateRow {
            study: kind,
            alpha: config.alpha,
            gamma: config.gammas[c.gamma_idx],
            scheme: config.scheme,
            steps: c.steps,
            elements: c.elements,
            error: e,
            rate: if first { None } else { Some((errors[i - 1] / e).log2()) },
        });
    }
    rows
}

/// Rows over the N list for each γ, with M fixed or tied to N.
pub fn temporal_study(config: &StudyConfig) -> Result<StudyReport> {
    config.validate()?;
    let sol = series_for(config)?;
    let mut cells = Vec::new();
    for gi in 0..config.gammas.len() {
        for &n in &config.steps {
            let m = config.elements_for(n);
            cells.push(Cell { gamma_idx: gi, steps: n, elements: m, refine: config.refine_to(m) });
        }
    }
    let mut checks = Vec::new();
    if config.check_dominance {
        for gi in 0..config.gammas.len() {
            let last = *cells.iter().rfind(|c| c.gamma_idx == gi).expect("nonempty");
            checks.push(Cell { elements: 2 * last.elements, refine: config.refine_to(2 * last.elements), ..last });
        }
    }
    finish(config, StudyKind::Temporal, cells, checks, &sol)
}

/// Rows over the M list at `N = steps[0]` for each γ.
pub fn spatial_study(config: &StudyConfig) -> Result<StudyReport> {
    config.validate()?;
    let sol = series_for(config)?;
    let n = config.steps[0];
    let mut cells = Vec::new();
    for gi in 0..config.gammas.len() {
        for &m in &config.elements {
            cells.push(Cell { gamma_idx: gi, steps: n, elements: m, refine: config.refine_to(m) });
        }
    }
    let mut checks = Vec::new();
    if config.check_dominance {
        for gi in 0..config.gammas.len() {
            let last = *cells.iter().rfind(|c| c.gamma_idx == gi).expect("nonempty");
            checks.push(Cell { steps: 2 * n, ..last });
        }
    }
    finish(config, StudyKind::Spatial, cells, checks, &sol)
}

fn finish(
    config: &StudyConfig,
    kind: StudyKind,
    cells: Vec<Cell>,
    checks: Vec<Cell>,
    sol: &SeriesSolution,
) -> Result<StudyReport> {
    let n_main = cells.len();
    let mut all = cells.clone();
    all.extend(checks.iter().copied());
    let errors = execute(config, all, sol)?;
    let rows = assemble(config, kind, &cells, &errors[..n_main]);

    let mut warnings = Vec::new();
    for (check, &refined) in checks.iter().zip(&errors[n_main..]) {
        let base = cells
            .iter()
            .zip(&errors)
            .rfind(|(c, _)| c.gamma_idx == check.gamma_idx)
            .map(|(c, e)| (*c, *e))
            .expect("nonempty");
        let w = DominanceWarning {
            gamma: config.gammas[check.gamma_idx],
            steps: base.0.steps,
            elements: base.0.elements,
            error: base.1,
            refined_error: refined,
        };
        if w.relative_change() > DOMINANCE_THRESHOLD {
            warnings.push(w);
        }
    }
    Ok(StudyReport { kind, config: config.clone(), rows, warnings })
}

/// Per-step errors `(t_n, ‖U_h^n − u(t_n)‖)` of one run of the benchmark.
pub fn error_trace(config: &StudyConfig, gamma: f64, steps: usize, elements: usize) -> Result<Vec<(f64, f64)>> {
    let sol = series_for(config)?;
    let cell = Cell { gamma_idx: 0, steps, elements, refine: config.refine_to(elements) };
    run_cell(config, &sol, gamma, cell)
}

pub const TRACE_HEADER: &str = "alpha,gamma,N,M,n,t,error";

/// Error traces as CSV, one row per `(γ, n)`.
pub fn trace_csv(alpha: f64, steps: usize, elements: usize, traces: &[(f64, Vec<(f64, f64)>)]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for (g, trace) in traces {
        for (i, (t, e)) in trace.iter().enumerate() {
            let _ = writeln!(out, "{alpha},{g},{steps},{elements},{},{},{}", i + 1, sci(*t, 9), sci(*e, 6));
        }
    }
    out
}

/// Outcome of [`verify_weights`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightCheck {
    pub samples: usize,
    pub max_primary_error: f64,
    pub max_secondary_error: f64,
    /// Largest `|Σ_j ω_nj − t_n^α/Γ(α+1)| / (t_n^α/Γ(α+1))`.
    pub max_telescoping_error: f64,
    pub secondary_bound_violations: usize,
}

/// Closed-form weights against adaptive quadrature on random
/// `(γ ∈ [1,4], N ≤ 64, α ∈ (0.05,1], 1 ≤ j ≤ n ≤ N)`.
pub fn verify_weights(seed: u64, samples: usize) -> Result<WeightCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(samples);
    for _ in 0..samples {
        let g: f64 = rng.gen_range(1.0..=4.0);
        let steps: usize = rng.gen_range(1..=64);
        // (0.05, 1]
        let alpha: f64 = 1.0 - rng.gen_range(0.0..0.95);
        let n = rng.gen_range(1..=steps);
        let j = rng.gen_range(1..=n);
        cases.push((g, steps, alpha, n, j));
    }
    let results = cases
        .into_par_iter()
        .map(|(g, steps, alpha, n, j)| -> Result<(f64, f64, f64, bool)> {
            let mesh = GradedMesh::new(1.0, steps, g)?;
            let table = WeightTable::full(&mesh, alpha)?;
            let (po, so) = weight_oracle(&mesh, alpha, n, j)?;
            let (p, s) = (table.primary(n, j)?, table.secondary(n, j)?);
            let exact = mesh.t(n).powf(alpha) / gamma(alpha + 1.0);
            let sum: f64 = table.row(n)?.primary.iter().sum();
            let within = s <= mesh.step(j) * p * (1.0 + 1e-14) && secondary_weight(&mesh, alpha, n, j)? > 0.0;
            Ok(((p - po).abs(), (s - so).abs(), (sum - exact).abs() / exact, within))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut check = WeightCheck {
        samples,
        max_primary_error: 0.0,
        max_secondary_error: 0.0,
        max_telescoping_error: 0.0,
        secondary_bound_violations: 0,
    };
    for (p, s, t, ok) in results {
        check.max_primary_error = check.max_primary_error.max(p);
        check.max_secondary_error = check.max_secondary_error.max(s);
        check.max_telescoping_error = check.max_telescoping_error.max(t);
        check.secondary_bound_violations += usize::from(!ok);
    }
    Ok(check)
}

/// Outcome of [`verify_mesh`].
#[derive(Debug, Clone, PartialEq)]
pub struct MeshCheck {
    pub meshes: usize,
    pub inequalities_checked: usize,
    /// `(γ, N, index, property)` of every violation.
    pub violations: Vec<(f64, usize, usize, MeshProperty)>,
}

/// Mesh inequalities on random `(γ ∈ [1, 6], N ∈ [2, 2000])`.
pub fn verify_mesh(seed: u64, meshes: usize) -> Result<MeshCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut check = MeshCheck { meshes, inequalities_checked: 0, violations: Vec::new() };
    for _ in 0..meshes {
        let g: f64 = rng.gen_range(1.0..=6.0);
        let n: usize = rng.gen_range(2..=2000);
        let report = GradedMesh::new(1.0, n, g)?.check_properties();
        check.inequalities_checked += report.checked;
        check.violations.extend(report.violations.into_iter().map(|(i, p)| (g, n, i, p)));
    }
    Ok(check)
}
