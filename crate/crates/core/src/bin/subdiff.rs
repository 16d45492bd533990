//! Command-line driver for convergence studies and self-checks.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use subdiff::harness::{
    self, NormQuadrature, SpatialPolicy, StudyConfig, StudyReport, REFERENCE_PIECES,
};
use subdiff::{InitialProjection, Scheme};

#[derive(Parser)]
#[command(name = "subdiff", version, about = "L1 / GCN convergence studies for fractional subdiffusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Errors and rates r_t over the --nt list (M fixed by --mx, or tied to N).
    Temporal(StudyArgs),
    /// Errors and rates r_x over the --mx list at N = first --nt.
    Spatial(StudyArgs),
    /// Per-step errors ‖U^n − u(t_n)‖ for each --gamma.
    Trace(StudyArgs),
    /// Closed-form weights against adaptive quadrature on random meshes.
    VerifyWeights(VerifyArgs),
    /// Graded-mesh inequalities on random (γ, N).
    VerifyMesh(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    L1,
    Gcn,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    L2,
    Ritz,
}

#[derive(Args)]
struct StudyArgs {
    #[arg(long)]
    alpha: f64,
    /// Grading exponent; repeatable.
    #[arg(long)]
    gamma: Vec<f64>,
    /// Number of time steps; repeatable.
    #[arg(long)]
    nt: Vec<usize>,
    /// Number of space elements; repeatable.
    #[arg(long)]
    mx: Vec<usize>,
    /// Temporal study: use M = N instead of a fixed M.
    #[arg(long)]
    tied: bool,
    #[arg(long, value_enum, default_value = "l1")]
    scheme: SchemeArg,
    /// Series truncation of the reference solution.
    #[arg(long, default_value_t = 60)]
    terms: usize,
    /// Projection used for U^0.
    #[arg(long, value_enum, default_value = "l2")]
    initial: InitArg,
    /// Evaluate the error norm on each run's own elements instead of a
    /// 2400-piece reference partition.
    #[arg(long)]
    own_mesh_norm: bool,
    /// Skip the dominance rerun at the finest resolution.
    #[arg(long)]
    no_dominance_check: bool,
    /// CSV output; an aligned-text copy goes next to it with extension .txt.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 2 if any dominance warning is raised.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 500)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl StudyArgs {
    fn config(&self, spatial: bool) -> StudyConfig {
        let mut c = if spatial { StudyConfig::spatial_defaults(self.alpha) } else { StudyConfig::new(self.alpha) };
        if !self.gamma.is_empty() {
            c.gammas = self.gamma.clone();
        }
        if !self.nt.is_empty() {
            c.steps = self.nt.clone();
        }
        if spatial {
            if !self.mx.is_empty() {
                c.elements = self.mx.clone();
            }
        } else if self.tied {
            c.spatial = SpatialPolicy::TiedToN;
        } else if let Some(&m) = self.mx.first() {
            c.spatial = SpatialPolicy::Fixed(m);
            c.elements = vec![m];
        }
        c.scheme = match self.scheme {
            SchemeArg::L1 => Scheme::L1,
            SchemeArg::Gcn => Scheme::Gcn,
        };
        c.init = match self.initial {
            InitArg::L2 => InitialProjection::L2,
            InitArg::Ritz => InitialProjection::Ritz,
        };
        c.terms = self.terms;
        c.norm = if self.own_mesh_norm { NormQuadrature::OwnMesh } else { NormQuadrature::AtLeast(REFERENCE_PIECES) };
        c.check_dominance = !self.no_dominance_check;
        c
    }
}

fn write_outputs(out: Option<&Path>, csv: &str, text: &str) -> Result<(), String> {
    print!("{text}");
    if let Some(path) = out {
        fs::write(path, csv).map_err(|e| format!("writing {}: {e}", path.display()))?;
        let mirror = path.with_extension("txt");
        fs::write(&mirror, text).map_err(|e| format!("writing {}: {e}", mirror.display()))?;
    }
    Ok(())
}

fn study(args: &StudyArgs, spatial: bool) -> Result<ExitCode, String> {
    let config = args.config(spatial);
    let report: StudyReport = if spatial {
        harness::spatial_study(&config)
    } else {
        harness::temporal_study(&config)
    }
    .map_err(|e| e.to_string())?;
    write_outputs(args.out.as_deref(), &report.to_csv(), &report.to_text())?;
    for w in &report.warnings {
        eprintln!("{}", w.message(report.kind));
    }
    Ok(if args.strict && !report.warnings.is_empty() { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn trace(args: &StudyArgs) -> Result<ExitCode, String> {
    let config = args.config(false);
    let steps = args.nt.first().copied().unwrap_or(160);
    let elements = args.mx.first().copied().unwrap_or(1200);
    let gammas = if args.gamma.is_empty() { vec![1.0, config.gammas[0]] } else { args.gamma.clone() };
    let mut traces = Vec::new();
    let mut text = format!("error trace, alpha = {}, N = {steps}, M = {elements}\n", args.alpha);
    for g in gammas {
        let t = harness::error_trace(&config, g, steps, elements).map_err(|e| e.to_string())?;
        let (tmax, emax) = t.iter().copied().fold((0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
        text += &format!("gamma = {g}: max error {} at t = {}\n", harness::sci(emax, 4), harness::sci(tmax, 4));
        traces.push((g, t));
    }
    write_outputs(args.out.as_deref(), &harness::trace_csv(args.alpha, steps, elements, &traces), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn verify_weights(args: &VerifyArgs) -> Result<ExitCode, String> {
    let c = harness::verify_weights(args.seed, args.samples).map_err(|e| e.to_string())?;
    let ok = c.max_primary_error <= 1e-11
        && c.max_secondary_error <= 1e-11
        && c.max_telescoping_error <= 1e-12
        && c.secondary_bound_violations == 0;
    let text = format!(
        "weights: {} samples, seed {}\n  max |omega - quadrature|      {}\n  max |omega-hat - quadrature|  {}\n  max telescoping rel. error   {}\n  bound violations             {}\n{}\n",
        c.samples,
        args.seed,
        harness::sci(c.max_primary_error, 3),
        harness::sci(c.max_secondary_error, 3),
        harness::sci(c.max_telescoping_error, 3),
        c.secondary_bound_violations,
        if ok { "PASS" } else { "FAIL" }
    );
    let csv = format!(
        "samples,seed,max_primary_error,max_secondary_error,max_telescoping_error,bound_violations\n{},{},{},{},{},{}\n",
        c.samples,
        args.seed,
        harness::sci(c.max_primary_error, 6),
        harness::sci(c.max_secondary_error, 6),
        harness::sci(c.max_telescoping_error, 6),
        c.secondary_bound_violations
    );
    write_outputs(args.out.as_deref(), &csv, &text)?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn verify_mesh(args: &VerifyArgs) -> Result<ExitCode, String> {
    let c = harness::verify_mesh(args.seed, args.samples).map_err(|e| e.to_string())?;
    let mut text = format!(
        "meshes: {} random (gamma, N), seed {}, {} inequalities checked, {} violations\n",
        c.meshes,
        args.seed,
        c.inequalities_checked,
        c.violations.len()
    );
    let mut csv = String::from("gamma,N,index,property\n");
    for (g, n, i, p) in &c.violations {
        text += &format!("  gamma = {g}, N = {n}, n = {i}: {p:?}\n");
        csv += &format!("{g},{n},{i},{p:?}\n");
    }
    text += if c.violations.is_empty() { "PASS\n" } else { "FAIL\n" };
    write_outputs(args.out.as_deref(), &csv, &text)?;
    Ok(if c.violations.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Temporal(a) => study(a, false),
        Command::Spatial(a) => study(a, true),
        Command::Trace(a) => trace(a),
        Command::VerifyWeights(a) => verify_weights(a),
        Command::VerifyMesh(a) => verify_mesh(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    })
}
