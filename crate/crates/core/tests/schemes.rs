//! Scheme-level properties: degeneration at α = 1, trivial solutions,
//! determinism and observed convergence orders.

mod common;

use proptest::prelude::*;
use subdiff::harness::{
    doubling, error_series, error_trace, max_error, temporal_study, SpatialPolicy, StudyConfig,
};
use subdiff::mesh::GradedMesh;
use subdiff::mittag_leffler::SeriesSolution;
use subdiff::solver::{run, InitialProjection, Scheme};
use subdiff::{Problem, SpaceFunction, SpatialSystem};

fn bump() -> SpaceFunction {
    SpaceFunction::new(|x| x * x * (1.0 - x)).with_derivative(|x| 2.0 * x - 3.0 * x * x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn unit_order_is_crank_nicolson(
        steps in 1usize..=40,
        gamma in 1.0f64..=5.0,
        elements in 2usize..=24,
        reaction in 0.0f64..3.0,
        gcn in any::<bool>(),
    ) {
        let problem = Problem::new(1.0, bump()).unwrap().with_reaction(move |_| reaction);
        let mesh = GradedMesh::new(1.0, steps, gamma).unwrap();
        let sys = SpatialSystem::build(0.0, 1.0, elements, &problem).unwrap();
        let scheme = if gcn { Scheme::Gcn } else { Scheme::L1 };
        let h = run(&problem, &mesh, &sys, scheme, InitialProjection::Ritz).unwrap();
        let (m, g) = common::dense_matrices(elements, reaction);
        let cn = common::crank_nicolson(&mesh, &m, &g, h.at(0));
        let ours: Vec<Vec<f64>> = (0..=steps).map(|n| h.at(n).to_vec()).collect();
        prop_assert!(common::max_rel_diff(&ours, &cn) <= 1e-12);
    }

    #[test]
    fn zero_data_gives_zero(alpha in 0.05f64..=1.0, steps in 1usize..=30, gamma in 1.0f64..=4.0, gcn in any::<bool>()) {
        let problem = Problem::new(alpha, SpaceFunction::zero()).unwrap();
        let mesh = GradedMesh::new(1.0, steps, gamma).unwrap();
        let sys = SpatialSystem::build(0.0, 1.0, 7, &problem).unwrap();
        let scheme = if gcn { Scheme::Gcn } else { Scheme::L1 };
        let h = run(&problem, &mesh, &sys, scheme, InitialProjection::Ritz).unwrap();
        prop_assert!(h.iter().all(|(_, u)| u.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn runs_are_bitwise_deterministic(alpha in 0.05f64..1.0, steps in 1usize..=30, gamma in 1.0f64..=4.0) {
        let problem = Problem::new(alpha, bump()).unwrap().with_source(|x, t| t * x);
        let mesh = GradedMesh::new(1.0, steps, gamma).unwrap();
        let sys = SpatialSystem::build(0.0, 1.0, 9, &problem).unwrap();
        let a = run(&problem, &mesh, &sys, Scheme::L1, InitialProjection::L2).unwrap();
        let b = run(&problem, &mesh, &sys, Scheme::L1, InitialProjection::L2).unwrap();
        for n in 0..=steps {
            prop_assert_eq!(a.at(n), b.at(n));
        }
    }
}

#[test]
fn initial_coefficients_follow_projection() {
    let problem = Problem::new(0.5, bump()).unwrap();
    let mesh = GradedMesh::new(1.0, 3, 2.0).unwrap();
    let sys = SpatialSystem::build(0.0, 1.0, 10, &problem).unwrap();
    let ritz = run(&problem, &mesh, &sys, Scheme::L1, InitialProjection::Ritz).unwrap();
    assert_eq!(ritz.at(0), sys.ritz_project(&problem.initial).unwrap().as_slice());
    let l2 = run(&problem, &mesh, &sys, Scheme::L1, InitialProjection::L2).unwrap();
    assert_eq!(l2.at(0), sys.l2_project(&problem.initial).unwrap().as_slice());
}

fn observed_rates(alpha: f64, gamma: f64, scheme: Scheme, steps: Vec<usize>, spatial: SpatialPolicy) -> Vec<f64> {
    let mut c = StudyConfig::new(alpha);
    c.gammas = vec![gamma];
    c.steps = steps;
    c.scheme = scheme;
    c.spatial = spatial;
    c.check_dominance = false;
    temporal_study(&c).unwrap().rates(gamma)
}

#[test]
fn gcn_is_order_one_plus_alpha() {
    // with γ = 2/(σ+α) the grading is not the bottleneck
    let r = observed_rates(0.5, 3.2, Scheme::Gcn, doubling(40, 4), SpatialPolicy::Fixed(800));
    let last = *r.last().unwrap();
    assert!((last - 1.5).abs() < 0.05, "{r:?}");
    // on a milder mesh the grading limit min{γ(σ+α), 2} = 1.25 takes over
    let r = observed_rates(0.5, 2.0, Scheme::Gcn, doubling(40, 4), SpatialPolicy::Fixed(800));
    assert!((r.last().unwrap() - 1.25).abs() < 0.05, "{r:?}");
}

#[test]
fn unit_order_rates() {
    // classical second order once the initial layer is resolved...
    let r = observed_rates(1.0, 1.6, Scheme::L1, doubling(20, 4), SpatialPolicy::Fixed(800));
    assert!((r.last().unwrap() - 2.0).abs() < 0.05, "{r:?}");
    // ...while the max over all steps on a uniform mesh sees it: γ(σ+α) = 1.25
    let r = observed_rates(1.0, 1.0, Scheme::L1, doubling(20, 4), SpatialPolicy::Fixed(800));
    assert!((r.last().unwrap() - 1.25).abs() < 0.1, "{r:?}");
}

#[test]
fn temporal_rates_follow_grading_law() {
    // observed r_t at the finest pair within 0.1 of min{γ(σ+α), 2}, σ = α/4
    let grid: [(f64, &[f64], usize, SpatialPolicy); 3] = [
        (0.4, &[1.0, 2.0, 3.0, 4.0], 6, SpatialPolicy::TiedToN),
        (0.6, &[1.0, 2.0, 2.5, 3.0], 6, SpatialPolicy::TiedToN),
        (0.8, &[1.0, 1.5, 2.0], 5, SpatialPolicy::Fixed(1200)),
    ];
    for (alpha, gammas, count, spatial) in grid {
        for &g in gammas {
            let predicted = (g * 1.25 * alpha).min(2.0);
            let r = observed_rates(alpha, g, Scheme::L1, doubling(20, count), spatial);
            let last = *r.last().unwrap();
            assert!((last - predicted).abs() <= 0.1, "alpha {alpha} gamma {g}: {last} vs {predicted}");
        }
    }
}

#[test]
fn trace_maximum_is_the_study_error() {
    let alpha = 0.4;
    let config = StudyConfig::new(alpha);
    let trace = error_trace(&config, 4.0, 40, 60).unwrap();
    let sol = SeriesSolution::new(alpha).unwrap();
    let problem = sol.problem().unwrap();
    let mesh = GradedMesh::new(1.0, 40, 4.0).unwrap();
    let sys = SpatialSystem::build(0.0, 1.0, 60, &problem).unwrap();
    let h = run(&problem, &mesh, &sys, Scheme::L1, InitialProjection::L2).unwrap();
    let refine = 2400usize.div_ceil(60);
    let direct = max_error(&h, &sys, &sol, refine).unwrap();
    let tmax = trace.iter().map(|p| p.1).fold(0.0, f64::max);
    assert_eq!(tmax, direct);
    assert_eq!(error_series(&h, &sys, &sol, refine).unwrap(), trace);
}

#[test]
fn graded_trace_beats_uniform_early() {
    let config = StudyConfig::new(0.4);
    let uniform = error_trace(&config, 1.0, 160, 200).unwrap();
    let graded = error_trace(&config, 4.0, 160, 200).unwrap();
    // compare at the uniform mesh's early nodes against the graded error there
    for &(t, e) in uniform.iter().take(10) {
        let near = graded.iter().filter(|p| p.0 <= t).map(|p| p.1).fold(0.0, f64::max);
        assert!(near < e, "t = {t}: graded {near} vs uniform {e}");
    }
}
