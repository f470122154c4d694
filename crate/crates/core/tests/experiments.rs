mod common;

use num_traits::ToPrimitive;

use pebbling::analytics::{chebyshev_failure_bound, expected_certificate_bound, ModelParams};
use pebbling::experiments::{
    csv_row, estimate_solvable_probability, find_threshold, model_contrast, ExperimentSpec,
    PebbleCount, PebblePolicy, ThresholdSearch, CSV_HEADER,
};
use pebbling::family::{family_from_spec, FuseByEpsilon};
use pebbling::sampling::{Dependent, Independent};
use pebbling::{build_fuse, build_path};

#[test]
fn small_fuse_estimate_covers_enumerated_value() {
    let g = build_fuse(2, 4).unwrap();
    let exact = common::exact_solvable_probability(&g, 2).to_f64().unwrap();
    let est = estimate_solvable_probability(&g, 2, 4000, 21, &Dependent).unwrap();
    assert!(est.ci_low <= exact && exact <= est.ci_high, "{exact} vs {est:?}");
}

#[test]
fn fuse_threshold_has_the_right_scale() {
    let n = 1usize << 16;
    let fam = FuseByEpsilon::new(0.25).unwrap();
    let th = find_threshold(&fam, n, &ThresholdSearch::default(), 42, &Dependent).unwrap();
    let scale = (n as f64).powf(0.75);
    let t = th.t_half as f64;
    assert!(scale / 8.0 <= t && t <= 8.0 * scale, "t_half = {t}, n^0.75 = {scale}");
}

#[test]
fn star_threshold_is_near_sqrt_n() {
    let star = family_from_spec("star").unwrap();
    let th = find_threshold(star.as_ref(), 10_000, &ThresholdSearch::default(), 42, &Dependent).unwrap();
    assert!((50..=200).contains(&th.t_half), "t_half = {}", th.t_half);
}

#[test]
fn contrast_trivial_points() {
    let rows = model_contrast(&[2, 16], PebbleCount::Fixed(0), 200, 3).unwrap();
    assert!(rows.iter().all(|r| r.dependent.p_hat == 0.0 && r.independent.p_hat == 0.0));
    // One pebble on two vertices has the same law in both models, and P_2 needs two.
    let rows = model_contrast(&[2], PebbleCount::Fixed(1), 200, 3).unwrap();
    assert_eq!(rows[0].dependent.p_hat, rows[0].independent.p_hat);
}

#[test]
fn independent_placement_solves_paths_sooner() {
    let rows = model_contrast(&[256], PebbleCount::NLogN(4.0), 1000, 5).unwrap();
    assert!(rows[0].independent.p_hat >= rows[0].dependent.p_hat);
    let rows = model_contrast(&[256], PebbleCount::NLogN(0.5), 1000, 5).unwrap();
    let r = &rows[0];
    assert!(
        r.independent.ci_low > r.dependent.ci_high,
        "independent {:?} vs dependent {:?}",
        r.independent,
        r.dependent
    );
}

#[test]
fn analytic_bounds_sandwich_estimates() {
    let eps = 0.25;
    let n = 1u64 << 14;
    for omega in [16.0, 32.0] {
        let below = ModelParams::below_threshold(n, eps, omega).unwrap();
        let bound = expected_certificate_bound(&below).unwrap();
        assert!(bound.asymptotic < 0.1);
        let g = build_fuse(below.m as usize, n as usize).unwrap();
        let est = estimate_solvable_probability(&g, below.t, 2000, 8, &Dependent).unwrap();
        assert!(bound.markov >= est.p_hat - 2.0 * est.width(), "{bound:?} vs {est:?}");

        let above = ModelParams::above_threshold(n, eps, omega).unwrap();
        let cheb = chebyshev_failure_bound(&above).unwrap();
        assert!(1.0 - cheb > 0.9);
        let est = estimate_solvable_probability(&g, above.t, 2000, 8, &Dependent).unwrap();
        assert!(1.0 - cheb <= est.p_hat + 2.0 * est.width(), "{cheb} vs {est:?}");
    }
}

fn spec_csv(spec: &ExperimentSpec) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for row in spec.run().unwrap() {
        out.push_str(&csv_row(&row.family, row.m, &row.estimate, spec.master_seed));
        out.push('\n');
    }
    out
}

#[test]
fn experiment_csv_is_independent_of_thread_count() {
    let spec = ExperimentSpec {
        family: "fuse-eps:0.25".into(),
        n_grid: vec![256, 1024],
        pebbles: PebblePolicy::Bisection {
            p_star: 0.5,
            precision: 0.05,
        },
        trials_per_point: 200,
        master_seed: 42,
        model: "dependent".into(),
    };
    let run_with = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| spec_csv(&spec))
    };
    let one = run_with(1);
    assert_eq!(one, run_with(4));
    assert_eq!(one, run_with(1));
    assert!(one.lines().count() > 3);
}

#[test]
fn estimates_reject_non_trees_and_handle_degenerate_cases() {
    let p2 = build_path(2).unwrap();
    assert_eq!(estimate_solvable_probability(&p2, 2, 100, 1, &Independent).unwrap().p_hat, 1.0);
    assert_eq!(estimate_solvable_probability(&p2, 0, 100, 1, &Dependent).unwrap().p_hat, 0.0);
    let cycle = pebbling::Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
    assert!(estimate_solvable_probability(&cycle, 3, 10, 1, &Dependent).is_err());
}
