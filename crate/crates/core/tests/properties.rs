mod common;

use proptest::prelude::*;

use crflat::fixtures;
use crflat::glue::{parse_glue_expr, GlueGraph, ModelType};
use crflat::manifold::BoxDomain;
use crflat::orbit::{census, singular_match, spec_level_components};
use crflat::singularity::{analyze_points, Classification};

#[test]
fn takagi_reconstructs_random_symmetric_matrices() {
    let (rec, unit) = common::takagi_suite(100, 11);
    assert!(rec <= 1e-10, "reconstruction error {rec:e}");
    assert!(unit <= 1e-10, "unitarity error {unit:e}");
}

#[test]
fn lambda_and_flatness_are_invariant() {
    let out = common::invariance_suite(50, 12);
    assert!(out.flatness_preserved);
    assert!(out.max_recovery_error <= 1e-8, "recovery {:e}", out.max_recovery_error);
    assert!(out.max_lambda_deviation <= 1e-8, "deviation {:e}", out.max_lambda_deviation);
}

#[test]
fn derivatives_match_finite_differences() {
    let worst = common::finite_difference_suite(40, 1e-4, 13);
    assert!(worst <= 1e-6, "relative error {worst:e}");
}

#[test]
fn diagonal_quadric_census_matches_sign_oracle() {
    let levels = [-0.5, -0.3, -0.1, -0.05, 0.05, 0.1, 0.3, 0.5];
    let bad = common::quadric_census_suite(&levels, 33);
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn cubic_perturbation_keeps_the_saddle_census() {
    let spec = common::graph_spec(
        "perturbed_saddle",
        &[(3.0, [2, 0, 0, 0]), (-1.0, [0, 2, 0, 0]), (1.0, [0, 0, 2, 0]), (1.0, [0, 0, 0, 2]), (0.1, [3, 0, 0, 0])],
        BoxDomain::cube(4, 1.0),
    );
    let c = census(&spec, &[-0.3, -0.1, 0.1, 0.3], 33).unwrap();
    assert_eq!(c.counts, [2, 2, 1, 1]);
    let points = analyze_points(&spec, 5).unwrap();
    let origin: Vec<_> = points.iter().filter(|p| p.location.x.iter().all(|v| v.abs() < 1e-8)).collect();
    assert_eq!(origin.len(), 1);
    assert_eq!(origin[0].classification, Classification::SpecialKHyperbolic(1));
    assert!(singular_match(&c, &points));
}

#[test]
fn two_saddles_give_two_singular_levels() {
    let spec = common::two_saddle_spec();
    let points = analyze_points(&spec, 7).unwrap();
    let elliptic = points.iter().filter(|p| p.classification == Classification::SpecialElliptic).count();
    let hyper: Vec<f64> = points
        .iter()
        .filter(|p| p.classification == Classification::SpecialKHyperbolic(1))
        .map(|p| p.location.t)
        .collect();
    assert_eq!((points.len(), elliptic, hyper.len()), (5, 3, 2), "{points:#?}");
    let want = common::two_saddle_values();
    for (h, w) in hyper.iter().zip(want) {
        assert!((h - w).abs() < 1e-8, "{h} vs {w}");
    }

    let c = census(&spec, &[0.2, 2.0, 6.0], 33).unwrap();
    assert_eq!(c.counts, [3, 2, 1]);
    assert_eq!(c.singular_levels.len(), 2);
    for (iv, w) in c.singular_levels.iter().zip(want) {
        assert!(iv[0] - c.cell_width <= w && w <= iv[1] + c.cell_width, "{iv:?} vs {w}");
    }
    assert!(singular_match(&c, &points));
}

#[test]
fn horned_counts_are_stable_under_refinement() {
    let spec = fixtures::horned_sphere();
    for res in [17, 33, 65] {
        let counts: Vec<usize> =
            [-0.3, 0.3].iter().map(|&c| spec_level_components(&spec, c, res).unwrap().count).collect();
        assert_eq!(counts, [2, 1], "resolution {res}");
    }
}

fn model_strategy() -> impl Strategy<Value = ModelType> {
    prop::sample::select(ModelType::ALL.to_vec())
}

fn expr_strategy() -> impl Strategy<Value = Vec<Vec<ModelType>>> {
    prop::collection::vec(prop::collection::vec(model_strategy(), 1..4), 1..5)
}

fn render(groups: &[Vec<ModelType>]) -> String {
    groups
        .iter()
        .map(|g| g.iter().map(|m| format!("({})", m.tag())).collect::<Vec<_>>().join("-"))
        .collect::<Vec<_>>()
        .join("->")
}

proptest! {
    #[test]
    fn glue_print_parse_round_trip(groups in expr_strategy()) {
        let text = render(&groups);
        let g: GlueGraph = parse_glue_expr(&text).unwrap();
        prop_assert_eq!(g.to_string(), text.clone());
        let again = parse_glue_expr(&g.to_string()).unwrap();
        prop_assert_eq!(again, g);
    }

    #[test]
    fn glue_parsing_ignores_whitespace_and_arrow_style(groups in expr_strategy()) {
        let text = render(&groups);
        let spaced = text.replace("->", " → ").replace(")-(", ") - (");
        prop_assert_eq!(parse_glue_expr(&spaced).unwrap(), parse_glue_expr(&text).unwrap());
    }

    #[test]
    fn closed_valid_gluings_have_chi_from_point_counts(groups in expr_strategy()) {
        let g = parse_glue_expr(&render(&groups)).unwrap();
        let v = crflat::glue::validate(&g);
        if v.ok() && v.closed {
            let (e, h) = crflat::glue::point_counts(&g);
            prop_assert_eq!(crflat::glue::euler_characteristic(&g).unwrap(), e as i64 - h as i64);
        } else {
            prop_assert!(crflat::glue::euler_characteristic(&g).is_err());
        }
    }
}
