use diskfrac::basis::Truncation;
use diskfrac::ops::Sym2;
use diskfrac::quadrature::{wellposed_limit, DiffusivitySpec};
use diskfrac::verify::{
    check_infsup, check_mapping_properties, check_norm_equivalence, check_ratio_bounds, check_selfadjointness,
    check_sup_formulas, check_w_bound, explore_violating_k, ratio_first, ratio_second, sup_first, sup_third, w_bound,
    Assertion, CheckResult, Relation, Suite,
};
use proptest::prelude::*;

const ALPHAS: [f64; 3] = [1.2, 1.5, 1.8];

fn assert_passes(r: &CheckResult) {
    assert_eq!(r.pass, Some(true), "{} at α={}: {:#?}", r.name, r.alpha, r.failures());
}

fn assertion<'a>(r: &'a CheckResult, name: &str) -> &'a Assertion {
    r.assertions.iter().find(|a| a.name == name).unwrap_or_else(|| panic!("no assertion {name}"))
}

#[test]
fn ratio_examples() {
    assert_eq!(ratio_second(1.5, 0.0), 1.9375);
    let r = ratio_first(1.5, 1e6);
    assert!(r < 4.0 && 4.0 - r < 1e-6);
}

#[test]
fn ratio_bounds_hold() {
    for alpha in ALPHAS.into_iter().chain([1.01, 1.9999]) {
        assert_passes(&check_ratio_bounds(alpha, 100_000, 300).unwrap());
    }
    assert!(check_ratio_bounds(2.0, 10, 10).is_err());
    assert!(check_ratio_bounds(1.5, 10, 1).is_err());
}

#[test]
fn sup_formula_examples() {
    assert!((sup_first(1.5, 0.0) - 0.5 / 23.25).abs() < 1e-15);
    let limit = 0.25 / (1.5 * 3.5);
    let far = sup_third(1.5, 1e4, 0.0);
    assert!(far < limit && limit - far < 1e-3, "{far}");
    assert!(sup_first(1.9999, 0.0) < 1e-8 && sup_third(1.9999, 1e4, 0.0) < 1e-8);
}

#[test]
fn sup_formulas_hold() {
    for alpha in ALPHAS {
        assert_passes(&check_sup_formulas(alpha, 100_000, 10_000).unwrap());
    }
}

#[test]
fn norm_bracket_holds_and_mode_1_0_gives_stencil_value() {
    let t = Truncation::new(12, 12);
    for alpha in ALPHAS {
        for s in [0.0, -0.5, 0.5, 1.0] {
            let r = check_norm_equivalence(alpha, t, 150, 7, s).unwrap();
            for name in ["lower_bound", "upper_bound", "upper_approached_at_mode_0_1000"] {
                assert!(assertion(&r, name).pass, "α={alpha} s={s}: {:?}", assertion(&r, name));
            }
            // the minimum over single modes sits at (0,0) and equals 2α
            assert!((r.recorded["min_ratio"] - 2.0 * alpha).abs() < 1e-12);
            let m10 = r.recorded["mode_1_0_ratio"];
            assert!((m10 - (3.0 * alpha + 2.0) / 2.0).abs() < 1e-12, "α={alpha}: {m10}");
        }
    }
}

#[test]
fn residual_bound_holds() {
    let t = Truncation::new(12, 12);
    for alpha in ALPHAS {
        for s in [0.0, -0.5, 0.5, 1.0] {
            assert_passes(&check_w_bound(alpha, t, 150, 11, s).unwrap());
        }
    }
    assert!((w_bound(1.5) - 0.21822).abs() < 1e-5);
}

#[test]
fn infsup_floor() {
    let alpha = 1.5;
    let r = check_infsup(alpha, &DiffusivitySpec::identity(alpha).unwrap(), Truncation::new(8, 8), 50, 3).unwrap();
    assert_passes(&r);
    assert!((r.bound - 1.5147).abs() < 1e-4);
    let k = DiffusivitySpec::constant(Sym2::new(1.0, 0.0, 2.0), 1.8).unwrap();
    let r = check_infsup(1.8, &k, Truncation::new(8, 8), 50, 3).unwrap();
    assert!(r.bound > 0.0);
    assert_passes(&r);
}

#[test]
fn infsup_at_critical_ratio_reports_margin_only() {
    let alpha = 1.5;
    let k = DiffusivitySpec::constant(Sym2::new(1.0, 0.0, wellposed_limit(alpha)), alpha).unwrap();
    let r = check_infsup(alpha, &k, Truncation::new(6, 6), 10, 0).unwrap();
    assert!(r.bound.abs() < 1e-12);
    assert_eq!(r.pass, None);
    assert!(r.assertions.is_empty());
    assert_eq!(r.margin, r.measured - r.bound);
}

#[test]
fn mapping_properties_hold() {
    assert_passes(&check_mapping_properties(1.5, &[-0.5, 0.0, 1.0], 25, 100, 5).unwrap());
    assert!(check_mapping_properties(1.5, &[], 25, 100, 5).is_err());
}

#[test]
fn selfadjointness_holds() {
    for alpha in ALPHAS {
        assert_passes(&check_selfadjointness(alpha, Truncation::new(6, 6)).unwrap());
    }
}

#[test]
fn exploration_has_no_verdict() {
    let r = explore_violating_k(1.5, Truncation::new(4, 4), &[0.9, 1.5]).unwrap();
    assert_eq!(r.pass, None);
    assert!(r.recorded.contains_key("factor_1.5_invertible"));
}

#[test]
fn results_are_deterministic_and_serializable() {
    let t = Truncation::new(8, 8);
    let a = check_w_bound(1.5, t, 40, 99, 0.5).unwrap();
    let b = check_w_bound(1.5, t, 40, 99, 0.5).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.parameters["seed"], "99");
    let json = serde_json::to_string(&a).unwrap();
    assert!(json.contains("\"w_bound\""));
    let other = check_w_bound(1.5, t, 40, 100, 0.5).unwrap();
    assert!(a.recorded["max_ratio"].is_finite());
    assert_eq!(other.parameters["seed"], "100");
}

#[test]
fn suite_names_parse() {
    assert_eq!("constants".parse::<Suite>().unwrap(), Suite::Constants);
    assert_eq!("mapping".parse::<Suite>().unwrap(), Suite::Mapping);
    assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
    assert!("everything".parse::<Suite>().is_err());
}

proptest! {
    #[test]
    fn margin_sign_matches_verdict(measured in -2.0f64..2.0, bound in -2.0f64..2.0, tol in 0.0f64..0.5, which in 0usize..4) {
        let relation = [Relation::AtMost, Relation::Below, Relation::AtLeast, Relation::Equal][which];
        let a = Assertion::new("probe", measured, relation, bound, tol);
        if relation == Relation::Below {
            prop_assert_eq!(a.pass, a.margin() > 0.0);
        } else {
            prop_assert_eq!(a.pass, a.margin() >= 0.0);
        }
    }
}
