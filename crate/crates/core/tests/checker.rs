use std::path::PathBuf;

use raequiv::automata::{parse_automaton, AnyAutomaton, RegisterAutomaton};
use raequiv::algebra::PolyAlgebra;
use raequiv::checker::{
    decide_equivalence, decide_functionality, decide_zeroness, recheck_zeroness, verify_ideal_family, Budget,
    Certificate, IdealFamily, Outcome,
};
use raequiv::encodings::compile_to_poly;
use raequiv::poly::parse_polynomial;
use raequiv::reductions::{build_oneletter_variant, build_reduction_ra, TwoCounterMachine};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn load(name: &str) -> AnyAutomaton {
    parse_automaton(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

fn poly(name: &str) -> RegisterAutomaton<PolyAlgebra> {
    compile_to_poly(&load(name)).unwrap()
}

fn budget(secs: f64) -> Budget {
    Budget {
        max_secs: secs,
        deterministic: true,
        ..Budget::default()
    }
}

#[test]
fn constant_zero_has_principal_certificate() {
    let m = poly("zero.ra");
    let v = decide_zeroness(&m, &budget(10.0)).unwrap();
    assert_eq!(v.outcome, Outcome::Zero);
    let Certificate::Family { family, .. } = &v.certificate else {
        panic!("{v:?}")
    };
    assert_eq!(family.generators(0), &[parse_polynomial("r1").unwrap()]);
    assert!(recheck_zeroness(&m, &v).unwrap());
}

#[test]
fn spec_family_examples() {
    let m = poly("zero.ra");
    let mut good = IdealFamily::zero();
    good.insert(0, vec![parse_polynomial("r1").unwrap()]);
    assert!(verify_ideal_family(&m, &good).unwrap());
    let mut shifted = IdealFamily::zero();
    shifted.insert(0, vec![parse_polynomial("r1 - 1").unwrap()]);
    assert!(!verify_ideal_family(&m, &shifted).unwrap());
    assert!(!verify_ideal_family(&poly("leafone.ra"), &IdealFamily::zero()).unwrap());
}

#[test]
fn leaf_witness() {
    let m = poly("leafone.ra");
    let v = decide_zeroness(&m, &budget(5.0)).unwrap();
    assert_eq!(v.outcome, Outcome::NonZero);
    assert_eq!(v.certificate.tree().unwrap().size(), 1);
    assert!(recheck_zeroness(&m, &v).unwrap());
}

#[test]
fn fcns_swapped_is_equivalent() {
    let (a, b) = (poly("fcns.ra"), poly("fcns_swapped.ra"));
    let v = decide_equivalence(&a, &b, &budget(120.0)).unwrap();
    assert_eq!(v.outcome, Outcome::Equivalent, "{v:?}");
    let diff = raequiv::automata::cross_difference(&a, &b).unwrap();
    let Certificate::Family { family, .. } = &v.certificate else {
        panic!()
    };
    assert!(verify_ideal_family(&diff, family).unwrap());
}

#[test]
fn fcns_against_itself_is_zero() {
    let a = poly("fcns.ra");
    let diff = raequiv::automata::cross_difference(&a, &a).unwrap();
    let v = decide_zeroness(&diff, &budget(60.0)).unwrap();
    assert_eq!(v.outcome, Outcome::Zero);
}

#[test]
fn fcns_mutant_is_not_equivalent() {
    let v = decide_equivalence(&poly("fcns.ra"), &poly("fcns_mutant.ra"), &budget(5.0)).unwrap();
    assert_eq!(v.outcome, Outcome::NotEquivalent);
    assert!(v.certificate.tree().unwrap().size() <= 3);
}

#[test]
fn two_leaf_rules_are_not_functional() {
    let v = decide_functionality(&poly("twoleaf.ra"), &budget(1.0)).unwrap();
    assert_eq!(v.outcome, Outcome::NotFunctional);
    let Certificate::TwoOutputs { tree, first, second } = &v.certificate else {
        panic!()
    };
    assert_eq!(tree.size(), 1);
    assert_ne!(first, second);
}

#[test]
fn deterministic_is_functional() {
    let v = decide_functionality(&poly("fcns.ra"), &budget(1.0)).unwrap();
    assert_eq!(v.outcome, Outcome::Functional);
    assert_eq!(v.certificate, Certificate::Deterministic);
}

#[test]
fn word_automata_are_equivalent() {
    let v = decide_equivalence(&poly("words.ra"), &poly("words_copy.ra"), &budget(30.0)).unwrap();
    assert_eq!(v.outcome, Outcome::Equivalent, "{v:?}");
}

#[test]
fn two_threads_agree() {
    let threaded = Budget {
        max_secs: 60.0,
        ..Budget::default()
    };
    let v = decide_equivalence(&poly("fcns.ra"), &poly("fcns_swapped.ra"), &threaded).unwrap();
    assert_eq!(v.outcome, Outcome::Equivalent);
    let v = decide_zeroness(&poly("leafone.ra"), &threaded).unwrap();
    assert_eq!(v.outcome, Outcome::NonZero);
}

#[test]
fn substitution_is_counterexample_only() {
    let text = std::fs::read_to_string(data("onestep.2cm")).unwrap();
    let m = TwoCounterMachine::parse(&text).unwrap();
    let ra = build_reduction_ra(&m, 2).unwrap();
    let v = decide_zeroness(&ra, &budget(10.0)).unwrap();
    assert_eq!(v.outcome, Outcome::NonZero);
    assert_eq!(v.certificate.tree().unwrap().size(), 2);

    let stuck = TwoCounterMachine::parse(&std::fs::read_to_string(data("stuck.2cm")).unwrap()).unwrap();
    let one = build_oneletter_variant(&stuck, 2).unwrap();
    let small = Budget {
        max_tree_size: 6,
        ..budget(10.0)
    };
    let v = decide_zeroness(&one, &small).unwrap();
    assert_eq!(v.outcome, Outcome::Unknown);
    assert_eq!(v.report.exhausted.as_deref(), Some("tree-size"));
    let f = decide_functionality(&one, &small).unwrap();
    assert_eq!(f.outcome, Outcome::Unknown);
    assert_eq!(f.exit_code(), 2);
}

#[test]
fn budget_growth_keeps_verdicts() {
    let m = poly("leafone.ra");
    let tiny = Budget {
        max_tree_size: 0,
        ..budget(5.0)
    };
    assert_eq!(decide_zeroness(&m, &tiny).unwrap().outcome, Outcome::Unknown);
    for size in 1..5 {
        let b = Budget {
            max_tree_size: size,
            ..budget(5.0)
        };
        assert_eq!(decide_zeroness(&m, &b).unwrap().outcome, Outcome::NonZero);
    }
}
