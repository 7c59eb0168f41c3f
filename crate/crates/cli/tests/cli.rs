use std::path::PathBuf;
use std::process::{Command, Output};

use raequiv::algebra::PolyAlgebra;
use raequiv::automata::parse_automaton_as;
use raequiv::reductions::{build_oneletter_variant, build_reduction_ra, TwoCounterMachine};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

fn raequiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_raequiv"))
        .args(args)
        .env_remove("RAEQUIV_BUDGET_SECS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_fcns_on_figure_tree() {
    let o = raequiv(&[
        "run",
        &data("fcns.ra"),
        "--tree",
        "a(b(c(_|_, d(_|_, _|_)), e(_|_, f(_|_, _|_))), _|_)",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).replace(' ', ""), "a(b(c,d),e,f)\n");
}

#[test]
fn run_doubling_and_empty() {
    let o = raequiv(&["run", &data("doubling.ra"), "--tree", "root_a(root_a(root_a(_|_)))"]);
    assert_eq!(stdout(&o).trim().split(" + ").count(), 8);
    let o = raequiv(&["run", &data("empty.ra"), "--tree", "a(_|_)"]);
    assert_eq!(stdout(&o), "no output\n");
}

#[test]
fn check_equivalence_exit_zero() {
    let o = raequiv(&["check", "equivalence", &data("fcns.ra"), &data("fcns_swapped.ra"), "--deterministic"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("equivalence: equivalent"));
}

#[test]
fn check_functionality_machine_report() {
    let o = raequiv(&["check", "functionality", &data("twoleaf.ra"), "--machine"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("verdict=not-functional\n"), "{out}");
    assert!(out.contains("tree=_|_\n"));
    assert!(out.contains("output=1\n") && out.contains("output=2\n"));
}

#[test]
fn exhausted_budget_is_unknown() {
    let reduction = std::env::temp_dir().join("raequiv_stuck_oneletter.ra");
    let o = raequiv(&[
        "generate",
        "oneletter",
        &data("stuck.2cm"),
        "-o",
        reduction.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = raequiv(&[
        "check",
        "zeroness",
        reduction.to_str().unwrap(),
        "--max-tree-size",
        "3",
        "--deterministic",
        "--machine",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("verdict=unknown"));
    assert!(stderr(&o).contains("counterexample search only"));
}

#[test]
fn generated_files_round_trip() {
    for machine in ["onestep.2cm", "stuck.2cm", "countdown.2cm"] {
        let m = TwoCounterMachine::parse(&std::fs::read_to_string(data(machine)).unwrap()).unwrap();
        for (kind, built) in [
            ("reduction", build_reduction_ra(&m, m.states()).unwrap()),
            ("oneletter", build_oneletter_variant(&m, m.states()).unwrap()),
        ] {
            let o = raequiv(&["generate", kind, &data(machine)]);
            assert_eq!(o.status.code(), Some(0));
            let back = parse_automaton_as(PolyAlgebra::with_substitution(), &stdout(&o)).unwrap();
            assert_eq!(back, built, "{machine} {kind}");
        }
    }
}

#[test]
fn crossvalidate_flag_reports() {
    let o = raequiv(&["generate", "reduction", &data("countdown.2cm"), "--crossvalidate", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("crossvalidate L=5: pass"), "{}", stderr(&o));
    let o = raequiv(&["generate", "reduction", &data("onestep.2cm"), "--crossvalidate", "3", "--exhaustive"]);
    assert!(stderr(&o).contains("0 covered by zero absorption"), "{}", stderr(&o));
}

#[test]
fn invalid_machine_names_missing_row() {
    let path = std::env::temp_dir().join("raequiv_partial.2cm");
    let text = std::fs::read_to_string(data("onestep.2cm")).unwrap().replace("d 2 1 1 -> 2 0 0\n", "");
    std::fs::write(&path, text).unwrap();
    let o = raequiv(&["generate", "reduction", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing row for state 2 with flags 1 1"), "{}", stderr(&o));
}

#[test]
fn errors_exit_one() {
    assert_eq!(raequiv(&["check", "zeroness", "/nonexistent.ra"]).status.code(), Some(1));
    assert_eq!(raequiv(&["check", "sameness", &data("zero.ra")]).status.code(), Some(1));
    let o = raequiv(&["check", "equivalence", &data("zero.ra")]);
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_raequiv"))
        .args(["check", "zeroness", &data("zero.ra")])
        .env("RAEQUIV_BUDGET_SECS", "soon")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_sets_budget() {
    let path = std::env::temp_dir().join("raequiv_budget.toml");
    std::fs::write(&path, "[budget]\nmax_tree_size = 0\ndeterministic = true\n").unwrap();
    let o = raequiv(&["check", "zeroness", &data("leafone.ra"), "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = raequiv(&[
        "check",
        "zeroness",
        &data("leafone.ra"),
        "--config",
        path.to_str().unwrap(),
        "--max-tree-size",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
}
