use std::path::PathBuf;

use raequiv::automata::parse_automaton;
use raequiv::reductions::TwoCounterMachine;

fn corpus(ext: &str) -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    files.sort();
    files
}

#[test]
fn automata_round_trip() {
    let files = corpus("ra");
    assert!(files.len() >= 10);
    for path in files {
        let m = parse_automaton(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let back = parse_automaton(&m.to_text()).unwrap();
        assert_eq!(back, m, "{}", path.display());
    }
}

#[test]
fn machines_round_trip() {
    for path in corpus("2cm") {
        let m = TwoCounterMachine::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(TwoCounterMachine::parse(&m.to_text()).unwrap(), m, "{}", path.display());
    }
}
