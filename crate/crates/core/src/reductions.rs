//! Two-counter machines and the reduction from their reachability problem
//! to zeroness of register automata over `Q[x]` with substitution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::algebra::{PolyAlgebra, Term, TermVar};
use crate::automata::{AutomatonError, Configuration, RegisterAutomaton};
use crate::poly::Polynomial;
use crate::tree::{RankedTree, Signature, BOTTOM};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MachineError {
    #[error("machine needs at least one state")]
    NoStates,
    #[error("state {0} out of range")]
    StateOutOfRange(usize),
    #[error("missing row for state {state} with flags {b1} {b2}")]
    MissingRow { state: usize, b1: u8, b2: u8 },
    #[error("duplicate row for state {state} with flags {b1} {b2}")]
    DuplicateRow { state: usize, b1: u8, b2: u8 },
    #[error("row for state {state} with flags {b1} {b2} decrements a zero counter")]
    DecrementOnZero { state: usize, b1: u8, b2: u8 },
    #[error("bad delta {0}")]
    BadDelta(i64),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// One row of the transition table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub state: usize,
    pub b1: u8,
    pub b2: u8,
    pub next: usize,
    pub d1: i8,
    pub d2: i8,
}

impl Transition {
    /// Input symbol naming this row.
    pub fn symbol(&self) -> String {
        format!("t{}_{}{}", self.state, self.b1, self.b2)
    }
}

/// Minsky machine with states `1..=n` and a total transition function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoCounterMachine {
    states: usize,
    delta: BTreeMap<(usize, u8, u8), Transition>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CmConfiguration {
    pub state: usize,
    pub c1: u64,
    pub c2: u64,
}

impl CmConfiguration {
    pub fn initial(state: usize) -> Self {
        CmConfiguration { state, c1: 0, c2: 0 }
    }

    pub fn flags(&self) -> (u8, u8) {
        ((self.c1 != 0) as u8, (self.c2 != 0) as u8)
    }
}

impl fmt::Display for CmConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.state, self.c1, self.c2)
    }
}

fn shift(c: u64, d: i8) -> u64 {
    match d {
        -1 => c - 1,
        1 => c + 1,
        _ => c,
    }
}

impl TwoCounterMachine {
    pub fn new(states: usize, rows: &[Transition]) -> Result<Self, MachineError> {
        if states == 0 {
            return Err(MachineError::NoStates);
        }
        let mut delta = BTreeMap::new();
        for t in rows {
            for s in [t.state, t.next] {
                if s == 0 || s > states {
                    return Err(MachineError::StateOutOfRange(s));
                }
            }
            for d in [t.d1, t.d2] {
                if !(-1..=1).contains(&d) {
                    return Err(MachineError::BadDelta(d.into()));
                }
            }
            if t.b1 > 1 || t.b2 > 1 {
                return Err(MachineError::Syntax {
                    line: 0,
                    message: "zero flags are 0 or 1".into(),
                });
            }
            if (t.d1 == -1 && t.b1 == 0) || (t.d2 == -1 && t.b2 == 0) {
                return Err(MachineError::DecrementOnZero {
                    state: t.state,
                    b1: t.b1,
                    b2: t.b2,
                });
            }
            if delta.insert((t.state, t.b1, t.b2), *t).is_some() {
                return Err(MachineError::DuplicateRow {
                    state: t.state,
                    b1: t.b1,
                    b2: t.b2,
                });
            }
        }
        for state in 1..=states {
            for (b1, b2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                if !delta.contains_key(&(state, b1, b2)) {
                    return Err(MachineError::MissingRow { state, b1, b2 });
                }
            }
        }
        Ok(TwoCounterMachine { states, delta })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn transitions(&self) -> impl Iterator<Item = &Transition> {
        self.delta.values()
    }

    pub fn row(&self, state: usize, b1: u8, b2: u8) -> Option<&Transition> {
        self.delta.get(&(state, b1, b2))
    }

    pub fn by_symbol(&self, symbol: &str) -> Option<&Transition> {
        self.delta.values().find(|t| t.symbol() == symbol)
    }

    pub fn step(&self, c: CmConfiguration) -> CmConfiguration {
        let (b1, b2) = c.flags();
        let t = self.delta[&(c.state, b1, b2)];
        CmConfiguration {
            state: t.next,
            c1: shift(c.c1, t.d1),
            c2: shift(c.c2, t.d2),
        }
    }

    /// The configuration after following `word` from `(1, 0, 0)`, or `None`
    /// as soon as a letter does not match the current state and flags.
    pub fn follow(&self, word: &[Transition]) -> Option<CmConfiguration> {
        let mut c = CmConfiguration::initial(1);
        for t in word {
            let (b1, b2) = c.flags();
            if (t.state, t.b1, t.b2) != (c.state, b1, b2) {
                return None;
            }
            c = self.step(c);
        }
        Some(c)
    }

    pub fn parse(text: &str) -> Result<Self, MachineError> {
        let mut states = None;
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| MachineError::Syntax {
                line: i + 1,
                message: message.to_string(),
            };
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                ["states", n] => {
                    let n: usize = n.parse().map_err(|_| err("bad state count"))?;
                    states = Some(n);
                }
                ["d", q, b1, b2, "->", q2, d1, d2] => {
                    let num = |s: &str| s.parse::<i64>().map_err(|_| err(&format!("bad number {s}")));
                    let (b1, b2) = (num(b1)?, num(b2)?);
                    if !(0..=1).contains(&b1) || !(0..=1).contains(&b2) {
                        return Err(err("zero flags are 0 or 1"));
                    }
                    let (d1, d2) = (num(d1)?, num(d2)?);
                    for d in [d1, d2] {
                        if !(-1..=1).contains(&d) {
                            return Err(MachineError::BadDelta(d));
                        }
                    }
                    rows.push(Transition {
                        state: num(q)?.max(0) as usize,
                        b1: b1 as u8,
                        b2: b2 as u8,
                        next: num(q2)?.max(0) as usize,
                        d1: d1 as i8,
                        d2: d2 as i8,
                    });
                }
                _ => return Err(err("expected `states n` or `d q b1 b2 -> q' d1 d2`")),
            }
        }
        let states = states.ok_or(MachineError::Syntax {
            line: 0,
            message: "missing `states` header".into(),
        })?;
        TwoCounterMachine::new(states, &rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("states {}\n", self.states);
        for t in self.delta.values() {
            out += &format!("d {} {} {} -> {} {} {}\n", t.state, t.b1, t.b2, t.next, t.d1, t.d2);
        }
        out
    }
}

/// Breadth-first exploration from `(from, 0, 0)` for at most `bound` steps.
pub fn reachable_2cm(m: &TwoCounterMachine, from: usize, to: usize, bound: usize) -> bool {
    let mut frontier = vec![CmConfiguration::initial(from)];
    let mut seen = BTreeSet::new();
    for step in 0..=bound {
        if frontier.iter().any(|c| c.state == to) {
            return true;
        }
        if step == bound {
            break;
        }
        let next: Vec<CmConfiguration> = frontier
            .iter()
            .map(|c| m.step(*c))
            .filter(|c| seen.insert(*c))
            .collect();
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    false
}

/// `prod_{j != i, 1 <= j <= n} (x - j)`: zero on the other states.
pub fn ptestq(i: usize, n: usize) -> Polynomial {
    let x = Polynomial::var("x");
    (1..=n)
        .filter(|&j| j != i)
        .fold(Polynomial::one(), |acc, j| &acc * &(&x - &Polynomial::int(j as i64)))
}

/// `prod_{1 <= j <= m} (x - j)`: zero on `1..=m`, nonzero at 0.
pub fn ptestc(m: usize) -> Polynomial {
    let x = Polynomial::var("x");
    (1..=m).fold(Polynomial::one(), |acc, j| &acc * &(&x - &Polynomial::int(j as i64)))
}

pub const REG_Q: usize = 1;
pub const REG_C1: usize = 2;
pub const REG_C2: usize = 3;
pub const REG_PLUS: usize = 4;
pub const REG_ZT: usize = 5;
pub const REG_W: usize = 6;

fn child(reg: usize) -> Term<Polynomial> {
    Term::var(TermVar::of_arg(1, reg))
}

fn constant(p: Polynomial) -> Term<Polynomial> {
    Term::Const(p)
}

fn subst(p: Term<Polynomial>, q: Term<Polynomial>) -> Term<Polynomial> {
    Term::op("subst", vec![p, q])
}

fn int(n: i64) -> Term<Polynomial> {
    constant(Polynomial::int(n))
}

fn counter_test(b: u8, counter: usize) -> Term<Polynomial> {
    if b == 1 {
        child(counter)
    } else {
        subst(child(REG_ZT), child(counter))
    }
}

fn plus(t: Term<Polynomial>, d: i8) -> Term<Polynomial> {
    if d == 0 {
        t
    } else {
        Term::add(t, int(d.into()))
    }
}

fn row_update(t: &Transition, n: usize) -> Vec<Term<Polynomial>> {
    let x = constant(Polynomial::var("x"));
    vec![
        int(t.next as i64),
        plus(child(REG_C1), t.d1),
        plus(child(REG_C2), t.d2),
        Term::add(child(REG_PLUS), int(1)),
        Term::mul(
            child(REG_ZT),
            Term::sub(Term::sub(x, child(REG_PLUS)), int(1)),
        ),
        Term::mul(
            Term::mul(
                Term::mul(child(REG_W), subst(constant(ptestq(t.state, n)), child(REG_Q))),
                counter_test(t.b1, REG_C1),
            ),
            counter_test(t.b2, REG_C2),
        ),
    ]
}

fn reduction_skeleton(
    m: &TwoCounterMachine,
    target: usize,
    signature: Signature,
) -> Result<RegisterAutomaton<PolyAlgebra>, AutomatonError> {
    let mut ra = RegisterAutomaton::new(PolyAlgebra::with_substitution(), signature, 6);
    ra.add_state("q");
    ra.add_rule(BOTTOM, &[], "q", [1, 0, 0, 0, 1, 1].map(int).to_vec())?;
    let own = |r| Term::var(TermVar::own(r));
    ra.set_output(
        "q",
        Term::mul(subst(constant(ptestq(target, m.states())), own(REG_Q)), own(REG_W)),
    )?;
    Ok(ra)
}

/// The deterministic reduction automaton: one unary symbol per row of the
/// transition table. Its output is nonzero on a word exactly when the word
/// is a run from `(1, 0, 0)` ending in `target`.
pub fn build_reduction_ra(
    m: &TwoCounterMachine,
    target: usize,
) -> Result<RegisterAutomaton<PolyAlgebra>, AutomatonError> {
    let mut sig = Signature::new(&[(BOTTOM, 0)]);
    for t in m.transitions() {
        sig.insert(&t.symbol(), 1);
    }
    let mut ra = reduction_skeleton(m, target, sig)?;
    for t in m.transitions() {
        ra.add_rule(&t.symbol(), &["q"], "q", row_update(t, m.states()))?;
    }
    Ok(ra)
}

pub const ONE_LETTER: &str = "a";

/// Same registers and output over the alphabet `{_|_, a}`; every `a` guesses
/// a row of the transition table.
pub fn build_oneletter_variant(
    m: &TwoCounterMachine,
    target: usize,
) -> Result<RegisterAutomaton<PolyAlgebra>, AutomatonError> {
    let sig = Signature::new(&[(BOTTOM, 0), (ONE_LETTER, 1)]);
    let mut ra = reduction_skeleton(m, target, sig)?;
    for t in m.transitions() {
        ra.add_rule(ONE_LETTER, &["q"], "q", row_update(t, m.states()))?;
    }
    Ok(ra)
}

/// Unary tree reading `word` bottom-up (first letter just above `_|_`).
pub fn word_tree(word: &[&str]) -> RankedTree {
    let symbols: Vec<&str> = word.iter().rev().copied().collect();
    RankedTree::spine(&symbols, RankedTree::bottom())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossMode {
    /// Every word up to the bound.
    Exhaustive,
    /// Stop extending a word once the witness register is zero; every
    /// extension then has output 0 and is not a run either.
    Pruned,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossReport {
    pub words: u64,
    pub pruned: u64,
    pub valid_runs: u64,
    pub accepting_runs: u64,
    pub mismatch: Option<String>,
}

impl CrossReport {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Compare the reduction automaton against direct simulation on every
/// transition word of length at most `bound`.
pub fn crossvalidate_bounded(
    m: &TwoCounterMachine,
    target: usize,
    bound: usize,
    mode: CrossMode,
) -> Result<CrossReport, AutomatonError> {
    let ra = build_reduction_ra(m, target)?;
    let rows: Vec<Transition> = m.transitions().copied().collect();
    let symbols: Vec<String> = rows.iter().map(Transition::symbol).collect();
    let leaf = ra.successors(BOTTOM, &[])?.remove(0);
    let mut report = CrossReport {
        words: 0,
        pruned: 0,
        valid_runs: 0,
        accepting_runs: 0,
        mismatch: None,
    };
    let mut word = Vec::new();
    dfs(&ra, m, target, bound, mode, &rows, &symbols, &leaf, &mut word, &mut report)?;
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    ra: &RegisterAutomaton<PolyAlgebra>,
    m: &TwoCounterMachine,
    target: usize,
    bound: usize,
    mode: CrossMode,
    rows: &[Transition],
    symbols: &[String],
    cfg: &Configuration<Polynomial>,
    word: &mut Vec<usize>,
    report: &mut CrossReport,
) -> Result<(), AutomatonError> {
    report.words += 1;
    let run: Vec<Transition> = word.iter().map(|&i| rows[i]).collect();
    let oracle = m.follow(&run);
    let out = ra.output_of(cfg).expect("single output state")?;
    let witness_alive = !cfg.registers[REG_W - 1].is_zero();
    let accepts = matches!(oracle, Some(c) if c.state == target);
    if oracle.is_some() {
        report.valid_runs += 1;
    }
    if accepts {
        report.accepting_runs += 1;
    }
    let name = || {
        let w: Vec<&str> = word.iter().map(|&i| symbols[i].as_str()).collect();
        if w.is_empty() {
            "empty word".to_string()
        } else {
            w.join(" ")
        }
    };
    if witness_alive != oracle.is_some() {
        report.mismatch = Some(format!("witness register on {}: alive={witness_alive}", name()));
        return Ok(());
    }
    if !out.is_zero() != accepts {
        report.mismatch = Some(format!("output on {}: {out}", name()));
        return Ok(());
    }
    if word.len() == bound {
        return Ok(());
    }
    if mode == CrossMode::Pruned && !witness_alive {
        let per = symbols.len() as u64;
        let extensions: u64 = (1..=(bound - word.len()) as u32).map(|k| per.pow(k)).sum();
        report.pruned += extensions;
        return Ok(());
    }
    for i in 0..symbols.len() {
        let next = ra.successors(&symbols[i], &[cfg])?.remove(0);
        word.push(i);
        dfs(ra, m, target, bound, mode, rows, symbols, &next, word, report)?;
        word.pop();
        if report.mismatch.is_some() {
            return Ok(());
        }
    }
    Ok(())
}

/// Outputs of the deterministic reduction over all words of length `k`.
pub fn reduction_outputs_at_length(
    m: &TwoCounterMachine,
    target: usize,
    k: usize,
) -> Result<BTreeSet<Polynomial>, AutomatonError> {
    let ra = build_reduction_ra(m, target)?;
    let symbols: Vec<String> = m.transitions().map(Transition::symbol).collect();
    let mut layer = ra.successors(BOTTOM, &[])?;
    for _ in 0..k {
        let mut next = Vec::new();
        for c in &layer {
            for s in &symbols {
                next.extend(ra.successors(s, &[c])?);
            }
        }
        layer = next;
    }
    layer
        .iter()
        .map(|c| ra.output_of(c).expect("single output state"))
        .collect()
}
