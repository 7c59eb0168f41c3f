//! Bottom-up register automata over a pluggable algebra.
//!
//! A rule `a(q1..qk) -> q` carries one update term per register, written over
//! the argument registers `r<j>.<i>` (register `j` of child `i`). The partial
//! output map assigns a term over the own registers `r<j>` to some states.

mod format;
mod nfta;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::algebra::{eval_with_registers, infer_sort, Algebra, AlgebraError, Sort, Term, TermVar};
use crate::syntax::ParseError;
use crate::tree::{RankedTree, Signature};

pub use format::{parse_automaton, parse_automaton_as, print_automaton, AnyAutomaton};
pub use nfta::Nfta;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` has rank {expected}, got {got} arguments")]
    Arity {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("expected {expected} register updates, got {got}")]
    UpdateWidth { expected: usize, got: usize },
    #[error("register `{0}` is out of range")]
    RegisterOutOfRange(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state `{state}` declared with {got} register sorts, expected {expected}")]
    SortCount {
        state: String,
        expected: usize,
        got: usize,
    },
    #[error("register {reg} of state `{state}` has sort {found}, declared {declared}")]
    RegisterSort {
        state: String,
        reg: usize,
        found: Sort,
        declared: Sort,
    },
    #[error("output of state `{state}` has sort {found}, expected {expected}")]
    OutputSort {
        state: String,
        found: Sort,
        expected: Sort,
    },
    #[error("the algebra has no subtraction")]
    NoSubtraction,
    #[error("input signatures differ")]
    SignatureMismatch,
    #[error("algebra mismatch: `{0}` vs `{1}`")]
    AlgebraMismatch(String, String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("line {line}: {error}")]
    Syntax { line: usize, error: ParseError },
    #[error("{0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule<V> {
    pub symbol: String,
    pub sources: Vec<usize>,
    pub target: usize,
    pub update: Vec<Term<V>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration<V> {
    pub state: usize,
    pub registers: Vec<V>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult<V> {
    pub configurations: BTreeSet<Configuration<V>>,
    /// Some configuration set was truncated at the cap.
    pub saturated: bool,
}

pub const DEFAULT_RUN_CAP: usize = 100_000;

#[derive(Debug, Clone)]
pub struct RegisterAutomaton<A: Algebra> {
    algebra: A,
    signature: Signature,
    registers: usize,
    states: Vec<String>,
    sorts: Vec<Vec<Sort>>,
    rules: Vec<Rule<A::Value>>,
    rule_set: HashSet<Rule<A::Value>>,
    by_symbol: HashMap<String, Vec<usize>>,
    outputs: BTreeMap<usize, Term<A::Value>>,
}

impl<A: Algebra> PartialEq for RegisterAutomaton<A> {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.header() == other.algebra.header()
            && self.signature == other.signature
            && self.registers == other.registers
            && self.states == other.states
            && self.sorts == other.sorts
            && self.rule_set == other.rule_set
            && self.outputs == other.outputs
    }
}

impl<A: Algebra + Clone> RegisterAutomaton<A> {
    pub fn new(algebra: A, signature: Signature, registers: usize) -> Self {
        RegisterAutomaton {
            algebra,
            signature,
            registers,
            states: Vec::new(),
            sorts: Vec::new(),
            rules: Vec::new(),
            rule_set: HashSet::new(),
            by_symbol: HashMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn algebra(&self) -> &A {
        &self.algebra
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn registers(&self) -> usize {
        self.registers
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_sorts(&self, state: usize) -> &[Sort] {
        &self.sorts[state]
    }

    pub fn rules(&self) -> &[Rule<A::Value>] {
        &self.rules
    }

    pub fn outputs(&self) -> &BTreeMap<usize, Term<A::Value>> {
        &self.outputs
    }

    pub fn output(&self, state: usize) -> Option<&Term<A::Value>> {
        self.outputs.get(&state)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn state_name(&self, state: usize) -> &str {
        &self.states[state]
    }

    /// Declare a state whose registers all have the default sort; returns the
    /// existing index if already declared.
    pub fn add_state(&mut self, name: &str) -> usize {
        if let Some(i) = self.state_index(name) {
            return i;
        }
        let sort = self.algebra.default_sort();
        self.states.push(name.to_string());
        self.sorts.push(vec![sort; self.registers]);
        self.states.len() - 1
    }

    pub fn add_state_with_sorts(&mut self, name: &str, sorts: Vec<Sort>) -> Result<usize, AutomatonError> {
        if sorts.len() != self.registers {
            return Err(AutomatonError::SortCount {
                state: name.to_string(),
                expected: self.registers,
                got: sorts.len(),
            });
        }
        let i = self.add_state(name);
        self.sorts[i] = sorts;
        Ok(i)
    }

    /// Add a rule, checking arity, register ranges and sorts. Duplicate rules
    /// are stored once.
    pub fn add_rule(
        &mut self,
        symbol: &str,
        sources: &[&str],
        target: &str,
        update: Vec<Term<A::Value>>,
    ) -> Result<(), AutomatonError> {
        let src: Vec<usize> = sources.iter().map(|s| self.add_state(s)).collect();
        let tgt = self.add_state(target);
        self.add_rule_indexed(Rule {
            symbol: symbol.to_string(),
            sources: src,
            target: tgt,
            update,
        })
    }

    pub fn add_rule_indexed(&mut self, rule: Rule<A::Value>) -> Result<(), AutomatonError> {
        let rank = self
            .signature
            .rank(&rule.symbol)
            .ok_or_else(|| AutomatonError::UnknownSymbol(rule.symbol.clone()))?;
        if rank != rule.sources.len() {
            return Err(AutomatonError::Arity {
                symbol: rule.symbol.clone(),
                expected: rank,
                got: rule.sources.len(),
            });
        }
        if rule.update.len() != self.registers {
            return Err(AutomatonError::UpdateWidth {
                expected: self.registers,
                got: rule.update.len(),
            });
        }
        for s in rule.sources.iter().chain(std::iter::once(&rule.target)) {
            if *s >= self.states.len() {
                return Err(AutomatonError::UnknownState(s.to_string()));
            }
        }
        for (j, t) in rule.update.iter().enumerate() {
            for v in t.vars() {
                if v.arg == 0 || v.arg > rank || v.reg > self.registers {
                    return Err(AutomatonError::RegisterOutOfRange(v.to_string()));
                }
            }
            let sources = &rule.sources;
            let sorts = &self.sorts;
            let found = infer_sort(&self.algebra, t, &|v: TermVar| {
                Some(sorts[sources[v.arg - 1]][v.reg - 1].clone())
            })?;
            let declared = &self.sorts[rule.target][j];
            if &found != declared {
                return Err(AutomatonError::RegisterSort {
                    state: self.states[rule.target].clone(),
                    reg: j + 1,
                    found,
                    declared: declared.clone(),
                });
            }
        }
        if self.rule_set.insert(rule.clone()) {
            self.by_symbol
                .entry(rule.symbol.clone())
                .or_default()
                .push(self.rules.len());
            self.rules.push(rule);
        }
        Ok(())
    }

    /// Set the output term of `state`; it must have the algebra's default sort.
    pub fn set_output(&mut self, state: &str, term: Term<A::Value>) -> Result<(), AutomatonError> {
        let q = self.add_state(state);
        self.set_output_indexed(q, term)
    }

    pub fn set_output_indexed(&mut self, q: usize, term: Term<A::Value>) -> Result<(), AutomatonError> {
        for v in term.vars() {
            if v.arg != 0 || v.reg > self.registers {
                return Err(AutomatonError::RegisterOutOfRange(v.to_string()));
            }
        }
        let sorts = &self.sorts[q];
        let found = infer_sort(&self.algebra, &term, &|v: TermVar| Some(sorts[v.reg - 1].clone()))?;
        let expected = self.algebra.default_sort();
        if found != expected {
            return Err(AutomatonError::OutputSort {
                state: self.states[q].clone(),
                found,
                expected,
            });
        }
        self.outputs.insert(q, term);
        Ok(())
    }

    pub fn remove_output(&mut self, state: usize) {
        self.outputs.remove(&state);
    }

    pub fn rules_for(&self, symbol: &str) -> impl Iterator<Item = &Rule<A::Value>> {
        self.by_symbol
            .get(symbol)
            .into_iter()
            .flatten()
            .map(move |&i| &self.rules[i])
    }

    /// Configurations produced by applying every `symbol` rule to children
    /// in the given configurations.
    pub fn successors(
        &self,
        symbol: &str,
        children: &[&Configuration<A::Value>],
    ) -> Result<Vec<Configuration<A::Value>>, AutomatonError> {
        let mut out = Vec::new();
        for rule in self.rules_for(symbol) {
            if rule.sources.len() != children.len()
                || rule.sources.iter().zip(children).any(|(s, c)| *s != c.state)
            {
                continue;
            }
            out.push(self.apply_rule(rule, children)?);
        }
        Ok(out)
    }

    pub fn apply_rule(
        &self,
        rule: &Rule<A::Value>,
        children: &[&Configuration<A::Value>],
    ) -> Result<Configuration<A::Value>, AutomatonError> {
        let args: Vec<&[A::Value]> = children.iter().map(|c| c.registers.as_slice()).collect();
        let registers = rule
            .update
            .iter()
            .map(|t| eval_with_registers(&self.algebra, t, &[], &args))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Configuration {
            state: rule.target,
            registers,
        })
    }

    pub fn output_of(&self, c: &Configuration<A::Value>) -> Option<Result<A::Value, AutomatonError>> {
        self.outputs.get(&c.state).map(|t| {
            eval_with_registers(&self.algebra, t, &c.registers, &[]).map_err(AutomatonError::from)
        })
    }

    /// All configurations reachable on `t`; each intermediate set is capped
    /// at `cap` elements.
    pub fn run(&self, t: &RankedTree, cap: usize) -> Result<RunResult<A::Value>, AutomatonError> {
        let mut saturated = false;
        let configurations = self.run_rec(t, cap, &mut saturated)?;
        Ok(RunResult {
            configurations,
            saturated,
        })
    }

    fn run_rec(
        &self,
        t: &RankedTree,
        cap: usize,
        saturated: &mut bool,
    ) -> Result<BTreeSet<Configuration<A::Value>>, AutomatonError> {
        let rank = self
            .signature
            .rank(&t.symbol)
            .ok_or_else(|| AutomatonError::UnknownSymbol(t.symbol.clone()))?;
        if rank != t.children.len() {
            return Err(AutomatonError::Arity {
                symbol: t.symbol.clone(),
                expected: rank,
                got: t.children.len(),
            });
        }
        let child_sets: Vec<BTreeSet<Configuration<A::Value>>> = t
            .children
            .iter()
            .map(|c| self.run_rec(c, cap, saturated))
            .collect::<Result<_, _>>()?;
        let mut out = BTreeSet::new();
        'rules: for rule in self.rules_for(&t.symbol) {
            let pools: Vec<Vec<&Configuration<A::Value>>> = rule
                .sources
                .iter()
                .zip(&child_sets)
                .map(|(s, set)| set.iter().filter(|c| c.state == *s).collect())
                .collect();
            let mut idx = vec![0usize; pools.len()];
            if pools.iter().any(Vec::is_empty) {
                continue;
            }
            loop {
                let children: Vec<&Configuration<A::Value>> =
                    idx.iter().zip(&pools).map(|(&i, p)| p[i]).collect();
                out.insert(self.apply_rule(rule, &children)?);
                if out.len() >= cap {
                    *saturated = true;
                    break 'rules;
                }
                let mut k = 0;
                loop {
                    if k == idx.len() {
                        continue 'rules;
                    }
                    idx[k] += 1;
                    if idx[k] < pools[k].len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
            }
        }
        Ok(out)
    }

    /// Output set on `t` (values of the output map on reachable configurations).
    pub fn outputs_on(&self, t: &RankedTree) -> Result<BTreeSet<A::Value>, AutomatonError> {
        let run = self.run(t, DEFAULT_RUN_CAP)?;
        let mut out = BTreeSet::new();
        for c in &run.configurations {
            if let Some(v) = self.output_of(c) {
                out.insert(v?);
            }
        }
        Ok(out)
    }

    /// At most one rule for every left-hand side `a(q1..qk)`.
    pub fn is_deterministic(&self) -> bool {
        let mut seen = HashSet::new();
        self.rules
            .iter()
            .all(|r| seen.insert((r.symbol.as_str(), r.sources.as_slice())))
    }

    /// States reachable by some tree, ignoring register values.
    pub fn reachable_states(&self) -> BTreeSet<usize> {
        let mut reach = BTreeSet::new();
        loop {
            let before = reach.len();
            for r in &self.rules {
                if r.sources.iter().all(|s| reach.contains(s)) {
                    reach.insert(r.target);
                }
            }
            if reach.len() == before {
                return reach;
            }
        }
    }

    /// Same automaton over a single-sorted algebra, mapping every constant.
    pub fn map_algebra<B: Algebra + Clone>(
        &self,
        algebra: B,
        f: &impl Fn(&A::Value) -> B::Value,
    ) -> Result<RegisterAutomaton<B>, AutomatonError> {
        let mut out = RegisterAutomaton::new(algebra, self.signature.clone(), self.registers);
        for name in &self.states {
            out.add_state(name);
        }
        for r in &self.rules {
            out.add_rule_indexed(Rule {
                symbol: r.symbol.clone(),
                sources: r.sources.clone(),
                target: r.target,
                update: r.update.iter().map(|t| t.map_consts(f)).collect(),
            })?;
        }
        for (q, t) in &self.outputs {
            out.set_output_indexed(*q, t.map_consts(f))?;
        }
        Ok(out)
    }

    /// Language of trees with at least one output, as a tree automaton.
    pub fn domain_nfta(&self) -> Nfta {
        let mut n = Nfta::new(self.signature.clone(), self.states.len());
        for r in &self.rules {
            n.add_transition(&r.symbol, r.sources.clone(), r.target);
        }
        for q in self.outputs.keys() {
            n.set_accepting(*q);
        }
        n
    }

    /// `Some(witness)` if some tree has outputs in exactly one of the two
    /// automata; `None` if the domains coincide.
    pub fn domain_difference<B: Algebra + Clone>(
        &self,
        other: &RegisterAutomaton<B>,
    ) -> Result<Option<RankedTree>, AutomatonError> {
        if self.signature != other.signature {
            return Err(AutomatonError::SignatureMismatch);
        }
        Ok(self.domain_nfta().difference_witness(&other.domain_nfta()))
    }

    pub fn domains_equivalent<B: Algebra + Clone>(
        &self,
        other: &RegisterAutomaton<B>,
    ) -> Result<bool, AutomatonError> {
        Ok(self.domain_difference(other)?.is_none())
    }
}

/// Product running `m1` and `m2` on the same input whose outputs are the
/// differences `o1 - o2`. Registers `1..=n1` belong to `m1`, the following
/// `n2` registers to `m2`. Only reachable pair states are built.
pub fn cross_difference<A: Algebra + Clone>(
    m1: &RegisterAutomaton<A>,
    m2: &RegisterAutomaton<A>,
) -> Result<RegisterAutomaton<A>, AutomatonError> {
    if !m1.algebra.has_subtraction() {
        return Err(AutomatonError::NoSubtraction);
    }
    if m1.algebra.header() != m2.algebra.header() {
        return Err(AutomatonError::AlgebraMismatch(m1.algebra.header(), m2.algebra.header()));
    }
    if m1.signature != m2.signature {
        return Err(AutomatonError::SignatureMismatch);
    }
    let (n1, n2) = (m1.registers, m2.registers);
    let shift = |t: &Term<A::Value>| {
        t.map_vars(&|v: TermVar| TermVar {
            reg: v.reg + n1,
            arg: v.arg,
        })
    };
    let mut out = RegisterAutomaton::new(m1.algebra.clone(), m1.signature.clone(), n1 + n2);
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pending: Vec<Rule<A::Value>> = Vec::new();
    loop {
        let mut grew = false;
        for r1 in &m1.rules {
            for r2 in m2.rules_for(&r1.symbol) {
                let pairs: Option<Vec<usize>> = r1
                    .sources
                    .iter()
                    .zip(&r2.sources)
                    .map(|(a, b)| index.get(&(*a, *b)).copied())
                    .collect();
                let Some(sources) = pairs else { continue };
                let key = (r1.target, r2.target);
                let target = match index.get(&key) {
                    Some(&t) => t,
                    None => {
                        let name = format!("{}__{}", m1.states[key.0], m2.states[key.1]);
                        let mut sorts = m1.sorts[key.0].clone();
                        sorts.extend(m2.sorts[key.1].iter().cloned());
                        let t = out.add_state_with_sorts(&name, sorts)?;
                        index.insert(key, t);
                        grew = true;
                        t
                    }
                };
                let mut update = r1.update.clone();
                update.extend(r2.update.iter().map(shift));
                pending.push(Rule {
                    symbol: r1.symbol.clone(),
                    sources,
                    target,
                    update,
                });
            }
        }
        for r in pending.drain(..) {
            out.add_rule_indexed(r)?;
        }
        if !grew {
            break;
        }
    }
    let mut keys: Vec<(&(usize, usize), &usize)> = index.iter().collect();
    keys.sort();
    for (&(p, q), &s) in keys {
        if let (Some(o1), Some(o2)) = (m1.outputs.get(&p), m2.outputs.get(&q)) {
            out.set_output_indexed(s, Term::sub(o1.clone(), shift(o2)))?;
        }
    }
    Ok(out)
}

/// Two copies of `m`; `m` is functional iff every output is zero.
pub fn self_product<A: Algebra + Clone>(
    m: &RegisterAutomaton<A>,
) -> Result<RegisterAutomaton<A>, AutomatonError> {
    cross_difference(m, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_term, RatAlgebra};
    use crate::poly::rat;
    use crate::tree::{parse_ranked_tree, BOTTOM};

    fn rat_ra(rules: &[(&str, &[&str], &str, &[&str])], outputs: &[(&str, &str)]) -> RegisterAutomaton<RatAlgebra> {
        let sig = Signature::new(&[("a", 1), ("b", 2), ("l", 0)]);
        let n = rules.first().map_or(1, |r| r.3.len());
        let mut m = RegisterAutomaton::new(RatAlgebra, sig, n);
        for (sym, src, tgt, upd) in rules {
            let terms = upd.iter().map(|t| parse_term(&RatAlgebra, t).unwrap()).collect();
            m.add_rule(sym, src, tgt, terms).unwrap();
        }
        for (q, t) in outputs {
            m.set_output(q, parse_term(&RatAlgebra, t).unwrap()).unwrap();
        }
        m
    }

    #[test]
    fn two_leaf_rules_are_not_functional() {
        let m = rat_ra(&[("l", &[], "q", &["1"]), ("l", &[], "q", &["2"])], &[("q", "r1")]);
        assert!(!m.is_deterministic());
        let leaf = parse_ranked_tree("l").unwrap();
        assert_eq!(m.outputs_on(&leaf).unwrap(), [rat(1), rat(2)].into_iter().collect());
        let p = self_product(&m).unwrap();
        assert_eq!(
            p.outputs_on(&leaf).unwrap(),
            [rat(-1), rat(0), rat(1)].into_iter().collect()
        );
    }

    #[test]
    fn reconverging_nondeterminism_is_zero() {
        let m = rat_ra(
            &[
                ("l", &[], "p", &["1"]),
                ("l", &[], "q", &["1"]),
                ("a", &["p"], "s", &["r1.1 * 2"]),
                ("a", &["q"], "s", &["r1.1 + 1"]),
            ],
            &[("s", "r1")],
        );
        let p = self_product(&m).unwrap();
        for t in m.signature().enumerate(6) {
            for v in p.outputs_on(&t).unwrap() {
                assert_eq!(v, rat(0));
            }
        }
    }

    #[test]
    fn determinism_and_duplicates() {
        let m = rat_ra(&[("l", &[], "q", &["1"]), ("l", &[], "q", &["1"])], &[]);
        assert_eq!(m.rules().len(), 1);
        assert!(m.is_deterministic());
        assert!(m.outputs_on(&parse_ranked_tree("l").unwrap()).unwrap().is_empty());
        let empty = RegisterAutomaton::new(RatAlgebra, Signature::new(&[(BOTTOM, 0)]), 0);
        assert!(empty.is_deterministic());
    }

    #[test]
    fn rule_validation() {
        let mut m = RegisterAutomaton::new(RatAlgebra, Signature::new(&[("a", 1), ("l", 0)]), 1);
        let t = parse_term(&RatAlgebra, "r1.2").unwrap();
        assert!(matches!(
            m.add_rule("a", &["q"], "q", vec![t]),
            Err(AutomatonError::RegisterOutOfRange(_))
        ));
        assert!(matches!(
            m.add_rule("a", &[], "q", vec![Term::Const(rat(1))]),
            Err(AutomatonError::Arity { .. })
        ));
        assert!(matches!(
            m.add_rule("z", &[], "q", vec![Term::Const(rat(1))]),
            Err(AutomatonError::UnknownSymbol(_))
        ));
    }

    #[test]
    fn domains() {
        let total = rat_ra(
            &[("l", &[], "q", &["1"]), ("a", &["q"], "q", &["r1.1"]), ("b", &["q", "q"], "q", &["r1.1"])],
            &[("q", "r1")],
        );
        let spines = rat_ra(
            &[("l", &[], "q", &["1"]), ("a", &["q"], "q", &["r1.1"]), ("b", &["q", "q"], "z", &["r1.1"])],
            &[("q", "r1")],
        );
        assert!(total.domains_equivalent(&total).unwrap());
        let w = total.domain_difference(&spines).unwrap().unwrap();
        assert_eq!(w.symbol, "b");
        let nothing = rat_ra(&[("l", &[], "q", &["1"])], &[]);
        let w = total.domain_difference(&nothing).unwrap().unwrap();
        assert_eq!(w.size(), 1);
    }
}
