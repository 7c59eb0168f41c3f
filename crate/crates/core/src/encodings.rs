//! Simulations of forests, contexts and words by polynomials.
//!
//! * `phi`: unary-signature forests into `Q[x]` with `phi(empty) = 1`,
//!   `phi(h + h') = phi(h) * phi(h')`, `phi(root(h)) = 2 + x * phi(h)`.
//! * `reduce_alphabet`: forests over `a_1..a_n` into the unary signature via
//!   `a_i(h) = root^i(root() + root(h))`.
//! * `PairPoly`: one-hole contexts as `p + y * q`, stored as `(p, q)`.
//! * words over `1..k` as `(b^m, sum a_j b^(j-1))` with `b = k + 1`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{
    lift_simulation_term, Algebra, AlgebraError, PolyAlgebra, RatAlgebra, SimulationSpec, Term,
    TermVar, Word, WordAlgebra,
};
use crate::automata::{AnyAutomaton, AutomatonError, RegisterAutomaton, Rule};
use crate::forests::{Forest, Tree, UcfAlgebra, UfAlgebra};
use crate::poly::{Polynomial, Rational};

pub const UNARY_LABEL: &str = "root";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("label `{0}` is not the unary label `root`")]
    NonUnaryLabel(String),
    #[error("label `{0}` is not in the declared alphabet")]
    UnknownLabel(String),
    #[error("a forest was expected but the value contains a hole")]
    UnexpectedHole,
    #[error("more than one hole")]
    TwoHoles,
    #[error("letter {letter} outside the alphabet 1..={k}")]
    LetterOutOfRange { letter: u8, k: u8 },
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

impl From<AlgebraError> for EncodingError {
    fn from(e: AlgebraError) -> Self {
        EncodingError::Automaton(AutomatonError::Algebra(e))
    }
}

fn x() -> Polynomial {
    Polynomial::var("x")
}

fn root_poly(p: &Polynomial) -> Polynomial {
    &Polynomial::int(2) + &(&x() * p)
}

/// `phi` of a hole-free forest over the unary label.
pub fn phi(h: &Forest) -> Result<Polynomial, EncodingError> {
    let mut acc = Polynomial::one();
    for t in h.trees() {
        match t {
            Tree::Hole => return Err(EncodingError::UnexpectedHole),
            Tree::Node(l, _) if l != UNARY_LABEL => return Err(EncodingError::NonUnaryLabel(l.clone())),
            Tree::Node(_, c) => acc = &acc * &root_poly(&phi(c)?),
        }
    }
    Ok(acc)
}

/// `a_i(h) = root^i(root() + root(h))` with `a_i = alphabet[i - 1]`; holes
/// are kept.
pub fn reduce_alphabet(h: &Forest, alphabet: &[&str]) -> Result<Forest, EncodingError> {
    let mut trees = Forest::empty();
    for t in h.trees() {
        let image = match t {
            Tree::Hole => Forest::hole(),
            Tree::Node(l, c) => {
                let i = alphabet
                    .iter()
                    .position(|a| a == l)
                    .ok_or_else(|| EncodingError::UnknownLabel(l.clone()))?
                    + 1;
                let inner = reduce_alphabet(c, alphabet)?;
                let mut f = Forest::leaf(UNARY_LABEL).add(&Forest::root(UNARY_LABEL, &inner));
                for _ in 0..i {
                    f = Forest::root(UNARY_LABEL, &f);
                }
                f
            }
        };
        trees = trees.add(&image);
    }
    Ok(trees)
}

/// Encoding `p + y * q` of a context with at most one hole.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairPoly {
    pub p: Polynomial,
    pub q: Polynomial,
}

impl PairPoly {
    pub fn new(p: Polynomial, q: Polynomial) -> Self {
        PairPoly { p, q }
    }

    pub fn forest(p: Polynomial) -> Self {
        PairPoly::new(p, Polynomial::zero())
    }

    pub fn hole() -> Self {
        PairPoly::new(Polynomial::zero(), Polynomial::one())
    }

    /// 0 for forests, 1 for contexts.
    pub fn sort(&self) -> u8 {
        u8::from(!self.q.is_zero())
    }

    pub fn add(&self, o: &PairPoly) -> PairPoly {
        PairPoly::new(&self.p * &o.p, &(&self.q * &o.p) + &(&self.p * &o.q))
    }

    pub fn root(&self) -> PairPoly {
        PairPoly::new(root_poly(&self.p), &x() * &self.q)
    }

    /// `(p1, q1)[y := (p2, q2)] = (p1 + q1 p2, q1 q2)`.
    pub fn subst(&self, o: &PairPoly) -> PairPoly {
        PairPoly::new(&self.p + &(&self.q * &o.p), &self.q * &o.q)
    }
}

/// Pair encoding of a unary-signature forest with at most one hole.
pub fn encode_context_pair(c: &Forest) -> Result<PairPoly, EncodingError> {
    if c.hole_count() > 1 {
        return Err(EncodingError::TwoHoles);
    }
    pair_rec(c)
}

fn pair_rec(c: &Forest) -> Result<PairPoly, EncodingError> {
    let mut acc = PairPoly::forest(Polynomial::one());
    for t in c.trees() {
        let e = match t {
            Tree::Hole => PairPoly::hole(),
            Tree::Node(l, _) if l != UNARY_LABEL => return Err(EncodingError::NonUnaryLabel(l.clone())),
            Tree::Node(_, h) => pair_rec(h)?.root(),
        };
        acc = acc.add(&e);
    }
    Ok(acc)
}

/// `(b^m, sum_j a_j b^(j-1))` with `b = k + 1`.
pub fn encode_word_pair(w: &Word, k: u8) -> Result<(Rational, Rational), EncodingError> {
    let b = BigInt::from(k as u32 + 1);
    let mut len = BigInt::one();
    let mut val = BigInt::zero();
    for &a in &w.0 {
        if a == 0 || a > k {
            return Err(EncodingError::LetterOutOfRange { letter: a, k });
        }
        val += &len * BigInt::from(a);
        len *= &b;
    }
    Ok((Rational::from_integer(len), Rational::from_integer(val)))
}

fn c(p: Polynomial) -> Term<Polynomial> {
    Term::Const(p)
}

fn v(arg: usize, reg: usize) -> Term<Polynomial> {
    Term::Var(TermVar::of_arg(arg, reg))
}

fn root_term(t: Term<Polynomial>) -> Term<Polynomial> {
    Term::add(c(Polynomial::int(2)), Term::mul(c(x()), t))
}

fn is_unary(alphabet: &[&str]) -> bool {
    alphabet == [UNARY_LABEL]
}

/// `UF -> Q[x]`, width 1. Over the alphabet `[root]` this is `phi`, otherwise
/// `phi` after `reduce_alphabet`.
pub fn uf_simulation(alphabet: &[&str]) -> SimulationSpec<UfAlgebra, PolyAlgebra> {
    let labels: Vec<String> = alphabet.iter().map(|s| s.to_string()).collect();
    let unary = is_unary(alphabet);
    let alpha_labels = labels.clone();
    let alpha = move |h: &Forest| -> Result<Vec<Polynomial>, AlgebraError> {
        let refs: Vec<&str> = alpha_labels.iter().map(String::as_str).collect();
        let reduced = if unary { Ok(h.clone()) } else { reduce_alphabet(h, &refs) };
        reduced
            .and_then(|r| phi(&r))
            .map(|p| vec![p])
            .map_err(|e| AlgebraError::InvalidLiteral {
                text: h.to_string(),
                detail: e.to_string(),
            })
    };
    let mut operations = BTreeMap::new();
    operations.insert("add".to_string(), vec![Term::mul(v(1, 1), v(2, 1))]);
    for (i, l) in labels.iter().enumerate() {
        let t = if unary {
            root_term(v(1, 1))
        } else {
            let mut t = Term::mul(c(root_poly(&Polynomial::one())), root_term(v(1, 1)));
            for _ in 0..=i {
                t = root_term(t);
            }
            t
        };
        operations.insert(l.clone(), vec![t]);
    }
    SimulationSpec {
        width: 1,
        alpha: Arc::new(alpha),
        operations,
        output: Term::Var(TermVar::own(1)),
    }
}

/// `UCF -> Q[x]^2` through the pair encoding; the output projection is `p`.
pub fn ucf_simulation(alphabet: &[&str]) -> SimulationSpec<UcfAlgebra, PolyAlgebra> {
    let labels: Vec<String> = alphabet.iter().map(|s| s.to_string()).collect();
    let unary = is_unary(alphabet);
    let alpha_labels = labels.clone();
    let alpha = move |h: &Forest| -> Result<Vec<Polynomial>, AlgebraError> {
        let refs: Vec<&str> = alpha_labels.iter().map(String::as_str).collect();
        let reduced = if unary { Ok(h.clone()) } else { reduce_alphabet(h, &refs) };
        reduced
            .and_then(|r| encode_context_pair(&r))
            .map(|e| vec![e.p, e.q])
            .map_err(|e| AlgebraError::InvalidLiteral {
                text: h.to_string(),
                detail: e.to_string(),
            })
    };
    let (p1, q1, p2, q2) = (v(1, 1), v(1, 2), v(2, 1), v(2, 2));
    let mut operations = BTreeMap::new();
    operations.insert(
        "add".to_string(),
        vec![
            Term::mul(p1.clone(), p2.clone()),
            Term::add(Term::mul(q1.clone(), p2.clone()), Term::mul(p1.clone(), q2.clone())),
        ],
    );
    operations.insert(
        "subst".to_string(),
        vec![Term::add(p1.clone(), Term::mul(q1.clone(), p2)), Term::mul(q1.clone(), q2)],
    );
    for (i, l) in labels.iter().enumerate() {
        let (mut tp, mut tq) = if unary {
            (root_term(p1.clone()), Term::mul(c(x()), q1.clone()))
        } else {
            // root() + root(h), then root^i.
            let k = c(root_poly(&Polynomial::one()));
            (
                Term::mul(k.clone(), root_term(p1.clone())),
                Term::mul(k, Term::mul(c(x()), q1.clone())),
            )
        };
        if !unary {
            for _ in 0..=i {
                tp = root_term(tp);
                tq = Term::mul(c(x()), tq);
            }
        }
        operations.insert(l.clone(), vec![tp, tq]);
    }
    SimulationSpec {
        width: 2,
        alpha: Arc::new(alpha),
        operations,
        output: Term::Var(TermVar::own(1)),
    }
}

/// Words over `1..=k` into `Q^2`; the output projection is the value part.
pub fn word_simulation(k: u8) -> SimulationSpec<WordAlgebra, RatAlgebra> {
    let alpha = move |w: &Word| -> Result<Vec<Rational>, AlgebraError> {
        encode_word_pair(w, k)
            .map(|(l, v)| vec![l, v])
            .map_err(|e| AlgebraError::InvalidLiteral {
                text: w.to_string(),
                detail: e.to_string(),
            })
    };
    let var = |arg, reg| Term::Var(TermVar::of_arg(arg, reg));
    let mut operations = BTreeMap::new();
    operations.insert(
        "mul".to_string(),
        vec![
            Term::mul(var(1, 1), var(2, 1)),
            Term::add(var(1, 2), Term::mul(var(1, 1), var(2, 2))),
        ],
    );
    SimulationSpec {
        width: 2,
        alpha: Arc::new(alpha),
        operations,
        output: Term::Var(TermVar::own(2)),
    }
}

/// Compile `m` along `spec`: register `j` becomes registers
/// `(j-1)*w+1 ..= j*w`, every update and output is lifted, and outputs are
/// composed with the output projection of `spec`.
pub fn compile_ra<S: Algebra + Clone, T: Algebra + Clone>(
    m: &RegisterAutomaton<S>,
    spec: &SimulationSpec<S, T>,
    target: T,
) -> Result<RegisterAutomaton<T>, EncodingError> {
    let w = spec.width;
    let mut out = RegisterAutomaton::new(target, m.signature().clone(), m.registers() * w);
    for name in m.states() {
        out.add_state(name);
    }
    for r in m.rules() {
        let mut update = Vec::with_capacity(m.registers() * w);
        for t in &r.update {
            update.extend(lift_simulation_term(spec, t)?);
        }
        out.add_rule_indexed(Rule {
            symbol: r.symbol.clone(),
            sources: r.sources.clone(),
            target: r.target,
            update,
        })?;
    }
    for (q, t) in m.outputs() {
        let lifted = lift_simulation_term(spec, t)?;
        let projected = spec.output.substitute(&|v: TermVar| {
            (v.arg == 0).then(|| lifted[v.reg - 1].clone())
        });
        out.set_output_indexed(*q, projected)?;
    }
    Ok(out)
}

/// Embed an automaton over `Q` into `Q[x]`.
pub fn embed_rational(m: &RegisterAutomaton<RatAlgebra>) -> Result<RegisterAutomaton<PolyAlgebra>, EncodingError> {
    Ok(m.map_algebra(PolyAlgebra::new(), &|r: &Rational| Polynomial::constant(r.clone()))?)
}

/// Compile any built-in automaton to `Q[x]` (or keep it if already
/// polynomial, including `Q[x]` with substitution).
pub fn compile_to_poly(m: &AnyAutomaton) -> Result<RegisterAutomaton<PolyAlgebra>, EncodingError> {
    match m {
        AnyAutomaton::Rat(a) => embed_rational(a),
        AnyAutomaton::Poly(a) => Ok(a.clone()),
        AnyAutomaton::Uf(a) => {
            let labels: Vec<&str> = a.algebra().labels().iter().map(String::as_str).collect();
            compile_ra(a, &uf_simulation(&labels), PolyAlgebra::new())
        }
        AnyAutomaton::Ucf(a) => {
            let labels: Vec<&str> = a.algebra().labels().iter().map(String::as_str).collect();
            compile_ra(a, &ucf_simulation(&labels), PolyAlgebra::new())
        }
        AnyAutomaton::Word(a) => {
            let k = a.algebra().letters;
            let q = compile_ra(a, &word_simulation(k), RatAlgebra)?;
            embed_rational(&q)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{sample_tuples, verify_simulation_samples};
    use crate::forests::{enumerate_forests, parse_forest};
    use crate::poly::{parse_polynomial, rat};

    fn f(t: &str) -> Forest {
        parse_forest(t).unwrap()
    }

    fn p(t: &str) -> Polynomial {
        parse_polynomial(t).unwrap()
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(&Forest::empty()).unwrap(), Polynomial::one());
        assert_eq!(phi(&f("root")).unwrap(), p("2 + x"));
        assert_eq!(phi(&f("root + root")).unwrap(), p("x^2 + 4*x + 4"));
        assert_eq!(phi(&f("root(root)")).unwrap(), p("x^2 + 2*x + 2"));
        assert!(phi(&f("a")).is_err());
    }

    #[test]
    fn alphabet_reduction() {
        assert_eq!(reduce_alphabet(&Forest::empty(), &["a"]).unwrap(), Forest::empty());
        assert_eq!(reduce_alphabet(&f("a"), &["a", "b"]).unwrap(), f("root(root + root)"));
        assert!(reduce_alphabet(&f("c"), &["a"]).is_err());
    }

    #[test]
    fn pair_examples() {
        assert_eq!(encode_context_pair(&Forest::hole()).unwrap(), PairPoly::hole());
        let rc = encode_context_pair(&f("root(?)")).unwrap();
        assert_eq!(rc, PairPoly::new(p("2"), p("x")));
        let empty = encode_context_pair(&Forest::empty()).unwrap();
        assert_eq!(rc.subst(&empty), PairPoly::forest(phi(&f("root")).unwrap()));
        assert_eq!(encode_context_pair(&f("? + ?")), Err(EncodingError::TwoHoles));
    }

    #[test]
    fn word_examples() {
        let alg = WordAlgebra::new(2);
        assert_eq!(encode_word_pair(&Word::empty(), 2).unwrap(), (rat(1), rat(0)));
        assert_eq!(encode_word_pair(&alg.parse_word("a").unwrap(), 2).unwrap(), (rat(3), rat(1)));
        assert_eq!(encode_word_pair(&alg.parse_word("ab").unwrap(), 2).unwrap(), (rat(9), rat(7)));
        assert!(encode_word_pair(&Word(vec![3]), 2).is_err());
    }

    #[test]
    fn uf_spec_commutes_on_samples() {
        let labels = ["a", "b"];
        let spec = uf_simulation(&labels);
        let alg = UfAlgebra::new(&labels);
        let forests = enumerate_forests(&labels, 3);
        let mut samples = sample_tuples(&forests, 1);
        samples.extend(sample_tuples(&forests[..10], 2));
        assert!(verify_simulation_samples(&spec, &alg, &PolyAlgebra::new(), &samples));

        let mut broken = uf_simulation(&["root"]);
        broken
            .operations
            .insert("root".into(), vec![Term::add(c(Polynomial::one()), Term::mul(c(x()), v(1, 1)))]);
        let unary = UfAlgebra::new(&["root"]);
        let samples = vec![vec![Forest::empty()], vec![f("root")]];
        assert!(!verify_simulation_samples(&broken, &unary, &PolyAlgebra::new(), &samples));
        assert!(verify_simulation_samples(&broken, &unary, &PolyAlgebra::new(), &[]));
    }

    #[test]
    fn lift_examples() {
        let spec = uf_simulation(&["root"]);
        let t = Term::op("root", vec![Term::Var(TermVar::of_arg(1, 1))]);
        let lifted = lift_simulation_term(&spec, &t).unwrap();
        assert_eq!(lifted, vec![root_term(v(1, 1))]);
        let bare = lift_simulation_term(&spec, &Term::Var(TermVar::of_arg(1, 1))).unwrap();
        assert_eq!(bare, vec![v(1, 1)]);
    }

    #[test]
    fn ucf_spec_commutes_on_samples() {
        let labels = ["a", "b"];
        let spec = ucf_simulation(&labels);
        let alg = UcfAlgebra::new(&labels);
        let mut values = enumerate_forests(&labels, 2);
        values.push(Forest::hole());
        values.push(f("a(?)"));
        values.push(f("b + ?"));
        let mut samples = sample_tuples(&values, 1);
        samples.extend(sample_tuples(&values, 2));
        assert!(verify_simulation_samples(&spec, &alg, &PolyAlgebra::new(), &samples));
    }

    #[test]
    fn word_spec_commutes() {
        let alg = WordAlgebra::new(3);
        let spec = word_simulation(3);
        let words: Vec<Word> = ["", "a", "c", "ab", "cba"]
            .iter()
            .map(|w| alg.parse_word(w).unwrap())
            .collect();
        assert!(verify_simulation_samples(&spec, &alg, &RatAlgebra, &sample_tuples(&words, 2)));
    }
}
