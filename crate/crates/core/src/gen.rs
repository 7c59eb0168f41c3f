//! Seeded random instances for property tests and fuzzing.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{PolyAlgebra, Term, TermVar};
use crate::automata::{cross_difference, self_product, AutomatonError, RegisterAutomaton, Rule};
use crate::poly::Polynomial;
use crate::reductions::{Transition, TwoCounterMachine};
use crate::tree::Signature;

/// Random machine with `states` states; decrements only on nonzero flags.
pub fn random_machine<R: Rng + ?Sized>(rng: &mut R, states: usize) -> TwoCounterMachine {
    let mut rows = Vec::new();
    for state in 1..=states {
        for (b1, b2) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
            let delta = |rng: &mut R, b: u8| -> i8 {
                if b == 0 {
                    rng.gen_range(0..=1)
                } else {
                    rng.gen_range(-1..=1)
                }
            };
            let d1 = delta(rng, b1);
            let d2 = delta(rng, b2);
            rows.push(Transition {
                state,
                b1,
                b2,
                next: rng.gen_range(1..=states),
                d1,
                d2,
            });
        }
    }
    TwoCounterMachine::new(states, &rows).expect("generated rows are total")
}

/// Shape of generated automata.
#[derive(Debug, Clone, Copy)]
pub struct RandomShape {
    pub states: usize,
    pub registers: usize,
    pub deterministic: bool,
    /// Chance that a left-hand side gets a rule at all.
    pub density: f64,
}

impl Default for RandomShape {
    fn default() -> Self {
        RandomShape {
            states: 2,
            registers: 2,
            deterministic: true,
            density: 0.7,
        }
    }
}

pub fn small_signature() -> Signature {
    Signature::new(&[("l", 0), ("u", 1), ("b", 2)])
}

fn atom<R: Rng + ?Sized>(rng: &mut R, arity: usize, registers: usize) -> Term<Polynomial> {
    let roll = rng.gen_range(0..10);
    if arity > 0 && roll < 6 {
        Term::var(TermVar::of_arg(rng.gen_range(1..=arity), rng.gen_range(1..=registers)))
    } else if roll < 8 {
        Term::Const(Polynomial::var("x"))
    } else {
        Term::Const(Polynomial::int(rng.gen_range(-2..=2)))
    }
}

/// Sum of at most two products of at most two atoms, plus a constant.
pub fn random_update<R: Rng + ?Sized>(rng: &mut R, arity: usize, registers: usize) -> Term<Polynomial> {
    let mut t = Term::Const(Polynomial::int(rng.gen_range(-1..=2)));
    for _ in 0..rng.gen_range(1..=2) {
        let mut p = atom(rng, arity, registers);
        if rng.gen_bool(0.4) {
            p = Term::mul(p, atom(rng, arity, registers));
        }
        t = if rng.gen_bool(0.8) { Term::add(t, p) } else { Term::sub(t, p) };
    }
    t
}

fn random_output<R: Rng + ?Sized>(rng: &mut R, registers: usize) -> Term<Polynomial> {
    let own = |rng: &mut R| Term::var(TermVar::own(rng.gen_range(1..=registers)));
    let mut t = own(rng);
    if rng.gen_bool(0.5) {
        t = Term::sub(t, own(rng));
    }
    if rng.gen_bool(0.3) {
        t = Term::add(t, Term::Const(Polynomial::int(rng.gen_range(-1..=1))));
    }
    t
}

fn tuples(states: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..states).map(move |q| {
                    let mut t2 = t.clone();
                    t2.push(q);
                    t2
                })
            })
            .collect();
    }
    out
}

/// Random automaton over `Q[x]` on [`small_signature`]. Every state has an
/// output, and some leaf rule exists.
pub fn random_poly_automaton<R: Rng + ?Sized>(rng: &mut R, shape: RandomShape) -> RegisterAutomaton<PolyAlgebra> {
    let sig = small_signature();
    let mut m = RegisterAutomaton::new(PolyAlgebra::new(), sig.clone(), shape.registers);
    for q in 0..shape.states {
        m.add_state(&format!("q{q}"));
    }
    for (symbol, arity) in sig.symbols().map(|(s, r)| (s.to_string(), r)).collect::<Vec<_>>() {
        for sources in tuples(shape.states, arity) {
            let count = if arity == 0 && shape.deterministic {
                1
            } else if arity == 0 {
                rng.gen_range(1..=2)
            } else if rng.gen_bool(shape.density) {
                if shape.deterministic {
                    1
                } else {
                    rng.gen_range(1..=2)
                }
            } else {
                0
            };
            for _ in 0..count {
                let update = (0..shape.registers).map(|_| random_update(rng, arity, shape.registers)).collect();
                let rule = Rule {
                    symbol: symbol.clone(),
                    sources: sources.clone(),
                    target: rng.gen_range(0..shape.states),
                    update,
                };
                // duplicates are rejected; skipping them is fine
                let _ = m.add_rule_indexed(rule);
            }
        }
    }
    for q in 0..shape.states {
        let out = random_output(rng, shape.registers);
        m.set_output_indexed(q, out).expect("output over own registers");
    }
    m
}

/// The same automaton with registers renamed by `perm` (register `j` becomes
/// `perm[j-1]`, 1-based).
pub fn permute_registers(
    m: &RegisterAutomaton<PolyAlgebra>,
    perm: &[usize],
) -> Result<RegisterAutomaton<PolyAlgebra>, AutomatonError> {
    let rename = |t: &Term<Polynomial>| {
        t.map_vars(&|v: TermVar| TermVar {
            reg: perm[v.reg - 1],
            arg: v.arg,
        })
    };
    let mut out = RegisterAutomaton::new(m.algebra().clone(), m.signature().clone(), m.registers());
    for q in m.states() {
        out.add_state(q);
    }
    for r in m.rules() {
        let mut update = vec![Term::Const(Polynomial::zero()); m.registers()];
        for (j, t) in r.update.iter().enumerate() {
            update[perm[j] - 1] = rename(t);
        }
        out.add_rule_indexed(Rule {
            symbol: r.symbol.clone(),
            sources: r.sources.clone(),
            target: r.target,
            update,
        })?;
    }
    for (q, t) in m.outputs() {
        out.set_output_indexed(*q, rename(t))?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FuzzKind {
    /// Product of a deterministic automaton with itself: always zero.
    SelfProduct,
    /// Difference with a register-permuted copy: always zero.
    Permuted,
    /// Random outputs, mostly nonzero.
    Plain,
    /// Product of a nondeterministic automaton with itself.
    Nondeterministic,
}

/// Mixed fuzzing instance over `Q[x]`.
pub fn fuzz_instance<R: Rng + ?Sized>(rng: &mut R) -> (FuzzKind, RegisterAutomaton<PolyAlgebra>) {
    let kind = *[FuzzKind::SelfProduct, FuzzKind::Permuted, FuzzKind::Plain, FuzzKind::Nondeterministic]
        .choose(rng)
        .expect("nonempty");
    let shape = RandomShape {
        states: rng.gen_range(1..=2),
        registers: rng.gen_range(1..=2),
        deterministic: kind != FuzzKind::Nondeterministic,
        density: 0.6,
    };
    let m = random_poly_automaton(rng, shape);
    let out = match kind {
        FuzzKind::SelfProduct | FuzzKind::Nondeterministic => self_product(&m),
        FuzzKind::Permuted => {
            let mut perm: Vec<usize> = (1..=shape.registers).collect();
            perm.shuffle(rng);
            permute_registers(&m, &perm).and_then(|p| cross_difference(&m, &p))
        }
        FuzzKind::Plain => Ok(m),
    };
    (kind, out.expect("generated automata are well formed"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn machines_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=3 {
            let m = random_machine(&mut rng, n);
            assert_eq!(m.transitions().count(), 4 * n);
        }
    }

    #[test]
    fn deterministic_shape_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let m = random_poly_automaton(&mut rng, RandomShape::default());
            assert!(m.is_deterministic());
            assert!(!m.rules().is_empty());
        }
    }

    #[test]
    fn permutation_preserves_outputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_poly_automaton(&mut rng, RandomShape::default());
        let p = permute_registers(&m, &[2, 1]).unwrap();
        for t in m.signature().enumerate(5) {
            assert_eq!(m.outputs_on(&t).unwrap(), p.outputs_on(&t).unwrap());
        }
    }
}
