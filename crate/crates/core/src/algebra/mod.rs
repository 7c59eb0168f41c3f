//! Multi-sorted algebras, terms over them, and simulations between algebras.
//!
//! An algebra is an evaluator object: it lists its sorts and operation
//! symbols and evaluates an operation on concrete values. Terms are
//! built from register variables, constants and operation applications and
//! induce polynomial functions of the algebra.
//!
//! A [`SimulationSpec`] maps every source value to a fixed-width tuple of
//! target values and every source operation to a tuple of target terms, so
//! that the commuting square `alpha(op(a..)) = f(alpha(a)..)` holds.

mod rings;
mod text;
mod words;

use std::collections::BTreeMap;
use std::fmt::{self, Debug};
use std::hash::Hash;
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::poly::Rational;

pub use rings::{PolyAlgebra, RatAlgebra};
pub use text::{parse_term, register_var, term_text};
pub use words::{Word, WordAlgebra};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("unknown operation `{0}`")]
    UnknownOperation(String),
    #[error("sort mismatch in `{op}`: {detail}")]
    SortMismatch { op: String, detail: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("invalid literal `{text}`: {detail}")]
    InvalidLiteral { text: String, detail: String },
    #[error("operation `{op}` expects {expected} arguments, got {got}")]
    Arity {
        op: String,
        expected: usize,
        got: usize,
    },
    #[error("operation `{0}` is not mapped by the simulation")]
    UnmappedOperation(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sort(pub String);

impl Sort {
    pub fn new(name: &str) -> Self {
        Sort(name.to_string())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Typed operation symbol. Overloads share a name and differ in sorts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OperationSymbol {
    pub name: String,
    pub args: Vec<Sort>,
    pub result: Sort,
}

impl OperationSymbol {
    pub fn new(name: &str, args: &[&Sort], result: &Sort) -> Self {
        OperationSymbol {
            name: name.to_string(),
            args: args.iter().map(|s| (*s).clone()).collect(),
            result: result.clone(),
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

/// Register variable of a term. `arg == 0` names the automaton's own
/// registers (`r<reg>`), `arg >= 1` the registers of the `arg`-th child
/// (`r<reg>.<arg>`). Simulation terms use `arg` for the source argument and
/// `reg` for the coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermVar {
    pub reg: usize,
    pub arg: usize,
}

impl TermVar {
    pub fn own(reg: usize) -> Self {
        TermVar { reg, arg: 0 }
    }

    pub fn of_arg(arg: usize, reg: usize) -> Self {
        TermVar { reg, arg }
    }
}

impl fmt::Display for TermVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.arg == 0 {
            write!(f, "r{}", self.reg)
        } else {
            write!(f, "r{}.{}", self.reg, self.arg)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term<V> {
    Var(TermVar),
    Const(V),
    Op(String, Vec<Term<V>>),
}

impl<V: Clone> Term<V> {
    pub fn var(v: TermVar) -> Self {
        Term::Var(v)
    }

    pub fn op(name: &str, children: Vec<Term<V>>) -> Self {
        Term::Op(name.to_string(), children)
    }

    pub fn add(a: Term<V>, b: Term<V>) -> Self {
        Term::op("add", vec![a, b])
    }

    pub fn sub(a: Term<V>, b: Term<V>) -> Self {
        Term::op("sub", vec![a, b])
    }

    pub fn mul(a: Term<V>, b: Term<V>) -> Self {
        Term::op("mul", vec![a, b])
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::Op(_, cs) => 1 + cs.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn vars(&self) -> Vec<TermVar> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<TermVar>) {
        match self {
            Term::Var(v) => out.push(*v),
            Term::Const(_) => {}
            Term::Op(_, cs) => cs.iter().for_each(|c| c.collect_vars(out)),
        }
    }

    pub fn map_vars(&self, f: &impl Fn(TermVar) -> TermVar) -> Term<V> {
        match self {
            Term::Var(v) => Term::Var(f(*v)),
            Term::Const(c) => Term::Const(c.clone()),
            Term::Op(n, cs) => Term::Op(n.clone(), cs.iter().map(|c| c.map_vars(f)).collect()),
        }
    }

    /// Replace variables by terms; variables mapped to `None` are kept.
    pub fn substitute(&self, f: &impl Fn(TermVar) -> Option<Term<V>>) -> Term<V> {
        match self {
            Term::Var(v) => f(*v).unwrap_or(Term::Var(*v)),
            Term::Const(c) => Term::Const(c.clone()),
            Term::Op(n, cs) => Term::Op(n.clone(), cs.iter().map(|c| c.substitute(f)).collect()),
        }
    }

    pub fn mentions_op(&self, name: &str) -> bool {
        match self {
            Term::Op(n, cs) => n == name || cs.iter().any(|c| c.mentions_op(name)),
            _ => false,
        }
    }

    pub fn map_consts<W: Clone>(&self, f: &impl Fn(&V) -> W) -> Term<W> {
        match self {
            Term::Var(v) => Term::Var(*v),
            Term::Const(c) => Term::Const(f(c)),
            Term::Op(n, cs) => Term::Op(n.clone(), cs.iter().map(|c| c.map_consts(f)).collect()),
        }
    }
}

/// Evaluator interface of a concrete algebra.
pub trait Algebra: Send + Sync {
    type Value: Clone + Eq + Hash + Ord + Debug + Send + Sync;

    /// Header text naming the algebra in automaton files, e.g. `uf a b`.
    fn header(&self) -> String;
    fn sorts(&self) -> Vec<Sort>;
    fn operations(&self) -> Vec<OperationSymbol>;
    fn sort_of(&self, value: &Self::Value) -> Sort;
    fn apply(&self, op: &str, args: &[Self::Value]) -> Result<Self::Value, AlgebraError>;
    /// Value written between braces.
    fn parse_literal(&self, text: &str) -> Result<Self::Value, AlgebraError>;
    /// Atom text that parses back to `value`.
    fn render_value(&self, value: &Self::Value) -> String;

    /// Bare numeric literal.
    fn number(&self, _value: &Rational) -> Option<Self::Value> {
        None
    }

    /// Named constant (an identifier or `?`).
    fn constant(&self, _name: &str) -> Option<Self::Value> {
        None
    }

    /// Argument supplied for `op()` written without arguments.
    fn default_argument(&self, _op: &str) -> Option<Self::Value> {
        None
    }

    fn default_sort(&self) -> Sort {
        self.sorts()[0].clone()
    }

    /// Whether `sub` and `neg` are available.
    fn has_subtraction(&self) -> bool {
        false
    }

    fn is_zero(&self, _value: &Self::Value) -> bool {
        false
    }
}

pub fn integer_value<A: Algebra>(alg: &A, n: i64) -> Option<A::Value> {
    alg.number(&Rational::from_integer(BigInt::from(n)))
}

/// Value of the polynomial function induced by `t` at the point given by `env`.
pub fn eval_term<A: Algebra + ?Sized>(
    alg: &A,
    t: &Term<A::Value>,
    env: &dyn Fn(TermVar) -> Option<A::Value>,
) -> Result<A::Value, AlgebraError> {
    match t {
        Term::Var(v) => env(*v).ok_or_else(|| AlgebraError::UnboundVariable(v.to_string())),
        Term::Const(c) => Ok(c.clone()),
        Term::Op(name, children) => {
            let args = children
                .iter()
                .map(|c| eval_term(alg, c, env))
                .collect::<Result<Vec<_>, _>>()?;
            alg.apply(name, &args)
        }
    }
}

/// Evaluate with own registers `own` and child registers `args[i-1]`.
pub fn eval_with_registers<A: Algebra + ?Sized>(
    alg: &A,
    t: &Term<A::Value>,
    own: &[A::Value],
    args: &[&[A::Value]],
) -> Result<A::Value, AlgebraError> {
    let env = |v: TermVar| -> Option<A::Value> {
        if v.reg == 0 {
            return None;
        }
        if v.arg == 0 {
            own.get(v.reg - 1).cloned()
        } else {
            args.get(v.arg - 1).and_then(|regs| regs.get(v.reg - 1)).cloned()
        }
    };
    eval_term(alg, t, &env)
}

/// Sort of `t` given the sorts of its variables.
pub fn infer_sort<A: Algebra + ?Sized>(
    alg: &A,
    t: &Term<A::Value>,
    var_sort: &dyn Fn(TermVar) -> Option<Sort>,
) -> Result<Sort, AlgebraError> {
    match t {
        Term::Var(v) => var_sort(*v).ok_or_else(|| AlgebraError::UnboundVariable(v.to_string())),
        Term::Const(c) => Ok(alg.sort_of(c)),
        Term::Op(name, children) => {
            let sorts = children
                .iter()
                .map(|c| infer_sort(alg, c, var_sort))
                .collect::<Result<Vec<_>, _>>()?;
            let ops = alg.operations();
            let candidates: Vec<&OperationSymbol> = ops.iter().filter(|o| &o.name == name).collect();
            if candidates.is_empty() {
                return Err(AlgebraError::UnknownOperation(name.clone()));
            }
            candidates
                .iter()
                .find(|o| o.args == sorts)
                .map(|o| o.result.clone())
                .ok_or_else(|| AlgebraError::SortMismatch {
                    op: name.clone(),
                    detail: format!(
                        "no overload for argument sorts ({})",
                        sorts.iter().map(|s| s.0.as_str()).collect::<Vec<_>>().join(", ")
                    ),
                })
        }
    }
}

type AlphaFn<S, T> = dyn Fn(&S) -> Result<Vec<T>, AlgebraError> + Send + Sync;

/// Simulation of a source algebra in a target algebra with a fixed width.
pub struct SimulationSpec<S: Algebra, T: Algebra> {
    pub width: usize,
    /// Encoding of source values (constants of source terms).
    pub alpha: Arc<AlphaFn<S::Value, T::Value>>,
    /// Each source operation of arity m: `width` target terms over
    /// variables `(arg i in 1..=m, coordinate j in 1..=width)`.
    pub operations: BTreeMap<String, Vec<Term<T::Value>>>,
    /// Target term over own variables `r1..r_width` extracting a single
    /// value that is injective on encodings of output-sort values.
    pub output: Term<T::Value>,
}

impl<S: Algebra, T: Algebra> Clone for SimulationSpec<S, T> {
    fn clone(&self) -> Self {
        SimulationSpec {
            width: self.width,
            alpha: Arc::clone(&self.alpha),
            operations: self.operations.clone(),
            output: self.output.clone(),
        }
    }
}

impl<S: Algebra, T: Algebra> SimulationSpec<S, T> {
    pub fn encode(&self, v: &S::Value) -> Result<Vec<T::Value>, AlgebraError> {
        (self.alpha)(v)
    }
}

/// Structural replacement of every source operation by its operation map.
/// Source variable `(arg, reg)` becomes the target variables
/// `(arg, (reg - 1) * width + j)` for `j` in `1..=width`.
pub fn lift_simulation_term<S: Algebra, T: Algebra>(
    spec: &SimulationSpec<S, T>,
    t: &Term<S::Value>,
) -> Result<Vec<Term<T::Value>>, AlgebraError> {
    let w = spec.width;
    match t {
        Term::Var(v) => Ok((1..=w)
            .map(|j| {
                Term::Var(TermVar {
                    arg: v.arg,
                    reg: (v.reg - 1) * w + j,
                })
            })
            .collect()),
        Term::Const(c) => Ok(spec.encode(c)?.into_iter().map(Term::Const).collect()),
        Term::Op(name, children) => {
            let images = spec
                .operations
                .get(name)
                .ok_or_else(|| AlgebraError::UnmappedOperation(name.clone()))?;
            let lifted: Vec<Vec<Term<T::Value>>> = children
                .iter()
                .map(|c| lift_simulation_term(spec, c))
                .collect::<Result<_, _>>()?;
            Ok(images
                .iter()
                .map(|f| {
                    f.substitute(&|v: TermVar| {
                        lifted
                            .get(v.arg.wrapping_sub(1))
                            .and_then(|tuple| tuple.get(v.reg.wrapping_sub(1)))
                            .cloned()
                    })
                })
                .collect())
        }
    }
}

/// Checks the commuting square on every sample tuple for every source
/// operation whose argument sorts match the tuple. Tuples rejected by the
/// source operation itself (e.g. two holes) are skipped.
pub fn verify_simulation_samples<S: Algebra, T: Algebra>(
    spec: &SimulationSpec<S, T>,
    source: &S,
    target: &T,
    samples: &[Vec<S::Value>],
) -> bool {
    let ops = source.operations();
    for tuple in samples {
        let sorts: Vec<Sort> = tuple.iter().map(|v| source.sort_of(v)).collect();
        for op in ops.iter().filter(|o| o.args == sorts) {
            let Ok(image) = source.apply(&op.name, tuple) else {
                continue;
            };
            let Ok(expected) = spec.encode(&image) else {
                return false;
            };
            let Some(terms) = spec.operations.get(&op.name) else {
                return false;
            };
            let encoded: Vec<Vec<T::Value>> = match tuple.iter().map(|v| spec.encode(v)).collect() {
                Ok(e) => e,
                Err(_) => return false,
            };
            let slices: Vec<&[T::Value]> = encoded.iter().map(Vec::as_slice).collect();
            for (j, f) in terms.iter().enumerate() {
                match eval_with_registers(target, f, &[], &slices) {
                    Ok(v) if v == expected[j] => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

/// All tuples of length `arity` drawn from `values`.
pub fn sample_tuples<V: Clone>(values: &[V], arity: usize) -> Vec<Vec<V>> {
    let mut out: Vec<Vec<V>> = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    p
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, Polynomial};

    #[test]
    fn eval_variable_and_worked_example() {
        let alg = RatAlgebra;
        let env = |v: TermVar| if v.reg == 7 { Some(rat(5)) } else { None };
        assert_eq!(eval_term(&alg, &Term::Var(TermVar::own(7)), &env).unwrap(), rat(5));

        // (x + 2) * (x + y) at x = 1, y = 0
        let t = parse_term(&alg, "(r1 + 2) * (r1 + r2)").unwrap();
        let env = |v: TermVar| match v.reg {
            1 => Some(rat(1)),
            2 => Some(rat(0)),
            _ => None,
        };
        assert_eq!(eval_term(&alg, &t, &env).unwrap(), rat(3));
    }

    #[test]
    fn unbound_variable_is_reported() {
        let alg = RatAlgebra;
        let t = parse_term(&alg, "r1 + r2").unwrap();
        let env = |v: TermVar| if v.reg == 1 { Some(rat(1)) } else { None };
        assert_eq!(
            eval_term(&alg, &t, &env),
            Err(AlgebraError::UnboundVariable("r2".into()))
        );
    }

    #[test]
    fn sort_inference_over_polynomials() {
        let alg = PolyAlgebra::new();
        let t = parse_term(&alg, "x * r1.1 + 2").unwrap();
        let sort = infer_sort(&alg, &t, &|_| Some(Sort::new("poly"))).unwrap();
        assert_eq!(sort, Sort::new("poly"));
        let bad = Term::op("subst", vec![Term::Const(Polynomial::one()), Term::Const(Polynomial::one())]);
        assert!(matches!(
            infer_sort(&alg, &bad, &|_| None),
            Err(AlgebraError::UnknownOperation(_))
        ));
    }

    #[test]
    fn tuples() {
        assert_eq!(sample_tuples(&[1, 2], 2).len(), 4);
        assert_eq!(sample_tuples(&[1, 2, 3], 0), vec![Vec::<i32>::new()]);
    }
}
