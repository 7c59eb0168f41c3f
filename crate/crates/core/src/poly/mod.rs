//! Exact sparse multivariate polynomials over the rationals.
//!
//! A [`Polynomial`] is a map from [`Monomial`] to a nonzero [`Rational`]
//! coefficient. Variables are interned textual names ([`Var`]); register
//! variables follow the `r1..rn` convention and argument copies are written
//! `r<reg>.<arg>`.

mod order;
pub(crate) mod parse;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use num_rational::BigRational as Rational;
pub use order::{MonomialOrder, OrderKind};
pub use parse::parse_polynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("incomplete point: no value for variable `{0}`")]
    MissingVariable(String),
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// An interned variable name. Ordered by name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// Register variable `r<index>` (1-based).
    pub fn register(index: usize) -> Self {
        Var::new(&format!("r{index}"))
    }

    /// Register `index` of argument `arg`, written `r<index>.<arg>`.
    pub fn arg_register(index: usize, arg: usize) -> Self {
        Var::new(&format!("r{index}.{arg}"))
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

/// Power product of variables. Sorted by variable, no zero exponents.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn power(v: Var, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, exp)])
        }
    }

    pub fn from_exponents(exps: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut map: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in exps {
            *map.entry(v).or_insert(0) += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .map_or(0, |i| self.0[i].1)
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.0.iter().map(|(v, _)| v)
    }

    fn merge(&self, other: &Monomial, combine: impl Fn(u32, u32) -> u32) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let pick = match (self.0.get(i), other.0.get(j)) {
                (Some((a, ea)), Some((b, eb))) => match a.cmp(b) {
                    std::cmp::Ordering::Less => {
                        i += 1;
                        (a.clone(), combine(*ea, 0))
                    }
                    std::cmp::Ordering::Greater => {
                        j += 1;
                        (b.clone(), combine(0, *eb))
                    }
                    std::cmp::Ordering::Equal => {
                        i += 1;
                        j += 1;
                        (a.clone(), combine(*ea, *eb))
                    }
                },
                (Some((a, ea)), None) => {
                    i += 1;
                    (a.clone(), combine(*ea, 0))
                }
                (None, Some((b, eb))) => {
                    j += 1;
                    (b.clone(), combine(0, *eb))
                }
                (None, None) => unreachable!(),
            };
            if pick.1 > 0 {
                out.push(pick);
            }
        }
        Monomial(out)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        self.merge(other, |a, b| a + b)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        self.merge(other, |a, b| a.max(b))
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().all(|(v, e)| other.exponent(v) >= *e)
    }

    /// `other / self` when `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        Some(other.merge(self, |a, b| a - b))
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().all(|(v, _)| other.exponent(v) == 0)
    }

    pub fn without(&self, v: &Var) -> Monomial {
        Monomial(self.0.iter().filter(|(w, _)| w != v).cloned().collect())
    }

    pub fn rename(&self, f: &impl Fn(&Var) -> Var) -> Monomial {
        Monomial::from_exponents(self.0.iter().map(|(v, e)| (f(v), *e)))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        Polynomial::constant(rat(n))
    }

    pub fn var(name: &str) -> Self {
        Polynomial::term(Rational::one(), Monomial::var(Var::new(name)))
    }

    pub fn from_var(v: Var) -> Self {
        Polynomial::term(Rational::one(), Monomial::var(v))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Polynomial::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(self.coefficient(&Monomial::one()))
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn add_scaled(&mut self, other: &Polynomial, scale: &Rational, shift: &Monomial) {
        for (m, c) in &other.terms {
            self.add_term(m.mul(shift), c * scale);
        }
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_term(&self, c: &Rational, m: &Monomial) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.mul(m), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, mut exp: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, v: &Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.vars().cloned())
            .collect()
    }

    pub fn eval(&self, assignment: &HashMap<Var, Rational>) -> Result<Rational, PolyError> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut value = c.clone();
            for (v, e) in m.factors() {
                let x = assignment
                    .get(v)
                    .ok_or_else(|| PolyError::MissingVariable(v.name().to_string()))?;
                value *= num_traits::pow(x.clone(), *e as usize);
            }
            total += value;
        }
        Ok(total)
    }

    /// Replace every occurrence of `var` by `q`.
    pub fn substitute(&self, var: &Var, q: &Polynomial) -> Polynomial {
        let mut powers: Vec<Polynomial> = vec![Polynomial::one()];
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(var) as usize;
            if e == 0 {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            while powers.len() <= e {
                let next = &powers[powers.len() - 1] * q;
                powers.push(next);
            }
            out.add_scaled(&powers[e], c, &m.without(var));
        }
        out
    }

    /// Simultaneous substitution; variables not in `map` are kept.
    pub fn substitute_all(&self, map: &HashMap<Var, Polynomial>) -> Polynomial {
        let mut cache: HashMap<(Var, u32), Polynomial> = HashMap::new();
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut factor = Polynomial::constant(c.clone());
            for (v, e) in m.factors() {
                match map.get(v) {
                    Some(q) => {
                        let p = cache
                            .entry((v.clone(), *e))
                            .or_insert_with(|| q.pow(*e))
                            .clone();
                        factor = &factor * &p;
                    }
                    None => kept.push((v.clone(), *e)),
                }
            }
            out.add_scaled(&factor, &Rational::one(), &Monomial(kept));
        }
        out
    }

    pub fn rename(&self, f: impl Fn(&Var) -> Var) -> Polynomial {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| (m.rename(&f), c.clone())))
    }

    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| order.compare(a.0, b.0))
    }

    pub fn leading_monomial(&self, order: &MonomialOrder) -> Option<&Monomial> {
        self.leading_term(order).map(|(m, _)| m)
    }

    /// Terms sorted in descending `order`.
    pub fn sorted_terms(&self, order: &MonomialOrder) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| order.compare(b.0, a.0));
        v
    }

    /// Scale to integer coefficients with gcd 1 and positive leading coefficient.
    pub fn primitive(&self, order: &MonomialOrder) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut denom_lcm = BigInt::one();
        let mut numer_gcd = BigInt::zero();
        for c in self.terms.values() {
            denom_lcm = denom_lcm.lcm(c.denom());
            numer_gcd = numer_gcd.gcd(c.numer());
        }
        let lead_negative = self
            .leading_term(order)
            .map(|(_, c)| c.is_negative())
            .unwrap_or(false);
        let mut factor = Rational::new(denom_lcm, numer_gcd);
        if lead_negative {
            factor = -factor;
        }
        self.scale(&factor)
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self, order: &MonomialOrder) -> Polynomial {
        match self.leading_term(order) {
            Some((_, c)) => self.scale(&c.recip()),
            None => Polynomial::zero(),
        }
    }

    /// Deterministic rendering with terms in descending `order`.
    pub fn to_text(&self, order: &MonomialOrder) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.sorted_terms(order).into_iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let unit = abs.is_one();
            if m.is_one() {
                out.push_str(&abs.to_string());
            } else {
                if !unit {
                    out.push_str(&abs.to_string());
                    out.push('*');
                }
                out.push_str(&format!("{m:?}"));
            }
        }
        out
    }
}

/// Canonical text under `order`; parses back to an equal polynomial.
pub fn canonical_text(p: &Polynomial, order: &MonomialOrder) -> String {
    p.to_text(order)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(&MonomialOrder::default()))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        let (big, small) = if self.terms.len() >= rhs.terms.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &'a Polynomial) -> Polynomial {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// Arithmetic selector used by generic callers of [`poly_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
    Sub,
}

/// `neg` ignores `b`.
pub fn poly_arith(op: ArithOp, a: &Polynomial, b: &Polynomial) -> Polynomial {
    match op {
        ArithOp::Add => a + b,
        ArithOp::Mul => a * b,
        ArithOp::Neg => -a,
        ArithOp::Sub => a - b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        parse_polynomial(s).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(&p("2 + x") + &Polynomial::zero(), p("2 + x"));
        assert_eq!(&p("2 + x") * &p("2 + x"), p("x^2 + 4*x + 4"));
        let q = p("3*x*y - 1/2*y^2 + 7");
        assert!((&q - &q).is_zero());
        assert_eq!(poly_arith(ArithOp::Neg, &q, &Polynomial::zero()), -&q);
    }

    #[test]
    fn eval_examples() {
        let mut env = HashMap::new();
        env.insert(Var::new("x"), rat(0));
        assert_eq!(p("2 + x").eval(&env).unwrap(), rat(2));
        env.insert(Var::new("x"), rat(2));
        assert_eq!(p("(x - 1)*(x - 3)").eval(&env).unwrap(), rat(-1));
        assert_eq!(Polynomial::zero().eval(&HashMap::new()).unwrap(), rat(0));
        assert_eq!(
            p("x + y").eval(&env),
            Err(PolyError::MissingVariable("y".into()))
        );
    }

    #[test]
    fn substitute_examples() {
        let y = Var::new("y");
        let x = Var::new("x");
        assert_eq!(p("2 + x*y").substitute(&y, &Polynomial::zero()), p("2"));
        assert_eq!(p("x^2").substitute(&x, &p("x + 1")), p("x^2 + 2*x + 1"));
        let q = p("x^3*y - 2*x + 5");
        assert_eq!(q.substitute(&x, &Polynomial::var("x")), q);
    }

    #[test]
    fn canonical_text_examples() {
        let order = MonomialOrder::degrevlex();
        assert_eq!(canonical_text(&Polynomial::zero(), &order), "0");
        assert_eq!(canonical_text(&p("4 + x^2 + 4*x"), &order), "x^2 + 4*x + 4");
        assert_eq!(canonical_text(&p("1/2 - x*y"), &order), "-x*y + 1/2");
        assert_eq!(canonical_text(&p("-3*x^2*y + 2/3*z"), &order), "-3*x^2*y + 2/3*z");
    }

    #[test]
    fn primitive_clears_denominators() {
        let order = MonomialOrder::degrevlex();
        assert_eq!(p("-1/2*x + 1/3").primitive(&order), p("3*x - 2"));
        assert_eq!(p("4*x + 6").primitive(&order), p("2*x + 3"));
    }

    #[test]
    fn monomial_division() {
        let a = Monomial::from_exponents([(Var::new("x"), 2), (Var::new("y"), 1)]);
        let b = Monomial::from_exponents([(Var::new("x"), 1)]);
        assert!(b.divides(&a));
        assert!(!a.divides(&b));
        assert_eq!(
            b.quotient_of(&a).unwrap(),
            Monomial::from_exponents([(Var::new("x"), 1), (Var::new("y"), 1)])
        );
        assert_eq!(a.lcm(&b), a);
    }
}
