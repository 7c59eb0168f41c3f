//! Buchberger's algorithm, multivariate division and ideal membership.

use std::fmt;

use thiserror::Error;

use crate::poly::{Monomial, MonomialOrder, Polynomial, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroebnerError {
    #[error("resource exhausted after {pairs} S-pairs (largest degree seen {degree})")]
    ResourceExhausted { pairs: usize, degree: u32 },
}

/// Safety valve for basis computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroebnerLimits {
    pub max_pairs: usize,
    pub max_degree: u32,
}

impl GroebnerLimits {
    pub const UNLIMITED: GroebnerLimits = GroebnerLimits {
        max_pairs: usize::MAX,
        max_degree: u32::MAX,
    };
}

impl Default for GroebnerLimits {
    fn default() -> Self {
        GroebnerLimits {
            max_pairs: 5_000,
            max_degree: 40,
        }
    }
}

/// Finite generating set of an ideal, optionally known to be a Gröbner basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IdealBasis {
    generators: Vec<Polynomial>,
    order: MonomialOrder,
    is_groebner: bool,
}

impl IdealBasis {
    pub fn new(generators: Vec<Polynomial>, order: MonomialOrder) -> Self {
        let generators: Vec<Polynomial> =
            generators.into_iter().filter(|g| !g.is_zero()).collect();
        let is_groebner = generators.is_empty();
        IdealBasis {
            generators,
            order,
            is_groebner,
        }
    }

    pub fn zero(order: MonomialOrder) -> Self {
        IdealBasis::new(Vec::new(), order)
    }

    pub fn unit(order: MonomialOrder) -> Self {
        IdealBasis {
            generators: vec![Polynomial::one()],
            order,
            is_groebner: true,
        }
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn is_groebner(&self) -> bool {
        self.is_groebner
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.generators
            .iter()
            .any(|g| g.is_constant() && !g.is_zero())
    }

    /// Gröbner basis of the same ideal (a clone when already one).
    pub fn to_groebner(&self) -> IdealBasis {
        if self.is_groebner {
            self.clone()
        } else {
            buchberger(&self.generators, &self.order)
        }
    }

    pub fn to_groebner_with_limits(
        &self,
        limits: GroebnerLimits,
    ) -> Result<IdealBasis, GroebnerError> {
        if self.is_groebner {
            Ok(self.clone())
        } else {
            buchberger_with_limits(&self.generators, &self.order, limits)
        }
    }

    /// Membership test; the basis must already be a Gröbner basis.
    pub fn contains(&self, g: &Polynomial) -> bool {
        debug_assert!(self.is_groebner, "contains() needs a Gröbner basis");
        multivariate_reduce(g, self).is_zero()
    }
}

impl fmt::Debug for IdealBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self
            .generators
            .iter()
            .map(|g| g.to_text(&self.order))
            .collect();
        write!(f, "<{}> ({})", gens.join(", "), self.order)
    }
}

/// Quotients and remainder of dividing `g` by `divisors` (in list order).
pub fn divide(
    g: &Polynomial,
    divisors: &[Polynomial],
    order: &MonomialOrder,
) -> (Vec<Polynomial>, Polynomial) {
    let mut quotients = vec![Polynomial::zero(); divisors.len()];
    let rem = reduce_impl(g, divisors, order, Some(&mut quotients));
    (quotients, rem)
}

fn reduce_impl(
    g: &Polynomial,
    divisors: &[Polynomial],
    order: &MonomialOrder,
    mut quotients: Option<&mut Vec<Polynomial>>,
) -> Polynomial {
    let leads: Vec<(Monomial, Rational)> = divisors
        .iter()
        .map(|d| {
            let (m, c) = d.leading_term(order).expect("nonzero divisor");
            (m.clone(), c.clone())
        })
        .collect();
    let mut p = g.clone();
    let mut rem = Polynomial::zero();
    while let Some((lm, lc)) = p.leading_term(order).map(|(m, c)| (m.clone(), c.clone())) {
        let hit = leads
            .iter()
            .enumerate()
            .find_map(|(i, (dm, dc))| dm.quotient_of(&lm).map(|q| (i, q, &lc / dc)));
        match hit {
            Some((i, shift, coeff)) => {
                p = &p - &divisors[i].mul_term(&coeff, &shift);
                if let Some(qs) = quotients.as_deref_mut() {
                    qs[i].add_term(shift, coeff);
                }
            }
            None => {
                rem.add_term(lm.clone(), lc.clone());
                p.add_term(lm, -lc);
            }
        }
    }
    rem
}

/// Full remainder of `g` modulo the generators of `basis`.
pub fn multivariate_reduce(g: &Polynomial, basis: &IdealBasis) -> Polynomial {
    if basis.generators.is_empty() || g.is_zero() {
        return g.clone();
    }
    reduce_impl(g, &basis.generators, &basis.order, None)
}

pub fn s_polynomial(f: &Polynomial, g: &Polynomial, order: &MonomialOrder) -> Polynomial {
    let (fm, fc) = f.leading_term(order).expect("nonzero");
    let (gm, gc) = g.leading_term(order).expect("nonzero");
    let l = fm.lcm(gm);
    let a = fm.quotient_of(&l).expect("lcm");
    let b = gm.quotient_of(&l).expect("lcm");
    &f.mul_term(&fc.recip(), &a) - &g.mul_term(&gc.recip(), &b)
}

/// Basis element with an optional representation in the input generators.
#[derive(Clone)]
struct Tracked {
    poly: Polynomial,
    rep: Option<Vec<Polynomial>>,
}

fn combine_reps(
    target: &mut Option<Vec<Polynomial>>,
    other: &Option<Vec<Polynomial>>,
    coeff: &Rational,
    shift: &Monomial,
) {
    if let (Some(t), Some(o)) = (target.as_mut(), other.as_ref()) {
        for (ti, oi) in t.iter_mut().zip(o) {
            *ti = &*ti + &oi.mul_term(coeff, shift);
        }
    }
}

fn scale_rep(rep: &mut Option<Vec<Polynomial>>, factor: &Rational) {
    if let Some(r) = rep.as_mut() {
        for p in r.iter_mut() {
            *p = p.scale(factor);
        }
    }
}

/// Reduce `t` by `basis` (skipping index `skip`), tracking representations.
fn tracked_reduce(
    t: &Tracked,
    basis: &[Tracked],
    skip: Option<usize>,
    order: &MonomialOrder,
) -> Tracked {
    let leads: Vec<Option<(Monomial, Rational)>> = basis
        .iter()
        .enumerate()
        .map(|(i, b)| {
            if Some(i) == skip {
                None
            } else {
                b.poly
                    .leading_term(order)
                    .map(|(m, c)| (m.clone(), c.clone()))
            }
        })
        .collect();
    let mut p = t.poly.clone();
    let mut rep = t.rep.clone();
    let mut rem = Polynomial::zero();
    while let Some((lm, lc)) = p.leading_term(order).map(|(m, c)| (m.clone(), c.clone())) {
        let hit = leads.iter().enumerate().find_map(|(i, lead)| {
            lead.as_ref()
                .and_then(|(dm, dc)| dm.quotient_of(&lm).map(|q| (i, q, &lc / dc)))
        });
        match hit {
            Some((i, shift, coeff)) => {
                p = &p - &basis[i].poly.mul_term(&coeff, &shift);
                combine_reps(&mut rep, &basis[i].rep, &-coeff, &shift);
            }
            None => {
                rem.add_term(lm.clone(), lc.clone());
                p.add_term(lm, -lc);
            }
        }
    }
    Tracked { poly: rem, rep }
}

fn make_primitive(t: &mut Tracked, order: &MonomialOrder) {
    if t.poly.is_zero() {
        return;
    }
    let prim = t.poly.primitive(order);
    let (m, c) = t.poly.leading_term(order).expect("nonzero");
    let factor = prim.coefficient(m) / c;
    t.poly = prim;
    scale_rep(&mut t.rep, &factor);
}

fn run_buchberger(
    generators: &[Polynomial],
    order: &MonomialOrder,
    limits: GroebnerLimits,
    track: bool,
) -> Result<Vec<Tracked>, GroebnerError> {
    let n = generators.len();
    let mut basis: Vec<Tracked> = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let rep = track.then(|| {
            (0..n)
                .map(|k| if k == i { Polynomial::one() } else { Polynomial::zero() })
                .collect()
        });
        let mut t = Tracked {
            poly: g.clone(),
            rep,
        };
        make_primitive(&mut t, order);
        basis.push(t);
    }
    let mut leads: Vec<Monomial> = basis
        .iter()
        .map(|t| t.poly.leading_monomial(order).unwrap().clone())
        .collect();
    let mut pending: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pending.push((i, j));
        }
    }
    let mut done: std::collections::HashSet<(usize, usize)> = Default::default();
    let mut processed = 0usize;
    let mut max_degree = basis
        .iter()
        .filter_map(|t| t.poly.total_degree())
        .max()
        .unwrap_or(0);

    while !pending.is_empty() {
        if basis.iter().any(|t| t.poly.is_constant()) {
            break;
        }
        // Normal strategy: smallest lcm first.
        let (idx, _) = pending
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let la = leads[a.0].lcm(&leads[a.1]);
                let lb = leads[b.0].lcm(&leads[b.1]);
                order.compare(&la, &lb).then(a.cmp(b))
            })
            .unwrap();
        let (i, j) = pending.swap_remove(idx);
        done.insert((i, j));
        if leads[i].is_coprime(&leads[j]) {
            continue;
        }
        let l = leads[i].lcm(&leads[j]);
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && leads[k].divides(&l)
                && done.contains(&(i.min(k), i.max(k)))
                && done.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        processed += 1;
        if processed > limits.max_pairs {
            return Err(GroebnerError::ResourceExhausted {
                pairs: processed,
                degree: max_degree,
            });
        }
        let (fi, ci) = {
            let (m, c) = basis[i].poly.leading_term(order).unwrap();
            (m.quotient_of(&l).unwrap(), c.recip())
        };
        let (fj, cj) = {
            let (m, c) = basis[j].poly.leading_term(order).unwrap();
            (m.quotient_of(&l).unwrap(), c.recip())
        };
        let spoly = &basis[i].poly.mul_term(&ci, &fi) - &basis[j].poly.mul_term(&cj, &fj);
        let mut rep = if track {
            Some(vec![Polynomial::zero(); n])
        } else {
            None
        };
        combine_reps(&mut rep, &basis[i].rep, &ci, &fi);
        combine_reps(&mut rep, &basis[j].rep, &-cj, &fj);
        let s = Tracked { poly: spoly, rep };
        let mut r = tracked_reduce(&s, &basis, None, order);
        if r.poly.is_zero() {
            continue;
        }
        make_primitive(&mut r, order);
        let deg = r.poly.total_degree().unwrap_or(0);
        max_degree = max_degree.max(deg);
        if deg > limits.max_degree {
            return Err(GroebnerError::ResourceExhausted {
                pairs: processed,
                degree: deg,
            });
        }
        let new_index = basis.len();
        leads.push(r.poly.leading_monomial(order).unwrap().clone());
        basis.push(r);
        for k in 0..new_index {
            pending.push((k, new_index));
        }
    }
    Ok(finalize(basis, order))
}

/// Minimal, interreduced, primitive basis.
fn finalize(basis: Vec<Tracked>, order: &MonomialOrder) -> Vec<Tracked> {
    if let Some(unit) = basis.iter().find(|t| t.poly.is_constant() && !t.poly.is_zero()) {
        let mut t = unit.clone();
        let c = t.poly.constant_value().unwrap();
        t.poly = Polynomial::one();
        scale_rep(&mut t.rep, &c.recip());
        return vec![t];
    }
    let mut minimal: Vec<Tracked> = Vec::new();
    let mut sorted = basis;
    sorted.sort_by(|a, b| {
        order.compare(
            a.poly.leading_monomial(order).unwrap(),
            b.poly.leading_monomial(order).unwrap(),
        )
    });
    for t in sorted {
        let lm = t.poly.leading_monomial(order).unwrap();
        if minimal
            .iter()
            .any(|m| m.poly.leading_monomial(order).unwrap().divides(lm))
        {
            continue;
        }
        minimal.push(t);
    }
    for i in 0..minimal.len() {
        let mut r = tracked_reduce(&minimal[i], &minimal, Some(i), order);
        make_primitive(&mut r, order);
        minimal[i] = r;
    }
    minimal.sort_by(|a, b| {
        order.compare(
            b.poly.leading_monomial(order).unwrap(),
            a.poly.leading_monomial(order).unwrap(),
        )
    });
    minimal
}

/// Reduced Gröbner basis of the ideal generated by `generators`.
pub fn buchberger(generators: &[Polynomial], order: &MonomialOrder) -> IdealBasis {
    buchberger_with_limits(generators, order, GroebnerLimits::UNLIMITED)
        .expect("unlimited computation cannot exhaust")
}

pub fn buchberger_with_limits(
    generators: &[Polynomial],
    order: &MonomialOrder,
    limits: GroebnerLimits,
) -> Result<IdealBasis, GroebnerError> {
    let basis = run_buchberger(generators, order, limits, false)?;
    Ok(IdealBasis {
        generators: basis.into_iter().map(|t| t.poly).collect(),
        order: order.clone(),
        is_groebner: true,
    })
}

/// True iff `g` lies in the ideal generated by `basis`.
pub fn ideal_member(g: &Polynomial, basis: &IdealBasis) -> bool {
    if g.is_zero() {
        return true;
    }
    if basis.is_groebner {
        basis.contains(g)
    } else {
        basis.to_groebner().contains(g)
    }
}

/// Gröbner basis of the sum of two ideals. Uses the order of `a`.
pub fn ideal_sum_basis(a: &IdealBasis, b: &IdealBasis) -> IdealBasis {
    let gens: Vec<Polynomial> = a
        .generators
        .iter()
        .chain(b.generators.iter())
        .cloned()
        .collect();
    buchberger(&gens, &a.order)
}

/// Cofactors `c` with `g = sum c[i] * generators[i]`, or `None` when `g` is
/// not in the ideal.
pub fn membership_certificate(
    g: &Polynomial,
    generators: &[Polynomial],
    order: &MonomialOrder,
) -> Option<Vec<Polynomial>> {
    if g.is_zero() {
        return Some(vec![Polynomial::zero(); generators.len()]);
    }
    let basis = run_buchberger(generators, order, GroebnerLimits::UNLIMITED, true)
        .expect("unlimited computation cannot exhaust");
    let start = Tracked {
        poly: g.clone(),
        rep: Some(vec![Polynomial::zero(); generators.len()]),
    };
    let r = tracked_reduce(&start, &basis, None, order);
    if !r.poly.is_zero() {
        return None;
    }
    // r.rep holds -(sum of quotient combinations); g = -rep . generators.
    r.rep.map(|rep| rep.into_iter().map(|p| -p).collect())
}

/// Interreduction check: no generator's leading monomial divides another's.
pub fn is_interreduced(basis: &IdealBasis) -> bool {
    let leads: Vec<&Monomial> = basis
        .generators
        .iter()
        .map(|g| g.leading_monomial(&basis.order).unwrap())
        .collect();
    for (i, a) in leads.iter().enumerate() {
        for (j, b) in leads.iter().enumerate() {
            if i != j && a.divides(b) {
                return false;
            }
        }
    }
    true
}

/// Every S-polynomial of the basis reduces to zero.
pub fn s_pairs_reduce_to_zero(basis: &IdealBasis) -> bool {
    let gens = &basis.generators;
    for j in 0..gens.len() {
        for i in 0..j {
            let s = s_polynomial(&gens[i], &gens[j], &basis.order);
            if !multivariate_reduce(&s, basis).is_zero() {
                return false;
            }
        }
    }
    true
}
