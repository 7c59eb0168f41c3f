use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::linalg::Echelon;
use super::CheckerError;
use crate::algebra::{PolyAlgebra, Term, TermVar};
use crate::automata::RegisterAutomaton;
use crate::groebner::{buchberger_with_limits, GroebnerLimits, IdealBasis};
use crate::poly::{Monomial, MonomialOrder, Polynomial, Rational, Var};

pub fn term_var(v: TermVar) -> Var {
    if v.arg == 0 {
        Var::register(v.reg)
    } else {
        Var::arg_register(v.reg, v.arg)
    }
}

/// The polynomial over `x` and the register variables denoted by `t`.
pub fn term_polynomial(t: &Term<Polynomial>) -> Result<Polynomial, CheckerError> {
    Ok(match t {
        Term::Var(v) => Polynomial::from_var(term_var(*v)),
        Term::Const(c) => c.clone(),
        Term::Op(name, args) => {
            let a = args.iter().map(term_polynomial).collect::<Result<Vec<_>, _>>()?;
            match (name.as_str(), a.as_slice()) {
                ("add", [p, q]) => p + q,
                ("sub", [p, q]) => p - q,
                ("mul", [p, q]) => p * q,
                ("neg", [p]) => -p,
                _ => return Err(CheckerError::Unsupported(format!("operation {name} in ideal search"))),
            }
        }
    })
}

/// Map from states to generators of an ideal of `Q[x, r1..rn]`. States
/// without an entry carry the zero ideal.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdealFamily {
    pub bases: BTreeMap<usize, Vec<Polynomial>>,
}

impl IdealFamily {
    pub fn zero() -> Self {
        IdealFamily::default()
    }

    pub fn generators(&self, q: usize) -> &[Polynomial] {
        self.bases.get(&q).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn insert(&mut self, q: usize, gens: Vec<Polynomial>) {
        let gens: Vec<Polynomial> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        if gens.is_empty() {
            self.bases.remove(&q);
        } else {
            self.bases.insert(q, gens);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn generator_count(&self) -> usize {
        self.bases.values().map(Vec::len).sum()
    }

    /// One line per state with a nonzero ideal, using state names.
    pub fn describe(&self, states: &[String]) -> Vec<String> {
        let order = MonomialOrder::degrevlex();
        self.bases
            .iter()
            .map(|(q, gens)| {
                let g: Vec<String> = gens.iter().map(|p| p.to_text(&order)).collect();
                format!("{}: <{}>", states[*q], g.join(", "))
            })
            .collect()
    }
}

impl fmt::Display for IdealFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bases.is_empty() {
            return write!(f, "zero family");
        }
        let order = MonomialOrder::degrevlex();
        let parts: Vec<String> = self
            .bases
            .iter()
            .map(|(q, gens)| {
                let g: Vec<String> = gens.iter().map(|p| p.to_text(&order)).collect();
                format!("{q}: <{}>", g.join(", "))
            })
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Polynomial views of an automaton over `Q[x]`, for checking families.
pub struct FamilyChecker<'a> {
    m: &'a RegisterAutomaton<PolyAlgebra>,
    updates: Vec<Vec<Polynomial>>,
    outputs: BTreeMap<usize, Polynomial>,
    reachable: BTreeSet<usize>,
    order: MonomialOrder,
    limits: GroebnerLimits,
}

impl<'a> FamilyChecker<'a> {
    pub fn new(m: &'a RegisterAutomaton<PolyAlgebra>) -> Result<Self, CheckerError> {
        if m.algebra().substitution {
            return Err(CheckerError::Unsupported("substitution in ideal search".into()));
        }
        let updates = m
            .rules()
            .iter()
            .map(|r| r.update.iter().map(term_polynomial).collect())
            .collect::<Result<Vec<_>, _>>()?;
        let outputs = m
            .outputs()
            .iter()
            .map(|(q, t)| Ok((*q, term_polynomial(t)?)))
            .collect::<Result<_, CheckerError>>()?;
        Ok(FamilyChecker {
            m,
            updates,
            outputs,
            reachable: m.reachable_states(),
            order: MonomialOrder::degrevlex(),
            limits: GroebnerLimits::default(),
        })
    }

    pub fn with_limits(mut self, limits: GroebnerLimits) -> Self {
        self.limits = limits;
        self
    }

    pub fn automaton(&self) -> &RegisterAutomaton<PolyAlgebra> {
        self.m
    }

    pub fn reachable(&self) -> &BTreeSet<usize> {
        &self.reachable
    }

    fn basis(&self, gens: Vec<Polynomial>) -> Option<IdealBasis> {
        if gens.is_empty() {
            return Some(IdealBasis::zero(self.order.clone()));
        }
        buchberger_with_limits(&gens, &self.order, self.limits).ok()
    }

    fn source_basis(&self, fam: &IdealFamily, sources: &[usize]) -> Option<IdealBasis> {
        let mut gens = Vec::new();
        for (i, q) in sources.iter().enumerate() {
            let n = self.m.registers();
            let rename: HashMap<Var, Var> =
                (1..=n).map(|j| (Var::register(j), Var::arg_register(j, i + 1))).collect();
            for g in fam.generators(*q) {
                gens.push(g.rename(|v| rename.get(v).cloned().unwrap_or_else(|| v.clone())));
            }
        }
        self.basis(gens)
    }

    fn compose(&self, g: &Polynomial, rule: usize) -> Polynomial {
        let map: HashMap<Var, Polynomial> = self.updates[rule]
            .iter()
            .enumerate()
            .map(|(j, p)| (Var::register(j + 1), p.clone()))
            .collect();
        g.substitute_all(&map)
    }

    /// Generators `(state, index)` of `fam` that are not preserved by some
    /// rule. `None` if a basis computation ran out of resources.
    pub fn failing_generators(&self, fam: &IdealFamily) -> Option<BTreeSet<(usize, usize)>> {
        let mut failing = BTreeSet::new();
        let mut cache: HashMap<Vec<usize>, IdealBasis> = HashMap::new();
        for (ri, rule) in self.m.rules().iter().enumerate() {
            if !rule.sources.iter().all(|s| self.reachable.contains(s)) {
                continue;
            }
            let gens = fam.generators(rule.target);
            if gens.is_empty() {
                continue;
            }
            if !cache.contains_key(&rule.sources) {
                let b = self.source_basis(fam, &rule.sources)?;
                cache.insert(rule.sources.clone(), b);
            }
            let basis = &cache[&rule.sources];
            for (gi, g) in gens.iter().enumerate() {
                if failing.contains(&(rule.target, gi)) {
                    continue;
                }
                let composed = self.compose(g, ri);
                let ok = if basis.is_zero_ideal() {
                    composed.is_zero()
                } else {
                    basis.contains(&composed)
                };
                if !ok {
                    failing.insert((rule.target, gi));
                }
            }
        }
        Some(failing)
    }

    /// Every output polynomial lies in its state's ideal.
    pub fn outputs_in(&self, fam: &IdealFamily) -> Option<bool> {
        for (q, out) in &self.outputs {
            if !self.reachable.contains(q) || out.is_zero() {
                continue;
            }
            let gens = fam.generators(*q).to_vec();
            if gens.is_empty() {
                return Some(false);
            }
            if !self.basis(gens)?.contains(out) {
                return Some(false);
            }
        }
        Some(true)
    }

    /// Inductive family whose ideals contain the outputs; a certificate of
    /// zeroness. Resource exhaustion counts as failure.
    pub fn verify(&self, fam: &IdealFamily) -> bool {
        matches!(self.failing_generators(fam), Some(f) if f.is_empty())
            && self.outputs_in(fam) == Some(true)
    }

    /// Greatest inductive subfamily of `candidates`, if it proves zeroness.
    pub fn houdini(&self, candidates: IdealFamily, max_rounds: usize) -> Option<IdealFamily> {
        let mut fam = candidates;
        for _ in 0..max_rounds {
            let failing = self.failing_generators(&fam)?;
            if failing.is_empty() {
                return (self.outputs_in(&fam)? ).then_some(fam);
            }
            let mut next = IdealFamily::zero();
            for (q, gens) in &fam.bases {
                let kept = gens
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !failing.contains(&(*q, *i)))
                    .map(|(_, g)| g.clone())
                    .collect();
                next.insert(*q, kept);
            }
            fam = next;
        }
        None
    }
}

pub fn verify_ideal_family(m: &RegisterAutomaton<PolyAlgebra>, fam: &IdealFamily) -> Result<bool, CheckerError> {
    Ok(FamilyChecker::new(m)?.verify(fam))
}

/// Monomials in `x, r1..rn` of total degree at most `d`, smallest first.
pub fn template_monomials(registers: usize, d: u32) -> Vec<Monomial> {
    let mut vars = vec![Var::new("x")];
    vars.extend((1..=registers).map(Var::register));
    let mut out = vec![Monomial::one()];
    let mut frontier = vec![(Monomial::one(), 0usize)];
    for _ in 0..d {
        let mut next = Vec::new();
        for (m, start) in &frontier {
            for (i, v) in vars.iter().enumerate().skip(*start) {
                let m2 = m.mul(&Monomial::var(v.clone()));
                out.push(m2.clone());
                next.push((m2, i));
            }
        }
        frontier = next;
    }
    out
}

fn monomial_value(m: &Monomial, regs: &[Polynomial], powers: &mut HashMap<(usize, u32), Polynomial>) -> Polynomial {
    let mut acc = Polynomial::one();
    for (v, e) in m.factors() {
        let name = v.name();
        if name == "x" {
            acc = &acc * &Polynomial::var("x").pow(*e);
            continue;
        }
        let j: usize = name[1..].parse().expect("template register");
        let p = powers
            .entry((j, *e))
            .or_insert_with(|| regs[j - 1].pow(*e));
        acc = &acc * p;
    }
    acc
}

/// Polynomials of degree `<= d` vanishing on every sample, as a basis of
/// the null space of the evaluation matrix.
pub fn vanishing_polynomials(registers: usize, d: u32, samples: &[&[Polynomial]]) -> Vec<Polynomial> {
    let monos = template_monomials(registers, d);
    let x = Var::new("x");
    let mut ech = Echelon::new(monos.len());
    for regs in samples {
        let mut powers = HashMap::new();
        let vals: Vec<Polynomial> = monos.iter().map(|m| monomial_value(m, regs, &mut powers)).collect();
        let top = vals.iter().map(|v| v.degree_in(&x)).max().unwrap_or(0);
        for k in 0..=top {
            let xm = Monomial::power(x.clone(), k);
            let row: Vec<Rational> = vals.iter().map(|v| v.coefficient(&xm)).collect();
            if row.iter().any(|c| !c.is_zero()) {
                ech.add_row(row);
            }
        }
        if ech.is_full() {
            return Vec::new();
        }
    }
    let order = MonomialOrder::degrevlex();
    ech.null_space()
        .into_iter()
        .map(|v| {
            Polynomial::from_terms(monos.iter().cloned().zip(v).filter(|(_, c)| !c.is_zero()))
                .primitive(&order)
        })
        .collect()
}

fn grid_coefficients(h: i64) -> Vec<Rational> {
    let mut seen = BTreeSet::new();
    for p in 1..=h {
        for q in 1..=h {
            let r = Rational::new(BigInt::from(p), BigInt::from(q));
            seen.insert(r.clone());
            seen.insert(-r);
        }
    }
    seen.into_iter().collect()
}

/// Polynomials with at most two monomials of degree `<= d`, the first
/// coefficient 1 and the second of height at most `h`.
pub fn grid_candidates(registers: usize, d: u32, h: i64) -> Vec<Polynomial> {
    let monos = template_monomials(registers, d);
    let coefs = grid_coefficients(h.max(1));
    let mut out = Vec::new();
    for (i, a) in monos.iter().enumerate() {
        if a.is_one() {
            continue;
        }
        out.push(Polynomial::term(Rational::one(), a.clone()));
        for b in &monos[..i] {
            for c in &coefs {
                out.push(Polynomial::from_terms([(a.clone(), Rational::one()), (b.clone(), c.clone())]));
            }
        }
    }
    out
}

/// Value of `g` on a register vector: a polynomial in `x`.
pub fn evaluate_on(g: &Polynomial, regs: &[Polynomial]) -> Polynomial {
    let map: HashMap<Var, Polynomial> =
        regs.iter().enumerate().map(|(j, p)| (Var::register(j + 1), p.clone())).collect();
    g.substitute_all(&map)
}

/// Enumeration of ideal families in rounds of growing degree and height:
/// the zero family first, then all choices of at most `max_generators`
/// grid polynomials per state. Each family is produced once.
pub struct FamilyEnumerator {
    states: Vec<usize>,
    registers: usize,
    max_degree: u32,
    max_height: i64,
    max_generators: usize,
    round: u32,
    last: Option<(u32, i64)>,
    previous: HashSet<Polynomial>,
    choices: Vec<Vec<usize>>,
    candidates: Vec<Polynomial>,
    odometer: Option<Vec<usize>>,
    emitted_zero: bool,
}

impl FamilyEnumerator {
    pub fn new(states: Vec<usize>, registers: usize, max_degree: u32, max_height: i64, max_generators: usize) -> Self {
        FamilyEnumerator {
            states,
            registers,
            max_degree,
            max_height,
            max_generators: max_generators.max(1),
            round: 0,
            last: None,
            previous: HashSet::new(),
            choices: Vec::new(),
            candidates: Vec::new(),
            odometer: None,
            emitted_zero: false,
        }
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    fn start_round(&mut self) -> bool {
        self.round += 1;
        let d = self.round.min(self.max_degree);
        let h = (self.round as i64).min(self.max_height);
        if self.last == Some((d, h)) || self.states.is_empty() {
            return false;
        }
        self.last = Some((d, h));
        self.previous.extend(self.candidates.drain(..));
        self.candidates = grid_candidates(self.registers, d, h);
        // subsets of candidate indices, smallest first
        let n = self.candidates.len();
        let mut subsets: Vec<Vec<usize>> = vec![Vec::new()];
        let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..self.max_generators {
            let mut next = Vec::new();
            for s in &frontier {
                let from = s.last().map_or(0, |l| l + 1);
                for i in from..n {
                    let mut t = s.clone();
                    t.push(i);
                    next.push(t);
                }
            }
            subsets.extend(next.iter().cloned());
            frontier = next;
        }
        self.choices = subsets;
        self.odometer = Some(vec![0; self.states.len()]);
        true
    }

    fn step_odometer(&mut self) {
        let len = self.choices.len();
        if let Some(od) = self.odometer.as_mut() {
            for d in od.iter_mut() {
                *d += 1;
                if *d < len {
                    return;
                }
                *d = 0;
            }
            self.odometer = None;
        }
    }
}

impl Iterator for FamilyEnumerator {
    type Item = IdealFamily;

    fn next(&mut self) -> Option<IdealFamily> {
        if !self.emitted_zero {
            self.emitted_zero = true;
            return Some(IdealFamily::zero());
        }
        loop {
            let Some(od) = self.odometer.clone() else {
                if !self.start_round() {
                    return None;
                }
                continue;
            };
            self.step_odometer();
            let mut fam = IdealFamily::zero();
            let mut fresh = false;
            for (q, c) in self.states.iter().zip(&od) {
                let gens: Vec<Polynomial> =
                    self.choices[*c].iter().map(|&i| self.candidates[i].clone()).collect();
                fresh |= gens.iter().any(|g| !self.previous.contains(g));
                fam.insert(*q, gens);
            }
            if fresh {
                return Some(fam);
            }
        }
    }
}

pub fn enumerate_ideal_families(
    m: &RegisterAutomaton<PolyAlgebra>,
    max_degree: u32,
    max_height: i64,
    max_generators: usize,
) -> FamilyEnumerator {
    FamilyEnumerator::new(
        m.reachable_states().into_iter().collect(),
        m.registers(),
        max_degree,
        max_height,
        max_generators,
    )
}

/// Candidate generators for one state: the null space basis of the
/// samples plus grid polynomials that vanish on every sample.
pub fn state_candidates(
    registers: usize,
    d: u32,
    h: i64,
    samples: &[&[Polynomial]],
    grid_cap: usize,
) -> Vec<Polynomial> {
    let mut out = vanishing_polynomials(registers, d, samples);
    if out.is_empty() {
        return out;
    }
    let order = MonomialOrder::degrevlex();
    let mut seen: HashSet<Polynomial> = out.iter().map(|p| p.monic(&order)).collect();
    let mut added = 0;
    for g in grid_candidates(registers, d, h) {
        if added >= grid_cap {
            break;
        }
        if samples.iter().all(|regs| evaluate_on(&g, regs).is_zero()) && seen.insert(g.monic(&order)) {
            out.push(g.primitive(&order));
            added += 1;
        }
    }
    // short generators first keeps the bases small
    out.sort_by_key(|p| (p.num_terms(), p.total_degree().unwrap_or(0)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_term;
    use crate::poly::parse_polynomial;
    use crate::tree::Signature;

    fn poly(s: &str) -> Polynomial {
        parse_polynomial(s).unwrap()
    }

    fn one_register(update: &str, output: &str) -> RegisterAutomaton<PolyAlgebra> {
        let alg = PolyAlgebra::new();
        let sig = Signature::new(&[("e", 0), ("s", 1)]);
        let mut m = RegisterAutomaton::new(alg.clone(), sig, 1);
        m.add_state("q");
        m.add_rule("e", &[], "q", vec![parse_term(&alg, "1").unwrap()]).unwrap();
        m.add_rule("s", &["q"], "q", vec![parse_term(&alg, update).unwrap()]).unwrap();
        m.set_output("q", parse_term(&alg, output).unwrap()).unwrap();
        m
    }

    #[test]
    fn template_counts() {
        // C(n + 1 + d, d)
        assert_eq!(template_monomials(1, 1).len(), 3);
        assert_eq!(template_monomials(2, 2).len(), 10);
        assert_eq!(template_monomials(4, 3).len(), 56);
    }

    #[test]
    fn term_polynomial_names_registers() {
        let alg = PolyAlgebra::new();
        let t = parse_term(&alg, "r1.2 * x - r3").unwrap();
        assert_eq!(term_polynomial(&t).unwrap(), poly("r1.2*x - r3"));
    }

    #[test]
    fn verifies_invariant() {
        // r stays 1; output r - 1 vanishes
        let m = one_register("r1.1 * r1.1", "r1 - 1");
        let mut fam = IdealFamily::zero();
        fam.insert(0, vec![poly("r1 - 1")]);
        assert!(verify_ideal_family(&m, &fam).unwrap());
        assert!(!verify_ideal_family(&m, &IdealFamily::zero()).unwrap());
        let mut bad = IdealFamily::zero();
        bad.insert(0, vec![poly("r1")]);
        assert!(!verify_ideal_family(&m, &bad).unwrap());
    }

    #[test]
    fn enumerator_reaches_small_ideals() {
        let fams: Vec<IdealFamily> = FamilyEnumerator::new(vec![0], 1, 1, 1, 1).collect();
        assert_eq!(fams[0], IdealFamily::zero());
        for g in ["r1", "r1 - 1", "r1 + 1"] {
            let mut want = IdealFamily::zero();
            want.insert(0, vec![poly(g)]);
            assert!(fams.contains(&want), "missing <{g}>");
        }
        let distinct: HashSet<String> = fams.iter().map(|f| f.to_string()).collect();
        assert_eq!(distinct.len(), fams.len());
    }

    #[test]
    fn vanishing_finds_relation() {
        let samples: Vec<Vec<Polynomial>> =
            (0..4).map(|k| vec![poly(&format!("x^{k}")), poly(&format!("x^{k} + 1"))]).collect();
        let refs: Vec<&[Polynomial]> = samples.iter().map(Vec::as_slice).collect();
        let ns = vanishing_polynomials(2, 1, &refs);
        assert_eq!(ns.len(), 1);
        assert!(ns[0] == poly("r2 - r1 - 1") || ns[0] == poly("r1 - r2 + 1"));
    }

    #[test]
    fn houdini_drops_spurious() {
        let m = one_register("r1.1 * r1.1", "r1 - 1");
        let mut cands = IdealFamily::zero();
        cands.insert(0, vec![poly("r1 - 1"), poly("x")]);
        let fam = FamilyChecker::new(&m).unwrap().houdini(cands, 10).unwrap();
        assert_eq!(fam.generators(0), &[poly("r1 - 1")]);
    }
}
