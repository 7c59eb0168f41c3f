use std::collections::{BTreeMap, BTreeSet};

use crate::tree::{RankedTree, Signature};

/// Bottom-up nondeterministic finite tree automaton over states `0..states`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfta {
    signature: Signature,
    states: usize,
    transitions: BTreeSet<(String, Vec<usize>, usize)>,
    accepting: BTreeSet<usize>,
}

impl Nfta {
    pub fn new(signature: Signature, states: usize) -> Self {
        Nfta {
            signature,
            states,
            transitions: BTreeSet::new(),
            accepting: BTreeSet::new(),
        }
    }

    /// Accepts every tree over `signature`.
    pub fn universal(signature: Signature) -> Self {
        let mut n = Nfta::new(signature.clone(), 1);
        for (s, r) in signature.symbols() {
            n.add_transition(s, vec![0; r], 0);
        }
        n.set_accepting(0);
        n
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn add_state(&mut self) -> usize {
        self.states += 1;
        self.states - 1
    }

    pub fn add_transition(&mut self, symbol: &str, sources: Vec<usize>, target: usize) {
        assert_eq!(self.signature.rank(symbol), Some(sources.len()), "bad arity for `{symbol}`");
        self.transitions.insert((symbol.to_string(), sources, target));
    }

    pub fn set_accepting(&mut self, q: usize) {
        self.accepting.insert(q);
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn transitions(&self) -> impl Iterator<Item = (&str, &[usize], usize)> {
        self.transitions.iter().map(|(s, src, t)| (s.as_str(), src.as_slice(), *t))
    }

    /// States reachable on `t`.
    pub fn run(&self, t: &RankedTree) -> BTreeSet<usize> {
        let kids: Vec<BTreeSet<usize>> = t.children.iter().map(|c| self.run(c)).collect();
        self.transitions
            .iter()
            .filter(|(s, src, _)| {
                *s == t.symbol && src.len() == kids.len() && src.iter().zip(&kids).all(|(q, k)| k.contains(q))
            })
            .map(|(_, _, q)| *q)
            .collect()
    }

    pub fn accepts(&self, t: &RankedTree) -> bool {
        self.run(t).iter().any(|q| self.accepting.contains(q))
    }

    pub fn is_deterministic(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.transitions.iter().all(|(s, src, _)| seen.insert((s, src)))
    }

    /// A smallest tree reaching each state, if any.
    pub fn state_witnesses(&self) -> Vec<Option<RankedTree>> {
        let mut best: Vec<Option<RankedTree>> = vec![None; self.states];
        loop {
            let mut changed = false;
            for (s, src, q) in &self.transitions {
                let kids: Option<Vec<RankedTree>> = src.iter().map(|p| best[*p].clone()).collect();
                let Some(kids) = kids else { continue };
                let cand = RankedTree::node(s, kids);
                if best[*q].as_ref().map_or(true, |b| cand.size() < b.size()) {
                    best[*q] = Some(cand);
                    changed = true;
                }
            }
            if !changed {
                return best;
            }
        }
    }

    /// A smallest accepted tree.
    pub fn witness(&self) -> Option<RankedTree> {
        self.state_witnesses()
            .into_iter()
            .enumerate()
            .filter(|(q, _)| self.accepting.contains(q))
            .filter_map(|(_, w)| w)
            .min_by_key(RankedTree::size)
    }

    pub fn is_empty(&self) -> bool {
        self.witness().is_none()
    }

    /// Subset construction; the result is deterministic and complete (the
    /// empty subset is the sink).
    pub fn determinize(&self) -> Nfta {
        let mut subsets: Vec<BTreeSet<usize>> = Vec::new();
        let mut index: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
        let mut trans: BTreeSet<(String, Vec<usize>, usize)> = BTreeSet::new();
        loop {
            let before = subsets.len();
            for (sym, rank) in self.signature.symbols() {
                for tuple in tuples(subsets.len(), rank) {
                    let target: BTreeSet<usize> = self
                        .transitions
                        .iter()
                        .filter(|(s, src, _)| {
                            s == sym && src.iter().zip(&tuple).all(|(q, &i)| subsets[i].contains(q))
                        })
                        .map(|(_, _, q)| *q)
                        .collect();
                    let id = match index.get(&target) {
                        Some(&id) => id,
                        None => {
                            subsets.push(target.clone());
                            index.insert(target, subsets.len() - 1);
                            subsets.len() - 1
                        }
                    };
                    trans.insert((sym.to_string(), tuple, id));
                }
            }
            if subsets.len() == before {
                break;
            }
        }
        let mut d = Nfta::new(self.signature.clone(), subsets.len());
        d.transitions = trans;
        for (i, s) in subsets.iter().enumerate() {
            if s.iter().any(|q| self.accepting.contains(q)) {
                d.accepting.insert(i);
            }
        }
        d
    }

    /// Add a sink so that every left-hand side has a transition.
    pub fn complete(&self) -> Nfta {
        let mut c = self.clone();
        let sink = c.add_state();
        for (sym, rank) in self.signature.symbols() {
            for tuple in tuples(c.states, rank) {
                let defined = c
                    .transitions
                    .iter()
                    .any(|(s, src, _)| s == sym && *src == tuple);
                if !defined {
                    c.transitions.insert((sym.to_string(), tuple, sink));
                }
            }
        }
        c
    }

    pub fn complement(&self) -> Nfta {
        let mut d = self.determinize();
        d.accepting = (0..d.states).filter(|q| !d.accepting.contains(q)).collect();
        d
    }

    pub fn intersect(&self, other: &Nfta) -> Nfta {
        let n2 = other.states;
        let mut p = Nfta::new(self.signature.clone(), self.states * n2);
        for (s1, src1, t1) in &self.transitions {
            for (s2, src2, t2) in &other.transitions {
                if s1 == s2 && src1.len() == src2.len() {
                    let src = src1.iter().zip(src2).map(|(a, b)| a * n2 + b).collect();
                    p.transitions.insert((s1.clone(), src, t1 * n2 + t2));
                }
            }
        }
        for a in &self.accepting {
            for b in &other.accepting {
                p.accepting.insert(a * n2 + b);
            }
        }
        p
    }

    /// A tree accepted by exactly one of the two automata.
    pub fn difference_witness(&self, other: &Nfta) -> Option<RankedTree> {
        let a = self.intersect(&other.complement()).witness();
        let b = other.intersect(&self.complement()).witness();
        match (a, b) {
            (Some(x), Some(y)) => Some(if y.size() < x.size() { y } else { x }),
            (x, y) => x.or(y),
        }
    }
}

fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..n).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::BOTTOM;
    use rand::{Rng, SeedableRng};

    fn sig() -> Signature {
        Signature::new(&[("f", 2), ("g", 1), (BOTTOM, 0)])
    }

    fn random_nfta(seed: u64) -> Nfta {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=3);
        let mut a = Nfta::new(sig(), n);
        for _ in 0..rng.gen_range(1..=6) {
            match rng.gen_range(0..3) {
                0 => a.add_transition(BOTTOM, vec![], rng.gen_range(0..n)),
                1 => a.add_transition("g", vec![rng.gen_range(0..n)], rng.gen_range(0..n)),
                _ => a.add_transition(
                    "f",
                    vec![rng.gen_range(0..n), rng.gen_range(0..n)],
                    rng.gen_range(0..n),
                ),
            }
        }
        a.set_accepting(rng.gen_range(0..n));
        a
    }

    #[test]
    fn set_identities() {
        for seed in 0..30 {
            let l = random_nfta(seed);
            assert!(l.intersect(&l.complement()).is_empty(), "seed {seed}");
            let d = l.determinize();
            assert!(d.is_deterministic());
            for t in sig().enumerate(5) {
                assert_eq!(l.accepts(&t), d.accepts(&t), "seed {seed} tree {t}");
            }
        }
    }

    #[test]
    fn universal_complement_is_empty() {
        let u = Nfta::universal(sig());
        assert!(u.complement().is_empty());
        assert!(sig().enumerate(6).iter().all(|t| u.accepts(t)));
        let c = u.complete();
        assert_eq!(c.states(), 2);
    }
}
