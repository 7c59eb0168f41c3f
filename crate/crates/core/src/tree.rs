//! Ranked input trees and signatures.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::syntax::{Lexer, ParseError, Token};

pub const BOTTOM: &str = "_|_";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankedTree {
    pub symbol: String,
    pub children: Vec<RankedTree>,
}

impl RankedTree {
    pub fn leaf(symbol: &str) -> Self {
        RankedTree {
            symbol: symbol.to_string(),
            children: Vec::new(),
        }
    }

    pub fn node(symbol: &str, children: Vec<RankedTree>) -> Self {
        RankedTree {
            symbol: symbol.to_string(),
            children,
        }
    }

    pub fn bottom() -> Self {
        RankedTree::leaf(BOTTOM)
    }

    pub fn is_bottom(&self) -> bool {
        self.symbol == BOTTOM
    }

    /// `symbols[0](symbols[1](..(leaf)))`, the last symbol applied first.
    pub fn spine(symbols: &[&str], leaf: RankedTree) -> Self {
        symbols
            .iter()
            .rev()
            .fold(leaf, |acc, s| RankedTree::node(s, vec![acc]))
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(RankedTree::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.children.iter().map(RankedTree::height).max().unwrap_or(0)
    }
}

impl fmt::Display for RankedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

pub fn parse_ranked_tree(text: &str) -> Result<RankedTree, ParseError> {
    let mut lx = Lexer::new(text)?;
    let t = parse_node(&mut lx)?;
    lx.expect_end()?;
    Ok(t)
}

fn parse_node(lx: &mut Lexer) -> Result<RankedTree, ParseError> {
    let pos = lx.pos();
    let symbol = match lx.next() {
        Some(Token::Ident(s)) => s,
        Some(Token::Bottom) => BOTTOM.to_string(),
        _ => return Err(ParseError::new(pos, "expected a symbol")),
    };
    let mut children = Vec::new();
    if lx.eat('(') && !lx.eat(')') {
        loop {
            children.push(parse_node(lx)?);
            if lx.eat(')') {
                break;
            }
            lx.expect(',')?;
        }
    }
    Ok(RankedTree { symbol, children })
}

/// Ranked alphabet: symbol name to arity.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    symbols: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new(symbols: &[(&str, usize)]) -> Self {
        Signature {
            symbols: symbols.iter().map(|(s, r)| (s.to_string(), *r)).collect(),
        }
    }

    pub fn insert(&mut self, symbol: &str, rank: usize) -> Option<usize> {
        self.symbols.insert(symbol.to_string(), rank)
    }

    pub fn rank(&self, symbol: &str) -> Option<usize> {
        self.symbols.get(symbol).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&str, usize)> {
        self.symbols.iter().map(|(s, r)| (s.as_str(), *r))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn max_rank(&self) -> usize {
        self.symbols.values().copied().max().unwrap_or(0)
    }

    pub fn accepts(&self, t: &RankedTree) -> bool {
        self.rank(&t.symbol) == Some(t.children.len()) && t.children.iter().all(|c| self.accepts(c))
    }

    /// All trees with exactly `size` nodes, for `size` in `1..=max_size`,
    /// grouped by size.
    pub fn trees_by_size(&self, max_size: usize) -> Vec<Vec<RankedTree>> {
        let mut by_size: Vec<Vec<RankedTree>> = vec![Vec::new(); max_size + 1];
        for n in 1..=max_size {
            let mut out = Vec::new();
            for (sym, rank) in self.symbols() {
                if rank == 0 {
                    if n == 1 {
                        out.push(RankedTree::leaf(sym));
                    }
                    continue;
                }
                if n < 1 + rank {
                    continue;
                }
                for sizes in compositions(n - 1, rank) {
                    let mut partial: Vec<Vec<RankedTree>> = vec![Vec::new()];
                    for &s in &sizes {
                        let mut next = Vec::new();
                        for p in &partial {
                            for c in &by_size[s] {
                                let mut q = p.clone();
                                q.push(c.clone());
                                next.push(q);
                            }
                        }
                        partial = next;
                    }
                    out.extend(partial.into_iter().map(|cs| RankedTree::node(sym, cs)));
                }
            }
            by_size[n] = out;
        }
        by_size
    }

    /// All trees with at most `max_size` nodes in nondecreasing size.
    pub fn enumerate(&self, max_size: usize) -> Vec<RankedTree> {
        self.trees_by_size(max_size).into_iter().flatten().collect()
    }

    /// Random tree of at most roughly `max_size` nodes; `None` if the
    /// signature has no constant.
    pub fn random_tree<R: Rng + ?Sized>(&self, rng: &mut R, max_size: usize) -> Option<RankedTree> {
        let leaves: Vec<&str> = self.symbols().filter(|(_, r)| *r == 0).map(|(s, _)| s).collect();
        if leaves.is_empty() {
            return None;
        }
        let inner: Vec<(&str, usize)> = self.symbols().filter(|(_, r)| *r > 0).collect();
        Some(self.random_rec(rng, max_size, &leaves, &inner))
    }

    fn random_rec<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        budget: usize,
        leaves: &[&str],
        inner: &[(&str, usize)],
    ) -> RankedTree {
        let fitting: Vec<&(&str, usize)> = inner.iter().filter(|(_, r)| r + 1 <= budget).collect();
        if fitting.is_empty() || rng.gen_bool(1.0 / (budget as f64).max(1.0)) {
            return RankedTree::leaf(leaves[rng.gen_range(0..leaves.len())]);
        }
        let (sym, rank) = *fitting[rng.gen_range(0..fitting.len())];
        let mut left = budget - 1;
        let mut children = Vec::with_capacity(rank);
        for i in 0..rank {
            let reserve = rank - i - 1;
            let share = rng.gen_range(1..=(left - reserve).max(1));
            let child = self.random_rec(rng, share, leaves, inner);
            left = left.saturating_sub(child.size());
            children.push(child);
        }
        RankedTree::node(sym, children)
    }
}

/// Ordered tuples of `parts` positive integers summing to `total`.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn parse_and_print() {
        let t = parse_ranked_tree("a(b(_|_, _|_), _|_)").unwrap();
        assert_eq!(t.size(), 5);
        assert_eq!(t.to_string(), "a(b(_|_, _|_), _|_)");
        assert!(parse_ranked_tree("a(").is_err());
    }

    #[test]
    fn binary_tree_counts_are_catalan() {
        let sig = Signature::new(&[("a", 2), (BOTTOM, 0)]);
        let by = sig.trees_by_size(9);
        let counts: Vec<usize> = by.iter().map(Vec::len).collect();
        assert_eq!(counts, vec![0, 1, 0, 1, 0, 2, 0, 5, 0, 14]);
        assert!(by.iter().flatten().all(|t| sig.accepts(t)));
    }

    #[test]
    fn random_trees_are_well_formed() {
        let sig = Signature::new(&[("a", 2), ("b", 1), (BOTTOM, 0)]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let t = sig.random_tree(&mut rng, 10).unwrap();
            assert!(sig.accepts(&t));
            assert!(t.size() <= 10);
        }
    }

    #[test]
    fn spines() {
        let t = RankedTree::spine(&["a", "b"], RankedTree::bottom());
        assert_eq!(t.to_string(), "a(b(_|_))");
    }
}
