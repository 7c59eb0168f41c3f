use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::Algebra;
use crate::automata::{AutomatonError, Configuration, RegisterAutomaton};
use crate::tree::{compositions, RankedTree};

/// A tree reaching a configuration with a nonzero output.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<V> {
    pub tree: RankedTree,
    pub state: usize,
    pub value: V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerStatus {
    /// Layer built; no nonzero output among its new configurations.
    Done,
    /// Every tree size up to the limit has been explored.
    Exhausted,
    /// The stop condition fired mid-layer; the partial layer was dropped.
    Interrupted,
}

/// Reachable configurations grouped by the size of the smallest tree that
/// reaches them. Layer `s` is built from layers `< s`, so a configuration
/// already seen is never expanded twice.
pub struct ConfigLayers<'a, A: Algebra> {
    m: &'a RegisterAutomaton<A>,
    layers: Vec<BTreeMap<usize, Vec<(Configuration<A::Value>, RankedTree)>>>,
    seen: BTreeSet<Configuration<A::Value>>,
    max_size: usize,
    cap: usize,
    saturated: bool,
    steps: u64,
}

impl<'a, A: Algebra + Clone> ConfigLayers<'a, A> {
    pub fn new(m: &'a RegisterAutomaton<A>, max_size: usize, cap: usize) -> Self {
        ConfigLayers {
            m,
            layers: vec![BTreeMap::new()],
            seen: BTreeSet::new(),
            max_size,
            cap,
            saturated: false,
            steps: 0,
        }
    }

    /// Largest tree size fully explored.
    pub fn size(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn exhausted(&self) -> bool {
        self.size() >= self.max_size
    }

    /// Some layer hit the per-layer cap and was truncated.
    pub fn saturated(&self) -> bool {
        self.saturated
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }

    pub fn configurations(&self) -> impl Iterator<Item = &(Configuration<A::Value>, RankedTree)> {
        self.layers.iter().flat_map(|l| l.values().flatten())
    }

    /// Configurations of the most recent layer.
    pub fn last_layer(&self) -> impl Iterator<Item = &(Configuration<A::Value>, RankedTree)> {
        self.layers.last().into_iter().flat_map(|l| l.values().flatten())
    }

    /// Build the next layer. `stop` is polled periodically.
    pub fn advance(
        &mut self,
        stop: &mut dyn FnMut(u64) -> bool,
    ) -> Result<(LayerStatus, Option<Witness<A::Value>>), AutomatonError> {
        if self.exhausted() {
            return Ok((LayerStatus::Exhausted, None));
        }
        let size = self.size() + 1;
        let m = self.m;
        let mut fresh: BTreeMap<usize, Vec<(Configuration<A::Value>, RankedTree)>> = BTreeMap::new();
        let mut added = BTreeSet::new();
        let mut count = 0usize;
        let mut witness = None;
        'rules: for rule in m.rules() {
            let k = rule.sources.len();
            let splits = if k == 0 {
                if size == 1 {
                    vec![Vec::new()]
                } else {
                    Vec::new()
                }
            } else {
                compositions(size - 1, k)
            };
            for split in splits {
                let pools: Vec<&[(Configuration<A::Value>, RankedTree)]> = split
                    .iter()
                    .zip(&rule.sources)
                    .map(|(&s, q)| self.layers[s].get(q).map(Vec::as_slice).unwrap_or(&[]))
                    .collect();
                if pools.iter().any(|p| p.is_empty()) {
                    continue;
                }
                let mut idx = vec![0usize; k];
                loop {
                    self.steps += 1;
                    if self.steps % 256 == 0 && stop(self.steps) {
                        return Ok((LayerStatus::Interrupted, None));
                    }
                    let children: Vec<&Configuration<A::Value>> =
                        idx.iter().zip(&pools).map(|(&i, p)| &p[i].0).collect();
                    let c = m.apply_rule(rule, &children)?;
                    if !self.seen.contains(&c) && !added.contains(&c) {
                        let tree = RankedTree::node(
                            &rule.symbol,
                            idx.iter().zip(&pools).map(|(&i, p)| p[i].1.clone()).collect(),
                        );
                        if witness.is_none() {
                            if let Some(v) = m.output_of(&c) {
                                let v = v?;
                                if !m.algebra().is_zero(&v) {
                                    witness = Some(Witness {
                                        tree: tree.clone(),
                                        state: c.state,
                                        value: v,
                                    });
                                }
                            }
                        }
                        added.insert(c.clone());
                        fresh.entry(c.state).or_default().push((c, tree));
                        count += 1;
                        if count >= self.cap {
                            self.saturated = true;
                            break 'rules;
                        }
                    }
                    let mut j = 0;
                    loop {
                        if j == k {
                            break;
                        }
                        idx[j] += 1;
                        if idx[j] < pools[j].len() {
                            break;
                        }
                        idx[j] = 0;
                        j += 1;
                    }
                    if j == k {
                        break;
                    }
                }
            }
        }
        self.seen.extend(added);
        self.layers.push(fresh);
        Ok((LayerStatus::Done, witness))
    }
}

/// Smallest tree (up to `max_size`) with a nonzero output, exploring
/// layers without interruption.
pub fn search_counterexample<A: Algebra + Clone>(
    m: &RegisterAutomaton<A>,
    max_size: usize,
    cap: usize,
) -> Result<Option<Witness<A::Value>>, AutomatonError> {
    let mut layers = ConfigLayers::new(m, max_size, cap);
    loop {
        match layers.advance(&mut |_| false)? {
            (_, Some(w)) => return Ok(Some(w)),
            (LayerStatus::Done, None) => {}
            _ => return Ok(None),
        }
    }
}
