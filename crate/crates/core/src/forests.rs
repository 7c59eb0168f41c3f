//! Unordered forests and one-hole contexts.
//!
//! A [`Forest`] is a multiset of trees kept in canonical sorted order, so
//! structural equality is multiset equality. A forest containing exactly one
//! [`Tree::Hole`] is a context.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, OperationSymbol, Sort};
use crate::syntax::{Lexer, ParseError, Token};
use crate::tree::RankedTree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForestError {
    #[error("substitution into a context without a hole")]
    UntypedSubstitution,
    #[error("more than one hole")]
    TooManyHoles,
    #[error("malformed binary tree: {0}")]
    Malformed(String),
    #[error("label `{0}` is not in the alphabet")]
    UnknownLabel(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tree {
    Hole,
    Node(String, Forest),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Forest {
    trees: Vec<Tree>,
}

impl Forest {
    pub fn empty() -> Self {
        Forest::default()
    }

    pub fn hole() -> Self {
        Forest {
            trees: vec![Tree::Hole],
        }
    }

    pub fn from_trees(mut trees: Vec<Tree>) -> Self {
        trees.sort();
        Forest { trees }
    }

    pub fn leaf(label: &str) -> Self {
        Forest::root(label, &Forest::empty())
    }

    pub fn root(label: &str, h: &Forest) -> Self {
        Forest {
            trees: vec![Tree::Node(label.to_string(), h.clone())],
        }
    }

    pub fn add(&self, other: &Forest) -> Forest {
        let mut trees = Vec::with_capacity(self.trees.len() + other.trees.len());
        let (mut i, mut j) = (0, 0);
        while i < self.trees.len() && j < other.trees.len() {
            if self.trees[i] <= other.trees[j] {
                trees.push(self.trees[i].clone());
                i += 1;
            } else {
                trees.push(other.trees[j].clone());
                j += 1;
            }
        }
        trees.extend_from_slice(&self.trees[i..]);
        trees.extend_from_slice(&other.trees[j..]);
        Forest { trees }
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    /// Number of labelled nodes; holes do not count.
    pub fn size(&self) -> usize {
        self.trees
            .iter()
            .map(|t| match t {
                Tree::Hole => 0,
                Tree::Node(_, h) => 1 + h.size(),
            })
            .sum()
    }

    pub fn hole_count(&self) -> usize {
        self.trees
            .iter()
            .map(|t| match t {
                Tree::Hole => 1,
                Tree::Node(_, h) => h.hole_count(),
            })
            .sum()
    }

    pub fn labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_labels(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_labels(&self, out: &mut Vec<String>) {
        for t in &self.trees {
            if let Tree::Node(l, h) = t {
                out.push(l.clone());
                h.collect_labels(out);
            }
        }
    }

    /// `self[? := d]`; `self` must contain exactly one hole.
    pub fn substitute(&self, d: &Forest) -> Result<Forest, ForestError> {
        match self.hole_count() {
            0 => Err(ForestError::UntypedSubstitution),
            1 => Ok(self.plug(d)),
            _ => Err(ForestError::TooManyHoles),
        }
    }

    fn plug(&self, d: &Forest) -> Forest {
        let mut out = Forest::empty();
        for t in &self.trees {
            let piece = match t {
                Tree::Hole => d.clone(),
                Tree::Node(l, h) if h.hole_count() > 0 => Forest::root(l, &h.plug(d)),
                other => Forest {
                    trees: vec![other.clone()],
                },
            };
            out = out.add(&piece);
        }
        out
    }

    /// Insert a hole at position `index` in `0..=size()`: position 0 is the
    /// top level, position `k` the children of the `k`-th node in preorder.
    pub fn with_hole_at(&self, index: usize) -> Forest {
        let mut counter = index;
        self.insert_hole(&mut counter)
    }

    fn insert_hole(&self, counter: &mut usize) -> Forest {
        if *counter == 0 {
            *counter = usize::MAX;
            return self.add(&Forest::hole());
        }
        let mut trees = Vec::with_capacity(self.trees.len());
        for t in &self.trees {
            match t {
                Tree::Node(l, h) if *counter != usize::MAX => {
                    *counter -= 1;
                    trees.push(Tree::Node(l.clone(), h.insert_hole(counter)));
                }
                other => trees.push(other.clone()),
            }
        }
        Forest::from_trees(trees)
    }

    pub fn parse(text: &str) -> Result<Forest, ForestError> {
        Ok(parse_forest(text)?)
    }
}

fn write_trees(f: &mut fmt::Formatter<'_>, trees: &[Tree], sep: &str) -> fmt::Result {
    for (i, t) in trees.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        match t {
            Tree::Hole => f.write_str("?")?,
            Tree::Node(l, h) => {
                f.write_str(l)?;
                if !h.is_empty() {
                    f.write_str("(")?;
                    write_trees(f, &h.trees, ", ")?;
                    f.write_str(")")?;
                }
            }
        }
    }
    Ok(())
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_trees(f, &self.trees, " + ")
    }
}

/// Grammar: trees separated by `+`, a tree is `label`, `label(..)` or `?`;
/// children are separated by `,` or `+`. The empty text is the empty forest.
pub fn parse_forest(text: &str) -> Result<Forest, ParseError> {
    let mut lx = Lexer::new(text)?;
    if lx.at_end() {
        return Ok(Forest::empty());
    }
    let f = parse_items(&mut lx, &['+'])?;
    lx.expect_end()?;
    Ok(f)
}

fn parse_items(lx: &mut Lexer, seps: &[char]) -> Result<Forest, ParseError> {
    let mut trees = vec![parse_tree(lx)?];
    while seps.iter().any(|&s| lx.eat(s)) {
        trees.push(parse_tree(lx)?);
    }
    Ok(Forest::from_trees(trees))
}

fn parse_tree(lx: &mut Lexer) -> Result<Tree, ParseError> {
    let pos = lx.pos();
    match lx.next() {
        Some(Token::Sym('?')) => Ok(Tree::Hole),
        Some(Token::Ident(label)) => {
            let children = if lx.eat('(') {
                if lx.eat(')') {
                    Forest::empty()
                } else {
                    let h = parse_items(lx, &[',', '+'])?;
                    lx.expect(')')?;
                    h
                }
            } else {
                Forest::empty()
            };
            Ok(Tree::Node(label, children))
        }
        _ => Err(ParseError::new(pos, "expected a label or `?`")),
    }
}

/// First-child/next-sibling decoding of a binary tree with `_|_` leaves.
pub fn fcns_decode(t: &RankedTree) -> Result<Forest, ForestError> {
    match t.children.len() {
        0 if t.is_bottom() => Ok(Forest::empty()),
        2 if !t.is_bottom() => {
            let first = fcns_decode(&t.children[0])?;
            let next = fcns_decode(&t.children[1])?;
            Ok(Forest::root(&t.symbol, &first).add(&next))
        }
        n => Err(ForestError::Malformed(format!(
            "`{}` with {n} children",
            t.symbol
        ))),
    }
}

/// All distinct forests over `labels` with at most `max_nodes` nodes.
pub fn enumerate_forests(labels: &[&str], max_nodes: usize) -> Vec<Forest> {
    // trees[s]: all trees with exactly s nodes, s >= 1.
    let mut trees: Vec<Vec<Tree>> = vec![Vec::new()];
    let mut exact: Vec<Vec<Forest>> = vec![vec![Forest::empty()]];
    for s in 1..=max_nodes {
        let mut ts = Vec::new();
        for l in labels {
            for h in &exact[s - 1] {
                ts.push(Tree::Node(l.to_string(), h.clone()));
            }
        }
        ts.sort();
        trees.push(ts);
        let catalogue: Vec<(usize, &Tree)> = (1..=s)
            .flat_map(|k| trees[k].iter().map(move |t| (k, t)))
            .collect();
        let mut out = Vec::new();
        multisets(&catalogue, 0, s, &mut Vec::new(), &mut out);
        exact.push(out);
    }
    exact.into_iter().flatten().collect()
}

fn multisets(
    catalogue: &[(usize, &Tree)],
    from: usize,
    remaining: usize,
    chosen: &mut Vec<Tree>,
    out: &mut Vec<Forest>,
) {
    if remaining == 0 {
        out.push(Forest::from_trees(chosen.clone()));
        return;
    }
    for i in from..catalogue.len() {
        let (size, t) = catalogue[i];
        if size <= remaining {
            chosen.push(t.clone());
            multisets(catalogue, i, remaining - size, chosen, out);
            chosen.pop();
        }
    }
}

/// Random forest with exactly `nodes` nodes.
pub fn random_forest<R: Rng + ?Sized>(rng: &mut R, labels: &[&str], nodes: usize) -> Forest {
    let mut trees = Vec::new();
    let mut left = nodes;
    while left > 0 {
        let k = rng.gen_range(1..=left);
        let label = labels[rng.gen_range(0..labels.len())];
        trees.push(Tree::Node(label.to_string(), random_forest(rng, labels, k - 1)));
        left -= k;
    }
    Forest::from_trees(trees)
}

/// Random one-hole context with exactly `nodes` nodes.
pub fn random_context<R: Rng + ?Sized>(rng: &mut R, labels: &[&str], nodes: usize) -> Forest {
    let h = random_forest(rng, labels, nodes);
    let pos = rng.gen_range(0..=nodes);
    h.with_hole_at(pos)
}

fn label_ops(labels: &[String], sorts: &[Sort]) -> Vec<OperationSymbol> {
    let mut ops = Vec::new();
    for l in labels {
        for s in sorts {
            ops.push(OperationSymbol::new(l, &[s], s));
        }
    }
    ops
}

fn check_labels(labels: &[&str]) -> Vec<String> {
    for l in labels {
        assert!(
            !matches!(*l, "add" | "sub" | "mul" | "neg" | "subst")
                && crate::algebra::register_var(l).is_none(),
            "`{l}` cannot be used as a label"
        );
    }
    labels.iter().map(|l| l.to_string()).collect()
}

fn root_apply(labels: &[String], op: &str, args: &[Forest]) -> Option<Result<Forest, AlgebraError>> {
    if !labels.iter().any(|l| l == op) {
        return None;
    }
    Some(match args {
        [] => Ok(Forest::leaf(op)),
        [h] => Ok(Forest::root(op, h)),
        _ => Err(AlgebraError::Arity {
            op: op.to_string(),
            expected: 1,
            got: args.len(),
        }),
    })
}

fn forest_literal(text: &str, labels: &[String], max_holes: usize) -> Result<Forest, AlgebraError> {
    let h = parse_forest(text).map_err(|e| AlgebraError::InvalidLiteral {
        text: text.to_string(),
        detail: e.to_string(),
    })?;
    if let Some(l) = h.labels().into_iter().find(|l| !labels.contains(l)) {
        return Err(AlgebraError::InvalidLiteral {
            text: text.to_string(),
            detail: format!("label `{l}` is not in the alphabet"),
        });
    }
    if h.hole_count() > max_holes {
        return Err(AlgebraError::InvalidLiteral {
            text: text.to_string(),
            detail: "too many holes".into(),
        });
    }
    Ok(h)
}

/// `UF`: forests with `+` and one `root` operation per label. The label
/// operation doubles as the symbol name, e.g. `a(r1.1) + r2.1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UfAlgebra {
    labels: Vec<String>,
}

impl UfAlgebra {
    pub fn new(labels: &[&str]) -> Self {
        UfAlgebra {
            labels: check_labels(labels),
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

impl Algebra for UfAlgebra {
    type Value = Forest;

    fn header(&self) -> String {
        format!("uf {}", self.labels.join(" "))
    }

    fn sorts(&self) -> Vec<Sort> {
        vec![Sort::new("forest")]
    }

    fn operations(&self) -> Vec<OperationSymbol> {
        let f = Sort::new("forest");
        let mut ops = vec![OperationSymbol::new("add", &[&f, &f], &f)];
        ops.extend(label_ops(&self.labels, &[f]));
        ops
    }

    fn sort_of(&self, _value: &Forest) -> Sort {
        Sort::new("forest")
    }

    fn apply(&self, op: &str, args: &[Forest]) -> Result<Forest, AlgebraError> {
        if let Some(r) = root_apply(&self.labels, op, args) {
            return r;
        }
        match (op, args) {
            ("add", [a, b]) => Ok(a.add(b)),
            ("add", _) => Err(AlgebraError::Arity {
                op: op.to_string(),
                expected: 2,
                got: args.len(),
            }),
            _ => Err(AlgebraError::UnknownOperation(op.to_string())),
        }
    }

    fn parse_literal(&self, text: &str) -> Result<Forest, AlgebraError> {
        forest_literal(text, &self.labels, 0)
    }

    fn render_value(&self, value: &Forest) -> String {
        format!("{{{value}}}")
    }

    fn default_argument(&self, op: &str) -> Option<Forest> {
        self.labels.iter().any(|l| l == op).then(Forest::empty)
    }
}

/// `UCF`: forests (sort `forest`) and one-hole contexts (sort `context`)
/// with `+`, labels, and hole plugging `subst(c, d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UcfAlgebra {
    labels: Vec<String>,
}

impl UcfAlgebra {
    pub fn new(labels: &[&str]) -> Self {
        UcfAlgebra {
            labels: check_labels(labels),
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

impl Algebra for UcfAlgebra {
    type Value = Forest;

    fn header(&self) -> String {
        format!("ucf {}", self.labels.join(" "))
    }

    fn sorts(&self) -> Vec<Sort> {
        vec![Sort::new("forest"), Sort::new("context")]
    }

    fn operations(&self) -> Vec<OperationSymbol> {
        let f = Sort::new("forest");
        let c = Sort::new("context");
        let mut ops = vec![
            OperationSymbol::new("add", &[&f, &f], &f),
            OperationSymbol::new("add", &[&c, &f], &c),
            OperationSymbol::new("add", &[&f, &c], &c),
            OperationSymbol::new("subst", &[&c, &f], &f),
            OperationSymbol::new("subst", &[&c, &c], &c),
        ];
        ops.extend(label_ops(&self.labels, &[f, c]));
        ops
    }

    fn sort_of(&self, value: &Forest) -> Sort {
        if value.hole_count() == 0 {
            Sort::new("forest")
        } else {
            Sort::new("context")
        }
    }

    fn apply(&self, op: &str, args: &[Forest]) -> Result<Forest, AlgebraError> {
        if let Some(r) = root_apply(&self.labels, op, args) {
            return r;
        }
        match (op, args) {
            ("add", [a, b]) => {
                if a.hole_count() + b.hole_count() > 1 {
                    return Err(AlgebraError::SortMismatch {
                        op: op.to_string(),
                        detail: "both arguments are contexts".into(),
                    });
                }
                Ok(a.add(b))
            }
            ("subst", [c, d]) => c.substitute(d).map_err(|e| AlgebraError::SortMismatch {
                op: op.to_string(),
                detail: e.to_string(),
            }),
            ("add" | "subst", _) => Err(AlgebraError::Arity {
                op: op.to_string(),
                expected: 2,
                got: args.len(),
            }),
            _ => Err(AlgebraError::UnknownOperation(op.to_string())),
        }
    }

    fn parse_literal(&self, text: &str) -> Result<Forest, AlgebraError> {
        forest_literal(text, &self.labels, 1)
    }

    fn render_value(&self, value: &Forest) -> String {
        if *value == Forest::hole() {
            "?".to_string()
        } else {
            format!("{{{value}}}")
        }
    }

    fn constant(&self, name: &str) -> Option<Forest> {
        (name == "?").then(Forest::hole)
    }

    fn default_argument(&self, op: &str) -> Option<Forest> {
        self.labels.iter().any(|l| l == op).then(Forest::empty)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::parse_ranked_tree;

    fn f(text: &str) -> Forest {
        parse_forest(text).unwrap()
    }

    #[test]
    fn fig1_unordered_equality() {
        assert_eq!(f("a(b(b,c,d), e)"), f("a(e, b(c,b,d))"));
        assert_ne!(f("a(b)"), f("a(b,b)"));
        assert_eq!(Forest::empty(), f(""));
        assert_eq!(f("a(b,c,d) + e").add(&f("e + a(c,b,d)")), f("e + e + a(b,c,d) + a(d,c,b)"));
    }

    #[test]
    fn add_and_root() {
        let h = f("a(b)");
        assert_eq!(Forest::empty().add(&h), h);
        assert_eq!(h.add(&h).trees().len(), 2);
        assert_eq!(Forest::root("a", &f("b + c")), f("a(b,c)"));
        assert_eq!(Forest::root("a", &Forest::leaf("a")), f("a(a)"));
        assert_eq!(Forest::empty().to_string(), "");
    }

    #[test]
    fn substitution() {
        assert_eq!(Forest::hole().substitute(&f("c(d)")).unwrap(), f("c(d)"));
        assert_eq!(f("a(b, ?)").substitute(&f("c(d)")).unwrap(), f("a(b, c(d))"));
        let ctx = f("a(?)").substitute(&f("b(?)")).unwrap();
        assert_eq!(ctx, f("a(b(?))"));
        assert_eq!(ctx.hole_count(), 1);
        assert_eq!(f("a(b)").substitute(&f("c")), Err(ForestError::UntypedSubstitution));
    }

    #[test]
    fn fcns_fig2() {
        let t = parse_ranked_tree("a(b(c(_|_, d(_|_, _|_)), e(_|_, f(_|_, _|_))), _|_)").unwrap();
        assert_eq!(fcns_decode(&t).unwrap(), f("a(b(c,d), e, f)"));
        assert_eq!(fcns_decode(&parse_ranked_tree("_|_").unwrap()).unwrap(), Forest::empty());
        assert_eq!(fcns_decode(&parse_ranked_tree("a(_|_,_|_)").unwrap()).unwrap(), f("a"));
        assert!(fcns_decode(&parse_ranked_tree("a(_|_)").unwrap()).is_err());
    }

    #[test]
    fn enumeration_counts() {
        // Rooted unlabeled forests with n nodes: 1, 1, 2, 4, 9, 20, 48, 115.
        let all = enumerate_forests(&["a"], 7);
        assert_eq!(all.len(), 1 + 1 + 2 + 4 + 9 + 20 + 48 + 115);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
    }

    #[test]
    fn hole_positions() {
        let h = f("a(b) + c");
        for i in 0..=h.size() {
            let c = h.with_hole_at(i);
            assert_eq!(c.hole_count(), 1);
            assert_eq!(c.substitute(&Forest::empty()).unwrap(), h);
        }
    }

    #[test]
    fn uf_algebra_doubles() {
        let alg = UfAlgebra::new(&["a", "b"]);
        let x = f("a");
        assert_eq!(alg.apply("add", &[x.clone(), x.clone()]).unwrap(), f("a + a"));
        assert_eq!(alg.apply("b", &[]).unwrap(), f("b"));
        assert!(alg.parse_literal("c").is_err());
        let ucf = UcfAlgebra::new(&["a"]);
        assert!(ucf.apply("add", &[Forest::hole(), Forest::hole()]).is_err());
        assert_eq!(ucf.sort_of(&f("a(?)")), Sort::new("context"));
    }
}
