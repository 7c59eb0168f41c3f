use std::cmp::Ordering;
use std::fmt;

use super::{Monomial, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OrderKind {
    Lex,
    #[default]
    DegRevLex,
}

/// Monomial order. Variables listed in `precedence` are the largest, in the
/// listed order; the remaining variables follow in ascending name order, so
/// with no explicit precedence `x > y > z` and `r1 > r2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub precedence: Vec<Var>,
}

impl MonomialOrder {
    pub fn lex() -> Self {
        MonomialOrder {
            kind: OrderKind::Lex,
            precedence: Vec::new(),
        }
    }

    pub fn degrevlex() -> Self {
        MonomialOrder {
            kind: OrderKind::DegRevLex,
            precedence: Vec::new(),
        }
    }

    pub fn with_precedence(mut self, vars: impl IntoIterator<Item = Var>) -> Self {
        self.precedence = vars.into_iter().collect();
        self
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            OrderKind::Lex => "lex",
            OrderKind::DegRevLex => "degrevlex",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "lex" => Some(MonomialOrder::lex()),
            "degrevlex" | "grevlex" => Some(MonomialOrder::degrevlex()),
            _ => None,
        }
    }

    /// Rank of a variable: smaller rank means larger variable.
    fn rank<'a>(&self, v: &'a Var) -> (usize, &'a str) {
        match self.precedence.iter().position(|w| w == v) {
            Some(i) => (i, ""),
            None => (self.precedence.len(), v.name()),
        }
    }

    /// Exponent vectors of both monomials over their joint variables,
    /// largest variable first.
    fn aligned(&self, a: &Monomial, b: &Monomial) -> Vec<(u32, u32)> {
        if self.precedence.is_empty() {
            // Name order already is precedence order.
            let mut out = Vec::with_capacity(a.0.len() + b.0.len());
            let (mut i, mut j) = (0, 0);
            while i < a.0.len() || j < b.0.len() {
                match (a.0.get(i), b.0.get(j)) {
                    (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                        Ordering::Less => {
                            out.push((*ea, 0));
                            i += 1;
                        }
                        Ordering::Greater => {
                            out.push((0, *eb));
                            j += 1;
                        }
                        Ordering::Equal => {
                            out.push((*ea, *eb));
                            i += 1;
                            j += 1;
                        }
                    },
                    (Some((_, ea)), None) => {
                        out.push((*ea, 0));
                        i += 1;
                    }
                    (None, Some((_, eb))) => {
                        out.push((0, *eb));
                        j += 1;
                    }
                    (None, None) => unreachable!(),
                }
            }
            return out;
        }
        let mut vars: Vec<&Var> = a.vars().chain(b.vars()).collect();
        vars.sort_by(|x, y| self.rank(x).cmp(&self.rank(y)));
        vars.dedup();
        vars.into_iter()
            .map(|v| (a.exponent(v), b.exponent(v)))
            .collect()
    }

    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        let aligned = self.aligned(a, b);
        match self.kind {
            OrderKind::Lex => {
                for (ea, eb) in aligned {
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                }
                Ordering::Equal
            }
            OrderKind::DegRevLex => {
                let da = a.degree();
                let db = b.degree();
                if da != db {
                    return da.cmp(&db);
                }
                for (ea, eb) in aligned.into_iter().rev() {
                    if ea != eb {
                        return eb.cmp(&ea);
                    }
                }
                Ordering::Equal
            }
        }
    }
}

impl fmt::Display for MonomialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
