//! Text format for register automata.
//!
//! ```text
//! algebra uf a b
//! signature a/2 _|_/0
//! registers 2
//! state q : forest forest
//! _|_ -> q { r1 := {}; r2 := {} }
//! a(q, q) -> q { r1 := a(r1.1) + r1.2; r2 := r2.1 }
//! output q { r1 }
//! ```
//!
//! `#` starts a comment. `state` lines are optional; they fix the state
//! order and, for multi-sorted algebras, the register sorts.

use std::fmt::Write as _;

use num_traits::ToPrimitive;

use super::{AutomatonError, RegisterAutomaton};
use crate::algebra::{
    parse_term, register_var, term_text, Algebra, PolyAlgebra, RatAlgebra, Sort, Term, WordAlgebra,
};
use crate::forests::{UcfAlgebra, UfAlgebra};
use crate::syntax::{Lexer, ParseError, Token};
use crate::tree::{Signature, BOTTOM};

/// A parsed automaton over any of the built-in algebras.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyAutomaton {
    Rat(RegisterAutomaton<RatAlgebra>),
    Poly(RegisterAutomaton<PolyAlgebra>),
    Uf(RegisterAutomaton<UfAlgebra>),
    Ucf(RegisterAutomaton<UcfAlgebra>),
    Word(RegisterAutomaton<WordAlgebra>),
}

macro_rules! dispatch {
    ($self:expr, $m:ident => $body:expr) => {
        match $self {
            AnyAutomaton::Rat($m) => $body,
            AnyAutomaton::Poly($m) => $body,
            AnyAutomaton::Uf($m) => $body,
            AnyAutomaton::Ucf($m) => $body,
            AnyAutomaton::Word($m) => $body,
        }
    };
}

impl AnyAutomaton {
    pub fn header(&self) -> String {
        dispatch!(self, m => m.algebra().header())
    }

    pub fn signature(&self) -> &Signature {
        dispatch!(self, m => m.signature())
    }

    pub fn registers(&self) -> usize {
        dispatch!(self, m => m.registers())
    }

    pub fn is_deterministic(&self) -> bool {
        dispatch!(self, m => m.is_deterministic())
    }

    pub fn to_text(&self) -> String {
        dispatch!(self, m => print_automaton(m))
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn algebra_line(text: &str) -> Result<(usize, Vec<String>), AutomatonError> {
    for (i, raw) in text.lines().enumerate() {
        let words: Vec<String> = strip_comment(raw).split_whitespace().map(str::to_string).collect();
        if words.is_empty() {
            continue;
        }
        if words[0] == "algebra" {
            return Ok((i + 1, words[1..].to_vec()));
        }
        break;
    }
    Err(AutomatonError::Format("the first line must be `algebra <name> ..`".into()))
}

/// Parse an automaton file, choosing the algebra from its `algebra` line.
pub fn parse_automaton(text: &str) -> Result<AnyAutomaton, AutomatonError> {
    let (line, words) = algebra_line(text)?;
    let labels: Vec<&str> = words.iter().skip(1).map(String::as_str).collect();
    let bad = |msg: &str| AutomatonError::Format(format!("line {line}: {msg}"));
    match words.first().map(String::as_str) {
        Some("rat") => Ok(AnyAutomaton::Rat(parse_automaton_as(RatAlgebra, text)?)),
        Some("poly") => Ok(AnyAutomaton::Poly(parse_automaton_as(PolyAlgebra::new(), text)?)),
        Some("polysubs") => Ok(AnyAutomaton::Poly(parse_automaton_as(
            PolyAlgebra::with_substitution(),
            text,
        )?)),
        Some("uf") => Ok(AnyAutomaton::Uf(parse_automaton_as(UfAlgebra::new(&labels), text)?)),
        Some("ucf") => Ok(AnyAutomaton::Ucf(parse_automaton_as(UcfAlgebra::new(&labels), text)?)),
        Some("word") => {
            let k: u8 = labels
                .first()
                .and_then(|k| k.parse().ok())
                .filter(|k| (1..=26).contains(k))
                .ok_or_else(|| bad("`word` needs an alphabet size in 1..=26"))?;
            Ok(AnyAutomaton::Word(parse_automaton_as(WordAlgebra::new(k), text)?))
        }
        _ => Err(bad("unknown algebra")),
    }
}

struct Pending<A: Algebra> {
    signature: Option<Signature>,
    registers: Option<usize>,
    automaton: Option<RegisterAutomaton<A>>,
}

/// Parse an automaton over a given algebra; the `algebra` line must match.
pub fn parse_automaton_as<A: Algebra + Clone>(
    algebra: A,
    text: &str,
) -> Result<RegisterAutomaton<A>, AutomatonError> {
    let mut st: Pending<A> = Pending {
        signature: None,
        registers: None,
        automaton: None,
    };
    let mut seen_algebra = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |error: ParseError| AutomatonError::Syntax { line: line_no, error };
        let at_line = |e: AutomatonError| match e {
            e @ AutomatonError::Syntax { .. } => e,
            other => AutomatonError::Format(format!("line {line_no}: {other}")),
        };
        let first = line.split_whitespace().next().unwrap_or("");
        match first {
            "algebra" => {
                let words: Vec<&str> = line.split_whitespace().skip(1).collect();
                if words.join(" ") != algebra.header() {
                    return Err(AutomatonError::Format(format!(
                        "line {line_no}: expected `algebra {}`",
                        algebra.header()
                    )));
                }
                seen_algebra = true;
            }
            "signature" => {
                let sig = parse_signature(&line["signature".len()..]).map_err(syntax)?;
                st.signature = Some(sig);
            }
            "registers" => {
                let n = line["registers".len()..]
                    .trim()
                    .parse()
                    .map_err(|_| AutomatonError::Format(format!("line {line_no}: bad register count")))?;
                st.registers = Some(n);
            }
            _ => {
                if !seen_algebra {
                    return Err(AutomatonError::Format("missing `algebra` line".into()));
                }
                let m = automaton(&mut st, &algebra).map_err(at_line)?;
                if first == "state" && !line.contains("->") {
                    parse_state_line(m, &line["state".len()..]).map_err(at_line)?;
                } else if first == "output" && !line.contains("->") {
                    parse_output_line(m, &line["output".len()..]).map_err(at_line)?;
                } else {
                    parse_rule_line(m, line).map_err(at_line)?;
                }
            }
        }
    }
    if !seen_algebra {
        return Err(AutomatonError::Format("missing `algebra` line".into()));
    }
    automaton(&mut st, &algebra)?;
    Ok(st.automaton.take().expect("built above"))
}

fn automaton<'a, A: Algebra + Clone>(
    st: &'a mut Pending<A>,
    algebra: &A,
) -> Result<&'a mut RegisterAutomaton<A>, AutomatonError> {
    if st.automaton.is_none() {
        let sig = st
            .signature
            .clone()
            .ok_or_else(|| AutomatonError::Format("missing `signature` line".into()))?;
        let n = st
            .registers
            .ok_or_else(|| AutomatonError::Format("missing `registers` line".into()))?;
        st.automaton = Some(RegisterAutomaton::new(algebra.clone(), sig, n));
    }
    Ok(st.automaton.as_mut().expect("just set"))
}

fn parse_signature(text: &str) -> Result<Signature, ParseError> {
    let mut lx = Lexer::new(text)?;
    let mut sig = Signature::default();
    while !lx.at_end() {
        let pos = lx.pos();
        let name = match lx.next() {
            Some(Token::Ident(s)) => s,
            Some(Token::Bottom) => BOTTOM.to_string(),
            _ => return Err(ParseError::new(pos, "expected a symbol")),
        };
        lx.expect('/')?;
        let rank = match lx.next() {
            Some(Token::Int(n)) => n.to_usize().ok_or_else(|| lx.error("rank out of range"))?,
            _ => return Err(lx.error("expected a rank")),
        };
        if sig.insert(&name, rank).is_some() {
            return Err(ParseError::new(pos, format!("symbol `{name}` declared twice")));
        }
    }
    Ok(sig)
}

fn expect_ident(lx: &mut Lexer, what: &str) -> Result<String, ParseError> {
    match lx.next() {
        Some(Token::Ident(s)) => Ok(s),
        _ => Err(lx.error(format!("expected {what}"))),
    }
}

fn parse_state_line<A: Algebra + Clone>(m: &mut RegisterAutomaton<A>, text: &str) -> Result<(), AutomatonError> {
    let mut lx = Lexer::new(text).map_err(|e| AutomatonError::Syntax { line: 0, error: e })?;
    let name = expect_ident(&mut lx, "a state name").map_err(|e| AutomatonError::Format(e.to_string()))?;
    if lx.eat(':') {
        let mut sorts = Vec::new();
        while let Some(Token::Ident(s)) = lx.next() {
            if !m.algebra().sorts().iter().any(|x| x.name() == s) {
                return Err(AutomatonError::Format(format!("unknown sort `{s}`")));
            }
            sorts.push(Sort::new(&s));
        }
        m.add_state_with_sorts(&name, sorts)?;
    } else {
        lx.expect_end().map_err(|e| AutomatonError::Format(e.to_string()))?;
        m.add_state(&name);
    }
    Ok(())
}

fn parse_output_line<A: Algebra + Clone>(m: &mut RegisterAutomaton<A>, text: &str) -> Result<(), AutomatonError> {
    let fmt = |e: ParseError| AutomatonError::Format(e.to_string());
    let mut lx = Lexer::new(text).map_err(fmt)?;
    let name = expect_ident(&mut lx, "a state name").map_err(fmt)?;
    let body = match lx.next() {
        Some(Token::Literal(b)) => b,
        _ => return Err(fmt(lx.error("expected `{ <term> }`"))),
    };
    lx.expect_end().map_err(fmt)?;
    let term = parse_term(m.algebra(), &body).map_err(fmt)?;
    m.set_output(&name, term)
}

fn parse_rule_line<A: Algebra + Clone>(m: &mut RegisterAutomaton<A>, text: &str) -> Result<(), AutomatonError> {
    let fmt = |e: ParseError| AutomatonError::Format(e.to_string());
    let mut lx = Lexer::new(text).map_err(fmt)?;
    let pos = lx.pos();
    let symbol = match lx.next() {
        Some(Token::Ident(s)) => s,
        Some(Token::Bottom) => BOTTOM.to_string(),
        _ => return Err(fmt(ParseError::new(pos, "expected a symbol"))),
    };
    let mut sources = Vec::new();
    if lx.eat('(') && !lx.eat(')') {
        loop {
            sources.push(expect_ident(&mut lx, "a state name").map_err(fmt)?);
            if lx.eat(')') {
                break;
            }
            lx.expect(',').map_err(fmt)?;
        }
    }
    lx.expect('-').map_err(fmt)?;
    lx.expect('>').map_err(fmt)?;
    let target = expect_ident(&mut lx, "a target state").map_err(fmt)?;
    let body = match lx.next() {
        Some(Token::Literal(b)) => b,
        _ => return Err(fmt(lx.error("expected `{ r1 := <term>; .. }`"))),
    };
    lx.expect_end().map_err(fmt)?;
    let n = m.registers();
    let mut update: Vec<Option<Term<A::Value>>> = vec![None; n];
    for piece in split_top_level(&body, ';') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let (lhs, rhs) = piece
            .split_once(":=")
            .ok_or_else(|| AutomatonError::Format(format!("expected `r<k> := <term>` in `{piece}`")))?;
        let v = register_var(lhs.trim())
            .filter(|v| v.arg == 0 && v.reg <= n)
            .ok_or_else(|| AutomatonError::Format(format!("bad register `{}`", lhs.trim())))?;
        if update[v.reg - 1].is_some() {
            return Err(AutomatonError::Format(format!("register `{v}` assigned twice")));
        }
        update[v.reg - 1] = Some(parse_term(m.algebra(), rhs).map_err(fmt)?);
    }
    let update: Vec<Term<A::Value>> = update
        .into_iter()
        .enumerate()
        .map(|(j, t)| t.ok_or_else(|| AutomatonError::Format(format!("register r{} not assigned", j + 1))))
        .collect::<Result<_, _>>()?;
    let src: Vec<&str> = sources.iter().map(String::as_str).collect();
    m.add_rule(&symbol, &src, &target, update)
}

fn split_top_level(text: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '{' | '(' => depth += 1,
            '}' | ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&text[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}

/// Render in the text format; [`parse_automaton_as`] reads it back equal.
pub fn print_automaton<A: Algebra + Clone>(m: &RegisterAutomaton<A>) -> String {
    let alg = m.algebra();
    let mut out = String::new();
    let _ = writeln!(out, "algebra {}", alg.header());
    let sig: Vec<String> = m.signature().symbols().map(|(s, r)| format!("{s}/{r}")).collect();
    let _ = writeln!(out, "signature {}", sig.join(" "));
    let _ = writeln!(out, "registers {}", m.registers());
    let default = alg.default_sort();
    for (q, name) in m.states().iter().enumerate() {
        let sorts = m.state_sorts(q);
        if sorts.iter().all(|s| *s == default) {
            let _ = writeln!(out, "state {name}");
        } else {
            let names: Vec<&str> = sorts.iter().map(Sort::name).collect();
            let _ = writeln!(out, "state {name} : {}", names.join(" "));
        }
    }
    for r in m.rules() {
        let src: Vec<&str> = r.sources.iter().map(|s| m.state_name(*s)).collect();
        let lhs = if src.is_empty() {
            r.symbol.clone()
        } else {
            format!("{}({})", r.symbol, src.join(", "))
        };
        let body: Vec<String> = r
            .update
            .iter()
            .enumerate()
            .map(|(j, t)| format!("r{} := {}", j + 1, term_text(alg, t)))
            .collect();
        let _ = writeln!(out, "{lhs} -> {} {{ {} }}", m.state_name(r.target), body.join("; "));
    }
    for (q, t) in m.outputs() {
        let _ = writeln!(out, "output {} {{ {} }}", m.state_name(*q), term_text(alg, t));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forests::parse_forest;
    use crate::tree::parse_ranked_tree;

    const FCNS: &str = "\
algebra uf a b
signature a/2 b/2 _|_/0
registers 1
_|_ -> q { r1 := {} }
a(q, q) -> q { r1 := a(r1.1) + r1.2 }   # first child, next sibling
b(q, q) -> q { r1 := b(r1.1) + r1.2 }
output q { r1 }
";

    #[test]
    fn parse_run_print() {
        let AnyAutomaton::Uf(m) = parse_automaton(FCNS).unwrap() else {
            panic!("expected uf")
        };
        let t = parse_ranked_tree("a(b(_|_, _|_), a(_|_, _|_))").unwrap();
        let out = m.outputs_on(&t).unwrap();
        assert_eq!(out.into_iter().collect::<Vec<_>>(), vec![parse_forest("a(b) + a").unwrap()]);
        let text = print_automaton(&m);
        let back = parse_automaton_as(m.algebra().clone(), &text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn errors_carry_lines() {
        let bad = FCNS.replace("a(r1.1)", "c(r1.1)");
        let err = parse_automaton(&bad).unwrap_err().to_string();
        assert!(err.contains("line 5"), "{err}");
        let missing = FCNS.replace("registers 1\n", "");
        assert!(parse_automaton(&missing).is_err());
        let twice = FCNS.replace("{ r1 := {} }", "{ r1 := {}; r1 := {} }");
        assert!(parse_automaton(&twice).is_err());
    }

    #[test]
    fn ucf_sorts_round_trip() {
        let text = "\
algebra ucf a
signature a/1 _|_/0
registers 2
state q : context forest
_|_ -> q { r1 := ?; r2 := {} }
a(q) -> q { r1 := subst(r1.1, a(?)); r2 := a(r2.1) + r2.1 }
output q { subst(r1, r2) }
";
        let AnyAutomaton::Ucf(m) = parse_automaton(text).unwrap() else {
            panic!()
        };
        let back = parse_automaton_as(m.algebra().clone(), &print_automaton(&m)).unwrap();
        assert_eq!(back, m);
        let t = parse_ranked_tree("a(_|_)").unwrap();
        let out: Vec<_> = m.outputs_on(&t).unwrap().into_iter().collect();
        assert_eq!(out, vec![parse_forest("a(a)").unwrap()]);
        let wrong = text.replace("output q { subst(r1, r2) }", "output q { r1 }");
        assert!(parse_automaton(&wrong).is_err());
    }
}
