use num_bigint::BigInt;
use num_traits::Zero;

use super::{Algebra, Term, TermVar};
use crate::poly::parse::parse_exponent;
use crate::poly::Rational;
use crate::syntax::{Lexer, ParseError, Token};

/// Parse a term: infix `+ - *` (mapped to `add`, `sub`, `mul`), `^` with an
/// integer exponent, calls `op(t, ..)`, registers `r<k>` and `r<k>.<i>`,
/// numbers, named constants, `?` and brace literals `{..}`.
pub fn parse_term<A: Algebra + ?Sized>(alg: &A, text: &str) -> Result<Term<A::Value>, ParseError> {
    let mut lx = Lexer::new(text)?;
    let t = parse_term_from(alg, &mut lx)?;
    lx.expect_end()?;
    Ok(t)
}

pub(crate) fn parse_term_from<A: Algebra + ?Sized>(
    alg: &A,
    lx: &mut Lexer,
) -> Result<Term<A::Value>, ParseError> {
    let mut acc = parse_product(alg, lx)?;
    loop {
        if lx.eat('+') {
            acc = Term::add(acc, parse_product(alg, lx)?);
        } else if lx.eat('-') {
            acc = Term::sub(acc, parse_product(alg, lx)?);
        } else {
            return Ok(acc);
        }
    }
}

fn parse_product<A: Algebra + ?Sized>(alg: &A, lx: &mut Lexer) -> Result<Term<A::Value>, ParseError> {
    let mut acc = parse_unary(alg, lx)?;
    while lx.eat('*') {
        acc = Term::mul(acc, parse_unary(alg, lx)?);
    }
    Ok(acc)
}

fn parse_unary<A: Algebra + ?Sized>(alg: &A, lx: &mut Lexer) -> Result<Term<A::Value>, ParseError> {
    let pos = lx.pos();
    if lx.eat('-') {
        if let Some(Token::Int(_)) = lx.peek() {
            let n = parse_number(lx)?;
            return number_const(alg, &-n, pos);
        }
        let inner = parse_unary(alg, lx)?;
        return Ok(Term::op("neg", vec![inner]));
    }
    let base = parse_atom(alg, lx)?;
    if lx.eat('^') {
        let e = parse_exponent(lx)?;
        if e == 0 {
            return number_const(alg, &Rational::from_integer(BigInt::from(1)), pos);
        }
        let mut acc = base.clone();
        for _ in 1..e {
            acc = Term::mul(acc, base.clone());
        }
        return Ok(acc);
    }
    Ok(base)
}

fn parse_number(lx: &mut Lexer) -> Result<Rational, ParseError> {
    let Some(Token::Int(n)) = lx.next() else {
        return Err(lx.error("expected number"));
    };
    if lx.peek() == Some(&Token::Sym('/')) && matches!(lx.peek_at(1), Some(Token::Int(_))) {
        lx.next();
        let Some(Token::Int(d)) = lx.next() else {
            unreachable!()
        };
        if d.is_zero() {
            return Err(lx.error("zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    Ok(Rational::from_integer(n))
}

fn number_const<A: Algebra + ?Sized>(
    alg: &A,
    n: &Rational,
    pos: usize,
) -> Result<Term<A::Value>, ParseError> {
    alg.number(n)
        .map(Term::Const)
        .ok_or_else(|| ParseError::new(pos, "numbers are not values of this algebra"))
}

/// `r3` -> own register 3, `r3.2` -> register 3 of argument 2.
pub fn register_var(name: &str) -> Option<TermVar> {
    let rest = name.strip_prefix('r')?;
    let (reg, arg) = match rest.split_once('.') {
        Some((r, a)) => (r, a),
        None => (rest, "0"),
    };
    if reg.is_empty() || !reg.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let reg: usize = reg.parse().ok()?;
    let arg: usize = arg.parse().ok()?;
    (reg >= 1).then_some(TermVar { reg, arg })
}

fn parse_atom<A: Algebra + ?Sized>(alg: &A, lx: &mut Lexer) -> Result<Term<A::Value>, ParseError> {
    let pos = lx.pos();
    match lx.peek().cloned() {
        Some(Token::Int(_)) => {
            let n = parse_number(lx)?;
            number_const(alg, &n, pos)
        }
        Some(Token::Literal(text)) => {
            lx.next();
            alg.parse_literal(&text)
                .map(Term::Const)
                .map_err(|e| ParseError::new(pos, e.to_string()))
        }
        Some(Token::Sym('?')) => {
            lx.next();
            alg.constant("?")
                .map(Term::Const)
                .ok_or_else(|| ParseError::new(pos, "hole is not a value of this algebra"))
        }
        Some(Token::Sym('(')) => {
            lx.next();
            let t = parse_term_from(alg, lx)?;
            lx.expect(')')?;
            Ok(t)
        }
        Some(Token::Ident(name)) => {
            lx.next();
            if lx.eat('(') {
                let mut args = Vec::new();
                if !lx.eat(')') {
                    loop {
                        args.push(parse_term_from(alg, lx)?);
                        if lx.eat(')') {
                            break;
                        }
                        lx.expect(',')?;
                    }
                }
                if args.is_empty() {
                    if let Some(v) = alg.default_argument(&name) {
                        args.push(Term::Const(v));
                    }
                }
                return Ok(Term::Op(name, args));
            }
            if let Some(v) = register_var(&name) {
                return Ok(Term::Var(v));
            }
            alg.constant(&name)
                .map(Term::Const)
                .ok_or_else(|| ParseError::new(pos, format!("unknown constant `{name}`")))
        }
        _ => Err(ParseError::new(pos, "expected a term")),
    }
}

fn infix(op: &str) -> Option<&'static str> {
    match op {
        "add" => Some(" + "),
        "sub" => Some(" - "),
        "mul" => Some(" * "),
        _ => None,
    }
}

/// Render a term so that [`parse_term`] reads it back: infix operators are
/// fully parenthesized below the top level.
pub fn term_text<A: Algebra + ?Sized>(alg: &A, t: &Term<A::Value>) -> String {
    render(alg, t, true)
}

fn render<A: Algebra + ?Sized>(alg: &A, t: &Term<A::Value>, top: bool) -> String {
    match t {
        Term::Var(v) => v.to_string(),
        Term::Const(c) => alg.render_value(c),
        Term::Op(name, cs) => {
            if let (Some(sym), 2) = (infix(name), cs.len()) {
                let body = format!("{}{sym}{}", render(alg, &cs[0], false), render(alg, &cs[1], false));
                if top {
                    body
                } else {
                    format!("({body})")
                }
            } else if name == "neg" && cs.len() == 1 {
                format!("(-{})", render(alg, &cs[0], false))
            } else {
                let args: Vec<String> = cs.iter().map(|c| render(alg, c, true)).collect();
                format!("{name}({})", args.join(", "))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{PolyAlgebra, RatAlgebra};
    use crate::poly::{parse_polynomial, rat};

    #[test]
    fn registers() {
        assert_eq!(register_var("r2.1"), Some(TermVar::of_arg(1, 2)));
        assert_eq!(register_var("r5"), Some(TermVar::own(5)));
        assert_eq!(register_var("r0"), None);
        assert_eq!(register_var("root"), None);
    }

    #[test]
    fn round_trip() {
        let alg = PolyAlgebra::with_substitution();
        for text in [
            "2 + x * r1.1",
            "subst(r1, x + 1) - r2 ^ 2",
            "-(r1) * {-1/2} + {x^2 - 1}",
        ] {
            let t = parse_term(&alg, text).unwrap();
            let back = parse_term(&alg, &term_text(&alg, &t)).unwrap();
            assert_eq!(t, back, "{text}");
        }
    }

    #[test]
    fn constants_and_numbers() {
        let alg = RatAlgebra;
        let t = parse_term(&alg, "-3/4").unwrap();
        assert_eq!(t, Term::Const(crate::poly::rat_frac(-3, 4)));
        assert!(parse_term(&alg, "y").is_err());
        let p = PolyAlgebra::new();
        assert_eq!(
            parse_term(&p, "x^2").unwrap(),
            Term::mul(Term::Const(parse_polynomial("x").unwrap()), Term::Const(parse_polynomial("x").unwrap()))
        );
        assert_eq!(parse_term(&alg, "r1^0").unwrap(), Term::Const(rat(1)));
    }
}
