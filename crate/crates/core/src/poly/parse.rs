use num_traits::{ToPrimitive, Zero};

use super::{Polynomial, Rational};
use crate::syntax::{Lexer, ParseError, Token};

/// Parse the polynomial text grammar: integer or `n/d` coefficients,
/// identifiers, `+ - * ^` and parentheses.
pub fn parse_polynomial(text: &str) -> Result<Polynomial, ParseError> {
    let mut lx = Lexer::new(text)?;
    let p = parse_sum(&mut lx)?;
    lx.expect_end()?;
    Ok(p)
}

pub(crate) fn parse_sum(lx: &mut Lexer) -> Result<Polynomial, ParseError> {
    let mut acc = parse_product(lx)?;
    loop {
        if lx.eat('+') {
            acc = &acc + &parse_product(lx)?;
        } else if lx.eat('-') {
            acc = &acc - &parse_product(lx)?;
        } else {
            return Ok(acc);
        }
    }
}

fn parse_product(lx: &mut Lexer) -> Result<Polynomial, ParseError> {
    let mut acc = parse_unary(lx)?;
    while lx.eat('*') {
        acc = &acc * &parse_unary(lx)?;
    }
    Ok(acc)
}

fn parse_unary(lx: &mut Lexer) -> Result<Polynomial, ParseError> {
    if lx.eat('-') {
        return Ok(-parse_unary(lx)?);
    }
    parse_power(lx)
}

fn parse_power(lx: &mut Lexer) -> Result<Polynomial, ParseError> {
    let base = parse_atom(lx)?;
    if lx.eat('^') {
        let exp = parse_exponent(lx)?;
        return Ok(base.pow(exp));
    }
    Ok(base)
}

pub(crate) fn parse_exponent(lx: &mut Lexer) -> Result<u32, ParseError> {
    match lx.next() {
        Some(Token::Int(n)) => n
            .to_u32()
            .ok_or_else(|| lx.error("exponent out of range")),
        _ => Err(lx.error("expected integer exponent")),
    }
}

fn parse_atom(lx: &mut Lexer) -> Result<Polynomial, ParseError> {
    let pos = lx.pos();
    match lx.next() {
        Some(Token::Int(n)) => {
            if lx.eat('/') {
                match lx.next() {
                    Some(Token::Int(d)) if !d.is_zero() => {
                        Ok(Polynomial::constant(Rational::new(n, d)))
                    }
                    _ => Err(lx.error("expected nonzero denominator")),
                }
            } else {
                Ok(Polynomial::constant(Rational::from_integer(n)))
            }
        }
        Some(Token::Ident(name)) => Ok(Polynomial::var(&name)),
        Some(Token::Sym('(')) => {
            let inner = parse_sum(lx)?;
            lx.expect(')')?;
            Ok(inner)
        }
        _ => Err(ParseError::new(pos, "expected coefficient, variable or `(`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, rat_frac, Monomial, Var};

    #[test]
    fn parses_rationals_and_powers() {
        let p = parse_polynomial("1/2*x^2 - (y - 1)").unwrap();
        let x2 = Monomial::power(Var::new("x"), 2);
        assert_eq!(p.coefficient(&x2), rat_frac(1, 2));
        assert_eq!(p.coefficient(&Monomial::one()), rat(1));
        assert_eq!(p.coefficient(&Monomial::var(Var::new("y"))), rat(-1));
    }

    #[test]
    fn whitespace_insensitive() {
        assert_eq!(
            parse_polynomial("  x*y+ 2 ").unwrap(),
            parse_polynomial("x * y + 2").unwrap()
        );
    }

    #[test]
    fn reports_position() {
        let err = parse_polynomial("x + * y").unwrap_err();
        assert_eq!(err.pos, 4);
        assert!(parse_polynomial("1/0").is_err());
        assert!(parse_polynomial("(x").is_err());
    }
}
