use num_traits::{Signed, Zero};

use super::{Algebra, AlgebraError, OperationSymbol, Sort};
use crate::poly::{parse_polynomial, Polynomial, Rational, Var};

fn check_arity(op: &str, args: usize, expected: usize) -> Result<(), AlgebraError> {
    if args == expected {
        Ok(())
    } else {
        Err(AlgebraError::Arity {
            op: op.to_string(),
            expected,
            got: args,
        })
    }
}

fn ring_ops(sort: &Sort) -> Vec<OperationSymbol> {
    vec![
        OperationSymbol::new("add", &[sort, sort], sort),
        OperationSymbol::new("sub", &[sort, sort], sort),
        OperationSymbol::new("mul", &[sort, sort], sort),
        OperationSymbol::new("neg", &[sort], sort),
    ]
}

/// The field of rationals with `+`, `-` and `*`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RatAlgebra;

impl Algebra for RatAlgebra {
    type Value = Rational;

    fn header(&self) -> String {
        "rat".to_string()
    }

    fn sorts(&self) -> Vec<Sort> {
        vec![Sort::new("rat")]
    }

    fn operations(&self) -> Vec<OperationSymbol> {
        ring_ops(&Sort::new("rat"))
    }

    fn sort_of(&self, _value: &Rational) -> Sort {
        Sort::new("rat")
    }

    fn apply(&self, op: &str, args: &[Rational]) -> Result<Rational, AlgebraError> {
        match op {
            "add" => {
                check_arity(op, args.len(), 2)?;
                Ok(&args[0] + &args[1])
            }
            "sub" => {
                check_arity(op, args.len(), 2)?;
                Ok(&args[0] - &args[1])
            }
            "mul" => {
                check_arity(op, args.len(), 2)?;
                Ok(&args[0] * &args[1])
            }
            "neg" => {
                check_arity(op, args.len(), 1)?;
                Ok(-&args[0])
            }
            _ => Err(AlgebraError::UnknownOperation(op.to_string())),
        }
    }

    fn parse_literal(&self, text: &str) -> Result<Rational, AlgebraError> {
        let p = parse_polynomial(text).map_err(|e| AlgebraError::InvalidLiteral {
            text: text.to_string(),
            detail: e.to_string(),
        })?;
        p.constant_value().ok_or_else(|| AlgebraError::InvalidLiteral {
            text: text.to_string(),
            detail: "not a rational constant".into(),
        })
    }

    fn render_value(&self, value: &Rational) -> String {
        if value.is_integer() && !value.is_negative() {
            value.to_string()
        } else {
            format!("{{{value}}}")
        }
    }

    fn number(&self, value: &Rational) -> Option<Rational> {
        Some(value.clone())
    }

    fn has_subtraction(&self) -> bool {
        true
    }

    fn is_zero(&self, value: &Rational) -> bool {
        value.is_zero()
    }
}

/// Polynomials `(Q[x], +, *)`; with `substitution` also `subst(p, q) = p[x := q]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyAlgebra {
    pub substitution: bool,
    var: Var,
}

impl Default for PolyAlgebra {
    fn default() -> Self {
        PolyAlgebra::new()
    }
}

impl PolyAlgebra {
    pub fn new() -> Self {
        PolyAlgebra {
            substitution: false,
            var: Var::new("x"),
        }
    }

    pub fn with_substitution() -> Self {
        PolyAlgebra {
            substitution: true,
            var: Var::new("x"),
        }
    }

    pub fn variable(&self) -> &Var {
        &self.var
    }
}

impl Algebra for PolyAlgebra {
    type Value = Polynomial;

    fn header(&self) -> String {
        if self.substitution {
            "polysubs".to_string()
        } else {
            "poly".to_string()
        }
    }

    fn sorts(&self) -> Vec<Sort> {
        vec![Sort::new("poly")]
    }

    fn operations(&self) -> Vec<OperationSymbol> {
        let sort = Sort::new("poly");
        let mut ops = ring_ops(&sort);
        if self.substitution {
            ops.push(OperationSymbol::new("subst", &[&sort, &sort], &sort));
        }
        ops
    }

    fn sort_of(&self, _value: &Polynomial) -> Sort {
        Sort::new("poly")
    }

    fn apply(&self, op: &str, args: &[Polynomial]) -> Result<Polynomial, AlgebraError> {
        match op {
            "add" => {
                check_arity(op, args.len(), 2)?;
                Ok(&args[0] + &args[1])
            }
            "sub" => {
                check_arity(op, args.len(), 2)?;
                Ok(&args[0] - &args[1])
            }
            "mul" => {
                check_arity(op, args.len(), 2)?;
                Ok(&args[0] * &args[1])
            }
            "neg" => {
                check_arity(op, args.len(), 1)?;
                Ok(-&args[0])
            }
            "subst" if self.substitution => {
                check_arity(op, args.len(), 2)?;
                Ok(args[0].substitute(&self.var, &args[1]))
            }
            _ => Err(AlgebraError::UnknownOperation(op.to_string())),
        }
    }

    fn parse_literal(&self, text: &str) -> Result<Polynomial, AlgebraError> {
        parse_polynomial(text).map_err(|e| AlgebraError::InvalidLiteral {
            text: text.to_string(),
            detail: e.to_string(),
        })
    }

    fn render_value(&self, value: &Polynomial) -> String {
        match value.constant_value() {
            Some(c) if c.is_integer() && !c.is_negative() => c.to_string(),
            _ => format!("{{{value}}}"),
        }
    }

    fn number(&self, value: &Rational) -> Option<Polynomial> {
        Some(Polynomial::constant(value.clone()))
    }

    fn constant(&self, name: &str) -> Option<Polynomial> {
        (name == self.var.name()).then(|| Polynomial::from_var(self.var.clone()))
    }

    fn has_subtraction(&self) -> bool {
        true
    }

    fn is_zero(&self, value: &Polynomial) -> bool {
        value.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_term;
    use crate::poly::rat;

    #[test]
    fn substitution_only_when_enabled() {
        let p = Polynomial::var("x").pow(2);
        let q = parse_polynomial("x + 1").unwrap();
        let plain = PolyAlgebra::new();
        assert!(plain.apply("subst", &[p.clone(), q.clone()]).is_err());
        let subs = PolyAlgebra::with_substitution();
        assert_eq!(
            subs.apply("subst", &[p, q]).unwrap(),
            parse_polynomial("x^2 + 2*x + 1").unwrap()
        );
    }

    #[test]
    fn rational_literals() {
        let alg = RatAlgebra;
        assert_eq!(alg.parse_literal("-3/4").unwrap(), crate::poly::rat_frac(-3, 4));
        assert!(alg.parse_literal("x").is_err());
        let t = parse_term(&alg, "{-1/2} * 4").unwrap();
        let v = crate::algebra::eval_term(&alg, &t, &|_| None).unwrap();
        assert_eq!(v, rat(-2));
    }
}
