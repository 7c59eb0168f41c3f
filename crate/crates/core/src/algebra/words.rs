use std::fmt;

use super::{Algebra, AlgebraError, OperationSymbol, Sort};

/// Word over the letters `1..=k`, rendered with `a`, `b`, ...
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.0 {
            write!(f, "{}", (b'a' + l - 1) as char)?;
        }
        Ok(())
    }
}

/// Free monoid over `letters` letters: concatenation `*` and `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordAlgebra {
    pub letters: u8,
}

impl WordAlgebra {
    pub fn new(letters: u8) -> Self {
        assert!((1..=26).contains(&letters), "1..=26 letters supported");
        WordAlgebra { letters }
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, AlgebraError> {
        let mut out = Vec::new();
        for c in text.chars().filter(|c| !c.is_whitespace()) {
            let idx = (c as u32).wrapping_sub('a' as u32) + 1;
            if !c.is_ascii_lowercase() || idx > self.letters as u32 {
                return Err(AlgebraError::InvalidLiteral {
                    text: text.to_string(),
                    detail: format!("letter `{c}` outside the {}-letter alphabet", self.letters),
                });
            }
            out.push(idx as u8);
        }
        Ok(Word(out))
    }
}

impl Algebra for WordAlgebra {
    type Value = Word;

    fn header(&self) -> String {
        format!("word {}", self.letters)
    }

    fn sorts(&self) -> Vec<Sort> {
        vec![Sort::new("word")]
    }

    fn operations(&self) -> Vec<OperationSymbol> {
        let s = Sort::new("word");
        vec![OperationSymbol::new("mul", &[&s, &s], &s)]
    }

    fn sort_of(&self, _value: &Word) -> Sort {
        Sort::new("word")
    }

    fn apply(&self, op: &str, args: &[Word]) -> Result<Word, AlgebraError> {
        match (op, args) {
            ("mul", [a, b]) => Ok(a.concat(b)),
            ("mul", _) => Err(AlgebraError::Arity {
                op: op.to_string(),
                expected: 2,
                got: args.len(),
            }),
            _ => Err(AlgebraError::UnknownOperation(op.to_string())),
        }
    }

    fn parse_literal(&self, text: &str) -> Result<Word, AlgebraError> {
        self.parse_word(text)
    }

    fn render_value(&self, value: &Word) -> String {
        format!("{{{value}}}")
    }

    fn constant(&self, name: &str) -> Option<Word> {
        (name == "eps").then(Word::empty)
    }
}
