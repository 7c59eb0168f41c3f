//! Tokenizer shared by the polynomial, term, tree and file-format parsers.

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(pos: usize, message: impl Into<String>) -> Self {
        ParseError {
            pos,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Int(BigInt),
    Ident(String),
    /// Raw text between a matching pair of braces.
    Literal(String),
    /// The reserved leaf symbol `_|_`.
    Bottom,
    Sym(char),
}

#[derive(Debug, Clone)]
pub struct Lexer {
    tokens: Vec<(usize, Token)>,
    cursor: usize,
    end: usize,
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

impl Lexer {
    pub fn new(text: &str) -> Result<Self, ParseError> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let (pos, c) = chars[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '_' && text[pos..].starts_with("_|_") {
                tokens.push((pos, Token::Bottom));
                i += 3;
                continue;
            }
            if c.is_ascii_digit() {
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let end = chars.get(i).map_or(text.len(), |&(p, _)| p);
                let value: BigInt = text[pos..end].parse().expect("digits");
                tokens.push((pos, Token::Int(value)));
                continue;
            }
            if ident_start(c) {
                let mut end_idx = i;
                while end_idx < chars.len() && ident_continue(chars[end_idx].1) {
                    end_idx += 1;
                }
                // Qualified register names such as `r2.1`.
                while end_idx + 1 < chars.len()
                    && chars[end_idx].1 == '.'
                    && chars[end_idx + 1].1.is_ascii_digit()
                {
                    end_idx += 1;
                    while end_idx < chars.len() && chars[end_idx].1.is_ascii_digit() {
                        end_idx += 1;
                    }
                }
                let end = chars.get(end_idx).map_or(text.len(), |&(p, _)| p);
                tokens.push((pos, Token::Ident(text[pos..end].to_string())));
                i = end_idx;
                continue;
            }
            if c == '{' {
                let mut depth = 1;
                let mut j = i + 1;
                while j < chars.len() {
                    match chars[j].1 {
                        '{' => depth += 1,
                        '}' => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        _ => {}
                    }
                    j += 1;
                }
                if j >= chars.len() {
                    return Err(ParseError::new(pos, "unterminated `{`"));
                }
                let inner_start = chars[i + 1..].first().map_or(text.len(), |&(p, _)| p);
                let inner_end = chars[j].0;
                let inner = if inner_start <= inner_end {
                    &text[inner_start..inner_end]
                } else {
                    ""
                };
                tokens.push((pos, Token::Literal(inner.to_string())));
                i = j + 1;
                continue;
            }
            let sym = if c == '◦' { '?' } else { c };
            if "+-*/^()[],;:=?<>|".contains(sym) {
                tokens.push((pos, Token::Sym(sym)));
                i += 1;
                continue;
            }
            return Err(ParseError::new(pos, format!("unexpected character `{c}`")));
        }
        Ok(Lexer {
            tokens,
            cursor: 0,
            end: text.len(),
        })
    }

    pub fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.cursor).map(|(_, t)| t)
    }

    pub fn peek_at(&self, offset: usize) -> Option<&Token> {
        self.tokens.get(self.cursor + offset).map(|(_, t)| t)
    }

    pub fn pos(&self) -> usize {
        self.tokens.get(self.cursor).map_or(self.end, |(p, _)| *p)
    }

    pub fn next(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.cursor).map(|(_, t)| t.clone());
        if tok.is_some() {
            self.cursor += 1;
        }
        tok
    }

    pub fn at_end(&self) -> bool {
        self.cursor >= self.tokens.len()
    }

    pub fn eat(&mut self, sym: char) -> bool {
        if self.peek() == Some(&Token::Sym(sym)) {
            self.cursor += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, sym: char) -> Result<(), ParseError> {
        if self.eat(sym) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{sym}`")))
        }
    }

    pub fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.pos(), message)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_qualified_registers_and_literals() {
        let mut lx = Lexer::new("r2.1 + {a(b,c)} * _|_").unwrap();
        assert_eq!(lx.next(), Some(Token::Ident("r2.1".into())));
        assert_eq!(lx.next(), Some(Token::Sym('+')));
        assert_eq!(lx.next(), Some(Token::Literal("a(b,c)".into())));
        assert_eq!(lx.next(), Some(Token::Sym('*')));
        assert_eq!(lx.next(), Some(Token::Bottom));
        assert!(lx.at_end());
    }

    #[test]
    fn hole_marker_alias() {
        let mut lx = Lexer::new("◦ ?").unwrap();
        assert_eq!(lx.next(), Some(Token::Sym('?')));
        assert_eq!(lx.next(), Some(Token::Sym('?')));
    }

    #[test]
    fn empty_literal_and_unterminated() {
        let mut lx = Lexer::new("{}").unwrap();
        assert_eq!(lx.next(), Some(Token::Literal(String::new())));
        assert!(Lexer::new("{a").is_err());
    }
}
