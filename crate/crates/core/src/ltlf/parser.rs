//! Recursive-descent parser for the concrete formula syntax.
//!
//! Atoms match `[a-zA-Z_][a-zA-Z0-9_]*`; the operators are `!`, `&`, `|`,
//! `->`, `X`, `U`, `F`, `G` plus the constants `true` and `false`.
//! Precedence from tightest to loosest: unary (`!`, `X`, `F`, `G`), `U`,
//! `&`, `|`, `->`. `U` and `->` associate to the right, `&` and `|` to the
//! left.

use std::fmt;

use thiserror::Error;

use super::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    pub message: String,
    pub position: usize,
}

impl ParseError {
    fn new(message: impl Into<String>, position: usize) -> Self {
        ParseError { message: message.into(), position }
    }
}

/// Parses a formula and returns it in normalised core form.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, input_len: text.len() };
    let formula = parser.implication()?;
    if let Some(tok) = parser.peek() {
        return Err(ParseError::new(
            format!("unexpected {} after end of formula", tok.kind.describe()),
            tok.position,
        ));
    }
    Ok(formula.normalize())
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    Ident(String),
    True,
    False,
    Next,
    Until,
    Eventually,
    Henceforth,
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Ident(name) => format!("identifier '{name}'"),
            TokenKind::True => "'true'".into(),
            TokenKind::False => "'false'".into(),
            TokenKind::Next => "'X'".into(),
            TokenKind::Until => "'U'".into(),
            TokenKind::Eventually => "'F'".into(),
            TokenKind::Henceforth => "'G'".into(),
            TokenKind::Not => "'!'".into(),
            TokenKind::And => "'&'".into(),
            TokenKind::Or => "'|'".into(),
            TokenKind::Implies => "'->'".into(),
            TokenKind::LParen => "'('".into(),
            TokenKind::RParen => "')'".into(),
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    position: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = text[i..].chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let position = i;
        let kind = match c {
            '!' => {
                i += 1;
                TokenKind::Not
            }
            '&' => {
                if bytes.get(i + 1) == Some(&b'&') {
                    return Err(ParseError::new("unknown operator '&&' (use '&')", position));
                }
                i += 1;
                TokenKind::And
            }
            '|' => {
                if bytes.get(i + 1) == Some(&b'|') {
                    return Err(ParseError::new("unknown operator '||' (use '|')", position));
                }
                i += 1;
                TokenKind::Or
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 2;
                    TokenKind::Implies
                } else {
                    return Err(ParseError::new("unknown operator '-' (did you mean '->'?)", position));
                }
            }
            '(' => {
                i += 1;
                TokenKind::LParen
            }
            ')' => {
                i += 1;
                TokenKind::RParen
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() {
                    let c = text[i..].chars().next().unwrap();
                    if c.is_ascii_alphanumeric() || c == '_' {
                        i += c.len_utf8();
                    } else {
                        break;
                    }
                }
                match &text[start..i] {
                    "true" => TokenKind::True,
                    "false" => TokenKind::False,
                    "X" => TokenKind::Next,
                    "U" => TokenKind::Until,
                    "F" => TokenKind::Eventually,
                    "G" => TokenKind::Henceforth,
                    ident => TokenKind::Ident(ident.to_string()),
                }
            }
            other => {
                return Err(ParseError::new(
                    format!("unknown operator or character {other:?}"),
                    position,
                ));
            }
        };
        tokens.push(Token { kind, position });
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    input_len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned();
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().map(|t| &t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn here(&self) -> usize {
        self.peek().map(|t| t.position).unwrap_or(self.input_len)
    }

    // implication, right-associative, loosest
    fn implication(&mut self) -> Result<Formula, ParseError> {
        let left = self.disjunction()?;
        if self.eat(&TokenKind::Implies) {
            let right = self.implication()?;
            Ok(left.implies(right))
        } else {
            Ok(left)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.conjunction()?;
        while self.eat(&TokenKind::Or) {
            let right = self.conjunction()?;
            left = left.or(right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.until()?;
        while self.eat(&TokenKind::And) {
            let right = self.until()?;
            left = left.and(right);
        }
        Ok(left)
    }

    // until, right-associative: `p U q U r` is `p U (q U r)`
    fn until(&mut self) -> Result<Formula, ParseError> {
        let left = self.unary()?;
        if self.eat(&TokenKind::Until) {
            let right = self.until()?;
            Ok(left.until(right))
        } else {
            Ok(left)
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().map(|t| t.kind.clone()) {
            Some(TokenKind::Not) => {
                self.pos += 1;
                Ok(self.unary()?.not())
            }
            Some(TokenKind::Next) => {
                self.pos += 1;
                Ok(self.unary()?.next())
            }
            Some(TokenKind::Eventually) => {
                self.pos += 1;
                Ok(self.unary()?.eventually())
            }
            Some(TokenKind::Henceforth) => {
                self.pos += 1;
                Ok(self.unary()?.henceforth())
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let position = self.here();
        match self.bump() {
            Some(Token { kind: TokenKind::True, .. }) => Ok(Formula::Top),
            Some(Token { kind: TokenKind::False, .. }) => Ok(Formula::Bottom),
            Some(Token { kind: TokenKind::Ident(name), .. }) => Ok(Formula::Atom(name)),
            Some(Token { kind: TokenKind::LParen, .. }) => {
                let inner = self.implication()?;
                if self.eat(&TokenKind::RParen) {
                    Ok(inner)
                } else {
                    Err(ParseError::new("unbalanced parentheses: expected ')'", self.here()))
                }
            }
            Some(Token { kind: TokenKind::RParen, .. }) => {
                Err(ParseError::new("unbalanced parentheses: unexpected ')'", position))
            }
            Some(tok) => Err(ParseError::new(
                format!("expected a formula, found {}", tok.kind.describe()),
                position,
            )),
            None => Err(ParseError::new("unexpected end of input", position)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eventually_atom() {
        assert_eq!(
            parse_formula("F p1").unwrap(),
            Formula::atom("p1").eventually().normalize()
        );
    }

    #[test]
    fn until_is_right_associative() {
        assert_eq!(
            parse_formula("p U q U r").unwrap(),
            parse_formula("p U (q U r)").unwrap()
        );
        assert_ne!(
            parse_formula("p U q U r").unwrap(),
            parse_formula("(p U q) U r").unwrap()
        );
    }

    #[test]
    fn henceforth_core_form() {
        let expected = Formula::Top.until(Formula::atom("p").not()).not();
        assert_eq!(parse_formula("G p").unwrap(), expected);
    }

    #[test]
    fn precedence_unary_over_until_over_and_over_or_over_implies() {
        assert_eq!(
            parse_formula("!p U q & r | s -> t").unwrap(),
            Formula::atom("p")
                .not()
                .until(Formula::atom("q"))
                .and(Formula::atom("r"))
                .or(Formula::atom("s"))
                .implies(Formula::atom("t"))
                .normalize()
        );
    }

    #[test]
    fn and_is_left_associative() {
        assert_eq!(
            parse_formula("a & b & c").unwrap(),
            Formula::atom("a")
                .and(Formula::atom("b"))
                .and(Formula::atom("c"))
                .normalize()
        );
    }

    #[test]
    fn error_reports_position() {
        let err = parse_formula("p U (q U r").unwrap_err();
        assert!(err.message.contains("unbalanced"), "{err}");
        let err = parse_formula("p @ q").unwrap_err();
        assert_eq!(err.position, 2);
        assert!(err.message.contains("unknown operator"), "{err}");
    }

    #[test]
    fn double_ampersand_is_rejected_with_hint() {
        let err = parse_formula("p && q").unwrap_err();
        assert!(err.message.contains("&&"), "{err}");
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        let err = parse_formula("p q").unwrap_err();
        assert!(err.message.contains("after end of formula"), "{err}");
    }

    #[test]
    fn empty_input_is_rejected() {
        let err = parse_formula("   ").unwrap_err();
        assert!(err.message.contains("end of input"), "{err}");
    }

    #[test]
    fn keywords_are_not_atoms_but_prefixed_names_are() {
        assert_eq!(
            parse_formula("Fast").unwrap(),
            Formula::Atom("Fast".into())
        );
        assert!(parse_formula("F").is_err());
    }
}
