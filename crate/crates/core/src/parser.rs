//! Recursive-descent parser for the ASCII formula syntax.
//!
//! ```text
//! formula := iff
//! iff     := imp ("<->" imp)*
//! imp     := or ("->" imp)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "!" unary | "K_" ident unary | "Khat_" ident unary
//!          | "[" ident "]" unary | "<" ident ">" unary
//!          | "[" ident ":" ident "]" unary
//!          | "xi" "(" ident "," ident "," ident ")" | ident | "(" formula ")"
//! ```

use std::fmt;

use thiserror::Error;

use crate::formula::{ActionId, AgentId, Formula, PropId, Signature};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum IdentKind {
    Agent,
    Prop,
    Action,
}

impl fmt::Display for IdentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IdentKind::Agent => "agent",
            IdentKind::Prop => "proposition",
            IdentKind::Action => "action",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum ParseError {
    #[error("syntax error at column {column}: found {found}, expected {}", expected.join(" or "))]
    Syntax {
        column: usize,
        found: String,
        expected: Vec<&'static str>,
    },
    #[error("unknown {kind} `{name}` at column {column}")]
    UnknownIdentifier {
        name: String,
        kind: IdentKind,
        column: usize,
    },
    #[error("formula mixes [A:σ] updates with [σ] updates or xi atoms")]
    MixedFragment,
}

#[derive(Clone, PartialEq, Debug)]
enum Tok {
    Ident(String),
    Bang,
    Amp,
    Pipe,
    Arrow,
    DoubleArrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Colon,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DoubleArrow => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Tokens paired with their 1-based column.
fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let (tok, len) = match c {
            '!' => (Tok::Bang, 1),
            '&' => (Tok::Amp, 1),
            '|' => (Tok::Pipe, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            '>' => (Tok::Gt, 1),
            ':' => (Tok::Colon, 1),
            ',' => (Tok::Comma, 1),
            '-' if chars.get(i + 1) == Some(&'>') => (Tok::Arrow, 2),
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                (Tok::DoubleArrow, 3)
            }
            '<' => (Tok::Lt, 1),
            c if is_ident_char(c) => {
                let start = i;
                let mut end = i;
                while end < chars.len() && is_ident_char(chars[end]) {
                    end += 1;
                }
                (Tok::Ident(chars[start..end].iter().collect()), end - start)
            }
            other => {
                return Err(ParseError::Syntax {
                    column,
                    found: format!("`{other}`"),
                    expected: vec!["a formula token"],
                })
            }
        };
        out.push((tok, column));
        i += len;
    }
    out.push((Tok::Eof, chars.len() + 1));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    sig: Option<&'a Signature>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError::Syntax {
            column: self.column(),
            found: self.peek().describe(),
            expected,
        }
    }

    fn expect(&mut self, tok: Tok, what: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(vec![what]))
        }
    }

    fn ident(&mut self) -> Result<(String, usize), ParseError> {
        let column = self.column();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, column))
            }
            _ => Err(self.error(vec!["identifier"])),
        }
    }

    fn agent(&self, name: &str, column: usize) -> Result<AgentId, ParseError> {
        let id = AgentId::new(name);
        self.resolve(
            self.sig.map(|s| s.has_agent(&id)),
            name,
            IdentKind::Agent,
            column,
        )?;
        Ok(id)
    }

    fn prop(&self, name: &str, column: usize) -> Result<PropId, ParseError> {
        let id = PropId::new(name);
        self.resolve(
            self.sig.map(|s| s.has_prop(&id)),
            name,
            IdentKind::Prop,
            column,
        )?;
        Ok(id)
    }

    fn action(&self, name: &str, column: usize) -> Result<ActionId, ParseError> {
        let id = ActionId::new(name);
        self.resolve(
            self.sig.map(|s| s.has_action(&id)),
            name,
            IdentKind::Action,
            column,
        )?;
        Ok(id)
    }

    fn resolve(
        &self,
        known: Option<bool>,
        name: &str,
        kind: IdentKind,
        column: usize,
    ) -> Result<(), ParseError> {
        if known == Some(false) {
            Err(ParseError::UnknownIdentifier {
                name: name.to_string(),
                kind,
                column,
            })
        } else {
            Ok(())
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.imp()?;
        while *self.peek() == Tok::DoubleArrow {
            self.bump();
            let rhs = self.imp()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.imp()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let column = self.column();
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::LBracket => {
                self.bump();
                let (first, first_col) = self.ident()?;
                if *self.peek() == Tok::Colon {
                    self.bump();
                    let (action, col) = self.ident()?;
                    let action = self.action(&action, col)?;
                    self.expect(Tok::RBracket, "`]`")?;
                    let body = self.unary()?;
                    Ok(Formula::update_am(&first, action, body))
                } else {
                    let action = self.action(&first, first_col)?;
                    self.expect(Tok::RBracket, "`]` or `:`")?;
                    Ok(Formula::update(action, self.unary()?))
                }
            }
            Tok::Lt => {
                self.bump();
                let (name, col) = self.ident()?;
                let action = self.action(&name, col)?;
                self.expect(Tok::Gt, "`>`")?;
                Ok(Formula::diamond(action, self.unary()?))
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(agent) = name.strip_prefix("Khat_").filter(|a| !a.is_empty()) {
                    let agent = self.agent(agent, column + 5)?;
                    return Ok(Formula::khat(agent, self.unary()?));
                }
                if let Some(agent) = name.strip_prefix("K_").filter(|a| !a.is_empty()) {
                    let agent = self.agent(agent, column + 2)?;
                    return Ok(Formula::knows(agent, self.unary()?));
                }
                if name == "xi" && *self.peek() == Tok::LParen {
                    self.bump();
                    let (agent, c1) = self.ident()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let (performed, c2) = self.ident()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let (confusable, c3) = self.ident()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Formula::Xi {
                        agent: self.agent(&agent, c1)?,
                        performed: self.action(&performed, c2)?,
                        confusable: self.action(&confusable, c3)?,
                    });
                }
                Ok(Formula::Atom(self.prop(&name, column)?))
            }
            _ => Err(self.error(vec!["`!`", "`(`", "`[`", "`<`", "identifier"])),
        }
    }
}

fn parse(text: &str, sig: Option<&Signature>) -> Result<Formula, ParseError> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
        sig,
    };
    let phi = parser.formula()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.error(vec!["`&`", "`|`", "`->`", "`<->`", "end of input"]));
    }
    if phi.fragment().is_none() {
        return Err(ParseError::MixedFragment);
    }
    Ok(phi)
}

/// Parses a formula, resolving every identifier against `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    parse(text, Some(sig))
}

/// Parses a formula without resolving identifiers.
pub fn parse_formula_unchecked(text: &str) -> Result<Formula, ParseError> {
    parse(text, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new(["a", "b"], ["p", "q"])
            .with_action("sp", "p")
            .unwrap()
            .with_action("snp", "!p")
            .unwrap()
    }

    fn p() -> Formula {
        Formula::atom("p")
    }

    #[test]
    fn knows_atom() {
        assert_eq!(
            parse_formula("K_a p", &sig()).unwrap(),
            Formula::knows("a", p())
        );
    }

    #[test]
    fn dynamic_update_of_disjunction() {
        let expected = Formula::update(
            "sp",
            Formula::or(
                Formula::knows("b", p()),
                Formula::knows("b", Formula::not(p())),
            ),
        );
        assert_eq!(
            parse_formula("[sp] (K_b p | K_b !p)", &sig()).unwrap(),
            expected
        );
    }

    #[test]
    fn xi_interaction_instance() {
        let xi = Formula::xi("a", "sp", "snp");
        assert_eq!(
            parse_formula("xi(a, sp, snp) -> K_a xi(a, sp, snp)", &sig()).unwrap(),
            Formula::implies(xi.clone(), Formula::knows("a", xi))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let s = sig();
        let q = Formula::atom("q");
        assert_eq!(
            parse_formula("p & q | !p", &s).unwrap(),
            Formula::or(Formula::and(p(), q.clone()), Formula::not(p()))
        );
        assert_eq!(
            parse_formula("p -> q -> p", &s).unwrap(),
            Formula::implies(p(), Formula::implies(q.clone(), p()))
        );
        assert_eq!(
            parse_formula("K_a p & q", &s).unwrap(),
            Formula::and(Formula::knows("a", p()), q.clone())
        );
        assert_eq!(
            parse_formula("p <-> q", &s).unwrap(),
            Formula::iff(p(), q.clone())
        );
        assert_eq!(
            parse_formula("<sp> Khat_b q", &s).unwrap(),
            Formula::diamond("sp", Formula::khat("b", q))
        );
        assert_eq!(
            parse_formula("[A0:sp] p", &s).unwrap(),
            Formula::update_am("A0", "sp", p())
        );
    }

    #[test]
    fn unknown_identifiers() {
        let s = sig();
        assert!(matches!(
            parse_formula("K_c p", &s),
            Err(ParseError::UnknownIdentifier {
                kind: IdentKind::Agent,
                column: 3,
                ..
            })
        ));
        assert!(matches!(
            parse_formula("p & r", &s),
            Err(ParseError::UnknownIdentifier {
                kind: IdentKind::Prop,
                column: 5,
                ..
            })
        ));
        assert!(matches!(
            parse_formula("[t] p", &s),
            Err(ParseError::UnknownIdentifier {
                kind: IdentKind::Action,
                ..
            })
        ));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let s = sig();
        match parse_formula("p &", &s) {
            Err(ParseError::Syntax { column, found, .. }) => {
                assert_eq!(column, 4);
                assert_eq!(found, "end of input");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_formula("(p", &s),
            Err(ParseError::Syntax { column: 3, .. })
        ));
        assert!(matches!(
            parse_formula("p q", &s),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_formula("p # q", &s),
            Err(ParseError::Syntax { column: 3, .. })
        ));
    }

    #[test]
    fn mixed_languages_rejected() {
        assert_eq!(
            parse_formula("[A0:sp] p & [sp] p", &sig()),
            Err(ParseError::MixedFragment)
        );
        assert_eq!(
            parse_formula("[A0:sp] xi(a, sp, sp)", &sig()),
            Err(ParseError::MixedFragment)
        );
    }
}
