use thiserror::Error;

use super::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unknown token `{token}` at byte {pos}")]
    UnknownToken { token: String, pos: usize },
    #[error("syntax error at byte {pos}: expected {expected}, found {found}")]
    Unexpected {
        pos: usize,
        expected: &'static str,
        found: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Top,
    Bottom,
    Not,
    K,
    Khat,
    Box,
    Dia,
    And,
    Or,
    Imp,
    Iff,
    LBrack,
    RBrack,
    Lt,
    Gt,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Top => "`T`".into(),
            Tok::Bottom => "`F`".into(),
            Tok::Not => "`~`".into(),
            Tok::K => "`K`".into(),
            Tok::Khat => "`Khat`".into(),
            Tok::Box => "`A`".into(),
            Tok::Dia => "`E`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Imp => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let simple = match c {
            b'~' => Some(Tok::Not),
            b'&' => Some(Tok::And),
            b'|' => Some(Tok::Or),
            b'[' => Some(Tok::LBrack),
            b']' => Some(Tok::RBrack),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'>' => Some(Tok::Gt),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push((tok, start));
            i += 1;
            continue;
        }
        if text[i..].starts_with("<->") {
            out.push((Tok::Iff, start));
            i += 3;
            continue;
        }
        if c == b'<' {
            out.push((Tok::Lt, start));
            i += 1;
            continue;
        }
        if text[i..].starts_with("->") {
            out.push((Tok::Imp, start));
            i += 2;
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            let tok = match word {
                "K" => Tok::K,
                "Khat" => Tok::Khat,
                "A" => Tok::Box,
                "E" => Tok::Dia,
                "T" => Tok::Top,
                "F" => Tok::Bottom,
                w if w.as_bytes()[0].is_ascii_lowercase() => Tok::Ident(w.to_string()),
                w => {
                    return Err(ParseError::UnknownToken {
                        token: w.to_string(),
                        pos: start,
                    })
                }
            };
            out.push((tok, start));
            continue;
        }
        let ch = text[i..].chars().next().unwrap();
        return Err(ParseError::UnknownToken {
            token: ch.to_string(),
            pos: start,
        });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn found(&self) -> String {
        self.peek()
            .map(Tok::describe)
            .unwrap_or_else(|| "end of input".into())
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError::Unexpected {
                pos: self.offset(),
                expected,
                found: self.found(),
            })
        }
    }

    fn ident(&mut self, expected: &'static str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            _ => Err(ParseError::Unexpected {
                pos: self.offset(),
                expected,
                found: self.found(),
            }),
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.imp()?;
        while self.peek() == Some(&Tok::Iff) {
            self.pos += 1;
            let rhs = self.imp()?;
            lhs = lhs.iff(rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Imp) {
            self.pos += 1;
            let rhs = self.imp()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let rhs = self.and()?;
            lhs = lhs.or(rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = lhs.and(rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(ParseError::Unexpected {
                pos: self.offset(),
                expected: "formula",
                found: self.found(),
            });
        };
        self.pos += 1;
        Ok(match tok {
            Tok::Ident(name) => Formula::Atom(name),
            Tok::Top => Formula::Top,
            Tok::Bottom => Formula::bottom(),
            Tok::Not => self.unary()?.not(),
            Tok::K => {
                let agent = self.ident("agent name")?;
                Formula::knows(agent, self.unary()?)
            }
            Tok::Khat => {
                let agent = self.ident("agent name")?;
                Formula::considers(agent, self.unary()?)
            }
            Tok::Box => Formula::arb(self.unary()?),
            Tok::Dia => Formula::arb_dual(self.unary()?),
            Tok::LBrack => {
                let ann = self.iff()?;
                self.expect(Tok::RBrack, "`]`")?;
                Formula::announce(ann, self.unary()?)
            }
            Tok::Lt => {
                let ann = self.iff()?;
                self.expect(Tok::Gt, "`>`")?;
                Formula::announce_dual(ann, self.unary()?)
            }
            Tok::LParen => {
                let inner = self.iff()?;
                self.expect(Tok::RParen, "`)`")?;
                inner
            }
            other => {
                self.pos -= 1;
                return Err(ParseError::Unexpected {
                    pos: self.offset(),
                    expected: "formula",
                    found: other.describe(),
                });
            }
        })
    }
}

/// Parses the concrete grammar, expanding every derived connective into the
/// primitive constructors.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let formula = parser.iff()?;
    if parser.pos != parser.toks.len() {
        return Err(ParseError::Unexpected {
            pos: parser.offset(),
            expected: "end of input",
            found: parser.found(),
        });
    }
    Ok(formula)
}
