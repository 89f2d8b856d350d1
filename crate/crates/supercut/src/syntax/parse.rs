use super::{Formula, Multiset, Sequent};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at position {position}: expected {expected}, found {found}")]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
    pub found: String,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    offset: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, offset: usize) -> Self {
        Parser { src, pos: 0, offset }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn error(&mut self, expected: &str) -> ParseError {
        let found = match self.peek() {
            Some(c) => format!("'{c}'"),
            None => "end of input".to_string(),
        };
        ParseError { position: self.offset + self.pos, expected: expected.to_string(), found }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some('|') {
            if self.src[self.pos..].starts_with("|-") {
                break;
            }
            self.pos += 1;
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some('&') {
            self.pos += 1;
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some('~') => {
                self.pos += 1;
                Ok(Formula::neg(self.unary()?))
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.disjunction()?;
                if self.peek() != Some(')') {
                    return Err(self.error("')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('T') => {
                self.pos += 1;
                self.constant(Formula::Top)
            }
            Some('F') => {
                self.pos += 1;
                self.constant(Formula::Bot)
            }
            Some(c) if c.is_ascii_lowercase() => {
                let start = self.pos;
                let rest = &self.src[start..];
                let len = rest
                    .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                    .unwrap_or(rest.len());
                self.pos += len;
                Ok(Formula::atom(&self.src[start..start + len]))
            }
            _ => Err(self.error("atom, 'T', 'F', '~' or '('")),
        }
    }

    fn constant(&mut self, f: Formula) -> Result<Formula, ParseError> {
        match self.src[self.pos..].chars().next() {
            Some(c) if c.is_ascii_alphanumeric() || c == '_' => {
                self.pos -= 1;
                Err(self.error("atom starting with a lowercase letter"))
            }
            _ => Ok(f),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.error("operator or end of input")),
        }
    }
}

/// Parse a formula: `~` binds tighter than `&`, which binds tighter than `|`.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_at(text, 0)
}

fn parse_formula_at(text: &str, offset: usize) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, offset);
    let f = p.disjunction()?;
    p.finish()?;
    Ok(f)
}

fn parse_side(text: &str, offset: usize) -> Result<Multiset, ParseError> {
    if text.trim().is_empty() {
        return Ok(Multiset::new());
    }
    let mut out = Vec::new();
    let mut start = 0;
    for piece in text.split(',') {
        out.push(parse_formula_at(piece, offset + start)?);
        start += piece.len() + 1;
    }
    Ok(out.into_iter().collect())
}

/// Parse a sequent such as `p, q |- r, s`; either side may be empty.
pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let Some(at) = text.find("|-") else {
        return Err(ParseError {
            position: text.len(),
            expected: "'|-'".to_string(),
            found: "end of input".to_string(),
        });
    };
    let left = parse_side(&text[..at], 0)?;
    let right = parse_side(&text[at + 2..], at + 2)?;
    if let Some(extra) = text[at + 2..].find("|-") {
        return Err(ParseError {
            position: at + 2 + extra,
            expected: "formula".to_string(),
            found: "'|-'".to_string(),
        });
    }
    Ok(Sequent { left, right })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn grammar_examples() {
        assert_eq!(parse_formula("~p | q").unwrap(), Formula::or(Formula::neg(p()), q()));
        assert_eq!(parse_formula("T").unwrap(), Formula::Top);
        assert_eq!(
            parse_formula("(p & ~p) | (q & ~q)").unwrap(),
            Formula::or(Formula::and(p(), Formula::neg(p())), Formula::and(q(), Formula::neg(q())))
        );
    }

    #[test]
    fn associativity_and_precedence() {
        let r = Formula::atom("r");
        assert_eq!(parse_formula("p & q & r").unwrap(), Formula::and(Formula::and(p(), q()), r.clone()));
        assert_eq!(parse_formula("p | q & r").unwrap(), Formula::or(p(), Formula::and(q(), r)));
        assert_eq!(parse_formula("~~p").unwrap(), Formula::neg(Formula::neg(p())));
    }

    #[test]
    fn errors_carry_position() {
        let e = parse_formula("p & ").unwrap_err();
        assert_eq!(e.position, 4);
        let e = parse_formula("p q").unwrap_err();
        assert_eq!(e.position, 2);
        assert!(parse_formula("(p").is_err());
        assert!(parse_formula("_p").is_err());
        assert!(parse_formula("Tx").is_err());
        assert!(parse_formula("P").is_err());
    }

    #[test]
    fn sequents() {
        let s = parse_sequent("p, q |- r, s").unwrap();
        assert_eq!(s.left.len(), 2);
        assert_eq!(s.right.len(), 2);
        assert_eq!(parse_sequent("|-").unwrap(), Sequent::empty());
        assert_eq!(parse_sequent(" |- p | q").unwrap().right.len(), 1);
        assert!(parse_sequent("p").is_err());
        assert!(parse_sequent("p |- q |- r").is_err());
        let e = parse_sequent("p |- q, &").unwrap_err();
        assert_eq!(e.position, 8);
    }
}
