//! Recursive-descent parser for the concrete ASCII formula syntax.
//!
//! Binding strength, tightest first: unary (`!`, `[]`, `<>`, `X(..)`),
//! then `U`/`W` (right associative), `&` (left), `|` (left), `->`/`<->`
//! (right). Atoms relate a declared variable to a constant.

use super::{Domain, Formula, LtlError, Rel, Value, VarDecl};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    Always,
    Eventually,
    Until,
    WeakUntil,
    NextOpen, // `X(`
    Rel(Rel),
    True,
    False,
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, bytes: src.as_bytes(), pos: 0 }
    }

    fn error(&self, msg: impl Into<String>) -> LtlError {
        LtlError::Parse { pos: self.pos, msg: msg.into() }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize)>, LtlError> {
        let mut out = Vec::new();
        while self.pos < self.bytes.len() {
            let start = self.pos;
            let c = self.bytes[self.pos];
            match c {
                b' ' | b'\t' => {
                    self.pos += 1;
                    continue;
                }
                b'(' => {
                    out.push((Tok::LParen, start));
                    self.pos += 1;
                }
                b')' => {
                    out.push((Tok::RParen, start));
                    self.pos += 1;
                }
                b'&' => {
                    out.push((Tok::Amp, start));
                    self.pos += 1;
                }
                b'|' => {
                    out.push((Tok::Pipe, start));
                    self.pos += 1;
                }
                b'[' => {
                    if self.bytes.get(self.pos + 1) == Some(&b']') {
                        out.push((Tok::Always, start));
                        self.pos += 2;
                    } else {
                        return Err(self.error("expected `[]`"));
                    }
                }
                b'!' => {
                    if self.bytes.get(self.pos + 1) == Some(&b'=') {
                        out.push((Tok::Rel(Rel::Ne), start));
                        self.pos += 2;
                    } else {
                        out.push((Tok::Bang, start));
                        self.pos += 1;
                    }
                }
                b'<' => match self.bytes.get(self.pos + 1) {
                    Some(b'>') => {
                        out.push((Tok::Eventually, start));
                        self.pos += 2;
                    }
                    Some(b'-') => {
                        if self.bytes.get(self.pos + 2) == Some(&b'>') {
                            out.push((Tok::DArrow, start));
                            self.pos += 3;
                        } else {
                            return Err(self.error("expected `<->`"));
                        }
                    }
                    Some(b'=') => {
                        out.push((Tok::Rel(Rel::Le), start));
                        self.pos += 2;
                    }
                    _ => {
                        out.push((Tok::Rel(Rel::Lt), start));
                        self.pos += 1;
                    }
                },
                b'>' => {
                    if self.bytes.get(self.pos + 1) == Some(&b'=') {
                        out.push((Tok::Rel(Rel::Ge), start));
                        self.pos += 2;
                    } else {
                        out.push((Tok::Rel(Rel::Gt), start));
                        self.pos += 1;
                    }
                }
                b'=' => {
                    out.push((Tok::Rel(Rel::Eq), start));
                    self.pos += 1;
                }
                b'-' => match self.bytes.get(self.pos + 1) {
                    Some(b'>') => {
                        out.push((Tok::Arrow, start));
                        self.pos += 2;
                    }
                    Some(d) if d.is_ascii_digit() => {
                        self.pos += 1;
                        let n = self.lex_number(start)?;
                        out.push((Tok::Int(-n), start));
                    }
                    _ => return Err(self.error("expected `->` or negative number")),
                },
                d if d.is_ascii_digit() => {
                    let n = self.lex_number(start)?;
                    out.push((Tok::Int(n), start));
                }
                a if a.is_ascii_alphabetic() || a == b'_' => {
                    let ident = self.lex_ident();
                    let tok = match ident.as_str() {
                        "U" => Tok::Until,
                        "W" => Tok::WeakUntil,
                        "True" | "true" => Tok::True,
                        "False" | "false" => Tok::False,
                        "X" if self.peek_lparen() => {
                            self.skip_ws();
                            self.pos += 1; // consume `(`
                            Tok::NextOpen
                        }
                        _ => Tok::Ident(ident),
                    };
                    out.push((tok, start));
                }
                _ => {
                    return Err(self.error(format!(
                        "unexpected character `{}`",
                        &self.src[start..start + 1]
                    )))
                }
            }
        }
        Ok(out)
    }

    fn lex_number(&mut self, start: usize) -> Result<i64, LtlError> {
        let from = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.src[from..self.pos]
            .parse()
            .map_err(|_| LtlError::Parse { pos: start, msg: "bad integer".into() })
    }

    fn lex_ident(&mut self) -> String {
        let from = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        self.src[from..self.pos].to_string()
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && (self.bytes[self.pos] == b' ' || self.bytes[self.pos] == b'\t')
        {
            self.pos += 1;
        }
    }

    fn peek_lparen(&self) -> bool {
        let mut p = self.pos;
        while p < self.bytes.len() && (self.bytes[p] == b' ' || self.bytes[p] == b'\t') {
            p += 1;
        }
        self.bytes.get(p) == Some(&b'(')
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    decls: &'a [VarDecl],
    src_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(_, p)| *p).unwrap_or(self.src_len)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        self.idx += 1;
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), LtlError> {
        if self.peek() == Some(&t) {
            self.idx += 1;
            Ok(())
        } else {
            Err(LtlError::Parse { pos: self.pos(), msg: format!("expected {what}") })
        }
    }

    fn parse_iff(&mut self) -> Result<Formula, LtlError> {
        let lhs = self.parse_or()?;
        match self.peek() {
            Some(Tok::Arrow) => {
                self.idx += 1;
                Ok(lhs.implies(self.parse_iff()?))
            }
            Some(Tok::DArrow) => {
                self.idx += 1;
                Ok(lhs.iff(self.parse_iff()?))
            }
            _ => Ok(lhs),
        }
    }

    fn parse_or(&mut self) -> Result<Formula, LtlError> {
        let mut lhs = self.parse_and()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.idx += 1;
            lhs = lhs.or(self.parse_and()?);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Formula, LtlError> {
        let mut lhs = self.parse_until()?;
        while self.peek() == Some(&Tok::Amp) {
            self.idx += 1;
            lhs = lhs.and(self.parse_until()?);
        }
        Ok(lhs)
    }

    fn parse_until(&mut self) -> Result<Formula, LtlError> {
        let lhs = self.parse_unary()?;
        match self.peek() {
            Some(Tok::Until) => {
                self.idx += 1;
                Ok(lhs.until(self.parse_until()?))
            }
            Some(Tok::WeakUntil) => {
                self.idx += 1;
                Ok(lhs.weak_until(self.parse_until()?))
            }
            _ => Ok(lhs),
        }
    }

    fn parse_unary(&mut self) -> Result<Formula, LtlError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.idx += 1;
                Ok(self.parse_unary()?.not())
            }
            Some(Tok::Always) => {
                self.idx += 1;
                Ok(self.parse_unary()?.always())
            }
            Some(Tok::Eventually) => {
                self.idx += 1;
                Ok(self.parse_unary()?.eventually())
            }
            Some(Tok::NextOpen) => {
                self.idx += 1;
                let inner = self.parse_iff()?;
                self.expect(Tok::RParen, "`)` closing X(...)")?;
                Ok(inner.next())
            }
            _ => self.parse_primary(),
        }
    }

    fn parse_primary(&mut self) -> Result<Formula, LtlError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::LParen) => {
                let inner = self.parse_iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::True) => Ok(Formula::True),
            Some(Tok::False) => Ok(Formula::false_()),
            Some(Tok::Ident(name)) => {
                let var = self
                    .decls
                    .iter()
                    .position(|d| d.name == name)
                    .ok_or(LtlError::UnknownVar(name.clone()))?;
                if let Some(Tok::Rel(rel)) = self.peek().cloned() {
                    self.idx += 1;
                    let val = self.parse_const(var)?;
                    check_atom(self.decls, var, rel, &val)?;
                    Ok(Formula::atom(var, rel, val))
                } else {
                    match self.decls[var].domain {
                        Domain::Bool(_) => Ok(Formula::var(var)),
                        _ => Err(LtlError::Parse {
                            pos,
                            msg: format!("non-boolean variable `{name}` needs a relation"),
                        }),
                    }
                }
            }
            _ => Err(LtlError::Parse { pos, msg: "expected a formula".into() }),
        }
    }

    fn parse_const(&mut self, var: usize) -> Result<Value, LtlError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(i)) => Ok(Value::Int(i)),
            Some(Tok::True) => Ok(Value::Bool(true)),
            Some(Tok::False) => Ok(Value::Bool(false)),
            Some(Tok::Ident(s)) => match &self.decls[var].domain {
                Domain::Enum(_) => Ok(Value::Sym(s)),
                _ => Err(LtlError::Parse {
                    pos,
                    msg: format!("`{s}` is not a constant of `{}`", self.decls[var].name),
                }),
            },
            _ => Err(LtlError::Parse { pos, msg: "expected a constant".into() }),
        }
    }
}

fn check_atom(decls: &[VarDecl], var: usize, rel: Rel, val: &Value) -> Result<(), LtlError> {
    let d = &decls[var];
    if !d.domain.contains(val) {
        return Err(LtlError::OutOfDomain { var: d.name.clone(), val: val.to_string() });
    }
    let ordered = matches!(d.domain, Domain::Int { .. });
    if !ordered && !matches!(rel, Rel::Eq | Rel::Ne) {
        return Err(LtlError::BadRelation { rel: rel.to_string(), var: d.name.clone() });
    }
    Ok(())
}

/// Parse a formula in the concrete syntax against declared variables.
pub fn parse_formula(text: &str, decls: &[VarDecl]) -> Result<Formula, LtlError> {
    if text.trim().is_empty() {
        return Err(LtlError::Parse { pos: 0, msg: "empty formula".into() });
    }
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, idx: 0, decls, src_len: text.len() };
    let f = p.parse_iff()?;
    if p.idx != p.toks.len() {
        return Err(LtlError::Parse { pos: p.pos(), msg: "trailing input".into() });
    }
    Ok(f)
}

/// Parse a bare constant (`True`, `-1`, an enum symbol) against a domain.
pub fn parse_constant(text: &str, domain: &Domain) -> Result<Value, LtlError> {
    let t = text.trim();
    let v = match domain {
        Domain::Bool(_) => match t {
            "True" | "true" => Value::Bool(true),
            "False" | "false" => Value::Bool(false),
            _ => return Err(LtlError::Parse { pos: 0, msg: format!("bad boolean `{t}`") }),
        },
        Domain::Int { .. } => Value::Int(
            t.parse()
                .map_err(|_| LtlError::Parse { pos: 0, msg: format!("bad integer `{t}`") })?,
        ),
        Domain::Enum(_) => Value::Sym(t.to_string()),
    };
    if !domain.contains(&v) {
        return Err(LtlError::Parse { pos: 0, msg: format!("`{t}` outside domain") });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::Formula as F;

    fn decls() -> Vec<VarDecl> {
        vec![
            VarDecl::boolean("x"),
            VarDecl::boolean("y1"),
            VarDecl::boolean("y"),
            VarDecl::boolean("z"),
            VarDecl::boolean("a"),
            VarDecl::boolean("b"),
            VarDecl::boolean("c"),
            VarDecl::int("r", -1, 3),
            VarDecl::enumeration("m", &["gu", "cs", "sp", "sl"]),
        ]
    }

    #[test]
    fn worked_example_shape() {
        let f = parse_formula("[](x -> <> y1)", &decls()).unwrap();
        assert_eq!(f, F::var(0).implies(F::var(1).eventually()).always());
    }

    #[test]
    fn precedence_not_and_or() {
        let f = parse_formula("!x & y | z", &decls()).unwrap();
        assert_eq!(f, F::var(0).not().and(F::var(2)).or(F::var(3)));
    }

    #[test]
    fn until_is_right_associative() {
        let f = parse_formula("a U b U c", &decls()).unwrap();
        assert_eq!(f, F::var(4).until(F::var(5).until(F::var(6))));
    }

    #[test]
    fn until_binds_tighter_than_and() {
        let f = parse_formula("a U b & c", &decls()).unwrap();
        assert_eq!(f, F::var(4).until(F::var(5)).and(F::var(6)));
    }

    #[test]
    fn implication_is_right_associative() {
        let f = parse_formula("a -> b -> c", &decls()).unwrap();
        assert_eq!(f, F::var(4).implies(F::var(5).implies(F::var(6))));
    }

    #[test]
    fn integer_and_enum_atoms() {
        let f = parse_formula("r = -1 & m = gu", &decls()).unwrap();
        let lhs = F::atom(7, Rel::Eq, Value::Int(-1));
        let rhs = F::atom(8, Rel::Eq, Value::Sym("gu".into()));
        assert_eq!(f, lhs.and(rhs));
        assert!(parse_formula("r = 4", &decls()).is_err(), "out of domain");
        assert!(parse_formula("m < gu", &decls()).is_err(), "order on enum");
        assert!(parse_formula("w = 1", &decls()).is_err(), "unknown var");
    }

    #[test]
    fn next_requires_parentheses_and_x_can_be_a_name() {
        let mut ds = decls();
        ds.push(VarDecl::boolean("X_0"));
        let f = parse_formula("X(x) & X_0", &ds).unwrap();
        assert_eq!(f, F::var(0).next().and(F::var(9)));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_formula("x & & y", &decls()) {
            Err(LtlError::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn print_parse_round_trip() {
        let ds = decls();
        for text in [
            "[](x -> <> y1)",
            "!x & y | z",
            "a U b U c",
            "r = -1 & m = gu | r >= 2",
            "[](a <-> X(b -> c))",
            "x W (y U z)",
            "True",
            "!True",
            "[]<> (r != 0)",
        ] {
            let f = parse_formula(text, &ds).unwrap();
            let printed = f.display(&ds).to_string();
            let back = parse_formula(&printed, &ds).unwrap();
            assert_eq!(back, f, "{text} -> {printed}");
        }
    }
}
