//! Concrete ASCII syntax.
//!
//! ```text
//! impl  := or (("->" | "<->") impl)?
//! or    := and ("|" and)*
//! and   := unary ("&" unary)*
//! unary := "~" unary | ("J0" | "J1" | "J2") unary | atom
//! atom  := ident | "0" | "1" | "(" impl ")"
//! ```
//!
//! `->` and `<->` are expanded while parsing, so they never appear in a [`Term`].

use thiserror::Error;

use super::{BinaryOp, Constant, Equation, QuasiIdentity, Rule, Term, UnaryOp};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: unknown operator `{name}`")]
    UnknownOperator { line: usize, column: usize, name: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Zero,
    One,
    Not,
    And,
    Or,
    Arrow,
    DoubleArrow,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Zero => "`0`".into(),
            Tok::One => "`1`".into(),
            Tok::Not => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DoubleArrow => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l, col) = (line, column);
        let push = |tok, len: usize, out: &mut Vec<Spanned>| {
            out.push(Spanned { tok, line: l, column: col });
            len
        };
        let consumed = match c {
            '\n' => {
                line += 1;
                column = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => 1,
            '~' => push(Tok::Not, 1, &mut out),
            '&' => push(Tok::And, 1, &mut out),
            '|' => push(Tok::Or, 1, &mut out),
            '(' => push(Tok::LParen, 1, &mut out),
            ')' => push(Tok::RParen, 1, &mut out),
            '-' if chars.get(i + 1) == Some(&'>') => push(Tok::Arrow, 2, &mut out),
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                push(Tok::DoubleArrow, 3, &mut out)
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_alphanumeric() {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                match word.as_str() {
                    "0" => push(Tok::Zero, 1, &mut out),
                    "1" => push(Tok::One, 1, &mut out),
                    _ => {
                        return Err(ParseError::Syntax {
                            line: l,
                            column: col,
                            message: format!("unexpected `{word}`"),
                        })
                    }
                }
            }
            c if c.is_ascii_alphabetic() => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                push(Tok::Ident(word), j - i, &mut out)
            }
            other => {
                return Err(ParseError::Syntax {
                    line: l,
                    column: col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        i += consumed;
        column += consumed;
    }
    out.push(Spanned { tok: Tok::Eof, line, column });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, at: &Spanned, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: at.line, column: at.column, message: message.into() }
    }

    fn implication(&mut self) -> Result<Term, ParseError> {
        let lhs = self.disjunction()?;
        match self.peek().tok {
            Tok::Arrow => {
                self.bump();
                let rhs = self.implication()?;
                Ok(Term::implies(lhs, rhs))
            }
            Tok::DoubleArrow => {
                self.bump();
                let rhs = self.implication()?;
                Ok(Term::iff(lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn disjunction(&mut self) -> Result<Term, ParseError> {
        let mut t = self.conjunction()?;
        while self.peek().tok == Tok::Or {
            self.bump();
            let r = self.conjunction()?;
            t = Term::or(t, r);
        }
        Ok(t)
    }

    fn conjunction(&mut self) -> Result<Term, ParseError> {
        let mut t = self.unary()?;
        while self.peek().tok == Tok::And {
            self.bump();
            let r = self.unary()?;
            t = Term::and(t, r);
        }
        Ok(t)
    }

    fn unary(&mut self) -> Result<Term, ParseError> {
        let at = self.peek().clone();
        match &at.tok {
            Tok::Not => {
                self.bump();
                Ok(Term::neg(self.unary()?))
            }
            Tok::Ident(name) if matches!(name.as_str(), "J0" | "J1" | "J2") => {
                self.bump();
                let k = name.as_bytes()[1] - b'0';
                Ok(Term::j(k, self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let at = self.bump();
        match at.tok {
            Tok::Zero => Ok(Term::Const(Constant::Zero)),
            Tok::One => Ok(Term::Const(Constant::One)),
            Tok::Ident(name) => {
                if self.peek().tok == Tok::LParen {
                    return Err(ParseError::UnknownOperator { line: at.line, column: at.column, name });
                }
                Ok(Term::Var(name))
            }
            Tok::LParen => {
                let t = self.implication()?;
                let close = self.bump();
                if close.tok != Tok::RParen {
                    return Err(self.error(&close, format!("expected `)`, found {}", close.tok.describe())));
                }
                Ok(t)
            }
            ref other => Err(self.error(&at, format!("expected a term, found {}", other.describe()))),
        }
    }
}

/// Parses a single term; the whole input must be consumed.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0 };
    let t = p.implication()?;
    let rest = p.peek().clone();
    if rest.tok != Tok::Eof {
        return Err(p.error(&rest, format!("unexpected {}", rest.tok.describe())));
    }
    Ok(t)
}

fn split_top(text: &str, sep: &str) -> Vec<String> {
    text.split(sep).map(str::to_owned).collect()
}

/// `s = t`
pub fn parse_equation(text: &str) -> Result<Equation, ParseError> {
    // `=` never occurs inside a term, but `<->`, `->` and `=>` must not be split.
    let bytes: Vec<char> = text.chars().collect();
    let mut idx = None;
    for (i, c) in bytes.iter().enumerate() {
        if *c == '=' && bytes.get(i + 1) != Some(&'>') {
            if idx.is_some() {
                return Err(ParseError::Syntax { line: 1, column: i + 1, message: "more than one `=`".into() });
            }
            idx = Some(i);
        }
    }
    let Some(i) = idx else {
        return Err(ParseError::Syntax { line: 1, column: 1, message: "expected an equation `s = t`".into() });
    };
    let lhs: String = bytes[..i].iter().collect();
    let rhs: String = bytes[i + 1..].iter().collect();
    Ok(Equation::new(parse_term(&lhs)?, parse_term(&rhs)?))
}

/// `s1 = t1, s2 = t2 => s = t`, or a bare equation.
pub fn parse_quasi_identity(text: &str) -> Result<QuasiIdentity, ParseError> {
    let parts = split_top(text, "=>");
    match parts.as_slice() {
        [eq] => Ok(QuasiIdentity::identity(parse_equation(eq)?)),
        [ante, cons] => {
            let antecedents = if ante.trim().is_empty() {
                Vec::new()
            } else {
                ante.split(',').map(parse_equation).collect::<Result<_, _>>()?
            };
            Ok(QuasiIdentity::new(antecedents, parse_equation(cons)?))
        }
        _ => Err(ParseError::Syntax { line: 1, column: 1, message: "more than one `=>`".into() }),
    }
}

/// `p1, p2 |- c`
pub fn parse_rule(text: &str) -> Result<Rule, ParseError> {
    let parts = split_top(text, "|-");
    match parts.as_slice() {
        [prem, concl] => {
            let premises = if prem.trim().is_empty() {
                Vec::new()
            } else {
                prem.split(',').map(parse_term).collect::<Result<_, _>>()?
            };
            Ok(Rule::new(premises, parse_term(concl)?))
        }
        _ => Err(ParseError::Syntax { line: 1, column: 1, message: "expected `premises |- conclusion`".into() }),
    }
}

const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_UNARY: u8 = 3;

fn prec(t: &Term) -> u8 {
    match t {
        Term::Binary(BinaryOp::Or, ..) => PREC_OR,
        Term::Binary(BinaryOp::And, ..) => PREC_AND,
        Term::Unary(..) => PREC_UNARY,
        Term::Var(_) | Term::Const(_) => PREC_UNARY + 1,
    }
}

fn write_term(t: &Term, out: &mut String) {
    match t {
        Term::Var(x) => out.push_str(x),
        Term::Const(Constant::Zero) => out.push('0'),
        Term::Const(Constant::One) => out.push('1'),
        Term::Unary(UnaryOp::Neg, s) => {
            out.push('~');
            if prec(s) >= PREC_UNARY {
                write_term(s, out);
            } else {
                out.push('(');
                write_term(s, out);
                out.push(')');
            }
        }
        Term::Unary(op, s) => {
            out.push_str(op.symbol());
            out.push('(');
            write_term(s, out);
            out.push(')');
        }
        Term::Binary(op, l, r) => {
            let p = prec(t);
            // Left-associative: a same-level left child needs no parentheses.
            if prec(l) < p {
                out.push('(');
                write_term(l, out);
                out.push(')');
            } else {
                write_term(l, out);
            }
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            if prec(r) <= p {
                out.push('(');
                write_term(r, out);
                out.push(')');
            } else {
                write_term(r, out);
            }
        }
    }
}

pub fn render_term(t: &Term) -> String {
    let mut s = String::new();
    write_term(t, &mut s);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        assert_eq!(parse_term("J1(x)").unwrap(), Term::j(1, Term::var("x")));
        assert_eq!(parse_term("x -> y").unwrap(), Term::or(Term::neg(Term::var("x")), Term::var("y")));
        let jx = Term::j(2, Term::var("x"));
        assert_eq!(parse_term("J2 x | ~J2 x").unwrap(), Term::or(jx.clone(), Term::neg(jx)));
    }

    #[test]
    fn render_examples() {
        assert_eq!(render_term(&Term::var("x")), "x");
        assert_eq!(render_term(&Term::j(2, Term::one())), "J2(1)");
        let t = Term::and(Term::var("x"), Term::or(Term::var("y"), Term::var("z")));
        assert_eq!(render_term(&t), "x & (y | z)");
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse_term("x | y & z").unwrap(), parse_term("x | (y & z)").unwrap());
        assert_eq!(parse_term("x | y | z").unwrap(), parse_term("(x | y) | z").unwrap());
        assert_eq!(parse_term("~x & y").unwrap(), parse_term("(~x) & y").unwrap());
        // right-associative implication
        assert_eq!(parse_term("x -> y -> z").unwrap(), parse_term("x -> (y -> z)").unwrap());
        assert_eq!(render_term(&parse_term("x | (y | z)").unwrap()), "x | (y | z)");
        assert_eq!(render_term(&parse_term("~(x & y)").unwrap()), "~(x & y)");
        assert_eq!(render_term(&parse_term("~~J0 x").unwrap()), "~~J0(x)");
    }

    #[test]
    fn errors_carry_positions() {
        match parse_term("x &\n  ^ y") {
            Err(ParseError::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_term("J3(x)") {
            Err(ParseError::UnknownOperator { name, column, .. }) => {
                assert_eq!(name, "J3");
                assert_eq!(column, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_term("(x | y").is_err());
        assert!(parse_term("x y").is_err());
        assert!(parse_term("").is_err());
        assert!(parse_term("2").is_err());
    }

    #[test]
    fn equations_and_rules() {
        let q = parse_quasi_identity("J1(x) = 1 => y = 1").unwrap();
        assert_eq!(q.antecedents.len(), 1);
        assert_eq!(q.consequent, Equation::new(Term::var("y"), Term::one()));
        let q = parse_quasi_identity("x & (x|y) = x").unwrap();
        assert!(q.is_identity());
        let q = parse_quasi_identity("J0 x = J0 y, J2 x = J2 y => x = y").unwrap();
        assert_eq!(q.antecedents.len(), 2);
        let r = parse_rule("x, x->y |- y").unwrap();
        assert_eq!(r.premises.len(), 2);
        let r = parse_rule("|- x | ~x").unwrap();
        assert!(r.premises.is_empty());
        assert!(parse_equation("x <-> y = 1").is_ok());
    }
}
