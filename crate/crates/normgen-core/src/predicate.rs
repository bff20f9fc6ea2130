//! The predicate language for C(x, y): a tiny total expression language over
//! two positive-integer variables, with arithmetic (`+`, `-`, `*`, `%`),
//! comparisons, divisibility, and boolean connectives.
//!
//! Grammar (standard precedence, `!` > `&` > `|`, comparison non-associative):
//!
//! ```text
//! expr   := or ;  or := and { "|" and } ;  and := unary { "&" unary } ;
//! unary  := "!" unary | atom ;
//! atom   := "true" | "false" | comparison | "(" expr ")" ;
//! comparison := sum rel sum | "div" "(" sum "," sum ")" ;
//! rel    := "=" | "!=" | "<" | "<=" | ">" | ">=" ;
//! sum    := term { ("+" | "-") term } ;  term := factor { ("*" | "%") factor } ;
//! factor := integer | "x" | "y" | "(" sum ")" .
//! ```
//!
//! Whitespace is insignificant; integer literals are unbounded. Every
//! construct except `%` by zero is total, so evaluation always terminates and
//! the only runtime fault is a zero modulus.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::{Error, Result};

/// Comparison operators between arithmetic terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rel::Eq => "=",
            Rel::Ne => "!=",
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Gt => ">",
            Rel::Ge => ">=",
        };
        f.write_str(s)
    }
}

/// Arithmetic terms over `x` and `y`.
///
/// Subtraction may go negative; all arithmetic is over signed unbounded
/// integers, and `%` is the truncated remainder (sign of the dividend).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Int(BigInt),
    X,
    Y,
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Mod(Box<Term>, Box<Term>),
}

/// Abstract syntax of a predicate C(x, y).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    True,
    False,
    Not(Box<Predicate>),
    And(Box<Predicate>, Box<Predicate>),
    Or(Box<Predicate>, Box<Predicate>),
    Cmp(Term, Rel, Term),
    /// `div(a, b)` holds when `a` divides `b`; `div(0, b)` holds exactly
    /// when `b = 0`, keeping the operator total.
    Divides(Term, Term),
}

impl Predicate {
    /// Evaluates the predicate at the point `(x, y)`.
    ///
    /// The only possible error is [`Error::Eval`] from a `%` with zero
    /// modulus; everything else is total.
    pub fn eval(&self, x: u64, y: u64) -> Result<bool> {
        let xv = BigInt::from(x);
        let yv = BigInt::from(y);
        self.eval_at(&xv, &yv)
    }

    fn eval_at(&self, x: &BigInt, y: &BigInt) -> Result<bool> {
        Ok(match self {
            Predicate::True => true,
            Predicate::False => false,
            Predicate::Not(p) => !p.eval_at(x, y)?,
            Predicate::And(p, q) => p.eval_at(x, y)? && q.eval_at(x, y)?,
            Predicate::Or(p, q) => p.eval_at(x, y)? || q.eval_at(x, y)?,
            Predicate::Cmp(a, rel, b) => {
                let a = a.eval_at(x, y)?;
                let b = b.eval_at(x, y)?;
                match rel {
                    Rel::Eq => a == b,
                    Rel::Ne => a != b,
                    Rel::Lt => a < b,
                    Rel::Le => a <= b,
                    Rel::Gt => a > b,
                    Rel::Ge => a >= b,
                }
            }
            Predicate::Divides(a, b) => {
                let a = a.eval_at(x, y)?;
                let b = b.eval_at(x, y)?;
                if a.is_zero() {
                    b.is_zero()
                } else {
                    (b % a).is_zero()
                }
            }
        })
    }
}

impl Term {
    fn eval_at(&self, x: &BigInt, y: &BigInt) -> Result<BigInt> {
        Ok(match self {
            Term::Int(n) => n.clone(),
            Term::X => x.clone(),
            Term::Y => y.clone(),
            Term::Add(a, b) => a.eval_at(x, y)? + b.eval_at(x, y)?,
            Term::Sub(a, b) => a.eval_at(x, y)? - b.eval_at(x, y)?,
            Term::Mul(a, b) => a.eval_at(x, y)? * b.eval_at(x, y)?,
            Term::Mod(a, b) => {
                let a = a.eval_at(x, y)?;
                let b = b.eval_at(x, y)?;
                if b.is_zero() {
                    return Err(Error::Eval(format!(
                        "`%` by zero at x = {x}, y = {y}"
                    )));
                }
                a % b
            }
        })
    }
}

/// Parses predicate source text into an AST.
pub fn parse_predicate(text: &str) -> Result<Predicate> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let pred = p.expr()?;
    if p.pos < p.toks.len() {
        let t = &p.toks[p.pos];
        return Err(parse_err(t.line, t.col, format!("unexpected `{}`", t.text)));
    }
    Ok(pred)
}

// ── lexer ──

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    X,
    Y,
    True,
    False,
    Div,
    Or,
    And,
    Not,
    LParen,
    RParen,
    Comma,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Percent,
}

#[derive(Debug, Clone)]
struct Lexed {
    tok: Tok,
    text: String,
    line: usize,
    col: usize,
}

fn parse_err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<Lexed>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&d) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                digits.push(bump(&mut chars));
            }
            let n: BigInt = digits.parse().expect("decimal literal");
            out.push(Lexed { tok: Tok::Int(n), text: digits, line: tline, col: tcol });
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut word = String::new();
            while let Some(&d) = chars.peek() {
                if !d.is_ascii_alphanumeric() && d != '_' {
                    break;
                }
                word.push(bump(&mut chars));
            }
            let tok = match word.as_str() {
                "x" => Tok::X,
                "y" => Tok::Y,
                "true" => Tok::True,
                "false" => Tok::False,
                "div" => Tok::Div,
                _ => {
                    return Err(parse_err(
                        tline,
                        tcol,
                        format!("unknown identifier `{word}`"),
                    ))
                }
            };
            out.push(Lexed { tok, text: word, line: tline, col: tcol });
            continue;
        }
        let c = bump(&mut chars);
        let (tok, text) = match c {
            '|' => (Tok::Or, "|"),
            '&' => (Tok::And, "&"),
            '(' => (Tok::LParen, "("),
            ')' => (Tok::RParen, ")"),
            ',' => (Tok::Comma, ","),
            '+' => (Tok::Plus, "+"),
            '-' => (Tok::Minus, "-"),
            '*' => (Tok::Star, "*"),
            '%' => (Tok::Percent, "%"),
            '=' => (Tok::Eq, "="),
            '!' => {
                if chars.peek() == Some(&'=') {
                    bump(&mut chars);
                    (Tok::Ne, "!=")
                } else {
                    (Tok::Not, "!")
                }
            }
            '<' => {
                if chars.peek() == Some(&'=') {
                    bump(&mut chars);
                    (Tok::Le, "<=")
                } else {
                    (Tok::Lt, "<")
                }
            }
            '>' => {
                if chars.peek() == Some(&'=') {
                    bump(&mut chars);
                    (Tok::Ge, ">=")
                } else {
                    (Tok::Gt, ">")
                }
            }
            other => {
                return Err(parse_err(
                    tline,
                    tcol,
                    format!("unexpected character `{other}`"),
                ))
            }
        };
        out.push(Lexed { tok, text: text.to_string(), line: tline, col: tcol });
    }
    Ok(out)
}

// ── parser ──

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn advance(&mut self) -> Option<&Lexed> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.err_here(format!("expected {what}")))
        }
    }

    /// Error at the current token, or just past the final one at end of input.
    fn err_here(&self, msg: String) -> Error {
        match self.toks.get(self.pos) {
            Some(t) => parse_err(t.line, t.col, format!("{msg}, found `{}`", t.text)),
            None => {
                let (line, col) = match self.toks.last() {
                    Some(t) => (t.line, t.col + t.text.len()),
                    None => (1, 1),
                };
                parse_err(line, col, format!("{msg}, found end of input"))
            }
        }
    }

    fn expr(&mut self) -> Result<Predicate> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Or) {
            let rhs = self.and()?;
            lhs = Predicate::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Predicate> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary()?;
            lhs = Predicate::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Predicate> {
        if self.eat(&Tok::Not) {
            Ok(Predicate::Not(Box::new(self.unary()?)))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<Predicate> {
        match self.peek() {
            Some(Tok::True) => {
                self.advance();
                Ok(Predicate::True)
            }
            Some(Tok::False) => {
                self.advance();
                Ok(Predicate::False)
            }
            Some(Tok::Div) => self.divides(),
            // A leading "(" may open either a parenthesized sum inside a
            // comparison or a parenthesized boolean expression; try the
            // comparison reading first and backtrack if it fails.
            Some(Tok::LParen) => {
                let mark = self.pos;
                match self.comparison() {
                    Ok(p) => Ok(p),
                    Err(_) => {
                        self.pos = mark;
                        self.advance();
                        let inner = self.expr()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(inner)
                    }
                }
            }
            Some(Tok::Int(_)) | Some(Tok::X) | Some(Tok::Y) => self.comparison(),
            _ => Err(self.err_here("expected a predicate".into())),
        }
    }

    fn divides(&mut self) -> Result<Predicate> {
        self.advance();
        self.expect(Tok::LParen, "`(` after `div`")?;
        let a = self.sum()?;
        self.expect(Tok::Comma, "`,`")?;
        let b = self.sum()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(Predicate::Divides(a, b))
    }

    fn comparison(&mut self) -> Result<Predicate> {
        let lhs = self.sum()?;
        let rel = match self.peek() {
            Some(Tok::Eq) => Rel::Eq,
            Some(Tok::Ne) => Rel::Ne,
            Some(Tok::Lt) => Rel::Lt,
            Some(Tok::Le) => Rel::Le,
            Some(Tok::Gt) => Rel::Gt,
            Some(Tok::Ge) => Rel::Ge,
            _ => return Err(self.err_here("expected a comparison operator".into())),
        };
        self.advance();
        let rhs = self.sum()?;
        Ok(Predicate::Cmp(lhs, rel, rhs))
    }

    fn sum(&mut self) -> Result<Term> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                lhs = Term::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(&Tok::Minus) {
                lhs = Term::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Term> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(&Tok::Star) {
                lhs = Term::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat(&Tok::Percent) {
                lhs = Term::Mod(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Term> {
        match self.peek() {
            Some(Tok::Int(_)) => {
                let Some(Lexed { tok: Tok::Int(n), .. }) = self.advance() else {
                    unreachable!()
                };
                Ok(Term::Int(n.clone()))
            }
            Some(Tok::X) => {
                self.advance();
                Ok(Term::X)
            }
            Some(Tok::Y) => {
                self.advance();
                Ok(Term::Y)
            }
            Some(Tok::LParen) => {
                self.advance();
                let inner = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.err_here("expected an integer, `x`, `y`, or `(`".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> Term {
        Term::Int(BigInt::from(n))
    }

    #[test]
    fn literals_parse() {
        assert_eq!(parse_predicate("false").unwrap(), Predicate::False);
        assert_eq!(parse_predicate("  true ").unwrap(), Predicate::True);
    }

    #[test]
    fn conjunction_with_divisibility() {
        let p = parse_predicate("x = 1 & div(y, 2)").unwrap();
        let want = Predicate::And(
            Box::new(Predicate::Cmp(Term::X, Rel::Eq, int(1))),
            Box::new(Predicate::Divides(Term::Y, int(2))),
        );
        assert_eq!(p, want);
    }

    #[test]
    fn disjunction_with_negation() {
        let p = parse_predicate("y < 10 | !(x > 3)").unwrap();
        let want = Predicate::Or(
            Box::new(Predicate::Cmp(Term::Y, Rel::Lt, int(10))),
            Box::new(Predicate::Not(Box::new(Predicate::Cmp(
                Term::X,
                Rel::Gt,
                int(3),
            )))),
        );
        assert_eq!(p, want);
    }

    #[test]
    fn precedence_not_over_and_over_or() {
        let p = parse_predicate("!x = 1 & y = 2 | true").unwrap();
        let want = Predicate::Or(
            Box::new(Predicate::And(
                Box::new(Predicate::Not(Box::new(Predicate::Cmp(
                    Term::X,
                    Rel::Eq,
                    int(1),
                )))),
                Box::new(Predicate::Cmp(Term::Y, Rel::Eq, int(2))),
            )),
            Box::new(Predicate::True),
        );
        assert_eq!(p, want);
    }

    #[test]
    fn parenthesized_sum_vs_parenthesized_expr() {
        let p = parse_predicate("(x + 1) = 2").unwrap();
        assert_eq!(
            p,
            Predicate::Cmp(Term::Add(Box::new(Term::X), Box::new(int(1))), Rel::Eq, int(2))
        );
        let q = parse_predicate("((x = 1 | y = 2)) & true").unwrap();
        let Predicate::And(lhs, _) = q else { panic!("expected conjunction") };
        assert!(matches!(*lhs, Predicate::Or(_, _)));
    }

    #[test]
    fn comparison_is_non_associative() {
        let err = parse_predicate("1 < x < 3").unwrap_err();
        let Error::Parse { line, col, .. } = err else { panic!("expected parse error") };
        assert_eq!((line, col), (1, 7));
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_predicate("x =\n= 1").unwrap_err();
        let Error::Parse { line, col, .. } = err else { panic!("expected parse error") };
        assert_eq!((line, col), (2, 1));

        let err = parse_predicate("z = 1").unwrap_err();
        let Error::Parse { msg, .. } = err else { panic!("expected parse error") };
        assert!(msg.contains("unknown identifier"), "{msg}");

        let err = parse_predicate("x = ").unwrap_err();
        let Error::Parse { col, .. } = err else { panic!("expected parse error") };
        assert_eq!(col, 4, "end-of-input errors point just past the last token");
    }

    #[test]
    fn evaluation_basics() {
        let p = parse_predicate("x * y + 2 = 8").unwrap();
        assert!(p.eval(2, 3).unwrap());
        assert!(!p.eval(3, 3).unwrap());

        let d = parse_predicate("div(y, x)").unwrap();
        assert!(d.eval(6, 3).unwrap());
        assert!(!d.eval(4, 3).unwrap());
    }

    #[test]
    fn divisibility_by_zero_is_total() {
        let p = parse_predicate("div(x - y, x - y)").unwrap();
        assert!(p.eval(5, 5).unwrap());
        let q = parse_predicate("div(x - x, y)").unwrap();
        assert!(!q.eval(1, 7).unwrap());
    }

    #[test]
    fn truncated_remainder() {
        let p = parse_predicate("(x - y) % 3 = 0 - 2").unwrap();
        assert!(p.eval(1, 3).unwrap());
    }

    #[test]
    fn modulus_by_zero_is_an_eval_error() {
        let p = parse_predicate("x % (y - y) = 0").unwrap();
        assert!(matches!(p.eval(1, 1), Err(Error::Eval(_))));
    }
}
