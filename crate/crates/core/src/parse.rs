//! Concrete syntax.
//!
//! A program is a sequence of definitions `f x1 ... xm = e`. A definition
//! starts with a token in the first column; continuation lines are indented.
//! Application is juxtaposition and binds tighter than `if/then/else`;
//! `--` starts a comment that runs to the end of the line.

use thiserror::Error;

use crate::syntax::{is_keyword, BaseOp, Definition, Dialect, Expr, Program, ValidationError};
use crate::value::BitString;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

impl ParseError {
    fn at(line: usize, col: usize, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    If,
    Then,
    Else,
    True,
    False,
    Nil,
    Base(BaseOp),
    Choose,
    Eq,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

impl Token {
    fn starts_definition(&self) -> bool {
        self.col == 1
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let chars: Vec<char> = raw.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '-' && chars.get(i + 1) == Some(&'-') {
                break;
            }
            let tok = match c {
                '(' => {
                    i += 1;
                    Tok::LParen
                }
                ')' => {
                    i += 1;
                    Tok::RParen
                }
                '=' => {
                    i += 1;
                    Tok::Eq
                }
                '[' => {
                    let mut j = i + 1;
                    while j < chars.len() && chars[j].is_whitespace() {
                        j += 1;
                    }
                    if chars.get(j) != Some(&']') {
                        return Err(ParseError::at(line, col, "expected `]` after `[`"));
                    }
                    i = j + 1;
                    Tok::Nil
                }
                c if c.is_ascii_alphabetic() => {
                    let start = i;
                    while i < chars.len() && is_ident_char(chars[i]) {
                        i += 1;
                    }
                    let word: String = chars[start..i].iter().collect();
                    match word.as_str() {
                        "if" => Tok::If,
                        "then" => Tok::Then,
                        "else" => Tok::Else,
                        "True" => Tok::True,
                        "False" => Tok::False,
                        "not" => Tok::Base(BaseOp::Not),
                        "null" => Tok::Base(BaseOp::Null),
                        "head" => Tok::Base(BaseOp::Head),
                        "tail" => Tok::Base(BaseOp::Tail),
                        "choose" => Tok::Choose,
                        _ => Tok::Ident(word),
                    }
                }
                other => {
                    return Err(ParseError::at(
                        line,
                        col,
                        format!("unexpected character `{other}`"),
                    ));
                }
            };
            out.push(Token { tok, line, col });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    params: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    /// Next token if it still belongs to the current definition.
    fn peek_body(&self) -> Option<&Token> {
        self.peek().filter(|t| !t.starts_definition())
    }

    fn eof_error(&self, what: &str) -> ParseError {
        let (line, col) = self
            .toks
            .get(self.pos.saturating_sub(1))
            .map(|t| (t.line, t.col))
            .unwrap_or((1, 1));
        ParseError::at(
            line,
            col,
            format!("unexpected end of definition, expected {what}"),
        )
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        match self.peek_body() {
            Some(t) if t.tok == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(ParseError::at(t.line, t.col, format!("expected {what}"))),
            None => Err(self.eof_error(what)),
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek_body().map(|t| &t.tok),
            Some(Tok::True | Tok::False | Tok::Nil | Tok::Ident(_) | Tok::LParen)
        )
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        if matches!(self.peek_body().map(|t| &t.tok), Some(Tok::If)) {
            self.pos += 1;
            let c = self.expr()?;
            self.expect(Tok::Then, "`then`")?;
            let t = self.expr()?;
            self.expect(Tok::Else, "`else`")?;
            let e = self.expr()?;
            return Ok(Expr::ite(c, t, e));
        }
        self.app()
    }

    fn app(&mut self) -> Result<Expr, ParseError> {
        let Some(t) = self.peek_body().cloned() else {
            return Err(self.eof_error("an expression"));
        };
        match t.tok {
            Tok::Base(op) => {
                self.pos += 1;
                Ok(Expr::base(op, self.atom()?))
            }
            Tok::Choose => {
                self.pos += 1;
                let l = self.atom()?;
                let r = self.atom()?;
                Ok(Expr::choose(l, r))
            }
            Tok::Ident(name) if !self.is_param(&name) => {
                self.pos += 1;
                let mut args = Vec::new();
                while self.starts_atom() {
                    args.push(self.atom()?);
                }
                Ok(Expr::Call(name, args))
            }
            _ => {
                let a = self.atom()?;
                if matches!(a, Expr::Var(_)) && self.starts_atom() {
                    let t = self.peek().unwrap();
                    return Err(ParseError::at(
                        t.line,
                        t.col,
                        "a variable cannot be applied to arguments",
                    ));
                }
                Ok(a)
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let Some(t) = self.peek_body().cloned() else {
            return Err(self.eof_error("an operand"));
        };
        self.pos += 1;
        match t.tok {
            Tok::True => Ok(Expr::True),
            Tok::False => Ok(Expr::False),
            Tok::Nil => Ok(Expr::Nil),
            Tok::Ident(name) if self.is_param(&name) => Ok(Expr::Var(name)),
            Tok::Ident(name) => Ok(Expr::Call(name, Vec::new())),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => Err(ParseError::at(t.line, t.col, "expected an operand")),
        }
    }

    fn is_param(&self, name: &str) -> bool {
        self.params.iter().any(|p| p == name)
    }
}

fn parse_definitions(text: &str) -> Result<Vec<Definition>, ParseError> {
    let toks = lex(text)?;
    if let Some(t) = toks.first() {
        if !t.starts_definition() {
            return Err(ParseError::at(
                t.line,
                t.col,
                "a definition must start in the first column",
            ));
        }
    }
    let mut defs = Vec::new();
    let mut pos = 0;
    while pos < toks.len() {
        let head = &toks[pos];
        let name = match &head.tok {
            Tok::Ident(n) => n.clone(),
            _ => {
                return Err(ParseError::at(
                    head.line,
                    head.col,
                    "expected a function name",
                ))
            }
        };
        pos += 1;
        let mut params = Vec::new();
        loop {
            match toks.get(pos) {
                Some(t) if t.starts_definition() => {
                    return Err(ParseError::at(
                        t.line,
                        t.col,
                        "expected `=` before the next definition",
                    ))
                }
                Some(Token {
                    tok: Tok::Ident(p), ..
                }) => {
                    params.push(p.clone());
                    pos += 1;
                }
                Some(Token { tok: Tok::Eq, .. }) => {
                    pos += 1;
                    break;
                }
                Some(t) => {
                    return Err(ParseError::at(
                        t.line,
                        t.col,
                        "expected a parameter name or `=`",
                    ))
                }
                None => return Err(ParseError::at(head.line, head.col, "definition has no `=`")),
            }
        }
        let mut parser = Parser {
            toks: toks.clone(),
            pos,
            params: &params,
        };
        let body = parser.expr()?;
        if let Some(t) = parser.peek_body() {
            return Err(ParseError::at(
                t.line,
                t.col,
                "unexpected token after expression",
            ));
        }
        pos = parser.pos;
        defs.push(Definition { name, params, body });
    }
    Ok(defs)
}

/// Parses and validates a deterministic CF program.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    parse_program_with(text, Dialect::Deterministic)
}

pub fn parse_ncf_program(text: &str) -> Result<Program, ParseError> {
    parse_program_with(text, Dialect::Nondeterministic)
}

pub fn parse_program_with(text: &str, dialect: Dialect) -> Result<Program, ParseError> {
    let defs = parse_definitions(text)?;
    Ok(Program::new(defs, dialect)?)
}

/// Reads a bit string written either compactly (`1011`) or as a list (`[1,0,1,1]`).
pub fn parse_input(text: &str) -> Result<BitString, ParseError> {
    let t = text.trim();
    let err = |i: usize, msg: &str| {
        let col = text.find(t).unwrap_or(0) + i + 1;
        ParseError::at(1, col, msg)
    };
    let mut bits = Vec::new();
    if let Some(inner) = t.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| err(t.len(), "missing `]`"))?;
        if inner.trim().is_empty() {
            return Ok(BitString::default());
        }
        let mut offset = 1;
        for item in inner.split(',') {
            match item.trim() {
                "0" => bits.push(false),
                "1" => bits.push(true),
                _ => return Err(err(offset, "list elements must be 0 or 1")),
            }
            offset += item.len() + 1;
        }
    } else {
        for (i, c) in t.chars().enumerate() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(err(i, &format!("unexpected character `{c}` in bit string"))),
            }
        }
    }
    Ok(BitString::new(bits))
}

/// Identifier syntax shared with the pretty-printer and generators.
pub fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic())
        && cs.all(is_ident_char)
        && !is_keyword(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PARITY: &str =
        "entry x  = even x\neven z   = if (null z) then True else not(even(tail z))\n";

    #[test]
    fn parses_parity() {
        let p = parse_program(PARITY).unwrap();
        let names: Vec<_> = p.definitions().iter().map(|d| d.name.as_str()).collect();
        assert_eq!(names, ["entry", "even"]);
        assert_eq!(
            p.definitions()[1].body,
            Expr::ite(
                Expr::null(Expr::var("z")),
                Expr::True,
                Expr::not(Expr::call("even", vec![Expr::tail(Expr::var("z"))]))
            )
        );
    }

    #[test]
    fn minimal_program() {
        let p = parse_program("main x = True").unwrap();
        assert_eq!(p.definitions().len(), 1);
        assert_eq!(p.entry().body, Expr::True);
    }

    #[test]
    fn unknown_function_is_reported() {
        assert!(matches!(
            parse_program("main x = f x"),
            Err(ParseError::Validation(
                ValidationError::UnknownFunction { .. }
            ))
        ));
    }

    #[test]
    fn multi_line_definitions_and_comments() {
        let text = "-- program q\nf x = if (null x)  then True  else   -- base case\n      if f(tail x) then f(tail x) else False\n";
        let p = parse_program(text).unwrap();
        assert_eq!(p.definitions().len(), 1);
        assert_eq!(p.entry().body.size(), 12);
    }

    #[test]
    fn primes_in_identifiers() {
        let p = parse_program(
            "entry' x = f x True\nf x y = if (null x) then y else f (tail x) (not y)",
        )
        .unwrap();
        assert_eq!(p.entry().name, "entry'");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_program("main x = if x then True") {
            Err(ParseError::Syntax { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_program("main x = x x") {
            Err(ParseError::Syntax {
                line: 1, col: 12, ..
            }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_program("  main x = True").is_err());
        assert!(parse_program("main x = True\n$").is_err());
    }

    #[test]
    fn choose_requires_ncf() {
        assert!(parse_program("main x = choose True False").is_err());
        assert!(parse_ncf_program("main x = choose True False").is_ok());
    }

    #[test]
    fn inputs() {
        assert_eq!(
            parse_input("[1,0,1,1]").unwrap().bits(),
            &[true, false, true, true]
        );
        assert_eq!(
            parse_input("1011").unwrap(),
            parse_input("[1, 0, 1, 1]").unwrap()
        );
        assert!(parse_input("").unwrap().is_empty());
        assert!(parse_input("[]").unwrap().is_empty());
        assert!(matches!(
            parse_input("102"),
            Err(ParseError::Syntax { col: 3, .. })
        ));
        assert!(parse_input("[1,2]").is_err());
    }
}
