//! Presentation file format.
//!
//! ```text
//! # comment to end of line
//! gens: x1 x2 x3;
//! class: 3;                  # optional, nilpotency class cap
//! cap: 4;                    # optional, degree cap of the free Lie ring
//! rel: 4*x1 + 2[x3,x2] - [x1,x2,x2];
//! ```
//!
//! Expressions are integer combinations of generators and brackets. The `*`
//! between a coefficient and its term is optional, a leading unary minus is
//! allowed on every term, brackets nest, and `[a,b,c,...]` is the left-normed
//! bracket `[[a,b],c],...`. Bracket arguments and parenthesized groups may be
//! arbitrary expressions. Generators must be declared before use.

use std::fmt;
use std::sync::Arc;

use liedim::{FreeLieContext, LieVec, Presentation};
use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

/// Line and column, both 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{pos}: unexpected {found}; expected {}", .expected.join(", "))]
    Syntax {
        pos: Pos,
        found: String,
        expected: Vec<String>,
    },
    #[error("{pos}: undeclared generator `{name}`")]
    Undeclared { pos: Pos, name: String },
    #[error("{pos}: generator `{name}` declared twice")]
    Duplicate { pos: Pos, name: String },
    #[error("{pos}: `{what}` given more than once")]
    Repeated { pos: Pos, what: &'static str },
    #[error("{pos}: {what} must be a positive integer that fits in a machine word")]
    BadCount { pos: Pos, what: &'static str },
    #[error("{pos}: relator before `gens:` declaration")]
    NoGenerators { pos: Pos },
    #[error("no `gens:` declaration")]
    MissingGenerators,
    #[error("invalid presentation: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warning {
    pub pos: Pos,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: warning: {}", self.pos, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Colon,
    Semi,
    Comma,
    Plus,
    Minus,
    Star,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            _ => "",
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().expect("peeked");
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
        } else if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                s.push(bump(&mut chars));
            }
            out.push((Tok::Int(s.parse().expect("digits")), pos));
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while chars
                .peek()
                .is_some_and(|&c| c.is_alphanumeric() || c == '_' || c == '\'')
            {
                s.push(bump(&mut chars));
            }
            out.push((Tok::Ident(s), pos));
        } else {
            let tok = match c {
                ':' => Tok::Colon,
                ';' => Tok::Semi,
                ',' => Tok::Comma,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                other => {
                    return Err(ParseError::Syntax {
                        pos,
                        found: format!("character `{other}`"),
                        expected: vec!["a token".into()],
                    })
                }
            };
            bump(&mut chars);
            out.push((tok, pos));
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// Syntax tree of a Lie expression; generator indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Gen(usize),
    /// Left-normed bracket of two or more arguments.
    Bracket(Vec<Expr>),
    Sum(Vec<(BigInt, Expr)>),
}

impl Expr {
    pub fn eval(&self, ctx: &FreeLieContext) -> LieVec {
        match self {
            Expr::Gen(i) => ctx.generator(*i),
            Expr::Bracket(args) => {
                let mut it = args.iter();
                let mut acc = it.next().expect("bracket has arguments").eval(ctx);
                for a in it {
                    acc = ctx.bracket(&acc, &a.eval(ctx)).expect("same context");
                }
                acc
            }
            Expr::Sum(terms) => {
                let mut v = ctx.zero();
                for (c, e) in terms {
                    v.add_scaled(c, &e.eval(ctx));
                }
                v
            }
        }
    }
}

/// Parsed file before a free Lie ring is fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationFile {
    pub generators: Vec<String>,
    pub relators: Vec<(Expr, Pos)>,
    pub class: Option<usize>,
    pub cap: Option<usize>,
}

/// Class cap used when neither the file nor the caller sets one.
pub const DEFAULT_CLASS: usize = 4;

impl PresentationFile {
    /// Builds the presentation with class cap `class` (file value, else
    /// `default_class`) and degree cap the largest of `class`, the file's
    /// `cap:`, and `min_cap`. Zero relators are dropped with a warning.
    pub fn build(
        &self,
        default_class: Option<usize>,
        min_cap: usize,
    ) -> Result<(Presentation, Vec<Warning>), ParseError> {
        let class = self.class.or(default_class).unwrap_or(DEFAULT_CLASS);
        let cap = class.max(self.cap.unwrap_or(0)).max(min_cap);
        let ctx = Arc::new(
            FreeLieContext::with_names(self.generators.clone(), cap)
                .map_err(|e| ParseError::Invalid(e.to_string()))?,
        );
        let mut warnings = Vec::new();
        let mut relators = Vec::new();
        for (e, pos) in &self.relators {
            let v = e.eval(&ctx);
            if v.is_zero() {
                warnings.push(Warning {
                    pos: *pos,
                    message: "relator is zero in the free Lie ring and is ignored".into(),
                });
            } else {
                relators.push(v);
            }
        }
        let pres = Presentation::new(ctx, relators, class)
            .map_err(|e| ParseError::Invalid(e.to_string()))?;
        Ok((pres, warnings))
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    generators: Vec<String>,
    declared: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError::Syntax {
            pos: self.pos(),
            found: self.peek().describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, ParseError> {
        if *self.peek() == tok {
            Ok(self.next().1)
        } else {
            Err(self.error(&[&format!("`{}`", tok.symbol())]))
        }
    }

    fn file(&mut self) -> Result<PresentationFile, ParseError> {
        let mut file = PresentationFile {
            generators: Vec::new(),
            relators: Vec::new(),
            class: None,
            cap: None,
        };
        loop {
            let pos = self.pos();
            let keyword = match self.peek() {
                Tok::Eof => break,
                Tok::Ident(s) if matches!(s.as_str(), "gens" | "rel" | "class" | "cap") => {
                    s.clone()
                }
                _ => {
                    return Err(self.error(&[
                        "`gens`",
                        "`rel`",
                        "`class`",
                        "`cap`",
                        "end of input",
                    ]))
                }
            };
            self.next();
            self.expect(Tok::Colon)?;
            match keyword.as_str() {
                "gens" => {
                    if self.declared {
                        return Err(ParseError::Repeated { pos, what: "gens" });
                    }
                    while let Tok::Ident(name) = self.peek().clone() {
                        let p = self.pos();
                        if self.generators.contains(&name) {
                            return Err(ParseError::Duplicate { pos: p, name });
                        }
                        self.generators.push(name);
                        self.next();
                        if *self.peek() == Tok::Comma {
                            self.next();
                        }
                    }
                    if self.generators.is_empty() {
                        return Err(self.error(&["generator name"]));
                    }
                    self.declared = true;
                    file.generators = self.generators.clone();
                }
                "rel" => {
                    if !self.declared {
                        return Err(ParseError::NoGenerators { pos });
                    }
                    let start = self.pos();
                    let e = self.expr()?;
                    file.relators.push((e, start));
                }
                "class" => {
                    let n = self.count("class")?;
                    if file.class.replace(n).is_some() {
                        return Err(ParseError::Repeated { pos, what: "class" });
                    }
                }
                _ => {
                    let n = self.count("cap")?;
                    if file.cap.replace(n).is_some() {
                        return Err(ParseError::Repeated { pos, what: "cap" });
                    }
                }
            }
            self.expect(Tok::Semi)?;
        }
        if !self.declared {
            return Err(ParseError::MissingGenerators);
        }
        Ok(file)
    }

    fn count(&mut self, what: &'static str) -> Result<usize, ParseError> {
        let pos = self.pos();
        match self.next().0 {
            Tok::Int(n) => match usize::try_from(&n) {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(ParseError::BadCount { pos, what }),
            },
            _ => {
                self.at -= 1;
                Err(self.error(&["positive integer"]))
            }
        }
    }

    /// expr := ['+'|'-'] term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = Vec::new();
        let mut sign = BigInt::one();
        match self.peek() {
            Tok::Minus => {
                self.next();
                sign = -sign;
            }
            Tok::Plus => {
                self.next();
            }
            _ => {}
        }
        loop {
            let (c, e) = self.term()?;
            terms.push((sign * c, e));
            sign = match self.peek() {
                Tok::Plus => BigInt::one(),
                Tok::Minus => -BigInt::one(),
                _ => break,
            };
            self.next();
        }
        if terms.len() == 1 && terms[0].0.is_one() {
            return Ok(terms.pop().expect("one term").1);
        }
        Ok(Expr::Sum(terms))
    }

    /// term := '-'* [int ['*']] factor
    fn term(&mut self) -> Result<(BigInt, Expr), ParseError> {
        let mut c = BigInt::one();
        while *self.peek() == Tok::Minus {
            self.next();
            c = -c;
        }
        if let Tok::Int(n) = self.peek().clone() {
            self.next();
            c *= n;
            if *self.peek() == Tok::Star {
                self.next();
            }
        }
        Ok((c, self.factor()?))
    }

    /// factor := ident | '[' expr (',' expr)+ ']' | '(' expr ')'
    fn factor(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.next();
                match self.generators.iter().position(|g| *g == name) {
                    Some(i) => Ok(Expr::Gen(i)),
                    None => Err(ParseError::Undeclared { pos, name }),
                }
            }
            Tok::LBrack => {
                self.next();
                let mut args = vec![self.expr()?];
                while *self.peek() == Tok::Comma {
                    self.next();
                    args.push(self.expr()?);
                }
                if args.len() < 2 {
                    return Err(self.error(&["`,`"]));
                }
                self.expect(Tok::RBrack)
                    .map_err(|_| self.error(&["`,`", "`]`"]))?;
                Ok(Expr::Bracket(args))
            }
            Tok::LParen => {
                self.next();
                let e = self.expr()?;
                self.expect(Tok::RParen)
                    .map_err(|_| self.error(&["`)`", "`+`", "`-`"]))?;
                Ok(e)
            }
            _ => Err(self.error(&["generator", "`[`", "`(`", "integer"])),
        }
    }
}

pub fn parse_file(text: &str) -> Result<PresentationFile, ParseError> {
    let toks = lex(text)?;
    Parser {
        toks,
        at: 0,
        generators: Vec::new(),
        declared: false,
    }
    .file()
}

/// Parses and builds with default class and no extra cap requirement.
pub fn parse_presentation(text: &str) -> Result<(Presentation, Vec<Warning>), ParseError> {
    parse_file(text)?.build(None, 0)
}
