use std::rc::Rc;

use thiserror::Error;

use super::{Declaration, Level, RcTerm, SourceFile, Span, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{span}: syntax error: {message}")]
    Syntax { span: Span, message: String },
    #[error("{span}: unbound identifier `{name}`")]
    Unbound { span: Span, name: String },
    #[error("{span}: duplicate declaration `{name}`")]
    Duplicate { span: Span, name: String },
}

impl ParseError {
    pub fn span(&self) -> Span {
        match self {
            ParseError::Syntax { span, .. }
            | ParseError::Unbound { span, .. }
            | ParseError::Duplicate { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u32),
    LParen,
    RParen,
    Dot,
    Comma,
    Colon,
    Define,
    Eof,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(n) => format!("`{n}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Colon => "`:`".into(),
        Tok::Define => "`:=`".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let bump = |i: &mut usize, line: &mut usize, col: &mut usize| {
        if chars[*i] == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
        *i += 1;
    };
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, column: col };
        if c.is_whitespace() {
            bump(&mut i, &mut line, &mut col);
        } else if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                bump(&mut i, &mut line, &mut col);
            }
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump(&mut i, &mut line, &mut col);
            }
            let s: String = chars[start..i].iter().collect();
            let n = s.parse().map_err(|_| ParseError::Syntax {
                span,
                message: format!("number `{s}` out of range"),
            })?;
            out.push((Tok::Num(n), span));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                bump(&mut i, &mut line, &mut col);
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), span));
        } else {
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '.' => Tok::Dot,
                ',' => Tok::Comma,
                ':' if chars.get(i + 1) == Some(&'=') => {
                    bump(&mut i, &mut line, &mut col);
                    Tok::Define
                }
                ':' => Tok::Colon,
                _ => {
                    return Err(ParseError::Syntax {
                        span,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            bump(&mut i, &mut line, &mut col);
            out.push((tok, span));
        }
    }
    out.push((Tok::Eof, Span { line, column: col }));
    Ok(out)
}

/// Words that cannot be used as variable names.
pub(super) const KEYWORDS: &[&str] = &[
    "def", "fun", "V", "cBool", "cUnit", "cPi", "cSg", "cUni", "cLift", "El", "Pi", "Sg", "Bool",
    "Unit", "tt", "true", "false", "fst", "snd", "boolElim", "Prop", "Top", "Bot", "Eq", "star",
    "exfalso", "piFst", "piSnd", "sgFst", "sgSnd", "sym", "refl", "cast",
];

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    locals: Vec<Rc<str>>,
    globals: Vec<Rc<str>>,
}

/// Parse a whole `.obtt` source file, resolving names to de Bruijn indices.
pub fn parse(text: &str) -> Result<SourceFile, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        locals: Vec::new(),
        globals: Vec::new(),
    };
    let mut declarations = Vec::new();
    while p.peek() != &Tok::Eof {
        let decl = p.declaration()?;
        if p.globals.contains(&decl.name) {
            return Err(ParseError::Duplicate {
                span: decl.span,
                name: decl.name.to_string(),
            });
        }
        p.globals.push(decl.name.clone());
        declarations.push(decl);
    }
    Ok(SourceFile { declarations })
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            span: self.span(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", describe(&tok), describe(self.peek())))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.advance();
                Ok(())
            }
            other => self.error(format!("expected `{kw}`, found {}", describe(other))),
        }
    }

    fn name(&mut self) -> Result<Rc<str>, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.advance();
                Ok(s.into())
            }
            other => self.error(format!("expected a name, found {}", describe(&other))),
        }
    }

    fn number(&mut self) -> Result<Level, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.advance();
                Ok(n)
            }
            other => self.error(format!("expected a universe level, found {}", describe(&other))),
        }
    }

    fn declaration(&mut self) -> Result<Declaration, ParseError> {
        let span = self.span();
        self.expect_keyword("def")?;
        let name = self.name()?;
        let annotation = if *self.peek() == Tok::Colon {
            self.advance();
            Some(self.term()?)
        } else {
            None
        };
        self.expect(Tok::Define)?;
        let body = self.term()?;
        Ok(Declaration {
            name,
            annotation,
            body,
            span,
        })
    }

    fn term(&mut self) -> Result<RcTerm, ParseError> {
        if matches!(self.peek(), Tok::Ident(s) if s == "fun") {
            self.advance();
            let name = self.name()?;
            self.expect(Tok::Dot)?;
            self.locals.push(name);
            let body = self.term();
            self.locals.pop();
            return Ok(Rc::new(Term::Lam(body?)));
        }
        let mut head = self.head()?;
        while self.starts_atom() {
            let arg = self.atom()?;
            head = Rc::new(Term::App(head, arg));
        }
        Ok(head)
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::LParen => true,
            Tok::Ident(s) => matches!(arity(s), None | Some(0)),
            _ => false,
        }
    }

    /// The head of an application: an atom or a keyword form with its arguments.
    fn head(&mut self) -> Result<RcTerm, ParseError> {
        let kw = match self.peek() {
            Tok::Ident(s) if arity(s).is_some_and(|a| a > 0 && a != usize::MAX) => s.clone(),
            _ => return self.atom(),
        };
        self.advance();
        let t = match kw.as_str() {
            "V" => Term::VType(self.number()?),
            "cUni" => Term::CUni(self.number()?),
            "cPi" | "cSg" | "Pi" | "Sg" => {
                let dom = self.atom()?;
                let cod = self.binder()?;
                match kw.as_str() {
                    "cPi" => Term::CPi(dom, cod),
                    "cSg" => Term::CSg(dom, cod),
                    "Pi" => Term::Pi(dom, cod),
                    _ => Term::Sg(dom, cod),
                }
            }
            "cLift" => Term::CLift(self.atom()?),
            "El" => Term::El(self.atom()?),
            "fst" => Term::Fst(self.atom()?),
            "snd" => Term::Snd(self.atom()?),
            "piFst" => Term::PiFst(self.atom()?),
            "sgFst" => Term::SgFst(self.atom()?),
            "sym" => Term::Sym(self.atom()?),
            "refl" => Term::Refl(self.atom()?),
            "piSnd" => Term::PiSnd(self.atom()?, self.atom()?),
            "sgSnd" => Term::SgSnd(self.atom()?, self.atom()?),
            "exfalso" => Term::Exfalso(self.atom()?, self.atom()?),
            "Eq" => {
                let level = self.number()?;
                Term::ObsEq(level, self.atom()?, self.atom()?)
            }
            "boolElim" => {
                let motive = self.binder()?;
                Term::BoolElim {
                    motive,
                    on_true: self.atom()?,
                    on_false: self.atom()?,
                    scrut: self.atom()?,
                }
            }
            "cast" => Term::Cast {
                src: self.atom()?,
                tgt: self.atom()?,
                prf: self.atom()?,
                body: self.atom()?,
            },
            _ => unreachable!("keyword `{kw}` has positive arity"),
        };
        Ok(Rc::new(t))
    }

    /// `(x . body)`
    fn binder(&mut self) -> Result<RcTerm, ParseError> {
        self.expect(Tok::LParen)?;
        let name = self.name()?;
        self.expect(Tok::Dot)?;
        self.locals.push(name);
        let body = self.term();
        self.locals.pop();
        let body = body?;
        self.expect(Tok::RParen)?;
        Ok(body)
    }

    fn atom(&mut self) -> Result<RcTerm, ParseError> {
        let span = self.span();
        match self.advance() {
            Tok::LParen => {
                let first = self.term()?;
                let t = match self.advance() {
                    Tok::RParen => return Ok(first),
                    Tok::Comma => Term::Pair(first, self.term()?),
                    Tok::Colon => Term::Ann(first, self.term()?),
                    other => {
                        if other != Tok::Eof {
                            self.pos -= 1;
                        }
                        return self.error(format!(
                            "expected `)`, `,` or `:`, found {}",
                            describe(&other)
                        ));
                    }
                };
                self.expect(Tok::RParen)?;
                Ok(Rc::new(t))
            }
            Tok::Ident(s) => {
                let t = match s.as_str() {
                    "cBool" => Term::CBool,
                    "cUnit" => Term::CUnit,
                    "Bool" => Term::BoolT,
                    "Unit" => Term::UnitT,
                    "tt" => Term::Tt,
                    "true" => Term::True,
                    "false" => Term::False,
                    "Prop" => Term::PropT,
                    "Top" => Term::TopP,
                    "Bot" => Term::BotP,
                    "star" => Term::Star,
                    kw if KEYWORDS.contains(&kw) => {
                        return Err(ParseError::Syntax {
                            span,
                            message: format!("`{kw}` with arguments must be parenthesized here"),
                        })
                    }
                    name => self.resolve(name, span)?,
                };
                Ok(Rc::new(t))
            }
            other => Err(ParseError::Syntax {
                span,
                message: format!("expected a term, found {}", describe(&other)),
            }),
        }
    }

    fn resolve(&self, name: &str, span: Span) -> Result<Term, ParseError> {
        if name != "_" {
            if let Some(i) = self.locals.iter().rev().position(|n| &**n == name) {
                return Ok(Term::Var(i));
            }
            if let Some(g) = self.globals.iter().find(|g| &***g == name) {
                return Ok(Term::Global(g.clone()));
            }
        }
        Err(ParseError::Unbound {
            span,
            name: name.to_string(),
        })
    }
}

/// Number of atom-like arguments a keyword form takes, or `None` for
/// non-keywords.
pub(super) fn arity(word: &str) -> Option<usize> {
    Some(match word {
        "cBool" | "cUnit" | "Bool" | "Unit" | "tt" | "true" | "false" | "Prop" | "Top" | "Bot"
        | "star" => 0,
        "V" | "cUni" | "cLift" | "El" | "fst" | "snd" | "piFst" | "sgFst" | "sym" | "refl" => 1,
        "cPi" | "cSg" | "Pi" | "Sg" | "piSnd" | "sgSnd" | "exfalso" => 2,
        "Eq" => 3,
        "boolElim" | "cast" => 4,
        "def" | "fun" => return Some(usize::MAX),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_program() {
        let f = parse("def id : El (cPi cBool (_ . cBool)) := fun x . x").unwrap();
        assert_eq!(f.declarations.len(), 1);
        let d = &f.declarations[0];
        assert_eq!(&*d.name, "id");
        let code = Rc::new(Term::CPi(Rc::new(Term::CBool), Rc::new(Term::CBool)));
        assert_eq!(d.annotation, Some(Rc::new(Term::El(code))));
        assert_eq!(*d.body, Term::Lam(Rc::new(Term::Var(0))));
    }

    #[test]
    fn unbound_identifier() {
        let err = parse("def x := y").unwrap_err();
        assert_eq!(
            err,
            ParseError::Unbound {
                span: Span { line: 1, column: 10 },
                name: "y".into()
            }
        );
    }

    #[test]
    fn duplicate_declaration() {
        let err = parse("def a := tt\ndef a := tt").unwrap_err();
        assert!(matches!(err, ParseError::Duplicate { span: Span { line: 2, column: 1 }, .. }));
    }

    #[test]
    fn later_may_refer_to_earlier_only() {
        assert!(parse("def a := tt\ndef b := a").is_ok());
        assert!(matches!(parse("def b := a\ndef a := tt"), Err(ParseError::Unbound { .. })));
    }

    #[test]
    fn syntax_error_position() {
        let err = parse("def a :=\n  (tt").unwrap_err();
        assert_eq!(err.span(), Span { line: 2, column: 6 });
        let err = parse("def a := tt ?").unwrap_err();
        assert_eq!(err.span(), Span { line: 1, column: 13 });
    }

    #[test]
    fn shadowing_and_indices() {
        let f = parse("def k : V 0 := fun x . fun y . fun x . y").unwrap();
        let body = &f.declarations[0].body;
        let inner = match &**body {
            Term::Lam(b) => match &**b {
                Term::Lam(b) => match &**b {
                    Term::Lam(b) => b.clone(),
                    _ => panic!(),
                },
                _ => panic!(),
            },
            _ => panic!(),
        };
        assert_eq!(*inner, Term::Var(1));
    }

    #[test]
    fn keyword_form_as_application_head() {
        let f = parse("def a := fun p . fst p tt").unwrap();
        let expected = Term::Lam(Rc::new(Term::App(
            Rc::new(Term::Fst(Rc::new(Term::Var(0)))),
            Rc::new(Term::Tt),
        )));
        assert_eq!(*f.declarations[0].body, expected);
    }

    #[test]
    fn comments_are_ignored() {
        let f = parse("-- a comment\ndef a := tt -- trailing\n").unwrap();
        assert_eq!(f.declarations.len(), 1);
    }
}
