//! Core syntax of the object theory.
//!
//! Terms use de Bruijn indices; the surface syntax is named and is resolved
//! by the parser. Codes (`cBool`, `cPi`, ...) live in the universes `V i` and
//! are turned into types by `El`, so the code/type distinction of a Tarski
//! universe is visible in every program.

use std::fmt;
use std::rc::Rc;

mod parse;
mod print;

pub use parse::{parse, ParseError};
pub use print::{print, print_file, print_with};

pub type RcTerm = Rc<Term>;

/// A universe level.
pub type Level = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    /// Local variable, as a de Bruijn index.
    Var(usize),
    /// Reference to an earlier top-level declaration.
    Global(Rc<str>),
    /// Type annotation `(t : A)`.
    Ann(RcTerm, RcTerm),

    /// The universe `V i` of codes, as a type.
    VType(Level),
    CBool,
    CUnit,
    /// Code for dependent functions; the codomain is a binder.
    CPi(RcTerm, RcTerm),
    /// Code for dependent pairs; the codomain is a binder.
    CSg(RcTerm, RcTerm),
    /// Code naming a strictly smaller universe.
    CUni(Level),
    /// Lift a code one level up.
    CLift(RcTerm),
    /// Decode a code to a type.
    El(RcTerm),

    Pi(RcTerm, RcTerm),
    Sg(RcTerm, RcTerm),
    BoolT,
    UnitT,

    Lam(RcTerm),
    App(RcTerm, RcTerm),
    Pair(RcTerm, RcTerm),
    Fst(RcTerm),
    Snd(RcTerm),
    Tt,
    True,
    False,
    /// `boolElim (x . motive) on_true on_false scrut`
    BoolElim {
        motive: RcTerm,
        on_true: RcTerm,
        on_false: RcTerm,
        scrut: RcTerm,
    },

    PropT,
    TopP,
    BotP,
    /// Observational equality of two codes in `V level`.
    ObsEq(Level, RcTerm, RcTerm),

    Star,
    Exfalso(RcTerm, RcTerm),
    PiFst(RcTerm),
    PiSnd(RcTerm, RcTerm),
    SgFst(RcTerm),
    SgSnd(RcTerm, RcTerm),
    Sym(RcTerm),
    Refl(RcTerm),

    Cast {
        src: RcTerm,
        tgt: RcTerm,
        prf: RcTerm,
        body: RcTerm,
    },
}

impl Term {
    /// Does de Bruijn index `index` occur free in this term?
    pub fn mentions(&self, index: usize) -> bool {
        use Term::*;
        match self {
            Var(i) => *i == index,
            Global(_) | VType(_) | CBool | CUnit | CUni(_) | BoolT | UnitT | Tt | True | False
            | PropT | TopP | BotP | Star => false,
            CPi(a, b) | CSg(a, b) | Pi(a, b) | Sg(a, b) => {
                a.mentions(index) || b.mentions(index + 1)
            }
            Lam(b) => b.mentions(index + 1),
            CLift(a) | El(a) | Fst(a) | Snd(a) | PiFst(a) | SgFst(a) | Sym(a) | Refl(a) => {
                a.mentions(index)
            }
            Ann(a, b) | App(a, b) | Pair(a, b) | ObsEq(_, a, b) | Exfalso(a, b)
            | PiSnd(a, b) | SgSnd(a, b) => a.mentions(index) || b.mentions(index),
            BoolElim {
                motive,
                on_true,
                on_false,
                scrut,
            } => {
                motive.mentions(index + 1)
                    || on_true.mentions(index)
                    || on_false.mentions(index)
                    || scrut.mentions(index)
            }
            Cast {
                src,
                tgt,
                prf,
                body,
            } => src.mentions(index) || tgt.mentions(index) || prf.mentions(index) || body.mentions(index),
        }
    }

    /// Collect the names of globals referenced by this term.
    pub fn globals(&self, out: &mut Vec<Rc<str>>) {
        self.visit(&mut |t| {
            if let Term::Global(name) = t {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
        });
    }

    /// Pre-order traversal over all subterms.
    pub fn visit(&self, f: &mut dyn FnMut(&Term)) {
        use Term::*;
        f(self);
        match self {
            Var(_) | Global(_) | VType(_) | CBool | CUnit | CUni(_) | BoolT | UnitT | Tt | True
            | False | PropT | TopP | BotP | Star => {}
            CLift(a) | El(a) | Fst(a) | Snd(a) | PiFst(a) | SgFst(a) | Sym(a) | Refl(a) | Lam(a) => {
                a.visit(f)
            }
            CPi(a, b) | CSg(a, b) | Pi(a, b) | Sg(a, b) | Ann(a, b) | App(a, b) | Pair(a, b)
            | ObsEq(_, a, b) | Exfalso(a, b) | PiSnd(a, b) | SgSnd(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            BoolElim {
                motive,
                on_true,
                on_false,
                scrut,
            } => {
                motive.visit(f);
                on_true.visit(f);
                on_false.visit(f);
                scrut.visit(f);
            }
            Cast {
                src,
                tgt,
                prf,
                body,
            } => {
                src.visit(f);
                tgt.visit(f);
                prf.visit(f);
                body.visit(f);
            }
        }
    }
}

/// A position in a source file, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone)]
pub struct Declaration {
    pub name: Rc<str>,
    pub annotation: Option<RcTerm>,
    pub body: RcTerm,
    pub span: Span,
}

/// Structural equality ignores spans.
impl PartialEq for Declaration {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.annotation == other.annotation && self.body == other.body
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SourceFile {
    pub declarations: Vec<Declaration>,
}

impl SourceFile {
    pub fn get(&self, name: &str) -> Option<&Declaration> {
        self.declarations.iter().find(|d| &*d.name == name)
    }
}
