//! Readback from values to normal-form terms.

use std::rc::Rc;

use super::value::{Closure, Elim, Head, Proof, Value};
use crate::syntax::{RcTerm, Term};

/// Read a value back into a term, at binder depth `depth`.
pub fn quote(depth: usize, v: &Value) -> RcTerm {
    Rc::new(match v {
        Value::Neutral(head, spine) => return quote_neutral(depth, head, spine),
        Value::Lam(c) => Term::Lam(quote_closure(depth, c)),
        Value::Pair(a, b) => Term::Pair(quote(depth, a), quote(depth, b)),
        Value::True => Term::True,
        Value::False => Term::False,
        Value::Tt => Term::Tt,
        Value::Prf(p) => match p {
            Proof::Star => Term::Star,
            Proof::PiFst(e) => Term::PiFst(quote(depth, e)),
            Proof::PiSnd(e, a) => Term::PiSnd(quote(depth, e), quote(depth, a)),
            Proof::SgFst(e) => Term::SgFst(quote(depth, e)),
            Proof::SgSnd(e, a) => Term::SgSnd(quote(depth, e), quote(depth, a)),
            Proof::Sym(e) => Term::Sym(quote(depth, e)),
            Proof::Refl(c) => Term::Refl(quote(depth, c)),
        },

        Value::PiT(a, b) => Term::Pi(quote(depth, a), quote_closure(depth, b)),
        Value::SgT(a, b) => Term::Sg(quote(depth, a), quote_closure(depth, b)),
        Value::BoolT => Term::BoolT,
        Value::UnitT => Term::UnitT,
        Value::VType(i) => Term::VType(*i),
        Value::PropT => Term::PropT,
        Value::TopP => Term::TopP,
        Value::BotP => Term::BotP,
        Value::ObsEq(i, a, b) => Term::ObsEq(*i, quote(depth, a), quote(depth, b)),
        Value::El(c) => Term::El(quote(depth, c)),

        Value::SBool => Term::CBool,
        Value::SUnit => Term::CUnit,
        Value::SPi(a, b) => Term::CPi(quote(depth, a), quote_closure(depth, b)),
        Value::SSg(a, b) => Term::CSg(quote(depth, a), quote_closure(depth, b)),
        Value::SUni(k) => Term::CUni(*k),
        Value::SLift(n, c) => {
            let mut t = quote(depth, c);
            for _ in 0..*n {
                t = Rc::new(Term::CLift(t));
            }
            return t;
        }
    })
}

fn quote_closure(depth: usize, c: &Closure) -> RcTerm {
    quote(depth + 1, &c.apply(Value::var(depth)))
}

fn quote_neutral(depth: usize, head: &Head, spine: &[Elim]) -> RcTerm {
    let mut t = Rc::new(match head {
        Head::Var(level) => Term::Var(depth - 1 - level),
        Head::Cast {
            src,
            tgt,
            prf,
            body,
        } => Term::Cast {
            src: quote(depth, src),
            tgt: quote(depth, tgt),
            prf: quote(depth, prf),
            body: quote(depth, body),
        },
        Head::Exfalso { motive, prf } => Term::Exfalso(quote(depth, motive), quote(depth, prf)),
    });
    for elim in spine {
        t = Rc::new(match elim {
            Elim::App(a) => Term::App(t, quote(depth, a)),
            Elim::Fst => Term::Fst(t),
            Elim::Snd => Term::Snd(t),
            Elim::BoolElim {
                motive,
                on_true,
                on_false,
            } => Term::BoolElim {
                motive: quote_closure(depth, motive),
                on_true: quote(depth, on_true),
                on_false: quote(depth, on_false),
                scrut: t,
            },
        });
    }
    t
}
