//! Evaluation. Decoding (`El`) and lifting (`cLift`) compute by the strict
//! Tarski equations, so a canonical code never has `cLift` at its head.

use std::rc::Rc;

use super::value::{Closure, Elim, Env, Head, Proof, RcValue, Value};
use crate::syntax::Term;

pub fn eval(env: &Env, t: &Term) -> RcValue {
    use Term::*;
    let closure = |body: &Rc<Term>| Closure::Term {
        env: env.clone(),
        body: body.clone(),
    };
    Rc::new(match t {
        Var(i) => {
            let n = env.locals.len();
            match n.checked_sub(i + 1) {
                Some(l) => return env.locals[l].clone(),
                None => panic!("kernel invariant: index {i} out of scope (depth {n})"),
            }
        }
        Global(name) => match env.globals.get(name) {
            Some(g) => return g.value.clone(),
            None => panic!("kernel invariant: unknown global `{name}`"),
        },
        Ann(t, _) => return eval(env, t),

        VType(i) => Value::VType(*i),
        CBool => Value::SBool,
        CUnit => Value::SUnit,
        CPi(a, b) => Value::SPi(eval(env, a), closure(b)),
        CSg(a, b) => Value::SSg(eval(env, a), closure(b)),
        CUni(k) => Value::SUni(*k),
        CLift(c) => return lift(eval(env, c)),
        El(c) => return el(eval(env, c)),

        Pi(a, b) => Value::PiT(eval(env, a), closure(b)),
        Sg(a, b) => Value::SgT(eval(env, a), closure(b)),
        BoolT => Value::BoolT,
        UnitT => Value::UnitT,

        Lam(b) => Value::Lam(closure(b)),
        App(f, a) => return app(eval(env, f), eval(env, a)),
        Pair(a, b) => Value::Pair(eval(env, a), eval(env, b)),
        Fst(p) => return fst(eval(env, p)),
        Snd(p) => return snd(eval(env, p)),
        Tt => Value::Tt,
        True => Value::True,
        False => Value::False,
        BoolElim {
            motive,
            on_true,
            on_false,
            scrut,
        } => {
            return bool_elim(
                closure(motive),
                eval(env, on_true),
                eval(env, on_false),
                eval(env, scrut),
            )
        }

        PropT => Value::PropT,
        TopP => Value::TopP,
        BotP => Value::BotP,
        ObsEq(i, a, b) => Value::ObsEq(*i, eval(env, a), eval(env, b)),

        Star => Value::Prf(Proof::Star),
        PiFst(e) => Value::Prf(Proof::PiFst(eval(env, e))),
        PiSnd(e, a) => Value::Prf(Proof::PiSnd(eval(env, e), eval(env, a))),
        SgFst(e) => Value::Prf(Proof::SgFst(eval(env, e))),
        SgSnd(e, a) => Value::Prf(Proof::SgSnd(eval(env, e), eval(env, a))),
        Sym(e) => Value::Prf(Proof::Sym(eval(env, e))),
        Refl(c) => Value::Prf(Proof::Refl(eval(env, c))),
        Exfalso(motive, prf) => Value::Neutral(
            Head::Exfalso {
                motive: eval(env, motive),
                prf: eval(env, prf),
            },
            Vec::new(),
        ),
        Cast {
            src,
            tgt,
            prf,
            body,
        } => return cast(eval(env, src), eval(env, tgt), eval(env, prf), eval(env, body)),
    })
}

fn push(v: &Value, elim: Elim) -> RcValue {
    match v {
        Value::Neutral(head, spine) => {
            let mut spine = spine.clone();
            spine.push(elim);
            Rc::new(Value::Neutral(head.clone(), spine))
        }
        other => panic!("kernel invariant: cannot eliminate {other:?} with {elim:?}"),
    }
}

pub fn app(f: RcValue, a: RcValue) -> RcValue {
    match &*f {
        Value::Lam(c) => c.apply(a),
        other => push(other, Elim::App(a)),
    }
}

pub fn fst(p: RcValue) -> RcValue {
    match &*p {
        Value::Pair(a, _) => a.clone(),
        other => push(other, Elim::Fst),
    }
}

pub fn snd(p: RcValue) -> RcValue {
    match &*p {
        Value::Pair(_, b) => b.clone(),
        other => push(other, Elim::Snd),
    }
}

pub fn bool_elim(motive: Closure, on_true: RcValue, on_false: RcValue, scrut: RcValue) -> RcValue {
    match &*scrut {
        Value::True => on_true,
        Value::False => on_false,
        other => push(
            other,
            Elim::BoolElim {
                motive,
                on_true,
                on_false,
            },
        ),
    }
}

/// Lift a code one level: commutes with every code former, fixes `cUni k`,
/// and survives only on neutral codes.
pub fn lift(code: RcValue) -> RcValue {
    Rc::new(match &*code {
        Value::SBool => Value::SBool,
        Value::SUnit => Value::SUnit,
        Value::SUni(k) => Value::SUni(*k),
        Value::SPi(a, b) => {
            let b = b.clone();
            Value::SPi(lift(a.clone()), Closure::native(move |x| lift(b.apply(x))))
        }
        Value::SSg(a, b) => {
            let b = b.clone();
            Value::SSg(lift(a.clone()), Closure::native(move |x| lift(b.apply(x))))
        }
        Value::SLift(n, c) => Value::SLift(n + 1, c.clone()),
        Value::Neutral(..) => Value::SLift(1, code.clone()),
        other => panic!("kernel invariant: lift of non-code {other:?}"),
    })
}

/// Decode a code to the type it names.
pub fn el(code: RcValue) -> RcValue {
    Rc::new(match &*code {
        Value::SBool => Value::BoolT,
        Value::SUnit => Value::UnitT,
        Value::SUni(k) => Value::VType(*k),
        Value::SPi(a, b) => {
            let b = b.clone();
            Value::PiT(el(a.clone()), Closure::native(move |x| el(b.apply(x))))
        }
        Value::SSg(a, b) => {
            let b = b.clone();
            Value::SgT(el(a.clone()), Closure::native(move |x| el(b.apply(x))))
        }
        // Decoding is invariant under lifting.
        Value::SLift(_, c) => Value::El(c.clone()),
        Value::Neutral(..) => Value::El(code.clone()),
        other => panic!("kernel invariant: El of non-code {other:?}"),
    })
}

/// One step of cast computation, by recursion on the two codes.
///
/// Recursive casts on codomains carry the placeholder proof `star`; domain
/// casts carry the honest proof `sym (piFst e)` / `sgFst e`.
pub fn cast(src: RcValue, tgt: RcValue, prf: RcValue, body: RcValue) -> RcValue {
    match (&*src, &*tgt) {
        (Value::SBool, Value::SBool) => body,
        (Value::SUnit, Value::SUnit) => Rc::new(Value::Tt),
        (Value::SUni(j), Value::SUni(k)) if j == k => body,
        (Value::SPi(a0, b0), Value::SPi(a1, b1)) => {
            let (a0, b0, a1, b1) = (a0.clone(), b0.clone(), a1.clone(), b1.clone());
            let back = Rc::new(Value::Prf(Proof::Sym(Rc::new(Value::Prf(Proof::PiFst(prf))))));
            Rc::new(Value::Lam(Closure::native(move |x1| {
                let x0 = cast(a1.clone(), a0.clone(), back.clone(), x1.clone());
                cast(b0.apply(x0.clone()), b1.apply(x1), star(), app(body.clone(), x0))
            })))
        }
        (Value::SSg(a0, b0), Value::SSg(a1, b1)) => {
            let x0 = fst(body.clone());
            let fwd = Rc::new(Value::Prf(Proof::SgFst(prf)));
            let x1 = cast(a0.clone(), a1.clone(), fwd, x0.clone());
            let y1 = cast(b0.apply(x0), b1.apply(x1.clone()), star(), snd(body));
            Rc::new(Value::Pair(x1, y1))
        }
        _ => Rc::new(Value::Neutral(
            Head::Cast {
                src,
                tgt,
                prf,
                body,
            },
            Vec::new(),
        )),
    }
}

pub fn star() -> RcValue {
    Rc::new(Value::Prf(Proof::Star))
}
