//! Kernel properties checked on generated codes. Each returns a description
//! of the first violation.

#![allow(dead_code)]

use std::rc::Rc;

use obtt_core::kernel::{el, Context, Value};
use obtt_core::syntax::{print, Level, RcTerm, Term};

use super::codegen::{decode_oracle, instantiate, lifts_only_on_neutrals, shift};

type Check = Result<(), String>;

fn vtype(level: Level) -> Rc<Value> {
    Rc::new(Value::VType(level))
}

fn nf(cx: &Context, v: &Value) -> RcTerm {
    cx.quote(v)
}

/// `c : V level`, and decoding it agrees with the structural decode.
pub fn decode_agrees(cx: &Context, c: &Term, level: Level) -> Check {
    cx.check(c, &vtype(level)).map_err(|e| format!("{}: {e}", print(c)))?;
    let inferred = cx.infer(c).map_err(|e| format!("{}: {e}", print(c)))?;
    if !matches!(*inferred, Value::VType(l) if l == level) {
        return Err(format!("{} infers {}, expected V {level}", print(c), cx.show(&inferred)));
    }
    let decoded = el(cx.eval(c));
    let oracle = cx
        .check_type(&decode_oracle(c))
        .map_err(|e| format!("structural decode of {} is ill-formed: {e}", print(c)))?;
    let (got, want) = (nf(cx, &decoded), nf(cx, &oracle));
    if got != want {
        return Err(format!("El {} normalizes to {}, expected {}", print(c), print(&got), print(&want)));
    }
    if !cx.conv_type(&decoded, &oracle) {
        return Err(format!("El {} is not convertible with its structural decode", print(c)));
    }
    Ok(())
}

/// Lifting once or twice leaves the decode alone and normalizes to lifts of
/// neutrals only.
pub fn lift_normal_form(cx: &Context, c: &Term, level: Level) -> Check {
    let base = nf(cx, &el(cx.eval(c)));
    let mut lifted = c.clone();
    for up in 1..=2 {
        lifted = Term::CLift(Rc::new(lifted));
        cx.check(&lifted, &vtype(level + up)).map_err(|e| format!("{}: {e}", print(&lifted)))?;
        let v = cx.eval(&lifted);
        let n = nf(cx, &v);
        if !lifts_only_on_neutrals(&n) {
            return Err(format!("{} normalizes to {}, with a lift on a canonical code", print(&lifted), print(&n)));
        }
        let decoded = nf(cx, &el(v));
        if decoded != base {
            return Err(format!("El {} is {}, but El {} is {}", print(&lifted), print(&decoded), print(c), print(&base)));
        }
    }
    Ok(())
}

/// Pi codes are injective: conversion of two Pi codes is conversion of their
/// parts, and the projections of an equation between them have the expected
/// types.
pub fn pi_injective(cx: &Context, level: Level, (a0, b0): (&RcTerm, &RcTerm), (a1, b1): (&RcTerm, &RcTerm)) -> Check {
    let p = Rc::new(Term::CPi(a0.clone(), b0.clone()));
    let q = Rc::new(Term::CPi(a1.clone(), b1.clone()));
    for t in [&p, &q] {
        cx.check(t, &vtype(level)).map_err(|e| format!("{}: {e}", print(t)))?;
    }
    let whole = cx.conv(&cx.eval(&p), &cx.eval(&q), &vtype(level));
    let dom = cx.conv(&cx.eval(a0), &cx.eval(a1), &vtype(level));
    let cod = dom && {
        let inner = cx.bind(el(cx.eval(a0)));
        inner.conv(&inner.eval(b0), &inner.eval(b1), &vtype(level))
    };
    if whole != cod {
        return Err(format!("{} ~ {} is {whole}, but its parts give {cod}", print(&p), print(&q)));
    }

    // e : Eq level p q
    let eq = cx
        .check_type(&Term::ObsEq(level, p.clone(), q.clone()))
        .map_err(|e| e.to_string())?;
    let cx1 = cx.bind(eq);
    let up = |t: &RcTerm, by| shift(t, by, 0);
    let e1 = Rc::new(Term::Var(0));
    let got = cx1.infer(&Term::PiFst(e1.clone())).map_err(|e| e.to_string())?;
    let want = cx1
        .check_type(&Term::ObsEq(level, up(a0, 1), up(a1, 1)))
        .map_err(|e| e.to_string())?;
    if !cx1.conv_type(&got, &want) {
        return Err(format!("piFst of {} = {} has type {}", print(&p), print(&q), cx1.show(&got)));
    }

    // x : El a0
    let cx2 = cx1.bind(el(cx1.eval(&up(a0, 1))));
    let (e2, x) = (Rc::new(Term::Var(1)), Term::Var(0));
    let got = cx2.infer(&Term::PiSnd(e2.clone(), Rc::new(x.clone()))).map_err(|e| e.to_string())?;
    let moved = Term::Cast {
        src: up(a0, 2),
        tgt: up(a1, 2),
        prf: Rc::new(Term::PiFst(e2)),
        body: Rc::new(x.clone()),
    };
    let want = Term::ObsEq(
        level,
        instantiate(&shift(b0, 2, 1), &x),
        instantiate(&shift(b1, 2, 1), &moved),
    );
    let want = cx2.check_type(&want).map_err(|e| e.to_string())?;
    if !cx2.conv_type(&got, &want) {
        return Err(format!("piSnd of {} = {} has type {}", print(&p), print(&q), cx2.show(&got)));
    }
    Ok(())
}

/// Any two proofs of the same equation are convertible.
pub fn proofs_irrelevant(cx: &Context, c: &RcTerm, level: Level) -> Check {
    let eq = Term::ObsEq(level, c.clone(), c.clone());
    let eq_ty = cx.check_type(&eq).map_err(|e| e.to_string())?;
    let cx2 = cx.bind(eq_ty.clone()).bind(eq_ty);
    let up = shift(c, 2, 0);
    let refl = Term::Refl(up);
    let ty = cx2.eval(&shift(&Rc::new(eq), 2, 0));
    let proofs = [
        Term::Var(0),
        Term::Var(1),
        Term::Sym(Rc::new(Term::Var(0))),
        Term::Sym(Rc::new(Term::Sym(Rc::new(Term::Var(1))))),
        refl,
    ];
    let values: Vec<_> = proofs.iter().map(|t| cx2.eval(t)).collect();
    for (t, v) in proofs.iter().zip(&values) {
        cx2.check(t, &ty).map_err(|e| format!("{}: {e}", print(t)))?;
        if !cx2.conv(v, &values[0], &ty) {
            return Err(format!("{} and {} differ as proofs of {}", print(t), print(&proofs[0]), cx2.show(&ty)));
        }
    }
    Ok(())
}
