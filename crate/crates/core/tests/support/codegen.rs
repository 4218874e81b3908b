//! Seeded generation of well-typed codes, shared by the kernel property
//! tests and the acceptance suite.

#![allow(dead_code)]

use std::rc::Rc;

use obtt_core::kernel::{Context, Value};
use obtt_core::syntax::{Level, RcTerm, Term};
use rand::Rng;

fn rc(t: Term) -> RcTerm {
    Rc::new(t)
}

/// A context with `open` variables of type `V 0`.
pub fn open_context(open: usize) -> Context {
    let mut cx = Context::default();
    for _ in 0..open {
        cx = cx.bind(Rc::new(Value::VType(0)));
    }
    cx
}

/// Add `by` to every variable at or above `cutoff`.
pub fn shift(t: &Term, by: usize, cutoff: usize) -> RcTerm {
    map_vars(t, cutoff, &|i, c| if i >= c { Term::Var(i + by) } else { Term::Var(i) })
}

/// Instantiate the binder of `body` with `arg`.
pub fn instantiate(body: &Term, arg: &Term) -> RcTerm {
    subst(body, 0, arg)
}

fn subst(t: &Term, depth: usize, arg: &Term) -> RcTerm {
    map_vars(t, depth, &|i, c| {
        if i == c {
            (*shift(arg, c, 0)).clone()
        } else if i > c {
            Term::Var(i - 1)
        } else {
            Term::Var(i)
        }
    })
}

/// Rebuild `t`, replacing each variable by `f(index, binders above it + base)`.
fn map_vars(t: &Term, base: usize, f: &dyn Fn(usize, usize) -> Term) -> RcTerm {
    use Term::*;
    let go = |u: &RcTerm| map_vars(u, base, f);
    let under = |u: &RcTerm| map_vars(u, base + 1, f);
    rc(match t {
        Var(i) => f(*i, base),
        Global(_) | VType(_) | CBool | CUnit | CUni(_) | BoolT | UnitT | Tt | True | False | PropT | TopP | BotP | Star => t.clone(),
        Ann(a, b) => Ann(go(a), go(b)),
        CPi(a, b) => CPi(go(a), under(b)),
        CSg(a, b) => CSg(go(a), under(b)),
        CLift(a) => CLift(go(a)),
        El(a) => El(go(a)),
        Pi(a, b) => Pi(go(a), under(b)),
        Sg(a, b) => Sg(go(a), under(b)),
        Lam(b) => Lam(under(b)),
        App(a, b) => App(go(a), go(b)),
        Pair(a, b) => Pair(go(a), go(b)),
        Fst(a) => Fst(go(a)),
        Snd(a) => Snd(go(a)),
        BoolElim {
            motive,
            on_true,
            on_false,
            scrut,
        } => BoolElim {
            motive: under(motive),
            on_true: go(on_true),
            on_false: go(on_false),
            scrut: go(scrut),
        },
        ObsEq(i, a, b) => ObsEq(*i, go(a), go(b)),
        Exfalso(a, b) => Exfalso(go(a), go(b)),
        PiFst(a) => PiFst(go(a)),
        PiSnd(a, b) => PiSnd(go(a), go(b)),
        SgFst(a) => SgFst(go(a)),
        SgSnd(a, b) => SgSnd(go(a), go(b)),
        Sym(a) => Sym(go(a)),
        Refl(a) => Refl(go(a)),
        Cast { src, tgt, prf, body } => Cast {
            src: go(src),
            tgt: go(tgt),
            prf: go(prf),
            body: go(body),
        },
    })
}

/// Generates codes of `V level` over `open` variables of type `V 0`.
pub struct CodeGen {
    pub open: usize,
    pub max_level: Level,
}

impl CodeGen {
    /// A code whose inferred type is exactly `V level`, under `binders` extra binders, at most `depth`
    /// formers deep.
    pub fn code(&self, rng: &mut impl Rng, level: Level, binders: usize, depth: u32) -> RcTerm {
        let leaf = depth == 0 || rng.gen_bool(0.3);
        if leaf {
            if level > 0 {
                return if rng.gen_bool(0.3) {
                    rc(Term::CUni(level - 1))
                } else {
                    rc(Term::CLift(self.code(rng, level - 1, binders, 0)))
                };
            }
            let kinds = 2 + usize::from(self.open > 0);
            return match rng.gen_range(0..kinds) {
                0 => rc(Term::CBool),
                1 => rc(Term::CUnit),
                _ => rc(Term::Var(binders + self.open - 1 - rng.gen_range(0..self.open))),
            };
        }
        match rng.gen_range(0..5) {
            0 if level > 0 => rc(Term::CLift(self.code(rng, level - 1, binders, depth - 1))),
            0 | 1 | 2 => {
                let dom = self.code(rng, level, binders, depth - 1);
                let cod = self.family(rng, &dom, level, binders, depth - 1);
                rc(Term::CPi(dom, cod))
            }
            _ => {
                let dom = self.code(rng, level, binders, depth - 1);
                let cod = self.family(rng, &dom, level, binders, depth - 1);
                rc(Term::CSg(dom, cod))
            }
        }
    }

    /// A codomain under one new binder ranging over `dom`.
    pub fn family(&self, rng: &mut impl Rng, dom: &Term, level: Level, binders: usize, depth: u32) -> RcTerm {
        if *decode_oracle(dom) == Term::BoolT && rng.gen_bool(0.5) {
            let t = self.code(rng, level, binders + 1, depth);
            let f = self.code(rng, level, binders + 1, depth);
            return rc(Term::BoolElim {
                motive: rc(Term::VType(level)),
                on_true: t,
                on_false: f,
                scrut: rc(Term::Var(0)),
            });
        }
        shift(&self.code(rng, level, binders, depth), 1, 0)
    }

    /// A Pi code, for injectivity checks.
    pub fn pi_code(&self, rng: &mut impl Rng, level: Level, depth: u32) -> (RcTerm, RcTerm) {
        let dom = self.code(rng, level, 0, depth);
        let cod = self.family(rng, &dom, level, 0, depth);
        (dom, cod)
    }

    pub fn level(&self, rng: &mut impl Rng) -> Level {
        rng.gen_range(0..self.max_level)
    }
}

/// The decode of a code, computed on syntax: canonical formers go to the
/// matching type formers and lifts are dropped.
pub fn decode_oracle(t: &Term) -> RcTerm {
    match t {
        Term::CBool => rc(Term::BoolT),
        Term::CUnit => rc(Term::UnitT),
        Term::CUni(k) => rc(Term::VType(*k)),
        Term::CLift(c) => decode_oracle(c),
        Term::CPi(a, b) => rc(Term::Pi(decode_oracle(a), decode_oracle(b))),
        Term::CSg(a, b) => rc(Term::Sg(decode_oracle(a), decode_oracle(b))),
        _ => rc(Term::El(rc(t.clone()))),
    }
}

/// Does every lift in a normal form sit on a neutral code?
pub fn lifts_only_on_neutrals(t: &Term) -> bool {
    let mut ok = true;
    t.visit(&mut |u| {
        if let Term::CLift(c) = u {
            let mut inner = &**c;
            while let Term::CLift(d) = inner {
                inner = d;
            }
            if matches!(inner, Term::CBool | Term::CUnit | Term::CUni(_) | Term::CPi(..) | Term::CSg(..)) {
                ok = false;
            }
        }
    });
    ok
}
