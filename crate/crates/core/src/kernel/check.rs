//! Bidirectional type checking.

use std::rc::Rc;

use thiserror::Error;

use super::conv::Conv;
use super::eval::{cast, el, eval, fst};
use super::quote::quote;
use super::value::{Closure, Env, Global, Globals, Proof, RcValue, Value};
use crate::syntax::{print_with, Level, SourceFile, Span, Term};

/// Default number of the largest universe level available to programs.
pub const DEFAULT_MAX_LEVEL: Level = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("cannot infer a type for `{0}`; add an annotation")]
    NotInferable(String),
    #[error("type mismatch: expected `{expected}`, found `{actual}`")]
    Mismatch { expected: String, actual: String },
    #[error("`{term}` does not have type `{expected}`")]
    CheckFailed { term: String, expected: String },
    #[error("universe level violation: {0}")]
    Level(String),
    #[error("`{proof}` must prove an equality of {former}-codes, but proves `{found}`")]
    Decomposition {
        proof: String,
        former: &'static str,
        found: String,
    },
    #[error("`{0}` is not a type")]
    NotAType(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: in `{name}`: {error}")]
pub struct DeclError {
    pub name: String,
    pub span: Span,
    pub error: TypeError,
}

/// A typing context: local variables with their types, the globals checked
/// so far, and the largest universe level available.
#[derive(Debug, Clone)]
pub struct Context {
    pub max_level: Level,
    names: Vec<Rc<str>>,
    types: Vec<RcValue>,
    env: Env,
}

impl Default for Context {
    fn default() -> Self {
        Context::new(DEFAULT_MAX_LEVEL)
    }
}

type Result<T> = std::result::Result<T, TypeError>;

impl Context {
    pub fn new(max_level: Level) -> Context {
        Context {
            max_level,
            names: Vec::new(),
            types: Vec::new(),
            env: Env::default(),
        }
    }

    pub fn depth(&self) -> usize {
        self.types.len()
    }

    pub fn env(&self) -> &Env {
        &self.env
    }

    pub fn globals(&self) -> &Rc<Globals> {
        &self.env.globals
    }

    /// Extend with a local of the given type; returns the new context.
    pub fn bind(&self, ty: RcValue) -> Context {
        let mut cx = self.clone();
        cx.env = cx.env.extend(Value::var(cx.types.len()));
        cx.names.push(format!("x{}", cx.types.len()).into());
        cx.types.push(ty);
        cx
    }

    pub fn define(&mut self, name: Rc<str>, ty: RcValue, value: RcValue) {
        let mut globals = (*self.env.globals).clone();
        globals.insert(name, Global { ty, value });
        self.env.globals = Rc::new(globals);
    }

    pub fn eval(&self, t: &Term) -> RcValue {
        eval(&self.env, t)
    }

    pub fn quote(&self, v: &Value) -> Rc<Term> {
        quote(self.depth(), v)
    }

    /// Print a value in the surface syntax, using the context's names.
    pub fn show(&self, v: &Value) -> String {
        print_with(&self.names, &self.quote(v))
    }

    fn show_term(&self, t: &Term) -> String {
        print_with(&self.names, t)
    }

    pub fn conv(&self, a: &RcValue, b: &RcValue, ty: &RcValue) -> bool {
        Conv::new(self.types.clone()).conv(a, b, ty)
    }

    pub fn conv_type(&self, a: &RcValue, b: &RcValue) -> bool {
        Conv::new(self.types.clone()).conv_type(a, b)
    }

    fn check_level(&self, level: Level) -> Result<()> {
        if level > self.max_level {
            return Err(TypeError::Level(format!(
                "V {level} exceeds the largest universe V {}",
                self.max_level
            )));
        }
        Ok(())
    }

    /// Check that `t` is a type and evaluate it.
    pub fn check_type(&self, t: &Term) -> Result<RcValue> {
        match t {
            Term::VType(i) => self.check_level(*i)?,
            Term::BoolT | Term::UnitT | Term::PropT | Term::TopP | Term::BotP => {}
            Term::Pi(a, b) | Term::Sg(a, b) => {
                let a = self.check_type(a)?;
                self.bind(a).check_type(b)?;
            }
            Term::El(c) => {
                self.infer_level(c)?;
            }
            Term::ObsEq(..) => {
                self.infer(t)?;
            }
            _ => {
                let ty = self.infer(t).map_err(|e| match e {
                    TypeError::NotInferable(_) => TypeError::NotAType(self.show_term(t)),
                    e => e,
                })?;
                if !matches!(&*ty, Value::PropT) {
                    return Err(TypeError::NotAType(self.show_term(t)));
                }
            }
        }
        Ok(self.eval(t))
    }

    /// Infer the universe a code lives in.
    fn infer_level(&self, code: &Term) -> Result<Level> {
        let ty = self.infer(code)?;
        match &*ty {
            Value::VType(i) => Ok(*i),
            _ => Err(TypeError::Mismatch {
                expected: "V _".into(),
                actual: self.show(&ty),
            }),
        }
    }

    pub fn check(&self, t: &Term, ty: &RcValue) -> Result<()> {
        match (t, &**ty) {
            (Term::Lam(body), Value::PiT(dom, cod)) => {
                let inner = self.bind(dom.clone());
                inner.check(body, &cod.apply(Value::var(self.depth())))
            }
            (Term::Pair(a, b), Value::SgT(dom, cod)) => {
                self.check(a, dom)?;
                self.check(b, &cod.apply(self.eval(a)))
            }
            (Term::CBool | Term::CUnit, Value::VType(j)) => self.check_level(*j),
            (Term::CUni(k), Value::VType(j)) => {
                if k >= j {
                    return Err(TypeError::Level(format!(
                        "cUni {k} names V {k}, which is not a code of V {j}; only cUni 0 .. cUni {} are",
                        j.saturating_sub(1)
                    )));
                }
                Ok(())
            }
            (Term::CPi(a, b) | Term::CSg(a, b), Value::VType(_)) => {
                self.check(a, ty)?;
                self.bind(el(self.eval(a))).check(b, ty)
            }
            (Term::CLift(c), Value::VType(j)) => match j.checked_sub(1) {
                Some(i) => self.check(c, &Rc::new(Value::VType(i))),
                None => Err(TypeError::Level("cLift produces codes of V 1 or above".into())),
            },
            (Term::Star, Value::TopP) => Ok(()),
            (Term::Lam(_) | Term::Pair(..), _) => Err(TypeError::CheckFailed {
                term: self.show_term(t),
                expected: self.show(ty),
            }),
            _ => {
                let actual = self.infer(t)?;
                if self.conv_type(&actual, ty) {
                    Ok(())
                } else {
                    Err(TypeError::Mismatch {
                        expected: self.show(ty),
                        actual: self.show(&actual),
                    })
                }
            }
        }
    }

    /// The two codes an equality proof relates, at their common level.
    fn infer_equation(&self, prf: &Term) -> Result<(Level, RcValue, RcValue)> {
        let ty = self.infer(prf)?;
        match &*ty {
            Value::ObsEq(i, a, b) => Ok((*i, a.clone(), b.clone())),
            _ => Err(TypeError::Mismatch {
                expected: "Eq _ _ _".into(),
                actual: self.show(&ty),
            }),
        }
    }

    pub fn infer(&self, t: &Term) -> Result<RcValue> {
        use Term::*;
        let v = |v: Value| Ok(Rc::new(v));
        match t {
            Var(i) => Ok(self.types[self.depth() - 1 - i].clone()),
            Global(name) => Ok(self.env.globals[name].ty.clone()),
            Ann(t, ty) => {
                let ty = self.check_type(ty)?;
                self.check(t, &ty)?;
                Ok(ty)
            }
            CBool | CUnit => v(Value::VType(0)),
            CUni(k) => {
                self.check_level(k + 1)?;
                v(Value::VType(k + 1))
            }
            CPi(a, b) | CSg(a, b) => {
                let level = self.infer_level(a)?;
                let ty = Rc::new(Value::VType(level));
                self.bind(el(self.eval(a))).check(b, &ty)?;
                Ok(ty)
            }
            CLift(c) => {
                let level = self.infer_level(c)? + 1;
                self.check_level(level)?;
                v(Value::VType(level))
            }
            App(f, a) => {
                let fty = self.infer(f)?;
                match &*fty {
                    Value::PiT(dom, cod) => {
                        self.check(a, dom)?;
                        Ok(cod.apply(self.eval(a)))
                    }
                    _ => Err(TypeError::Mismatch {
                        expected: "a function type".into(),
                        actual: self.show(&fty),
                    }),
                }
            }
            Fst(p) | Snd(p) => {
                let pty = self.infer(p)?;
                match &*pty {
                    Value::SgT(dom, _) if matches!(t, Fst(_)) => Ok(dom.clone()),
                    Value::SgT(_, cod) => Ok(cod.apply(fst(self.eval(p)))),
                    _ => Err(TypeError::Mismatch {
                        expected: "a pair type".into(),
                        actual: self.show(&pty),
                    }),
                }
            }
            Tt => v(Value::UnitT),
            True | False => v(Value::BoolT),
            BoolElim {
                motive,
                on_true,
                on_false,
                scrut,
            } => {
                self.bind(Rc::new(Value::BoolT)).check_type(motive)?;
                let motive = Closure::Term {
                    env: self.env.clone(),
                    body: motive.clone(),
                };
                self.check(scrut, &Rc::new(Value::BoolT))?;
                self.check(on_true, &motive.apply(Rc::new(Value::True)))?;
                self.check(on_false, &motive.apply(Rc::new(Value::False)))?;
                Ok(motive.apply(self.eval(scrut)))
            }
            TopP | BotP => v(Value::PropT),
            ObsEq(i, a, b) => {
                self.check_level(*i)?;
                let code_ty = Rc::new(Value::VType(*i));
                self.check(a, &code_ty)?;
                self.check(b, &code_ty)?;
                v(Value::PropT)
            }
            Star => v(Value::TopP),
            Exfalso(motive, prf) => {
                let motive = self.check_type(motive)?;
                self.check(prf, &Rc::new(Value::BotP))?;
                Ok(motive)
            }
            Refl(c) => {
                let level = self.infer_level(c)?;
                let c = self.eval(c);
                v(Value::ObsEq(level, c.clone(), c))
            }
            Sym(e) => {
                let (i, a, b) = self.infer_equation(e)?;
                v(Value::ObsEq(i, b, a))
            }
            PiFst(e) | PiSnd(e, _) | SgFst(e) | SgSnd(e, _) => {
                let (i, lhs, rhs) = self.infer_equation(e)?;
                let is_pi = matches!(t, PiFst(_) | PiSnd(..));
                let parts = match (&*lhs, &*rhs) {
                    (Value::SPi(a0, b0), Value::SPi(a1, b1)) if is_pi => Some((a0, b0, a1, b1)),
                    (Value::SSg(a0, b0), Value::SSg(a1, b1)) if !is_pi => Some((a0, b0, a1, b1)),
                    _ => None,
                };
                let Some((a0, b0, a1, b1)) = parts else {
                    return Err(TypeError::Decomposition {
                        proof: self.show_term(e),
                        former: if is_pi { "cPi" } else { "cSg" },
                        found: self.show(&Value::ObsEq(i, lhs.clone(), rhs.clone())),
                    });
                };
                match t {
                    PiFst(_) | SgFst(_) => v(Value::ObsEq(i, a0.clone(), a1.clone())),
                    PiSnd(_, a) | SgSnd(_, a) => {
                        self.check(a, &el(a0.clone()))?;
                        let a = self.eval(a);
                        let ev = self.eval(e);
                        let first = Rc::new(Value::Prf(if is_pi {
                            Proof::PiFst(ev)
                        } else {
                            Proof::SgFst(ev)
                        }));
                        let moved = cast(a0.clone(), a1.clone(), first, a.clone());
                        v(Value::ObsEq(i, b0.apply(a), b1.apply(moved)))
                    }
                    _ => unreachable!(),
                }
            }
            Cast {
                src,
                tgt,
                prf,
                body,
            } => {
                let level = self.infer_level(src)?;
                self.check(tgt, &Rc::new(Value::VType(level)))?;
                let (src, tgt) = (self.eval(src), self.eval(tgt));
                self.check(prf, &Rc::new(Value::ObsEq(level, src.clone(), tgt.clone())))?;
                self.check(body, &el(src))?;
                Ok(el(tgt))
            }
            VType(_) | Pi(..) | Sg(..) | BoolT | UnitT | PropT | El(_) | Lam(_) | Pair(..) => {
                Err(TypeError::NotInferable(self.show_term(t)))
            }
        }
    }
}

/// Check every declaration of a file in order, returning the final context.
pub fn check_file(file: &SourceFile, max_level: Level) -> std::result::Result<Context, DeclError> {
    let mut cx = Context::new(max_level);
    for decl in &file.declarations {
        let wrap = |error| DeclError {
            name: decl.name.to_string(),
            span: decl.span,
            error,
        };
        let ty = match &decl.annotation {
            Some(ann) => {
                let ty = cx.check_type(ann).map_err(wrap)?;
                cx.check(&decl.body, &ty).map_err(wrap)?;
                ty
            }
            None => cx.infer(&decl.body).map_err(wrap)?,
        };
        let value = cx.eval(&decl.body);
        cx.define(decl.name.clone(), ty, value);
    }
    Ok(cx)
}
