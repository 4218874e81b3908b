//! The semantic domain for normalization by evaluation.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use crate::syntax::{Level, RcTerm};

pub type RcValue = Rc<Value>;

/// De Bruijn level of a bound variable.
pub type VarLevel = usize;

#[derive(Debug, Clone)]
pub enum Value {
    Neutral(Head, Vec<Elim>),

    Lam(Closure),
    Pair(RcValue, RcValue),
    True,
    False,
    Tt,
    /// Proof terms. They are kept for readback only; conversion never looks
    /// inside them.
    Prf(Proof),

    PiT(RcValue, Closure),
    SgT(RcValue, Closure),
    BoolT,
    UnitT,
    VType(Level),
    PropT,
    TopP,
    BotP,
    ObsEq(Level, RcValue, RcValue),
    /// Decoding of a neutral code.
    El(RcValue),

    SBool,
    SUnit,
    SPi(RcValue, Closure),
    SSg(RcValue, Closure),
    SUni(Level),
    /// `cLift` applied `count` times to a neutral code.
    SLift(u32, RcValue),
}

/// Heads of stuck computations.
#[derive(Debug, Clone)]
pub enum Head {
    Var(VarLevel),
    /// A cast blocked on a neutral code or on mismatched code formers.
    Cast {
        src: RcValue,
        tgt: RcValue,
        prf: RcValue,
        body: RcValue,
    },
    Exfalso {
        motive: RcValue,
        prf: RcValue,
    },
}

#[derive(Debug, Clone)]
pub enum Elim {
    App(RcValue),
    Fst,
    Snd,
    BoolElim {
        motive: Closure,
        on_true: RcValue,
        on_false: RcValue,
    },
}

#[derive(Debug, Clone)]
pub enum Proof {
    Star,
    PiFst(RcValue),
    PiSnd(RcValue, RcValue),
    SgFst(RcValue),
    SgSnd(RcValue, RcValue),
    Sym(RcValue),
    Refl(RcValue),
}

/// A definition visible to the evaluator.
#[derive(Debug, Clone)]
pub struct Global {
    pub ty: RcValue,
    pub value: RcValue,
}

pub type Globals = HashMap<Rc<str>, Global>;

#[derive(Debug, Clone, Default)]
pub struct Env {
    pub locals: Vec<RcValue>,
    pub globals: Rc<Globals>,
}

impl Env {
    pub fn new(globals: Rc<Globals>) -> Env {
        Env {
            locals: Vec::new(),
            globals,
        }
    }

    pub fn extend(&self, v: RcValue) -> Env {
        let mut locals = self.locals.clone();
        locals.push(v);
        Env {
            locals,
            globals: self.globals.clone(),
        }
    }
}

/// The body of a binder, either syntactic or produced by the evaluator
/// itself (lifted codomains, cast functions).
#[derive(Clone)]
pub enum Closure {
    Term { env: Env, body: RcTerm },
    Native(Rc<dyn Fn(RcValue) -> RcValue>),
}

impl fmt::Debug for Closure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Closure::Term { body, .. } => f.debug_tuple("Term").field(body).finish(),
            Closure::Native(_) => f.write_str("Native(..)"),
        }
    }
}

impl Closure {
    pub fn native(f: impl Fn(RcValue) -> RcValue + 'static) -> Closure {
        Closure::Native(Rc::new(f))
    }

    pub fn apply(&self, arg: RcValue) -> RcValue {
        match self {
            Closure::Term { env, body } => super::eval(&env.extend(arg), body),
            Closure::Native(f) => f(arg),
        }
    }
}

impl Value {
    pub fn var(level: VarLevel) -> RcValue {
        Rc::new(Value::Neutral(Head::Var(level), Vec::new()))
    }

    pub fn is_neutral(&self) -> bool {
        matches!(self, Value::Neutral(..))
    }

    /// Is this a type whose inhabitants are definitionally irrelevant?
    pub fn is_proposition(&self) -> bool {
        // A neutral used as a type can only be a variable of type `Prop` (or
        // an elimination producing one): codes become types through `El`.
        matches!(
            self,
            Value::TopP | Value::BotP | Value::ObsEq(..) | Value::Neutral(..)
        )
    }
}
