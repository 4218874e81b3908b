//! Type-directed conversion checking.
//!
//! Code formers are compared by head and then componentwise, which is the
//! operational form of their injectivity. Inhabitants of propositions are
//! always convertible.

use std::rc::Rc;

use super::eval::{app, el, fst, snd};
use super::value::{Elim, Head, RcValue, Value};

/// Conversion checker; `types[l]` is the type of the variable at level `l`.
pub struct Conv {
    types: Vec<RcValue>,
}

impl Conv {
    pub fn new(types: Vec<RcValue>) -> Conv {
        Conv { types }
    }

    fn under<T>(&mut self, ty: RcValue, f: impl FnOnce(&mut Self, RcValue) -> T) -> T {
        let x = Value::var(self.types.len());
        self.types.push(ty);
        let r = f(self, x);
        self.types.pop();
        r
    }

    /// Are `a` and `b`, both of type `ty`, definitionally equal?
    pub fn conv(&mut self, a: &RcValue, b: &RcValue, ty: &RcValue) -> bool {
        match &**ty {
            Value::PiT(dom, cod) => self.under(dom.clone(), |cx, x| {
                let body_ty = cod.apply(x.clone());
                cx.conv(&app(a.clone(), x.clone()), &app(b.clone(), x), &body_ty)
            }),
            Value::SgT(dom, cod) => {
                let (a1, b1) = (fst(a.clone()), fst(b.clone()));
                self.conv(&a1, &b1, dom) && {
                    let ty2 = cod.apply(a1);
                    self.conv(&snd(a.clone()), &snd(b.clone()), &ty2)
                }
            }
            Value::UnitT => true,
            t if t.is_proposition() => true,
            Value::BoolT => match (&**a, &**b) {
                (Value::True, Value::True) | (Value::False, Value::False) => true,
                (Value::Neutral(..), Value::Neutral(..)) => self.conv_neutral(a, b).is_some(),
                _ => false,
            },
            Value::VType(_) => self.conv_code(a, b),
            Value::PropT => self.conv_type(a, b),
            Value::El(_) => self.conv_neutral(a, b).is_some(),
            _ => false,
        }
    }

    /// Equality of codes, by head and then componentwise.
    pub fn conv_code(&mut self, a: &RcValue, b: &RcValue) -> bool {
        match (&**a, &**b) {
            (Value::SBool, Value::SBool) | (Value::SUnit, Value::SUnit) => true,
            (Value::SUni(j), Value::SUni(k)) => j == k,
            (Value::SPi(a0, b0), Value::SPi(a1, b1)) | (Value::SSg(a0, b0), Value::SSg(a1, b1)) => {
                self.conv_code(a0, a1)
                    && self.under(el(a0.clone()), |cx, x| {
                        cx.conv_code(&b0.apply(x.clone()), &b1.apply(x))
                    })
            }
            (Value::SLift(m, c), Value::SLift(n, d)) => m == n && self.conv_neutral(c, d).is_some(),
            (Value::Neutral(..), Value::Neutral(..)) => self.conv_neutral(a, b).is_some(),
            _ => false,
        }
    }

    /// Equality of types.
    pub fn conv_type(&mut self, a: &RcValue, b: &RcValue) -> bool {
        match (&**a, &**b) {
            (Value::VType(i), Value::VType(j)) => i == j,
            (Value::PiT(a0, b0), Value::PiT(a1, b1)) | (Value::SgT(a0, b0), Value::SgT(a1, b1)) => {
                self.conv_type(a0, a1)
                    && self.under(a0.clone(), |cx, x| {
                        cx.conv_type(&b0.apply(x.clone()), &b1.apply(x))
                    })
            }
            (Value::BoolT, Value::BoolT)
            | (Value::UnitT, Value::UnitT)
            | (Value::PropT, Value::PropT)
            | (Value::TopP, Value::TopP)
            | (Value::BotP, Value::BotP) => true,
            (Value::ObsEq(i, a0, b0), Value::ObsEq(j, a1, b1)) => {
                i == j && self.conv_code(a0, a1) && self.conv_code(b0, b1)
            }
            (Value::El(c), Value::El(d)) => self.conv_code(c, d),
            (Value::Neutral(..), Value::Neutral(..)) => self.conv_neutral(a, b).is_some(),
            _ => false,
        }
    }

    /// Compare two neutrals; on success returns their common type.
    fn conv_neutral(&mut self, a: &RcValue, b: &RcValue) -> Option<RcValue> {
        let (Value::Neutral(h0, s0), Value::Neutral(h1, s1)) = (&**a, &**b) else {
            return None;
        };
        if s0.len() != s1.len() {
            return None;
        }
        let mut ty = self.conv_head(h0, h1)?;
        for (k, (e0, e1)) in s0.iter().zip(s1).enumerate() {
            let cur = Rc::new(Value::Neutral(h0.clone(), s0[..k].to_vec()));
            ty = match (e0, e1, &*ty) {
                (Elim::App(x), Elim::App(y), Value::PiT(dom, cod)) => {
                    if !self.conv(x, y, dom) {
                        return None;
                    }
                    cod.apply(x.clone())
                }
                (Elim::Fst, Elim::Fst, Value::SgT(dom, _)) => dom.clone(),
                (Elim::Snd, Elim::Snd, Value::SgT(_, cod)) => cod.apply(fst(cur)),
                (
                    Elim::BoolElim {
                        motive: m0,
                        on_true: t0,
                        on_false: f0,
                    },
                    Elim::BoolElim {
                        motive: m1,
                        on_true: t1,
                        on_false: f1,
                    },
                    Value::BoolT,
                ) => {
                    let motives = self.under(Rc::new(Value::BoolT), |cx, x| {
                        cx.conv_type(&m0.apply(x.clone()), &m1.apply(x))
                    });
                    if !motives
                        || !self.conv(t0, t1, &m0.apply(Rc::new(Value::True)))
                        || !self.conv(f0, f1, &m0.apply(Rc::new(Value::False)))
                    {
                        return None;
                    }
                    m0.apply(cur)
                }
                _ => return None,
            };
        }
        Some(ty)
    }

    fn conv_head(&mut self, h0: &Head, h1: &Head) -> Option<RcValue> {
        match (h0, h1) {
            (Head::Var(l0), Head::Var(l1)) if l0 == l1 => Some(self.types[*l0].clone()),
            (
                Head::Cast {
                    src: s0,
                    tgt: t0,
                    body: b0,
                    ..
                },
                Head::Cast {
                    src: s1,
                    tgt: t1,
                    body: b1,
                    ..
                },
            ) => {
                let ok = self.conv_code(s0, s1)
                    && self.conv_code(t0, t1)
                    && self.conv(b0, b1, &el(s0.clone()));
                ok.then(|| el(t0.clone()))
            }
            (Head::Exfalso { motive: m0, .. }, Head::Exfalso { motive: m1, .. }) => {
                self.conv_type(m0, m1).then(|| m0.clone())
            }
            _ => None,
        }
    }
}
