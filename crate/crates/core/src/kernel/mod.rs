//! Normalization by evaluation, conversion, and bidirectional checking.

mod check;
mod conv;
mod eval;
mod quote;
mod value;

pub use check::{check_file, Context, DeclError, TypeError, DEFAULT_MAX_LEVEL};
pub use conv::Conv;
pub use eval::{app, bool_elim, cast, el, eval, fst, lift, snd, star};
pub use quote::quote;
pub use value::{Closure, Elim, Env, Global, Globals, Head, Proof, RcValue, Value, VarLevel};

/// Evaluate and read back a closed term.
pub fn normalize(cx: &Context, t: &crate::syntax::Term) -> std::rc::Rc<crate::syntax::Term> {
    cx.quote(&cx.eval(t))
}
