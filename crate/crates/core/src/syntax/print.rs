use std::rc::Rc;

use super::parse::KEYWORDS;
use super::{SourceFile, Term};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Top,
    Head,
    Atom,
}

struct Printer {
    names: Vec<Rc<str>>,
    globals: Vec<Rc<str>>,
}

/// Render a closed term in surface syntax.
pub fn print(t: &Term) -> String {
    print_with(&[], t)
}

/// Render a term whose free variables are named by `names` (outermost first).
pub fn print_with(names: &[Rc<str>], t: &Term) -> String {
    let mut globals = Vec::new();
    t.globals(&mut globals);
    let mut p = Printer {
        names: names.to_vec(),
        globals,
    };
    let mut out = String::new();
    p.term(t, Prec::Top, &mut out);
    out
}

pub fn print_file(file: &SourceFile) -> String {
    let mut out = String::new();
    for d in &file.declarations {
        out.push_str("def ");
        out.push_str(&d.name);
        if let Some(ann) = &d.annotation {
            out.push_str(" : ");
            out.push_str(&print(ann));
        }
        out.push_str(" :=\n  ");
        out.push_str(&print(&d.body));
        out.push_str("\n\n");
    }
    out
}

impl Printer {
    fn fresh(&self, used: bool) -> Rc<str> {
        if !used {
            return "_".into();
        }
        let mut name = format!("x{}", self.names.len());
        while self.globals.iter().any(|g| **g == *name)
            || self.names.iter().any(|n| **n == *name)
            || KEYWORDS.contains(&name.as_str())
        {
            name.push('\'');
        }
        name.into()
    }

    fn with_binder(&mut self, body: &Term, out: &mut String, f: impl FnOnce(&mut Self, &mut String)) {
        let name = self.fresh(body.mentions(0));
        self.names.push(name);
        f(self, out);
        self.names.pop();
    }

    /// `(x . body)`
    fn binder(&mut self, body: &Term, out: &mut String) {
        self.with_binder(body, out, |p, out| {
            out.push('(');
            out.push_str(p.names.last().unwrap());
            out.push_str(" . ");
            p.term(body, Prec::Top, out);
            out.push(')');
        });
    }

    fn keyword(&mut self, kw: &str, args: &[&Term], prec: Prec, out: &mut String) {
        if prec == Prec::Atom {
            out.push('(');
        }
        out.push_str(kw);
        for a in args {
            out.push(' ');
            self.term(a, Prec::Atom, out);
        }
        if prec == Prec::Atom {
            out.push(')');
        }
    }

    fn term(&mut self, t: &Term, prec: Prec, out: &mut String) {
        use Term::*;
        let open = |out: &mut String| {
            if prec == Prec::Atom {
                out.push('(')
            }
        };
        let close = |out: &mut String| {
            if prec == Prec::Atom {
                out.push(')')
            }
        };
        match t {
            Var(i) => match self.names.len().checked_sub(i + 1) {
                Some(level) => out.push_str(&self.names[level]),
                None => out.push_str(&format!("#{i}")),
            },
            Global(name) => out.push_str(name),
            Ann(a, b) => {
                out.push('(');
                self.term(a, Prec::Top, out);
                out.push_str(" : ");
                self.term(b, Prec::Top, out);
                out.push(')');
            }
            Pair(a, b) => {
                out.push('(');
                self.term(a, Prec::Top, out);
                out.push_str(", ");
                self.term(b, Prec::Top, out);
                out.push(')');
            }
            VType(i) => {
                open(out);
                out.push_str(&format!("V {i}"));
                close(out);
            }
            CUni(i) => {
                open(out);
                out.push_str(&format!("cUni {i}"));
                close(out);
            }
            CBool => out.push_str("cBool"),
            CUnit => out.push_str("cUnit"),
            BoolT => out.push_str("Bool"),
            UnitT => out.push_str("Unit"),
            Tt => out.push_str("tt"),
            True => out.push_str("true"),
            False => out.push_str("false"),
            PropT => out.push_str("Prop"),
            TopP => out.push_str("Top"),
            BotP => out.push_str("Bot"),
            Star => out.push_str("star"),
            CPi(a, b) | CSg(a, b) | Pi(a, b) | Sg(a, b) => {
                let kw = match t {
                    CPi(..) => "cPi",
                    CSg(..) => "cSg",
                    Pi(..) => "Pi",
                    _ => "Sg",
                };
                open(out);
                out.push_str(kw);
                out.push(' ');
                self.term(a, Prec::Atom, out);
                out.push(' ');
                self.binder(b, out);
                close(out);
            }
            CLift(a) => self.keyword("cLift", &[a], prec, out),
            El(a) => self.keyword("El", &[a], prec, out),
            Fst(a) => self.keyword("fst", &[a], prec, out),
            Snd(a) => self.keyword("snd", &[a], prec, out),
            PiFst(a) => self.keyword("piFst", &[a], prec, out),
            SgFst(a) => self.keyword("sgFst", &[a], prec, out),
            Sym(a) => self.keyword("sym", &[a], prec, out),
            Refl(a) => self.keyword("refl", &[a], prec, out),
            PiSnd(a, b) => self.keyword("piSnd", &[a, b], prec, out),
            SgSnd(a, b) => self.keyword("sgSnd", &[a, b], prec, out),
            Exfalso(a, b) => self.keyword("exfalso", &[a, b], prec, out),
            ObsEq(i, a, b) => self.keyword(&format!("Eq {i}"), &[a, b], prec, out),
            Cast {
                src,
                tgt,
                prf,
                body,
            } => self.keyword("cast", &[src, tgt, prf, body], prec, out),
            BoolElim {
                motive,
                on_true,
                on_false,
                scrut,
            } => {
                open(out);
                out.push_str("boolElim ");
                self.binder(motive, out);
                for a in [on_true, on_false, scrut] {
                    out.push(' ');
                    self.term(a, Prec::Atom, out);
                }
                close(out);
            }
            Lam(body) => {
                let paren = prec != Prec::Top;
                if paren {
                    out.push('(');
                }
                self.with_binder(body, out, |p, out| {
                    out.push_str("fun ");
                    out.push_str(p.names.last().unwrap());
                    out.push_str(" . ");
                    p.term(body, Prec::Top, out);
                });
                if paren {
                    out.push(')');
                }
            }
            App(f, a) => {
                open(out);
                self.term(f, Prec::Head, out);
                out.push(' ');
                self.term(a, Prec::Atom, out);
                close(out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn direct_rendering() {
        let t = Term::CPi(Rc::new(Term::CBool), Rc::new(Term::CBool));
        assert_eq!(print(&t), "cPi cBool (_ . cBool)");
    }

    #[test]
    fn nested_binders_get_distinct_names() {
        let f = parse("def k := fun a . fun b . fun c . a c").unwrap();
        assert_eq!(print(&f.declarations[0].body), "fun x0 . fun _ . fun x2 . x0 x2");
        let f = parse("def k := fun a . fun b . (a, b)").unwrap();
        assert_eq!(print(&f.declarations[0].body), "fun x0 . fun x1 . (x0, x1)");
    }

    #[test]
    fn generated_names_avoid_globals() {
        let f = parse("def x0 := tt\ndef k := fun a . (a, x0)").unwrap();
        assert_eq!(print(&f.declarations[1].body), "fun x0' . (x0', x0)");
        let again = parse(&print_file(&f)).unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn keyword_arguments_are_parenthesized() {
        let f = parse("def a := fun p . El (cLift (fst p))").unwrap();
        assert_eq!(print(&f.declarations[0].body), "fun x0 . El (cLift (fst x0))");
    }
}
