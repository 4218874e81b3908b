//! Finite categories given by explicit composition tables.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::sheaf::Presheaf;

/// The on-disk form of a finite category.
///
/// `comp` lists triples `[g, f, h]` meaning `g ∘ f = h` (first `f`, then
/// `g`). Composites with an identity may be omitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawCat {
    pub objects: Vec<String>,
    pub arrows: Vec<RawArrow>,
    pub identities: BTreeMap<String, String>,
    #[serde(default)]
    pub comp: Vec<[String; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawArrow {
    pub id: String,
    pub src: String,
    pub dst: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid category: {}", .violations.join("; "))]
pub struct CatError {
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub src: usize,
    pub dst: usize,
}

/// A validated finite category. Objects and arrows are numbered in input
/// order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCat {
    pub objects: Vec<String>,
    pub arrows: Vec<Arrow>,
    identity: Vec<usize>,
    /// `comp[g][f] = g ∘ f` when `src g = dst f`.
    comp: Vec<Vec<Option<usize>>>,
    into: Vec<Vec<usize>>,
}

impl FinCat {
    pub fn from_json(text: &str) -> Result<FinCat, CatError> {
        let raw: RawCat = serde_json::from_str(text).map_err(|e| CatError {
            violations: vec![format!("malformed category document: {e}")],
        })?;
        FinCat::validate(&raw)
    }

    /// Check every category law exhaustively.
    pub fn validate(raw: &RawCat) -> Result<FinCat, CatError> {
        let mut bad = Vec::new();
        let mut obj_ix = HashMap::new();
        for (i, o) in raw.objects.iter().enumerate() {
            if obj_ix.insert(o.as_str(), i).is_some() {
                bad.push(format!("duplicate object `{o}`"));
            }
        }
        let mut arrow_ix = HashMap::new();
        let mut arrows: Vec<Arrow> = Vec::new();
        for a in &raw.arrows {
            if arrow_ix.insert(a.id.as_str(), arrows.len()).is_some() {
                bad.push(format!("duplicate arrow `{}`", a.id));
            }
            let end = |o: &str, bad: &mut Vec<String>| match obj_ix.get(o) {
                Some(&i) => i,
                None => {
                    bad.push(format!("arrow `{}` mentions unknown object `{o}`", a.id));
                    0
                }
            };
            let (src, dst) = (end(&a.src, &mut bad), end(&a.dst, &mut bad));
            arrows.push(Arrow {
                name: a.id.clone(),
                src,
                dst,
            });
        }
        let mut identity = vec![usize::MAX; raw.objects.len()];
        for (o, a) in &raw.identities {
            match (obj_ix.get(o.as_str()), arrow_ix.get(a.as_str())) {
                (Some(&o_i), Some(&a_i)) => {
                    if arrows[a_i].src != o_i || arrows[a_i].dst != o_i {
                        bad.push(format!("identity `{a}` of `{o}` is not an endomorphism of `{o}`"));
                    }
                    identity[o_i] = a_i;
                }
                _ => bad.push(format!("identity entry `{o}: {a}` names unknown object or arrow")),
            }
        }
        for (i, o) in raw.objects.iter().enumerate() {
            if identity[i] == usize::MAX {
                bad.push(format!("object `{o}` has no identity"));
            }
        }
        if !bad.is_empty() {
            return Err(CatError { violations: bad });
        }

        let n = arrows.len();
        let mut comp: Vec<Vec<Option<usize>>> = vec![vec![None; n]; n];
        for [g, f, h] in &raw.comp {
            let (Some(&g_i), Some(&f_i), Some(&h_i)) = (
                arrow_ix.get(g.as_str()),
                arrow_ix.get(f.as_str()),
                arrow_ix.get(h.as_str()),
            ) else {
                bad.push(format!("composition `{g} ∘ {f} = {h}` names an unknown arrow"));
                continue;
            };
            if arrows[g_i].src != arrows[f_i].dst {
                bad.push(format!("`{g} ∘ {f}` is listed but `{g}` and `{f}` are not composable"));
                continue;
            }
            if arrows[h_i].src != arrows[f_i].src || arrows[h_i].dst != arrows[g_i].dst {
                bad.push(format!("`{g} ∘ {f} = {h}` has the wrong source or target"));
                continue;
            }
            match comp[g_i][f_i] {
                Some(prev) if prev != h_i => bad.push(format!(
                    "`{g} ∘ {f}` is listed as both `{}` and `{h}`",
                    arrows[prev].name
                )),
                _ => comp[g_i][f_i] = Some(h_i),
            }
        }
        // Fill in omitted identity composites.
        for a in 0..n {
            let (id_src, id_dst) = (identity[arrows[a].src], identity[arrows[a].dst]);
            comp[a][id_src].get_or_insert(a);
            comp[id_dst][a].get_or_insert(a);
        }
        for g in 0..n {
            for f in 0..n {
                if arrows[g].src == arrows[f].dst && comp[g][f].is_none() {
                    bad.push(format!(
                        "composite `{} ∘ {}` is missing",
                        arrows[g].name, arrows[f].name
                    ));
                }
            }
        }
        if !bad.is_empty() {
            return Err(CatError { violations: bad });
        }
        for a in 0..n {
            let name = &arrows[a].name;
            let (id_src, id_dst) = (identity[arrows[a].src], identity[arrows[a].dst]);
            if comp[a][id_src] != Some(a) {
                bad.push(format!("unit law fails: `{name} ∘ {}` ≠ `{name}`", arrows[id_src].name));
            }
            if comp[id_dst][a] != Some(a) {
                bad.push(format!("unit law fails: `{} ∘ {name}` ≠ `{name}`", arrows[id_dst].name));
            }
        }
        for h in 0..n {
            for g in 0..n {
                let Some(hg) = comp[h][g] else { continue };
                for f in 0..n {
                    let Some(gf) = comp[g][f] else { continue };
                    if comp[h][gf] != comp[hg][f] {
                        bad.push(format!(
                            "associativity fails for `{}`, `{}`, `{}`",
                            arrows[h].name, arrows[g].name, arrows[f].name
                        ));
                    }
                }
            }
        }
        if !bad.is_empty() {
            return Err(CatError { violations: bad });
        }
        Ok(FinCat::assemble(raw.objects.clone(), arrows, identity, comp))
    }

    fn assemble(objects: Vec<String>, arrows: Vec<Arrow>, identity: Vec<usize>, comp: Vec<Vec<Option<usize>>>) -> FinCat {
        let mut into = vec![Vec::new(); objects.len()];
        for (i, a) in arrows.iter().enumerate() {
            into[a.dst].push(i);
        }
        FinCat {
            objects,
            arrows,
            identity,
            comp,
            into,
        }
    }

    /// The category with `n` objects and only identities.
    pub fn discrete(n: usize) -> FinCat {
        let objects = (0..n).map(|i| format!("o{i}")).collect();
        let arrows = (0..n)
            .map(|i| Arrow {
                name: format!("id{i}"),
                src: i,
                dst: i,
            })
            .collect();
        let comp = (0..n)
            .map(|g| (0..n).map(|f| (g == f).then_some(g)).collect())
            .collect();
        FinCat::assemble(objects, arrows, (0..n).collect(), comp)
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn src(&self, a: usize) -> usize {
        self.arrows[a].src
    }

    pub fn dst(&self, a: usize) -> usize {
        self.arrows[a].dst
    }

    pub fn identity(&self, o: usize) -> usize {
        self.identity[o]
    }

    pub fn is_identity(&self, a: usize) -> bool {
        self.identity[self.arrows[a].src] == a
    }

    /// `g ∘ f`. Panics unless `src g = dst f`.
    pub fn compose(&self, g: usize, f: usize) -> usize {
        self.comp[g][f].unwrap_or_else(|| {
            panic!(
                "arrows `{}` and `{}` are not composable",
                self.arrows[g].name, self.arrows[f].name
            )
        })
    }

    /// Arrows with codomain `o`, in input order.
    pub fn arrows_into(&self, o: usize) -> &[usize] {
        &self.into[o]
    }

    /// For each object, the length of the longest chain of non-identity
    /// arrows leaving it (capped at the number of objects).
    pub fn out_ranks(&self) -> Vec<usize> {
        let n = self.objects.len();
        let mut rank = vec![0usize; n];
        for _ in 0..n {
            for (a, arrow) in self.arrows.iter().enumerate() {
                if !self.is_identity(a) && arrow.src != arrow.dst {
                    rank[arrow.src] = rank[arrow.src].max((rank[arrow.dst] + 1).min(n));
                }
            }
        }
        rank
    }

    /// The category of elements of a presheaf on this category.
    pub fn elements(&self, x: &Presheaf) -> Elements {
        let mut objs = Vec::new();
        let mut obj_index = HashMap::new();
        let mut names = Vec::new();
        for c in 0..self.objects.len() {
            for i in 0..x.fibers[c].len() {
                obj_index.insert((c, i as u32), objs.len());
                names.push(format!("({},{})", self.objects[c], x.fibers[c][i]));
                objs.push((c, i as u32));
            }
        }
        let mut arrows = Vec::new();
        let mut arrow_of = Vec::new();
        let mut arrow_index = HashMap::new();
        for (t, &(c, i)) in objs.iter().enumerate() {
            for &g in self.arrows_into(c) {
                let d = self.src(g);
                let s = obj_index[&(d, x.maps[g][i as usize])];
                arrow_index.insert((g, t), arrows.len());
                arrows.push(Arrow {
                    name: format!("{}@{}", self.arrows[g].name, names[t]),
                    src: s,
                    dst: t,
                });
                arrow_of.push((g, t));
            }
        }
        let identity = (0..objs.len())
            .map(|t| arrow_index[&(self.identity(objs[t].0), t)])
            .collect();
        let m = arrows.len();
        let mut comp = vec![vec![None; m]; m];
        for (a, &(g, t)) in arrow_of.iter().enumerate() {
            for (b, &(k, _)) in arrow_of.iter().enumerate() {
                if arrows[b].dst == arrows[a].src {
                    comp[a][b] = Some(arrow_index[&(self.compose(g, k), t)]);
                }
            }
        }
        Elements {
            cat: FinCat::assemble(names, arrows, identity, comp),
            objs,
            arrow_of,
            obj_index,
            arrow_index,
        }
    }

    /// The representable presheaf `hom(-, c)`, with arrows as atoms.
    pub fn representable(&self, c: usize) -> Presheaf {
        use crate::canon::CanonVal;
        let fibers: Vec<Vec<CanonVal>> = (0..self.objects.len())
            .map(|d| {
                self.arrows_into(c)
                    .iter()
                    .filter(|&&f| self.src(f) == d)
                    .map(|&f| CanonVal::Atom(f as u32))
                    .collect()
            })
            .collect();
        let position = |d: usize, f: usize| {
            fibers[d]
                .binary_search(&CanonVal::Atom(f as u32))
                .expect("composite lies in the hom-set") as u32
        };
        let maps = (0..self.arrows.len())
            .map(|g| {
                let d = self.dst(g);
                fibers[d]
                    .iter()
                    .map(|f| {
                        let CanonVal::Atom(f) = f else { unreachable!() };
                        position(self.src(g), self.compose(*f as usize, g))
                    })
                    .collect()
            })
            .collect();
        Presheaf { fibers, maps }
    }
}

/// The category of elements of a presheaf `X`: objects are pairs `(c, x)`
/// with `x` in `X(c)`, and an arrow `(d, x·g) → (c, x)` for each `g: d → c`.
#[derive(Debug, Clone)]
pub struct Elements {
    pub cat: FinCat,
    /// Object `t` is `(c, index of x in X(c))`.
    pub objs: Vec<(usize, u32)>,
    /// Arrow `a` is `(g, target object)`.
    pub arrow_of: Vec<(usize, usize)>,
    obj_index: HashMap<(usize, u32), usize>,
    arrow_index: HashMap<(usize, usize), usize>,
}

impl Elements {
    pub fn object(&self, c: usize, i: u32) -> usize {
        self.obj_index[&(c, i)]
    }

    /// The arrow over `g` into object `t`.
    pub fn arrow(&self, g: usize, t: usize) -> usize {
        self.arrow_index[&(g, t)]
    }
}
