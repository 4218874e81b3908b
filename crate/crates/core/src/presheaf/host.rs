//! Bounded host universes in a finite presheaf topos.
//!
//! An element of the host universe at stage `c` is a presheaf on the slice
//! `C/c` with every fiber of size at most the level's bound. Points of such
//! a family are pairs `(f: d → c, a)` with `a` in the fiber over `f`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::canon::CanonVal;
use crate::ir_universe::{self, CodeCache, CodeTree, HostError, HostUniverse, Level, Node};

use super::cat::{Elements, FinCat};
use super::sheaf::{enumerate_presheaves, Presheaf};

pub type Elem = Arc<Presheaf>;
pub type Code = CodeTree<PresheafHost>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// The host's function former is the literal section family.
    Strict,
    /// The host renames the fibers of section families, so its function
    /// former agrees with the literal one only up to isomorphism.
    Weak,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    /// The base arrow `f: d → c` indexing the fiber.
    pub arrow: usize,
    pub value: CanonVal,
}

/// The slice `C/c`, built as the category of elements of `hom(-, c)`.
#[derive(Debug, Clone)]
pub struct Slice {
    pub el: Elements,
    /// Slice object to the base arrow it stands for.
    pub base_of: Vec<usize>,
    /// Base arrow into `c` to its slice object.
    obj_of: HashMap<usize, usize>,
    pub id_obj: usize,
}

impl Slice {
    fn new(cat: &FinCat, c: usize) -> Slice {
        let y = cat.representable(c);
        let el = cat.elements(&y);
        let base_of: Vec<usize> = el
            .objs
            .iter()
            .map(|&(d, i)| match &y.fibers[d][i as usize] {
                CanonVal::Atom(f) => *f as usize,
                _ => unreachable!(),
            })
            .collect();
        let obj_of: HashMap<usize, usize> = base_of.iter().enumerate().map(|(t, &f)| (f, t)).collect();
        let id_obj = obj_of[&cat.identity(c)];
        Slice {
            el,
            base_of,
            obj_of,
            id_obj,
        }
    }

    pub fn cat(&self) -> &FinCat {
        &self.el.cat
    }

    /// The slice object over the base arrow `f`.
    pub fn obj(&self, f: usize) -> usize {
        self.obj_of[&f]
    }

    /// The slice arrow `f∘g → f` over the base arrow `g`.
    pub fn arrow(&self, g: usize, f: usize) -> usize {
        self.el.arrow(g, self.obj(f))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HostConfig {
    pub mode: Mode,
    /// Fiber bound per level, strictly increasing.
    pub bounds: Vec<usize>,
    /// Depth of the code approximant used to decode `uni(k)`.
    pub universe_depth: u32,
    pub cap: usize,
    /// Build deep codes from one subcode per decode class.
    pub reduce: bool,
}

pub struct PresheafHost {
    cat: FinCat,
    config: HostConfig,
    slices: Vec<Slice>,
    /// Per base arrow `h: d → c`, the functor `C/d → C/c` on objects and arrows.
    reindex: Vec<(Vec<usize>, Vec<usize>)>,
    ranks: Vec<usize>,
    stage_sets: Mutex<HashMap<(usize, usize), Arc<Vec<Elem>>>>,
    universes: Mutex<HashMap<(Level, usize), Elem>>,
    codes: CodeCache<PresheafHost>,
}

impl PresheafHost {
    pub fn new(cat: FinCat, config: HostConfig) -> PresheafHost {
        let slices: Vec<Slice> = (0..cat.num_objects()).map(|c| Slice::new(&cat, c)).collect();
        let reindex = (0..cat.num_arrows())
            .map(|h| {
                let (d, c) = (cat.src(h), cat.dst(h));
                let (sd, sc) = (&slices[d], &slices[c]);
                let objs = sd.base_of.iter().map(|&f| sc.obj(cat.compose(h, f))).collect();
                let arrows = sd
                    .el
                    .arrow_of
                    .iter()
                    .map(|&(g, t)| sc.arrow(g, cat.compose(h, sd.base_of[t])))
                    .collect();
                (objs, arrows)
            })
            .collect();
        let ranks = cat.out_ranks();
        let (cap, reduce) = (config.cap, config.reduce);
        PresheafHost {
            cat,
            config,
            slices,
            reindex,
            ranks,
            stage_sets: Mutex::new(HashMap::new()),
            universes: Mutex::new(HashMap::new()),
            codes: CodeCache::new(cap, reduce),
        }
    }

    pub fn cat(&self) -> &FinCat {
        &self.cat
    }

    pub fn config(&self) -> &HostConfig {
        &self.config
    }

    pub fn mode(&self) -> Mode {
        self.config.mode
    }

    pub fn slice(&self, c: usize) -> &Slice {
        &self.slices[c]
    }

    pub fn bound(&self, level: Level) -> usize {
        self.config.bounds[level as usize]
    }

    pub fn levels(&self) -> Level {
        self.config.bounds.len() as Level
    }

    /// The families over the slice at `c` with fibers at most `bound`.
    pub fn stage_set(&self, bound: usize, c: usize) -> Result<Arc<Vec<Elem>>, HostError> {
        if let Some(hit) = self.stage_sets.lock().unwrap().get(&(bound, c)) {
            return Ok(hit.clone());
        }
        let all = enumerate_presheaves(self.slices[c].cat(), bound, self.config.cap)?;
        let all = Arc::new(all.into_iter().map(Arc::new).collect::<Vec<_>>());
        self.stage_sets.lock().unwrap().insert((bound, c), all.clone());
        Ok(all)
    }

    /// The value of `x` at the identity slice object.
    pub fn top_fiber<'a>(&self, c: usize, x: &'a Presheaf) -> &'a [CanonVal] {
        &x.fibers[self.slices[c].id_obj]
    }

    fn cod_at<'a>(cod: &'a BTreeMap<Point, Elem>, f: usize, value: &CanonVal) -> Result<&'a Elem, HostError> {
        cod.get(&Point {
            arrow: f,
            value: value.clone(),
        })
        .ok_or_else(|| HostError::Invalid(format!("codomain family has no entry at ({f}, {value})")))
    }

    /// The naturality problem whose solutions are the sections over the
    /// slice object `f: d → c`.
    fn section_problem(&self, c: usize, dom: &Presheaf, cod: &BTreeMap<Point, Elem>, f: usize) -> Result<SectionProblem, HostError> {
        let cat = &self.cat;
        let sc = &self.slices[c];
        let d = cat.src(f);
        let mut keys = Vec::new();
        let mut domains = Vec::new();
        let mut var_of: HashMap<(usize, usize), usize> = HashMap::new();
        let mut info = Vec::new();
        for &g in cat.arrows_into(d) {
            let fg = cat.compose(f, g);
            let fiber = &dom.fibers[sc.obj(fg)];
            for (ai, a) in fiber.iter().enumerate() {
                let e = cat.src(g);
                let fam = Self::cod_at(cod, fg, a)?;
                var_of.insert((g, ai), keys.len());
                keys.push(CanonVal::pair(CanonVal::Atom(g as u32), a.clone()));
                domains.push(self.top_fiber(e, fam).to_vec());
                info.push((g, fg, ai, fam.clone()));
            }
        }
        let mut constraints = Vec::new();
        for (v, (g, fg, ai, fam)) in info.iter().enumerate() {
            let e = cat.src(*g);
            let se = &self.slices[e];
            for &k in cat.arrows_into(e) {
                if cat.is_identity(k) {
                    continue;
                }
                let gk = cat.compose(*g, k);
                let ak = dom.restrict(sc.arrow(k, *fg), *ai);
                let w = var_of[&(gk, ak)];
                let along = se.arrow(k, cat.identity(e));
                let target_fiber = &fam.fibers[se.obj(k)];
                let table = (0..domains[v].len())
                    .map(|i| {
                        let val = &target_fiber[fam.restrict(along, i)];
                        domains[w].binary_search(val).ok().map(|j| j as u32)
                    })
                    .collect();
                constraints.push((v, w, table));
            }
        }
        Ok(SectionProblem {
            keys,
            domains,
            constraints,
        })
    }

    /// Literal section family, found by constraint propagation.
    fn literal_sections(&self, c: usize, dom: &Presheaf, cod: &BTreeMap<Point, Elem>) -> Result<Presheaf, HostError> {
        let sc = &self.slices[c];
        let mut fibers = Vec::new();
        for &f in &sc.base_of {
            let prob = self.section_problem(c, dom, cod, f)?;
            let mut fiber: Vec<CanonVal> = prob
                .solve(self.config.cap)?
                .into_iter()
                .map(|vals| {
                    let pairs = (0..prob.keys.len())
                        .map(|v| (prob.keys[v].clone(), prob.domains[v][vals[v] as usize].clone()))
                        .collect();
                    CanonVal::table(pairs)
                })
                .collect();
            fiber.sort();
            fibers.push(fiber);
        }
        let maps = self.section_maps(c, dom, &fibers)?;
        Ok(Presheaf { fibers, maps })
    }

    /// Restriction of section tables along every slice arrow.
    fn section_maps(&self, c: usize, dom: &Presheaf, fibers: &[Vec<CanonVal>]) -> Result<Vec<Vec<u32>>, HostError> {
        let cat = &self.cat;
        let sc = &self.slices[c];
        let mut maps = Vec::new();
        for (a, &(h, t)) in sc.el.arrow_of.iter().enumerate() {
            let f = sc.base_of[t];
            let fh = cat.compose(f, h);
            let t2 = sc.el.cat.src(a);
            let mut map = Vec::new();
            for s in &fibers[t] {
                let mut pairs = Vec::new();
                for &g in cat.arrows_into(cat.src(h)) {
                    for x in &dom.fibers[sc.obj(cat.compose(fh, g))] {
                        let key = CanonVal::pair(CanonVal::Atom(cat.compose(h, g) as u32), x.clone());
                        let val = s
                            .lookup(&key)
                            .ok_or_else(|| HostError::Invalid(format!("section {s} has no entry at {key}")))?;
                        pairs.push((CanonVal::pair(CanonVal::Atom(g as u32), x.clone()), val.clone()));
                    }
                }
                let restricted = CanonVal::table(pairs);
                let j = fibers[t2]
                    .binary_search(&restricted)
                    .map_err(|_| HostError::Invalid(format!("restriction {restricted} of a section is not a section")))?;
                map.push(j as u32);
            }
            maps.push(map);
        }
        Ok(maps)
    }

    /// Section family by exhaustive generate-and-test, sharing no code with
    /// the propagation search. Used to cross-check decoding.
    pub fn sections_brute_force(&self, c: usize, dom: &Presheaf, cod: &BTreeMap<Point, Elem>) -> Result<Presheaf, HostError> {
        let cat = &self.cat;
        let sc = &self.slices[c];
        let mut fibers = Vec::new();
        for &f in &sc.base_of {
            let d = cat.src(f);
            // (g, a, family at (f∘g, a))
            let mut slots: Vec<(usize, CanonVal, &Elem)> = Vec::new();
            for &g in cat.arrows_into(d) {
                let fg = cat.compose(f, g);
                for a in &dom.fibers[sc.obj(fg)] {
                    slots.push((g, a.clone(), Self::cod_at(cod, fg, a)?));
                }
            }
            let choices: Vec<&[CanonVal]> = slots
                .iter()
                .map(|(g, _, fam)| self.top_fiber(cat.src(*g), fam))
                .collect();
            let total = choices.iter().try_fold(1usize, |acc, ch| acc.checked_mul(ch.len()));
            match total {
                Some(n) if n <= self.config.cap => {}
                _ => {
                    return Err(HostError::CapExceeded {
                        what: "candidate sections".into(),
                        cap: self.config.cap,
                    })
                }
            }
            let mut fiber = Vec::new();
            if choices.iter().all(|ch| !ch.is_empty()) {
                let mut idx = vec![0usize; slots.len()];
                loop {
                    let table = CanonVal::table(
                        slots
                            .iter()
                            .zip(&choices)
                            .zip(&idx)
                            .map(|(((g, a, _), ch), &i)| (CanonVal::pair(CanonVal::Atom(*g as u32), a.clone()), ch[i].clone()))
                            .collect(),
                    );
                    if self.is_natural_section(c, f, dom, cod, &table)? {
                        fiber.push(table);
                    }
                    let mut k = 0;
                    while k < idx.len() {
                        idx[k] += 1;
                        if idx[k] < choices[k].len() {
                            break;
                        }
                        idx[k] = 0;
                        k += 1;
                    }
                    if k == idx.len() {
                        break;
                    }
                }
            }
            fiber.sort();
            fibers.push(fiber);
        }
        let maps = self.section_maps(c, dom, &fibers)?;
        Ok(Presheaf { fibers, maps })
    }

    /// Is the table a natural family over `f`, checked directly against
    /// every restriction (identities included)?
    fn is_natural_section(&self, c: usize, f: usize, dom: &Presheaf, cod: &BTreeMap<Point, Elem>, table: &CanonVal) -> Result<bool, HostError> {
        let cat = &self.cat;
        let sc = &self.slices[c];
        let CanonVal::Table(entries) = table else {
            return Ok(false);
        };
        for (key, val) in entries {
            let CanonVal::Tuple(parts) = key else { return Ok(false) };
            let (CanonVal::Atom(g), a) = (&parts[0], &parts[1]) else {
                return Ok(false);
            };
            let g = *g as usize;
            let fg = cat.compose(f, g);
            let e = cat.src(g);
            let se = &self.slices[e];
            let fam = Self::cod_at(cod, fg, a)?;
            let i = fam.fibers[se.id_obj].binary_search(val).expect("value drawn from the fiber");
            let ai = dom.index_of(sc.obj(fg), a).expect("key drawn from the domain");
            for &k in cat.arrows_into(e) {
                let moved = &fam.fibers[se.obj(k)][fam.restrict(se.arrow(k, cat.identity(e)), i)];
                let gk = cat.compose(g, k);
                let a_k = &dom.fibers[sc.obj(cat.compose(fg, k))][dom.restrict(sc.arrow(k, fg), ai)];
                let key2 = CanonVal::pair(CanonVal::Atom(gk as u32), a_k.clone());
                if table.lookup(&key2) != Some(moved) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// A short, deterministic rendering of a code.
    pub fn show_code(&self, code: &Code) -> String {
        let mut s = String::new();
        self.write_code(&mut s, code);
        s
    }

    fn write_code(&self, s: &mut String, code: &Code) {
        match code.node() {
            Node::Up(x) => {
                let _ = write!(s, "up{}", x.encode());
            }
            Node::Bool => s.push_str("bool"),
            Node::Unit => s.push_str("unit"),
            Node::Uni(k) => {
                let _ = write!(s, "uni({k})");
            }
            Node::Fn(a, b) | Node::Sg(a, b) => {
                s.push_str(if code.is_fn() { "fn(" } else { "sg(" });
                self.write_code(s, a);
                s.push_str(", {");
                for (i, (p, c)) in b.iter().enumerate() {
                    if i > 0 {
                        s.push_str(", ");
                    }
                    let _ = write!(s, "{}:{} ↦ ", self.cat.arrows[p.arrow].name, p.value);
                    self.write_code(s, c);
                }
                s.push_str("})");
            }
        }
    }
}

/// Variables with finite domains and binary constraints `w = table[v]`.
struct SectionProblem {
    keys: Vec<CanonVal>,
    domains: Vec<Vec<CanonVal>>,
    constraints: Vec<(usize, usize, Vec<Option<u32>>)>,
}

impl SectionProblem {
    fn solve(&self, cap: usize) -> Result<Vec<Vec<u32>>, HostError> {
        let n = self.keys.len();
        // Check each constraint when the later of its two variables is set.
        let mut at: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (ci, &(v, w, _)) in self.constraints.iter().enumerate() {
            at[v.max(w)].push(ci);
        }
        let mut vals = vec![0u32; n];
        let mut out = Vec::new();
        self.go(0, &at, &mut vals, &mut out, cap)?;
        Ok(out)
    }

    fn go(&self, v: usize, at: &[Vec<usize>], vals: &mut Vec<u32>, out: &mut Vec<Vec<u32>>, cap: usize) -> Result<(), HostError> {
        if v == self.keys.len() {
            out.push(vals.clone());
            if out.len() > cap {
                return Err(HostError::CapExceeded {
                    what: "sections".into(),
                    cap,
                });
            }
            return Ok(());
        }
        for i in 0..self.domains[v].len() as u32 {
            vals[v] = i;
            let ok = at[v].iter().all(|&ci| {
                let (a, b, ref table) = self.constraints[ci];
                table[vals[a] as usize] == Some(vals[b])
            });
            if ok {
                self.go(v + 1, at, vals, out, cap)?;
            }
        }
        Ok(())
    }
}

impl HostUniverse for PresheafHost {
    type Stage = usize;
    type Arrow = usize;
    type Elem = Elem;
    type Point = Point;

    fn strict_pi(&self) -> bool {
        self.config.mode == Mode::Strict
    }

    fn stages(&self) -> Vec<usize> {
        (0..self.cat.num_objects()).collect()
    }

    fn arrows_into(&self, stage: usize) -> Vec<usize> {
        self.cat.arrows_into(stage).to_vec()
    }

    fn identity(&self, stage: usize) -> usize {
        self.cat.identity(stage)
    }

    fn arrow_src(&self, h: usize) -> usize {
        self.cat.src(h)
    }

    fn arrow_dst(&self, h: usize) -> usize {
        self.cat.dst(h)
    }

    fn compose(&self, g: usize, f: usize) -> usize {
        self.cat.compose(g, f)
    }

    fn elements(&self, level: Level, stage: usize) -> Result<Arc<Vec<Elem>>, HostError> {
        self.stage_set(self.bound(level), stage)
    }

    fn admits(&self, level: Level, x: &Elem) -> bool {
        x.max_fiber() <= self.bound(level)
    }

    fn bool_elem(&self, stage: usize) -> Elem {
        Arc::new(Presheaf::constant(self.slices[stage].cat(), 2))
    }

    fn unit_elem(&self, stage: usize) -> Elem {
        Arc::new(Presheaf::terminal(self.slices[stage].cat()))
    }

    fn universe_elem(&self, k: Level, stage: usize) -> Result<Elem, HostError> {
        if let Some(hit) = self.universes.lock().unwrap().get(&(k, stage)) {
            return Ok(hit.clone());
        }
        let cat = &self.cat;
        let sc = &self.slices[stage];
        let depth = self.config.universe_depth;
        let to_host = |e: ir_universe::CodeError| HostError::Invalid(format!("while naming V_{k}: {e}"));
        // Codes at each base object, sorted by encoding.
        let mut by_object: HashMap<usize, Vec<(CanonVal, Code)>> = HashMap::new();
        for &f in &sc.base_of {
            let d = cat.src(f);
            if by_object.contains_key(&d) {
                continue;
            }
            let codes = ir_universe::enumerate(self, k, d, depth).map_err(to_host)?;
            let mut named: Vec<(CanonVal, Code)> = codes.iter().map(|c| (ir_universe::encode(self, c), c.clone())).collect();
            named.sort_by(|a, b| a.0.cmp(&b.0));
            by_object.insert(d, named);
        }
        let fibers: Vec<Vec<CanonVal>> = sc
            .base_of
            .iter()
            .map(|&f| by_object[&cat.src(f)].iter().map(|(e, _)| e.clone()).collect())
            .collect();
        let mut maps = Vec::new();
        for &(g, t) in &sc.el.arrow_of {
            let d = cat.src(sc.base_of[t]);
            let e = cat.src(g);
            let mut map = Vec::new();
            for (_, code) in &by_object[&d] {
                let moved = ir_universe::restrict(self, code, g).map_err(to_host)?;
                let name = ir_universe::encode(self, &moved);
                let j = by_object[&e]
                    .binary_search_by(|(n, _)| n.cmp(&name))
                    .map_err(|_| HostError::Invalid(format!("restriction leaves the approximant of V_{k}")))?;
                map.push(j as u32);
            }
            maps.push(map);
        }
        let out = Arc::new(Presheaf { fibers, maps });
        self.universes.lock().unwrap().insert((k, stage), out.clone());
        Ok(out)
    }

    fn restrict_elem(&self, x: &Elem, h: usize) -> Elem {
        let (objs, arrows) = &self.reindex[h];
        Arc::new(x.reindex(objs, arrows))
    }

    fn points(&self, stage: usize, dom: &Elem) -> Vec<Point> {
        let sc = &self.slices[stage];
        let mut objs: Vec<usize> = (0..sc.base_of.len()).collect();
        objs.sort_by_key(|&t| (self.ranks[self.cat.src(sc.base_of[t])], t));
        objs.iter()
            .flat_map(|&t| {
                dom.fibers[t].iter().map(move |v| Point {
                    arrow: sc.base_of[t],
                    value: v.clone(),
                })
            })
            .collect()
    }

    fn point_stage(&self, p: &Point) -> usize {
        self.cat.src(p.arrow)
    }

    fn act_point(&self, dom: &Elem, p: &Point, g: usize) -> Point {
        let sc = &self.slices[self.cat.dst(p.arrow)];
        let t = sc.obj(p.arrow);
        let i = dom.index_of(t, &p.value).expect("point lies in the domain");
        let a = sc.arrow(g, p.arrow);
        let fg = self.cat.compose(p.arrow, g);
        Point {
            arrow: fg,
            value: dom.fibers[sc.obj(fg)][dom.restrict(a, i)].clone(),
        }
    }

    fn reindex_point(&self, h: usize, p: &Point) -> Point {
        Point {
            arrow: self.cat.compose(h, p.arrow),
            value: p.value.clone(),
        }
    }

    fn sections(&self, stage: usize, dom: &Elem, cod: &BTreeMap<Point, Elem>) -> Result<Elem, HostError> {
        self.literal_sections(stage, dom, cod).map(Arc::new)
    }

    fn pairs(&self, stage: usize, dom: &Elem, cod: &BTreeMap<Point, Elem>) -> Result<Elem, HostError> {
        let cat = &self.cat;
        let sc = &self.slices[stage];
        let mut fibers = Vec::new();
        for (t, &f) in sc.base_of.iter().enumerate() {
            let d = cat.src(f);
            let mut fiber = Vec::new();
            for a in &dom.fibers[t] {
                for b in self.top_fiber(d, Self::cod_at(cod, f, a)?) {
                    fiber.push(CanonVal::pair(a.clone(), b.clone()));
                }
            }
            fiber.sort();
            fibers.push(fiber);
        }
        let mut maps = Vec::new();
        for (arrow, &(h, t)) in sc.el.arrow_of.iter().enumerate() {
            let f = sc.base_of[t];
            let d = cat.src(f);
            let sd = &self.slices[d];
            let t2 = sc.el.cat.src(arrow);
            let mut map = Vec::new();
            for pair in &fibers[t] {
                let CanonVal::Tuple(ab) = pair else { unreachable!() };
                let ai = dom.index_of(t, &ab[0]).unwrap();
                let a2 = dom.fibers[t2][dom.restrict(arrow, ai)].clone();
                let fam = Self::cod_at(cod, f, &ab[0])?;
                let bi = fam.index_of(sd.id_obj, &ab[1]).unwrap();
                let b2 = fam.fibers[sd.obj(h)][fam.restrict(sd.arrow(h, cat.identity(d)), bi)].clone();
                let j = fibers[t2]
                    .binary_search(&CanonVal::pair(a2, b2))
                    .map_err(|_| HostError::Invalid("restriction of a pair is not a pair".into()))?;
                map.push(j as u32);
            }
            maps.push(map);
        }
        Ok(Arc::new(Presheaf { fibers, maps }))
    }

    fn host_pi(&self, stage: usize, dom: &Elem, cod: &BTreeMap<Point, Elem>) -> Result<Elem, HostError> {
        let literal = self.literal_sections(stage, dom, cod)?;
        Ok(Arc::new(match self.config.mode {
            Mode::Strict => literal,
            Mode::Weak => literal.relabel(),
        }))
    }

    fn host_lift(&self, _from: Level, x: &Elem) -> Elem {
        x.clone()
    }

    fn host_lift_to(&self, _from: Level, _to: Level, x: &Elem) -> Elem {
        x.clone()
    }

    fn encode_elem(&self, x: &Elem) -> CanonVal {
        x.encode()
    }

    fn encode_point(&self, p: &Point) -> CanonVal {
        CanonVal::pair(CanonVal::Atom(p.arrow as u32), p.value.clone())
    }

    fn code_cache(&self) -> &CodeCache<Self> {
        &self.codes
    }
}
