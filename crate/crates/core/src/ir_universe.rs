//! The universe of codes as an inductive-recursive family, interpreted in an
//! arbitrary host.
//!
//! A host supplies stages (with arrows between them), families of elements
//! at each stage, and literal function and pair formers. A [`CodeTree`] is
//! built only through the smart constructors here, which decode it at the
//! same time; the decoded host element is cached in the tree.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use thiserror::Error;

use crate::canon::CanonVal;

pub type Level = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HostError {
    #[error("enumeration of {what} exceeded the cap of {cap}")]
    CapExceeded { what: String, cap: usize },
    #[error("deadline passed")]
    Deadline,
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("subcodes live at different levels or stages")]
    Mismatch,
    #[error("uni({k}) is not a code of V_{level}")]
    UniLevel { k: Level, level: Level },
    #[error("code family is not indexed by the points of the decoded domain")]
    IndexMismatch,
    #[error("code family is not natural at point {0}")]
    NotNatural(String),
    #[error("decoded family does not lie in the host universe at level {0}")]
    TooLarge(Level),
    #[error(transparent)]
    Host(#[from] HostError),
}

/// The semantic side of the interpretation.
pub trait HostUniverse: Sized + Sync {
    type Stage: Copy + Ord + Hash + fmt::Debug + Send + Sync;
    type Arrow: Copy + Ord + Hash + fmt::Debug + Send + Sync;
    type Elem: Clone + Eq + Hash + fmt::Debug + Send + Sync;
    type Point: Clone + Ord + Hash + fmt::Debug + Send + Sync;

    /// Whether the host function former is the literal one used by decoding.
    fn strict_pi(&self) -> bool;
    fn stages(&self) -> Vec<Self::Stage>;
    /// Every arrow with the given codomain, identity included.
    fn arrows_into(&self, stage: Self::Stage) -> Vec<Self::Arrow>;
    fn identity(&self, stage: Self::Stage) -> Self::Arrow;
    fn arrow_src(&self, h: Self::Arrow) -> Self::Stage;
    fn arrow_dst(&self, h: Self::Arrow) -> Self::Stage;
    fn compose(&self, g: Self::Arrow, f: Self::Arrow) -> Self::Arrow;

    /// The host universe at `level`, at `stage`, in a fixed order.
    fn elements(&self, level: Level, stage: Self::Stage) -> Result<Arc<Vec<Self::Elem>>, HostError>;
    /// Whether `x` lies in the host universe at `level`.
    fn admits(&self, level: Level, x: &Self::Elem) -> bool;
    fn elem_eq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        a == b
    }
    fn bool_elem(&self, stage: Self::Stage) -> Self::Elem;
    fn unit_elem(&self, stage: Self::Stage) -> Self::Elem;
    /// The element decoding `uni(k)`.
    fn universe_elem(&self, k: Level, stage: Self::Stage) -> Result<Self::Elem, HostError>;
    /// Reindex an element at `dst(h)` to `src(h)`.
    fn restrict_elem(&self, x: &Self::Elem, h: Self::Arrow) -> Self::Elem;

    /// The points of `dom`: the index set of a code family over it. Returned
    /// in the order families are enumerated.
    fn points(&self, stage: Self::Stage, dom: &Self::Elem) -> Vec<Self::Point>;
    fn point_stage(&self, p: &Self::Point) -> Self::Stage;
    /// Restrict a point along an arrow into its own stage.
    fn act_point(&self, dom: &Self::Elem, p: &Self::Point, g: Self::Arrow) -> Self::Point;
    /// A point of `dom·h` seen as a point of `dom`.
    fn reindex_point(&self, h: Self::Arrow, p: &Self::Point) -> Self::Point;

    /// Literal dependent functions.
    fn sections(
        &self,
        stage: Self::Stage,
        dom: &Self::Elem,
        cod: &BTreeMap<Self::Point, Self::Elem>,
    ) -> Result<Self::Elem, HostError>;
    /// Literal dependent pairs.
    fn pairs(
        &self,
        stage: Self::Stage,
        dom: &Self::Elem,
        cod: &BTreeMap<Self::Point, Self::Elem>,
    ) -> Result<Self::Elem, HostError>;
    /// The host's own function former.
    fn host_pi(
        &self,
        stage: Self::Stage,
        dom: &Self::Elem,
        cod: &BTreeMap<Self::Point, Self::Elem>,
    ) -> Result<Self::Elem, HostError>;
    /// The inclusion of level `from` into level `from + 1`.
    fn host_lift(&self, from: Level, x: &Self::Elem) -> Self::Elem;
    /// The inclusion of level `from` into level `to`, computed directly.
    fn host_lift_to(&self, from: Level, to: Level, x: &Self::Elem) -> Self::Elem;

    fn encode_elem(&self, x: &Self::Elem) -> CanonVal;
    fn encode_point(&self, p: &Self::Point) -> CanonVal;
    fn code_cache(&self) -> &CodeCache<Self>;
}

pub enum Node<H: HostUniverse> {
    Up(H::Elem),
    Bool,
    Unit,
    Uni(Level),
    Fn(CodeTree<H>, CodeFamily<H>),
    Sg(CodeTree<H>, CodeFamily<H>),
}

struct Inner<H: HostUniverse> {
    level: Level,
    stage: H::Stage,
    depth: u32,
    fingerprint: u64,
    node: Node<H>,
    decoded: H::Elem,
}

/// A code of the universe at some level and stage.
pub struct CodeTree<H: HostUniverse>(Arc<Inner<H>>);

/// A code family, tabulated over the points of a decoded domain.
pub struct CodeFamily<H: HostUniverse>(Arc<BTreeMap<H::Point, CodeTree<H>>>);

impl<H: HostUniverse> Clone for CodeTree<H> {
    fn clone(&self) -> Self {
        CodeTree(self.0.clone())
    }
}

impl<H: HostUniverse> Clone for CodeFamily<H> {
    fn clone(&self) -> Self {
        CodeFamily(self.0.clone())
    }
}

impl<H: HostUniverse> PartialEq for Node<H> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Node::Up(a), Node::Up(b)) => a == b,
            (Node::Bool, Node::Bool) | (Node::Unit, Node::Unit) => true,
            (Node::Uni(j), Node::Uni(k)) => j == k,
            (Node::Fn(a0, b0), Node::Fn(a1, b1)) | (Node::Sg(a0, b0), Node::Sg(a1, b1)) => {
                a0 == a1 && b0 == b1
            }
            _ => false,
        }
    }
}

impl<H: HostUniverse> PartialEq for CodeTree<H> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.fingerprint == other.0.fingerprint
                && self.0.level == other.0.level
                && self.0.stage == other.0.stage
                && self.0.node == other.0.node)
    }
}

impl<H: HostUniverse> Eq for CodeTree<H> {}

impl<H: HostUniverse> Hash for CodeTree<H> {
    fn hash<S: Hasher>(&self, state: &mut S) {
        state.write_u64(self.0.fingerprint);
    }
}

impl<H: HostUniverse> PartialEq for CodeFamily<H> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl<H: HostUniverse> Eq for CodeFamily<H> {}

impl<H: HostUniverse> fmt::Debug for CodeTree<H> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.node {
            Node::Up(x) => write!(f, "up({x:?})"),
            Node::Bool => f.write_str("bool"),
            Node::Unit => f.write_str("unit"),
            Node::Uni(k) => write!(f, "uni({k})"),
            Node::Fn(a, b) => write!(f, "fn({a:?}, {b:?})"),
            Node::Sg(a, b) => write!(f, "sg({a:?}, {b:?})"),
        }
    }
}

impl<H: HostUniverse> fmt::Debug for CodeFamily<H> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

impl<H: HostUniverse> CodeFamily<H> {
    pub fn new(entries: BTreeMap<H::Point, CodeTree<H>>) -> Self {
        CodeFamily(Arc::new(entries))
    }

    pub fn get(&self, p: &H::Point) -> Option<&CodeTree<H>> {
        self.0.get(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&H::Point, &CodeTree<H>)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn decoded(&self) -> BTreeMap<H::Point, H::Elem> {
        self.0.iter().map(|(p, c)| (p.clone(), c.decoded().clone())).collect()
    }

    pub fn map(&self, f: impl FnMut(&CodeTree<H>) -> Result<CodeTree<H>, CodeError>) -> Result<Self, CodeError> {
        let mut f = f;
        let mut out = BTreeMap::new();
        for (p, c) in self.0.iter() {
            out.insert(p.clone(), f(c)?);
        }
        Ok(CodeFamily::new(out))
    }
}

fn fingerprint<H: HostUniverse>(level: Level, stage: H::Stage, node: &Node<H>) -> u64 {
    let mut h = DefaultHasher::new();
    level.hash(&mut h);
    stage.hash(&mut h);
    match node {
        Node::Up(x) => (0u8, x).hash(&mut h),
        Node::Bool => 1u8.hash(&mut h),
        Node::Unit => 2u8.hash(&mut h),
        Node::Uni(k) => (3u8, k).hash(&mut h),
        Node::Fn(a, b) | Node::Sg(a, b) => {
            (if matches!(node, Node::Fn(..)) { 4u8 } else { 5u8 }).hash(&mut h);
            a.0.fingerprint.hash(&mut h);
            for (p, c) in b.iter() {
                p.hash(&mut h);
                c.0.fingerprint.hash(&mut h);
            }
        }
    }
    h.finish()
}

impl<H: HostUniverse> CodeTree<H> {
    fn build(level: Level, stage: H::Stage, node: Node<H>, decoded: H::Elem) -> Self {
        let depth = match &node {
            Node::Fn(a, b) | Node::Sg(a, b) => {
                1 + b.iter().map(|(_, c)| c.depth()).fold(a.depth(), u32::max)
            }
            _ => 0,
        };
        let fingerprint = fingerprint::<H>(level, stage, &node);
        CodeTree(Arc::new(Inner {
            level,
            stage,
            depth,
            fingerprint,
            node,
            decoded,
        }))
    }

    pub fn level(&self) -> Level {
        self.0.level
    }

    pub fn stage(&self) -> H::Stage {
        self.0.stage
    }

    pub fn depth(&self) -> u32 {
        self.0.depth
    }

    /// A structural hash, stable for a given build.
    pub fn fingerprint(&self) -> u64 {
        self.0.fingerprint
    }

    pub fn node(&self) -> &Node<H> {
        &self.0.node
    }

    /// The host element this code names, as computed at construction.
    pub fn decoded(&self) -> &H::Elem {
        &self.0.decoded
    }

    pub fn is_fn(&self) -> bool {
        matches!(self.0.node, Node::Fn(..))
    }

    /// Embed a host element of the universe at `level`.
    pub fn up(host: &H, level: Level, stage: H::Stage, x: H::Elem) -> Result<Self, CodeError> {
        if !host.admits(level, &x) {
            return Err(CodeError::TooLarge(level));
        }
        Ok(Self::build(level, stage, Node::Up(x.clone()), x))
    }

    pub fn bool(host: &H, level: Level, stage: H::Stage) -> Self {
        Self::build(level, stage, Node::Bool, host.bool_elem(stage))
    }

    pub fn unit(host: &H, level: Level, stage: H::Stage) -> Self {
        Self::build(level, stage, Node::Unit, host.unit_elem(stage))
    }

    pub fn uni(host: &H, level: Level, stage: H::Stage, k: Level) -> Result<Self, CodeError> {
        if k >= level {
            return Err(CodeError::UniLevel { k, level });
        }
        let decoded = host.universe_elem(k, stage)?;
        Ok(Self::build(level, stage, Node::Uni(k), decoded))
    }

    pub fn fn_(host: &H, dom: CodeTree<H>, fam: CodeFamily<H>) -> Result<Self, CodeError> {
        Self::former(host, dom, fam, true)
    }

    pub fn sg(host: &H, dom: CodeTree<H>, fam: CodeFamily<H>) -> Result<Self, CodeError> {
        Self::former(host, dom, fam, false)
    }

    fn former(host: &H, dom: CodeTree<H>, fam: CodeFamily<H>, is_fn: bool) -> Result<Self, CodeError> {
        let (level, stage) = (dom.level(), dom.stage());
        let points = host.points(stage, dom.decoded());
        if points.len() != fam.len() || points.iter().any(|p| fam.get(p).is_none()) {
            return Err(CodeError::IndexMismatch);
        }
        for (p, c) in fam.iter() {
            if c.level() != level || c.stage() != host.point_stage(p) {
                return Err(CodeError::Mismatch);
            }
        }
        check_natural(host, dom.decoded(), &fam)?;
        let cod = fam.decoded();
        let decoded = if is_fn {
            host.sections(stage, dom.decoded(), &cod)?
        } else {
            host.pairs(stage, dom.decoded(), &cod)?
        };
        if !host.admits(level, &decoded) {
            return Err(CodeError::TooLarge(level));
        }
        let node = if is_fn { Node::Fn(dom, fam) } else { Node::Sg(dom, fam) };
        Ok(Self::build(level, stage, node, decoded))
    }
}

/// A family is natural when restricting the code at a point agrees with the
/// code at the restricted point.
fn check_natural<H: HostUniverse>(host: &H, dom: &H::Elem, fam: &CodeFamily<H>) -> Result<(), CodeError> {
    for (p, c) in fam.iter() {
        for g in host.arrows_into(host.point_stage(p)) {
            if g == host.identity(host.point_stage(p)) {
                continue;
            }
            let q = host.act_point(dom, p, g);
            let at_q = fam.get(&q).ok_or(CodeError::IndexMismatch)?;
            if *at_q != restrict(host, c, g)? {
                return Err(CodeError::NotNatural(host.encode_point(p).to_string()));
            }
        }
    }
    Ok(())
}

/// Decode by one step of the defining recursion, from the cached decodes of
/// the immediate subcodes.
pub fn decode<H: HostUniverse>(host: &H, c: &CodeTree<H>) -> Result<H::Elem, HostError> {
    match c.node() {
        Node::Up(x) => Ok(x.clone()),
        Node::Bool => Ok(host.bool_elem(c.stage())),
        Node::Unit => Ok(host.unit_elem(c.stage())),
        Node::Uni(k) => host.universe_elem(*k, c.stage()),
        Node::Fn(a, b) => host.sections(c.stage(), a.decoded(), &b.decoded()),
        Node::Sg(a, b) => host.pairs(c.stage(), a.decoded(), &b.decoded()),
    }
}

pub fn decompose_fn<H: HostUniverse>(c: &CodeTree<H>) -> Option<(&CodeTree<H>, &CodeFamily<H>)> {
    match c.node() {
        Node::Fn(a, b) => Some((a, b)),
        _ => None,
    }
}

/// Equality of codes, comparing embedded host elements with the host's
/// equality.
pub fn code_eq<H: HostUniverse>(host: &H, a: &CodeTree<H>, b: &CodeTree<H>) -> bool {
    if a.level() != b.level() || a.stage() != b.stage() {
        return false;
    }
    match (a.node(), b.node()) {
        (Node::Up(x), Node::Up(y)) => host.elem_eq(x, y),
        (Node::Bool, Node::Bool) | (Node::Unit, Node::Unit) => true,
        (Node::Uni(j), Node::Uni(k)) => j == k,
        (Node::Fn(a0, b0), Node::Fn(a1, b1)) | (Node::Sg(a0, b0), Node::Sg(a1, b1)) => {
            code_eq(host, a0, a1)
                && b0.len() == b1.len()
                && b0
                    .iter()
                    .all(|(p, c)| b1.get(p).is_some_and(|d| code_eq(host, c, d)))
        }
        _ => false,
    }
}

/// Lift a code one level, by recursion on its structure.
pub fn vlift<H: HostUniverse>(host: &H, c: &CodeTree<H>) -> Result<CodeTree<H>, CodeError> {
    let (level, stage) = (c.level(), c.stage());
    match c.node() {
        Node::Up(x) => CodeTree::up(host, level + 1, stage, host.host_lift(level, x)),
        Node::Bool => Ok(CodeTree::bool(host, level + 1, stage)),
        Node::Unit => Ok(CodeTree::unit(host, level + 1, stage)),
        Node::Uni(k) => CodeTree::uni(host, level + 1, stage, *k),
        Node::Fn(a, b) => CodeTree::fn_(host, vlift(host, a)?, b.map(|d| vlift(host, d))?),
        Node::Sg(a, b) => CodeTree::sg(host, vlift(host, a)?, b.map(|d| vlift(host, d))?),
    }
}

/// Lift a code straight to level `to`, using the host's direct inclusion.
pub fn vlift_to<H: HostUniverse>(host: &H, c: &CodeTree<H>, to: Level) -> Result<CodeTree<H>, CodeError> {
    let (level, stage) = (c.level(), c.stage());
    assert!(to >= level, "cannot lift from level {level} down to {to}");
    match c.node() {
        Node::Up(x) => CodeTree::up(host, to, stage, host.host_lift_to(level, to, x)),
        Node::Bool => Ok(CodeTree::bool(host, to, stage)),
        Node::Unit => Ok(CodeTree::unit(host, to, stage)),
        Node::Uni(k) => CodeTree::uni(host, to, stage, *k),
        Node::Fn(a, b) => CodeTree::fn_(host, vlift_to(host, a, to)?, b.map(|d| vlift_to(host, d, to))?),
        Node::Sg(a, b) => CodeTree::sg(host, vlift_to(host, a, to)?, b.map(|d| vlift_to(host, d, to))?),
    }
}

/// Restrictions of codes shallower than this are memoized. Deeper codes are
/// usually streamed, and remembering them would keep them all alive.
const MEMO_DEPTH: u32 = 2;

/// Reindex a code at `dst(h)` to `src(h)`.
pub fn restrict<H: HostUniverse>(host: &H, c: &CodeTree<H>, h: H::Arrow) -> Result<CodeTree<H>, CodeError> {
    debug_assert_eq!(c.stage(), host.arrow_dst(h));
    if h == host.identity(c.stage()) {
        return Ok(c.clone());
    }
    let cache = host.code_cache();
    let key = (c.clone(), h);
    let memo = c.depth() < MEMO_DEPTH;
    if memo {
        if let Some(hit) = cache.restrictions.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
    }
    let (level, stage) = (c.level(), host.arrow_src(h));
    let out = match c.node() {
        Node::Up(x) => CodeTree::up(host, level, stage, host.restrict_elem(x, h))?,
        Node::Bool => CodeTree::bool(host, level, stage),
        Node::Unit => CodeTree::unit(host, level, stage),
        Node::Uni(k) => CodeTree::uni(host, level, stage, *k)?,
        Node::Fn(a, b) | Node::Sg(a, b) => {
            let a2 = restrict(host, a, h)?;
            let mut fam = BTreeMap::new();
            for p in host.points(stage, a2.decoded()) {
                let at = b.get(&host.reindex_point(h, &p)).ok_or(CodeError::IndexMismatch)?;
                fam.insert(p, at.clone());
            }
            let fam = CodeFamily::new(fam);
            if c.is_fn() {
                CodeTree::fn_(host, a2, fam)?
            } else {
                CodeTree::sg(host, a2, fam)?
            }
        }
    };
    if memo {
        cache.restrictions.lock().unwrap().insert(key, out.clone());
    }
    Ok(out)
}

/// A canonical encoding of a code, used to name codes as elements of a
/// decoded universe.
pub fn encode<H: HostUniverse>(host: &H, c: &CodeTree<H>) -> CanonVal {
    use CanonVal::{Atom, Tuple};
    match c.node() {
        Node::Up(x) => Tuple(vec![Atom(0), host.encode_elem(x)]),
        Node::Bool => Tuple(vec![Atom(1)]),
        Node::Unit => Tuple(vec![Atom(2)]),
        Node::Uni(k) => Tuple(vec![Atom(3), Atom(*k)]),
        Node::Fn(a, b) | Node::Sg(a, b) => {
            let tag = if c.is_fn() { 4 } else { 5 };
            let fam = b
                .iter()
                .map(|(p, d)| (host.encode_point(p), encode(host, d)))
                .collect();
            Tuple(vec![Atom(tag), encode(host, a), CanonVal::table(fam)])
        }
    }
}

/// Memo tables shared by every enumeration over one host.
pub struct CodeCache<H: HostUniverse> {
    pub cap: usize,
    /// Build codes of depth two and more from representative subcodes; see
    /// [`enumerate`].
    pub reduce: bool,
    codes: Mutex<HashMap<(Level, H::Stage, u32), Arc<Vec<CodeTree<H>>>>>,
    bases: Mutex<HashMap<(Level, u32), Arc<Basis<H>>>>,
    restrictions: Mutex<HashMap<(CodeTree<H>, H::Arrow), CodeTree<H>>>,
    deadline: Mutex<Option<Instant>>,
}

impl<H: HostUniverse> CodeCache<H> {
    pub fn new(cap: usize, reduce: bool) -> Self {
        CodeCache {
            cap,
            reduce,
            codes: Mutex::new(HashMap::new()),
            bases: Mutex::new(HashMap::new()),
            restrictions: Mutex::new(HashMap::new()),
            deadline: Mutex::new(None),
        }
    }

    /// Long enumerations fail with [`HostError::Deadline`] once `at` passes.
    pub fn set_deadline(&self, at: Option<Instant>) {
        *self.deadline.lock().unwrap() = at;
    }

    pub fn check_deadline(&self) -> Result<(), HostError> {
        match *self.deadline.lock().unwrap() {
            Some(at) if Instant::now() >= at => Err(HostError::Deadline),
            _ => Ok(()),
        }
    }

    fn over_cap<S: fmt::Debug>(&self, n: usize, level: Level, stage: S, depth: u32) -> Result<(), CodeError> {
        if n > self.cap {
            return Err(HostError::CapExceeded {
                what: format!("codes of V_{level} at stage {stage:?} up to depth {depth}"),
                cap: self.cap,
            }
            .into());
        }
        Ok(())
    }
}

/// Subcodes used to build the next depth: per stage, one code per decoded
/// element (`doms`), and those codes together with all their restrictions
/// (`values`).
pub struct Basis<H: HostUniverse> {
    pub doms: HashMap<H::Stage, Vec<CodeTree<H>>>,
    pub values: HashMap<H::Stage, Arc<Vec<CodeTree<H>>>>,
}

/// The subcodes of depth at most `depth` from which deeper codes are built.
///
/// Without reduction this is every code. With reduction it keeps the first
/// code of each decode class, then closes under restriction so code
/// families over it are still natural on the nose.
pub fn basis<H: HostUniverse>(host: &H, level: Level, depth: u32) -> Result<Arc<Basis<H>>, CodeError> {
    let cache = host.code_cache();
    if let Some(hit) = cache.bases.lock().unwrap().get(&(level, depth)) {
        return Ok(hit.clone());
    }
    let mut doms = HashMap::new();
    let mut values: HashMap<H::Stage, Vec<CodeTree<H>>> = HashMap::new();
    let reduce = cache.reduce && depth >= 1;
    for stage in host.stages() {
        let all = enumerate(host, level, stage, depth)?;
        let reps: Vec<CodeTree<H>> = if reduce {
            let mut seen = std::collections::HashSet::new();
            all.iter().filter(|c| seen.insert(c.decoded().clone())).cloned().collect()
        } else {
            all.to_vec()
        };
        values.insert(stage, reps.clone());
        doms.insert(stage, reps);
    }
    if reduce {
        for stage in host.stages() {
            for r in doms[&stage].clone() {
                for g in host.arrows_into(stage) {
                    if g == host.identity(stage) {
                        continue;
                    }
                    let moved = restrict(host, &r, g)?;
                    let bucket = values.get_mut(&host.arrow_src(g)).unwrap();
                    if !bucket.contains(&moved) {
                        bucket.push(moved);
                    }
                }
            }
        }
    }
    let out = Arc::new(Basis {
        doms,
        values: values.into_iter().map(|(k, v)| (k, Arc::new(v))).collect(),
    });
    cache.bases.lock().unwrap().insert((level, depth), out.clone());
    Ok(out)
}

/// The well-formed codes of the universe at `level` and `stage` with depth
/// at most `depth`, in a fixed order: leaves first, then by depth.
///
/// A code is well formed when its decode lies in the host universe at its
/// level; codes failing that are not codes at all and are skipped. Going
/// past the cache's cap is an error, never a silent truncation.
///
/// Codes of depth at most one are always enumerated in full. With the
/// cache's `reduce` flag set, deeper codes are built only from the
/// [`basis`]: every code then has a twin in the enumeration whose immediate
/// subcodes decode to the same elements, so any equation that depends on
/// subcodes only through their decodes holds everywhere once it holds on
/// the enumeration and on all shallower codes.
///
/// The result is memoized. Use [`map_codes`] to visit the deepest layer
/// without keeping it.
pub fn enumerate<H: HostUniverse>(
    host: &H,
    level: Level,
    stage: H::Stage,
    depth: u32,
) -> Result<Arc<Vec<CodeTree<H>>>, CodeError> {
    let cache = host.code_cache();
    let key = (level, stage, depth);
    if let Some(hit) = cache.codes.lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let mut out: Vec<CodeTree<H>> = Vec::new();
    if depth == 0 {
        out = leaves(host, level, stage)?;
    } else {
        out.extend(enumerate(host, level, stage, depth - 1)?.iter().cloned());
        let basis = basis(host, level, depth - 1)?;
        for (is_fn, dom) in layer_jobs(&basis, stage) {
            layer_job(host, depth, &basis, is_fn, &dom, &mut |c| {
                out.push(c);
                cache.over_cap(out.len(), level, stage, depth)
            })?;
        }
    }
    cache.over_cap(out.len(), level, stage, depth)?;
    let out = Arc::new(out);
    cache.codes.lock().unwrap().insert(key, out.clone());
    Ok(out)
}

/// Apply `f` to every code [`enumerate`] would return, in the same order,
/// keeping only the results. The deepest layer is generated in parallel and
/// never stored, so this reaches depths whose codes do not fit in memory.
pub fn map_codes<H, R, F>(host: &H, level: Level, stage: H::Stage, depth: u32, f: F) -> Result<(usize, Vec<R>), CodeError>
where
    H: HostUniverse,
    R: Send,
    F: Fn(&CodeTree<H>) -> Option<R> + Sync,
{
    use rayon::prelude::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    let cache = host.code_cache();
    cache.check_deadline()?;
    let stored = cache.codes.lock().unwrap().get(&(level, stage, depth)).cloned();
    let lower = match stored {
        Some(all) => return Ok((all.len(), all.par_iter().filter_map(&f).collect())),
        None if depth == 0 => enumerate(host, level, stage, 0)?,
        None => enumerate(host, level, stage, depth - 1)?,
    };
    let mut out: Vec<R> = lower.par_iter().filter_map(&f).collect();
    if depth == 0 {
        return Ok((lower.len(), out));
    }
    let basis = basis(host, level, depth - 1)?;
    let count = AtomicUsize::new(lower.len());
    let jobs = layer_jobs(&basis, stage);
    let parts: Vec<Result<Vec<R>, CodeError>> = jobs
        .par_iter()
        .map(|(is_fn, dom)| {
            let mut part = Vec::new();
            layer_job(host, depth, &basis, *is_fn, dom, &mut |c| {
                let n = count.fetch_add(1, Ordering::Relaxed) + 1;
                cache.over_cap(n, level, stage, depth)?;
                if n % 4096 == 0 {
                    cache.check_deadline()?;
                }
                part.extend(f(&c));
                Ok(())
            })?;
            Ok(part)
        })
        .collect();
    for part in parts {
        out.extend(part?);
    }
    Ok((count.into_inner(), out))
}

fn leaves<H: HostUniverse>(host: &H, level: Level, stage: H::Stage) -> Result<Vec<CodeTree<H>>, CodeError> {
    let mut out = Vec::new();
    for x in host.elements(level, stage)?.iter() {
        out.push(CodeTree::up(host, level, stage, x.clone())?);
    }
    out.push(CodeTree::bool(host, level, stage));
    out.push(CodeTree::unit(host, level, stage));
    for k in 0..level {
        out.push(CodeTree::uni(host, level, stage, k)?);
    }
    Ok(out)
}

fn layer_jobs<H: HostUniverse>(basis: &Basis<H>, stage: H::Stage) -> Vec<(bool, CodeTree<H>)> {
    [true, false]
        .into_iter()
        .flat_map(|is_fn| basis.doms[&stage].iter().map(move |d| (is_fn, d.clone())))
        .collect()
}

/// The codes of exactly `depth` with the given former and domain.
fn layer_job<H: HostUniverse>(
    host: &H,
    depth: u32,
    basis: &Basis<H>,
    is_fn: bool,
    dom: &CodeTree<H>,
    emit: &mut dyn FnMut(CodeTree<H>) -> Result<(), CodeError>,
) -> Result<(), CodeError> {
    let points = host.points(dom.stage(), dom.decoded());
    let families = natural_families(host, dom.decoded(), &points, basis, host.code_cache().cap)?;
    for (k, fam) in families.into_iter().enumerate() {
        // Most families can be rejected as too large, so emitting alone is
        // not a steady enough clock.
        if k % 256 == 255 {
            host.code_cache().check_deadline()?;
        }
        let fresh = dom.depth() + 1 == depth || fam.iter().any(|(_, c)| c.depth() + 1 == depth);
        if !fresh {
            continue;
        }
        let made = if is_fn {
            CodeTree::fn_(host, dom.clone(), fam)
        } else {
            CodeTree::sg(host, dom.clone(), fam)
        };
        match made {
            Ok(c) => emit(c)?,
            Err(CodeError::TooLarge(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// Every natural code family over `points` with values in the basis, by
/// backtracking in the order the points are given.
pub fn natural_families<H: HostUniverse>(
    host: &H,
    dom: &H::Elem,
    points: &[H::Point],
    basis: &Basis<H>,
    cap: usize,
) -> Result<Vec<CodeFamily<H>>, CodeError> {
    let index: HashMap<&H::Point, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    // edges[i]: (g, j) with points[i]·g = points[j], for non-identity g.
    let mut edges: Vec<Vec<(H::Arrow, usize)>> = vec![Vec::new(); points.len()];
    for (i, p) in points.iter().enumerate() {
        let s = host.point_stage(p);
        for g in host.arrows_into(s) {
            if g == host.identity(s) {
                continue;
            }
            let q = host.act_point(dom, p, g);
            let j = *index.get(&q).ok_or(CodeError::IndexMismatch)?;
            edges[i].push((g, j));
        }
    }
    let mut incoming: Vec<Vec<(usize, H::Arrow)>> = vec![Vec::new(); points.len()];
    for (i, es) in edges.iter().enumerate() {
        for &(g, j) in es {
            incoming[j].push((i, g));
        }
    }
    let candidates: Vec<Arc<Vec<CodeTree<H>>>> = points
        .iter()
        .map(|p| basis.values[&host.point_stage(p)].clone())
        .collect();

    struct Search<'a, H: HostUniverse> {
        host: &'a H,
        points: &'a [H::Point],
        edges: Vec<Vec<(H::Arrow, usize)>>,
        incoming: Vec<Vec<(usize, H::Arrow)>>,
        candidates: Vec<Arc<Vec<CodeTree<H>>>>,
        chosen: Vec<Option<CodeTree<H>>>,
        out: Vec<CodeFamily<H>>,
        cap: usize,
    }

    impl<H: HostUniverse> Search<'_, H> {
        fn consistent(&self, i: usize, v: &CodeTree<H>) -> Result<bool, CodeError> {
            for &(g, j) in &self.edges[i] {
                let target = if j == i { Some(v) } else { self.chosen[j].as_ref() };
                if let Some(t) = target {
                    if restrict(self.host, v, g)? != *t {
                        return Ok(false);
                    }
                }
            }
            for &(j, g) in &self.incoming[i] {
                if j == i {
                    continue;
                }
                if let Some(src) = &self.chosen[j] {
                    if restrict(self.host, src, g)? != *v {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }

        fn go(&mut self, i: usize) -> Result<(), CodeError> {
            if i == self.points.len() {
                let fam = self
                    .points
                    .iter()
                    .zip(&self.chosen)
                    .map(|(p, c)| (p.clone(), c.clone().unwrap()))
                    .collect();
                self.out.push(CodeFamily::new(fam));
                if self.out.len() % 4096 == 0 {
                    self.host.code_cache().check_deadline()?;
                }
                if self.out.len() > self.cap {
                    return Err(HostError::CapExceeded {
                        what: "natural code families".into(),
                        cap: self.cap,
                    }
                    .into());
                }
                return Ok(());
            }
            let forced = self.incoming[i]
                .iter()
                .find(|(j, _)| *j < i)
                .map(|&(j, g)| restrict(self.host, self.chosen[j].as_ref().unwrap(), g))
                .transpose()?;
            let options: Vec<CodeTree<H>> = match forced {
                Some(v) => vec![v],
                None => self.candidates[i].iter().cloned().collect(),
            };
            for v in options {
                if self.consistent(i, &v)? {
                    self.chosen[i] = Some(v);
                    self.go(i + 1)?;
                    self.chosen[i] = None;
                }
            }
            Ok(())
        }
    }

    let mut search = Search {
        host,
        points,
        edges,
        incoming,
        candidates,
        chosen: vec![None; points.len()],
        out: Vec::new(),
        cap,
    };
    search.go(0)?;
    Ok(search.out)
}
