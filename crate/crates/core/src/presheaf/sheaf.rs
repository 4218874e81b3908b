//! Finite presheaves: a finite set of canonical values at each object and a
//! restriction map along each arrow.

use crate::canon::CanonVal;
use crate::ir_universe::HostError;

use super::cat::FinCat;

/// A presheaf on some [`FinCat`]. Fibers are sorted and duplicate-free;
/// `maps[g][i]` is the index in `fibers[src g]` of the restriction of
/// `fibers[dst g][i]` along `g`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Presheaf {
    pub fibers: Vec<Vec<CanonVal>>,
    pub maps: Vec<Vec<u32>>,
}

impl Presheaf {
    /// The presheaf with every fiber empty.
    pub fn empty(cat: &FinCat) -> Presheaf {
        Presheaf {
            fibers: vec![Vec::new(); cat.num_objects()],
            maps: vec![Vec::new(); cat.num_arrows()],
        }
    }

    /// The presheaf with every fiber `{0}`.
    pub fn terminal(cat: &FinCat) -> Presheaf {
        Presheaf::constant(cat, 1)
    }

    /// Every fiber is `{0, .., n-1}` and every map is the identity.
    pub fn constant(cat: &FinCat, n: u32) -> Presheaf {
        Presheaf {
            fibers: vec![(0..n).map(CanonVal::Atom).collect(); cat.num_objects()],
            maps: vec![(0..n).collect(); cat.num_arrows()],
        }
    }

    pub fn max_fiber(&self) -> usize {
        self.fibers.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Restrict the `i`-th element of the fiber over `dst g` along `g`.
    pub fn restrict(&self, g: usize, i: usize) -> usize {
        self.maps[g][i] as usize
    }

    pub fn index_of(&self, o: usize, v: &CanonVal) -> Option<usize> {
        self.fibers[o].binary_search(v).ok()
    }

    /// Check shape, canonical fibers and functoriality; lists every
    /// violation found.
    pub fn validate(&self, cat: &FinCat) -> Result<(), Vec<String>> {
        let mut bad = Vec::new();
        if self.fibers.len() != cat.num_objects() || self.maps.len() != cat.num_arrows() {
            return Err(vec!["presheaf shape does not match the category".into()]);
        }
        for (o, fiber) in self.fibers.iter().enumerate() {
            if fiber.windows(2).any(|w| w[0] >= w[1]) {
                bad.push(format!("fiber over `{}` is not sorted and duplicate-free", cat.objects[o]));
            }
        }
        for (g, map) in self.maps.iter().enumerate() {
            let (s, d) = (cat.src(g), cat.dst(g));
            let name = &cat.arrows[g].name;
            if map.len() != self.fibers[d].len() || map.iter().any(|&j| j as usize >= self.fibers[s].len()) {
                bad.push(format!("map along `{name}` is not a function between its fibers"));
            }
        }
        if !bad.is_empty() {
            return Err(bad);
        }
        for o in 0..cat.num_objects() {
            let id = cat.identity(o);
            if self.maps[id].iter().enumerate().any(|(i, &j)| i != j as usize) {
                bad.push(format!("restriction along `{}` is not the identity", cat.arrows[id].name));
            }
        }
        for g in 0..cat.num_arrows() {
            for f in 0..cat.num_arrows() {
                if cat.src(g) != cat.dst(f) {
                    continue;
                }
                let h = cat.compose(g, f);
                let ok = (0..self.fibers[cat.dst(g)].len())
                    .all(|i| self.maps[h][i] == self.maps[f][self.maps[g][i] as usize]);
                if !ok {
                    bad.push(format!(
                        "restriction along `{}` is not restriction along `{}` then `{}`",
                        cat.arrows[h].name, cat.arrows[g].name, cat.arrows[f].name
                    ));
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(bad)
        }
    }

    /// Rename every fiber to `{0, .., n-1}` by sorted position.
    pub fn relabel(&self) -> Presheaf {
        Presheaf {
            fibers: self
                .fibers
                .iter()
                .map(|f| (0..f.len() as u32).map(CanonVal::Atom).collect())
                .collect(),
            maps: self.maps.clone(),
        }
    }

    /// Reindex along a functor given by its action on objects and arrows.
    pub fn reindex(&self, on_objects: &[usize], on_arrows: &[usize]) -> Presheaf {
        Presheaf {
            fibers: on_objects.iter().map(|&o| self.fibers[o].clone()).collect(),
            maps: on_arrows.iter().map(|&a| self.maps[a].clone()).collect(),
        }
    }

    /// Search for an isomorphism `self ≅ other`: a bijection per object,
    /// as `iso[o][i] = j`, commuting with every restriction.
    pub fn isomorphism(&self, other: &Presheaf, cat: &FinCat) -> Option<Vec<Vec<u32>>> {
        if self.fibers.iter().map(Vec::len).ne(other.fibers.iter().map(Vec::len)) {
            return None;
        }
        let n = cat.num_objects();
        let mut iso: Vec<Option<Vec<u32>>> = vec![None; n];
        fn permutations(k: usize) -> Vec<Vec<u32>> {
            if k == 0 {
                return vec![Vec::new()];
            }
            let mut out = Vec::new();
            for p in permutations(k - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, (k - 1) as u32);
                    out.push(q);
                }
            }
            out
        }
        fn go(a: &Presheaf, b: &Presheaf, cat: &FinCat, o: usize, iso: &mut Vec<Option<Vec<u32>>>) -> bool {
            if o == cat.num_objects() {
                return true;
            }
            for perm in permutations(a.fibers[o].len()) {
                iso[o] = Some(perm);
                let ok = (0..cat.num_arrows()).all(|g| {
                    let (s, d) = (cat.src(g), cat.dst(g));
                    match (&iso[s], &iso[d]) {
                        (Some(ps), Some(pd)) => (0..a.fibers[d].len())
                            .all(|i| ps[a.maps[g][i] as usize] == b.maps[g][pd[i] as usize]),
                        _ => true,
                    }
                });
                if ok && go(a, b, cat, o + 1, iso) {
                    return true;
                }
            }
            iso[o] = None;
            false
        }
        go(self, other, cat, 0, &mut iso).then(|| iso.into_iter().map(Option::unwrap).collect())
    }

    /// Encode as a single canonical value.
    pub fn encode(&self) -> CanonVal {
        use CanonVal::{Atom, Tuple};
        Tuple(vec![
            Tuple(self.fibers.iter().map(|f| Tuple(f.clone())).collect()),
            Tuple(
                self.maps
                    .iter()
                    .map(|m| Tuple(m.iter().map(|&j| Atom(j)).collect()))
                    .collect(),
            ),
        ])
    }
}

/// Every presheaf on `cat` whose fibers are `{0, .., k-1}` with `k ≤ bound`,
/// sorted, without duplicates. Exceeding `cap` is an error.
pub fn enumerate_presheaves(cat: &FinCat, bound: usize, cap: usize) -> Result<Vec<Presheaf>, HostError> {
    let n = cat.num_objects();
    let order: Vec<usize> = (0..cat.num_arrows()).filter(|&a| !cat.is_identity(a)).collect();
    let position: Vec<usize> = {
        let mut p = vec![0; cat.num_arrows()];
        for (k, &a) in order.iter().enumerate() {
            p[a] = k + 1;
        }
        p
    };
    // Each composition law is checked once all three arrows are assigned,
    // at the step assigning the last of them.
    let mut laws: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); order.len() + 1];
    for g in 0..cat.num_arrows() {
        for f in 0..cat.num_arrows() {
            if cat.src(g) == cat.dst(f) {
                let h = cat.compose(g, f);
                let last = position[g].max(position[f]).max(position[h]);
                laws[last].push((g, f, h));
            }
        }
    }

    struct Search<'a> {
        cat: &'a FinCat,
        order: &'a [usize],
        laws: &'a [Vec<(usize, usize, usize)>],
        cur: Presheaf,
        out: Vec<Presheaf>,
        cap: usize,
    }

    impl Search<'_> {
        fn holds(&self, step: usize) -> bool {
            self.laws[step].iter().all(|&(g, f, h)| {
                let m = &self.cur.maps;
                (0..self.cur.fibers[self.cat.dst(g)].len()).all(|i| m[h][i] == m[f][m[g][i] as usize])
            })
        }

        fn go(&mut self, k: usize) -> Result<(), HostError> {
            if k == self.order.len() {
                self.out.push(self.cur.clone());
                if self.out.len() > self.cap {
                    return Err(HostError::CapExceeded {
                        what: "presheaves".into(),
                        cap: self.cap,
                    });
                }
                return Ok(());
            }
            let a = self.order[k];
            let (s, d) = (self.cat.src(a), self.cat.dst(a));
            let (ns, nd) = (self.cur.fibers[s].len(), self.cur.fibers[d].len());
            if ns == 0 && nd > 0 {
                return Ok(());
            }
            let total = ns.pow(nd as u32);
            for code in 0..total {
                let mut c = code;
                let map: Vec<u32> = (0..nd)
                    .map(|_| {
                        let j = c % ns.max(1);
                        c /= ns.max(1);
                        j as u32
                    })
                    .collect();
                self.cur.maps[a] = map;
                if self.holds(k + 1) {
                    self.go(k + 1)?;
                }
            }
            self.cur.maps[a] = Vec::new();
            Ok(())
        }
    }

    let mut out = Vec::new();
    let mut sizes = vec![0usize; n];
    loop {
        let mut cur = Presheaf {
            fibers: sizes
                .iter()
                .map(|&k| (0..k as u32).map(CanonVal::Atom).collect())
                .collect(),
            maps: vec![Vec::new(); cat.num_arrows()],
        };
        for o in 0..n {
            cur.maps[cat.identity(o)] = (0..sizes[o] as u32).collect();
        }
        let mut search = Search {
            cat,
            order: &order,
            laws: &laws,
            cur,
            out: Vec::new(),
            cap: cap.saturating_sub(out.len()),
        };
        if search.holds(0) {
            search.go(0)?;
        }
        out.append(&mut search.out);
        // next size vector
        let mut o = 0;
        while o < n && sizes[o] == bound {
            sizes[o] = 0;
            o += 1;
        }
        if o == n {
            break;
        }
        sizes[o] += 1;
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::cat::{RawArrow, RawCat};

    fn arrow_cat() -> FinCat {
        let raw = RawCat {
            objects: vec!["a".into(), "b".into()],
            arrows: vec![
                RawArrow { id: "ia".into(), src: "a".into(), dst: "a".into() },
                RawArrow { id: "ib".into(), src: "b".into(), dst: "b".into() },
                RawArrow { id: "f".into(), src: "a".into(), dst: "b".into() },
            ],
            identities: [("a".to_string(), "ia".to_string()), ("b".to_string(), "ib".to_string())].into(),
            comp: Vec::new(),
        };
        FinCat::validate(&raw).unwrap()
    }

    #[test]
    fn sets_up_to_two() {
        let all = enumerate_presheaves(&FinCat::discrete(1), 2, 100).unwrap();
        assert_eq!(all.len(), 3);
    }

    #[test]
    fn arrow_presheaves_are_functions() {
        // Σ over sizes (a, b) ≤ 2 of a^b.
        let all = enumerate_presheaves(&arrow_cat(), 2, 100).unwrap();
        assert_eq!(all.len(), 1 + 1 + 1 + 0 + 1 + 2 + 0 + 1 + 4);
        for p in &all {
            p.validate(&arrow_cat()).unwrap();
        }
    }

    #[test]
    fn cap_is_an_error() {
        let err = enumerate_presheaves(&arrow_cat(), 2, 5).unwrap_err();
        assert!(matches!(err, HostError::CapExceeded { .. }));
    }

    #[test]
    fn relabel_is_isomorphic() {
        let cat = arrow_cat();
        let p = Presheaf {
            fibers: vec![
                vec![CanonVal::Atom(7), CanonVal::Atom(9)],
                vec![CanonVal::Atom(3)],
            ],
            maps: vec![vec![0, 1], vec![0], vec![1]],
        };
        p.validate(&cat).unwrap();
        let q = p.relabel();
        assert_ne!(p, q);
        assert_eq!(p.isomorphism(&q, &cat), Some(vec![vec![0, 1], vec![0]]));
        // Moving the image of the one point is undone by a swap.
        let mut r = q.clone();
        r.maps[2] = vec![0];
        assert_eq!(p.isomorphism(&r, &cat), Some(vec![vec![1, 0], vec![0]]));
        // A constant map is not isomorphic to an injective one.
        let two = |image: Vec<u32>| Presheaf {
            fibers: vec![vec![CanonVal::Atom(0), CanonVal::Atom(1)]; 2],
            maps: vec![vec![0, 1], vec![0, 1], image],
        };
        two(vec![0, 0]).validate(&cat).unwrap();
        assert_eq!(two(vec![0, 0]).isomorphism(&two(vec![1, 0]), &cat), None);
    }

    #[test]
    fn validation_reports_broken_functoriality() {
        let cat = arrow_cat();
        let p = Presheaf {
            fibers: vec![vec![CanonVal::Atom(0)], vec![CanonVal::Atom(0)]],
            maps: vec![vec![0], vec![0], vec![1]],
        };
        assert!(p.validate(&cat).is_err());
    }
}
