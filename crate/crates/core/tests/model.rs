//! Code enumeration and host universes against independent counts.

use std::collections::BTreeSet;
use std::path::Path;

use obtt_core::ir_universe::{self as iru, CodeFamily, CodeTree, HostUniverse};
use obtt_core::presheaf::checks::{run_suite, Status, SuitePlan};
use obtt_core::presheaf::{FinCat, HostConfig, Mode, Presheaf, PresheafHost};

fn base(name: &str) -> FinCat {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../bases").join(format!("{name}.json"));
    FinCat::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn host(cat: FinCat, mode: Mode, bounds: Vec<usize>, reduce: bool) -> PresheafHost {
    PresheafHost::new(
        cat,
        HostConfig {
            mode,
            bounds,
            universe_depth: 1,
            cap: 10_000_000,
            reduce,
        },
    )
}

/// Level-0 codes of depth at most one over a single point, counted from the
/// sizes of the leaves alone. `bool` and `unit` are leaves at any bound; a former over a leaf of size `a` takes any
/// `a` leaves as its family and is kept when its product (fn) or sum (sg)
/// fits the bound.
fn terminal_depth_one_count(bound: usize) -> usize {
    let mut leaves = vec![2, 1];
    leaves.extend(0..=bound);
    let mut total = leaves.len();
    for &a in &leaves {
        let mut fam = vec![0usize; a];
        loop {
            let sizes: Vec<usize> = fam.iter().map(|&i| leaves[i]).collect();
            total += usize::from(sizes.iter().product::<usize>() <= bound);
            total += usize::from(sizes.iter().sum::<usize>() <= bound);
            // next family in lexicographic order
            let Some(k) = (0..a).rev().find(|&k| fam[k] + 1 < leaves.len()) else { break };
            fam[k] += 1;
            fam[k + 1..].iter_mut().for_each(|i| *i = 0);
        }
    }
    total
}

#[test]
fn terminal_depth_one_matches_count() {
    assert_eq!(terminal_depth_one_count(2), 95);
    for bound in 1..=3 {
        let h = host(FinCat::discrete(1), Mode::Strict, vec![bound, bound + 1, bound + 2], true);
        let codes = iru::enumerate(&h, 0, 0, 1).unwrap();
        assert_eq!(codes.len(), terminal_depth_one_count(bound), "bound {bound}");
    }
}

/// On the arrow category the slice over the codomain is the arrow itself,
/// so a stage element is a map between two fibers of size at most `n`.
#[test]
fn arrow_stage_sets_match_count() {
    let h = host(base("arrow"), Mode::Strict, vec![2, 3, 4], true);
    let b = h.cat().objects.iter().position(|o| o == "b").unwrap();
    for n in 0..=3usize {
        let maps: usize = (0..=n).flat_map(|m| (0..=n).map(move |k| k.pow(m as u32))).sum();
        assert_eq!(h.stage_set(n, b).unwrap().len(), maps, "bound {n}");
    }
    assert_eq!(h.stage_set(0, b).unwrap().len(), 1);
}

#[test]
fn reduced_and_full_enumerations_decode_alike() {
    let bounds = vec![1, 2, 3];
    let decodes = |reduce| {
        let h = host(FinCat::discrete(1), Mode::Strict, bounds.clone(), reduce);
        let codes = iru::enumerate(&h, 0, 0, 2).unwrap();
        let set: BTreeSet<String> = codes.iter().map(|c| c.decoded().encode().to_string()).collect();
        (codes.len(), set)
    };
    let (n_full, full) = decodes(false);
    let (n_reduced, reduced) = decodes(true);
    assert!(n_reduced <= n_full);
    assert_eq!(full, reduced);
}

#[test]
fn function_code_fibers() {
    let h = host(FinCat::discrete(1), Mode::Strict, vec![2, 3, 4], true);
    let bool_family = |level| {
        let dom = CodeTree::bool(&h, level, 0);
        let fam = h
            .points(0, dom.decoded())
            .into_iter()
            .map(|p| (p, CodeTree::bool(&h, level, 0)))
            .collect();
        (dom, CodeFamily::new(fam))
    };
    let (dom, fam) = bool_family(2);
    let f = CodeTree::fn_(&h, dom, fam).unwrap();
    assert_eq!(f.decoded().max_fiber(), 4);

    // Bool → Bool has four elements, too many for the first two levels.
    let (dom, fam) = bool_family(0);
    assert!(CodeTree::fn_(&h, dom, fam).is_err());

    let empty = CodeTree::up(&h, 0, 0, std::sync::Arc::new(Presheaf::empty(h.slice(0).cat()))).unwrap();
    assert!(h.points(0, empty.decoded()).is_empty());
    let f = CodeTree::fn_(&h, empty, CodeFamily::new(Default::default())).unwrap();
    assert_eq!(f.decoded().max_fiber(), 1);
}

#[test]
fn depth_one_suite_on_small_bases() {
    for (name, mode) in [("terminal", Mode::Strict), ("terminal", Mode::Weak), ("arrow", Mode::Strict)] {
        let h = host(base(name), mode, vec![2, 3, 4], true);
        let records = run_suite(
            &h,
            &SuitePlan {
                level: 0,
                depth: 1,
                family_bound: 2,
            },
        );
        for r in &records {
            assert_eq!(r.status, Status::Pass, "{name} {mode:?}: {r:?}");
            assert!(r.checked > 0 || r.check == "non_injectivity", "{name}: {r:?}");
        }
        let witness = records.iter().find(|r| r.check == "non_injectivity").unwrap();
        let w = witness.witness.as_ref().unwrap();
        assert_eq!(w["host_elements_equal"], true);
        assert_eq!(w["codes_equal"], false);
        assert_eq!(w["empty_domain"], false);
    }
}
