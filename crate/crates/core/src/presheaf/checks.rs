//! The verification suite run against a presheaf host. Each check yields one
//! record per stage; failing equations are report content, not errors.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::ir_universe::{self as iru, CodeError, CodeTree, HostUniverse, Level, Node};

use super::cat::Elements;
use super::host::{Code, Elem, Mode, PresheafHost};
use super::sheaf::{enumerate_presheaves, Presheaf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The check could not run to completion (cap or deadline).
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub subject: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub check: &'static str,
    pub level: Level,
    pub stage: String,
    pub status: Status,
    pub checked: usize,
    pub failed: usize,
    /// SHA-256 over the checked inputs in enumeration order.
    pub digest: String,
    /// The first few failures.
    pub failures: Vec<Failure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

const KEPT_FAILURES: usize = 8;

struct Tally {
    hasher: Sha256,
    checked: usize,
    failed: usize,
    failures: Vec<Failure>,
    notes: Vec<String>,
    witness: Option<serde_json::Value>,
}

impl Tally {
    fn new() -> Tally {
        Tally {
            hasher: Sha256::new(),
            checked: 0,
            failed: 0,
            failures: Vec::new(),
            notes: Vec::new(),
            witness: None,
        }
    }

    fn input(&mut self, bytes: &[u8]) {
        self.hasher.update(bytes);
    }

    fn outcome(&mut self, failure: Option<Failure>) {
        self.checked += 1;
        if let Some(f) = failure {
            self.failed += 1;
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(f);
            }
        }
    }

    fn finish(self, check: &'static str, level: Level, stage: String) -> CheckRecord {
        CheckRecord {
            check,
            level,
            stage,
            status: if self.failed == 0 { Status::Pass } else { Status::Fail },
            checked: self.checked,
            failed: self.failed,
            digest: hex(&self.hasher.finalize()),
            failures: self.failures,
            witness: self.witness,
            notes: self.notes,
            error: None,
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn errored(check: &'static str, level: Level, stage: String, e: impl std::fmt::Display) -> CheckRecord {
    let mut r = Tally::new().finish(check, level, stage);
    r.status = Status::Error;
    r.error = Some(e.to_string());
    r
}

fn fail(host: &PresheafHost, c: &Code, detail: impl Into<String>) -> Failure {
    Failure {
        subject: host.show_code(c),
        detail: detail.into(),
    }
}

fn stage_name(host: &PresheafHost, c: usize) -> String {
    host.cat().objects[c].clone()
}

/// Run `per_code` over the enumerated codes at one stage and tally the
/// outcomes. `None` from `per_code` means the code is not in scope.
fn over_codes<F>(host: &PresheafHost, check: &'static str, level: Level, c: usize, depth: u32, per_code: F) -> CheckRecord
where
    F: Fn(&Code) -> Option<Option<Failure>> + Sync,
{
    let run = iru::map_codes(host, level, c, depth, |code| {
        per_code(code).map(|f| (code.fingerprint(), f.map(Box::new)))
    });
    match run {
        Ok((_, outcomes)) => {
            let mut t = Tally::new();
            for (fp, f) in outcomes {
                t.input(&fp.to_le_bytes());
                t.outcome(f.map(|b| *b));
            }
            t.finish(check, level, stage_name(host, c))
        }
        Err(e) => errored(check, level, stage_name(host, c), e),
    }
}

/// Decoding an embedded element gives the element back.
pub fn check_retraction(host: &PresheafHost, level: Level) -> Vec<CheckRecord> {
    host.stages()
        .into_iter()
        .map(|c| {
            let elems = match host.elements(level, c) {
                Ok(e) => e,
                Err(e) => return errored("retraction", level, stage_name(host, c), e),
            };
            let mut t = Tally::new();
            for x in elems.iter() {
                t.input(x.encode().to_string().as_bytes());
                let f = match CodeTree::up(host, level, c, x.clone()) {
                    Err(e) => Some(format!("up rejected its own element: {e}")),
                    Ok(code) => match iru::decode(host, &code) {
                        Ok(y) if host.elem_eq(&y, x) && host.elem_eq(code.decoded(), x) => None,
                        Ok(y) => Some(format!("decoded to {}", y.encode())),
                        Err(e) => Some(e.to_string()),
                    },
                };
                t.outcome(f.map(|detail| Failure {
                    subject: format!("up{}", x.encode()),
                    detail,
                }));
            }
            t.finish("retraction", level, stage_name(host, c))
        })
        .collect()
}

/// Every fn code decodes to the literal section family, as computed by an
/// independent generate-and-test enumerator. In strict mode the host's own
/// function former gives the same element; in weak mode it gives an
/// isomorphic one, and a pair where the two differ is recorded.
pub fn check_decode_pi(host: &PresheafHost, level: Level, depth: u32) -> Vec<CheckRecord> {
    let mode = host.mode();
    host.stages()
        .into_iter()
        .map(|c| {
            let slice_cat = host.slice(c).cat();
            let mut record = over_codes(host, "decode_pi", level, c, depth, |code| {
                let (dom, fam) = iru::decompose_fn(code)?;
                let cod = fam.decoded();
                let check = || -> Result<Option<String>, CodeError> {
                    let again = iru::decode(host, code)?;
                    if again != *code.decoded() {
                        return Ok(Some("decode is not stable".into()));
                    }
                    let brute = host.sections_brute_force(c, dom.decoded(), &cod)?;
                    if brute != **code.decoded() {
                        return Ok(Some(format!("decoded {} but brute force gives {}", code.decoded().encode(), brute.encode())));
                    }
                    let pi = host.host_pi(c, dom.decoded(), &cod)?;
                    Ok(match mode {
                        Mode::Strict if pi != *code.decoded() => Some(format!("host pi gives {}", pi.encode())),
                        Mode::Weak if code.decoded().isomorphism(&pi, slice_cat).is_none() => {
                            Some(format!("host pi {} is not isomorphic to the decode", pi.encode()))
                        }
                        _ => None,
                    })
                };
                Some(match check() {
                    Ok(f) => f.map(|d| fail(host, code, d)),
                    Err(e) => Some(fail(host, code, e.to_string())),
                })
            });
            if record.status == Status::Error || mode == Mode::Strict {
                return record;
            }
            match weak_witness(host, level, c) {
                Ok(Some(w)) => record.witness = Some(w),
                Ok(None) => {
                    record.status = Status::Fail;
                    record.notes.push("no code whose host pi differs from its decode".into());
                }
                Err(e) => {
                    record.status = Status::Error;
                    record.error = Some(e.to_string());
                }
            }
            record
        })
        .collect()
}

/// The first depth-one fn code whose host function type differs from its
/// decode as a canonical value while being isomorphic to it.
fn weak_witness(host: &PresheafHost, level: Level, c: usize) -> Result<Option<serde_json::Value>, CodeError> {
    let slice_cat = host.slice(c).cat();
    for code in iru::enumerate(host, level, c, 1)?.iter() {
        let Some((dom, fam)) = iru::decompose_fn(code) else { continue };
        let pi = host.host_pi(c, dom.decoded(), &fam.decoded())?;
        if pi == *code.decoded() {
            continue;
        }
        if let Some(iso) = code.decoded().isomorphism(&pi, slice_cat) {
            return Ok(Some(serde_json::json!({
                "code": host.show_code(code),
                "decoded": code.decoded().encode().to_string(),
                "host_pi": pi.encode().to_string(),
                "isomorphism": iso,
            })));
        }
    }
    Ok(None)
}

/// Restricting a code and then decoding agrees with decoding and then
/// reindexing the host element, along every arrow into the stage.
pub fn check_naturality(host: &PresheafHost, level: Level, depth: u32) -> Vec<CheckRecord> {
    host.stages()
        .into_iter()
        .map(|c| {
            let record = over_codes(host, "naturality", level, c, depth, |code| {
                for h in host.arrows_into(c) {
                    let moved = match iru::restrict(host, code, h) {
                        Ok(m) => m,
                        Err(e) => return Some(Some(fail(host, code, format!("restriction along {}: {e}", host.cat().arrows[h].name)))),
                    };
                    let ok = if h == host.identity(c) {
                        moved == *code
                    } else {
                        host.elem_eq(moved.decoded(), &host.restrict_elem(code.decoded(), h))
                    };
                    if !ok {
                        return Some(Some(fail(host, code, format!("not natural along {}", host.cat().arrows[h].name))));
                    }
                }
                Some(None)
            });
            record
        })
        .collect()
}

/// Lifting preserves decodes, lifting twice is lifting straight to level
/// two, and lifting commutes with restriction. Level-zero codes go through
/// levels 0, 1 and 2; level-one leaves are lifted once.
pub fn check_lift(host: &PresheafHost, depth: u32) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    if host.levels() < 3 {
        out.push(errored("lift", 0, "*".into(), "lift functoriality needs at least three levels"));
        return out;
    }
    let one_step = |code: &Code| -> Result<Option<String>, CodeError> {
        let up = iru::vlift(host, code)?;
        if !host.elem_eq(up.decoded(), &host.host_lift(code.level(), code.decoded())) {
            return Ok(Some(format!("lift to level {} changes the decode", code.level() + 1)));
        }
        for h in host.arrows_into(code.stage()) {
            let a = iru::vlift(host, &iru::restrict(host, code, h)?)?;
            let b = iru::restrict(host, &up, h)?;
            if a != b {
                return Ok(Some(format!("lift does not commute with restriction along {}", host.cat().arrows[h].name)));
            }
        }
        Ok(None)
    };
    for c in host.stages() {
        let record = over_codes(host, "lift", 0, c, depth, |code| {
            let check = || -> Result<Option<String>, CodeError> {
                if let Some(f) = one_step(code)? {
                    return Ok(Some(f));
                }
                let once = iru::vlift(host, code)?;
                if let Some(f) = one_step(&once)? {
                    return Ok(Some(f));
                }
                let twice = iru::vlift(host, &once)?;
                let direct = iru::vlift_to(host, code, 2)?;
                if !iru::code_eq(host, &twice, &direct) || twice.decoded() != direct.decoded() {
                    return Ok(Some("lifting twice differs from lifting straight to level 2".into()));
                }
                Ok(None)
            };
            Some(match check() {
                Ok(f) => f.map(|d| fail(host, code, d)),
                Err(e) => Some(fail(host, code, e.to_string())),
            })
        });
        out.push(record);
    }
    for c in host.stages() {
        let record = over_codes(host, "lift", 1, c, 0, |code| {
            let check = || -> Result<Option<String>, CodeError> {
                if let Some(f) = one_step(code)? {
                    return Ok(Some(f));
                }
                if let Node::Uni(k) = code.node() {
                    let up = iru::vlift(host, code)?;
                    if !matches!(up.node(), Node::Uni(j) if j == k) || *up.decoded() != host.universe_elem(*k, c)? {
                        return Ok(Some(format!("lifted uni({k}) does not name V_{k}")));
                    }
                }
                Ok(None)
            };
            Some(match check() {
                Ok(f) => f.map(|d| fail(host, code, d)),
                Err(e) => Some(fail(host, code, e.to_string())),
            })
        });
        out.push(record);
    }
    out
}

/// Look for two fn codes that differ as codes while the host's function
/// former sends their decoded data to the same element.
///
/// Over an empty domain there is exactly one code family, so no such pair
/// has both domains empty; the record says so. The search instead runs
/// over all fn codes of depth one, preferring pairs with the same domain.
pub fn witness_non_injectivity(host: &PresheafHost, level: Level) -> Vec<CheckRecord> {
    host.stages()
        .into_iter()
        .map(|c| match non_injectivity_at(host, level, c) {
            Ok(r) => r,
            Err(e) => errored("non_injectivity", level, stage_name(host, c), e),
        })
        .collect()
}

fn non_injectivity_at(host: &PresheafHost, level: Level, c: usize) -> Result<CheckRecord, CodeError> {
    let mut t = Tally::new();
    let empty = CodeTree::up(host, level, c, Elem::new(Presheaf::empty(host.slice(c).cat())))?;
    let over_empty = host.points(c, empty.decoded()).len();
    t.notes.push(format!(
        "the empty domain has {over_empty} points and so exactly one code family: no pair of distinct codes over it exists"
    ));
    if host.bound(level) == 0 {
        t.notes.push("bound 0: every host element is empty and there is one family, so no witness exists".into());
        return Ok(t.finish("non_injectivity", level, stage_name(host, c)));
    }
    let codes = iru::enumerate(host, level, c, 1)?;
    // host pi element -> fn codes seen with it
    let mut seen: HashMap<Elem, Vec<Code>> = HashMap::new();
    let mut fallback: Option<(Code, Code, Elem)> = None;
    let mut found: Option<(Code, Code, Elem)> = None;
    for code in codes.iter() {
        let Some((dom, fam)) = iru::decompose_fn(code) else { continue };
        let pi = host.host_pi(c, dom.decoded(), &fam.decoded())?;
        t.input(&code.fingerprint().to_le_bytes());
        t.checked += 1;
        let bucket = seen.entry(pi.clone()).or_default();
        for other in bucket.iter() {
            let (dom0, fam0) = iru::decompose_fn(other).unwrap();
            if iru::code_eq(host, other, code) {
                continue;
            }
            let same_dom = dom0.decoded() == dom.decoded();
            let distinct_data = !same_dom || fam0.decoded() != fam.decoded();
            if same_dom && distinct_data && found.is_none() {
                found = Some((other.clone(), code.clone(), pi.clone()));
            } else if distinct_data && fallback.is_none() {
                fallback = Some((other.clone(), code.clone(), pi.clone()));
            }
        }
        bucket.push(code.clone());
        if found.is_some() {
            break;
        }
    }
    match found.or(fallback) {
        Some((a, b, pi)) => {
            let empty_domains = [&a, &b].iter().all(|c| iru::decompose_fn(c).unwrap().0.decoded().max_fiber() == 0);
            t.witness = Some(serde_json::json!({
                "code0": host.show_code(&a),
                "code1": host.show_code(&b),
                "host_pi": pi.encode().to_string(),
                "host_elements_equal": true,
                "codes_equal": iru::code_eq(host, &a, &b),
                "empty_domain": empty_domains,
            }));
        }
        None => t.outcome(Some(Failure {
            subject: stage_name(host, c),
            detail: "no pair of distinct fn codes with equal host function types".into(),
        })),
    }
    Ok(t.finish("non_injectivity", level, stage_name(host, c)))
}

/// Every family over every small base presheaf `X` is classified by a map
/// from `X` into the host stage sets, and decoding the embedded classifying
/// map gives the family back. Families too large for the level are
/// reported as out of class.
pub fn check_genericity(host: &PresheafHost, level: Level, family_bound: usize) -> Vec<CheckRecord> {
    let cap = host.config().cap;
    let bases = match enumerate_presheaves(host.cat(), family_bound, cap) {
        Ok(b) => b,
        Err(e) => return vec![errored("genericity", level, "*".into(), e)],
    };
    let per_base: Vec<Result<(Vec<(Vec<u8>, Option<Failure>)>, usize), CodeError>> = bases
        .par_iter()
        .map(|x| {
            let el = host.cat().elements(x);
            let families = enumerate_presheaves(&el.cat, host.bound(level), cap)?;
            let mut outcomes = Vec::new();
            for p in &families {
                outcomes.push((p.encode().to_string().into_bytes(), generic_failure(host, level, x, &el, p)?));
            }
            let mut out_of_class = 0;
            if !el.objs.is_empty() {
                let big = Presheaf::constant(&el.cat, host.bound(level) as u32 + 1);
                let class = classify(host, &el, x, &big, 0);
                match CodeTree::up(host, level, el.objs[0].0, Elem::new(class)) {
                    Err(CodeError::TooLarge(_)) => out_of_class += 1,
                    _ => outcomes.push((
                        big.encode().to_string().into_bytes(),
                        Some(Failure {
                            subject: format!("constant family of size {} over {}", host.bound(level) + 1, x.encode()),
                            detail: "accepted into the host universe".into(),
                        }),
                    )),
                }
            }
            Ok((outcomes, out_of_class))
        })
        .collect();
    let mut t = Tally::new();
    let mut out_of_class = 0;
    for (x, r) in bases.iter().zip(per_base) {
        match r {
            Ok((outcomes, n)) => {
                t.input(x.encode().to_string().as_bytes());
                for (bytes, f) in outcomes {
                    t.input(&bytes);
                    t.outcome(f);
                }
                out_of_class += n;
            }
            Err(e) => return vec![errored("genericity", level, "*".into(), e)],
        }
    }
    t.notes.push(format!("{} base presheaves with fibers at most {family_bound}", bases.len()));
    t.notes.push(format!("{out_of_class} oversized families reported out of class"));
    vec![t.finish("genericity", level, "*".into())]
}

/// The element of the host stage set at `c` naming `p` around the element
/// `t = (c, i)` of `X`: `p` pulled back along `C/c → ∫X`.
fn classify(host: &PresheafHost, el: &Elements, x: &Presheaf, p: &Presheaf, t: usize) -> Presheaf {
    let cat = host.cat();
    let (c, i) = el.objs[t];
    let sc = host.slice(c);
    let objs: Vec<usize> = sc
        .base_of
        .iter()
        .map(|&f| el.object(cat.src(f), x.maps[f][i as usize]))
        .collect();
    let arrows: Vec<usize> = sc.el.arrow_of.iter().map(|&(g, s)| el.arrow(g, objs[s])).collect();
    p.reindex(&objs, &arrows)
}

fn generic_failure(host: &PresheafHost, level: Level, x: &Presheaf, el: &Elements, p: &Presheaf) -> Result<Option<Failure>, CodeError> {
    let cat = host.cat();
    let bad = |detail: String| {
        Ok(Some(Failure {
            subject: format!("family {} over {}", p.encode(), x.encode()),
            detail,
        }))
    };
    let classes: Vec<Elem> = (0..el.objs.len()).map(|t| Elem::new(classify(host, el, x, p, t))).collect();
    for (t, class) in classes.iter().enumerate() {
        let c = el.objs[t].0;
        let stage = host.elements(level, c)?;
        if stage.binary_search_by(|e| (**e).cmp(class)).is_err() {
            return bad(format!("classifying element at {} is not in the host stage set", el.cat.objects[t]));
        }
    }
    for (a, &(g, t)) in el.arrow_of.iter().enumerate() {
        let s = el.cat.src(a);
        if host.restrict_elem(&classes[t], g) != classes[s] {
            return bad(format!("classifying map is not natural along {}", el.cat.arrows[a].name));
        }
    }
    // Decode the embedded classifying map and reassemble the family.
    let decoded: Vec<Elem> = classes
        .iter()
        .enumerate()
        .map(|(t, class)| {
            let code = CodeTree::up(host, level, el.objs[t].0, class.clone())?;
            Ok(iru::decode(host, &code)?)
        })
        .collect::<Result<_, CodeError>>()?;
    let fibers: Vec<Vec<_>> = (0..el.objs.len())
        .map(|t| host.top_fiber(el.objs[t].0, &decoded[t]).to_vec())
        .collect();
    let mut maps = Vec::new();
    for (a, &(g, t)) in el.arrow_of.iter().enumerate() {
        let c = el.objs[t].0;
        let sc = host.slice(c);
        let along = sc.arrow(g, cat.identity(c));
        let below = &decoded[t].fibers[sc.obj(g)];
        let s = el.cat.src(a);
        let mut map = Vec::new();
        for j in 0..fibers[t].len() {
            let v = &below[decoded[t].restrict(along, j)];
            match fibers[s].binary_search(v) {
                Ok(k) => map.push(k as u32),
                Err(_) => return bad(format!("decoded restriction along {} leaves the fiber", el.cat.arrows[a].name)),
            }
        }
        maps.push(map);
    }
    let rebuilt = Presheaf { fibers, maps };
    if rebuilt != *p {
        return bad(format!("decoding the classifying map gives {}", rebuilt.encode()));
    }
    Ok(None)
}

/// What [`run_suite`] runs.
#[derive(Debug, Clone, Serialize)]
pub struct SuitePlan {
    pub level: Level,
    pub depth: u32,
    pub family_bound: usize,
}

/// Every check, in a fixed order.
pub fn run_suite(host: &PresheafHost, plan: &SuitePlan) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for level in 0..host.levels() {
        out.extend(check_retraction(host, level));
    }
    out.extend(check_decode_pi(host, plan.level, plan.depth));
    out.extend(check_naturality(host, plan.level, plan.depth));
    out.extend(check_lift(host, plan.depth));
    out.extend(witness_non_injectivity(host, plan.level));
    out.extend(check_genericity(host, plan.level, plan.family_bound));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::{FinCat, HostConfig};

    fn terminal(mode: Mode, bounds: Vec<usize>) -> PresheafHost {
        PresheafHost::new(
            FinCat::discrete(1),
            HostConfig {
                mode,
                bounds,
                universe_depth: 1,
                cap: 1_000_000,
                reduce: true,
            },
        )
    }

    #[test]
    fn digests_do_not_depend_on_the_run() {
        let a = check_decode_pi(&terminal(Mode::Strict, vec![2, 3, 4]), 0, 1);
        let b = check_decode_pi(&terminal(Mode::Strict, vec![2, 3, 4]), 0, 1);
        assert_eq!(a[0].digest, b[0].digest);
        // the fn codes among the 95 codes of depth at most one
        assert_eq!(a[0].checked, 53);
    }

    #[test]
    fn weak_mode_records_a_renaming() {
        let r = &check_decode_pi(&terminal(Mode::Weak, vec![2, 3, 4]), 0, 1)[0];
        assert!(r.passed(), "{r:?}");
        assert!(r.witness.is_some());
    }

    #[test]
    fn lift_needs_three_levels() {
        let r = &check_lift(&terminal(Mode::Strict, vec![2, 3]), 1)[0];
        assert!(!r.passed());
    }

    #[test]
    fn bound_zero_has_no_witness() {
        let r = &witness_non_injectivity(&terminal(Mode::Strict, vec![0, 1, 2]), 0)[0];
        assert!(r.passed() && r.witness.is_none(), "{r:?}");
    }
}
