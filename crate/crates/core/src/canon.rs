//! Canonical finite values. Fibers of host families are sets of these, so
//! equality of host elements is decidable and literal.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CanonVal {
    Atom(u32),
    Tuple(Vec<CanonVal>),
    /// A finite function, as pairs with distinct keys sorted ascending.
    Table(Vec<(CanonVal, CanonVal)>),
}

impl CanonVal {
    /// Build a table, sorting by key. Panics on duplicate keys.
    pub fn table(mut pairs: Vec<(CanonVal, CanonVal)>) -> CanonVal {
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        assert!(
            pairs.windows(2).all(|w| w[0].0 != w[1].0),
            "table keys must be distinct"
        );
        CanonVal::Table(pairs)
    }

    pub fn pair(a: CanonVal, b: CanonVal) -> CanonVal {
        CanonVal::Tuple(vec![a, b])
    }

    pub fn lookup(&self, key: &CanonVal) -> Option<&CanonVal> {
        match self {
            CanonVal::Table(pairs) => pairs
                .binary_search_by(|(k, _)| k.cmp(key))
                .ok()
                .map(|i| &pairs[i].1),
            _ => None,
        }
    }
}

impl fmt::Display for CanonVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CanonVal::Atom(n) => write!(f, "{n}"),
            CanonVal::Tuple(items) => {
                f.write_str("(")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            CanonVal::Table(pairs) => {
                f.write_str("{")?;
                for (i, (k, v)) in pairs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{k}:{v}")?;
                }
                f.write_str("}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_are_sorted_and_searchable() {
        let t = CanonVal::table(vec![
            (CanonVal::Atom(2), CanonVal::Atom(0)),
            (CanonVal::Atom(1), CanonVal::Atom(5)),
        ]);
        assert_eq!(t.to_string(), "{1:5,2:0}");
        assert_eq!(t.lookup(&CanonVal::Atom(2)), Some(&CanonVal::Atom(0)));
        assert_eq!(t.lookup(&CanonVal::Atom(3)), None);
    }

    #[test]
    #[should_panic]
    fn duplicate_keys_rejected() {
        CanonVal::table(vec![
            (CanonVal::Atom(1), CanonVal::Atom(0)),
            (CanonVal::Atom(1), CanonVal::Atom(1)),
        ]);
    }
}
