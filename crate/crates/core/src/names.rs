//! Variable names and free-variable sets shared by both term languages.
//!
//! Names are reference-counted strings so that cloning terms is cheap, and
//! free-variable sets are computed once per node and shared the same way.
//! Substitution and plugging rely on these cached sets to skip closed
//! subtrees, which keeps generated wrapper terms (shared, DAG-shaped) from
//! being traversed exponentially often.

use std::collections::BTreeSet;
use std::sync::Arc;

pub type Name = Arc<str>;

pub type FvSet = Arc<BTreeSet<Name>>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

thread_local! {
    static EMPTY: FvSet = Arc::new(BTreeSet::new());
}

pub fn fv_empty() -> FvSet {
    EMPTY.with(|e| e.clone())
}

pub fn fv_single(n: &Name) -> FvSet {
    let mut s = BTreeSet::new();
    s.insert(n.clone());
    Arc::new(s)
}

pub fn fv_union(a: &FvSet, b: &FvSet) -> FvSet {
    if a.is_empty() {
        return b.clone();
    }
    if b.is_empty() {
        return a.clone();
    }
    if a.is_subset(b) {
        return b.clone();
    }
    if b.is_subset(a) {
        return a.clone();
    }
    let mut s: BTreeSet<Name> = (**a).clone();
    s.extend(b.iter().cloned());
    Arc::new(s)
}

pub fn fv_union3(a: &FvSet, b: &FvSet, c: &FvSet) -> FvSet {
    fv_union(&fv_union(a, b), c)
}

/// Removes a bound name from a body's free-variable set.
pub fn fv_without(set: &FvSet, n: &Name) -> FvSet {
    if !set.contains(n) {
        return set.clone();
    }
    let mut s: BTreeSet<Name> = (**set).clone();
    s.remove(n);
    if s.is_empty() {
        fv_empty()
    } else {
        Arc::new(s)
    }
}

/// Picks a name based on `base` that does not satisfy `taken`.
///
/// Tries `base` itself first, then `base'`, `base''`, then numbered
/// variants.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> Name {
    if !taken(base) {
        return name(base);
    }
    for primes in 1..=3 {
        let candidate = format!("{}{}", base, "'".repeat(primes));
        if !taken(&candidate) {
            return Arc::from(candidate);
        }
    }
    for i in 1.. {
        let candidate = format!("{base}_{i}");
        if !taken(&candidate) {
            return Arc::from(candidate);
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_avoids_taken() {
        let taken = ["x", "x'"];
        let got = fresh_name("x", |c| taken.contains(&c));
        assert_eq!(&*got, "x''");
    }

    #[test]
    fn union_shares_empty() {
        let a = fv_empty();
        let b = fv_single(&name("x"));
        let u = fv_union(&a, &b);
        assert!(Arc::ptr_eq(&u, &b));
    }
}
