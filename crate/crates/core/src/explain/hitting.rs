// SPDX-License-Identifier: Apache-2.0

//! Exhaustive enumeration of subset-minimal sets satisfying a monotone
//! predicate, by increasing cardinality.

use crate::error::{Error, Result};
use crate::featureset::FeatureSet;

/// Largest universe the exhaustive enumerators accept.
pub const DEFAULT_SUBSET_CAP: usize = 20;

/// All subset-minimal `S ⊆ universe` with `pred(S)`, for an upward-closed
/// `pred`. Sets are returned in cardinality-then-lexicographic order.
pub fn minimal_satisfying<P>(universe: &[usize], cap: usize, mut pred: P) -> Result<Vec<FeatureSet>>
where
    P: FnMut(&FeatureSet) -> bool,
{
    let n = universe.len();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "subset enumeration universe",
            limit: cap as u128,
            actual: n as u128,
        });
    }
    let mut found_masks: Vec<u64> = Vec::new();
    let mut found = Vec::new();
    for k in 0..=n {
        for mask in combinations(n, k) {
            if found_masks.iter().any(|&f| f & !mask == 0) {
                continue;
            }
            let s: FeatureSet = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| universe[b]).collect();
            if pred(&s) {
                found_masks.push(mask);
                found.push(s);
            }
        }
    }
    found.sort();
    Ok(found)
}

/// Minimal hitting sets of `family`. An empty family yields `{∅}`; a family
/// containing `∅` yields nothing.
pub fn minimal_hitting_sets(family: &[FeatureSet], cap: usize) -> Result<Vec<FeatureSet>> {
    let mut universe: Vec<usize> = family
        .iter()
        .fold(FeatureSet::empty(), |acc, s| acc.union(s))
        .iter()
        .collect();
    universe.sort_unstable();
    minimal_satisfying(&universe, cap, |h| family.iter().all(|s| s.intersects(h)))
}

/// Subset-minimal members of `sets`, deduplicated and sorted.
pub fn minimal_elements(sets: impl IntoIterator<Item = FeatureSet>) -> Vec<FeatureSet> {
    let mut all: Vec<FeatureSet> = sets.into_iter().collect();
    all.sort();
    all.dedup();
    let mut kept: Vec<FeatureSet> = Vec::new();
    for s in all {
        if !kept.iter().any(|k| k.is_subset(&s)) {
            kept.push(s);
        }
    }
    kept
}

/// `k`-subsets of `{0..n}` as masks, in increasing numeric order (Gosper).
fn combinations(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let limit = 1u64 << n;
    let mut next = if k == 0 {
        Some(0)
    } else if k > n {
        None
    } else {
        Some((1u64 << k) - 1)
    };
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let succ = (((r ^ cur) >> 2) / c) | r;
            (succ < limit).then_some(succ)
        };
        Some(cur)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(v: &[usize]) -> FeatureSet {
        v.iter().copied().collect()
    }

    #[test]
    fn combinations_counts() {
        for n in 0..8 {
            for k in 0..=n {
                let v: Vec<u64> = combinations(n, k).collect();
                assert!(v.iter().all(|m| m.count_ones() as usize == k && *m < 1 << n));
                let binom = (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1));
                assert_eq!(v.len() as u64, binom, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn hitting_set_examples() {
        assert_eq!(minimal_hitting_sets(&[fs(&[0]), fs(&[2])], 20).unwrap(), vec![fs(&[0, 2])]);
        assert_eq!(minimal_hitting_sets(&[fs(&[0, 1])], 20).unwrap(), vec![fs(&[0]), fs(&[1])]);
        assert_eq!(minimal_hitting_sets(&[], 20).unwrap(), vec![FeatureSet::empty()]);
        assert!(minimal_hitting_sets(&[FeatureSet::empty()], 20).unwrap().is_empty());
    }

    #[test]
    fn cap_is_enforced() {
        let wide: FeatureSet = (0..21).collect();
        assert!(matches!(
            minimal_hitting_sets(&[wide], 20),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn minimal_elements_drops_supersets() {
        let got = minimal_elements([fs(&[0, 1]), fs(&[0]), fs(&[2]), fs(&[0, 1, 2]), fs(&[2])]);
        assert_eq!(got, vec![fs(&[0]), fs(&[2])]);
    }
}
