// SPDX-License-Identifier: Apache-2.0

//! Sets of features as word-packed bitsets.
//!
//! Features are 0-based inside the library. Everything user-facing (display,
//! JSON, CLI literals) is 1-based, via [`FeatureSet::to_one_based`] and
//! [`FeatureSet::from_one_based`].

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// A subset of `{0, .., m-1}`.
///
/// Trailing zero words are never stored, so structural equality and hashing
/// coincide with set equality regardless of how the set was built.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct FeatureSet {
    words: Vec<u64>,
}

impl FeatureSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `{0, .., m-1}`.
    pub fn full(m: usize) -> Self {
        let mut s = Self::empty();
        for i in 0..m {
            s.insert(i);
        }
        s
    }

    pub fn singleton(i: usize) -> Self {
        let mut s = Self::empty();
        s.insert(i);
        s
    }

    /// Set whose members are the set bits of `mask`.
    pub fn from_mask(mask: u64) -> Self {
        let mut s = Self { words: vec![mask] };
        s.trim();
        s
    }

    /// Low 64 bits as a mask. Only meaningful when every member is `< 64`.
    pub fn to_mask(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    /// Builds a set of 0-based features, checking every index against `m`.
    pub fn from_indices(indices: impl IntoIterator<Item = usize>, m: usize) -> Result<Self> {
        let mut s = Self::empty();
        for i in indices {
            if i >= m {
                return Err(Error::FeatureOutOfRange {
                    index: i,
                    features: m,
                });
            }
            s.insert(i);
        }
        Ok(s)
    }

    /// Builds a set from 1-based feature numbers.
    pub fn from_one_based(numbers: impl IntoIterator<Item = usize>, m: usize) -> Result<Self> {
        let mut s = Self::empty();
        for k in numbers {
            if k == 0 || k > m {
                return Err(Error::FeatureOutOfRange {
                    index: k,
                    features: m,
                });
            }
            s.insert(k - 1);
        }
        Ok(s)
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    pub fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / WORD, i % WORD);
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        let had = self.words[w] & (1 << b) != 0;
        self.words[w] |= 1 << b;
        !had
    }

    pub fn remove(&mut self, i: usize) -> bool {
        let (w, b) = (i / WORD, i % WORD);
        if w >= self.words.len() {
            return false;
        }
        let had = self.words[w] & (1 << b) != 0;
        self.words[w] &= !(1 << b);
        self.trim();
        had
    }

    pub fn contains(&self, i: usize) -> bool {
        let (w, b) = (i / WORD, i % WORD);
        self.words.get(w).is_some_and(|x| x & (1 << b) != 0)
    }

    pub fn with(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.insert(i);
        s
    }

    pub fn without(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.remove(i);
        s
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Largest member plus one, or 0 for the empty set.
    pub fn bound(&self) -> usize {
        match self.words.last() {
            None => 0,
            Some(&w) => (self.words.len() - 1) * WORD + (WORD - w.leading_zeros() as usize),
        }
    }

    pub fn is_subset(&self, other: &FeatureSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(k, &w)| w & !other.words.get(k).copied().unwrap_or(0) == 0)
    }

    pub fn intersects(&self, other: &FeatureSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .any(|(a, b)| a & b != 0)
    }

    pub fn union(&self, other: &FeatureSet) -> FeatureSet {
        let n = self.words.len().max(other.words.len());
        let words = (0..n)
            .map(|k| self.words.get(k).copied().unwrap_or(0) | other.words.get(k).copied().unwrap_or(0))
            .collect();
        FeatureSet { words }
    }

    pub fn intersection(&self, other: &FeatureSet) -> FeatureSet {
        let mut s = FeatureSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        };
        s.trim();
        s
    }

    pub fn difference(&self, other: &FeatureSet) -> FeatureSet {
        let mut s = FeatureSet {
            words: self
                .words
                .iter()
                .enumerate()
                .map(|(k, &w)| w & !other.words.get(k).copied().unwrap_or(0))
                .collect(),
        };
        s.trim();
        s
    }

    /// Complement relative to `{0, .., m-1}`.
    pub fn complement(&self, m: usize) -> FeatureSet {
        FeatureSet::full(m).difference(self)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(k * WORD + b)
            })
        })
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl FromIterator<usize> for FeatureSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = FeatureSet::empty();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

/// Orders by cardinality first, then lexicographically on the ascending
/// member list. This is the order enumeration results are reported in.
impl Ord for FeatureSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for FeatureSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// 1-based, e.g. `{1,3}`.
impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
