// SPDX-License-Identifier: Apache-2.0

//! Exact Shapley values, by subsets and by permutations.

use crate::charfun::Game;
use crate::error::{Error, Result};
use crate::featureset::FeatureSet;

use super::report::ScoreReport;
use super::KahanSum;

pub const SUBSETS_MAX_PLAYERS: usize = 20;
pub const PERMUTATIONS_MAX_PLAYERS: usize = 8;

fn check_cap(n: usize, cap: usize, what: &'static str) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded {
            what,
            limit: cap as u128,
            actual: n as u128,
        });
    }
    Ok(())
}

/// `ν` over every subset, indexed by mask. Subsets are visited in Gray-code
/// order so consecutive evaluations differ by one player.
pub fn tabulate<G: Game + ?Sized>(game: &G) -> Result<Vec<f64>> {
    let n = game.players();
    check_cap(n, SUBSETS_MAX_PLAYERS, "players for exact enumeration")?;
    let mut values = vec![0.0; 1 << n];
    let mut s = FeatureSet::empty();
    values[0] = game.value(&s)?;
    for k in 1u64..1 << n {
        let bit = k.trailing_zeros() as usize;
        if s.contains(bit) {
            s.remove(bit);
        } else {
            s.insert(bit);
        }
        let gray = k ^ (k >> 1);
        debug_assert_eq!(s.to_mask(), gray);
        values[gray as usize] = game.value(&s)?;
    }
    Ok(values)
}

/// `ς(s) = s! (n-s-1)! / n!` for `s = 0..n`.
pub fn shapley_weights(n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let mut w = Vec::with_capacity(n);
    w.push(1.0 / n as f64);
    for s in 0..n - 1 {
        let prev = w[s];
        w.push(prev * (s + 1) as f64 / (n - s - 1) as f64);
    }
    w
}

/// `Sc(i) = Σ_{S ⊆ N∖{i}} ς(|S|) Δ_i(S)`.
pub fn shapley_exact_subsets<G: Game + ?Sized>(game: &G) -> Result<ScoreReport> {
    let values = tabulate(game)?;
    let n = game.players();
    let w = shapley_weights(n);
    let scores = (0..n)
        .map(|i| {
            let bit = 1usize << i;
            let mut acc = KahanSum::default();
            for mask in 0..values.len() {
                if mask & bit == 0 {
                    acc.add(w[mask.count_ones() as usize] * (values[mask | bit] - values[mask]));
                }
            }
            acc.total()
        })
        .collect();
    Ok(ScoreReport::exact(game.kind(), scores))
}

/// Average of `Δ_i(Pref(i))` over all `n!` orderings.
pub fn shapley_exact_permutations<G: Game + ?Sized>(game: &G) -> Result<ScoreReport> {
    let n = game.players();
    check_cap(n, PERMUTATIONS_MAX_PLAYERS, "players for permutation enumeration")?;
    let mut acc = vec![KahanSum::default(); n];
    let mut count = 0u64;
    let mut prefix = Vec::with_capacity(n + 1);
    let mut order: Vec<usize> = (0..n).collect();
    let mut visit = |order: &[usize]| -> Result<()> {
        game.prefix_values(order, &mut prefix)?;
        for (k, &i) in order.iter().enumerate() {
            acc[i].add(prefix[k + 1] - prefix[k]);
        }
        count += 1;
        Ok(())
    };
    // Heap's algorithm, iterative
    let mut c = vec![0usize; n];
    visit(&order)?;
    let mut k = 1;
    while k < n {
        if c[k] < k {
            if k % 2 == 0 {
                order.swap(0, k);
            } else {
                order.swap(c[k], k);
            }
            visit(&order)?;
            c[k] += 1;
            k = 1;
        } else {
            c[k] = 0;
            k += 1;
        }
    }
    let scores = acc.iter().map(|a| a.total() / count as f64).collect();
    Ok(ScoreReport::exact(game.kind(), scores))
}
