//! Subset enumeration helpers shared by the freeness checker and grid scans.

use alloc::vec::Vec;
use core::ops::Range;

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i + 1) as u128,
            None => return u128::MAX,
        };
    }
    acc
}

/// Advances `comb` (strictly increasing indices below `n`) to the next
/// combination in lexicographic order. Returns `false` after the last one.
pub fn next_combination(comb: &mut [u32], n: u32) -> bool {
    let r = comb.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if comb[i] < n - (r - i) as u32 {
            comb[i] += 1;
            for j in i + 1..r {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// The `rank`-th `r`-subset of `0..n` in lexicographic order.
pub fn unrank_combination(n: u32, r: u32, mut rank: u128) -> Vec<u32> {
    let mut out = Vec::with_capacity(r as usize);
    let mut next = 0u32;
    for slot in 0..r {
        let remaining = r - slot - 1;
        loop {
            let with_next = binomial((n - next - 1) as u64, remaining as u64);
            if rank < with_next {
                out.push(next);
                next += 1;
                break;
            }
            rank -= with_next;
            next += 1;
        }
    }
    out
}

/// Next permutation in lexicographic order; `false` when `v` was the last.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Runs independent work over `0..len` split into contiguous ranges and
/// returns the per-range results in range order.
pub trait Partitioner: Sync {
    fn map_ranges<T, F>(&self, len: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<u64>) -> T + Sync;
}

/// Single-range, in-thread execution.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Partitioner for Sequential {
    fn map_ranges<T, F>(&self, len: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<u64>) -> T + Sync,
    {
        alloc::vec![f(0..len)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(54, 2), 1431);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(0, 0), 1);
    }

    #[test]
    fn combinations_match_unranking() {
        let mut comb = alloc::vec![0u32, 1, 2];
        let mut rank = 0u128;
        loop {
            assert_eq!(unrank_combination(7, 3, rank), comb);
            rank += 1;
            if !next_combination(&mut comb, 7) {
                break;
            }
        }
        assert_eq!(rank, binomial(7, 3));
    }

    #[test]
    fn distinct_permutations() {
        let mut v = [1, 2, 2];
        let mut n = 1;
        while next_permutation(&mut v) {
            n += 1;
        }
        assert_eq!(n, 3);
    }
}
