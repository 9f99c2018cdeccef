//! Binomial coefficients and colexicographic subset indexing.
//!
//! Node subsets of the flattened grid `[0, K1*K2)` are packed into a `u64`
//! bitmask, which bounds simulated grids at 64 nodes. For a fixed
//! cardinality, ascending bitmask order coincides with colex order, so the
//! rank of a subset is also its position when enumerating masks in
//! increasing numeric order.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest universe that fits in a [`NodeSet`].
pub const MAX_UNIVERSE: usize = 64;

const PASCAL_ROWS: usize = MAX_UNIVERSE + 1;

fn pascal() -> &'static [[u64; PASCAL_ROWS]; PASCAL_ROWS] {
    static TABLE: OnceLock<Box<[[u64; PASCAL_ROWS]; PASCAL_ROWS]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Box::new([[0u64; PASCAL_ROWS]; PASCAL_ROWS]);
        for n in 0..PASCAL_ROWS {
            t[n][0] = 1;
            for k in 1..=n {
                t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0 };
            }
        }
        t
    })
}

/// `C(n, k)` for `n <= 64`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    assert!(n <= MAX_UNIVERSE, "binomial table covers n <= {MAX_UNIVERSE}, got {n}");
    if k > n {
        0
    } else {
        pascal()[n][k]
    }
}

/// Exact `C(n, k)` for arbitrary sizes.
pub fn binomial_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Zero-clamped binomial: negative `n`, negative `k` or `k > n` give 0.
pub fn binomial_clamped(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        BigUint::zero()
    } else {
        binomial_big(n as u64, k as u64)
    }
}

/// The sequence `C(n, k), C(n-1, k), ..., C(n-count+1, k)` with zero clamping,
/// built from one big binomial and cheap ratio steps.
pub fn binomial_column(n: i64, k: i64, count: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(count);
    let mut current = binomial_clamped(n, k);
    for i in 0..count as i64 {
        let top = n - i;
        out.push(current.clone());
        // C(top-1, k) = C(top, k) * (top - k) / top
        if top - 1 < k || top - 1 < 0 || k < 0 {
            current = BigUint::zero();
        } else if top > 0 {
            current = current * BigUint::from((top - k) as u64) / BigUint::from(top as u64);
        }
    }
    out
}

/// A set of flattened node indices packed into a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeSet(pub u64);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn from_indices<I: IntoIterator<Item = usize>>(items: I) -> Self {
        let mut s = NodeSet::EMPTY;
        for i in items {
            s.insert(i);
        }
        s
    }

    #[inline]
    pub fn singleton(i: usize) -> Self {
        debug_assert!(i < MAX_UNIVERSE);
        NodeSet(1u64 << i)
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < MAX_UNIVERSE);
        self.0 |= 1u64 << i;
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        i < MAX_UNIVERSE && self.0 & (1u64 << i) != 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn intersects(self, other: NodeSet) -> bool {
        self.0 & other.0 != 0
    }

    #[inline]
    pub fn without(self, i: usize) -> NodeSet {
        NodeSet(self.0 & !(1u64 << i))
    }

    #[inline]
    pub fn with(self, i: usize) -> NodeSet {
        NodeSet(self.0 | (1u64 << i))
    }

    #[inline]
    pub fn union(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 | other.0)
    }

    #[inline]
    pub fn is_subset_of(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Colex rank among subsets of the same cardinality.
    pub fn rank(self) -> u64 {
        self.iter()
            .enumerate()
            .map(|(pos, elem)| binomial(elem, pos + 1))
            .sum()
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

fn check_universe(universe: usize) -> Result<()> {
    if universe > MAX_UNIVERSE {
        return Err(Error::invalid(format!(
            "universe of {universe} nodes exceeds the {MAX_UNIVERSE}-node simulation limit"
        )));
    }
    Ok(())
}

/// Colex rank of `subset` among the `cardinality`-subsets of `[0, universe)`.
pub fn subset_rank(subset: NodeSet, universe: usize, cardinality: usize) -> Result<u64> {
    check_universe(universe)?;
    if subset.len() != cardinality {
        return Err(Error::invalid(format!(
            "subset has {} elements, expected {cardinality}",
            subset.len()
        )));
    }
    if universe < MAX_UNIVERSE && subset.0 >> universe != 0 {
        return Err(Error::invalid(format!("subset {subset:?} is not inside [0, {universe})")));
    }
    Ok(subset.rank())
}

/// Inverse of [`subset_rank`].
pub fn subset_unrank(rank: u64, universe: usize, cardinality: usize) -> Result<NodeSet> {
    check_universe(universe)?;
    let total = binomial(universe, cardinality);
    if rank >= total {
        return Err(Error::invalid(format!(
            "rank {rank} out of range for C({universe}, {cardinality}) = {total}"
        )));
    }
    let mut remaining = rank;
    let mut set = NodeSet::EMPTY;
    let mut upper = universe;
    for pos in (1..=cardinality).rev() {
        // largest element c < upper with C(c, pos) <= remaining
        let mut c = upper - 1;
        while binomial(c, pos) > remaining {
            c -= 1;
        }
        set.insert(c);
        remaining -= binomial(c, pos);
        upper = c;
    }
    Ok(set)
}

/// All `k`-subsets of `[0, n)` in colex order (Gosper's hack).
pub fn k_subsets(n: usize, k: usize) -> KSubsets {
    assert!(n <= MAX_UNIVERSE);
    let next = if k > n {
        None
    } else if k == 0 {
        Some(0)
    } else if k == 64 {
        Some(u64::MAX)
    } else {
        Some((1u64 << k) - 1)
    };
    KSubsets { n, next }
}

pub struct KSubsets {
    n: usize,
    next: Option<u64>,
}

impl Iterator for KSubsets {
    type Item = NodeSet;

    fn next(&mut self) -> Option<NodeSet> {
        let current = self.next?;
        self.next = if current == 0 {
            None
        } else {
            let c = current & current.wrapping_neg();
            let r = current.checked_add(c);
            match r {
                None => None,
                Some(r) => {
                    let next = (((r ^ current) >> 2) / c) | r;
                    if self.n < 64 && next >> self.n != 0 {
                        None
                    } else {
                        Some(next)
                    }
                }
            }
        };
        Some(NodeSet(current))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pascal_matches_multiplicative_formula() {
        for n in 0..=40usize {
            for k in 0..=n {
                assert_eq!(BigUint::from(binomial(n, k)), binomial_big(n as u64, k as u64));
            }
        }
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534);
    }

    #[test]
    fn clamped_binomials_vanish_out_of_range() {
        assert!(binomial_clamped(-1, 2).is_zero());
        assert!(binomial_clamped(3, 4).is_zero());
        assert!(binomial_clamped(3, -1).is_zero());
        assert_eq!(binomial_clamped(0, 0), BigUint::one());
    }

    #[test]
    fn binomial_column_steps_down() {
        let col = binomial_column(9, 2, 10);
        let expected: Vec<u64> = vec![36, 28, 21, 15, 10, 6, 3, 1, 0, 0];
        assert_eq!(col, expected.into_iter().map(BigUint::from).collect::<Vec<_>>());
        let col = binomial_column(4, 0, 6);
        let expected: Vec<u64> = vec![1, 1, 1, 1, 1, 0];
        assert_eq!(col, expected.into_iter().map(BigUint::from).collect::<Vec<_>>());
    }

    #[test]
    fn rank_of_empty_and_minimal_subsets() {
        assert_eq!(subset_rank(NodeSet::EMPTY, 9, 0).unwrap(), 0);
        assert_eq!(subset_rank(NodeSet::from_indices([0, 1]), 9, 2).unwrap(), 0);
    }

    #[test]
    fn rank_unrank_is_a_bijection_on_9_choose_3() {
        let all: Vec<NodeSet> = k_subsets(9, 3).collect();
        assert_eq!(all.len(), 84);
        for (i, s) in all.iter().enumerate() {
            assert_eq!(subset_rank(*s, 9, 3).unwrap(), i as u64);
            assert_eq!(subset_unrank(i as u64, 9, 3).unwrap(), *s);
        }
    }

    #[test]
    fn unrank_rejects_out_of_range() {
        assert!(matches!(subset_unrank(84, 9, 3), Err(Error::InvalidParameter(_))));
        assert!(subset_rank(NodeSet::from_indices([0, 9]), 9, 2).is_err());
        assert!(subset_rank(NodeSet::from_indices([0, 1]), 9, 3).is_err());
    }

    #[test]
    fn enumeration_edge_cases() {
        assert_eq!(k_subsets(5, 0).collect::<Vec<_>>(), vec![NodeSet::EMPTY]);
        assert_eq!(k_subsets(5, 5).count(), 1);
        assert_eq!(k_subsets(5, 6).count(), 0);
        assert_eq!(k_subsets(64, 1).count(), 64);
        assert_eq!(k_subsets(64, 63).count(), 64);
    }
}
