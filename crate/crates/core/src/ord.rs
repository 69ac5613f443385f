//! Finite ordinal sets and the encoding of ordinals below omega*M.
//!
//! Ordinals are packed into a `u64` as `block * OMEGA + offset` where
//! `OMEGA = 2^32`. Block 0 is the ground segment of naturals; higher blocks
//! are the fresh copies of omega stacked on top by the forcing machinery.
//! Integer order on the packed value agrees with ordinal order.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Packed value of the first limit ordinal.
pub const OMEGA: u64 = 1 << 32;

/// Pack `omega * block + offset`.
pub fn ext(block: u64, offset: u64) -> u64 {
    debug_assert!(offset < OMEGA);
    block * OMEGA + offset
}

pub fn block_of(x: u64) -> u64 {
    x / OMEGA
}

pub fn offset_of(x: u64) -> u64 {
    x % OMEGA
}

/// Render an ordinal: naturals plainly, `w` for omega, otherwise `w*b+o`.
pub fn format_ord(x: u64) -> String {
    let (b, o) = (block_of(x), offset_of(x));
    match (b, o) {
        (0, o) => o.to_string(),
        (1, 0) => "w".to_string(),
        (1, o) => format!("w+{o}"),
        (b, 0) => format!("w*{b}"),
        (b, o) => format!("w*{b}+{o}"),
    }
}

/// Parse the forms produced by [`format_ord`].
pub fn parse_ord(s: &str) -> crate::Result<u64> {
    let s = s.trim();
    let bad = || crate::Error::BadInput(format!("cannot parse ordinal {s:?}"));
    if let Ok(n) = s.parse::<u64>() {
        if n >= OMEGA {
            return Err(bad());
        }
        return Ok(n);
    }
    let rest = s.strip_prefix('w').ok_or_else(bad)?;
    let (block, rest) = if let Some(r) = rest.strip_prefix('*') {
        let end = r.find('+').unwrap_or(r.len());
        let b: u64 = r[..end].parse().map_err(|_| bad())?;
        (b, &r[end..])
    } else {
        (1, rest)
    };
    let offset = if rest.is_empty() {
        0
    } else {
        let r = rest.strip_prefix('+').ok_or_else(bad)?;
        r.parse::<u64>().map_err(|_| bad())?
    };
    if offset >= OMEGA || block >= OMEGA {
        return Err(bad());
    }
    Ok(ext(block, offset))
}

/// A finite set of ordinals, kept strictly increasing.
///
/// `Ord` on `FinSet` is lexicographic on the increasing enumeration, which is
/// the canonical listing order used everywhere in the crate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FinSet(Vec<u64>);

impl FinSet {
    pub fn new(mut v: Vec<u64>) -> Self {
        v.sort_unstable();
        v.dedup();
        FinSet(v)
    }

    /// Caller guarantees `v` is strictly increasing.
    pub fn from_sorted(v: Vec<u64>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        FinSet(v)
    }

    pub fn empty() -> Self {
        FinSet(Vec::new())
    }

    pub fn singleton(x: u64) -> Self {
        FinSet(vec![x])
    }

    /// The interval `[lo, lo+len)`.
    pub fn interval(lo: u64, len: u64) -> Self {
        FinSet((lo..lo + len).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// i-th element in increasing order.
    pub fn at(&self, i: usize) -> u64 {
        self.0[i]
    }

    pub fn first(&self) -> Option<u64> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<u64> {
        self.0.last().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn contains(&self, x: u64) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    /// Position of `x` in the increasing enumeration.
    pub fn index_of(&self, x: u64) -> Option<usize> {
        self.0.binary_search(&x).ok()
    }

    /// Number of elements strictly below `x`.
    pub fn count_below(&self, x: u64) -> usize {
        self.0.partition_point(|&y| y < x)
    }

    pub fn is_subset_of(&self, other: &FinSet) -> bool {
        self.0.iter().all(|&x| other.contains(x))
    }

    /// Initial-segment order: `self` is the first `|self|` elements of `other`.
    pub fn is_initial_segment_of(&self, other: &FinSet) -> bool {
        self.len() <= other.len() && self.0[..] == other.0[..self.len()]
    }

    /// Every element of `self` lies strictly below every element of `other`.
    /// Vacuously true when either side is empty.
    pub fn all_below(&self, other: &FinSet) -> bool {
        match (self.last(), other.first()) {
            (Some(a), Some(b)) => a < b,
            _ => true,
        }
    }

    pub fn inter(&self, other: &FinSet) -> FinSet {
        FinSet(self.iter().filter(|&x| other.contains(x)).collect())
    }

    pub fn union(&self, other: &FinSet) -> FinSet {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        FinSet::new(v)
    }

    pub fn minus(&self, other: &FinSet) -> FinSet {
        FinSet(self.iter().filter(|&x| !other.contains(x)).collect())
    }

    /// Elements strictly below `x`.
    pub fn below(&self, x: u64) -> FinSet {
        FinSet(self.0[..self.count_below(x)].to_vec())
    }

    /// Elements `>= x`.
    pub fn from_value(&self, x: u64) -> FinSet {
        FinSet(self.0[self.count_below(x)..].to_vec())
    }

    /// Image under the position map: `{ self(i) : i in positions }`.
    pub fn select<I: IntoIterator<Item = usize>>(&self, positions: I) -> FinSet {
        let v: Vec<u64> = positions.into_iter().map(|i| self.0[i]).collect();
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]) || {
            let mut s = v.clone();
            s.sort_unstable();
            s == v
        });
        FinSet::new(v)
    }

    /// Positions of the elements of `self` inside `sup`; `None` when `self`
    /// is not a subset.
    pub fn positions_in(&self, sup: &FinSet) -> Option<Vec<usize>> {
        self.0.iter().map(|&x| sup.index_of(x)).collect()
    }

    pub fn push_back(&mut self, x: u64) {
        debug_assert!(self.0.last().is_none_or(|&l| l < x));
        self.0.push(x);
    }
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", format_ord(x))?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromIterator<u64> for FinSet {
    fn from_iter<T: IntoIterator<Item = u64>>(iter: T) -> Self {
        FinSet::new(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_respects_order() {
        assert!(ext(0, 5) < OMEGA);
        assert!(OMEGA < ext(1, 1));
        assert!(ext(1, 7) < ext(2, 0));
    }

    #[test]
    fn ord_round_trip() {
        for s in ["0", "17", "w", "w+3", "w*2", "w*2+5"] {
            let x = parse_ord(s).unwrap();
            assert_eq!(format_ord(x), s);
        }
        assert!(parse_ord("q").is_err());
        assert!(parse_ord("w+x").is_err());
    }

    #[test]
    fn initial_segment_and_blocks() {
        let a = FinSet::new(vec![0, 1]);
        let b = FinSet::new(vec![0, 1, 4]);
        let c = FinSet::new(vec![0, 2]);
        assert!(a.is_initial_segment_of(&b));
        assert!(!c.is_initial_segment_of(&b));
        assert!(a.all_below(&FinSet::new(vec![2, 9])));
        assert!(FinSet::empty().all_below(&a));
    }

    #[test]
    fn select_and_positions() {
        let f = FinSet::new(vec![3, 7, 9, 20]);
        assert_eq!(f.select(vec![0, 2]), FinSet::new(vec![3, 9]));
        let sub = FinSet::new(vec![7, 20]);
        assert_eq!(sub.positions_in(&f), Some(vec![1, 3]));
        assert_eq!(FinSet::new(vec![7, 21]).positions_in(&f), None);
    }
}
