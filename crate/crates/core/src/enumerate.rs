//! Canonical computable enumerations: Cantor pairing, sequence and set
//! codings, binary-counter subset families, and the pattern-map coding used
//! by the corrected oscillation coloring.
//!
//! Everything here is a total function of its index, so independently built
//! engines agree on every enumerated object.

/// Cantor pairing. Panics on results past u64; use `checked_pair` when the
/// arguments are not known to be small.
pub fn pair(a: u64, b: u64) -> u64 {
    checked_pair(a, b).expect("pair overflow")
}

pub fn checked_pair(a: u64, b: u64) -> Option<u64> {
    let s = a as u128 + b as u128;
    u64::try_from(s * (s + 1) / 2 + b as u128).ok()
}

pub fn unpair(z: u64) -> (u64, u64) {
    let z = z as u128;
    // largest w with w(w+1)/2 <= z
    let mut w = (((8.0 * z as f64 + 1.0).sqrt() - 1.0) / 2.0) as u128;
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    let b = z - w * (w + 1) / 2;
    ((w - b) as u64, b as u64)
}

/// Bijection between naturals and finite sequences: 0 is the empty sequence,
/// c+1 splits as (code of the initial part, last entry). Encoding grows
/// doubly exponentially in length, hence the checked result; decoding is
/// total.
pub fn seq_encode(v: &[u64]) -> Option<u64> {
    let mut code = 0;
    for &x in v {
        code = 1u64.checked_add(checked_pair(code, x)?)?;
    }
    Some(code)
}

pub fn seq_decode(mut code: u64) -> Vec<u64> {
    let mut rev = Vec::new();
    while code > 0 {
        let (rest, last) = unpair(code - 1);
        rev.push(last);
        code = rest;
    }
    rev.reverse();
    rev
}

/// Bijection between naturals and strictly increasing sequences (finite
/// sets), via gap encoding on top of the sequence coding.
pub fn set_encode(sorted: &[u64]) -> Option<u64> {
    debug_assert!(sorted.windows(2).all(|w| w[0] < w[1]));
    let mut gaps = Vec::with_capacity(sorted.len());
    let mut prev = 0;
    for (i, &x) in sorted.iter().enumerate() {
        gaps.push(if i == 0 { x } else { x - prev - 1 });
        prev = x;
    }
    seq_encode(&gaps)
}

pub fn set_decode(code: u64) -> Vec<u64> {
    let gaps = seq_decode(code);
    let mut out = Vec::with_capacity(gaps.len());
    let mut acc = 0u64;
    for (i, &g) in gaps.iter().enumerate() {
        acc = if i == 0 { g } else { acc + 1 + g };
        out.push(acc);
    }
    out
}

/// Subset of `domain` selected by the low bits of `mask` (bit j picks the
/// j-th domain element).
pub fn subset_by_mask(domain: &[u64], mask: u128) -> Vec<u64> {
    domain
        .iter()
        .enumerate()
        .filter(|(j, _)| *j < 128 && mask >> *j & 1 == 1)
        .map(|(_, &x)| x)
        .collect()
}

/// The i-th member (0 < i) of the canonical wrap-around enumeration of all
/// subsets of a d-element domain: bitmask (i-1) mod 2^d.
pub fn counter_mask(i: u128, d: u32) -> u128 {
    debug_assert!(i >= 1);
    if d >= 128 {
        return i - 1;
    }
    (i - 1) % (1u128 << d)
}

/// A finite pattern map: a set X of pairwise extension-incomparable finite
/// sequences plus a value table on X x X. The coding below enumerates all of
/// them; indices decoding to an incomparable-violating X yield the empty map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternMap {
    /// Sorted by sequence code.
    pub xs: Vec<Vec<u64>>,
    /// Row-major: value(i, j) = values[i * xs.len() + j].
    pub values: Vec<u64>,
}

impl PatternMap {
    pub fn value(&self, i: usize, j: usize) -> u64 {
        self.values[i * self.xs.len() + j]
    }

    /// Index of the unique member extended by `f` (as an initial segment),
    /// if any.
    pub fn match_prefix(&self, f: &[u64]) -> Option<usize> {
        self.xs
            .iter()
            .position(|s| s.len() <= f.len() && s[..] == f[..s.len()])
    }
}

fn is_prefix(a: &[u64], b: &[u64]) -> bool {
    a.len() <= b.len() && a[..] == b[..a.len()]
}

pub fn pattern_encode(p: &PatternMap) -> Option<u64> {
    let mut codes = Vec::with_capacity(p.xs.len());
    for s in &p.xs {
        codes.push(seq_encode(s)?);
    }
    codes.sort_unstable();
    checked_pair(set_encode(&codes)?, seq_encode(&p.values)?)
}

pub fn pattern_decode(n: u64) -> PatternMap {
    let (sc, vc) = unpair(n);
    let codes = set_decode(sc);
    let xs: Vec<Vec<u64>> = codes.iter().map(|&c| seq_decode(c)).collect();
    let incomparable = xs
        .iter()
        .enumerate()
        .all(|(i, a)| xs.iter().enumerate().all(|(j, b)| i == j || !is_prefix(a, b)));
    if !incomparable {
        return PatternMap {
            xs: Vec::new(),
            values: Vec::new(),
        };
    }
    let mut values = seq_decode(vc);
    values.resize(xs.len() * xs.len(), 0);
    PatternMap { xs, values }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_bijective_prefix() {
        for z in 0..5_000 {
            let (a, b) = unpair(z);
            assert_eq!(pair(a, b), z);
        }
        assert_eq!(pair(0, 0), 0);
        assert_eq!(pair(1, 0), 1);
        assert_eq!(pair(0, 1), 2);
    }

    #[test]
    fn seq_coding_round_trip() {
        for code in 0..2_000u64 {
            assert_eq!(seq_encode(&seq_decode(code)), Some(code));
        }
        let v = vec![3, 0, 7, 7, 2];
        assert_eq!(seq_decode(seq_encode(&v).unwrap()), v);
        assert_eq!(seq_encode(&[]), Some(0));
    }

    #[test]
    fn set_coding_round_trip() {
        for code in 0..2_000u64 {
            let s = set_decode(code);
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(set_encode(&s), Some(code));
        }
        assert_eq!(set_decode(set_encode(&[2, 5, 6]).unwrap()), vec![2, 5, 6]);
    }

    #[test]
    fn counter_mask_wraps() {
        assert_eq!(counter_mask(1, 2), 0);
        assert_eq!(counter_mask(4, 2), 3);
        assert_eq!(counter_mask(5, 2), 0);
        assert_eq!(subset_by_mask(&[10, 20, 30], 0b101), vec![10, 30]);
    }

    #[test]
    fn pattern_round_trip_and_matching() {
        let p = PatternMap {
            xs: {
                let mut v = vec![vec![1, 2], vec![2]];
                v.sort_by_key(|s| seq_encode(s).unwrap());
                v
            },
            values: vec![3, 0, 0, 1],
        };
        let n = pattern_encode(&p).unwrap();
        let q = pattern_decode(n);
        assert_eq!(p, q);
        let f = vec![1, 2, 9, 9];
        let idx = q.match_prefix(&f).unwrap();
        assert_eq!(q.xs[idx], vec![1, 2]);
        // at most one member matches: {1,2} matched, {2} does not
        assert!(q.xs.iter().filter(|s| is_prefix(s, &f)).count() == 1);
        assert_eq!(q.match_prefix(&[7]), None);
    }

    #[test]
    fn pattern_decode_total_on_prefix() {
        for n in 0..3_000u64 {
            let p = pattern_decode(n);
            assert_eq!(p.values.len(), p.xs.len() * p.xs.len());
            for (i, a) in p.xs.iter().enumerate() {
                for (j, b) in p.xs.iter().enumerate() {
                    assert!(i == j || !is_prefix(a, b), "n={n}");
                }
            }
        }
    }

    #[test]
    fn pattern_decode_rejects_comparable_sets() {
        // X = {(), (5)} has comparable members; its code must decode empty
        let codes = vec![seq_encode(&[]).unwrap(), seq_encode(&[5]).unwrap()];
        let mut sorted = codes.clone();
        sorted.sort_unstable();
        let n = pair(
            set_encode(&sorted).unwrap(),
            seq_encode(&[1, 2, 3, 4]).unwrap(),
        );
        let p = pattern_decode(n);
        assert!(p.xs.is_empty());
    }
}
