//! A tower of finite point sets over a two-sorted ground set, a coherent
//! labeling of each set, and truncated compatibility reports for the two
//! canonical finite conditions of the product order built on the labels.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::enumerate::counter_mask;
use crate::error::{Error, Result};
use crate::metrics;
use crate::scheme::Scheme;

use super::TruncatedSet;

/// Levels are usable only while the branching dominates the powerset of
/// two-element subsets of the seam: n_k must exceed 2^(r_k^2).
fn require_spread(s: &Scheme, depth: u64) -> Result<()> {
    for k in 1..depth {
        let r = s.r(k);
        let needed = if r * r >= 127 {
            u128::MAX
        } else {
            (1u128 << (r * r)) + 1
        };
        if (s.n(k) as u128) < needed {
            return Err(Error::TypeTooSmall {
                level: k,
                needed,
                have: s.n(k) as u128,
            });
        }
    }
    Ok(())
}

/// Two-element subsets of `r` in lexicographic order.
fn pairs_below(r: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for x in 0..r {
        for y in x + 1..r {
            out.push((x, y));
        }
    }
    out
}

/// The i-th selected family of two-element seam subsets at level k.
/// Indices 0 and 1 pin the full family; later indices walk the binary
/// counter over the lexicographic pair list, wrapping around.
fn level_subsets(s: &Scheme, k: u64, i: u64) -> Vec<(u64, u64)> {
    let all = pairs_below(s.r(k));
    if i <= 1 {
        return all;
    }
    let mask = counter_mask((i - 1) as u128, all.len() as u32);
    all.iter()
        .enumerate()
        .filter(|(j, _)| mask >> *j & 1 == 1)
        .map(|(_, &p)| p)
        .collect()
}

/// Tower set of alpha truncated below `depth`, together with its
/// labeling. Level-k points are coded `[k, 0, x, y]` for the seam pair
/// (x, y) and `[k, 1, j]` for the j-th slot; the label of every point is
/// an ordinal below alpha.
///
/// A pair point takes the closure element at its first coordinate when
/// the trace index of alpha is 0 and at its second coordinate otherwise;
/// a slot point takes the element seated r_k past its own index.
pub fn indep_coherent(
    s: &Scheme,
    alpha: u64,
    depth: u64,
) -> Result<(TruncatedSet, BTreeMap<Vec<u64>, u64>)> {
    require_spread(s, depth)?;
    let mut t = TruncatedSet::new(depth);
    let mut f = BTreeMap::new();
    for k in 1..depth {
        let xi = metrics::xi(s, alpha, k)?;
        if xi < 0 {
            continue;
        }
        let cl = s.closure(alpha, k)?;
        let els = cl.as_slice();
        let strict = (els.len() - 1) as u64;
        let r = s.r(k);
        for (x, y) in level_subsets(s, k, xi as u64) {
            let p = vec![k, 0, x, y];
            let pos = if xi == 0 { x } else { y };
            f.insert(p.clone(), els[pos as usize]);
            t.points.insert(p);
        }
        for j in 0..strict.saturating_sub(r) {
            let p = vec![k, 1, j];
            f.insert(p.clone(), els[(j + r) as usize]);
            t.points.insert(p);
        }
    }
    Ok((t, f))
}

/// Outcome of a truncated compatibility check. Variant 0 can only be
/// refuted by finitely many levels and variant 1 only confirmed, so
/// `decided` marks exactly the outcomes that deeper levels cannot flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChiReport {
    pub depth: u64,
    pub variant: u8,
    pub holds_below_depth: bool,
    pub decided: bool,
}

/// Evaluates one coordinate of the product order on fibers truncated
/// below `depth`: variant 0 asks the two label fibers, pooled over
/// `sigma`, to be disjoint; variant 1 asks every pair in `sigma` to
/// cross. Members of `sigma` must exceed both targets.
pub fn chi_compatible(
    s: &Scheme,
    sigma: &[u64],
    pair: (u64, u64),
    variant: u8,
    depth: u64,
) -> Result<ChiReport> {
    if variant > 1 {
        return Err(Error::BadInput("the condition variant is 0 or 1".into()));
    }
    let (c0, c1) = pair;
    if c0 == c1 {
        return Err(Error::BadInput(
            "the condition needs two distinct target ordinals".into(),
        ));
    }
    let members: BTreeSet<u64> = sigma.iter().copied().collect();
    if members.is_empty() {
        return Err(Error::BadInput("the condition needs a nonempty index set".into()));
    }
    for &a in &members {
        if a <= c0.max(c1) {
            return Err(Error::BadInput(format!(
                "index {a} does not exceed both targets"
            )));
        }
    }
    let mut lows: Vec<BTreeSet<Vec<u64>>> = Vec::with_capacity(members.len());
    let mut highs: Vec<BTreeSet<Vec<u64>>> = Vec::with_capacity(members.len());
    for &a in &members {
        let (_, f) = indep_coherent(s, a, depth)?;
        let mut low = BTreeSet::new();
        let mut high = BTreeSet::new();
        for (p, &v) in &f {
            if v == c0 {
                low.insert(p.clone());
            } else if v == c1 {
                high.insert(p.clone());
            }
        }
        lows.push(low);
        highs.push(high);
    }
    let holds = match variant {
        0 => {
            let union_low: BTreeSet<&Vec<u64>> = lows.iter().flatten().collect();
            highs.iter().flatten().all(|p| !union_low.contains(p))
        }
        _ => {
            let mut ok = true;
            'outer: for i in 0..members.len() {
                for j in i + 1..members.len() {
                    let cross = lows[i].intersection(&highs[j]).next().is_some()
                        || lows[j].intersection(&highs[i]).next().is_some();
                    if !cross {
                        ok = false;
                        break 'outer;
                    }
                }
            }
            ok
        }
    };
    Ok(ChiReport {
        depth,
        variant,
        holds_below_depth: holds,
        decided: (variant == 0 && !holds) || (variant == 1 && holds),
    })
}
