//! Oscillation colorings and the point families built on top of them: an
//! interval allocator that partitions omega, the cell coloring o and its
//! pattern refinement o*, staircase pretower sets, two families of 0-1
//! points, and the closure neighborhood sets H and C.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::enumerate::pattern_decode;
use crate::error::{Error, Result};
use crate::metrics::{self, DeltaValue};
use crate::ord::FinSet;
use crate::scheme::Scheme;

use super::TruncatedSet;

/// One interval handed to a cell by the allocator: `[lo, hi]` with
/// `hi = 2 * lo + gap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Allocation {
    pub cell: u64,
    pub gap: u64,
    pub lo: u128,
    pub hi: u128,
}

/// Partition of omega into finitely many cells, built so that cell `n`
/// owns an interval `[l, 2l + k]` for every `k` below the bound. The
/// allocation log is kept as the certificate. Points past the last
/// allocation fall into cell 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OmegaPartition {
    bound: u64,
    log: Vec<Allocation>,
}

impl OmegaPartition {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn allocations(&self) -> &[Allocation] {
        &self.log
    }

    /// Cell containing `x`. The log tiles an initial segment of omega
    /// without gaps, so a single partition point decides.
    pub fn cell_of(&self, x: u128) -> u64 {
        let i = self.log.partition_point(|a| a.lo <= x);
        if i == 0 {
            return 0;
        }
        let a = &self.log[i - 1];
        if x <= a.hi {
            a.cell
        } else {
            0
        }
    }

    /// The logged interval certifying cell's gap-k window, if present.
    pub fn certificate(&self, cell: u64, gap: u64) -> Option<&Allocation> {
        self.log.iter().find(|a| a.cell == cell && a.gap == gap)
    }
}

/// Builds the partition by walking the diagonal over (cell, gap) pairs
/// below `cells`, allocating `[l, 2l + gap]` at the running frontier each
/// step. The frontier doubles per allocation, so bounds past 11 leave
/// u128 and report a budget error instead.
pub fn build_osc_partition(cells: u64) -> Result<OmegaPartition> {
    if cells == 0 {
        return Err(Error::BadInput("the partition needs at least one cell".into()));
    }
    let mut log = Vec::with_capacity((cells * cells) as usize);
    let mut frontier: u128 = 0;
    for s in 0..2 * cells - 1 {
        let first = s.saturating_sub(cells - 1);
        for cell in first..=s.min(cells - 1) {
            let gap = s - cell;
            let lo = frontier;
            let hi = lo
                .checked_mul(2)
                .and_then(|t| t.checked_add(gap as u128))
                .ok_or_else(|| Error::ScanBudgetExceeded {
                    detail: format!("allocator frontier left u128 at cell {cell}, gap {gap}"),
                })?;
            log.push(Allocation { cell, gap, lo, hi });
            frontier = hi.checked_add(1).ok_or_else(|| Error::ScanBudgetExceeded {
                detail: format!("allocator frontier left u128 at cell {cell}, gap {gap}"),
            })?;
        }
    }
    Ok(OmegaPartition { bound: cells, log })
}

/// Cell of the oscillation count of a pair. Symmetric in its ordinal
/// arguments; the diagonal is rejected.
pub fn osc_color_o(s: &Scheme, p: &OmegaPartition, alpha: u64, beta: u64) -> Result<u64> {
    if alpha == beta {
        return Err(Error::BadInput(
            "oscillation color needs two distinct ordinals".into(),
        ));
    }
    let (a, b) = if alpha < beta {
        (alpha, beta)
    } else {
        (beta, alpha)
    };
    Ok(p.cell_of(metrics::osc(s, a, b, 0)? as u128))
}

/// Pattern refinement of the cell coloring: decode the pattern map whose
/// index is the plain color, match closure-size prefixes of both points
/// against its domain, and read the table entry (lower point first). A
/// pair whose prefixes miss the map gets 17.
pub fn o_star(s: &Scheme, p: &OmegaPartition, alpha: u64, beta: u64) -> Result<u64> {
    if alpha == beta {
        return Err(Error::BadInput(
            "pattern color needs two distinct ordinals".into(),
        ));
    }
    let (a, b) = if alpha < beta {
        (alpha, beta)
    } else {
        (beta, alpha)
    };
    let n = p.cell_of(metrics::osc(s, a, b, 0)? as u128);
    let pm = pattern_decode(n);
    let depth = pm.xs.iter().map(|x| x.len()).max().unwrap_or(0) as u64;
    let fa = size_prefix(s, a, depth)?;
    let fb = size_prefix(s, b, depth)?;
    match (pm.match_prefix(&fa), pm.match_prefix(&fb)) {
        (Some(i), Some(j)) => Ok(pm.value(i, j)),
        _ => Ok(17),
    }
}

/// Closure sizes of alpha at levels below `depth`. Sizes past u64 cannot
/// equal a pattern entry, so they collapse to u64::MAX.
fn size_prefix(s: &Scheme, alpha: u64, depth: u64) -> Result<Vec<u64>> {
    let mut out = Vec::with_capacity(depth as usize);
    for i in 0..depth {
        let v = metrics::f(s, alpha, i)?;
        out.push(u64::try_from(v).unwrap_or(u64::MAX));
    }
    Ok(out)
}

/// Two-coloring flagging the pairs whose first closure-size disagreement
/// sits exactly at their distance level.
pub fn neg_partition_color(s: &Scheme, alpha: u64, beta: u64) -> Result<u8> {
    if alpha == beta {
        return Err(Error::BadInput(
            "the coloring needs two distinct ordinals".into(),
        ));
    }
    let rho = s.rho(alpha, beta)?;
    Ok(match metrics::delta(s, alpha, beta)? {
        DeltaValue::Finite(d) if d == rho => 1,
        _ => 0,
    })
}

/// Staircase set of the closure-size function of alpha: the points
/// `(n, m)` with `m <= f_alpha(n)`, over levels `n` below `depth`.
pub fn pretower_set(s: &Scheme, alpha: u64, depth: u64) -> Result<TruncatedSet> {
    let mut out = TruncatedSet::new(depth);
    let mut stored: u64 = 0;
    for n in 0..depth {
        let fv = metrics::f(s, alpha, n)?;
        let top = u64::try_from(fv).map_err(|_| Error::SizeOverflow { level: n })?;
        stored = stored.saturating_add(top + 1);
        if stored > s.budget() {
            return Err(Error::LevelTooDeep {
                requested: depth,
                budget: s.budget(),
            });
        }
        for m in 0..=top {
            out.points.insert(vec![n, m]);
        }
    }
    Ok(out)
}

/// Which of the two point families to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    X,
    Y,
}

/// Entry beta of the alpha-th point of the chosen family. The X family
/// reads the pattern color above the diagonal, the Y family below it;
/// both put 1 on the diagonal and 0 on the dead side.
pub fn sspace_point(
    s: &Scheme,
    p: &OmegaPartition,
    alpha: u64,
    beta: u64,
    side: Side,
) -> Result<u8> {
    if alpha == beta {
        return Ok(1);
    }
    let live = match side {
        Side::X => alpha < beta,
        Side::Y => alpha > beta,
    };
    if !live {
        return Ok(0);
    }
    Ok(o_star(s, p, alpha, beta)?.min(1) as u8)
}

/// One layer of the neighborhood set: the members of the strict level-
/// `(l + 1)` closure of beta whose level-`l` closure size matches beta's.
pub fn hset_level(s: &Scheme, beta: u64, l: u64) -> Result<FinSet> {
    if l == 0 {
        return Err(Error::BadInput("neighborhood layers start at level 1".into()));
    }
    let fb = metrics::f(s, beta, l)?;
    let cl = s.closure(beta, l + 1)?;
    let mut keep = Vec::new();
    for a in cl.iter() {
        if a != beta && metrics::f(s, a, l)? == fb {
            keep.push(a);
        }
    }
    Ok(FinSet::from_sorted(keep))
}

/// Union of all neighborhood layers. Once a canonical level swallows
/// beta every smaller ordinal has a full closure there, so layers vanish
/// and the scan stops.
pub fn hset(s: &Scheme, beta: u64) -> Result<FinSet> {
    let mut out = FinSet::empty();
    let mut l = 1u64;
    while s.m(l)? <= beta as u128 {
        out = out.union(&hset_level(s, beta, l)?);
        l += 1;
    }
    Ok(out)
}

/// Comparable rank of a disagreement level, with the diagonal on top.
fn dv(d: DeltaValue) -> u128 {
    match d {
        DeltaValue::Finite(x) => x as u128,
        DeltaValue::Infinite => u128::MAX,
    }
}

/// The recursive neighborhood filter C at `beta`, restricted to members
/// whose disagreement with beta sits at level `k` or above. `beta` itself
/// always qualifies.
pub fn cset(s: &Scheme, beta: u64, k: u64) -> Result<FinSet> {
    let mut memo: BTreeMap<u64, FinSet> = BTreeMap::new();
    let c = cset_full(s, beta, &mut memo)?;
    let mut keep = Vec::new();
    for a in c.iter() {
        if a == beta || dv(metrics::delta(s, a, beta)?) >= k as u128 {
            keep.push(a);
        }
    }
    Ok(FinSet::from_sorted(keep))
}

/// C(beta) proper: beta plus every alpha below it reachable through a
/// unique closest neighbor. Memoized per ordinal; neighbors are smaller,
/// so the recursion is well founded.
fn cset_full(s: &Scheme, beta: u64, memo: &mut BTreeMap<u64, FinSet>) -> Result<FinSet> {
    if let Some(c) = memo.get(&beta) {
        return Ok(c.clone());
    }
    let h = hset(s, beta)?;
    let mut keep: Vec<u64> = Vec::new();
    'cand: for alpha in 0..beta {
        for g in h.iter() {
            if !cset_full(s, g, memo)?.contains(alpha) {
                continue;
            }
            let dg = dv(metrics::delta(s, alpha, g)?);
            let mut strict = true;
            for xi in h.iter().chain(std::iter::once(beta)) {
                if xi != g && dv(metrics::delta(s, alpha, xi)?) >= dg {
                    strict = false;
                    break;
                }
            }
            if strict {
                keep.push(alpha);
                continue 'cand;
            }
        }
    }
    keep.push(beta);
    let c = FinSet::from_sorted(keep);
    memo.insert(beta, c.clone());
    Ok(c)
}

/// Complementary staircase height at one level: the distance from the
/// closure size of alpha up to the full level size.
pub fn bounded_h(s: &Scheme, alpha: u64, i: u64) -> Result<u128> {
    Ok(s.m(i)? - metrics::f(s, alpha, i)?)
}
