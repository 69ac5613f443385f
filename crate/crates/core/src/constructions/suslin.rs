//! Two tree constructions driven by the trace values.
//!
//! The first half labels every pair xi < beta with a bit read off the
//! distance level: a constant rule on one partition cell, a table rule on the
//! other, zero everywhere else.  The resulting family of 0-1 functions is
//! coherent, with the disagreement set controlled by the distance level.
//!
//! The second half grows finite labeled trees rank by rank.  Each rank has a
//! single positional shape; the shape of rank k+1 is produced by repeatedly
//! planting a copy of the rank-k shape on top of the tree built so far, with
//! the seam routed through a maximal good set, then topping the levels up to
//! their full widths and finally raising the splitting factor by one.  A
//! member of rank k names its tree by relabeling the shape's levels with its
//! own elements, so same-rank trees are isomorphic by construction.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::enumerate::counter_mask;
use crate::error::{Error, Result};
use crate::metrics;
use crate::scheme::Scheme;
use crate::types::PartitionSpec;

use super::m64;

/// Enumeration-width bound: each level j <= lvl must satisfy
/// n_j >= 2^(m_{j-1} - r_j) + 1, so the table rule has a row for every index.
fn require_wide(s: &Scheme, lvl: u64) -> Result<()> {
    for j in 1..=lvl {
        let d = s.d(j)?;
        let have = s.n(j) as u128;
        let needed = if d >= 127 {
            u128::MAX
        } else {
            (1u128 << (d as u32)) + 1
        };
        if have < needed {
            return Err(Error::TypeTooSmall {
                level: j,
                needed,
                have,
            });
        }
    }
    Ok(())
}

/// The bit the function at `beta` assigns to `xi`, for xi < beta.  `part`
/// must split the levels into two cells: cell 0 carries the constant rule,
/// cell 1 the table rule.
pub fn coherent_suslin_bit(
    s: &Scheme,
    beta: u64,
    xi: u64,
    part: &PartitionSpec,
) -> Result<u8> {
    if part.cell_count() != 2 {
        return Err(Error::BadInput(format!(
            "the bit family needs a two-cell level partition, got {} cells",
            part.cell_count()
        )));
    }
    if xi >= beta {
        return Err(Error::BadInput(format!(
            "the function at beta={beta} is defined below beta, got xi={xi}"
        )));
    }
    let rho = s.rho(xi, beta)?;
    require_wide(s, rho)?;
    if metrics::xi(s, xi, rho)? != 0 {
        return Ok(0);
    }
    let tb = metrics::xi(s, beta, rho)?;
    let cell = part.cell_of(s.spec(), rho);
    if tb == 1 && cell == 0 {
        return Ok(1);
    }
    if tb > 1 && cell == 1 {
        // the argument sits in the window [r, m) of the distance level, and
        // require_wide keeps the window below 64 bits
        let pos = (metrics::f(s, xi, rho)? - 1) as u64;
        let r = s.r(rho);
        let width = s.d(rho)? as u32;
        let mask = counter_mask(tb as u128, width);
        return Ok(((mask >> (pos - r)) & 1) as u8);
    }
    Ok(0)
}

/// A finite level-labeled tree.  Level l holds the nodes (labels[l], s) for
/// s < widths[l]; ids number nodes level by level.  A parent sits exactly one
/// level down and only level-0 nodes are parentless, so predecessor sets are
/// chains by construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteTree {
    pub labels: Vec<u64>,
    pub widths: Vec<u64>,
    pub parent: Vec<Option<u32>>,
}

impl FiniteTree {
    pub fn height(&self) -> u64 {
        self.widths.len() as u64
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// First id of each level, with the total as a final sentinel.
    pub fn offsets(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.widths.len() + 1);
        let mut acc = 0u64;
        out.push(0);
        for &w in &self.widths {
            acc += w;
            out.push(acc as u32);
        }
        out
    }

    pub fn id(&self, level: u64, pos: u64) -> u32 {
        debug_assert!(pos < self.widths[level as usize]);
        let below: u64 = self.widths[..level as usize].iter().sum();
        (below + pos) as u32
    }

    pub fn level_pos(&self, id: u32) -> (u64, u64) {
        let mut rest = id as u64;
        for (l, &w) in self.widths.iter().enumerate() {
            if rest < w {
                return (l as u64, rest);
            }
            rest -= w;
        }
        panic!("node id {id} out of range");
    }

    /// Level-l ancestor; a node at level l is its own.
    pub fn ancestor(&self, v: u32, l: u64) -> u32 {
        let (lev, _) = self.level_pos(v);
        assert!(lev >= l, "node {v} sits below level {l}");
        let mut cur = v;
        for _ in l..lev {
            cur = self.parent[cur as usize].expect("non-root has a parent");
        }
        cur
    }

    /// Strict tree order: a strictly below b.
    pub fn is_ancestor(&self, a: u32, b: u32) -> bool {
        let (la, _) = self.level_pos(a);
        let (lb, _) = self.level_pos(b);
        la < lb && self.ancestor(b, la) == a
    }

    /// Child lists in id order.
    pub fn children(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.len()];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                out[p as usize].push(v as u32);
            }
        }
        out
    }

    /// Structural invariants: consistent sizes, roots exactly at level 0,
    /// every parent one level down.
    pub fn validate(&self) -> Result<()> {
        if self.labels.len() != self.widths.len() {
            return Err(Error::BadInput(
                "labels and widths disagree in length".into(),
            ));
        }
        let total: u64 = self.widths.iter().sum();
        if total != self.parent.len() as u64 {
            return Err(Error::BadInput(
                "node count disagrees with the level widths".into(),
            ));
        }
        for v in 0..self.len() {
            let (lev, _) = self.level_pos(v as u32);
            match self.parent[v] {
                None => {
                    if lev != 0 {
                        return Err(Error::BadInput(format!(
                            "node {v} at level {lev} has no parent"
                        )));
                    }
                }
                Some(p) => {
                    if p as usize >= self.len() {
                        return Err(Error::BadInput(format!(
                            "parent of node {v} out of range"
                        )));
                    }
                    let (pl, _) = self.level_pos(p);
                    if pl + 1 != lev {
                        return Err(Error::BadInput(format!(
                            "parent of node {v} is not one level down"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Every node below the top level has exactly two immediate successors,
    /// so the maximal nodes are exactly the top level.
    pub fn two_splitting(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        let top = self.height() - 1;
        let ch = self.children();
        (0..self.len()).all(|v| {
            let (lev, _) = self.level_pos(v as u32);
            ch[v].len() == if lev == top { 0 } else { 2 }
        })
    }

    /// Same shape under new level labels.
    pub fn relabel(&self, labels: Vec<u64>) -> FiniteTree {
        assert_eq!(labels.len(), self.labels.len());
        FiniteTree {
            labels,
            widths: self.widths.clone(),
            parent: self.parent.clone(),
        }
    }

    /// GraphViz rendering, child pointing at parent.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tree {\n  rankdir=BT;\n");
        let mut v = 0usize;
        for l in 0..self.widths.len() {
            for p in 0..self.widths[l] {
                out.push_str(&format!(
                    "  n{v} [label=\"({}, {p})\"];\n",
                    self.labels[l]
                ));
                if let Some(q) = self.parent[v] {
                    out.push_str(&format!("  n{v} -> n{q};\n"));
                }
                v += 1;
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Whether every node of `c` sits at level `l` or higher and the level-l
/// ancestors are pairwise distinct.
pub fn l_good(t: &FiniteTree, c: &[u32], l: u64) -> bool {
    let mut seen = BTreeSet::new();
    c.iter().all(|&v| {
        let (lev, _) = t.level_pos(v);
        lev >= l && seen.insert(t.ancestor(v, l))
    })
}

/// All good sets for `l` in increasing node-id bitmask order; the empty set
/// comes first.  Only meant for the small shapes that seed the recursion.
pub fn good_subsets(t: &FiniteTree, l: u64) -> Result<Vec<Vec<u32>>> {
    let n = t.len();
    if n > 24 {
        return Err(Error::ScanBudgetExceeded {
            detail: format!("subset sweep over a {n}-node tree"),
        });
    }
    let mut out = Vec::new();
    for mask in 0u32..1u32 << n {
        let set: Vec<u32> = (0..n as u32).filter(|b| mask >> b & 1 == 1).collect();
        if l_good(t, &set, l) {
            out.push(set);
        }
    }
    Ok(out)
}

/// Plant the part of `graft` from level `l` up on top of `base`.  The trees
/// must agree below `l` (widths and labels) and carry disjoint labels from
/// `l` on.  `branches[s]` is a full root-to-top chain of `base` ids whose
/// part below `l` follows the predecessors of graft node (l, s); the seam
/// node over position s lands directly above that chain's top.
pub fn amalgamate(
    graft: &FiniteTree,
    base: &FiniteTree,
    l: u64,
    branches: &[Vec<u32>],
) -> Result<FiniteTree> {
    if l >= graft.height() || l >= base.height() {
        return Err(Error::BadInput(format!(
            "seam level {l} is not below both heights"
        )));
    }
    let li = l as usize;
    if graft.widths[..li] != base.widths[..li] || graft.labels[..li] != base.labels[..li] {
        return Err(Error::BadInput(
            "the trees disagree below the seam".into(),
        ));
    }
    for ga in &graft.labels[li..] {
        if base.labels[li..].contains(ga) {
            return Err(Error::BadInput(format!(
                "label {ga} appears above the seam on both sides"
            )));
        }
    }
    if branches.len() as u64 != graft.widths[li] {
        return Err(Error::BadInput(format!(
            "need one branch per seam node, got {} for {}",
            branches.len(),
            graft.widths[li]
        )));
    }
    let goff = graft.offsets();
    for (sp, b) in branches.iter().enumerate() {
        if b.len() as u64 != base.height() {
            return Err(Error::BadInput(format!("branch {sp} is not maximal")));
        }
        for (j, &v) in b.iter().enumerate() {
            let (lev, _) = base.level_pos(v);
            if lev != j as u64 {
                return Err(Error::BadInput(format!(
                    "branch {sp} has a level gap at {j}"
                )));
            }
            if j > 0 && base.parent[v as usize] != Some(b[j - 1]) {
                return Err(Error::BadInput(format!(
                    "branch {sp} breaks between levels {} and {j}",
                    j - 1
                )));
            }
        }
        let mut anc = goff[li] + sp as u32;
        for j in (0..li).rev() {
            anc = graft.parent[anc as usize].expect("non-root");
            if b[j] != anc {
                return Err(Error::BadInput(format!(
                    "branch {sp} leaves the shared trunk at level {j}"
                )));
            }
        }
    }
    let mut widths = base.widths.clone();
    widths.extend_from_slice(&graft.widths[li..]);
    let mut labels = base.labels.clone();
    labels.extend_from_slice(&graft.labels[li..]);
    let total: u64 = widths.iter().sum();
    if total > u32::MAX as u64 {
        return Err(Error::SizeOverflow {
            level: widths.len() as u64,
        });
    }
    let mut parent = base.parent.clone();
    // relocated graft levels keep their positions, so only parents move
    let mut new_off: Vec<u32> = Vec::new();
    let mut acc = base.len() as u64;
    for t in li..graft.widths.len() {
        new_off.push(acc as u32);
        acc += graft.widths[t];
    }
    for t in 0..(graft.widths.len() - li) {
        for sp in 0..graft.widths[li + t] {
            let p = if t == 0 {
                *branches[sp as usize].last().expect("branch nonempty")
            } else {
                let gp = graft.parent[(goff[li + t] + sp as u32) as usize]
                    .expect("non-root");
                new_off[t - 1] + (gp - goff[li + t - 1])
            };
            parent.push(Some(p));
        }
    }
    Ok(FiniteTree {
        labels,
        widths,
        parent,
    })
}

// Widen the levels to the target sizes, wiring each added node to the least
// parent that still has an open slot.  Level-0 growth adds roots.  Targets
// double level over level wherever they exceed the current widths, so the
// two-successor discipline comes out exact.
fn extend_to(t: &FiniteTree, target: &[u64]) -> FiniteTree {
    assert_eq!(target.len(), t.widths.len());
    let old_off = t.offsets();
    let mut new_off: Vec<u32> = Vec::with_capacity(target.len() + 1);
    let mut acc = 0u64;
    new_off.push(0);
    for &w in target {
        acc += w;
        new_off.push(acc as u32);
    }
    let mut parent: Vec<Option<u32>> = vec![None; acc as usize];
    let mut counts: Vec<u8> = vec![0; acc as usize];
    for l in 0..target.len() {
        assert!(target[l] >= t.widths[l]);
        for sp in 0..t.widths[l] {
            let v = (new_off[l] as u64 + sp) as usize;
            if let Some(p) = t.parent[(old_off[l] as u64 + sp) as usize] {
                let (pl, pp) = t.level_pos(p);
                let np = new_off[pl as usize] + pp as u32;
                parent[v] = Some(np);
                counts[np as usize] += 1;
            }
        }
        if l > 0 {
            let mut cand = new_off[l - 1];
            for sp in t.widths[l]..target[l] {
                while counts[cand as usize] >= 2 {
                    cand += 1;
                    assert!(cand < new_off[l], "ran out of parent slots");
                }
                let v = (new_off[l] as u64 + sp) as usize;
                parent[v] = Some(cand);
                counts[cand as usize] += 1;
            }
        }
    }
    debug_assert!(counts.iter().all(|&c| c <= 2));
    FiniteTree {
        labels: t.labels.clone(),
        widths: target.to_vec(),
        parent,
    }
}

// One planting round on the way from rank k-1 to rank k: put a copy of the
// little shape on top of `t`, guiding the seam through a maximal good set
// that extends `seed` whenever the seed is good, then fill the new levels to
// the running factor k.
fn grow_step(
    t: &FiniteTree,
    little: &FiniteTree,
    r: u64,
    k: u64,
    seed: Option<&[u32]>,
) -> Result<FiniteTree> {
    let off = t.offsets();
    // level-r ancestors in one sweep; the sentinel marks nodes below r
    let mut anc: Vec<u32> = vec![u32::MAX; t.len()];
    let mut v = 0usize;
    for l in 0..t.widths.len() as u64 {
        for _ in 0..t.widths[l as usize] {
            if l == r {
                anc[v] = v as u32;
            } else if l > r {
                anc[v] = anc[t.parent[v].expect("non-root") as usize];
            }
            v += 1;
        }
    }
    // greedy maximal good set, seeded when the seed qualifies; maximality
    // makes every level-r class contribute exactly one element
    let mut used: BTreeSet<u32> = BTreeSet::new();
    let mut chosen: Vec<u32> = Vec::new();
    if let Some(cs) = seed {
        if l_good(t, cs, r) {
            for &c in cs {
                used.insert(anc[c as usize]);
                chosen.push(c);
            }
        }
    }
    for c in 0..t.len() as u32 {
        if anc[c as usize] != u32::MAX && used.insert(anc[c as usize]) {
            chosen.push(c);
        }
    }
    let mut guide: Vec<u32> = vec![u32::MAX; t.widths[r as usize] as usize];
    for &c in &chosen {
        guide[(anc[c as usize] - off[r as usize]) as usize] = c;
    }
    debug_assert!(guide.iter().all(|&g| g != u32::MAX));
    // the least maximal branch through each guide: forced below, least child
    // above
    let ch = t.children();
    let mut branches: Vec<Vec<u32>> = Vec::with_capacity(guide.len());
    for &g in &guide {
        let mut chain = Vec::new();
        let mut cur = g;
        loop {
            chain.push(cur);
            match t.parent[cur as usize] {
                Some(p) => cur = p,
                None => break,
            }
        }
        chain.reverse();
        let mut cur = g;
        while let Some(&first) = ch[cur as usize].first() {
            chain.push(first);
            cur = first;
        }
        branches.push(chain);
    }
    // the copy's levels from r up land above the current top
    let mut labels = little.labels.clone();
    for (j, lab) in labels.iter_mut().enumerate().skip(r as usize) {
        *lab = t.height() + (j as u64 - r);
    }
    let planted = amalgamate(&little.relabel(labels), t, r, &branches)?;
    let target: Vec<u64> = (0..planted.widths.len() as u64).map(|l| k << l).collect();
    Ok(extend_to(&planted, &target))
}

fn build_rank(s: &Scheme, k: u64) -> Result<FiniteTree> {
    if k == 0 {
        return Ok(FiniteTree {
            labels: vec![0],
            widths: vec![1],
            parent: vec![None],
        });
    }
    let little = build_rank(s, k - 1)?;
    let r = s.r(k);
    // canonical subset enumeration of the little shape: good sets first in
    // mask order, then the rest.  Only goodness matters to a planting round,
    // so the non-good tail never needs materializing.
    let seeds = good_subsets(&little, r)?;
    let pow = 1u128 << little.len();
    let mut t = little.clone();
    for i in 1..s.n(k) {
        let im = (i as u128) % pow;
        let seed = if (im as usize) < seeds.len() {
            Some(seeds[im as usize].as_slice())
        } else {
            None
        };
        t = grow_step(&t, &little, r, k, seed)?;
    }
    // the finished rank gets one more splitting component
    let target: Vec<u64> = (0..t.widths.len() as u64).map(|l| (k + 1) << l).collect();
    Ok(extend_to(&t, &target))
}

/// The positional shape of rank k: labels are the level indices and level l
/// holds (k+1) 2^l nodes.  Fails fast when the type cannot feed the seed
/// enumeration or the finished shape would blow the budget.
pub fn suslin_tree_rank(s: &Scheme, k: u64) -> Result<FiniteTree> {
    for j in 1..=k {
        let m = m64(s, j - 1)?;
        let have = s.n(j) as u128;
        let needed = if m >= 64 {
            u128::MAX
        } else {
            (1u128 << m)
                .checked_mul(m as u128)
                .and_then(|x| x.checked_mul(j as u128))
                .unwrap_or(u128::MAX)
        };
        if have < needed {
            return Err(Error::TypeTooSmall {
                level: j,
                needed,
                have,
            });
        }
    }
    let m = m64(s, k)?;
    let size = if m >= 63 {
        u128::MAX
    } else {
        (k as u128 + 1) * ((1u128 << m) - 1)
    };
    if size > s.budget() as u128 || size > u32::MAX as u128 {
        return Err(Error::LevelTooDeep {
            requested: k,
            budget: s.budget(),
        });
    }
    build_rank(s, k)
}

/// The labeled tree of every rank-k member inside [0, window), keyed by the
/// member's elements.
pub fn full_suslin_levels(
    s: &Scheme,
    k: u64,
    window: u64,
) -> Result<BTreeMap<Vec<u64>, FiniteTree>> {
    let shape = suslin_tree_rank(s, k)?;
    let pieces = s.sets_of_rank_within(k, window)?;
    if (pieces.len() as u128) * (shape.len() as u128) > s.budget() as u128 {
        return Err(Error::LevelTooDeep {
            requested: k,
            budget: s.budget(),
        });
    }
    let mut out = BTreeMap::new();
    for p in pieces {
        let els: Vec<u64> = p.iter().collect();
        out.insert(els.clone(), shape.relabel(els));
    }
    Ok(out)
}
