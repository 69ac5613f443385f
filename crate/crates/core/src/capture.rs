//! Capturing predicates: a member replicates a finite tuple of sets across
//! its pieces via the increasing piece bijections. Only finite-window
//! decision procedures live here; no claims about uncountable families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{self, DeltaValue};
use crate::ord::FinSet;
use crate::scheme::Scheme;

/// Pieces of a member, uniformly: a rank-0 member counts as its own single
/// piece with empty root, which is what makes singleton families capturable
/// at level 0.
fn pieces_of(s: &Scheme, f: &FinSet) -> Result<(u64, FinSet, Vec<FinSet>)> {
    let k = s.rank_of(f)?;
    if k == 0 {
        return Ok((0, FinSet::empty(), vec![f.clone()]));
    }
    let (root, pieces) = s.decompose(f)?;
    Ok((k, root, pieces))
}

/// Piece capacity at rank k (one piece at rank 0).
fn capacity(s: &Scheme, k: u64) -> u64 {
    if k == 0 {
        1
    } else {
        s.n(k)
    }
}

/// True when f captures the family: the rank's branching is at least the
/// family size, each c_i sits inside piece i and escapes the root, and the
/// increasing bijection from piece 0 to piece i carries c_0 onto c_i.
pub fn captures(s: &Scheme, f: &FinSet, family: &[FinSet]) -> Result<bool> {
    let (k, root, pieces) = pieces_of(s, f)?;
    if (family.len() as u64) > capacity(s, k) {
        return Ok(false);
    }
    for (i, c) in family.iter().enumerate() {
        if !c.is_subset_of(&pieces[i]) || c.minus(&root).is_empty() {
            return Ok(false);
        }
    }
    for (i, c) in family.iter().enumerate().skip(1) {
        if s.transport(&pieces[0], &pieces[i], &family[0])? != *c {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Captures with the family size equal to the branching at f's rank.
pub fn fully_captures(s: &Scheme, f: &FinSet, family: &[FinSet]) -> Result<bool> {
    let k = s.rank_of(f)?;
    if family.len() as u64 != capacity(s, k) {
        return Ok(false);
    }
    captures(s, f, family)
}

/// Independent characterization used as a cross-check: f captures the family
/// exactly when some position set c inside the previous level, escaping the
/// root positions, satisfies family[i] = (piece i)[c] for all i. Returns the
/// witness positions.
pub fn captures_witness(s: &Scheme, f: &FinSet, family: &[FinSet]) -> Result<Option<Vec<u64>>> {
    let (k, _, pieces) = pieces_of(s, f)?;
    if (family.len() as u64) > capacity(s, k) || family.is_empty() {
        return Ok(None);
    }
    let c0 = &family[0];
    let positions = match c0.positions_in(&pieces[0]) {
        Some(p) => p,
        None => return Ok(None),
    };
    let rk = if k == 0 { 0 } else { s.r(k) };
    if positions.iter().all(|&p| (p as u64) < rk) {
        return Ok(None);
    }
    for (i, c) in family.iter().enumerate() {
        if pieces[i].select(positions.iter().copied()) != *c {
            return Ok(None);
        }
    }
    Ok(Some(positions.iter().map(|&p| p as u64).collect()))
}

/// The unique level at which an increasing tuple of ordinals is captured as
/// a family of singletons, when it is: each member's piece trace at the
/// tuple's diameter is its own index, and every pair realizes its diameter
/// at the first size disagreement.
pub fn ordinal_tuple_captured(s: &Scheme, c: &FinSet) -> Result<Option<u64>> {
    if c.is_empty() {
        return Err(Error::BadInput("empty tuple".into()));
    }
    let xs: Vec<u64> = c.iter().collect();
    let l = metrics::rho_diameter(s, &xs)?;
    for (i, &a) in xs.iter().enumerate() {
        if metrics::xi(s, a, l)? != i as i64 {
            return Ok(None);
        }
        for &b in &xs[i + 1..] {
            let rho = s.rho(a, b)?;
            if rho != l || metrics::delta(s, a, b)? != DeltaValue::Finite(l) {
                return Ok(None);
            }
        }
    }
    Ok(Some(l))
}

/// A finite-window scan request.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaptureQuery {
    pub family: Vec<FinSet>,
    /// Tuple size to select from the family.
    pub n: usize,
    /// Restrict levels to this partition cell, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell: Option<(crate::types::PartitionSpec, u64)>,
    /// Levels strictly above this bound; absent means all levels from 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_min: Option<u64>,
    /// Members are confined to [0, window).
    pub window: u64,
}

/// One scan hit: the capturing member, its level, and the selected indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptureHit {
    pub level: u64,
    pub f: FinSet,
    pub indices: Vec<usize>,
}

pub(crate) fn combinations(total: usize, take: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if take > total {
        return out;
    }
    let mut cur: Vec<usize> = (0..take).collect();
    loop {
        out.push(cur.clone());
        // advance to the next lexicographic combination
        let mut i = take;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + total - take {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..take {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Exhaustively list every capture of an n-subset of the family by a member
/// inside the window, in (level, member lex, indices lex) order.
pub fn scan_captured(s: &Scheme, q: &CaptureQuery) -> Result<Vec<CaptureHit>> {
    if q.n == 0 || q.n > q.family.len() {
        return Ok(Vec::new());
    }
    for c in &q.family {
        if c.last().map_or(false, |x| x >= q.window) {
            return Err(Error::BadInput(format!(
                "family member {c} escapes window {}",
                q.window
            )));
        }
    }
    let combos = combinations(q.family.len(), q.n);
    let mut out = Vec::new();
    let mut l = match q.k_min {
        Some(k) => k + 1,
        None => 0,
    };
    while s.m(l)? <= q.window as u128 {
        let in_cell = match &q.cell {
            Some((part, cell)) => part.cell_of(s.spec(), l) == *cell,
            None => true,
        };
        if in_cell {
            for f in s.sets_of_rank_within(l, q.window)?.iter() {
                for combo in &combos {
                    let fam: Vec<FinSet> =
                        combo.iter().map(|&i| q.family[i].clone()).collect();
                    if captures(s, f, &fam)? {
                        out.push(CaptureHit {
                            level: l,
                            f: f.clone(),
                            indices: combo.clone(),
                        });
                    }
                }
            }
        }
        l += 1;
    }
    Ok(out)
}
