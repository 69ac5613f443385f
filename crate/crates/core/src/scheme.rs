//! The scheme engine: materialization, membership, decomposition, closures.
//!
//! Every set of rank k over the universe [0, m_l) is the image of [0, m_k)
//! under a chain of piece embeddings
//!
//!   phi^j_i(y) = y                        for y < r_j,
//!   phi^j_i(y) = r_j + d_j * i + (y-r_j)  otherwise,   d_j = m_{j-1} - r_j,
//!
//! one embedding per level j = k+1 ..= l. The engine therefore never scans:
//! membership, rank, closures and the metric all run by locating the unique
//! piece at each level and relabeling through phi, O(levels * |set|).
//!
//! Materialized level caches are memoized per (rank, universe) pair and
//! accounted against an element budget; exhausting it reports an error
//! instead of thrashing.

use crate::error::{Error, Result};
use crate::ord::FinSet;
use crate::types::TypeSpec;
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

/// Default element budget: two million materialized set-elements.
pub const DEFAULT_BUDGET: u64 = 2_000_000;

/// Environment variable overriding the default budget.
pub const BUDGET_ENV: &str = "SCHEMES_BUDGET";

struct Inner {
    m: Vec<u128>,
    levels: BTreeMap<(u64, u64), Arc<Vec<FinSet>>>,
    used: u64,
}

/// Engine for one type. Cheap to share behind `&`; all mutation is interior
/// memoization guarded by a mutex.
pub struct Scheme {
    spec: TypeSpec,
    budget: u64,
    inner: Mutex<Inner>,
}

/// Result of the level-wise descent of a single ordinal: its position inside
/// the normalized universe at every level, and the piece taken at each step.
#[derive(Debug, Clone)]
pub struct Descent {
    /// Least level whose universe strictly contains the ordinal.
    pub lstar: u64,
    /// pos[j] = position of the ordinal within [0, m_j), for j <= lstar.
    pub pos: Vec<u128>,
    /// piece[j] = piece index used mapping level j to j-1 (None: inside the
    /// root, where every piece embedding is the identity). Index 0 unused.
    pub piece: Vec<Option<u64>>,
}

impl Scheme {
    pub fn new(spec: TypeSpec) -> Self {
        let budget = std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(DEFAULT_BUDGET);
        Self::with_budget(spec, budget)
    }

    pub fn with_budget(spec: TypeSpec, budget: u64) -> Self {
        Scheme {
            spec,
            budget,
            inner: Mutex::new(Inner {
                m: vec![1],
                levels: BTreeMap::new(),
                used: 0,
            }),
        }
    }

    pub fn spec(&self) -> &TypeSpec {
        &self.spec
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// m_k, memoized.
    pub fn m(&self, k: u64) -> Result<u128> {
        let mut inner = self.inner.lock().unwrap();
        if (k as usize) >= inner.m.len() {
            inner.m = self.spec.compute_m(k)?;
        }
        Ok(inner.m[k as usize])
    }

    pub fn n(&self, k: u64) -> u64 {
        self.spec.n(k)
    }

    pub fn r(&self, k: u64) -> u64 {
        self.spec.r(k)
    }

    /// Piece width d_k = m_{k-1} - r_k.
    pub fn d(&self, k: u64) -> Result<u128> {
        Ok(self.m(k - 1)? - self.r(k) as u128)
    }

    /// Least l with m_l > x.
    pub fn level_above(&self, x: u64) -> Result<u64> {
        let mut l = 0;
        while self.m(l)? <= x as u128 {
            l += 1;
            if l > 100_000 {
                return Err(Error::ScanBudgetExceeded {
                    detail: format!("no level above {x}"),
                });
            }
        }
        Ok(l)
    }

    /// phi^j_i applied to a level-(j-1) position.
    pub fn embed(&self, j: u64, i: u64, y: u128) -> Result<u128> {
        let r = self.r(j) as u128;
        if y < r {
            Ok(y)
        } else {
            Ok(r + self.d(j)? * i as u128 + (y - r))
        }
    }

    /// Invert phi at level j: piece index (None inside the root) and the
    /// level-(j-1) position.
    pub fn locate(&self, j: u64, x: u128) -> Result<(Option<u64>, u128)> {
        let r = self.r(j) as u128;
        if x < r {
            return Ok((None, x));
        }
        let d = self.d(j)?;
        let i = (x - r) / d;
        Ok((Some(i as u64), r + (x - r) % d))
    }

    /// Descend `beta` from its least enclosing universe down to level 0.
    pub fn descend(&self, beta: u64) -> Result<Descent> {
        let lstar = self.level_above(beta)?;
        let mut pos = vec![0u128; (lstar + 1) as usize];
        let mut piece = vec![None; (lstar + 1) as usize];
        pos[lstar as usize] = beta as u128;
        for j in (1..=lstar).rev() {
            let (i, y) = self.locate(j, pos[j as usize])?;
            piece[j as usize] = i;
            pos[(j - 1) as usize] = y;
        }
        Ok(Descent { lstar, pos, piece })
    }

    /// |(beta)_k| without materializing the closure.
    pub fn closure_size(&self, beta: u64, k: u64) -> Result<u128> {
        let d = self.descend(beta)?;
        Ok(if k >= d.lstar {
            beta as u128 + 1
        } else {
            d.pos[k as usize] + 1
        })
    }

    /// (beta)_k: the level-k set containing beta, cut at beta (inclusive).
    pub fn closure(&self, beta: u64, k: u64) -> Result<FinSet> {
        let d = self.descend(beta)?;
        if k >= d.lstar {
            return Ok(FinSet::interval(0, beta + 1));
        }
        let size = d.pos[k as usize] + 1;
        if size > self.budget as u128 {
            return Err(Error::LevelTooDeep {
                requested: k,
                budget: self.budget,
            });
        }
        let mut q: Vec<u128> = (0..size).collect();
        for j in k + 1..=d.lstar {
            let i = d.piece[j as usize].unwrap_or(0);
            for v in q.iter_mut() {
                *v = self.embed(j, i, *v)?;
            }
        }
        Ok(FinSet::from_sorted(q.into_iter().map(|v| v as u64).collect()))
    }

    /// (beta)^-_k = (beta)_k minus beta itself.
    pub fn closure_strict(&self, beta: u64, k: u64) -> Result<FinSet> {
        let mut c = self.closure(beta, k)?;
        debug_assert_eq!(c.last(), Some(beta));
        let v = c.as_slice()[..c.len() - 1].to_vec();
        c = FinSet::from_sorted(v);
        Ok(c)
    }

    /// The metric: least k such that some rank-k set contains both.
    /// Computed as the divergence level of the joint descent.
    pub fn rho(&self, a: u64, b: u64) -> Result<u64> {
        if a == b {
            return Ok(0);
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let lstar = self.level_above(hi)?;
        let mut p_lo = lo as u128;
        let mut p_hi = hi as u128;
        for j in (1..=lstar).rev() {
            let (i_hi, y_hi) = self.locate(j, p_hi)?;
            let (i_lo, y_lo) = self.locate(j, p_lo)?;
            match (i_lo, i_hi) {
                (Some(a_), Some(b_)) if a_ != b_ => return Ok(j),
                _ => {
                    p_lo = y_lo;
                    p_hi = y_hi;
                }
            }
        }
        unreachable!("distinct ordinals separate by level 1");
    }

    /// Rank of a member, or an error explaining the failure.
    pub fn rank_of(&self, s: &FinSet) -> Result<u64> {
        if s.is_empty() {
            return Err(Error::NotAMember {
                detail: "empty set".into(),
            });
        }
        let size = s.len() as u128;
        let mut k = 0;
        while self.m(k)? < size {
            k += 1;
        }
        if self.m(k)? != size {
            return Err(Error::NotAMember {
                detail: format!("size {size} is not a level size"),
            });
        }
        let lstar = self.level_above(s.last().unwrap())?;
        let mut q: Vec<u128> = s.iter().map(|x| x as u128).collect();
        for j in (k + 1..=lstar.max(k)).rev() {
            let r = self.r(j) as u128;
            let d = self.d(j)?;
            let mut piece: Option<u128> = None;
            for v in q.iter_mut() {
                if *v < r {
                    continue;
                }
                let i = (*v - r) / d;
                match piece {
                    None => piece = Some(i),
                    Some(p) if p != i => {
                        return Err(Error::NotAMember {
                            detail: format!("set splits across pieces at level {j}"),
                        })
                    }
                    _ => {}
                }
                *v = r + (*v - r) % d;
            }
        }
        let is_identity = q.iter().enumerate().all(|(i, &v)| v == i as u128);
        if is_identity && q.len() as u128 == self.m(k)? {
            Ok(k)
        } else {
            Err(Error::NotAMember {
                detail: "descent does not normalize to an initial segment".into(),
            })
        }
    }

    pub fn is_member(&self, s: &FinSet) -> bool {
        self.rank_of(s).is_ok()
    }

    /// Canonical decomposition of a member of rank >= 1: (root, pieces).
    pub fn decompose(&self, f: &FinSet) -> Result<(FinSet, Vec<FinSet>)> {
        let k = self.rank_of(f)?;
        if k == 0 {
            return Err(Error::BadInput(
                "rank-0 members have no decomposition".into(),
            ));
        }
        let r = self.r(k) as usize;
        let d = self.d(k)? as usize;
        let n = self.n(k) as usize;
        let root = f.select(0..r);
        let mut pieces = Vec::with_capacity(n);
        for i in 0..n {
            let tail = (r + d * i)..(r + d * (i + 1));
            pieces.push(root.union(&f.select(tail)));
        }
        Ok((root, pieces))
    }

    /// Transport s subset of F onto G through the increasing bijection.
    pub fn transport(&self, f: &FinSet, g: &FinSet, s: &FinSet) -> Result<FinSet> {
        let kf = self.rank_of(f)?;
        let kg = self.rank_of(g)?;
        if kf != kg {
            return Err(Error::BadInput(format!(
                "transport between ranks {kf} and {kg}"
            )));
        }
        let positions = s.positions_in(f).ok_or_else(|| Error::BadInput(
            "transport source is not a subset".into(),
        ))?;
        Ok(g.select(positions))
    }

    /// All rank-k members inside the universe [0, m_l), normalized, in
    /// lexicographic order. Memoized.
    pub fn sets_of_rank(&self, k: u64, l: u64) -> Result<Arc<Vec<FinSet>>> {
        if k > l {
            return Ok(Arc::new(Vec::new()));
        }
        if let Some(v) = self.inner.lock().unwrap().levels.get(&(k, l)) {
            return Ok(v.clone());
        }
        let result: Vec<FinSet> = if k == l {
            let size = self.m(k)?;
            if size > self.budget as u128 {
                return Err(Error::LevelTooDeep {
                    requested: l,
                    budget: self.budget,
                });
            }
            vec![FinSet::interval(0, size as u64)]
        } else {
            let below = self.sets_of_rank(k, l - 1)?;
            let mut out: Vec<FinSet> = Vec::new();
            for i in 0..self.n(l) {
                for s in below.iter() {
                    let mapped: Vec<u64> = s
                        .iter()
                        .map(|x| self.embed(l, i, x as u128).map(|v| v as u64))
                        .collect::<Result<_>>()?;
                    out.push(FinSet::from_sorted(mapped));
                }
            }
            out.sort();
            out.dedup();
            out
        };
        let cost: u64 = result.iter().map(|s| s.len() as u64).sum();
        let mut inner = self.inner.lock().unwrap();
        inner.used += cost;
        if inner.used > self.budget {
            return Err(Error::LevelTooDeep {
                requested: l,
                budget: self.budget,
            });
        }
        let arc = Arc::new(result);
        inner.levels.insert((k, l), arc.clone());
        Ok(arc)
    }

    /// Rank-k members contained in [0, n), lexicographically.
    pub fn sets_of_rank_within(&self, k: u64, n: u64) -> Result<Vec<FinSet>> {
        if n == 0 || self.m(k)? > n as u128 {
            return Ok(Vec::new());
        }
        let l = self.level_above(n - 1)?;
        let all = self.sets_of_rank(k, l)?;
        Ok(all
            .iter()
            .filter(|s| s.last().is_some_and(|x| x < n))
            .cloned()
            .collect())
    }

    /// The full finite scheme over [0, m_k): members of every rank <= k.
    pub fn finite_scheme(&self, k: u64) -> Result<Vec<Vec<FinSet>>> {
        (0..=k).map(|j| self.sets_of_rank(j, k).map(|a| (*a).clone())).collect()
    }

    /// Membership of q in the transported scheme over the plain finite set p
    /// (|p| must be a level size).
    pub fn over_set_is_member(&self, p: &FinSet, q: &FinSet) -> Result<bool> {
        let mut k = 0;
        while self.m(k)? < p.len() as u128 {
            k += 1;
        }
        if self.m(k)? != p.len() as u128 {
            return Err(Error::BadInput(format!(
                "|p| = {} is not a level size",
                p.len()
            )));
        }
        let Some(positions) = q.positions_in(p) else {
            return Ok(false);
        };
        let normalized = FinSet::from_sorted(positions.into_iter().map(|i| i as u64).collect());
        // members of the transported scheme are p[G] for G in the finite
        // scheme over [0, m_k)
        Ok(self.rank_of_within(&normalized, k).is_some())
    }

    /// Rank of a normalized position set inside the finite universe [0, m_k).
    pub fn rank_of_within(&self, s: &FinSet, k: u64) -> Option<u64> {
        if s.is_empty() {
            return None;
        }
        if s.last().unwrap() as u128 >= self.m(k).ok()? {
            return None;
        }
        // the descent in rank_of starts from the least enclosing universe,
        // which is <= k here; membership within m_k equals global membership
        self.rank_of(s).ok()
    }

    /// JSON export of one materialized level.
    pub fn level_json(&self, k: u64, l: u64) -> Result<serde_json::Value> {
        let sets = self.sets_of_rank(k, l)?;
        let m = self.m(k)?;
        Ok(serde_json::json!({
            "k": k,
            "m": u64::try_from(m).map_err(|_| Error::SizeOverflow { level: k })?,
            "sets": sets.iter().map(|s| s.as_slice().to_vec()).collect::<Vec<_>>(),
        }))
    }

    /// DOT rendering of the Hasse diagram of the finite scheme over m_k
    /// under inclusion.
    pub fn dot_hasse(&self, k: u64) -> Result<String> {
        let ranks = self.finite_scheme(k)?;
        let all: Vec<(u64, &FinSet)> = ranks
            .iter()
            .enumerate()
            .flat_map(|(j, v)| v.iter().map(move |s| (j as u64, s)))
            .collect();
        let mut out = String::from("digraph scheme {\n  rankdir=BT;\n");
        for (idx, (j, s)) in all.iter().enumerate() {
            out.push_str(&format!(
                "  n{idx} [label=\"{}\", rank{j}=true];\n",
                label_of(s)
            ));
        }
        for (ia, (_, a)) in all.iter().enumerate() {
            for (ib, (_, b)) in all.iter().enumerate() {
                if ia == ib || !a.is_subset_of(b) || a.len() == b.len() {
                    continue;
                }
                let covering = !all.iter().enumerate().any(|(ic, (_, c))| {
                    ic != ia
                        && ic != ib
                        && a.is_subset_of(c)
                        && c.is_subset_of(b)
                        && c.len() > a.len()
                        && c.len() < b.len()
                });
                if covering {
                    out.push_str(&format!("  n{ia} -> n{ib};\n"));
                }
            }
        }
        out.push_str("}\n");
        Ok(out)
    }
}

fn label_of(s: &FinSet) -> String {
    let parts: Vec<String> = s.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> Scheme {
        Scheme::new(TypeSpec::star())
    }

    fn t2() -> Scheme {
        Scheme::new(TypeSpec::binary())
    }

    #[test]
    fn star_level_one_within_four() {
        // level 2 of the star type decomposes {0,1,2,3} into {0,1},{0,2},{0,3}
        let s = star();
        let sets = s.sets_of_rank_within(1, 4).unwrap();
        let want: Vec<FinSet> = [[0, 1], [0, 2], [0, 3]]
            .iter()
            .map(|v| FinSet::new(v.to_vec()))
            .collect();
        assert_eq!(sets, want);
    }

    #[test]
    fn star_decompose_m2() {
        let s = star();
        let top = FinSet::interval(0, 4);
        let (root, pieces) = s.decompose(&top).unwrap();
        assert_eq!(root, FinSet::new(vec![0]));
        assert_eq!(
            pieces,
            vec![
                FinSet::new(vec![0, 1]),
                FinSet::new(vec![0, 2]),
                FinSet::new(vec![0, 3])
            ]
        );
    }

    #[test]
    fn membership_by_descent() {
        let s = star();
        assert_eq!(s.rank_of(&FinSet::new(vec![0, 2])).unwrap(), 1);
        assert!(s.is_member(&FinSet::new(vec![3])));
        assert!(s.is_member(&FinSet::interval(0, 4)));
        assert!(!s.is_member(&FinSet::new(vec![1, 2])));
        assert!(!s.is_member(&FinSet::new(vec![1, 2, 3])));
        assert!(!s.is_member(&FinSet::empty()));
    }

    #[test]
    fn singletons_are_members_everywhere() {
        let s = t2();
        for x in 0..35 {
            assert_eq!(s.rank_of(&FinSet::singleton(x)).unwrap(), 0);
        }
    }

    #[test]
    fn transport_via_positions() {
        let s = star();
        let f = FinSet::new(vec![0, 1]);
        let g = FinSet::new(vec![0, 3]);
        let img = s.transport(&f, &g, &FinSet::new(vec![1])).unwrap();
        assert_eq!(img, FinSet::new(vec![3]));
    }

    #[test]
    fn star_rho_frozen_values() {
        let s = star();
        assert_eq!(s.rho(0, 2).unwrap(), 1);
        assert_eq!(s.rho(1, 2).unwrap(), 2);
        assert_eq!(s.rho(5, 5).unwrap(), 0);
    }

    #[test]
    fn closure_matches_enumerated_sets() {
        // oracle: (beta)_k = F cap [0, beta] for any enumerated F of rank k
        // containing beta
        let s = t2();
        for beta in 0..35u64 {
            for k in 0..=6u64 {
                let cl = s.closure(beta, k).unwrap();
                let families = s.sets_of_rank_within(k, 70).unwrap();
                let witness = families
                    .iter()
                    .find(|f| f.contains(beta))
                    .unwrap_or_else(|| panic!("no rank-{k} set containing {beta}"));
                let expect = witness.below(beta + 1);
                assert_eq!(cl, expect, "beta={beta} k={k}");
            }
        }
    }

    #[test]
    fn closure_well_defined_across_witnesses() {
        let s = t2();
        for beta in 0..19u64 {
            for k in 0..=4u64 {
                let cl = s.closure(beta, k).unwrap();
                for f in s.sets_of_rank_within(k, 35).unwrap() {
                    if f.contains(beta) {
                        assert_eq!(f.below(beta + 1), cl, "witness disagreement");
                    }
                }
            }
        }
    }

    #[test]
    fn rho_agrees_with_enumeration_oracle() {
        let s = star();
        for a in 0..14u64 {
            for b in 0..14u64 {
                if a == b {
                    continue;
                }
                let mut k = 0;
                let oracle = loop {
                    let sets = s.sets_of_rank_within(k, 51).unwrap();
                    if sets.iter().any(|f| f.contains(a) && f.contains(b)) {
                        break k;
                    }
                    k += 1;
                };
                assert_eq!(s.rho(a, b).unwrap(), oracle, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn budget_exhaustion_reports() {
        let s = Scheme::with_budget(TypeSpec::binary(), 10);
        let err = s.sets_of_rank(1, 6).unwrap_err();
        match err {
            Error::LevelTooDeep { budget: 10, .. } => {}
            other => panic!("expected LevelTooDeep, got {other:?}"),
        }
    }

    #[test]
    fn level_json_shape() {
        let s = star();
        let v = s.level_json(1, 2).unwrap();
        assert_eq!(v["k"], 1);
        assert_eq!(v["m"], 2);
        assert_eq!(v["sets"], serde_json::json!([[0, 1], [0, 2], [0, 3]]));
    }

    #[test]
    fn dot_output_contains_cover_edges() {
        let s = star();
        let dot = s.dot_hasse(1).unwrap();
        assert!(dot.contains("digraph"));
        assert!(dot.contains("{0,1}"));
    }

    #[test]
    fn over_set_membership() {
        let s = star();
        let p = FinSet::new(vec![3, 7, 9, 20]);
        // positions {0,2} form a rank-1 member, so {3,9} is one over p
        assert!(s.over_set_is_member(&p, &FinSet::new(vec![3, 9])).unwrap());
        assert!(!s.over_set_is_member(&p, &FinSet::new(vec![7, 9])).unwrap());
        assert!(!s.over_set_is_member(&p, &FinSet::new(vec![3, 5])).unwrap());
    }
}
