//! A lower semi-lattice of finite point sets, closed under intersection.
//!
//! Points are triples (layer, height, stick).  Layer 0 is the single point
//! (0, 0, 0); layer k holds 2^(k-1) sticks of height m_k.  Rank k of the
//! family assigns a set S[k, (a, b)] to every pair
//! a < m_k, b < 2^k, built by a quadrant recursion: the old sets survive
//! unchanged, new sticks enter as initial segments, and the middle quadrant
//! merges an old set with the full-height layer sticks coded by its rank-r
//! subsets.  Ordinal inputs enter through the trace: the set attached to
//! (alpha, b) at depth k is S[k, (c, b)] where c counts the strict closure.
//!
//! Only binary types keep the middle quadrant aligned with the trace, so
//! everything here insists on one.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::metrics;
use crate::scheme::Scheme;

use super::{m64, require_binary, TruncatedSet};

/// (layer, height, stick)
pub type LatticePoint = (u64, u64, u64);

pub type LevelFamily = BTreeMap<(u64, u64), BTreeSet<LatticePoint>>;

// Families for every rank up to and including `k`, gated by the point budget.
fn build_levels(s: &Scheme, k: u64) -> Result<Vec<LevelFamily>> {
    require_binary(s)?;
    if k >= 63 {
        return Err(Error::LevelTooDeep {
            requested: k,
            budget: s.budget(),
        });
    }
    let budget = s.budget() as u128;
    let mut stored: u128 = 0;
    let charge = |set: &BTreeSet<LatticePoint>, stored: &mut u128| -> Result<()> {
        *stored += set.len() as u128;
        if *stored > budget {
            Err(Error::LevelTooDeep {
                requested: k,
                budget: s.budget(),
            })
        } else {
            Ok(())
        }
    };
    let mut levels: Vec<LevelFamily> = Vec::with_capacity(k as usize + 1);
    let mut base = LevelFamily::new();
    base.insert((0, 0), BTreeSet::from([(0, 0, 0)]));
    stored += 1;
    levels.push(base);
    for j in 0..k {
        let prev = &levels[j as usize];
        let m0 = m64(s, j)?;
        let m1 = m64(s, j + 1)?;
        let r = s.r(j + 1);
        let pow = 1u64 << j;
        let mut next = LevelFamily::new();
        // old quadrant: sets survive as they are
        for (x, set) in prev {
            charge(set, &mut stored)?;
            next.insert(*x, set.clone());
        }
        // new sticks: initial segments of the fresh layer
        for a in 0..m1 {
            for b in pow..2 * pow {
                let set: BTreeSet<LatticePoint> =
                    (0..=a).map(|h| (j + 1, h, b - pow)).collect();
                charge(&set, &mut stored)?;
                next.insert((a, b), set);
            }
        }
        // middle quadrant: an old set joined with the full-height sticks
        // coded by the rank-r sets below it
        for a in m0..m1 {
            for b in 0..pow {
                let z = (a - (m0 - r), b);
                let sz = &prev[&z];
                let mut set = sz.clone();
                for b2 in 0..pow {
                    if prev[&(r, b2)].is_subset(sz) {
                        for h in 0..m0 {
                            set.insert((j + 1, h, b2));
                        }
                    }
                }
                charge(&set, &mut stored)?;
                next.insert((a, b), set);
            }
        }
        levels.push(next);
    }
    Ok(levels)
}

/// The rank-k family: a point set for every pair in m_k x 2^k.
pub fn lattice_level(s: &Scheme, k: u64) -> Result<LevelFamily> {
    Ok(build_levels(s, k)?.pop().expect("at least the base rank"))
}

/// The set attached to the pair (alpha, b), truncated at rank `depth`.
/// Empty whenever 2^depth <= b: the pair has not entered the recursion yet.
pub fn lattice_point(s: &Scheme, alpha: u64, b: u64, depth: u64) -> Result<TruncatedSet> {
    require_binary(s)?;
    let mut out = TruncatedSet::new(depth);
    if depth >= 63 {
        return Err(Error::LevelTooDeep {
            requested: depth,
            budget: s.budget(),
        });
    }
    if 1u64 << depth <= b {
        return Ok(out);
    }
    let family = lattice_level(s, depth)?;
    let a = (metrics::f(s, alpha, depth)? - 1) as u64;
    for &(l, h, st) in &family[&(a, b)] {
        out.points.insert(vec![l, h, st]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::TypeSpec;

    fn sch() -> Scheme {
        Scheme::new(TypeSpec::binary())
    }

    type Fam = LevelFamily;

    // restriction to the layers up to k, the ambient set of rank k
    fn cut(set: &BTreeSet<LatticePoint>, k: u64) -> BTreeSet<LatticePoint> {
        set.iter().copied().filter(|p| p.0 <= k).collect()
    }

    fn phi(s: &Scheme, j: u64, x: (u64, u64)) -> (u64, u64) {
        let m0 = m64(s, j).unwrap();
        let r = s.r(j + 1);
        if x.0 < r {
            x
        } else {
            (x.0 + (m0 - r), x.1)
        }
    }

    // well-founded rank inside the family: empty set at 0
    fn ranks(fam: &Fam) -> BTreeMap<BTreeSet<LatticePoint>, u64> {
        let uniq: BTreeSet<BTreeSet<LatticePoint>> = fam.values().cloned().collect();
        let mut sets: Vec<BTreeSet<LatticePoint>> = uniq.into_iter().collect();
        sets.sort_by_key(|s| s.len());
        let mut out: BTreeMap<BTreeSet<LatticePoint>, u64> = BTreeMap::new();
        out.insert(BTreeSet::new(), 0);
        for s in sets {
            let r = out
                .iter()
                .filter(|(t, _)| t.is_subset(&s) && **t != s)
                .map(|(_, r)| r + 1)
                .max()
                .unwrap_or(0);
            out.insert(s, r);
        }
        out
    }

    #[test]
    fn binary_type_required() {
        let star = Scheme::new(TypeSpec::star());
        assert!(matches!(
            lattice_level(&star, 2),
            Err(Error::NonBinaryType { .. })
        ));
        assert!(matches!(
            lattice_point(&star, 5, 0, 2),
            Err(Error::NonBinaryType { .. })
        ));
    }

    #[test]
    fn first_ranks_frozen() {
        let s = sch();
        let f1 = lattice_level(&s, 1).unwrap();
        assert_eq!(f1.len(), 4);
        let set = |pts: &[LatticePoint]| pts.iter().copied().collect::<BTreeSet<_>>();
        assert_eq!(f1[&(0, 0)], set(&[(0, 0, 0)]));
        assert_eq!(f1[&(1, 0)], set(&[(0, 0, 0), (1, 0, 0)]));
        assert_eq!(f1[&(0, 1)], set(&[(1, 0, 0)]));
        assert_eq!(f1[&(1, 1)], set(&[(1, 0, 0), (1, 1, 0)]));
        let f2 = lattice_level(&s, 2).unwrap();
        assert_eq!(f2.len(), 12);
        assert_eq!(f2[&(2, 0)], set(&[(0, 0, 0), (1, 0, 0), (2, 0, 0), (2, 1, 0)]));
        assert_eq!(f2[&(2, 1)], set(&[(1, 0, 0), (1, 1, 0), (2, 0, 1), (2, 1, 1)]));
    }

    #[test]
    fn families_are_semilattices() {
        let s = sch();
        for k in 0..=3u64 {
            let fam = lattice_level(&s, k).unwrap();
            let known: BTreeSet<&BTreeSet<LatticePoint>> = fam.values().collect();
            for a in fam.values() {
                for b in fam.values() {
                    let i: BTreeSet<LatticePoint> = a.intersection(b).copied().collect();
                    assert!(
                        i.is_empty() || known.contains(&i),
                        "rank {k}: intersection escapes the family"
                    );
                }
            }
        }
    }

    #[test]
    fn ranks_follow_first_coordinates() {
        let s = sch();
        for k in 0..=3u64 {
            let fam = lattice_level(&s, k).unwrap();
            let rk = ranks(&fam);
            for (x, set) in &fam {
                assert_eq!(rk[set], x.0 + 1, "rank {k}, pair {x:?}");
            }
        }
    }

    #[test]
    fn levels_nest_and_restrict() {
        let s = sch();
        let levels = build_levels(&s, 4).unwrap();
        for j in 0..4usize {
            let (cur, nxt) = (&levels[j], &levels[j + 1]);
            for (x, set) in cur {
                assert_eq!(&nxt[x], set, "rank {j}, pair {x:?} changed");
                let up = &nxt[&phi(&s, j as u64, *x)];
                assert_eq!(&cut(up, j as u64), set, "rank {j}, pair {x:?} cut");
                assert!(set.is_subset(up));
            }
        }
    }

    #[test]
    fn phi_embeds_each_level() {
        let s = sch();
        let levels = build_levels(&s, 4).unwrap();
        for j in 0..4usize {
            let (cur, nxt) = (&levels[j], &levels[j + 1]);
            // the set-level map is single-valued even with repeated values
            let mut map: BTreeMap<&BTreeSet<LatticePoint>, &BTreeSet<LatticePoint>> =
                BTreeMap::new();
            for (x, set) in cur {
                let img = &nxt[&phi(&s, j as u64, *x)];
                if let Some(old) = map.insert(set, img) {
                    assert_eq!(old, img, "rank {j}: image depends on the index");
                }
            }
            for (a, ia) in &map {
                for (b, ib) in &map {
                    assert_eq!(a.is_subset(b), ia.is_subset(ib), "rank {j}");
                    let down: BTreeSet<LatticePoint> =
                        a.intersection(b).copied().collect();
                    let up: BTreeSet<LatticePoint> =
                        ia.intersection(ib).copied().collect();
                    if let Some(id) = map.get(&down) {
                        assert_eq!(**id, up, "rank {j}: intersections drift");
                    } else {
                        assert!(down.is_empty());
                        assert!(up.is_empty(), "rank {j}: empty meet grows");
                    }
                }
            }
        }
    }

    #[test]
    fn intersection_case_analysis() {
        let s = sch();
        let levels = build_levels(&s, 4).unwrap();
        for j in 0..4usize {
            let (cur, nxt) = (&levels[j], &levels[j + 1]);
            let m0 = m64(&s, j as u64).unwrap();
            let r = s.r(j as u64 + 1);
            let pow = 1u64 << j;
            let dset = |x: (u64, u64)| -> BTreeSet<u64> {
                let z = (x.0 - (m0 - r), x.1);
                (0..pow)
                    .filter(|b2| cur[&(r, *b2)].is_subset(&cur[&z]))
                    .collect()
            };
            let quadrant = |x: (u64, u64)| {
                if x.1 >= pow {
                    2
                } else if x.0 >= m0 {
                    1
                } else {
                    0
                }
            };
            let known: BTreeSet<&BTreeSet<LatticePoint>> = cur.values().collect();
            for (x, sx) in nxt {
                for (y, sy) in nxt {
                    let i: BTreeSet<LatticePoint> = sx.intersection(sy).copied().collect();
                    let (x, y) = if quadrant(*x) <= quadrant(*y) {
                        (*x, *y)
                    } else {
                        (*y, *x)
                    };
                    match (quadrant(x), quadrant(y)) {
                        (0, 0) => assert!(i.is_empty() || known.contains(&i)),
                        (0, 1) => {
                            let z = (y.0 - (m0 - r), y.1);
                            let want: BTreeSet<LatticePoint> =
                                cur[&x].intersection(&cur[&z]).copied().collect();
                            assert_eq!(i, want);
                        }
                        (0, 2) => assert!(i.is_empty()),
                        (1, 1) => {
                            let (dx, dy) = (dset(x), dset(y));
                            let common: BTreeSet<u64> =
                                dx.intersection(&dy).copied().collect();
                            let zx = (x.0 - (m0 - r), x.1);
                            let zy = (y.0 - (m0 - r), y.1);
                            let down: BTreeSet<LatticePoint> =
                                cur[&zx].intersection(&cur[&zy]).copied().collect();
                            if common.is_empty() {
                                assert_eq!(i, down);
                            } else {
                                let w = cur
                                    .iter()
                                    .find(|(w, set)| {
                                        w.0 >= r && w.0 < m0 && **set == down
                                    })
                                    .map(|(w, _)| *w)
                                    .expect("the meet is a middle pair");
                                assert_eq!(common, dset(phi(&s, j as u64, w)));
                                assert_eq!(i, nxt[&phi(&s, j as u64, w)]);
                            }
                        }
                        (1, 2) => {
                            if dset(x).contains(&(y.1 - pow)) {
                                let c = y.0.min(m0 - 1);
                                assert_eq!(i, nxt[&(c, y.1)]);
                            } else {
                                assert!(i.is_empty());
                            }
                        }
                        (2, 2) => {
                            if x.1 == y.1 {
                                let low = if x.0 <= y.0 { x } else { y };
                                assert_eq!(i, nxt[&low]);
                            } else {
                                assert!(i.is_empty());
                            }
                        }
                        q => unreachable!("quadrants {q:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn ordinal_sets_restrict_down() {
        let s = sch();
        for alpha in [0u64, 1, 2, 5, 7, 11, 17] {
            for b in 0..4u64 {
                let deep = lattice_point(&s, alpha, b, 4).unwrap();
                let shallow = lattice_point(&s, alpha, b, 3).unwrap();
                let cut: BTreeSet<Vec<u64>> = deep
                    .points
                    .iter()
                    .filter(|p| p[0] <= 3)
                    .cloned()
                    .collect();
                assert_eq!(cut, shallow.points, "alpha={alpha} b={b}");
                if 1u64 << 3 > b {
                    let fam = lattice_level(&s, 3).unwrap();
                    let a = (metrics::f(&s, alpha, 3).unwrap() - 1) as u64;
                    let want: BTreeSet<Vec<u64>> = fam[&(a, b)]
                        .iter()
                        .map(|&(l, h, st)| vec![l, h, st])
                        .collect();
                    assert_eq!(shallow.points, want);
                }
            }
        }
        // below the entry rank the set has not started yet
        assert!(lattice_point(&s, 9, 5, 2).unwrap().points.is_empty());
        assert!(!lattice_point(&s, 9, 5, 3).unwrap().points.is_empty());
    }

    #[test]
    fn ordinal_intersections_are_ordinal_sets() {
        let s = sch();
        let deep = 4u64;
        let fam = lattice_level(&s, deep).unwrap();
        let of = |alpha: u64, b: u64| -> &BTreeSet<LatticePoint> {
            let a = (metrics::f(&s, alpha, deep).unwrap() - 1) as u64;
            &fam[&(a, b)]
        };
        let pairs = [(7u64, 0u64), (11, 1), (13, 0), (17, 2), (5, 3)];
        for &(beta, b) in &pairs {
            for &(delta, d) in &pairs {
                let meet: BTreeSet<LatticePoint> =
                    of(beta, b).intersection(of(delta, d)).copied().collect();
                if meet.is_empty() {
                    continue;
                }
                // some pair (gamma, c) with gamma at most beta carries it
                let hit = (0..=beta)
                    .any(|g| (0..1u64 << deep).any(|c| *of(g, c) == meet));
                assert!(hit, "meet of ({beta},{b}) and ({delta},{d}) escapes");
            }
        }
        // the two access paths agree
        let via = lattice_point(&s, 11, 1, deep).unwrap();
        let want: BTreeSet<Vec<u64>> =
            of(11, 1).iter().map(|&(l, h, st)| vec![l, h, st]).collect();
        assert_eq!(via.points, want);
    }

    #[test]
    fn budget_guard_trips() {
        let tight = Scheme::with_budget(TypeSpec::binary(), 50);
        assert!(matches!(
            lattice_level(&tight, 4),
            Err(Error::LevelTooDeep { .. })
        ));
        lattice_level(&tight, 1).unwrap();
    }
}
