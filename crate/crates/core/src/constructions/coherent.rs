//! A coherent family of partial functions on a layered index set.  Block k
//! consists of quadruples (k, i, j, s) with i, j below the recycling count
//! and s < k; the function at alpha copies entries of the level-k closure,
//! choosing the i-th or j-th entry by the trace value at k.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::metrics;
use crate::scheme::Scheme;

use super::{require_binary, TruncatedSet};

/// Points of block k, in order.
pub fn block(s: &Scheme, k: u64) -> Vec<Vec<u64>> {
    let r = s.r(k);
    let mut out = Vec::new();
    for i in 0..r {
        for j in 0..r {
            for t in 0..k {
                out.push(vec![k, i, j, t]);
            }
        }
    }
    out
}

/// Domain of the function at alpha truncated to blocks 1..=depth, together
/// with the function itself. The value at (k, i, j, s) is the i-th closure
/// entry when the trace at k is 0, the j-th when it is 1.
pub fn family_point(
    s: &Scheme,
    alpha: u64,
    depth: u64,
) -> Result<(TruncatedSet, BTreeMap<Vec<u64>, u64>)> {
    require_binary(s)?;
    let mut dom = TruncatedSet::new(depth);
    let mut f = BTreeMap::new();
    for k in 1..=depth {
        let xi = metrics::xi(s, alpha, k)?;
        if xi < 0 {
            continue;
        }
        let entries: Vec<u64> = s.closure(alpha, k)?.iter().collect();
        for p in block(s, k) {
            // trace >= 0 forces |closure| > r_k, so both indices are in range
            let pick = if xi == 0 { p[1] } else { p[2] } as usize;
            f.insert(p.clone(), entries[pick]);
            dom.points.insert(p);
        }
    }
    Ok((dom, f))
}

/// Points of the truncated domain mapped to the given value.
pub fn preimage(
    dom: &TruncatedSet,
    f: &BTreeMap<Vec<u64>, u64>,
    value: u64,
) -> TruncatedSet {
    let mut out = TruncatedSet::new(dom.depth);
    for p in dom.points.iter() {
        if f.get(p) == Some(&value) {
            out.points.insert(p.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::TypeSpec;

    fn binary() -> Scheme {
        Scheme::new(TypeSpec::binary())
    }

    #[test]
    fn block_shape() {
        let s = binary();
        // r_1 = 0 and r_4 = 2 for the built-in binary type
        assert!(block(&s, 1).is_empty());
        let b4 = block(&s, 4);
        assert_eq!(b4.len(), 2 * 2 * 4);
        assert!(b4.contains(&vec![4, 1, 0, 3]));
    }

    #[test]
    fn rejects_non_binary() {
        let s = Scheme::new(TypeSpec::star());
        assert!(family_point(&s, 2, 5).is_err());
    }

    #[test]
    fn domain_blocks_follow_trace() {
        let s = binary();
        for alpha in 0..25u64 {
            let (dom, _) = family_point(&s, alpha, 6).unwrap();
            for k in 1..=6u64 {
                let xi = metrics::xi(&s, alpha, k).unwrap();
                let present = dom.at_level(k).len();
                let full = block(&s, k).len();
                if xi < 0 {
                    assert_eq!(present, 0, "alpha={alpha} k={k}");
                } else {
                    assert_eq!(present, full, "alpha={alpha} k={k}");
                }
            }
        }
    }

    #[test]
    fn values_stay_below_the_index() {
        let s = binary();
        for alpha in 1..25u64 {
            let (_, f) = family_point(&s, alpha, 6).unwrap();
            for (p, v) in f.iter() {
                assert!(*v < alpha, "alpha={alpha} p={p:?} v={v}");
            }
        }
    }

    #[test]
    fn pretower_blocks_nest_above_rho() {
        let s = binary();
        let depth = 6u64;
        for beta in 0..20u64 {
            for alpha in 0..beta {
                let rho = s.rho(alpha, beta).unwrap();
                let (da, _) = family_point(&s, alpha, depth).unwrap();
                let (db, _) = family_point(&s, beta, depth).unwrap();
                for k in (rho + 1)..=depth {
                    let la = da.at_level(k);
                    let lb = db.at_level(k);
                    assert!(la.is_subset(&lb), "alpha={alpha} beta={beta} k={k}");
                }
            }
        }
    }

    #[test]
    fn exact_coherence_above_rho() {
        // past the distance level the two functions agree on every shared
        // point, so disagreements on the common domain are finite
        let s = binary();
        let depth = 6u64;
        for beta in 0..20u64 {
            for alpha in 0..beta {
                let rho = s.rho(alpha, beta).unwrap();
                let (da, fa) = family_point(&s, alpha, depth).unwrap();
                let (db, fb) = family_point(&s, beta, depth).unwrap();
                for p in da.inter(&db).points.iter() {
                    if p[0] > rho {
                        assert_eq!(fa[p], fb[p], "alpha={alpha} beta={beta} p={p:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn luzin_preimage_intersections() {
        // whenever xi < mu < beta, every alpha between mu and beta that
        // escapes the closure of beta at level max(k, pairwise distances)
        // shares a whole sub-block between its preimage of xi and beta's
        // preimage of mu, pinned at t = rho(alpha, beta): entries i and j are
        // the strict closure sizes of xi and mu there, and the block
        // {t} x {i} x {j} x t has more than k points
        let s = binary();
        let mut found = 0u64;
        for beta in 2..19u64 {
            for mu in 1..beta {
                for xi_ord in 0..mu {
                    for k in 0..3u64 {
                        let l = k
                            .max(metrics::rho_diameter(&s, &[xi_ord, mu, beta]).unwrap());
                        let cl = s.closure(beta, l).unwrap();
                        for alpha in (mu + 1)..beta {
                            if cl.contains(alpha) {
                                continue;
                            }
                            let t = s.rho(alpha, beta).unwrap();
                            assert!(t > l, "t={t} l={l}");
                            assert_eq!(metrics::xi(&s, alpha, t).unwrap(), 0);
                            assert_eq!(metrics::xi(&s, beta, t).unwrap(), 1);
                            assert_eq!(metrics::xi(&s, xi_ord, t).unwrap(), -1);
                            assert_eq!(metrics::xi(&s, mu, t).unwrap(), -1);
                            let i = (metrics::f(&s, xi_ord, t).unwrap() - 1) as u64;
                            let j = (metrics::f(&s, mu, t).unwrap() - 1) as u64;
                            assert!(i < s.r(t) && j < s.r(t));
                            let (da, fa) = family_point(&s, alpha, t).unwrap();
                            let (db, fb) = family_point(&s, beta, t).unwrap();
                            let pa = preimage(&da, &fa, xi_ord);
                            let pb = preimage(&db, &fb, mu);
                            let common = pa.inter(&pb);
                            for tt in 0..t {
                                let p = vec![t, i, j, tt];
                                assert!(
                                    common.points.contains(&p),
                                    "missing block point {p:?} for alpha={alpha} beta={beta}"
                                );
                            }
                            assert!(
                                common.len() as u64 > k,
                                "alpha={alpha} beta={beta} k={k}"
                            );
                            found += 1;
                        }
                    }
                }
            }
        }
        assert!(found > 0, "no qualifying configuration in window");
    }
}
