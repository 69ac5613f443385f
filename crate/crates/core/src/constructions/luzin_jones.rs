//! An almost disjoint family in which intersections below a pair's
//! divergence level are forced large while later levels are forced empty,
//! together with the separator sets that isolate initial segments.
//!
//! Points live in level blocks N_k = {k} x m_{k-1} x ((m_{k-1}-r_k)k) for
//! k >= 1, coded as triples (k, row, column).

use crate::error::Result;
use crate::metrics;
use crate::scheme::Scheme;

use super::{m64, require_binary, TruncatedSet};

/// The level-k slice of the point set of alpha: a single full row when the
/// closure sits in the root or piece 0, a k-wide column band across the
/// off-root rows when it sits in piece 1.
fn slice(s: &Scheme, alpha: u64, k: u64, out: &mut TruncatedSet) -> Result<()> {
    let m_prev = m64(s, k - 1)?;
    let rk = s.r(k);
    let d = m_prev - rk;
    let xi = metrics::xi(s, alpha, k)?;
    let x = (s.closure_size(alpha, k)? - 1) as u64;
    if xi <= 0 {
        for c in 0..d * k {
            out.points.insert(vec![k, x, c]);
        }
    } else {
        let lo = (x - m_prev) * k;
        for b in rk..m_prev {
            for c in lo..lo + k {
                out.points.insert(vec![k, b, c]);
            }
        }
    }
    Ok(())
}

/// The point set of alpha truncated to levels <= depth.
pub fn point_set(s: &Scheme, alpha: u64, depth: u64) -> Result<TruncatedSet> {
    require_binary(s)?;
    let mut out = TruncatedSet::new(depth);
    for k in 1..=depth {
        slice(s, alpha, k, &mut out)?;
    }
    Ok(out)
}

/// The separator of beta: at each level, the union of the level slices of
/// every ordinal in beta's closure there.
pub fn separator(s: &Scheme, beta: u64, depth: u64) -> Result<TruncatedSet> {
    require_binary(s)?;
    let mut out = TruncatedSet::new(depth);
    for k in 1..=depth {
        for alpha in s.closure(beta, k)?.iter() {
            slice(s, alpha, k, &mut out)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::TypeSpec;

    fn binary() -> Scheme {
        Scheme::new(TypeSpec::binary())
    }

    fn level(t: &TruncatedSet, k: u64) -> Vec<Vec<u64>> {
        t.at_level(k).into_iter().collect()
    }

    #[test]
    fn frozen_slices() {
        let s = binary();
        let a2 = point_set(&s, 2, 2).unwrap();
        assert_eq!(level(&a2, 2), vec![vec![2, 1, 0], vec![2, 1, 1]]);
        let a0 = point_set(&s, 0, 1).unwrap();
        assert_eq!(level(&a0, 1), vec![vec![1, 0, 0]]);
    }

    #[test]
    fn rejects_non_binary() {
        let s = Scheme::new(TypeSpec::star());
        assert!(point_set(&s, 0, 2).is_err());
    }

    #[test]
    fn points_stay_inside_blocks() {
        let s = binary();
        for alpha in 0..30u64 {
            let a = point_set(&s, alpha, 6).unwrap();
            for p in &a.points {
                let (k, b, c) = (p[0], p[1], p[2]);
                assert!(k >= 1 && k <= 6);
                let m_prev = s.m(k - 1).unwrap() as u64;
                let d = m_prev - s.r(k);
                assert!(b < m_prev, "row escapes block at {p:?}");
                assert!(c < d * k, "column escapes block at {p:?}");
            }
        }
    }

    #[test]
    fn pair_intersections_bounded_and_large() {
        // levels above rho are disjoint; the level-rho slice intersection
        // has exactly rho points, so the whole intersection has at least rho
        let s = binary();
        let n = 25u64;
        for b in 0..n {
            for a in 0..b {
                let rho = s.rho(a, b).unwrap();
                let depth = rho + 3;
                let pa = point_set(&s, a, depth).unwrap();
                let pb = point_set(&s, b, depth).unwrap();
                let inter = pa.inter(&pb);
                assert!(
                    inter.max_level().map_or(true, |l| l <= rho),
                    "a={a} b={b}: intersection above rho"
                );
                assert!(
                    inter.len() as u64 >= rho,
                    "a={a} b={b}: |inter| = {} < rho = {rho}",
                    inter.len()
                );
                let at_rho: Vec<_> = inter.at_level(rho).into_iter().collect();
                assert_eq!(at_rho.len() as u64, rho, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn separator_splits_the_family() {
        // alpha <= beta: the part of alpha's set missed by the separator
        // sits strictly below rho(alpha,beta); gamma > beta: the part of
        // gamma's set caught by the separator sits at levels <= the largest
        // rho(gamma, delta) over closure members delta
        let s = binary();
        let n = 25u64;
        let depth = 6u64;
        for beta in 0..n {
            let c = separator(&s, beta, depth).unwrap();
            for alpha in 0..=beta {
                let rho = s.rho(alpha, beta).unwrap();
                let pa = point_set(&s, alpha, depth).unwrap();
                let missed = pa.minus(&c);
                assert!(
                    missed.max_level().map_or(true, |l| l < rho.max(1)),
                    "alpha={alpha} beta={beta}: miss at level >= rho"
                );
            }
            for gamma in beta + 1..n {
                let pg = point_set(&s, gamma, depth).unwrap();
                let caught = pg.inter(&c);
                let mut bound = 0;
                for k in 1..=depth {
                    for delta in s.closure(beta, k).unwrap().iter() {
                        bound = bound.max(s.rho(gamma, delta).unwrap());
                    }
                }
                assert!(
                    caught.max_level().map_or(true, |l| l <= bound),
                    "gamma={gamma} beta={beta}: caught above bound {bound}"
                );
            }
        }
    }
}
