//! The special tree of divergence-level tables: node beta carries the
//! function xi -> rho(xi, beta) on beta+1, restrictions of which are again
//! nodes up to finite error; the (k, s) index sorts all nodes into
//! antichains.

use crate::error::{Error, Result};
use crate::scheme::Scheme;

/// The full table of beta: entry xi is rho(xi, beta), for xi <= beta.
pub fn node(s: &Scheme, beta: u64) -> Result<Vec<u64>> {
    (0..=beta).map(|xi| s.rho(xi, beta)).collect()
}

/// The restriction of beta's table to domain alpha+1 (alpha <= beta). Equals
/// alpha's own table outside the level-rho(alpha,beta) closure of alpha.
pub fn node_restricted(s: &Scheme, beta: u64, alpha: u64) -> Result<Vec<u64>> {
    if alpha > beta {
        return Err(Error::BadInput(format!(
            "restriction needs alpha <= beta, got {alpha} > {beta}"
        )));
    }
    (0..=alpha).map(|xi| s.rho(xi, beta)).collect()
}

/// The antichain index (k, size of the level-k closure) of a table over
/// dom = max+1: k is minimal such that the table agrees with max's own table
/// outside the closure and is bounded by k on it.
pub fn antichain_index(s: &Scheme, table: &[u64]) -> Result<(u64, u64)> {
    if table.is_empty() {
        return Err(Error::BadInput("empty table".into()));
    }
    let bf = (table.len() - 1) as u64;
    let top = s.level_above(bf)?;
    let mut cap = 0;
    for (xi, &v) in table.iter().enumerate() {
        cap = cap.max(v.max(s.rho(xi as u64, bf)?));
    }
    for k in 0..=top.max(cap) + 1 {
        let closure = s.closure(bf, k)?;
        let outside_ok = (0..=bf)
            .filter(|xi| !closure.contains(*xi))
            .all(|xi| s.rho(xi, bf).map_or(false, |r| r == table[xi as usize]));
        let inside_ok = closure.iter().all(|xi| table[xi as usize] <= k);
        if outside_ok && inside_ok {
            return Ok((k, closure.len() as u64));
        }
    }
    unreachable!("index search is bounded by the table maximum");
}
