//! The recursive linear order on ordinals decided at the first
//! size-disagreement level, together with the chain labels that cover the
//! square of the order by countably many chains.

use crate::error::{Error, Result};
use crate::metrics;
use crate::scheme::Scheme;

/// Decide a < b in the recursive order. At the disagreement level the two
/// closures share an initial segment; if it reaches the root size the
/// closure sizes decide, otherwise the pair of least unshared elements
/// decides recursively. Both replacements sit strictly below the originals,
/// so the larger argument strictly decreases.
pub fn less(s: &Scheme, a: u64, b: u64) -> Result<bool> {
    if a == b {
        return Err(Error::BadInput("order is irreflexive".into()));
    }
    let (mut a, mut b) = (a, b);
    loop {
        let delta = metrics::delta(s, a, b)?
            .finite()
            .expect("distinct ordinals have a finite disagreement level");
        let ca = s.closure(a, delta)?;
        let cb = s.closure(b, delta)?;
        let shared = ca.inter(&cb);
        if shared.len() as u64 >= s.r(delta) {
            return Ok(ca.len() < cb.len());
        }
        let na = ca.minus(&cb).first().expect("closure sizes exceed overlap");
        let nb = cb.minus(&ca).first().expect("closure sizes exceed overlap");
        debug_assert!(na.max(nb) < a.max(b));
        a = na;
        b = nb;
    }
}

/// The chain label of a pair a < b: closure sizes at the divergence level,
/// plus the level.
pub fn chain_index(s: &Scheme, a: u64, b: u64) -> Result<(u64, u64, u64)> {
    if a >= b {
        return Err(Error::BadInput(format!("need a < b, got {a}, {b}")));
    }
    let z = s.rho(a, b)?;
    Ok((
        s.closure_size(a, z)? as u64,
        s.closure_size(b, z)? as u64,
        z,
    ))
}
