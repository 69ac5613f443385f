//! A pair coloring in which every color is used at most twice. The color
//! packs the larger ordinal, the distance level, and one closure size, so
//! two pairs can only collide when a single set captures them together.

use crate::enumerate::checked_pair;
use crate::error::{Error, Result};
use crate::metrics;
use crate::scheme::Scheme;

/// Color of an unordered pair of distinct ordinals.
///
/// With `a < b` and `rho` their distance level, the color is
/// `pair(b, pair(rho, v))` where `v` is the closure size of `a` at level
/// `rho` when the trace index of `b` at `rho` is at least 3, and at level
/// `rho - 1` otherwise. Argument order does not matter.
pub fn polychromatic_color(s: &Scheme, alpha: u64, beta: u64) -> Result<u64> {
    if alpha == beta {
        return Err(Error::BadInput(
            "pair color needs two distinct ordinals".into(),
        ));
    }
    let (a, b) = if alpha < beta {
        (alpha, beta)
    } else {
        (beta, alpha)
    };
    let rho = s.rho(a, b)?;
    debug_assert!(rho >= 1, "distinct ordinals never meet at level 0");
    let t = metrics::xi(s, b, rho)?;
    let v = if t >= 3 {
        metrics::f(s, a, rho)?
    } else {
        metrics::f(s, a, rho - 1)?
    };
    let v = u64::try_from(v).map_err(|_| Error::SizeOverflow { level: rho })?;
    let inner = checked_pair(rho, v).ok_or(Error::SizeOverflow { level: rho })?;
    checked_pair(b, inner).ok_or(Error::SizeOverflow { level: rho })
}
