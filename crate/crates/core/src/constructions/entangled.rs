//! Signed integer sequences attached to ordinals, lexicographically ordered.
//!
//! Level k of the sequence reads the trace value i at k and keeps or flips
//! its sign according to whether the strict closure count one level down
//! falls in the i-th canonical subset of the level window.  The subsets run
//! through a binary counter with wrap-around, so every subset of the window
//! appears whenever the type grants n_k at least 2^(m_{k-1}) + 1 slots; the
//! functions refuse types that cannot.
//!
//! Pairs of disjoint tuples then realize comparison patterns through the
//! lexicographic order on the sequences.

use std::collections::BTreeSet;

use crate::enumerate::counter_mask;
use crate::error::{Error, Result};
use crate::metrics;
use crate::scheme::Scheme;

use super::m64;

// Every level j < len must offer a slot per subset of its window, plus the
// zero index.
fn require_rich(s: &Scheme, len: u64) -> Result<()> {
    for j in 1..len {
        let m = m64(s, j - 1)?;
        let have = s.n(j) as u128;
        let needed = if m >= 127 {
            u128::MAX
        } else {
            (1u128 << m) + 1
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

/// First `len` entries of the sequence attached to `alpha`.
pub fn entangled_real(s: &Scheme, alpha: u64, len: u64) -> Result<Vec<i64>> {
    require_rich(s, len)?;
    let mut out = Vec::with_capacity(len as usize);
    for k in 0..len {
        if k == 0 {
            out.push(0);
            continue;
        }
        let t = metrics::xi(s, alpha, k)?;
        if t <= 0 {
            out.push(0);
            continue;
        }
        let v = (metrics::f(s, alpha, k - 1)? - 1) as u64;
        let r = s.r(k);
        // require_rich keeps the window below 64 bits
        let mask = counter_mask(t as u128, s.d(k)? as u32);
        let inside = v >= r && (mask >> (v - r)) & 1 == 1;
        out.push(if inside { t } else { -t });
    }
    Ok(out)
}

/// Strict lexicographic comparison: the first disagreement decides, and a
/// proper prefix precedes its extensions.
pub fn lex_less(f: &[i64], g: &[i64]) -> bool {
    f < g
}

/// The comparison pattern realized by the tuples `a` and `b` at depth `len`:
/// entry i is true when the sequence of a[i] lexicographically precedes the
/// sequence of b[i].  The tuples must be strictly increasing, disjoint and of
/// equal positive length, and every pair must separate within `len` levels.
pub fn realizes_pattern(s: &Scheme, a: &[u64], b: &[u64], len: u64) -> Result<Vec<bool>> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::BadInput(
            "pattern tuples must share a positive length".into(),
        ));
    }
    for t in [a, b] {
        if t.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadInput(
                "pattern tuples must be strictly increasing".into(),
            ));
        }
    }
    let bs: BTreeSet<u64> = b.iter().copied().collect();
    if a.iter().any(|x| bs.contains(x)) {
        return Err(Error::BadInput("pattern tuples must be disjoint".into()));
    }
    let mut out = Vec::with_capacity(a.len());
    for (x, y) in a.iter().zip(b) {
        let fx = entangled_real(s, *x, len)?;
        let fy = entangled_real(s, *y, len)?;
        if fx == fy {
            return Err(Error::BadInput(format!(
                "the pair ({x}, {y}) is undecided at depth {len}"
            )));
        }
        out.push(lex_less(&fx, &fy));
    }
    Ok(out)
}
